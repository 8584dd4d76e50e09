#pragma once

// Random n-lifts, random signings and the statistics used to study them:
// short-cycle counts against their Poisson limits, closed non-backtracking
// walk counts of the base, and local cycle structure of balls.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "naesdp/graph_core.hpp"

namespace naesdp {

/// Everything needed to rebuild a signed lift bit-for-bit. Lifted vertex
/// (v, i) has index v * n + i; lifted edge (e, i) has index e * n + i and joins
/// (u, i) to (v, permutations[e][i]) where base edge e = {u, v}.
struct LiftSpec {
  SignedMultigraph base;
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> permutations;
  std::vector<std::int8_t> signs;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument if counts or permutations are inconsistent.
  void validate() const;

  SignedMultigraph materialize() const;
};

struct LiftResult {
  SignedMultigraph lifted;
  LiftSpec spec;
};

/// Uniform random n-lift. Each base edge gets an independent Fisher-Yates
/// permutation driven by derive_seed(seed, edge index). Lifted signs copy the
/// base signs.
LiftResult random_lift(const SignedMultigraph& base, std::size_t n, std::uint64_t seed);

/// Same topology, IID uniform +-1 signs.
SignedMultigraph random_signing(const SignedMultigraph& g, std::uint64_t seed);

/// Random lift followed by a random signing, both derived from `seed`; the
/// returned spec carries the signs.
LiftResult random_signed_lift(const SignedMultigraph& base, std::size_t n, std::uint64_t seed);

/// Fiber projection of a lifted edge list back to base edge ids.
std::vector<std::size_t> project_to_base(const LiftSpec& spec);

/// w_k = tr(B^k) for k = 2..kmax; values[k - 2] holds w_k. Exact in 64-bit
/// integers; throws ResourceError on overflow.
struct WalkCounts {
  std::vector<std::int64_t> values;
  std::int64_t at(int k) const { return values.at(static_cast<std::size_t>(k - 2)); }
};

WalkCounts nb_walk_counts(const SignedMultigraph& base, int kmax);

struct CycleStats {
  int gmax = 0;
  std::vector<std::int64_t> counts;   // counts[k - 2] = Z_k
  std::vector<double> poisson_means;  // w_k / (2k); empty without a base
  std::int64_t count(int k) const { return counts.at(static_cast<std::size_t>(k - 2)); }
  double mean(int k) const { return poisson_means.at(static_cast<std::size_t>(k - 2)); }
};

struct CycleOptions {
  int max_length = 8;
};

/// Exact counts of cycles (closed walks without repeated vertices, two
/// parallel edges forming a 2-cycle) of each length 2..gmax.
CycleStats cycle_counts(const SignedMultigraph& g, int gmax, const CycleOptions& options = {});

/// As above, with Poisson means taken from the lift's base.
CycleStats cycle_counts(const SignedMultigraph& g, int gmax, const LiftSpec& spec,
                        const CycleOptions& options = {});

inline constexpr std::size_t kDefaultBallEdgeCap = 1'000'000;

/// BFS over the subgraph induced by the radius-`radius` ball. Reports the
/// cyclomatic number of that subgraph (edges - vertices + 1), stopping early
/// once it reaches `stop_at`. Reuses its scratch arrays across calls.
class BallScanner {
 public:
  explicit BallScanner(const SignedMultigraph& g, std::size_t edge_cap = kDefaultBallEdgeCap);

  struct Result {
    std::size_t cycle_rank = 0;     // capped at stop_at
    std::size_t vertices = 0;       // vertices reached before stopping
    bool degrees_complete = true;   // every interior vertex has its target degree
  };

  /// When `target_degree` is non-empty, also checks that every vertex strictly
  /// inside the ball has degree target_degree[v] (recognises balls of an
  /// infinite tree inside a finite, possibly truncated, graph).
  Result scan(std::size_t center, int radius, std::size_t stop_at,
              std::span<const std::size_t> target_degree = {});

 private:
  const SignedMultigraph* g_;
  std::size_t edge_cap_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint32_t> vertex_mark_;
  std::vector<std::uint32_t> edge_mark_;
  std::vector<int> dist_;
  std::vector<std::size_t> queue_;
};

/// Vertices whose radius ball contains a cycle.
std::vector<std::size_t> bad_vertices(const SignedMultigraph& g, int radius,
                                      std::size_t edge_cap = kDefaultBallEdgeCap);

/// True iff every ball of radius `ell` contains at most one independent cycle.
bool is_tangle_free(const SignedMultigraph& g, int ell, std::size_t edge_cap = kDefaultBallEdgeCap);

}  // namespace naesdp
