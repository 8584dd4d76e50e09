#pragma once

// Finite SDP witnesses built from the Gaussian wave: each tree-like variable
// becomes a geometrically weighted, sign-corrected combination of generator
// directions around it, every other variable gets a private direction.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "naesdp/graph_core.hpp"
#include "naesdp/infinite_tree.hpp"

namespace naesdp {

/// Constraint and variable degrees of a bipartite source, read as the largest
/// degree on each side (exact for biregular graphs, and for truncated tree
/// balls of radius >= 1).
std::pair<std::size_t, std::size_t> source_degrees(const SignedMultigraph& source);

/// Variable v is good iff the radius-(2L+2) ball of the bipartite source
/// around it is a tree whose interior vertices all have full degree.
std::vector<char> classify_good_vertices(const SignedMultigraph& instance,
                                         const SignedMultigraph& source, int L);

/// Product of edge signs along a u-w path, found by sign propagation over the
/// radius ball of u. Throws InvalidArgument if w is farther than `radius` or
/// the ball is not sign-consistent (which rules out a well-defined path sign).
int path_sign(const SignedMultigraph& instance, std::size_t u, std::size_t w, int radius);

struct Coefficient {
  std::size_t generator = 0;
  double weight = 0.0;
};

inline constexpr std::size_t kDefaultGramDenseCap = 4000;

class GramWitness {
 public:
  /// Coefficient lists are sorted by generator on construction. A dense Gram
  /// is assembled when the vertex count is at most `dense_cap`. The diagonal
  /// is 1 by definition; coefficient rows must have unit norm up to 1e-9.
  GramWitness(SignedMultigraph instance, std::vector<std::vector<Coefficient>> coefficients,
              std::vector<char> good, WaveParams params, std::size_t generator_count,
              std::size_t dense_cap = kDefaultGramDenseCap);

  const SignedMultigraph& instance() const noexcept { return instance_; }
  std::size_t vertex_count() const noexcept { return coefficients_.size(); }
  std::size_t generator_count() const noexcept { return generator_count_; }
  std::span<const Coefficient> coefficients(std::size_t v) const { return coefficients_.at(v); }
  const std::vector<char>& good() const noexcept { return good_; }
  const WaveParams& params() const noexcept { return params_; }

  bool has_dense() const noexcept { return dense_.size() > 0; }
  const Eigen::MatrixXd& dense() const noexcept { return dense_; }

  /// <X_u, X_v>; 1 on the diagonal.
  double entry(std::size_t u, std::size_t v) const;

  /// Sparse inner product of coefficient rows, ignoring the stored Gram.
  double coefficient_dot(std::size_t u, std::size_t v) const;

  /// Principal submatrix on `vertices`.
  Eigen::MatrixXd block(std::span<const std::size_t> vertices) const;

  /// Sparse Gram matrix (all nonzero entries, unit diagonal).
  SparseMatrix sparse_gram() const;

 private:
  SignedMultigraph instance_;
  std::vector<std::vector<Coefficient>> coefficients_;
  std::vector<char> good_;
  WaveParams params_;
  std::size_t generator_count_;
  Eigen::MatrixXd dense_;
};

struct WitnessOptions {
  std::size_t dense_cap = kDefaultGramDenseCap;
  std::size_t threads = 1;
};

/// Wave witness on `instance` = clique_expansion(source). With triangle_safe,
/// rho is clamped into [-1/3, 1/3] first.
GramWitness build_witness(const SignedMultigraph& instance, const SignedMultigraph& source, double rho,
                          double tol, bool triangle_safe, const WitnessOptions& options = {});

struct WitnessReport {
  double xor_value = 0.0;
  std::optional<double> nae_value;      // 3/2 xor_value, constraint size 3 only
  double min_gram_eigenvalue = 0.0;
  double worst_triangle_slack = 0.0;
  double max_offdiag_abs = 0.0;
  double max_diagonal_defect = 0.0;
  double good_fraction = 0.0;
  std::size_t triples_checked = 0;
  std::size_t eigen_blocks = 0;         // 0 when the whole Gram was solved
};

/// xor_value = mean over edges of 1/2 - (xi/2) <X_u, X_v>.
WitnessReport witness_objective(const GramWitness& w, std::size_t clause_size = 3);

struct ValidationOptions {
  std::size_t random_triples = 100'000;
  std::size_t block_size = 400;
  std::size_t block_count = 8;
  std::uint64_t seed = 0x7a11;
  std::size_t threads = 1;
};

/// Objective plus feasibility: minimum Gram eigenvalue (whole matrix when a
/// dense Gram exists, otherwise the minimum over sampled principal blocks),
/// triangle slack over every constraint clique triple and random triples.
WitnessReport validate_witness(const GramWitness& w, const SignedMultigraph& source,
                               const ValidationOptions& options = {});

/// min over the four sign patterns with an even number of minus signs of
/// (+-x +- y +- z) + 1.
double triangle_slack(double x, double y, double z);

/// 1 - 1/rho for an unsigned instance whose edge entries all equal rho.
double theta_bound(const GramWitness& w);

}  // namespace naesdp
