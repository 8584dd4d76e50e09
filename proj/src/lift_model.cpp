#include "naesdp/lift_model.hpp"

#include <limits>
#include <string>

#include "naesdp/error.hpp"
#include "naesdp/rng.hpp"

namespace naesdp {

void LiftSpec::validate() const {
  if (n == 0) throw InvalidArgument("lift order must be at least 1");
  if (permutations.size() != base.edge_count()) {
    throw InvalidArgument("expected one permutation per base edge");
  }
  std::vector<std::uint8_t> seen(n);
  for (const auto& perm : permutations) {
    if (perm.size() != n) throw InvalidArgument("permutation has the wrong length");
    std::fill(seen.begin(), seen.end(), 0);
    for (std::uint32_t x : perm) {
      if (x >= n || seen[x]) throw InvalidArgument("permutation is not a bijection of [n]");
      seen[x] = 1;
    }
  }
  if (signs.size() != n * base.edge_count()) {
    throw InvalidArgument("sign count must equal n times the base edge count");
  }
  for (std::int8_t s : signs) {
    if (s != 1 && s != -1) throw InvalidArgument("signs must be +-1");
  }
}

SignedMultigraph LiftSpec::materialize() const {
  validate();
  std::vector<Edge> edges;
  edges.reserve(n * base.edge_count());
  for (std::size_t e = 0; e < base.edge_count(); ++e) {
    const Edge& be = base.edge(e);
    for (std::size_t i = 0; i < n; ++i) {
      edges.push_back({be.u * n + i, be.v * n + permutations[e][i], signs[e * n + i]});
    }
  }
  std::optional<Bipartition> parts;
  if (base.bipartition()) parts = Bipartition{base.bipartition()->left * n, base.bipartition()->right * n};
  return SignedMultigraph(base.vertex_count() * n, std::move(edges), parts);
}

LiftResult random_lift(const SignedMultigraph& base, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("lift order must be at least 1");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("lift order too large");
  LiftSpec spec;
  spec.base = base;
  spec.n = n;
  spec.seed = seed;
  spec.permutations.resize(base.edge_count());
  for (std::size_t e = 0; e < base.edge_count(); ++e) {
    auto& perm = spec.permutations[e];
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    Rng rng(derive_seed(seed, e));
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(perm[i], perm[j]);
    }
  }
  spec.signs.resize(n * base.edge_count());
  for (std::size_t e = 0; e < base.edge_count(); ++e) {
    for (std::size_t i = 0; i < n; ++i) spec.signs[e * n + i] = base.edge(e).sign;
  }
  SignedMultigraph lifted = spec.materialize();
  return {std::move(lifted), std::move(spec)};
}

SignedMultigraph random_signing(const SignedMultigraph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int8_t> signs(g.edge_count());
  for (auto& s : signs) s = static_cast<std::int8_t>(rng.sign());
  return g.with_signs(signs);
}

LiftResult random_signed_lift(const SignedMultigraph& base, std::size_t n, std::uint64_t seed) {
  LiftResult lift = random_lift(base, n, derive_seed(seed, 1));
  lift.spec.seed = seed;
  lift.lifted = random_signing(lift.lifted, derive_seed(seed, 2));
  for (std::size_t e = 0; e < lift.lifted.edge_count(); ++e) {
    lift.spec.signs[e] = lift.lifted.edge(e).sign;
  }
  return lift;
}

std::vector<std::size_t> project_to_base(const LiftSpec& spec) {
  std::vector<std::size_t> out;
  out.reserve(spec.n * spec.base.edge_count());
  const SignedMultigraph lifted = spec.materialize();
  for (const Edge& e : lifted.edges()) {
    const std::size_t bu = e.u / spec.n;
    const std::size_t bv = e.v / spec.n;
    // Recover the base edge through the permutation that produced (e.u, e.v).
    for (std::size_t be = 0; be < spec.base.edge_count(); ++be) {
      const Edge& b = spec.base.edge(be);
      if (b.u == bu && b.v == bv && spec.permutations[be][e.u % spec.n] == e.v % spec.n) {
        out.push_back(be);
        break;
      }
    }
  }
  return out;
}

WalkCounts nb_walk_counts(const SignedMultigraph& base, int kmax) {
  if (kmax < 2) throw InvalidArgument("kmax must be at least 2");
  const SignedMultigraph unsigned_base =
      base.with_signs(std::vector<std::int8_t>(base.edge_count(), 1));
  const NonBacktracking nb = non_backtracking_matrix(unsigned_base);
  const auto dim = static_cast<std::size_t>(nb.matrix.rows());
  // Successor lists of B (all entries +1).
  std::vector<std::vector<std::size_t>> next(dim);
  for (int k = 0; k < nb.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(nb.matrix, k); it; ++it) {
      next[static_cast<std::size_t>(it.row())].push_back(static_cast<std::size_t>(it.col()));
    }
  }
  std::vector<std::int64_t> power(dim * dim, 0);
  for (std::size_t i = 0; i < dim; ++i) power[i * dim + i] = 1;
  std::vector<std::int64_t> scratch(dim * dim);
  WalkCounts out;
  for (int k = 1; k <= kmax; ++k) {
    std::fill(scratch.begin(), scratch.end(), 0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t l = 0; l < dim; ++l) {
        const std::int64_t p = power[i * dim + l];
        if (p == 0) continue;
        for (std::size_t j : next[l]) {
          if (__builtin_add_overflow(scratch[i * dim + j], p, &scratch[i * dim + j])) {
            throw ResourceError("non-backtracking walk count overflows 64 bits");
          }
        }
      }
    }
    power.swap(scratch);
    if (k >= 2) {
      std::int64_t trace = 0;
      for (std::size_t i = 0; i < dim; ++i) trace += power[i * dim + i];
      out.values.push_back(trace);
    }
  }
  return out;
}

namespace {

struct CycleSearch {
  const SignedMultigraph& g;
  int gmax;
  std::size_t root = 0;
  std::vector<std::uint8_t> on_path;
  std::vector<std::int64_t> twice;  // each cycle is found once per direction

  void extend(std::size_t x, std::size_t entering_edge, int length) {
    for (const Incidence& inc : g.incident(x)) {
      if (inc.edge == entering_edge) continue;
      if (inc.neighbor == root) {
        if (length + 1 >= 2 && length + 1 <= gmax) ++twice[static_cast<std::size_t>(length + 1 - 2)];
        continue;
      }
      if (inc.neighbor < root || on_path[inc.neighbor] || length + 1 >= gmax) continue;
      on_path[inc.neighbor] = 1;
      extend(inc.neighbor, inc.edge, length + 1);
      on_path[inc.neighbor] = 0;
    }
  }
};

}  // namespace

CycleStats cycle_counts(const SignedMultigraph& g, int gmax, const CycleOptions& options) {
  if (gmax < 2) throw InvalidArgument("gmax must be at least 2");
  if (gmax > options.max_length) {
    throw ResourceError("cycle enumeration is capped at length " + std::to_string(options.max_length));
  }
  CycleSearch search{g, gmax, 0, std::vector<std::uint8_t>(g.vertex_count(), 0),
                     std::vector<std::int64_t>(static_cast<std::size_t>(gmax - 1), 0)};
  constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < g.vertex_count(); ++s) {
    search.root = s;
    search.on_path[s] = 1;
    search.extend(s, kNoEdge, 0);
    search.on_path[s] = 0;
  }
  CycleStats stats;
  stats.gmax = gmax;
  for (std::int64_t t : search.twice) stats.counts.push_back(t / 2);
  return stats;
}

CycleStats cycle_counts(const SignedMultigraph& g, int gmax, const LiftSpec& spec,
                        const CycleOptions& options) {
  CycleStats stats = cycle_counts(g, gmax, options);
  const WalkCounts w = nb_walk_counts(spec.base, gmax);
  for (int k = 2; k <= gmax; ++k) {
    stats.poisson_means.push_back(static_cast<double>(w.at(k)) / (2.0 * k));
  }
  return stats;
}

BallScanner::BallScanner(const SignedMultigraph& g, std::size_t edge_cap)
    : g_(&g),
      edge_cap_(edge_cap),
      vertex_mark_(g.vertex_count(), 0),
      edge_mark_(g.edge_count(), 0),
      dist_(g.vertex_count(), 0) {
  queue_.reserve(g.vertex_count());
}

BallScanner::Result BallScanner::scan(std::size_t center, int radius, std::size_t stop_at,
                                      std::span<const std::size_t> target_degree) {
  if (radius < 0) throw InvalidArgument("radius must be nonnegative");
  if (++stamp_ == 0) {
    std::fill(vertex_mark_.begin(), vertex_mark_.end(), 0);
    std::fill(edge_mark_.begin(), edge_mark_.end(), 0);
    stamp_ = 1;
  }
  Result result;
  queue_.clear();
  queue_.push_back(center);
  vertex_mark_[center] = stamp_;
  dist_[center] = 0;
  std::size_t scanned = 0;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const std::size_t x = queue_[head];
    const int dx = dist_[x];
    if (!target_degree.empty() && dx < radius && g_->degree(x) != target_degree[x]) {
      result.degrees_complete = false;
    }
    for (const Incidence& inc : g_->incident(x)) {
      if (++scanned > edge_cap_) {
        throw ResourceError("ball scan exceeded " + std::to_string(edge_cap_) + " edge visits");
      }
      if (edge_mark_[inc.edge] == stamp_) continue;
      const std::size_t y = inc.neighbor;
      if (vertex_mark_[y] == stamp_) {
        edge_mark_[inc.edge] = stamp_;
        if (++result.cycle_rank >= stop_at) {
          result.vertices = queue_.size();
          return result;
        }
      } else if (dx < radius) {
        edge_mark_[inc.edge] = stamp_;
        vertex_mark_[y] = stamp_;
        dist_[y] = dx + 1;
        queue_.push_back(y);
      }
    }
  }
  result.vertices = queue_.size();
  return result;
}

std::vector<std::size_t> bad_vertices(const SignedMultigraph& g, int radius, std::size_t edge_cap) {
  if (radius < 0) throw InvalidArgument("radius must be nonnegative");
  BallScanner scanner(g, edge_cap);
  std::vector<std::size_t> bad;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (scanner.scan(v, radius, 1).cycle_rank >= 1) bad.push_back(v);
  }
  return bad;
}

bool is_tangle_free(const SignedMultigraph& g, int ell, std::size_t edge_cap) {
  if (ell < 0) throw InvalidArgument("radius must be nonnegative");
  BallScanner scanner(g, edge_cap);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (scanner.scan(v, ell, 2).cycle_rank >= 2) return false;
  }
  return true;
}

}  // namespace naesdp
