#pragma once

// Signed multigraphs and their matrix views.
//
// A single carrier type holds every graph the library touches: the
// constraint/variable bipartite graph, its signed version, the primal
// (clique-expanded) graph, and the signed 2XOR instance built on it.
// Bipartite graphs keep the constraint part first: vertices
// [0, left) are constraints and [left, left + right) are variables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace naesdp {

using SparseMatrix = Eigen::SparseMatrix<double>;

inline constexpr std::size_t kDefaultDenseCap = 2000;

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::int8_t sign = 1;
};

struct Bipartition {
  std::size_t left = 0;   // constraints
  std::size_t right = 0;  // variables
};

struct Incidence {
  std::size_t neighbor = 0;
  std::size_t edge = 0;
};

class SignedMultigraph {
 public:
  SignedMultigraph() = default;

  /// Throws InvalidArgument on out-of-range endpoints, self-loops, signs other
  /// than +-1, or edges that do not cross a given bipartition.
  SignedMultigraph(std::size_t vertex_count, std::vector<Edge> edges,
                   std::optional<Bipartition> parts = std::nullopt);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::optional<Bipartition>& bipartition() const noexcept { return parts_; }

  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Incident (neighbor, edge id) pairs of v, in edge-id order.
  std::span<const Incidence> incident(std::size_t v) const {
    return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
  }

  bool is_constraint(std::size_t v) const { return parts_ && v < parts_->left; }

  /// (c, d) when every constraint has degree c and every variable degree d.
  std::optional<std::pair<std::size_t, std::size_t>> biregular_degrees() const;
  bool is_biregular(std::size_t c, std::size_t d) const;

  bool all_positive() const noexcept;

  /// Same topology and bipartition, new signs (one per edge).
  SignedMultigraph with_signs(std::span<const std::int8_t> signs) const;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::optional<Bipartition> parts_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidence_;
};

/// K_{d,c}: d constraint vertices each joined to all c variable vertices.
SignedMultigraph complete_bipartite(std::size_t c, std::size_t d);

struct GraphMatrices {
  SparseMatrix adjacency;   // summed edge signs, parallel edges may cancel
  Eigen::VectorXd degree;   // every edge counts 1 regardless of sign
  SparseMatrix laplacian;   // D - A
};

GraphMatrices matrices(const SignedMultigraph& g);

/// (1 - u^2) I + u^2 D - u A
SparseMatrix deformed_laplacian(const SignedMultigraph& g, double u);

/// Dense copy of a sparse matrix; throws ResourceError above `cap` rows/cols.
Eigen::MatrixXd to_dense(const SparseMatrix& m, std::size_t cap = kDefaultDenseCap);

/// Arcs of a multigraph. Edge e = {u, v} yields arc 2e = (u -> v) and
/// arc 2e + 1 = (v -> u), so the reversal involution is a ^ 1.
class DirectedEdgeIndex {
 public:
  explicit DirectedEdgeIndex(const SignedMultigraph& g);

  std::size_t arc_count() const noexcept { return tails_.size(); }
  std::size_t tail(std::size_t arc) const { return tails_[arc]; }
  std::size_t head(std::size_t arc) const { return heads_[arc]; }
  static std::size_t edge_of(std::size_t arc) noexcept { return arc >> 1; }
  static std::size_t reverse(std::size_t arc) noexcept { return arc ^ 1U; }
  static std::size_t arc(std::size_t edge, bool forward) noexcept {
    return 2 * edge + (forward ? 0 : 1);
  }

 private:
  std::vector<std::size_t> tails_;
  std::vector<std::size_t> heads_;
};

struct NonBacktracking {
  SparseMatrix matrix;
  DirectedEdgeIndex arcs;
};

/// B[(i->j), (j->l)] = sign(i,j) for every continuation that is not the
/// reversal of the same parallel edge.
NonBacktracking non_backtracking_matrix(const SignedMultigraph& g);

/// Clique expansion of a bipartite graph onto its variable vertices. Each
/// constraint a and each pair of its incident edges (a,i), (a,j) produces the
/// edge {i, j} with sign xi_ai * xi_aj. Vertex left + j of the source becomes
/// vertex j of the output. Requires only the bipartition; use primal_graph for
/// the checked biregular version.
SignedMultigraph clique_expansion(const SignedMultigraph& x);

/// Primal graph of a (c,d)-biregular bipartite graph; output is (c-1)d-regular.
SignedMultigraph primal_graph(const SignedMultigraph& x);

struct Assignment {
  std::vector<std::int8_t> values;
};

struct AssignmentScore {
  double nae_fraction = 0.0;
  double xor_fraction = 0.0;
};

/// NAE fraction over constraints of x (c = 3) and 2XOR fraction over the
/// edges of its primal graph, where edge (u, v, xi) wants x_u x_v = -xi.
AssignmentScore evaluate_assignment(const SignedMultigraph& x, const Assignment& a);

/// Fraction of 2XOR constraints of `instance` satisfied by `a`.
double xor_fraction(const SignedMultigraph& instance, const Assignment& a);

}  // namespace naesdp
