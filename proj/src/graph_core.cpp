#include "naesdp/graph_core.hpp"

#include <string>

#include "naesdp/error.hpp"

namespace naesdp {

SignedMultigraph::SignedMultigraph(std::size_t vertex_count, std::vector<Edge> edges,
                                   std::optional<Bipartition> parts)
    : vertex_count_(vertex_count), edges_(std::move(edges)), parts_(parts) {
  if (parts_ && parts_->left + parts_->right != vertex_count_) {
    throw InvalidArgument("bipartition sizes do not sum to the vertex count");
  }
  std::vector<std::size_t> deg(vertex_count_, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.u >= vertex_count_ || ed.v >= vertex_count_) {
      throw InvalidArgument("edge " + std::to_string(e) + " has an endpoint out of range");
    }
    if (ed.u == ed.v) throw InvalidArgument("self-loop at vertex " + std::to_string(ed.u));
    if (ed.sign != 1 && ed.sign != -1) {
      throw InvalidArgument("edge " + std::to_string(e) + " has a sign other than +-1");
    }
    if (parts_ && ((ed.u < parts_->left) == (ed.v < parts_->left))) {
      throw InvalidArgument("edge " + std::to_string(e) + " does not cross the bipartition");
    }
    ++deg[ed.u];
    ++deg[ed.v];
  }
  offsets_.assign(vertex_count_ + 1, 0);
  for (std::size_t v = 0; v < vertex_count_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  incidence_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    incidence_[fill[ed.u]++] = {ed.v, e};
    incidence_[fill[ed.v]++] = {ed.u, e};
  }
}

std::optional<std::pair<std::size_t, std::size_t>> SignedMultigraph::biregular_degrees() const {
  if (!parts_ || parts_->left == 0 || parts_->right == 0) return std::nullopt;
  const std::size_t c = degree(0);
  const std::size_t d = degree(parts_->left);
  for (std::size_t v = 0; v < vertex_count_; ++v) {
    if (degree(v) != (v < parts_->left ? c : d)) return std::nullopt;
  }
  return std::pair{c, d};
}

bool SignedMultigraph::is_biregular(std::size_t c, std::size_t d) const {
  const auto cd = biregular_degrees();
  return cd && cd->first == c && cd->second == d;
}

bool SignedMultigraph::all_positive() const noexcept {
  for (const Edge& e : edges_) {
    if (e.sign != 1) return false;
  }
  return true;
}

SignedMultigraph SignedMultigraph::with_signs(std::span<const std::int8_t> signs) const {
  if (signs.size() != edges_.size()) throw InvalidArgument("sign count does not match edge count");
  std::vector<Edge> edges = edges_;
  for (std::size_t e = 0; e < edges.size(); ++e) edges[e].sign = signs[e];
  return SignedMultigraph(vertex_count_, std::move(edges), parts_);
}

SignedMultigraph complete_bipartite(std::size_t c, std::size_t d) {
  if (c == 0 || d == 0) throw InvalidArgument("complete_bipartite needs positive part sizes");
  std::vector<Edge> edges;
  edges.reserve(c * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < c; ++i) edges.push_back({a, d + i, 1});
  }
  return SignedMultigraph(c + d, std::move(edges), Bipartition{d, c});
}

GraphMatrices matrices(const SignedMultigraph& g) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  std::vector<Eigen::Triplet<double>> adj;
  adj.reserve(2 * g.edge_count());
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (const Edge& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    adj.emplace_back(u, v, e.sign);
    adj.emplace_back(v, u, e.sign);
    degree[u] += 1.0;
    degree[v] += 1.0;
  }
  GraphMatrices out;
  out.adjacency.resize(n, n);
  out.adjacency.setFromTriplets(adj.begin(), adj.end());  // duplicates are summed
  out.degree = std::move(degree);
  SparseMatrix diag(n, n);
  diag.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index i = 0; i < n; ++i) diag.insert(i, i) = out.degree[i];
  out.laplacian = diag - out.adjacency;
  return out;
}

SparseMatrix deformed_laplacian(const SignedMultigraph& g, double u) {
  const GraphMatrices m = matrices(g);
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  SparseMatrix diag(n, n);
  diag.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index i = 0; i < n; ++i) diag.insert(i, i) = (1.0 - u * u) + u * u * m.degree[i];
  SparseMatrix out = diag - u * m.adjacency;
  out.prune(0.0);
  return out;
}

Eigen::MatrixXd to_dense(const SparseMatrix& m, std::size_t cap) {
  if (static_cast<std::size_t>(m.rows()) > cap || static_cast<std::size_t>(m.cols()) > cap) {
    throw ResourceError("dense matrix of dimension " + std::to_string(m.rows()) +
                        " exceeds the cap of " + std::to_string(cap));
  }
  return Eigen::MatrixXd(m);
}

DirectedEdgeIndex::DirectedEdgeIndex(const SignedMultigraph& g) {
  tails_.resize(2 * g.edge_count());
  heads_.resize(2 * g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    tails_[2 * e] = ed.u;
    heads_[2 * e] = ed.v;
    tails_[2 * e + 1] = ed.v;
    heads_[2 * e + 1] = ed.u;
  }
}

NonBacktracking non_backtracking_matrix(const SignedMultigraph& g) {
  if (g.edge_count() == 0) throw InvalidArgument("non-backtracking matrix needs at least one edge");
  DirectedEdgeIndex arcs(g);
  const auto dim = static_cast<Eigen::Index>(arcs.arc_count());
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t a = 0; a < arcs.arc_count(); ++a) {
    const std::size_t j = arcs.head(a);
    const double sign = g.edge(DirectedEdgeIndex::edge_of(a)).sign;
    for (const Incidence& inc : g.incident(j)) {
      if (inc.edge == DirectedEdgeIndex::edge_of(a)) continue;
      // Leaving j along edge inc.edge: forward arc if j is that edge's u.
      const bool forward = g.edge(inc.edge).u == j;
      entries.emplace_back(static_cast<Eigen::Index>(a),
                           static_cast<Eigen::Index>(DirectedEdgeIndex::arc(inc.edge, forward)), sign);
    }
  }
  SparseMatrix b(dim, dim);
  b.setFromTriplets(entries.begin(), entries.end());
  return {std::move(b), std::move(arcs)};
}

SignedMultigraph clique_expansion(const SignedMultigraph& x) {
  if (!x.bipartition()) throw InvalidArgument("clique expansion needs a bipartition");
  const Bipartition parts = *x.bipartition();
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < parts.left; ++a) {
    const auto inc = x.incident(a);
    for (std::size_t p = 0; p < inc.size(); ++p) {
      for (std::size_t q = p + 1; q < inc.size(); ++q) {
        const std::size_t i = inc[p].neighbor - parts.left;
        const std::size_t j = inc[q].neighbor - parts.left;
        if (i == j) {
          throw InvalidArgument("constraint " + std::to_string(a) +
                                " meets a variable twice; its clique would need a self-loop");
        }
        const int sign = x.edge(inc[p].edge).sign * x.edge(inc[q].edge).sign;
        edges.push_back({i, j, static_cast<std::int8_t>(sign)});
      }
    }
  }
  return SignedMultigraph(parts.right, std::move(edges));
}

SignedMultigraph primal_graph(const SignedMultigraph& x) {
  if (!x.biregular_degrees()) {
    throw InvalidArgument("primal_graph requires a biregular bipartite graph");
  }
  return clique_expansion(x);
}

double xor_fraction(const SignedMultigraph& instance, const Assignment& a) {
  if (a.values.size() != instance.vertex_count()) {
    throw InvalidArgument("assignment length does not match the variable count");
  }
  if (instance.edge_count() == 0) return 0.0;
  std::size_t satisfied = 0;
  for (const Edge& e : instance.edges()) {
    if (a.values[e.u] * a.values[e.v] == -e.sign) ++satisfied;
  }
  return static_cast<double>(satisfied) / static_cast<double>(instance.edge_count());
}

AssignmentScore evaluate_assignment(const SignedMultigraph& x, const Assignment& a) {
  const auto cd = x.biregular_degrees();
  if (!cd) throw InvalidArgument("evaluate_assignment requires a biregular bipartite graph");
  if (cd->first != 3) throw InvalidArgument("the NAE view needs constraints of size 3");
  const Bipartition parts = *x.bipartition();
  if (a.values.size() != parts.right) {
    throw InvalidArgument("assignment length does not match the variable count");
  }
  for (std::int8_t v : a.values) {
    if (v != 1 && v != -1) throw InvalidArgument("assignment values must be +-1");
  }
  std::size_t nae = 0;
  for (std::size_t c = 0; c < parts.left; ++c) {
    int sum = 0;
    for (const Incidence& inc : x.incident(c)) {
      sum += x.edge(inc.edge).sign * a.values[inc.neighbor - parts.left];
    }
    if (sum != 3 && sum != -3) ++nae;
  }
  AssignmentScore score;
  score.nae_fraction = parts.left ? static_cast<double>(nae) / static_cast<double>(parts.left) : 0.0;
  score.xor_fraction = xor_fraction(primal_graph(x), a);
  return score;
}

}  // namespace naesdp
