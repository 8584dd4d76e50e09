#include "naesdp/witness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "naesdp/error.hpp"
#include "naesdp/lift_model.hpp"
#include "naesdp/parallel.hpp"
#include "naesdp/rng.hpp"
#include "naesdp/spectral.hpp"

namespace naesdp {

std::pair<std::size_t, std::size_t> source_degrees(const SignedMultigraph& source) {
  if (!source.bipartition()) throw InvalidArgument("witness source must be bipartite");
  const std::size_t left = source.bipartition()->left;
  std::size_t c = 0;
  std::size_t d = 0;
  for (std::size_t v = 0; v < source.vertex_count(); ++v) {
    (v < left ? c : d) = std::max(v < left ? c : d, source.degree(v));
  }
  return {c, d};
}

namespace {

void check_instance_matches(const SignedMultigraph& instance, const SignedMultigraph& source) {
  if (!source.bipartition()) throw InvalidArgument("witness source must be bipartite");
  const Bipartition parts = *source.bipartition();
  if (instance.vertex_count() != parts.right) {
    throw InvalidArgument("instance vertex count differs from the source's variable count");
  }
  std::size_t expected_edges = 0;
  for (std::size_t a = 0; a < parts.left; ++a) {
    const std::size_t k = source.degree(a);
    expected_edges += k * (k - 1) / 2;
  }
  if (instance.edge_count() != expected_edges) {
    throw InvalidArgument("instance is not the clique expansion of the source");
  }
}

}  // namespace

std::vector<char> classify_good_vertices(const SignedMultigraph& instance,
                                         const SignedMultigraph& source, int L) {
  if (L < 0) throw InvalidArgument("truncation radius must be nonnegative");
  check_instance_matches(instance, source);
  const auto [c, d] = source_degrees(source);
  const std::size_t left = source.bipartition()->left;
  std::vector<std::size_t> target(source.vertex_count());
  for (std::size_t v = 0; v < target.size(); ++v) target[v] = v < left ? c : d;
  BallScanner scanner(source);
  std::vector<char> good(instance.vertex_count(), 0);
  for (std::size_t v = 0; v < good.size(); ++v) {
    const auto res = scanner.scan(left + v, 2 * L + 2, 1, target);
    good[v] = res.cycle_rank == 0 && res.degrees_complete;
  }
  return good;
}

int path_sign(const SignedMultigraph& instance, std::size_t u, std::size_t w, int radius) {
  if (u >= instance.vertex_count() || w >= instance.vertex_count()) {
    throw InvalidArgument("path_sign: vertex out of range");
  }
  if (radius < 0) throw InvalidArgument("radius must be nonnegative");
  std::vector<int> dist(instance.vertex_count(), -1);
  std::vector<int> sign(instance.vertex_count(), 0);
  std::vector<std::size_t> queue{u};
  dist[u] = 0;
  sign[u] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t x = queue[head];
    for (const Incidence& inc : instance.incident(x)) {
      const int s = instance.edge(inc.edge).sign;
      const std::size_t y = inc.neighbor;
      if (dist[y] >= 0) {
        if (sign[x] * s != sign[y]) {
          throw InvalidArgument("ball around vertex " + std::to_string(u) +
                                " has a cycle with negative sign product");
        }
      } else if (dist[x] < radius) {
        dist[y] = dist[x] + 1;
        sign[y] = sign[x] * s;
        queue.push_back(y);
      }
    }
  }
  if (dist[w] < 0) throw InvalidArgument("path_sign: vertices are not connected within the ball");
  return sign[w];
}

GramWitness::GramWitness(SignedMultigraph instance, std::vector<std::vector<Coefficient>> coefficients,
                         std::vector<char> good, WaveParams params, std::size_t generator_count,
                         std::size_t dense_cap)
    : instance_(std::move(instance)),
      coefficients_(std::move(coefficients)),
      good_(std::move(good)),
      params_(params),
      generator_count_(generator_count) {
  const std::size_t n = coefficients_.size();
  if (n != instance_.vertex_count()) throw InvalidArgument("one coefficient row per vertex expected");
  if (good_.size() != n) throw InvalidArgument("one good flag per vertex expected");
  for (std::size_t v = 0; v < n; ++v) {
    auto& row = coefficients_[v];
    std::sort(row.begin(), row.end(),
              [](const Coefficient& a, const Coefficient& b) { return a.generator < b.generator; });
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].generator >= generator_count_) throw InvalidArgument("generator index out of range");
      if (i > 0 && row[i].generator == row[i - 1].generator) {
        throw InvalidArgument("duplicate generator in a coefficient row");
      }
      norm_sq += row[i].weight * row[i].weight;
    }
    if (std::abs(norm_sq - 1.0) > 1e-9) {
      throw InvalidArgument("coefficient row " + std::to_string(v) + " has squared norm " +
                            std::to_string(norm_sq));
    }
  }
  if (n <= dense_cap) {
    dense_ = Eigen::MatrixXd(sparse_gram());
  }
}

double GramWitness::coefficient_dot(std::size_t u, std::size_t v) const {
  const auto& a = coefficients_.at(u);
  const auto& b = coefficients_.at(v);
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].generator < b[j].generator) {
      ++i;
    } else if (b[j].generator < a[i].generator) {
      ++j;
    } else {
      sum += a[i++].weight * b[j++].weight;
    }
  }
  return sum;
}

double GramWitness::entry(std::size_t u, std::size_t v) const {
  if (u == v) return 1.0;
  if (has_dense()) return dense_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  return coefficient_dot(u, v);
}

Eigen::MatrixXd GramWitness::block(std::span<const std::size_t> vertices) const {
  const auto k = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      out(i, j) = out(j, i) = entry(vertices[static_cast<std::size_t>(i)], vertices[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

SparseMatrix GramWitness::sparse_gram() const {
  const auto n = static_cast<Eigen::Index>(coefficients_.size());
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t v = 0; v < coefficients_.size(); ++v) {
    for (const Coefficient& c : coefficients_[v]) {
      trips.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c.generator), c.weight);
    }
  }
  SparseMatrix coef(n, static_cast<Eigen::Index>(generator_count_));
  coef.setFromTriplets(trips.begin(), trips.end());
  SparseMatrix gram = (coef * SparseMatrix(coef.transpose())).pruned();
  for (Eigen::Index v = 0; v < n; ++v) gram.coeffRef(v, v) = 1.0;
  return gram;
}

GramWitness build_witness(const SignedMultigraph& instance, const SignedMultigraph& source, double rho,
                          double tol, bool triangle_safe, const WitnessOptions& options) {
  if (triangle_safe) rho = std::clamp(rho, -1.0 / 3.0, 1.0 / 3.0);
  check_instance_matches(instance, source);
  const auto [c, d] = source_degrees(source);
  const TreeParams p(c, d);
  const WaveParams wp = wave_params(rho, p, tol);
  std::vector<char> good = classify_good_vertices(instance, source, wp.L);

  const std::size_t n = instance.vertex_count();
  const std::size_t left = source.bipartition()->left;
  std::vector<double> weight_at(static_cast<std::size_t>(wp.L) + 1);
  for (int ell = 0; ell <= wp.L; ++ell) weight_at[static_cast<std::size_t>(ell)] = wp.gamma * std::pow(wp.r, ell);

  std::vector<std::vector<Coefficient>> coefficients(n);
  parallel_for(n, options.threads, [&](std::size_t v) {
    auto& row = coefficients[v];
    if (!good[v]) {
      row.push_back({n + v, 1.0});
      return;
    }
    // The ball is a tree, so walking away from the parent edge visits each
    // vertex once; signs multiply along the unique path.
    struct Item {
      std::size_t vertex;
      std::size_t parent_edge;
      int depth;
      int sign;
    };
    std::vector<Item> stack{{left + v, std::numeric_limits<std::size_t>::max(), 0, 1}};
    while (!stack.empty()) {
      const Item it = stack.back();
      stack.pop_back();
      if (it.depth % 2 == 0) {
        row.push_back({it.vertex - left, it.sign * weight_at[static_cast<std::size_t>(it.depth / 2)]});
      }
      if (it.depth == 2 * wp.L) continue;
      for (const Incidence& inc : source.incident(it.vertex)) {
        if (inc.edge == it.parent_edge) continue;
        stack.push_back({inc.neighbor, inc.edge, it.depth + 1, it.sign * source.edge(inc.edge).sign});
      }
    }
  });
  return GramWitness(instance, std::move(coefficients), std::move(good), wp, 2 * n, options.dense_cap);
}

double triangle_slack(double x, double y, double z) {
  return 1.0 + std::min({x + y + z, x - y - z, -x + y - z, -x - y + z});
}

WitnessReport witness_objective(const GramWitness& w, std::size_t clause_size) {
  WitnessReport report;
  const auto& edges = w.instance().edges();
  double sum = 0.0;
  for (const Edge& e : edges) sum += 0.5 - 0.5 * e.sign * w.entry(e.u, e.v);
  report.xor_value = edges.empty() ? 0.0 : sum / static_cast<double>(edges.size());
  if (clause_size == 3) report.nae_value = 1.5 * report.xor_value;
  std::size_t good = 0;
  for (char g : w.good()) good += g ? 1 : 0;
  report.good_fraction = w.vertex_count() ? static_cast<double>(good) / static_cast<double>(w.vertex_count()) : 0.0;
  return report;
}

namespace {

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

std::vector<std::size_t> local_subset(const SignedMultigraph& g, std::size_t start, std::size_t k) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<std::size_t> out{start};
  seen[start] = 1;
  for (std::size_t head = 0; head < out.size() && out.size() < k; ++head) {
    for (const Incidence& inc : g.incident(out[head])) {
      if (seen[inc.neighbor]) continue;
      seen[inc.neighbor] = 1;
      out.push_back(inc.neighbor);
      if (out.size() == k) break;
    }
  }
  return out;
}

struct TripleStats {
  double worst_slack = std::numeric_limits<double>::infinity();
  double max_offdiag = 0.0;
};

}  // namespace

WitnessReport validate_witness(const GramWitness& w, const SignedMultigraph& source,
                               const ValidationOptions& options) {
  check_instance_matches(w.instance(), source);
  const auto [c, d] = source_degrees(source);
  WitnessReport report = witness_objective(w, c);
  const std::size_t n = w.vertex_count();
  if (n == 0) return report;

  if (w.has_dense()) {
    report.max_diagonal_defect = (w.dense().diagonal().array() - 1.0).abs().maxCoeff();
  }

  Rng rng(options.seed);
  if (w.has_dense()) {
    report.min_gram_eigenvalue = symmetric_spectrum(w.sparse_gram(), SpectrumMode::smallest(1)).values.front();
  } else {
    const std::size_t size = std::min(options.block_size, n);
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t b = 0; b < options.block_count; ++b) {
      // Alternate uniform samples with graph-local neighbourhoods, where the
      // off-diagonal mass concentrates.
      if (b % 2 == 0) {
        blocks.push_back(random_subset(rng, n, size));
      } else {
        blocks.push_back(local_subset(w.instance(), static_cast<std::size_t>(rng.below(n)), size));
      }
    }
    std::vector<double> mins(blocks.size());
    parallel_for(blocks.size(), options.threads, [&](std::size_t b) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.block(blocks[b]), Eigen::EigenvaluesOnly);
      mins[b] = solver.eigenvalues().minCoeff();
    });
    report.min_gram_eigenvalue = *std::min_element(mins.begin(), mins.end());
    report.eigen_blocks = blocks.size();
  }

  std::vector<std::array<std::size_t, 3>> triples;
  const std::size_t left = source.bipartition()->left;
  for (std::size_t a = 0; a < left; ++a) {
    const auto inc = source.incident(a);
    for (std::size_t i = 0; i < inc.size(); ++i) {
      for (std::size_t j = i + 1; j < inc.size(); ++j) {
        for (std::size_t k = j + 1; k < inc.size(); ++k) {
          triples.push_back({inc[i].neighbor - left, inc[j].neighbor - left, inc[k].neighbor - left});
        }
      }
    }
  }
  if (n >= 3) {
    for (std::size_t t = 0; t < options.random_triples; ++t) {
      std::size_t a = static_cast<std::size_t>(rng.below(n));
      std::size_t b = static_cast<std::size_t>(rng.below(n - 1));
      std::size_t e = static_cast<std::size_t>(rng.below(n - 2));
      if (b >= a) ++b;
      const std::size_t lo = std::min(a, b);
      const std::size_t hi = std::max(a, b);
      if (e >= lo) ++e;
      if (e >= hi) ++e;
      triples.push_back({a, b, e});
    }
  }
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (triples.size() + kChunk - 1) / kChunk;
  std::vector<TripleStats> partial(chunks);
  parallel_for(chunks, options.threads, [&](std::size_t ch) {
    TripleStats& st = partial[ch];
    const std::size_t end = std::min(triples.size(), (ch + 1) * kChunk);
    for (std::size_t t = ch * kChunk; t < end; ++t) {
      const auto& [u, v, x] = triples[t];
      const double g_uv = w.entry(u, v);
      const double g_vx = w.entry(v, x);
      const double g_xu = w.entry(x, u);
      st.worst_slack = std::min(st.worst_slack, triangle_slack(g_uv, g_vx, g_xu));
      st.max_offdiag = std::max({st.max_offdiag, std::abs(g_uv), std::abs(g_vx), std::abs(g_xu)});
    }
  });
  report.worst_triangle_slack = triples.empty() ? 1.0 : std::numeric_limits<double>::infinity();
  for (const TripleStats& st : partial) {
    report.worst_triangle_slack = std::min(report.worst_triangle_slack, st.worst_slack);
    report.max_offdiag_abs = std::max(report.max_offdiag_abs, st.max_offdiag);
  }
  for (const Edge& e : w.instance().edges()) {
    report.max_offdiag_abs = std::max(report.max_offdiag_abs, std::abs(w.entry(e.u, e.v)));
  }
  report.triples_checked = triples.size();
  return report;
}

double theta_bound(const GramWitness& w) {
  if (!w.instance().all_positive()) throw InvalidArgument("theta_bound needs an unsigned instance");
  const double rho = w.params().rho;
  if (!(rho < 0.0)) throw InvalidArgument("theta_bound needs a negative edge correlation");
  for (const Edge& e : w.instance().edges()) {
    const double g = w.entry(e.u, e.v);
    if (std::abs(g - rho) > 1e-9) {
      throw InvalidArgument("edge {" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            "} has Gram entry " + std::to_string(g) + " instead of rho");
    }
  }
  return 1.0 - 1.0 / rho;
}

}  // namespace naesdp
