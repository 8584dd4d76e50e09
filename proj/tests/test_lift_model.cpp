#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "naesdp/error.hpp"
#include "naesdp/lift_model.hpp"
#include "test_support.hpp"

using namespace naesdp;
using namespace naesdp::testing;

namespace {

// Number of k-edge subsets forming a single cycle: every touched vertex has
// degree 2 in the subset and the subset is connected.
std::int64_t brute_force_cycles(const SignedMultigraph& g, std::size_t k) {
  const std::size_t m = g.edge_count();
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::int64_t count = 0;
  if (k > m) return 0;
  for (;;) {
    std::map<std::size_t, int> deg;
    for (std::size_t e : pick) {
      ++deg[g.edge(e).u];
      ++deg[g.edge(e).v];
    }
    bool ok = deg.size() == k;
    for (const auto& [v, dv] : deg) ok = ok && dv == 2;
    if (ok) {
      // Connectivity by repeated relaxation over the chosen edges.
      std::map<std::size_t, bool> reach;
      reach[g.edge(pick[0]).u] = true;
      for (std::size_t round = 0; round < k; ++round) {
        for (std::size_t e : pick) {
          if (reach.count(g.edge(e).u) || reach.count(g.edge(e).v)) {
            reach[g.edge(e).u] = true;
            reach[g.edge(e).v] = true;
          }
        }
      }
      if (reach.size() == k) ++count;
    }
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return count;
}

Eigen::VectorXd adjacency_spectrum(const SignedMultigraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(matrices(g).adjacency));
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("lift sizes and inherited structure") {
  const LiftResult lift = random_lift(complete_bipartite(3, 4), 50, 7);
  CHECK(lift.lifted.vertex_count() == 350);
  CHECK(lift.lifted.edge_count() == 600);
  CHECK(lift.lifted.is_biregular(3, 4));
  CHECK(lift.lifted.bipartition()->left == 200);
}

TEST_CASE("n = 1 lift is the base with identity labels") {
  const SignedMultigraph base = complete_bipartite(3, 4);
  const LiftResult lift = random_lift(base, 1, 99);
  REQUIRE(lift.lifted.edge_count() == base.edge_count());
  for (std::size_t e = 0; e < base.edge_count(); ++e) {
    CHECK(lift.lifted.edge(e).u == base.edge(e).u);
    CHECK(lift.lifted.edge(e).v == base.edge(e).v);
  }
  CHECK_THROWS_AS(random_lift(base, 0, 1), InvalidArgument);
}

TEST_CASE("lifts are reproducible from the seed") {
  const SignedMultigraph base = complete_bipartite(3, 5);
  const LiftResult a = random_signed_lift(base, 40, 1234);
  const LiftResult b = random_signed_lift(base, 40, 1234);
  const LiftResult c = random_signed_lift(base, 40, 1235);
  CHECK(a.spec.permutations == b.spec.permutations);
  CHECK(a.spec.signs == b.spec.signs);
  CHECK(a.spec.permutations != c.spec.permutations);
  // The spec rebuilds the same graph.
  const SignedMultigraph rebuilt = a.spec.materialize();
  for (std::size_t e = 0; e < rebuilt.edge_count(); ++e) {
    CHECK(rebuilt.edge(e).u == a.lifted.edge(e).u);
    CHECK(rebuilt.edge(e).v == a.lifted.edge(e).v);
    CHECK(rebuilt.edge(e).sign == a.lifted.edge(e).sign);
  }
}

TEST_CASE("permutations are bijections") {
  const LiftResult lift = random_lift(complete_bipartite(3, 4), 200, 3);
  for (const auto& perm : lift.spec.permutations) {
    std::vector<std::uint32_t> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("lift spec validation") {
  LiftResult lift = random_lift(complete_bipartite(3, 4), 5, 3);
  LiftSpec bad = lift.spec;
  bad.permutations[0][0] = bad.permutations[0][1];
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = lift.spec;
  bad.signs.pop_back();
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = lift.spec;
  bad.signs[0] = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = lift.spec;
  bad.permutations.pop_back();
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("random signing is balanced and reproducible") {
  const LiftResult lift = random_lift(complete_bipartite(3, 4), 10'000, 1);
  const SignedMultigraph s1 = random_signing(lift.lifted, 77);
  const SignedMultigraph s2 = random_signing(lift.lifted, 77);
  REQUIRE(s1.edge_count() == 120'000);
  double sum = 0.0;
  for (std::size_t e = 0; e < s1.edge_count(); ++e) {
    sum += s1.edge(e).sign;
    CHECK(s1.edge(e).sign == s2.edge(e).sign);
  }
  CHECK(std::abs(sum / static_cast<double>(s1.edge_count())) < 0.02);
}

TEST_CASE("primal triangles of a signed instance have sign product +1") {
  const LiftResult lift = random_signed_lift(complete_bipartite(3, 4), 30, 8);
  const SignedMultigraph p = primal_graph(lift.lifted);
  // clique_expansion emits the three edges of each constraint consecutively.
  REQUIRE(p.edge_count() % 3 == 0);
  for (std::size_t e = 0; e < p.edge_count(); e += 3) {
    CHECK(p.edge(e).sign * p.edge(e + 1).sign * p.edge(e + 2).sign == 1);
  }
}

TEST_CASE("projection recovers the base edge multiset") {
  const SignedMultigraph base = complete_bipartite(3, 4);
  const LiftResult lift = random_lift(base, 9, 5);
  const auto proj = project_to_base(lift.spec);
  REQUIRE(proj.size() == 9 * base.edge_count());
  std::vector<std::size_t> hits(base.edge_count(), 0);
  for (std::size_t be : proj) ++hits[be];
  for (std::size_t h : hits) CHECK(h == 9);
}

TEST_CASE("base adjacency spectrum is contained in the lifted spectrum") {
  const SignedMultigraph base = complete_bipartite(3, 4);
  const Eigen::VectorXd small = adjacency_spectrum(base);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd big = adjacency_spectrum(random_lift(base, 6, seed).lifted);
    std::vector<char> used(static_cast<std::size_t>(big.size()), 0);
    for (Eigen::Index i = 0; i < small.size(); ++i) {
      bool found = false;
      for (Eigen::Index j = 0; j < big.size() && !found; ++j) {
        if (!used[static_cast<std::size_t>(j)] && std::abs(big[j] - small[i]) < 1e-8) {
          used[static_cast<std::size_t>(j)] = 1;
          found = true;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("closed non-backtracking walk counts of K_{4,3}") {
  const WalkCounts w = nb_walk_counts(complete_bipartite(3, 4), 8);
  CHECK(w.at(2) == 0);
  CHECK(w.at(3) == 0);
  CHECK(w.at(4) == 144);
  // Independent oracle: traces of powers of the enumerated matrix.
  const Eigen::MatrixXd b = brute_force_nb(complete_bipartite(3, 4));
  Eigen::MatrixXd power = b;
  for (int k = 2; k <= 8; ++k) {
    power = power * b;
    CHECK(static_cast<double>(w.at(k)) == power.trace());
  }
  CHECK_THROWS_AS(nb_walk_counts(complete_bipartite(3, 4), 1), InvalidArgument);
}

TEST_CASE("cycle counts on small graphs") {
  Rng rng(3);
  const CycleStats tree = cycle_counts(random_tree(rng, 30), 8);
  for (auto z : tree.counts) CHECK(z == 0);
  CHECK(cycle_counts(triangle(), 3).count(3) == 1);
  CHECK(cycle_counts(cycle_graph(7), 8).count(7) == 1);
  const SignedMultigraph doubled(2, {{0, 1, 1}, {0, 1, -1}, {0, 1, 1}});
  CHECK(cycle_counts(doubled, 2).count(2) == 3);
  CHECK_THROWS_AS(cycle_counts(triangle(), 9), ResourceError);
  CHECK_THROWS_AS(cycle_counts(triangle(), 1), InvalidArgument);
  CHECK_NOTHROW(cycle_counts(triangle(), 9, CycleOptions{.max_length = 9}));
}

TEST_CASE("cycle counts match subset enumeration") {
  const SignedMultigraph base = complete_bipartite(3, 4);
  const CycleStats s = cycle_counts(base, 6);
  for (int k = 2; k <= 6; ++k) CHECK(s.count(k) == brute_force_cycles(base, static_cast<std::size_t>(k)));
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const SignedMultigraph g = random_multigraph(rng, 6, 9);
    const CycleStats t = cycle_counts(g, 5);
    for (int k = 2; k <= 5; ++k) CHECK(t.count(k) == brute_force_cycles(g, static_cast<std::size_t>(k)));
  }
}

TEST_CASE("cycle counts of lifts are near their Poisson means") {
  const SignedMultigraph base = complete_bipartite(3, 4);
  constexpr int kTrials = 200;
  std::vector<double> sum(4, 0.0);
  std::vector<double> sum_sq(4, 0.0);
  CycleStats last;
  for (int t = 0; t < kTrials; ++t) {
    const LiftResult lift = random_lift(base, 1000, 1000 + static_cast<std::uint64_t>(t));
    last = cycle_counts(lift.lifted, 5, lift.spec);
    for (int k = 2; k <= 5; ++k) {
      const double z = static_cast<double>(last.count(k));
      sum[static_cast<std::size_t>(k - 2)] += z;
      sum_sq[static_cast<std::size_t>(k - 2)] += z * z;
    }
  }
  for (int k = 2; k <= 5; ++k) {
    const auto i = static_cast<std::size_t>(k - 2);
    const double mean = sum[i] / kTrials;
    const double var = (sum_sq[i] - kTrials * mean * mean) / (kTrials - 1);
    const double se = std::sqrt(std::max(var, 0.0) / kTrials);
    if (se == 0.0) {
      CHECK(mean == last.mean(k));
    } else {
      CHECK(std::abs(mean - last.mean(k)) <= 5.0 * se);
    }
  }
  CHECK(last.mean(4) == doctest::Approx(18.0));
}

TEST_CASE("bad vertices") {
  Rng rng(4);
  CHECK(bad_vertices(random_tree(rng, 40), 3).empty());
  // Triangle 0-1-2 with the pendant path 2-3-4-5.
  const SignedMultigraph g(6, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}});
  CHECK(bad_vertices(g, 1) == std::vector<std::size_t>{0, 1, 2});
  CHECK(bad_vertices(g, 2) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(bad_vertices(g, 0).empty());
  CHECK_THROWS_AS(bad_vertices(g, -1), InvalidArgument);
}

TEST_CASE("balls use the induced subgraph") {
  // 4-cycle: the radius-1 ball of vertex 0 is {0,1,3}, with no edge 1-3.
  CHECK(bad_vertices(cycle_graph(4), 1).empty());
  // The radius-2 ball contains all four vertices and the whole cycle.
  CHECK(bad_vertices(cycle_graph(4), 2).size() == 4);
  // 5-cycle at radius 2: both far vertices are at distance 2 and adjacent.
  CHECK(bad_vertices(cycle_graph(5), 2).size() == 5);
}

TEST_CASE("tangle-freeness") {
  Rng rng(12);
  const SignedMultigraph tree = random_tree(rng, 25);
  for (int ell = 0; ell < 6; ++ell) CHECK(is_tangle_free(tree, ell));
  for (int ell = 0; ell < 8; ++ell) CHECK(is_tangle_free(cycle_graph(9), ell));
  const SignedMultigraph bowtie(5, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {2, 3, 1}, {3, 4, 1}, {4, 2, 1}});
  CHECK_FALSE(is_tangle_free(bowtie, 1));
  CHECK(is_tangle_free(bowtie, 0));
}

TEST_CASE("ball scan honours its edge cap") {
  const LiftResult lift = random_lift(complete_bipartite(3, 4), 500, 2);
  BallScanner scanner(lift.lifted, 50);
  CHECK_THROWS_AS(scanner.scan(0, 10, 1000), ResourceError);
}

TEST_CASE("ball scan degree check") {
  const SignedMultigraph p = path_graph(5);
  BallScanner scanner(p);
  const std::vector<std::size_t> two(5, 2);
  CHECK(scanner.scan(2, 1, 1, two).degrees_complete);
  CHECK_FALSE(scanner.scan(2, 3, 1, two).degrees_complete);
  CHECK(scanner.scan(2, 2, 1, two).vertices == 5);
}
