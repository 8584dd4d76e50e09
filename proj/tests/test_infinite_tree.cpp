#include <cmath>
#include <deque>

#include "doctest.h"
#include "naesdp/error.hpp"
#include "naesdp/infinite_tree.hpp"

using namespace naesdp;

namespace {

// BFS distances in a graph.
std::vector<int> bfs(const SignedMultigraph& g, std::size_t src) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<std::size_t> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop_front();
    for (const Incidence& inc : g.incident(v)) {
      if (dist[inc.neighbor] < 0) {
        dist[inc.neighbor] = dist[v] + 1;
        q.push_back(inc.neighbor);
      }
    }
  }
  return dist;
}

const std::vector<std::pair<std::size_t, std::size_t>> kShapes{{3, 3}, {3, 4}, {3, 8}, {4, 5}};

}  // namespace

TEST_CASE("tree constants") {
  const TreeParams p(3, 4);
  CHECK(p.s_c() == doctest::Approx(std::sqrt(2.0)));
  CHECK(p.s_d() == doctest::Approx(std::sqrt(3.0)));
  CHECK(p.rho1() == doctest::Approx(std::sqrt(6.0)));
  CHECK(p.kappa() == 8.0);
  CHECK(p.rho_star() == doctest::Approx(1.0 - std::pow(1.0 + std::sqrt(6.0), 2) / 8.0));
  CHECK(p.rho_star() == doctest::Approx(-0.4874).epsilon(1e-4));
  for (std::size_t c = 2; c < 8; ++c) {
    for (std::size_t d = 2; d < 12; ++d) {
      const TreeParams q(c, d);
      CHECK(q.kappa() == doctest::Approx(q.rho1() * q.rho1() + q.s_c() * q.s_c()));
      const double up = q.lambda_upper();
      const double lo = q.lambda_lower();
      CHECK(up * up + lo * lo == doctest::Approx(2.0 * (q.s_c() * q.s_c() + q.s_d() * q.s_d())));
      CHECK(q.rho_star() < q.rho_upper());
    }
  }
  CHECK_THROWS_AS(TreeParams(1, 4), InvalidArgument);
}

TEST_CASE("intersection numbers at small values") {
  const TreeParams p(3, 4);
  CHECK(intersection_number(0, 0, 0, p) == 1);
  CHECK(intersection_number(0, 1, 1, p) == 8);
  CHECK(intersection_number(1, 1, 1, p) == 1);
  CHECK(intersection_number(0, 1, 2, p) == 0);
  CHECK_THROWS_AS(intersection_number(-1, 0, 0, p), InvalidArgument);
  CHECK_THROWS_AS(intersection_number(0, 40, 40, TreeParams(3, 14)), ResourceError);
  CHECK(intersection_number_real(0, 40, 40, TreeParams(3, 14)) > 1e30);
}

TEST_CASE("intersection numbers match ball enumeration") {
  for (auto [c, d] : kShapes) {
    const TreeParams p(c, d);
    // Geodesics between vertices within 4 of the center stay within 4 of it.
    const TreeBall ball = ball_oracle(p, 4);
    const std::size_t n = ball.primal.vertex_count();
    for (int h = 0; h <= 4; ++h) {
      std::size_t v = n;
      for (std::size_t i = 0; i < n && v == n; ++i) {
        if (ball.distance[i] == h) v = i;
      }
      REQUIRE(v < n);
      const std::vector<int> du = bfs(ball.primal, ball.center);
      const std::vector<int> dv = bfs(ball.primal, v);
      for (int j = 0; j <= 4; ++j) {
        for (int k = 0; k <= 4; ++k) {
          std::uint64_t count = 0;
          for (std::size_t w = 0; w < n; ++w) count += (du[w] == j && dv[w] == k) ? 1 : 0;
          CHECK_MESSAGE(count == intersection_number(h, j, k, p),
                        "c=" << c << " d=" << d << " h=" << h << " j=" << j << " k=" << k);
        }
      }
    }
  }
}

TEST_CASE("exact and floating intersection numbers agree") {
  for (auto [c, d] : kShapes) {
    const TreeParams p(c, d);
    for (int h = 0; h <= 6; ++h)
      for (int j = 0; j <= 6; ++j)
        for (int k = 0; k <= 6; ++k)
          CHECK(static_cast<double>(intersection_number(h, j, k, p)) == intersection_number_real(h, j, k, p));
  }
}

TEST_CASE("ball oracle shape") {
  const TreeParams p(3, 4);
  const TreeBall zero = ball_oracle(p, 0);
  CHECK(zero.primal.vertex_count() == 1);
  CHECK(zero.primal.edge_count() == 0);

  const TreeBall one = ball_oracle(p, 1);
  CHECK(one.primal.vertex_count() == 9);
  CHECK(one.primal.degree(one.center) == 8);
  // Each neighbour of the center shares a constraint with exactly one other neighbour.
  for (std::size_t v = 0; v < 9; ++v) {
    if (v == one.center) continue;
    std::size_t other = 0;
    for (const Incidence& inc : one.primal.incident(v)) other += inc.neighbor != one.center ? 1 : 0;
    CHECK(other == intersection_number(1, 1, 1, p));
  }

  for (auto [c, d] : kShapes) {
    const TreeParams q(c, d);
    const TreeBall b = ball_oracle(q, 4);
    std::vector<std::uint64_t> layer(5, 0);
    for (int dist : b.distance) ++layer[static_cast<std::size_t>(dist)];
    for (int ell = 0; ell <= 4; ++ell) CHECK(layer[static_cast<std::size_t>(ell)] == intersection_number(0, ell, ell, q));
    const std::vector<int> check = bfs(b.primal, b.center);
    CHECK(check == b.distance);
  }
  CHECK_THROWS_AS(ball_oracle(TreeParams(3, 14), 10), ResourceError);
}

TEST_CASE("ball sums of intersection numbers count the ball around the far vertex") {
  const TreeParams p(3, 4);
  const TreeBall ball = ball_oracle(p, 7);
  const int h = 2;
  const int R = 3;
  std::size_t v = 0;
  while (ball.distance[v] != h) ++v;
  const std::vector<int> dv = bfs(ball.primal, v);
  std::uint64_t around_v = 0;
  for (int dist : dv) around_v += (dist >= 0 && dist <= R) ? 1 : 0;
  std::uint64_t sum = 0;
  for (int j = 0; j <= R + h; ++j)
    for (int k = 0; k <= R; ++k) sum += intersection_number(h, j, k, p);
  CHECK(sum == around_v);
}

TEST_CASE("forward correlation and its inverse") {
  const TreeParams p(3, 4);
  CHECK(rho_to_r(0.0, p) == 0.0);
  CHECK(forward_correlation(-1.0 / p.rho1(), p) == doctest::Approx(p.rho_star()));
  CHECK(forward_correlation(1.0 / p.rho1(), p) == doctest::Approx(p.rho_upper()));
  for (int i = 1; i < 100; ++i) {
    const double rho = p.rho_star() + (p.rho_upper() - p.rho_star()) * i / 100.0;
    const double r = rho_to_r(rho, p);
    CHECK(std::abs(forward_correlation(r, p) - rho) <= 1e-12);
    CHECK(std::abs(r) < 1.0 / p.rho1());
  }
  const double r_edge = rho_to_r(p.rho_star() + 1e-3, p);
  CHECK(r_edge < 0.0);
  CHECK(std::abs(r_edge + 1.0 / p.rho1()) < 0.05);

  double prev = -1e300;
  for (int i = 1; i < 200; ++i) {
    const double r = -1.0 / p.rho1() + 2.0 / p.rho1() * i / 200.0;
    const double f = forward_correlation(r, p);
    CHECK(f > prev);
    prev = f;
  }
  CHECK_THROWS_AS(rho_to_r(p.rho_star(), p), InvalidArgument);
  CHECK_THROWS_AS(rho_to_r(0.99, p), InvalidArgument);
  CHECK_THROWS_AS(rho_to_r(0.0, TreeParams(4, 3)), InvalidArgument);
}

TEST_CASE("wave correlation closed form") {
  for (auto [c, d] : kShapes) {
    const TreeParams p(c, d);
    CHECK(wave_correlation(0, 0.0, p) == 1.0);
    for (int h = 1; h < 5; ++h) CHECK(wave_correlation(h, 0.0, p) == 0.0);
    for (int i = -19; i <= 19; ++i) {
      const double r = 0.95 * i / (20.0 * p.rho1());
      CHECK(wave_correlation(0, r, p) == doctest::Approx(1.0));
      CHECK(wave_correlation(1, r, p) == doctest::Approx(forward_correlation(r, p)).scale(1.0));
      if (r == 0.0) continue;
      double prev = 1.0;
      for (int h = 1; h <= 10; ++h) {
        const double w = std::abs(wave_correlation(h, r, p));
        CHECK(w < prev);
        CHECK(w <= 2.0 * (h + 1) * (1.0 + p.s_c() * p.s_c()) * std::pow(std::abs(r), h));
        prev = w;
      }
    }
  }
  CHECK_THROWS_AS(wave_correlation(-1, 0.1, TreeParams(3, 4)), InvalidArgument);
}

TEST_CASE("series correlation agrees with the closed form") {
  for (std::size_t d : {4, 8, 14}) {
    const TreeParams p(3, d);
    for (double frac : {-0.8, -0.4, 0.3, 0.7}) {
      const double r = frac / p.rho1();
      const double q = p.rho1() * std::abs(r);
      for (int h = 0; h <= 4; ++h) {
        const double tail = 10.0 * p.kappa() * 60.0 * std::pow(q, 60) / (1.0 - q);
        CHECK(std::abs(series_correlation(h, r, p, 60) - wave_correlation(h, r, p)) <= tail + 1e-12);
      }
    }
    CHECK(series_correlation(0, 0.0, p, 10) == 1.0);
    CHECK(series_correlation(2, 0.0, p, 10) == 0.0);
  }
}

TEST_CASE("wave parameters") {
  const TreeParams p(3, 4);
  const WaveParams zero = wave_params(0.0, p, 1e-6);
  CHECK(zero.r == 0.0);
  CHECK(zero.L == 0);
  CHECK(zero.gamma == 1.0);

  const WaveParams w = wave_params(-1.0 / 3.0, p, 1e-6);
  const double q = p.rho1() * std::abs(w.r);
  CHECK(std::pow(q, w.L) * p.kappa() / (1.0 - q * q) <= 1e-6);
  CHECK(std::pow(q, w.L - 1) * p.kappa() / (1.0 - q * q) > 1e-6);
  // Regression anchor for this configuration.
  CHECK(w.L == 23);
  CHECK(w.r == doctest::Approx(-0.2).epsilon(1e-12));

  for (double rho : {-0.45, -0.2, 0.1, 0.5}) {
    const WaveParams v = wave_params(rho, p, 1e-8);
    double var = 0.0;
    for (int ell = 0; ell <= v.L; ++ell) {
      var += intersection_number_real(0, ell, ell, p) * std::pow(v.gamma * std::pow(v.r, ell), 2);
    }
    CHECK(std::abs(var - 1.0) <= 1e-14);
    CHECK(v.gamma > 0.0);
  }
  CHECK_THROWS_AS(wave_params(-1.0 / 3.0, p, 0.0), InvalidArgument);
}
