#include "naesdp/infinite_tree.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "naesdp/error.hpp"

namespace naesdp {

TreeParams::TreeParams(std::size_t c, std::size_t d) : c_(c), d_(d) {
  if (c < 2 || d < 2) throw InvalidArgument("tree parameters need c, d >= 2");
}

double TreeParams::s_c() const { return std::sqrt(static_cast<double>(c_ - 1)); }
double TreeParams::s_d() const { return std::sqrt(static_cast<double>(d_ - 1)); }
double TreeParams::rho1() const { return s_c() * s_d(); }
double TreeParams::lambda_upper() const { return s_d() + s_c(); }
double TreeParams::lambda_lower() const { return std::abs(s_d() - s_c()); }
double TreeParams::kappa() const { return static_cast<double>(kappa_exact()); }

double TreeParams::rho_star() const {
  const double a = 1.0 + rho1();
  return 1.0 - a * a / kappa();
}

double TreeParams::rho_upper() const {
  const double a = 1.0 - rho1();
  return 1.0 - a * a / kappa();
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw ResourceError("intersection number overflows 64 bits");
  return out;
}

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) out = checked_mul(out, base);
  return out;
}

// Shared case analysis. `Num` supplies the ring (exact or floating point).
template <typename Num, typename Pow, typename Mul>
Num intersection_cases(int h, int j, int k, Num kappa, Num rho_sq, Num rho_sq_minus_sc_sq,
                       Num sc_sq_minus_one, Pow pow, Mul mul) {
  if (h < 0 || j < 0 || k < 0) throw InvalidArgument("intersection numbers need h, j, k >= 0");
  if (h == 0) {
    if (j != k) return Num(0);
    return j == 0 ? Num(1) : mul(kappa, pow(rho_sq, j - 1));
  }
  const int ell = std::min(j, k);
  const int t = std::abs(j - k);
  if (t > h) return Num(0);
  if ((h - t) % 2 == 0) {
    const int half = (h - t) / 2;
    if (ell < half) return Num(0);
    if (ell == half) return Num(1);
    if (t == h) return pow(rho_sq, ell);
    return mul(rho_sq_minus_sc_sq, pow(rho_sq, ell - half - 1));
  }
  const int half = (h - t + 1) / 2;
  if (ell < half) return Num(0);
  return mul(sc_sq_minus_one, pow(rho_sq, ell - half));
}

}  // namespace

std::uint64_t intersection_number(int h, int j, int k, const TreeParams& p) {
  const std::uint64_t c1 = p.c() - 1;
  return intersection_cases<std::uint64_t>(
      h, j, k, p.kappa_exact(), p.rho1_sq_exact(), c1 * (p.d() - 2), c1 - 1, checked_pow, checked_mul);
}

double intersection_number_real(int h, int j, int k, const TreeParams& p) {
  const double c1 = static_cast<double>(p.c() - 1);
  const double d = static_cast<double>(p.d());
  return intersection_cases<double>(
      h, j, k, c1 * d, c1 * (d - 1.0), c1 * (d - 2.0), c1 - 1.0,
      [](double b, int e) { return std::pow(b, e); }, [](double a, double b) { return a * b; });
}

TreeBall ball_oracle(const TreeParams& p, int radius, std::size_t vertex_cap) {
  if (radius < 0) throw InvalidArgument("radius must be nonnegative");
  // Size check before allocating anything.
  double total = 1.0;
  double constraints_at_level = static_cast<double>(p.d());
  for (int ell = 1; ell <= radius; ++ell) {
    total += constraints_at_level + intersection_number_real(0, ell, ell, p);
    constraints_at_level *= static_cast<double>(p.rho1_sq_exact());
  }
  if (total > static_cast<double>(vertex_cap)) {
    throw ResourceError("tree ball of radius " + std::to_string(radius) + " has about " +
                        std::to_string(static_cast<long long>(total)) + " vertices, above the cap");
  }

  struct Node {
    bool constraint;
    std::size_t parent;
    int depth;
  };
  std::vector<Node> nodes{{false, 0, 0}};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const Node node = nodes[head];
    if (node.depth == 2 * radius) continue;
    const std::size_t children =
        node.constraint ? p.c() - 1 : (head == 0 ? p.d() : p.d() - 1);
    for (std::size_t i = 0; i < children; ++i) nodes.push_back({!node.constraint, head, node.depth + 1});
  }

  std::vector<std::size_t> index(nodes.size());
  std::size_t constraints = 0;
  for (const Node& nd : nodes) constraints += nd.constraint ? 1 : 0;
  std::size_t next_constraint = 0;
  std::size_t next_variable = constraints;
  TreeBall ball;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].constraint) {
      index[i] = next_constraint++;
    } else {
      index[i] = next_variable++;
      ball.distance.push_back(nodes[i].depth / 2);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(nodes.size() - 1);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const std::size_t a = index[i];
    const std::size_t b = index[nodes[i].parent];
    edges.push_back(nodes[i].constraint ? Edge{a, b, 1} : Edge{b, a, 1});
  }
  const std::size_t variables = nodes.size() - constraints;
  ball.bipartite = SignedMultigraph(nodes.size(), std::move(edges), Bipartition{constraints, variables});
  ball.primal = clique_expansion(ball.bipartite);
  ball.center = 0;
  return ball;
}

double forward_correlation(double r, const TreeParams& p) {
  const double sc2 = static_cast<double>(p.c() - 1);
  return 1.0 - (1.0 - r) * (1.0 - r) / (1.0 + sc2 * r * r);
}

double rho_to_r(double rho, const TreeParams& p) {
  if (p.d() < p.c()) {
    throw InvalidArgument("rho_to_r needs d >= c, where the correlation map is increasing");
  }
  if (!(rho > p.rho_star() && rho < p.rho_upper())) {
    throw InvalidArgument("rho = " + std::to_string(rho) + " lies outside the achievable interval (" +
                          std::to_string(p.rho_star()) + ", " + std::to_string(p.rho_upper()) + ")");
  }
  if (rho == 0.0) return 0.0;
  double lo = -1.0 / p.rho1();
  double hi = 1.0 / p.rho1();
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (forward_correlation(mid, p) < rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double wave_correlation(int h, double r, const TreeParams& p) {
  if (h < 0) throw InvalidArgument("distance must be nonnegative");
  const double sc2 = static_cast<double>(p.c() - 1);
  return std::pow(r, h) * (1.0 + h * (1.0 - r) * (1.0 + sc2 * r) / (1.0 + sc2 * r * r));
}

double analytic_gamma_sq(double r, const TreeParams& p) {
  const double rr = p.rho1() * r;
  const double sc2 = static_cast<double>(p.c() - 1);
  return (1.0 - rr * rr) / (1.0 + sc2 * r * r);
}

double series_correlation(int h, double r, const TreeParams& p, int L) {
  if (L < 0) throw InvalidArgument("truncation radius must be nonnegative");
  double sum = 0.0;
  for (int j = 0; j <= L; ++j) {
    for (int k = 0; k <= L; ++k) {
      const double count = intersection_number_real(h, j, k, p);
      if (count != 0.0) sum += count * std::pow(r, j + k);
    }
  }
  return analytic_gamma_sq(r, p) * sum;
}

double truncated_variance(double r, const TreeParams& p, int L) {
  if (L < 0) throw InvalidArgument("truncation radius must be nonnegative");
  double sum = 1.0;
  double term = p.kappa() * r * r;
  const double ratio = static_cast<double>(p.rho1_sq_exact()) * r * r;
  for (int ell = 1; ell <= L; ++ell) {
    sum += term;
    term *= ratio;
  }
  return sum;
}

WaveParams wave_params(double rho, const TreeParams& p, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("truncation tolerance must be positive");
  WaveParams out;
  out.rho = rho;
  out.tol = tol;
  out.r = rho_to_r(rho, p);
  if (out.r == 0.0) return out;
  const double q = p.rho1() * std::abs(out.r);
  const double prefactor = p.kappa() / (1.0 - q * q);
  double bound = prefactor;
  while (bound > tol) {
    if (++out.L > 1'000'000) throw ResourceError("truncation radius is unreasonably large");
    bound *= q;
  }
  out.gamma = 1.0 / std::sqrt(truncated_variance(out.r, p, out.L));
  return out;
}

}  // namespace naesdp
