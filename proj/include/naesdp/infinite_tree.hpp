#pragma once

// The infinite (c,d)-biregular tree T_{d,c}, its distance-regular primal
// graph G_{d,c}, and the Gaussian wave on G_{d,c}. All distances here are
// primal (G) distances; one primal step is two steps in the tree.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "naesdp/graph_core.hpp"

namespace naesdp {

/// Constants of T_{d,c}: constraints have degree c, variables degree d.
class TreeParams {
 public:
  TreeParams(std::size_t c, std::size_t d);

  std::size_t c() const noexcept { return c_; }
  std::size_t d() const noexcept { return d_; }
  double s_c() const;
  double s_d() const;
  double rho1() const;
  double lambda_upper() const;
  double lambda_lower() const;
  double kappa() const;
  std::uint64_t kappa_exact() const noexcept { return (c_ - 1) * d_; }
  std::uint64_t rho1_sq_exact() const noexcept { return (c_ - 1) * (d_ - 1); }

  /// Open interval of achievable edge correlations: (rho_star, rho_upper).
  double rho_star() const;
  double rho_upper() const;

 private:
  std::size_t c_;
  std::size_t d_;
};

/// p^h_{j,k} of G_{d,c}: for u, v at distance h, the number of w with
/// dist(w,u) = j and dist(w,v) = k. Throws ResourceError on 64-bit overflow.
std::uint64_t intersection_number(int h, int j, int k, const TreeParams& p);

/// Same count in floating point, for large radii.
double intersection_number_real(int h, int j, int k, const TreeParams& p);

struct TreeBall {
  SignedMultigraph bipartite;     // tree ball of radius 2R, constraints first
  SignedMultigraph primal;        // its clique expansion: the radius-R ball of G_{d,c}
  std::vector<int> distance;      // primal distance of each primal vertex from center
  std::size_t center = 0;         // primal index of the center (a variable)
};

inline constexpr std::size_t kDefaultBallVertexCap = 1'000'000;

/// Exact radius-R ball of G_{d,c} around a variable, built by expanding the
/// tree to depth 2R and replacing each constraint by a clique. All signs +1.
TreeBall ball_oracle(const TreeParams& p, int radius, std::size_t vertex_cap = kDefaultBallVertexCap);

/// 1 - (1 - r)^2 / (1 + s_c^2 r^2): edge correlation of the wave with decay r.
double forward_correlation(double r, const TreeParams& p);

/// Inverse of forward_correlation on (-1/rho_1, 1/rho_1). Requires d >= c
/// (where the forward map is increasing) and rho in the open interval.
double rho_to_r(double rho, const TreeParams& p);

/// Closed-form correlation at primal distance h.
double wave_correlation(int h, double r, const TreeParams& p);

/// gamma^2 normalizing the untruncated wave to unit variance.
double analytic_gamma_sq(double r, const TreeParams& p);

/// gamma_analytic^2 * sum_{j,k <= L} p^h_{j,k} r^(j+k).
double series_correlation(int h, double r, const TreeParams& p, int L);

struct WaveParams {
  double rho = 0.0;
  double r = 0.0;
  double gamma = 1.0;  // normalized against the truncated variance
  int L = 0;
  double tol = 0.0;
};

/// r from rho; L the least integer with (rho_1 |r|)^L kappa / (1 - (rho_1 r)^2) <= tol;
/// gamma so that sum_{l <= L} p^0_{l,l} (gamma r^l)^2 = 1.
WaveParams wave_params(double rho, const TreeParams& p, double tol);

/// Truncated variance sum_{l <= L} p^0_{l,l} r^(2l) (without gamma).
double truncated_variance(double r, const TreeParams& p, int L);

}  // namespace naesdp
