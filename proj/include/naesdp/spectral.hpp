#pragma once

// Eigenvalue engines: symmetric spectra (dense or Lanczos), the positive
// spectrum PS(A) of a bipartite graph, the quartic root map p_lambda(u), the
// non-backtracking spectrum through Ihara-Bass, and bulk containment checks.
//
// Biregular graphs follow the graph_core convention: `left` holds the m
// constraints of degree c, `right` the n variables of degree d, and m >= n.

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "naesdp/graph_core.hpp"

namespace naesdp {

using Complex = std::complex<double>;

enum class SpectrumMethod { dense, iterative, ihara_bass };

std::string_view to_string(SpectrumMethod method);

struct SpectrumReport {
  SpectrumMethod method = SpectrumMethod::dense;
  std::vector<double> values;            // symmetric case, ascending
  std::vector<Complex> complex_values;   // non-backtracking case
  std::size_t dimension = 0;
  std::size_t declared_count = 0;        // number of values reported
  double residual = 0.0;                 // worst ||Mv - lambda v|| achieved
  double spectral_radius = 0.0;
};

struct SpectrumMode {
  enum class Kind { full, largest, smallest };
  Kind kind = Kind::full;
  std::size_t k = 0;

  static SpectrumMode full() { return {}; }
  static SpectrumMode largest(std::size_t k) { return {Kind::largest, k}; }
  static SpectrumMode smallest(std::size_t k) { return {Kind::smallest, k}; }
};

/// Full mode uses a dense solver (dimension capped by `dense_cap`) and checks
/// every residual against 1e-8 * ||M||. Extreme modes use Lanczos. Rejects
/// matrices that are not symmetric within 1e-12.
SpectrumReport symmetric_spectrum(const SparseMatrix& m, SpectrumMode mode = SpectrumMode::full(),
                                  std::size_t dense_cap = kDefaultDenseCap);

/// Dense-input overload, full spectrum only.
SpectrumReport symmetric_spectrum(const Eigen::MatrixXd& m);

/// Largest eigenvalue of a sparse symmetric matrix.
double lambda_max(const SparseMatrix& m);

inline constexpr std::size_t kDefaultSvdCap = 5000;

/// Singular values of the m x n biadjacency matrix (summed signs), ascending.
/// These are the n values of PS(A); the m - n forced zeros of the full
/// adjacency spectrum are not included. Throws ResourceError when n exceeds
/// `cap`.
std::vector<double> positive_spectrum(const SignedMultigraph& x, std::size_t cap = kDefaultSvdCap);

struct QuarticRoots {
  double lambda = 0.0;
  std::array<Complex, 4> roots{};  // +-u_plus, +-u_minus
  double max_magnitude() const;
};

/// Roots of u^4 + (s_c^2 + s_d^2 - lambda^2) u^2 + rho_1^2 in closed form.
QuarticRoots quartic_roots(double lambda, std::size_t c, std::size_t d);

/// The 2e eigenvalues of B for a (c,d)-biregular graph from PS(A). Rejects
/// non-biregular input, m < n and the degenerate case c = d = 2.
SpectrumReport b_spectrum_via_ihara_bass(const SignedMultigraph& x, std::size_t cap = kDefaultSvdCap);

inline constexpr std::size_t kDefaultNonsymmetricCap = 3000;

/// All eigenvalues of a dense nonsymmetric matrix (Hessenberg + shifted QR).
std::vector<Complex> dense_nonsymmetric_eigenvalues(const SparseMatrix& m,
                                                    std::size_t cap = kDefaultNonsymmetricCap);

/// Extended-precision variant, for matrices with defective eigenvalues where
/// double precision loses half its digits.
std::vector<Complex> dense_nonsymmetric_eigenvalues_extended(const SparseMatrix& m,
                                                             std::size_t cap = 600);

/// Sign and log-magnitude of a determinant.
struct LogDet {
  double log_abs = 0.0;  // -inf for a singular matrix
  int sign = 1;          // 0 for a singular matrix
};

LogDet log_determinant(const Eigen::MatrixXd& m);

/// Relative residual of det(I - uB) = det(L(u)) (1 - u^2)^(E - V), both sides
/// by independent LU factorizations. Rejects u = +-1 and |u| > 2.
double ihara_bass_residual(const SignedMultigraph& g, double u,
                           std::size_t cap = kDefaultNonsymmetricCap);

struct BulkCheck {
  bool inside = true;
  double worst_value = 0.0;  // element farthest outside (or least inside)
  double excess = 0.0;       // its distance outside the interval; <= 0 when inside
};

/// Whether every value lies in [lambda_lower - eps, lambda_upper + eps].
BulkCheck bulk_check(const std::vector<double>& ps, std::size_t c, std::size_t d, double eps);

struct MultisetMatch {
  bool matched = false;
  double max_distance = 0.0;
};

/// Greedy nearest-neighbour pairing of two complex multisets of equal size.
MultisetMatch match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b,
                              double tolerance);

}  // namespace naesdp
