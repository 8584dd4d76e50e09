#include "naesdp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "naesdp/error.hpp"
#include "naesdp/lanczos.hpp"

namespace naesdp {

std::string_view to_string(SpectrumMethod method) {
  switch (method) {
    case SpectrumMethod::dense: return "dense";
    case SpectrumMethod::iterative: return "iterative";
    case SpectrumMethod::ihara_bass: return "ihara_bass";
  }
  return "unknown";
}

namespace {

double symmetry_defect(const SparseMatrix& m) {
  const SparseMatrix diff = m - SparseMatrix(m.transpose());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SpectrumReport dense_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("symmetric_spectrum needs a square matrix");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("matrix is not symmetric within 1e-12");
  }
  SpectrumReport report;
  report.method = SpectrumMethod::dense;
  report.dimension = static_cast<std::size_t>(a.rows());
  if (a.rows() == 0) return report;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolver failed", 0.0,
                           std::numeric_limits<double>::infinity());
  }
  const Eigen::VectorXd& lam = solver.eigenvalues();
  const Eigen::MatrixXd residuals = a * solver.eigenvectors() - solver.eigenvectors() * lam.asDiagonal();
  report.residual = residuals.colwise().norm().maxCoeff();
  const double norm = std::max(a.cwiseAbs().rowwise().sum().maxCoeff(), 1.0);
  if (report.residual > 1e-8 * norm) {
    throw ConvergenceError("dense eigenpairs miss the residual tolerance", lam.maxCoeff(), report.residual);
  }
  report.values.assign(lam.data(), lam.data() + lam.size());
  report.declared_count = report.values.size();
  report.spectral_radius = std::max(std::abs(report.values.front()), std::abs(report.values.back()));
  return report;
}

Eigen::MatrixXd biadjacency(const SignedMultigraph& x) {
  const Bipartition parts = *x.bipartition();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(parts.left),
                                            static_cast<Eigen::Index>(parts.right));
  for (const Edge& e : x.edges()) {
    const std::size_t con = e.u < parts.left ? e.u : e.v;
    const std::size_t var = (e.u < parts.left ? e.v : e.u) - parts.left;
    a(static_cast<Eigen::Index>(con), static_cast<Eigen::Index>(var)) += e.sign;
  }
  return a;
}

}  // namespace

SpectrumReport symmetric_spectrum(const Eigen::MatrixXd& m) { return dense_symmetric(m); }

SpectrumReport symmetric_spectrum(const SparseMatrix& m, SpectrumMode mode, std::size_t dense_cap) {
  if (m.rows() != m.cols()) throw InvalidArgument("symmetric_spectrum needs a square matrix");
  if (symmetry_defect(m) > 1e-12) throw InvalidArgument("matrix is not symmetric within 1e-12");
  if (mode.kind == SpectrumMode::Kind::full) return dense_symmetric(to_dense(m, dense_cap));

  const bool largest = mode.kind == SpectrumMode::Kind::largest;
  const LanczosResult lr = lanczos_extreme(m, mode.k, largest);
  SpectrumReport report;
  report.method = SpectrumMethod::iterative;
  report.dimension = static_cast<std::size_t>(m.rows());
  report.values = lr.values;
  std::sort(report.values.begin(), report.values.end());
  report.declared_count = report.values.size();
  report.residual = lr.residual;
  for (double v : report.values) report.spectral_radius = std::max(report.spectral_radius, std::abs(v));
  return report;
}

double lambda_max(const SparseMatrix& m) {
  return symmetric_spectrum(m, SpectrumMode::largest(1)).values.back();
}

std::vector<double> positive_spectrum(const SignedMultigraph& x, std::size_t cap) {
  if (!x.bipartition()) throw InvalidArgument("positive_spectrum needs a bipartite graph");
  const Bipartition parts = *x.bipartition();
  if (parts.left < parts.right) {
    throw InvalidArgument("positive_spectrum needs the constraint part to be at least as large");
  }
  if (parts.right > cap) {
    throw ResourceError("positive_spectrum: " + std::to_string(parts.right) +
                        " variables exceed the cap of " + std::to_string(cap));
  }
  if (parts.right == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> svd(biadjacency(x));
  const Eigen::VectorXd& s = svd.singularValues();
  std::vector<double> ps(s.data(), s.data() + s.size());
  std::sort(ps.begin(), ps.end());
  return ps;
}

double QuarticRoots::max_magnitude() const {
  double best = 0.0;
  for (const Complex& r : roots) best = std::max(best, std::abs(r));
  return best;
}

QuarticRoots quartic_roots(double lambda, std::size_t c, std::size_t d) {
  if (c < 2 || d < 2) throw InvalidArgument("quartic_roots needs c, d >= 2");
  const double sc = std::sqrt(static_cast<double>(c - 1));
  const double sd = std::sqrt(static_cast<double>(d - 1));
  const double upper = sd + sc;
  const double lower = std::abs(sd - sc);
  const double l2 = lambda * lambda;
  const Complex alpha((l2 - lower * lower) / 2.0, 0.0);
  const Complex beta((l2 - upper * upper) / 2.0, 0.0);
  const Complex ra = std::sqrt(alpha);
  const Complex rb = std::sqrt(beta);
  // U_{+-} = (sqrt(alpha) +- sqrt(beta))^2 / 2 are the two roots in u^2.
  const Complex u_plus = std::sqrt(0.5 * (ra + rb) * (ra + rb));
  const Complex u_minus = std::sqrt(0.5 * (ra - rb) * (ra - rb));
  QuarticRoots out;
  out.lambda = lambda;
  out.roots = {u_plus, -u_plus, u_minus, -u_minus};
  return out;
}

SpectrumReport b_spectrum_via_ihara_bass(const SignedMultigraph& x, std::size_t cap) {
  const auto cd = x.biregular_degrees();
  if (!cd) throw InvalidArgument("b_spectrum_via_ihara_bass needs a biregular bipartite graph");
  const auto [c, d] = *cd;
  if (c == 2 && d == 2) throw InvalidArgument("the c = d = 2 case (a cycle) is not supported");
  const Bipartition parts = *x.bipartition();
  const std::size_t m = parts.left;
  const std::size_t n = parts.right;
  const std::size_t e = x.edge_count();
  if (m < n) throw InvalidArgument("constraint part must be at least as large as the variable part");
  if (e < m + n) throw InvalidArgument("Ihara-Bass bookkeeping needs at least as many edges as vertices");

  const std::vector<double> ps = positive_spectrum(x, cap);
  SpectrumReport report;
  report.method = SpectrumMethod::ihara_bass;
  report.dimension = 2 * e;
  auto& vals = report.complex_values;
  vals.reserve(2 * e);
  for (std::size_t i = 0; i < e - (m + n); ++i) {
    vals.emplace_back(1.0, 0.0);
    vals.emplace_back(-1.0, 0.0);
  }
  const double sc = std::sqrt(static_cast<double>(c - 1));
  for (std::size_t i = 0; i < m - n; ++i) {
    vals.emplace_back(0.0, sc);
    vals.emplace_back(0.0, -sc);
  }
  for (double lambda : ps) {
    for (const Complex& r : quartic_roots(lambda, c, d).roots) vals.push_back(r);
  }
  report.declared_count = vals.size();
  for (const Complex& v : vals) report.spectral_radius = std::max(report.spectral_radius, std::abs(v));
  return report;
}

std::vector<Complex> dense_nonsymmetric_eigenvalues(const SparseMatrix& m, std::size_t cap) {
  const Eigen::MatrixXd a = to_dense(m, cap);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("nonsymmetric QR iteration did not converge", 0.0,
                           std::numeric_limits<double>::infinity());
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<Complex> dense_nonsymmetric_eigenvalues_extended(const SparseMatrix& m, std::size_t cap) {
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixL a = to_dense(m, cap).cast<long double>();
  Eigen::EigenSolver<MatrixL> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("nonsymmetric QR iteration did not converge", 0.0,
                           std::numeric_limits<double>::infinity());
  }
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const auto z = solver.eigenvalues()[i];
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

LogDet log_determinant(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant needs a square matrix");
  LogDet out;
  if (m.rows() == 0) return out;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::MatrixXd& packed = lu.matrixLU();
  int sign = lu.permutationP().determinant();
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double p = packed(i, i);
    if (p == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    if (p < 0) sign = -sign;
    log_abs += std::log(std::abs(p));
  }
  out.log_abs = log_abs;
  out.sign = sign;
  return out;
}

double ihara_bass_residual(const SignedMultigraph& g, double u, std::size_t cap) {
  if (std::abs(std::abs(u) - 1.0) < 1e-12) throw InvalidArgument("u = +-1 is excluded");
  if (std::abs(u) > 2.0) throw InvalidArgument("|u| must be at most 2");
  const NonBacktracking nb = non_backtracking_matrix(g);
  const Eigen::MatrixXd b = to_dense(nb.matrix, cap);
  const LogDet lhs = log_determinant(Eigen::MatrixXd::Identity(b.rows(), b.cols()) - u * b);

  LogDet rhs = log_determinant(to_dense(deformed_laplacian(g, u), cap));
  const long long excess = static_cast<long long>(g.edge_count()) - static_cast<long long>(g.vertex_count());
  const double factor = 1.0 - u * u;
  if (rhs.sign != 0 && excess != 0) {
    rhs.log_abs += static_cast<double>(excess) * std::log(std::abs(factor));
    if (factor < 0 && (excess % 2 != 0)) rhs.sign = -rhs.sign;
  }

  const double ninf = -std::numeric_limits<double>::infinity();
  const double l = lhs.sign == 0 ? ninf : lhs.log_abs;
  const double r = rhs.sign == 0 ? ninf : rhs.log_abs;
  if (l == ninf && r == ninf) return 0.0;
  const double hi = std::max(l, r);
  const double lo = std::min(l, r);
  // log |lhs - rhs| from the two signed magnitudes.
  double log_diff;
  if (lo == ninf) {
    log_diff = hi;
  } else if (lhs.sign == rhs.sign) {
    const double gap = -std::expm1(lo - hi);
    if (gap <= 0.0) return 0.0;
    log_diff = hi + std::log(gap);
  } else {
    log_diff = hi + std::log1p(std::exp(lo - hi));
  }
  return std::exp(log_diff - std::max(0.0, r));
}

BulkCheck bulk_check(const std::vector<double>& ps, std::size_t c, std::size_t d, double eps) {
  if (c < 2 || d < 2) throw InvalidArgument("bulk_check needs c, d >= 2");
  const double sc = std::sqrt(static_cast<double>(c - 1));
  const double sd = std::sqrt(static_cast<double>(d - 1));
  const double lo = std::abs(sd - sc) - eps;
  const double hi = sd + sc + eps;
  BulkCheck out;
  out.excess = -std::numeric_limits<double>::infinity();
  for (double v : ps) {
    const double excess = std::max(lo - v, v - hi);
    if (excess > out.excess) {
      out.excess = excess;
      out.worst_value = v;
    }
  }
  out.inside = ps.empty() || out.excess <= 0.0;
  if (ps.empty()) out.excess = 0.0;
  return out;
}

MultisetMatch match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b,
                              double tolerance) {
  MultisetMatch out;
  if (a.size() != b.size()) {
    out.max_distance = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<char> used(b.size(), 0);
  for (const Complex& x : a) {
    std::size_t best = b.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(x - b[j]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    used[best] = 1;
    out.max_distance = std::max(out.max_distance, best_dist);
  }
  out.matched = out.max_distance <= tolerance;
  return out;
}

}  // namespace naesdp
