#include "naesdp/refute.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "naesdp/checksum.hpp"
#include "naesdp/error.hpp"
#include "naesdp/lanczos.hpp"

namespace naesdp {

double f_threshold(double d) {
  if (!(d >= 3.0)) throw InvalidArgument("f_threshold needs d >= 3");
  const double gap = std::sqrt(d - 1.0) - std::sqrt(2.0);
  return 9.0 / 8.0 - 3.0 / 8.0 * gap * gap / d;
}

double f_threshold_spectral(double d) {
  if (!(d >= 3.0)) throw InvalidArgument("f_threshold needs d >= 3");
  const double rho1 = std::sqrt(2.0 * (d - 1.0));
  const double kappa = 2.0 * d;
  return 0.75 * (1.0 + rho1) * (1.0 + rho1) / kappa;
}

namespace {

struct TopPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

TopPair top_eigenpair(const SparseMatrix& m, std::size_t dense_limit) {
  if (static_cast<std::size_t>(m.rows()) <= dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(m)};
    const Eigen::Index top = m.rows() - 1;
    return {solver.eigenvalues()[top], solver.eigenvectors().col(top)};
  }
  const LanczosResult lr = lanczos_extreme(m, 1, true);
  return {lr.values.front(), lr.vectors.col(0)};
}

SparseMatrix signed_laplacian(const SignedMultigraph& instance) {
  if (instance.vertex_count() == 0 || instance.edge_count() == 0) {
    throw InvalidArgument("refutation needs a nonempty instance");
  }
  return matrices(instance).laplacian;
}

RefutationReport report_from(const SignedMultigraph& instance, double lambda, Normalization normalization,
                             std::size_t clause_size) {
  if (normalization == Normalization::nae && clause_size != 3) {
    throw InvalidArgument("the NAE normalization needs clauses of size 3");
  }
  RefutationReport r;
  r.lambda_max = lambda;
  const double n = static_cast<double>(instance.vertex_count());
  const double m = static_cast<double>(instance.edge_count());
  r.eig_xor = n / (4.0 * m) * lambda;
  if (normalization == Normalization::nae) {
    r.eig_nae = 1.5 * r.eig_xor;
    r.refutes_nae = *r.eig_nae < 1.0;
    const std::size_t kappa = instance.degree(0);
    bool regular = true;
    for (std::size_t v = 0; v < instance.vertex_count() && regular; ++v) regular = instance.degree(v) == kappa;
    const double d = static_cast<double>(kappa) / 2.0;
    if (regular && kappa % 2 == 0 && d >= 3.0) r.threshold_f = f_threshold(d);
  }
  return r;
}

}  // namespace

double laplacian_lambda_max(const SignedMultigraph& instance, std::size_t dense_limit) {
  return top_eigenpair(signed_laplacian(instance), dense_limit).value;
}

RefutationReport eig_bound(const SignedMultigraph& instance, Normalization normalization,
                           std::size_t clause_size) {
  return report_from(instance, laplacian_lambda_max(instance), normalization, clause_size);
}

RefutationReport dual_correction_search(const SignedMultigraph& instance, std::size_t iterations,
                                        Normalization normalization, std::size_t clause_size) {
  constexpr std::size_t kDenseLimit = 300;
  const SparseMatrix lap = signed_laplacian(instance);
  const auto n = lap.rows();
  std::size_t kappa = 0;
  for (std::size_t v = 0; v < instance.vertex_count(); ++v) kappa = std::max(kappa, instance.degree(v));

  TopPair current = top_eigenpair(lap, kDenseLimit);
  RefutationReport report = report_from(instance, current.value, normalization, clause_size);
  const double scale = static_cast<double>(instance.vertex_count()) /
                       (4.0 * static_cast<double>(instance.edge_count()));

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd best_w = w;
  double best = current.value;
  SparseMatrix shifted = lap;
  for (std::size_t t = 1; t <= iterations; ++t) {
    Eigen::VectorXd g = current.vector.array().square().matrix();
    g.array() -= g.mean();
    const double gmax = g.cwiseAbs().maxCoeff();
    if (gmax == 0.0) break;
    w -= (static_cast<double>(kappa) / 2.0) / static_cast<double>(t) * g / gmax;
    w.array() -= w.mean();
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) = lap.coeff(i, i) + w[i];
    current = top_eigenpair(shifted, kDenseLimit);
    report.iterations = t;
    if (current.value < best) {
      best = current.value;
      best_w = w;
    }
  }
  report.correction_value = scale * best;
  report.correction_checksum = fnv1a64(best_w.data(), static_cast<std::size_t>(n) * sizeof(double));
  return report;
}

Regime classify_regime(int d) {
  if (d < 3) throw InvalidArgument("classify_regime needs d >= 3");
  Regime r;
  r.sdp_satisfiable = d <= 13;
  r.unsatisfiable_whp = d >= 8;
  r.satisfiability_heuristic = d == 7;
  r.label = r.sdp_satisfiable ? "SDP-satisfiable whp" : "SDP-refutable whp";
  if (r.unsatisfiable_whp) r.label += "; unsatisfiable whp";
  if (r.satisfiability_heuristic) r.label += "; satisfiability uncertain (heuristic)";
  return r;
}

std::string ThresholdCurve::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  out << "d,f,rho_star,xor_bound,regime\n";
  for (const ThresholdRow& row : rows) {
    out << row.d << ',' << row.f << ',' << row.rho_star << ',' << row.xor_bound << ",\"" << row.regime << "\"\n";
  }
  return out.str();
}

ThresholdCurve threshold_curve(const std::vector<double>& degrees) {
  ThresholdCurve curve;
  for (double d : degrees) {
    ThresholdRow row;
    row.d = d;
    row.f = f_threshold(d);
    const double rho1 = std::sqrt(2.0 * (d - 1.0));
    const double kappa = 2.0 * d;
    row.rho_star = 1.0 - (1.0 + rho1) * (1.0 + rho1) / kappa;
    row.xor_bound = (1.0 + rho1) * (1.0 + rho1) / (2.0 * kappa);
    if (d == std::floor(d)) {
      row.regime = classify_regime(static_cast<int>(d)).label;
    } else {
      row.regime = d < 13.5 ? "SDP-satisfiable whp" : "SDP-refutable whp";
      if (d >= 8.0) row.regime += "; unsatisfiable whp";
    }
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

}  // namespace naesdp
