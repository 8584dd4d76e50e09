#include "naesdp/lanczos.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "naesdp/error.hpp"
#include "naesdp/rng.hpp"

namespace naesdp {

namespace {

double max_abs_row_sum(const SparseMatrix& m) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) sums[it.row()] += std::abs(it.value());
  }
  return m.rows() ? sums.maxCoeff() : 0.0;
}

// Removes the components along the first `count` columns of `basis`, twice
// (classical Gram-Schmidt is only stable when repeated).
void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index count) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd coeffs = basis.leftCols(count).transpose() * v;
    v.noalias() -= basis.leftCols(count) * coeffs;
  }
}

Eigen::VectorXd random_unit(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v.normalized();
}

struct RitzPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
};

}  // namespace

LanczosResult lanczos_extreme(const SparseMatrix& m, std::size_t k, bool largest,
                              const LanczosOptions& options) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw InvalidArgument("lanczos needs a square matrix");
  if (k == 0 || k > static_cast<std::size_t>(n)) {
    throw InvalidArgument("requested eigenpair count must be in [1, dimension]");
  }
  const double sign = largest ? 1.0 : -1.0;
  LanczosResult result;
  result.norm_estimate = max_abs_row_sum(m);
  const double scale = std::max(result.norm_estimate, 1e-300);
  const double tol = options.tolerance * scale;

  Rng rng(options.seed);
  Eigen::MatrixXd locked(n, static_cast<Eigen::Index>(k));
  Eigen::Index nlocked = 0;
  Eigen::VectorXd start = random_unit(rng, n);

  while (nlocked < static_cast<Eigen::Index>(k)) {
    const Eigen::Index room = n - nlocked;
    Eigen::Index dim = std::min<Eigen::Index>(
        std::max<Eigen::Index>(static_cast<Eigen::Index>(options.initial_dimension), 2), room);
    RitzPair best;
    bool have_best = false;
    for (;;) {
      Eigen::MatrixXd v(n, dim);
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(dim);
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);
      Eigen::VectorXd q = start;
      orthogonalize(q, locked, nlocked);
      if (q.norm() < 1e-10) {
        q = random_unit(rng, n);
        orthogonalize(q, locked, nlocked);
      }
      q.normalize();
      Eigen::Index steps = 0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        v.col(j) = q;
        steps = j + 1;
        Eigen::VectorXd w = sign * (m * q);
        alpha[j] = q.dot(w);
        // Locked vectors last: the basis projection would otherwise leak them
        // back in, and the leak grows geometrically along the recurrence.
        orthogonalize(w, v, j + 1);
        orthogonalize(w, locked, nlocked);
        if (j + 1 == dim) break;
        double b = w.norm();
        if (b < 1e-12 * scale) {
          // Invariant subspace reached; continue from a fresh direction.
          w = random_unit(rng, n);
          orthogonalize(w, v, j + 1);
          orthogonalize(w, locked, nlocked);
          if (w.norm() < 1e-10) break;
          b = 0.0;
          q = w.normalized();
        } else {
          q = w / b;
        }
        beta[j] = b;
      }

      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
      for (Eigen::Index j = 0; j < steps; ++j) {
        t(j, j) = alpha[j];
        if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta[j];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
      const Eigen::Index top = steps - 1;  // eigenvalues ascend
      RitzPair pair;
      pair.value = tri.eigenvalues()[top];
      pair.vector = (v.leftCols(steps) * tri.eigenvectors().col(top)).normalized();
      pair.residual = (sign * (m * pair.vector) - pair.value * pair.vector).norm();
      if (!have_best || pair.residual < best.residual) {
        best = pair;
        have_best = true;
      }
      if (pair.residual <= tol) {
        best = pair;
        break;
      }
      if (dim >= room) {
        throw ConvergenceError("lanczos exhausted the Krylov space without converging",
                               sign * best.value, best.residual);
      }
      start = pair.vector;
      dim = std::min<Eigen::Index>(2 * dim, room);
    }
    Eigen::VectorXd y = best.vector;
    orthogonalize(y, locked, nlocked);
    locked.col(nlocked++) = y.normalized();
    result.values.push_back(sign * best.value);
    result.residual = std::max(result.residual, best.residual);
    start = random_unit(rng, n);
  }
  result.vectors = std::move(locked);
  return result;
}

}  // namespace naesdp
