#pragma once

// Extreme eigenpairs of a sparse symmetric matrix by Lanczos with full
// reorthogonalization. The Krylov dimension doubles on each explicit restart;
// converged pairs are locked and later runs stay orthogonal to them, so
// repeated eigenvalues are found with their multiplicity.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "naesdp/graph_core.hpp"

namespace naesdp {

struct LanczosOptions {
  double tolerance = 1e-8;         // residual bound relative to the norm estimate
  std::size_t initial_dimension = 32;
  std::uint64_t seed = 0x5eed;     // start vectors are seeded normals
};

struct LanczosResult {
  std::vector<double> values;      // ordered from the extreme inward
  Eigen::MatrixXd vectors;         // unit columns matching `values`
  double residual = 0.0;           // largest ||Mv - lambda v|| over returned pairs
  double norm_estimate = 0.0;      // max absolute row sum of M
};

/// k largest (or smallest) eigenpairs. Throws ConvergenceError carrying the
/// best available estimate when the Krylov space is exhausted without meeting
/// the tolerance.
LanczosResult lanczos_extreme(const SparseMatrix& m, std::size_t k, bool largest,
                              const LanczosOptions& options = {});

}  // namespace naesdp
