#pragma once

// Refutation side: the threshold f(d), the eigenvalue certificate in 2XOR and
// NAE normalizations, a subgradient search over diagonal dual corrections, and
// regime labels for integer degrees.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "naesdp/graph_core.hpp"

namespace naesdp {

/// 9/8 - (3/8) (sqrt(d-1) - sqrt 2)^2 / d. Rejects d < 3.
double f_threshold(double d);

/// (3/4)(1 + rho_1)^2 / kappa with c = 3; equal to f_threshold.
double f_threshold_spectral(double d);

enum class Normalization { xor2, nae };

struct RefutationReport {
  double lambda_max = 0.0;
  double eig_xor = 0.0;
  std::optional<double> eig_nae;          // 3/2 eig_xor
  std::optional<double> threshold_f;      // f(kappa / 2) for kappa-regular, c = 3 instances
  std::optional<bool> refutes_nae;        // eig_nae < 1
  std::optional<double> correction_value; // dual-corrected 2XOR bound
  std::uint64_t correction_checksum = 0;  // FNV-1a of the best correction vector
  std::size_t iterations = 0;
};

/// lambda_max of the signed Laplacian: dense below `dense_limit` vertices,
/// Lanczos above.
double laplacian_lambda_max(const SignedMultigraph& instance, std::size_t dense_limit = 300);

/// EIG = (n / 4m) lambda_max(L). The NAE view needs clause_size = 3.
RefutationReport eig_bound(const SignedMultigraph& instance, Normalization normalization = Normalization::nae,
                           std::size_t clause_size = 3);

/// Minimizes (n / 4m) lambda_max(L + diag(w)) over sum(w) = 0 by projected
/// subgradient steps of size (kappa / 2) / t. Returns the eig_bound report with
/// correction_value set to the best iterate (w = 0 included).
RefutationReport dual_correction_search(const SignedMultigraph& instance, std::size_t iterations = 50,
                                        Normalization normalization = Normalization::nae,
                                        std::size_t clause_size = 3);

struct Regime {
  bool sdp_satisfiable = false;     // d < 13.5: the basic SDP does not refute
  bool unsatisfiable_whp = false;   // d >= 8
  bool satisfiability_heuristic = false;  // d = 7: only heuristic evidence
  std::string label;
};

/// Regime of random NAE-3SAT instances with variable degree d.
Regime classify_regime(int d);

struct ThresholdRow {
  double d = 0.0;
  double f = 0.0;
  double rho_star = 0.0;
  double xor_bound = 0.0;  // (1 + rho_1)^2 / (2 kappa)
  std::string regime;
};

struct ThresholdCurve {
  std::vector<ThresholdRow> rows;
  /// Columns: d, f, rho_star, xor_bound, regime.
  std::string to_csv() const;
};

ThresholdCurve threshold_curve(const std::vector<double>& degrees);

}  // namespace naesdp
