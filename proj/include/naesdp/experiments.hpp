#pragma once

// Seeded experiment drivers. Trial i always uses derive_seed(master, i), and
// results are stored by trial index, so output does not depend on the thread
// count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "naesdp/lift_model.hpp"
#include "naesdp/refute.hpp"

namespace naesdp {

struct ExperimentConfig {
  std::size_t c = 3;
  std::size_t d = 4;
  std::size_t n = 500;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  double epsilon = 0.15;
  std::optional<double> rho;  // unset: automatic choice per driver
  bool triangle_safe = true;
  std::size_t threads = 1;    // 0: hardware concurrency
  std::string out_dir;

  void validate() const;
  nlohmann::json to_json() const;
};

std::uint64_t trial_seed(std::uint64_t master, std::size_t index);

struct TrialRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double d = 0.0;
  std::optional<double> ps_min;
  std::optional<double> ps_max;
  std::optional<double> b_radius;
  std::optional<bool> bulk_pass;
  std::optional<bool> radius_pass;
  std::optional<double> eig_xor;
  std::optional<double> eig_nae;
  std::optional<double> witness_nae;
  std::optional<double> good_fraction;
  std::optional<bool> regime_agrees;
  bool degenerate = false;
  double seconds = 0.0;

  nlohmann::json to_json() const;
};

struct BordenaveSummary {
  std::vector<TrialRecord> records;
  std::size_t counted = 0;         // non-degenerate trials
  double pass_fraction = 0.0;      // bulk_check passes / counted
  double radius_pass_fraction = 0.0;
};

/// Per trial: lift of K_{d,c} (randomly signed unless `signed_lift` is false),
/// PS(A), bulk_check at cfg.epsilon, and the non-backtracking spectral radius
/// from Ihara-Bass against sqrt(rho_1) + epsilon. n = 1 trials are flagged
/// degenerate and not counted.
BordenaveSummary run_bordenave_trial(const ExperimentConfig& cfg, bool signed_lift = true);

struct SweepPoint {
  int d = 0;
  std::vector<TrialRecord> records;
  double median_eig_nae = 0.0;
  double median_witness_nae = 0.0;
  double agreement = 0.0;  // fraction of trials whose eig_nae side of 1 matches the regime
  Regime regime;
};

struct SweepResult {
  ThresholdCurve curve;
  std::vector<SweepPoint> points;
  /// For d in 8..20 at n >= 500: agreement >= 0.9 everywhere.
  bool property_holds = true;
};

/// Rho used by the sweep's prover: cfg.rho if set, otherwise rho_star + 1e-3,
/// raised to -1/3 in triangle-safe mode.
double sweep_rho(const ExperimentConfig& cfg, std::size_t d);

/// c = 3 only; every d must be an integer in [3, 64].
SweepResult run_threshold_sweep(const ExperimentConfig& cfg, const std::vector<double>& d_list);

struct CycleLengthSummary {
  int k = 0;
  double mean = 0.0;
  double variance = 0.0;
  double stderr_mean = 0.0;
  double predicted = 0.0;  // w_k / (2k)
  bool flagged = false;    // |mean - predicted| > 5 stderr
};

struct CyclePoissonSummary {
  std::vector<CycleLengthSummary> lengths;  // k = 2..gmax
  std::vector<std::vector<std::int64_t>> counts;  // per trial
};

CyclePoissonSummary run_cycle_poisson(const ExperimentConfig& cfg, int gmax);

struct TraceSummary {
  std::size_t samples = 0;          // tangle-free samples used
  std::size_t tangled = 0;
  double mean_trace = 0.0;          // E tr((B^l B^l*)^m) over used samples
  double raw_statistic = 0.0;       // mean_trace^(1 / (2 l m))
  double normalized_statistic = 0.0;  // (mean_trace / arcs)^(1 / (2 l m))
  double bound = 0.0;               // sqrt(rho(B_base)) + epsilon
  bool within_bound = false;        // normalized_statistic <= bound
  double radius_dominated = 0.0;    // fraction of samples whose own statistic >= rho(B_sample)
  bool radius_regime = false;       // l <= log_{d-1}(n |V|) / 4
};

/// Monte Carlo trace moments of the non-backtracking matrix of signed lifts.
/// Rejects l = 0 or m = 0 and lifts with more than 3000 arcs.
TraceSummary run_trace_bound_check(const ExperimentConfig& cfg, int ell, int m_power);

double median(std::vector<double> values);

}  // namespace naesdp
