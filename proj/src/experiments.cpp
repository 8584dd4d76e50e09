#include "naesdp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "naesdp/error.hpp"
#include "naesdp/infinite_tree.hpp"
#include "naesdp/parallel.hpp"
#include "naesdp/rng.hpp"
#include "naesdp/spectral.hpp"
#include "naesdp/witness.hpp"

namespace naesdp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

double nb_radius_from_ps(const std::vector<double>& ps, const SignedMultigraph& x) {
  const auto [c, d] = *x.biregular_degrees();
  const Bipartition parts = *x.bipartition();
  double radius = 0.0;
  if (x.edge_count() > parts.left + parts.right) radius = 1.0;
  if (parts.left > parts.right) radius = std::max(radius, std::sqrt(static_cast<double>(c - 1)));
  for (double lambda : ps) radius = std::max(radius, quartic_roots(lambda, c, d).max_magnitude());
  return radius;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (c < 2 || d < 2) throw InvalidArgument("c and d must be at least 2");
  if (n == 0) throw InvalidArgument("lift order must be positive");
  if (trials == 0) throw InvalidArgument("trial count must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"c", c}, {"d", d}, {"n", n}, {"trials", trials}, {"seed", seed},
                   {"epsilon", epsilon}, {"triangle_safe", triangle_safe}, {"threads", threads},
                   {"out_dir", out_dir}};
  j["rho"] = rho ? nlohmann::json(*rho) : nlohmann::json("auto");
  return j;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

nlohmann::json TrialRecord::to_json() const {
  nlohmann::json j{{"index", index}, {"seed", seed}, {"d", d}, {"degenerate", degenerate}, {"seconds", seconds}};
  put(j, "ps_min", ps_min);
  put(j, "ps_max", ps_max);
  put(j, "b_radius", b_radius);
  put(j, "bulk_pass", bulk_pass);
  put(j, "radius_pass", radius_pass);
  put(j, "eig_xor", eig_xor);
  put(j, "eig_nae", eig_nae);
  put(j, "witness_nae", witness_nae);
  put(j, "good_fraction", good_fraction);
  put(j, "regime_agrees", regime_agrees);
  return j;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

BordenaveSummary run_bordenave_trial(const ExperimentConfig& cfg, bool signed_lift) {
  cfg.validate();
  const SignedMultigraph base = complete_bipartite(cfg.c, cfg.d);
  if (cfg.d < cfg.c) throw InvalidArgument("bordenave trials need d >= c (constraint side the larger)");
  const double rho1 = std::sqrt(static_cast<double>((cfg.c - 1) * (cfg.d - 1)));
  BordenaveSummary summary;
  summary.records.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    const auto start = Clock::now();
    TrialRecord& rec = summary.records[i];
    rec.index = i;
    rec.seed = trial_seed(cfg.seed, i);
    rec.d = static_cast<double>(cfg.d);
    rec.degenerate = cfg.n == 1;
    const LiftResult lift =
        signed_lift ? random_signed_lift(base, cfg.n, rec.seed) : random_lift(base, cfg.n, rec.seed);
    const std::vector<double> ps = positive_spectrum(lift.lifted);
    rec.ps_min = ps.front();
    rec.ps_max = ps.back();
    rec.bulk_pass = bulk_check(ps, cfg.c, cfg.d, cfg.epsilon).inside;
    rec.b_radius = nb_radius_from_ps(ps, lift.lifted);
    rec.radius_pass = *rec.b_radius <= std::sqrt(rho1) + cfg.epsilon;
    rec.seconds = seconds_since(start);
  });
  std::size_t pass = 0;
  std::size_t radius_pass = 0;
  for (const TrialRecord& rec : summary.records) {
    if (rec.degenerate) continue;
    ++summary.counted;
    pass += *rec.bulk_pass ? 1 : 0;
    radius_pass += *rec.radius_pass ? 1 : 0;
  }
  if (summary.counted) {
    summary.pass_fraction = static_cast<double>(pass) / static_cast<double>(summary.counted);
    summary.radius_pass_fraction = static_cast<double>(radius_pass) / static_cast<double>(summary.counted);
  }
  return summary;
}

double sweep_rho(const ExperimentConfig& cfg, std::size_t d) {
  if (cfg.rho) return *cfg.rho;
  const TreeParams p(cfg.c, d);
  double rho = p.rho_star() + 1e-3;
  if (cfg.triangle_safe) rho = std::max(rho, -1.0 / 3.0);
  return rho;
}

SweepResult run_threshold_sweep(const ExperimentConfig& cfg, const std::vector<double>& d_list) {
  cfg.validate();
  if (cfg.c != 3) throw InvalidArgument("the threshold sweep is defined for c = 3");
  for (double d : d_list) {
    if (d != std::floor(d)) {
      throw InvalidArgument("sweep degrees must be integers (d = " + std::to_string(d) +
                            "); use f_threshold for the continuous curve");
    }
    if (d < 3.0 || d > 64.0) throw InvalidArgument("sweep degrees must lie in [3, 64]");
  }
  SweepResult result;
  result.curve = threshold_curve(d_list);
  for (double dd : d_list) {
    const auto d = static_cast<std::size_t>(dd);
    SweepPoint point;
    point.d = static_cast<int>(d);
    point.regime = classify_regime(point.d);
    point.records.resize(cfg.trials);
    const SignedMultigraph base = complete_bipartite(cfg.c, d);
    const double rho = sweep_rho(cfg, d);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
      const auto start = Clock::now();
      TrialRecord& rec = point.records[i];
      rec.index = i;
      rec.seed = trial_seed(derive_seed(cfg.seed, d), i);
      rec.d = dd;
      const LiftResult lift = random_signed_lift(base, cfg.n, rec.seed);
      const SignedMultigraph primal = primal_graph(lift.lifted);
      const RefutationReport ref = eig_bound(primal, Normalization::nae);
      rec.eig_xor = ref.eig_xor;
      rec.eig_nae = ref.eig_nae;
      rec.regime_agrees = (*ref.eig_nae >= 1.0) == point.regime.sdp_satisfiable;
      const GramWitness w = build_witness(primal, lift.lifted, rho, 1e-6, cfg.triangle_safe,
                                          WitnessOptions{.dense_cap = 0, .threads = 1});
      const WitnessReport wr = witness_objective(w);
      rec.witness_nae = wr.nae_value;
      rec.good_fraction = wr.good_fraction;
      rec.seconds = seconds_since(start);
    });
    std::vector<double> eig;
    std::vector<double> wit;
    std::size_t agree = 0;
    for (const TrialRecord& rec : point.records) {
      eig.push_back(*rec.eig_nae);
      wit.push_back(*rec.witness_nae);
      agree += *rec.regime_agrees ? 1 : 0;
    }
    point.median_eig_nae = median(eig);
    point.median_witness_nae = median(wit);
    point.agreement = static_cast<double>(agree) / static_cast<double>(cfg.trials);
    if (point.d >= 8 && point.d <= 20 && cfg.n >= 500 && point.agreement < 0.9) result.property_holds = false;
    result.points.push_back(std::move(point));
  }
  return result;
}

CyclePoissonSummary run_cycle_poisson(const ExperimentConfig& cfg, int gmax) {
  cfg.validate();
  if (gmax < 2 || gmax > 8) throw InvalidArgument("gmax must lie in [2, 8]");
  const SignedMultigraph base = complete_bipartite(cfg.c, cfg.d);
  const WalkCounts walks = nb_walk_counts(base, gmax);
  CyclePoissonSummary summary;
  summary.counts.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    const LiftResult lift = random_lift(base, cfg.n, trial_seed(cfg.seed, i));
    summary.counts[i] = cycle_counts(lift.lifted, gmax).counts;
  });
  const double t = static_cast<double>(cfg.trials);
  for (int k = 2; k <= gmax; ++k) {
    CycleLengthSummary s;
    s.k = k;
    s.predicted = static_cast<double>(walks.at(k)) / (2.0 * k);
    double sum = 0.0;
    for (const auto& row : summary.counts) sum += static_cast<double>(row[static_cast<std::size_t>(k - 2)]);
    s.mean = sum / t;
    double ss = 0.0;
    for (const auto& row : summary.counts) {
      const double dev = static_cast<double>(row[static_cast<std::size_t>(k - 2)]) - s.mean;
      ss += dev * dev;
    }
    s.variance = cfg.trials > 1 ? ss / (t - 1.0) : 0.0;
    s.stderr_mean = std::sqrt(s.variance / t);
    s.flagged = std::abs(s.mean - s.predicted) > 5.0 * s.stderr_mean &&
                std::abs(s.mean - s.predicted) > 1e-12;
    summary.lengths.push_back(s);
  }
  return summary;
}

namespace {

// tr((P P^T)^m) for sparse P.
double trace_moment(const SparseMatrix& p, int m) {
  const SparseMatrix mm = (p * SparseMatrix(p.transpose())).pruned();
  if (m == 1) {
    double tr = 0.0;
    for (Eigen::Index i = 0; i < mm.rows(); ++i) tr += mm.coeff(i, i);
    return tr;
  }
  // tr(M^m) = <M^a, M^b> with a + b = m; M symmetric.
  SparseMatrix half = mm;
  for (int i = 1; i < m / 2; ++i) half = (half * mm).pruned();
  SparseMatrix other = half;
  if (m % 2) other = (half * mm).pruned();
  return half.cwiseProduct(other).sum();
}

}  // namespace

TraceSummary run_trace_bound_check(const ExperimentConfig& cfg, int ell, int m_power) {
  cfg.validate();
  if (ell < 1) throw InvalidArgument("ell must be at least 1 (ell = 0 only counts arcs)");
  if (m_power < 1) throw InvalidArgument("the moment power must be at least 1");
  const SignedMultigraph base = complete_bipartite(cfg.c, cfg.d);
  const std::size_t arcs = 2 * base.edge_count() * cfg.n;
  if (arcs > 3000) throw ResourceError("trace check is limited to 3000 arcs");
  const double rho1 = std::sqrt(static_cast<double>((cfg.c - 1) * (cfg.d - 1)));
  const double exponent = 1.0 / (2.0 * ell * m_power);

  struct Sample {
    bool tangled = false;
    double trace = 0.0;
    bool radius_dominated = false;
  };
  std::vector<Sample> samples(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    const LiftResult lift = random_signed_lift(base, cfg.n, trial_seed(cfg.seed, i));
    Sample& s = samples[i];
    if (!is_tangle_free(lift.lifted, ell)) {
      s.tangled = true;
      return;
    }
    const SparseMatrix b = non_backtracking_matrix(lift.lifted).matrix;
    SparseMatrix power = b;
    for (int k = 1; k < ell; ++k) power = (power * b).pruned();
    s.trace = trace_moment(power, m_power);
    const double own_radius = nb_radius_from_ps(positive_spectrum(lift.lifted), lift.lifted);
    s.radius_dominated = std::pow(s.trace, exponent) >= own_radius - 1e-9;
  });

  TraceSummary out;
  double sum = 0.0;
  std::size_t dominated = 0;
  for (const Sample& s : samples) {
    if (s.tangled) {
      ++out.tangled;
      continue;
    }
    ++out.samples;
    sum += s.trace;
    dominated += s.radius_dominated ? 1 : 0;
  }
  if (out.samples == 0) {
    throw ResourceError("every sample was tangled at ell = " + std::to_string(ell) + "; try a smaller ell");
  }
  out.mean_trace = sum / static_cast<double>(out.samples);
  out.raw_statistic = std::pow(out.mean_trace, exponent);
  out.normalized_statistic = std::pow(out.mean_trace / static_cast<double>(arcs), exponent);
  out.bound = std::sqrt(rho1) + cfg.epsilon;
  out.within_bound = out.normalized_statistic <= out.bound;
  out.radius_dominated = static_cast<double>(dominated) / static_cast<double>(out.samples);
  const double vertices = static_cast<double>(base.vertex_count() * cfg.n);
  const double maxdeg = static_cast<double>(std::max(cfg.c, cfg.d));
  out.radius_regime = ell <= std::log(vertices) / std::log(maxdeg - 1.0) / 4.0;
  return out;
}

}  // namespace naesdp
