// Command-line front end. Every subcommand prints a JSON report (with its
// manifest) to stdout and, given --out, also writes report.json,
// manifest.json and, where trials exist, trials.jsonl plus an aggregate CSV.
// Exit status: 0 when the checked property holds, 2 when it fails, 1 on error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "naesdp/error.hpp"
#include "naesdp/experiments.hpp"
#include "naesdp/instance_io.hpp"
#include "naesdp/lift_model.hpp"
#include "naesdp/parallel.hpp"
#include "naesdp/refute.hpp"
#include "naesdp/spectral.hpp"
#include "naesdp/witness.hpp"

namespace {

using nlohmann::json;
using namespace naesdp;

constexpr const char* kToolVersion = "1.0.0";
constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitPropertyFailure = 2;

struct Options {
  ExperimentConfig cfg;
  double rho = 0.0;
  bool rho_set = false;
  std::string instance_path;
  std::string d_list = "8,9,10,11,12,13,14,15,16";
  int gmax = 5;
  int ell = 2;
  int m_power = 2;
  std::size_t iterations = 50;
  double tol = 1e-6;
  bool unsigned_control = false;
};

std::size_t threads_from_env() {
  if (const char* env = std::getenv("NAESDP_THREADS")) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed NAESDP_THREADS=" << env << '\n';
    }
  }
  return 1;
}

json manifest(const std::string& command, const Options& opt, const std::vector<std::string>& argv) {
  json m;
  m["tool"] = "naesdp";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = opt.cfg.to_json();
  m["seed"] = opt.cfg.seed;
  m["instance"] = opt.instance_path;
  m["compiler"] = __VERSION__;
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  m["instance_format_version"] = kInstanceFormatVersion;
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

struct Output {
  json report;
  std::vector<json> trials;
  std::string csv;
  std::string csv_name = "aggregate.csv";
  std::optional<LiftSpec> instance;
  bool pass = true;
};

void emit(const Output& o, const json& man, const std::string& out_dir) {
  json full = o.report;
  full["property_holds"] = o.pass;
  full["manifest"] = man;
  std::cout << full.dump(2) << '\n';
  if (out_dir.empty()) return;
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "manifest.json", man.dump(2) + "\n");
  write_file(dir / "report.json", full.dump(2) + "\n");
  if (!o.trials.empty()) {
    std::ostringstream lines;
    for (const json& t : o.trials) lines << t.dump() << '\n';
    write_file(dir / "trials.jsonl", lines.str());
  }
  if (!o.csv.empty()) write_file(dir / o.csv_name, o.csv);
  if (o.instance) save_instance(dir / "instance.json", *o.instance);
}

LiftSpec obtain_instance(const Options& opt) {
  if (!opt.instance_path.empty()) return load_instance(opt.instance_path);
  return random_signed_lift(complete_bipartite(opt.cfg.c, opt.cfg.d), opt.cfg.n, opt.cfg.seed).spec;
}

Output cmd_generate(const Options& opt) {
  Output o;
  const LiftSpec spec = obtain_instance(opt);
  o.report["instance"] = json::parse(instance_to_json(spec));
  o.instance = spec;
  return o;
}

Output cmd_spectra(const Options& opt) {
  Output o;
  const LiftSpec spec = obtain_instance(opt);
  const SignedMultigraph x = spec.materialize();
  const auto [c, d] = *x.biregular_degrees();
  const std::vector<double> ps = positive_spectrum(x);
  const BulkCheck bulk = bulk_check(ps, c, d, opt.cfg.epsilon);
  const SpectrumReport b = b_spectrum_via_ihara_bass(x);
  o.report["ps"] = ps;
  o.report["bulk"] = {{"inside", bulk.inside}, {"worst_value", bulk.worst_value}, {"excess", bulk.excess},
                      {"epsilon", opt.cfg.epsilon}};
  o.report["b_spectral_radius"] = b.spectral_radius;
  o.report["b_dimension"] = b.dimension;
  o.report["method"] = to_string(b.method);
  o.pass = bulk.inside;
  return o;
}

Output cmd_refute(const Options& opt) {
  Output o;
  const LiftSpec spec = obtain_instance(opt);
  const SignedMultigraph primal = primal_graph(spec.materialize());
  const RefutationReport r = dual_correction_search(primal, opt.iterations);
  o.report["lambda_max"] = r.lambda_max;
  o.report["eig_xor"] = r.eig_xor;
  if (r.eig_nae) o.report["eig_nae"] = *r.eig_nae;
  if (r.threshold_f) o.report["threshold_f"] = *r.threshold_f;
  if (r.refutes_nae) o.report["refutes_nae"] = *r.refutes_nae;
  o.report["correction_value"] = *r.correction_value;
  o.report["correction_checksum"] = r.correction_checksum;
  o.report["iterations"] = r.iterations;
  o.pass = *r.correction_value <= r.eig_xor + 1e-12;
  return o;
}

Output cmd_witness(const Options& opt) {
  Output o;
  const LiftSpec spec = obtain_instance(opt);
  const SignedMultigraph x = spec.materialize();
  const SignedMultigraph primal = primal_graph(x);
  const auto [c, d] = *x.biregular_degrees();
  ExperimentConfig cfg = opt.cfg;
  cfg.c = c;
  cfg.d = d;
  const double rho = sweep_rho(cfg, d);
  const GramWitness w = build_witness(primal, x, rho, opt.tol, cfg.triangle_safe,
                                      WitnessOptions{.dense_cap = kDefaultGramDenseCap, .threads = cfg.threads});
  ValidationOptions vo;
  vo.threads = cfg.threads;
  vo.seed = cfg.seed;
  const WitnessReport r = validate_witness(w, x, vo);
  o.report["rho"] = w.params().rho;
  o.report["r"] = w.params().r;
  o.report["L"] = w.params().L;
  o.report["gamma"] = w.params().gamma;
  o.report["xor_value"] = r.xor_value;
  if (r.nae_value) o.report["nae_value"] = *r.nae_value;
  o.report["min_gram_eigenvalue"] = r.min_gram_eigenvalue;
  o.report["worst_triangle_slack"] = r.worst_triangle_slack;
  o.report["max_offdiag_abs"] = r.max_offdiag_abs;
  o.report["max_diagonal_defect"] = r.max_diagonal_defect;
  o.report["good_fraction"] = r.good_fraction;
  o.report["triples_checked"] = r.triples_checked;
  o.report["eigen_blocks"] = r.eigen_blocks;
  o.pass = r.max_diagonal_defect == 0.0 && r.min_gram_eigenvalue >= -1e-7 &&
           (!cfg.triangle_safe || r.worst_triangle_slack >= -1e-9);
  return o;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse degree '" + item + "'");
    }
  }
  return out;
}

Output cmd_sweep(const Options& opt) {
  Output o;
  const SweepResult s = run_threshold_sweep(opt.cfg, parse_list(opt.d_list));
  o.csv = s.curve.to_csv();
  o.csv_name = "threshold_curve.csv";
  json points = json::array();
  for (const SweepPoint& p : s.points) {
    points.push_back({{"d", p.d}, {"median_eig_nae", p.median_eig_nae},
                      {"median_witness_nae", p.median_witness_nae}, {"agreement", p.agreement},
                      {"regime", p.regime.label}});
    for (const TrialRecord& r : p.records) o.trials.push_back(r.to_json());
  }
  o.report["points"] = points;
  o.report["curve_csv"] = o.csv;
  o.pass = s.property_holds;
  return o;
}

Output cmd_cycles(const Options& opt) {
  Output o;
  const CyclePoissonSummary s = run_cycle_poisson(opt.cfg, opt.gmax);
  std::ostringstream csv;
  csv.precision(12);
  csv << "k,mean,variance,stderr,predicted,flagged\n";
  json rows = json::array();
  for (const CycleLengthSummary& k : s.lengths) {
    rows.push_back({{"k", k.k}, {"mean", k.mean}, {"variance", k.variance}, {"stderr", k.stderr_mean},
                    {"predicted", k.predicted}, {"flagged", k.flagged}});
    csv << k.k << ',' << k.mean << ',' << k.variance << ',' << k.stderr_mean << ',' << k.predicted << ','
        << (k.flagged ? 1 : 0) << '\n';
    o.pass = o.pass && !k.flagged;
  }
  for (std::size_t i = 0; i < s.counts.size(); ++i) {
    o.trials.push_back({{"index", i}, {"seed", trial_seed(opt.cfg.seed, i)}, {"counts", s.counts[i]}});
  }
  o.report["lengths"] = rows;
  o.csv = csv.str();
  return o;
}

Output cmd_bordenave(const Options& opt) {
  Output o;
  const BordenaveSummary s = run_bordenave_trial(opt.cfg, !opt.unsigned_control);
  for (const TrialRecord& r : s.records) o.trials.push_back(r.to_json());
  o.report["signed"] = !opt.unsigned_control;
  o.report["counted"] = s.counted;
  o.report["pass_fraction"] = s.pass_fraction;
  o.report["radius_pass_fraction"] = s.radius_pass_fraction;
  std::ostringstream csv;
  csv.precision(12);
  csv << "trial,seed,ps_min,ps_max,b_radius,bulk_pass\n";
  for (const TrialRecord& r : s.records) {
    csv << r.index << ',' << r.seed << ',' << *r.ps_min << ',' << *r.ps_max << ',' << *r.b_radius << ','
        << (*r.bulk_pass ? 1 : 0) << '\n';
  }
  o.csv = csv.str();
  o.pass = opt.unsigned_control ? s.pass_fraction == 0.0 : s.pass_fraction >= 0.95;
  return o;
}

Output cmd_trace(const Options& opt) {
  Output o;
  const TraceSummary s = run_trace_bound_check(opt.cfg, opt.ell, opt.m_power);
  o.report = {{"samples", s.samples},
              {"tangled", s.tangled},
              {"mean_trace", s.mean_trace},
              {"raw_statistic", s.raw_statistic},
              {"normalized_statistic", s.normalized_statistic},
              {"bound", s.bound},
              {"within_bound", s.within_bound},
              {"radius_dominated", s.radius_dominated},
              {"radius_regime", s.radius_regime},
              {"ell", opt.ell},
              {"m", opt.m_power}};
  o.pass = s.within_bound;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random NAE-3SAT lifts: spectra, SDP witnesses and refutation certificates"};
  app.require_subcommand(1);
  Options opt;
  opt.cfg.threads = threads_from_env();
  opt.cfg.seed = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--c", opt.cfg.c, "constraint size (degree of constraint vertices)");
    sub->add_option("--d", opt.cfg.d, "variable degree");
    sub->add_option("--n", opt.cfg.n, "lift order");
    sub->add_option("--trials", opt.cfg.trials, "number of seeded trials");
    sub->add_option("--seed", opt.cfg.seed, "master seed");
    sub->add_option("--eps", opt.cfg.epsilon, "epsilon for bulk and bound checks");
    sub->add_option("--rho", opt.rho, "explicit edge correlation for the witness")->each([&](const std::string&) {
      opt.rho_set = true;
    });
    sub->add_flag("--triangle-safe,!--no-triangle-safe", opt.cfg.triangle_safe,
                  "clamp rho to [-1/3, 1/3] so triangle inequalities hold");
    sub->add_option("--threads", opt.cfg.threads, "worker threads (0 = all cores; default from NAESDP_THREADS)");
    sub->add_option("--out", opt.cfg.out_dir, "output directory for reports and manifest");
  };

  struct Command {
    const char* name;
    const char* help;
    Output (*run)(const Options&);
  };
  const std::vector<Command> commands = {
      {"generate", "generate a randomly signed lift of K_{d,c}", cmd_generate},
      {"spectra", "PS(A), bulk check and non-backtracking radius of an instance", cmd_spectra},
      {"refute", "eigenvalue certificate with dual correction", cmd_refute},
      {"witness", "build and validate the wave SDP witness", cmd_witness},
      {"sweep", "threshold sweep over variable degrees (c = 3)", cmd_sweep},
      {"cycles", "short-cycle counts against Poisson predictions", cmd_cycles},
      {"bordenave", "bulk containment of PS(A) over signed lifts", cmd_bordenave},
      {"trace-check", "trace-moment growth of the non-backtracking matrix", cmd_trace},
  };
  std::vector<CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.push_back(sub);
  }
  for (CLI::App* sub : {subs[1], subs[2], subs[3]}) {
    sub->add_option("--instance", opt.instance_path, "instance JSON (otherwise generated from --c --d --n --seed)");
  }
  subs[2]->add_option("--iterations", opt.iterations, "dual correction iterations");
  subs[3]->add_option("--tol", opt.tol, "truncation tolerance");
  subs[4]->add_option("--d-list", opt.d_list, "comma-separated integer degrees");
  subs[5]->add_option("--gmax", opt.gmax, "longest cycle length counted (<= 8)");
  subs[6]->add_flag("--unsigned", opt.unsigned_control, "run the unsigned control");
  subs[7]->add_option("--ell", opt.ell, "power l of B");
  subs[7]->add_option("--m", opt.m_power, "moment power m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    if (opt.rho_set) opt.cfg.rho = opt.rho;
    opt.cfg.validate();
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const Output out = commands[i].run(opt);
      emit(out, manifest(commands[i].name, opt, args), opt.cfg.out_dir);
      return out.pass ? kExitPass : kExitPropertyFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
