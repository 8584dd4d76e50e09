#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "naesdp/error.hpp"
#include "naesdp/experiments.hpp"
#include "naesdp/infinite_tree.hpp"
#include "naesdp/instance_io.hpp"
#include "naesdp/rng.hpp"

using namespace naesdp;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("naesdp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const std::filesystem::path& stdout_path) {
  const std::string cmd = std::string(NAESDP_CLI_PATH) + " " + args + " > " + stdout_path.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 30;
  cfg.trials = 4;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("instance round trip") {
  const LiftResult lift = random_signed_lift(complete_bipartite(3, 4), 12, 77);
  const LiftSpec back = instance_from_json(instance_to_json(lift.spec));
  CHECK(back.n == lift.spec.n);
  CHECK(back.seed == lift.spec.seed);
  CHECK(back.permutations == lift.spec.permutations);
  CHECK(back.signs == lift.spec.signs);
  CHECK(back.base.edge_count() == 12);

  const auto dir = scratch_dir("io");
  save_instance(dir / "x.json", lift.spec);
  const LiftSpec loaded = load_instance(dir / "x.json");
  CHECK(loaded.signs == lift.spec.signs);
  CHECK_THROWS_AS(load_instance(dir / "missing.json"), FormatError);
}

TEST_CASE("instance format errors") {
  const LiftResult lift = random_signed_lift(complete_bipartite(3, 4), 6, 1);
  const json good = json::parse(instance_to_json(lift.spec));

  json bad = good;
  bad["signs"].erase(bad["signs"].begin());
  CHECK_THROWS_AS(instance_from_json(bad.dump()), FormatError);

  bad = good;
  bad["signs"][0] = -static_cast<int>(bad["signs"][0].get<int>());
  CHECK_THROWS_WITH_AS(instance_from_json(bad.dump()), "instance checksum mismatch", FormatError);

  bad = good;
  bad["version"] = 2;
  bad["extra"] = true;
  CHECK_THROWS_WITH_AS(instance_from_json(bad.dump()), doctest::Contains("version 2"), FormatError);

  bad = good;
  bad["extra"] = true;
  CHECK_THROWS_WITH_AS(instance_from_json(bad.dump()), doctest::Contains("version 1"), FormatError);

  bad = good;
  bad.erase("seed");
  CHECK_THROWS_AS(instance_from_json(bad.dump()), FormatError);

  bad = good;
  bad["n"] = "six";
  CHECK_THROWS_AS(instance_from_json(bad.dump()), FormatError);

  CHECK_THROWS_AS(instance_from_json("{not json"), FormatError);
  CHECK_THROWS_AS(instance_from_json("[1, 2]"), FormatError);

  // Only unsigned complete bipartite bases are serializable.
  LiftSpec odd = random_lift(SignedMultigraph(2, {{0, 1, 1}}, Bipartition{1, 1}), 3, 1).spec;
  CHECK_NOTHROW(instance_to_json(odd));
  odd = random_lift(SignedMultigraph(2, {{0, 1, -1}}, Bipartition{1, 1}), 3, 1).spec;
  CHECK_THROWS_AS(instance_to_json(odd), InvalidArgument);
}

TEST_CASE("configuration validation and seeds") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ExperimentConfig{};
  cfg.n = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = ExperimentConfig{};
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK(trial_seed(5, 0) == derive_seed(5, 0));
  CHECK(trial_seed(5, 0) != trial_seed(5, 1));
  CHECK(ExperimentConfig{}.to_json()["d"] == 4);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), InvalidArgument);
}

TEST_CASE("bordenave trials") {
  ExperimentConfig cfg = small_config();
  cfg.n = 60;
  const BordenaveSummary s = run_bordenave_trial(cfg);
  CHECK(s.records.size() == 4);
  CHECK(s.counted == 4);
  for (const TrialRecord& r : s.records) {
    CHECK(r.ps_max.has_value());
    CHECK(*r.ps_max <= std::sqrt(12.0) + 1e-8);
  }
  // Unsigned lifts keep the trivial singular value sqrt(cd).
  const BordenaveSummary u = run_bordenave_trial(cfg, false);
  CHECK(u.pass_fraction == 0.0);
  for (const TrialRecord& r : u.records) CHECK(*r.ps_max == doctest::Approx(std::sqrt(12.0)));

  cfg.n = 1;
  const BordenaveSummary degenerate = run_bordenave_trial(cfg);
  CHECK(degenerate.counted == 0);
  for (const TrialRecord& r : degenerate.records) CHECK(r.degenerate);
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const BordenaveSummary a = run_bordenave_trial(cfg);
  cfg.threads = 4;
  const BordenaveSummary b = run_bordenave_trial(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    json ja = a.records[i].to_json();
    json jb = b.records[i].to_json();
    ja.erase("seconds");
    jb.erase("seconds");
    CHECK(ja == jb);
  }
}

TEST_CASE("threshold sweep") {
  ExperimentConfig cfg = small_config();
  cfg.n = 40;
  cfg.trials = 2;
  const SweepResult r = run_threshold_sweep(cfg, {4.0, 16.0});
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].d == 4);
  CHECK(r.points[0].records.size() == 2);
  CHECK(r.curve.rows.size() == 2);
  // Sweeps at n < 500 assert nothing.
  CHECK(r.property_holds);
  CHECK_THROWS_AS(run_threshold_sweep(cfg, {13.5}), InvalidArgument);
  CHECK_THROWS_AS(run_threshold_sweep(cfg, {70.0}), InvalidArgument);
  cfg.c = 4;
  CHECK_THROWS_AS(run_threshold_sweep(cfg, {8.0}), InvalidArgument);
  CHECK(sweep_rho(small_config(), 8) == -1.0 / 3.0);
  ExperimentConfig raw = small_config();
  raw.triangle_safe = false;
  CHECK(sweep_rho(raw, 8) == doctest::Approx(TreeParams(3, 8).rho_star() + 1e-3));
  raw.rho = -0.2;
  CHECK(sweep_rho(raw, 8) == -0.2);
}

TEST_CASE("cycle statistics driver") {
  ExperimentConfig cfg = small_config();
  cfg.n = 200;
  cfg.trials = 20;
  const CyclePoissonSummary s = run_cycle_poisson(cfg, 4);
  REQUIRE(s.lengths.size() == 3);
  CHECK(s.lengths[2].k == 4);
  CHECK(s.lengths[2].predicted == doctest::Approx(18.0));
  CHECK(s.lengths[1].mean == 0.0);
  CHECK(s.counts.size() == 20);
  CHECK_THROWS_AS(run_cycle_poisson(cfg, 9), InvalidArgument);
}

TEST_CASE("trace bound driver") {
  ExperimentConfig cfg = small_config();
  cfg.n = 40;
  cfg.trials = 10;
  cfg.epsilon = 0.3;
  const TraceSummary s = run_trace_bound_check(cfg, 2, 2);
  CHECK(s.samples + s.tangled == 10);
  CHECK(s.bound == doctest::Approx(std::pow(6.0, 0.25) + 0.3));
  CHECK(s.normalized_statistic < s.raw_statistic);
  CHECK_THROWS_AS(run_trace_bound_check(cfg, 0, 2), InvalidArgument);
  CHECK_THROWS_AS(run_trace_bound_check(cfg, 2, 0), InvalidArgument);
  cfg.n = 200;
  CHECK_THROWS_AS(run_trace_bound_check(cfg, 2, 2), ResourceError);
}

TEST_CASE("command line front end") {
  const auto dir = scratch_dir("cli");
  CHECK(run_cli("generate --n 10 --seed 3 --out " + (dir / "gen").string(), dir / "gen.txt") == 0);
  CHECK(std::filesystem::exists(dir / "gen" / "manifest.json"));
  REQUIRE(std::filesystem::exists(dir / "gen" / "instance.json"));
  const json manifest = json::parse(slurp(dir / "gen" / "manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["command"] == "generate");
  CHECK(load_instance(dir / "gen" / "instance.json").n == 10);

  CHECK(run_cli("refute --instance " + (dir / "gen" / "instance.json").string() + " --iterations 5", dir / "refute.txt") == 0);
  const json report = json::parse(slurp(dir / "refute.txt"));
  CHECK(report.contains("manifest"));
  CHECK(report.contains("property_holds"));

  CHECK(run_cli("spectra --n 20 --seed 2", dir / "spectra.txt") != 1);
  // The unsigned control holds its property when every trial fails the bulk check.
  CHECK(run_cli("bordenave --n 20 --trials 3 --unsigned", dir / "unsigned.txt") == 0);
  CHECK(json::parse(slurp(dir / "unsigned.txt"))["pass_fraction"] == 0.0);
  // A property failure: at n = 20 the bulk edges cannot hold to within 0.001.
  CHECK(run_cli("bordenave --n 20 --trials 3 --eps 0.001 --seed 1", dir / "tight.txt") == 2);
  // Errors.
  CHECK(run_cli("sweep --d-list 13.5 --n 20 --trials 1", dir / "err1.txt") == 1);
  CHECK(run_cli("generate --n 0", dir / "err2.txt") == 1);
  CHECK(run_cli("no-such-command", dir / "err3.txt") == 1);
  CHECK(run_cli("refute --instance " + (dir / "missing.json").string(), dir / "err4.txt") == 1);

  // Same seed, same report apart from timing.
  CHECK(run_cli("cycles --n 50 --trials 3 --seed 9 --gmax 4 --out " + (dir / "c1").string(), dir / "c1.txt") != 1);
  CHECK(run_cli("cycles --n 50 --trials 3 --seed 9 --gmax 4 --threads 3 --out " + (dir / "c2").string(), dir / "c2.txt") != 1);
  json r1 = json::parse(slurp(dir / "c1" / "report.json"));
  json r2 = json::parse(slurp(dir / "c2" / "report.json"));
  CHECK(r1["manifest"]["seed"] == r2["manifest"]["seed"]);
  r1.erase("manifest");
  r2.erase("manifest");
  CHECK(r1 == r2);
}
