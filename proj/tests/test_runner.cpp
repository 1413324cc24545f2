#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "conewalk/runner.hpp"

using namespace conewalk;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::Config small_tail_config(const std::string& out) {
  config::Config cfg;
  cfg.set("run", "seed", "77");
  cfg.set("run", "out", out);
  cfg.set("run", "workers", "1");
  cfg.set("model", "cone", "halfline");
  cfg.set("model", "steps", "gaussian(1)");
  cfg.set("tail", "x", "(2)");
  cfg.set("tail", "horizons", "32..512 x4");
  cfg.set("tail", "paths", "60000");
  cfg.set("tail", "slope_tol", "0.2");
  cfg.set("tail", "ratio_tol", "0.25");
  cfg.set("tail", "v_horizons", "32,128,512");
  cfg.set("tail", "v_paths", "60000");
  return cfg;
}

}  // namespace

TEST_CASE("runner produces reports and is byte-deterministic across workers") {
  namespace fs = std::filesystem;
  fs::remove_all("runner_out_a");
  fs::remove_all("runner_out_b");

  config::Config a = small_tail_config("runner_out_a");
  std::string log;
  int code = runner::run(a, "tail", {}, &log);
  CHECK(code == runner::kExitPass);
  CHECK(fs::exists("runner_out_a/tail.report.json"));
  CHECK(fs::exists("runner_out_a/tail.rows.csv"));
  CHECK(fs::exists("runner_out_a/tail.plot.csv"));
  CHECK(fs::exists("runner_out_a/manifest.json"));

  config::Config b = small_tail_config("runner_out_b");
  runner::Overrides ov;
  ov.workers = 3;
  CHECK(runner::run(b, "tail", ov, nullptr) == runner::kExitPass);
  CHECK(slurp("runner_out_a/tail.rows.csv") == slurp("runner_out_b/tail.rows.csv"));
  CHECK(slurp("runner_out_a/tail.plot.csv") == slurp("runner_out_b/tail.plot.csv"));

  // run twice with the same config: identical bytes again
  fs::remove_all("runner_out_b");
  CHECK(runner::run(b, "tail", ov, nullptr) == runner::kExitPass);
  CHECK(slurp("runner_out_a/tail.rows.csv") == slurp("runner_out_b/tail.rows.csv"));
}

TEST_CASE("degenerate covariance is a config error") {
  config::Config cfg;
  cfg.set("run", "seed", "1");
  cfg.set("run", "out", "runner_out_err");
  cfg.set("model", "cone", "orthant(2)");
  cfg.set("model", "steps", "atoms[((1,0),0.5);((-1,0),0.5)]");
  cfg.set("llt", "x", "(1,1)");
  std::string log;
  CHECK(runner::run(cfg, "llt", {}, &log) == runner::kExitError);
  CHECK(log.find("error") != std::string::npos);
}

TEST_CASE("unknown experiment and malformed cone fail cleanly") {
  config::Config cfg = small_tail_config("runner_out_c");
  std::string log;
  CHECK(runner::run(cfg, "frobnicate", {}, &log) == runner::kExitError);

  config::Config bad;
  bad.set("run", "out", "runner_out_d");
  bad.set("model", "cone", "dodecahedron(12)");
  bad.set("model", "steps", "gaussian(2)");
  CHECK(runner::run(bad, "tail", {}, &log) == runner::kExitError);
}

TEST_CASE("constants experiment emits the spectral summary") {
  config::Config cfg;
  cfg.set("run", "seed", "5");
  cfg.set("run", "out", "runner_out_const");
  cfg.set("model", "cone", "halfline");
  cfg.set("model", "steps", "gaussian(1)");
  cfg.set("constants", "bm_paths", "2000");
  std::string log;
  CHECK(runner::run(cfg, "constants", {}, &log) == runner::kExitPass);
  std::string json = slurp("runner_out_const/constants.report.json");
  CHECK(json.find("kappa0") != std::string::npos);
  CHECK(log.find("p=1") != std::string::npos);
}

TEST_CASE("cmu-probe grid mode reproduces the unit-square partition") {
  config::Config cfg;
  cfg.set("run", "seed", "5");
  cfg.set("run", "out", "runner_out_cmu");
  cfg.set("model", "cone", "orthant(2)");
  cfg.set("model", "steps", "atoms[((2,-1),0.25);((0,-1),0.25);((-1,1),0.5)]");
  cfg.set("model", "whiten", "false");
  cfg.set("cmu-probe", "gamma", "0.05");
  cfg.set("cmu-probe", "R", "0.5");
  cfg.set("cmu-probe", "n_max", "8");
  std::string log;
  CHECK(runner::run(cfg, "cmu-probe", {}, &log) == runner::kExitPass);
  std::string csv = slurp("runner_out_cmu/cmu-probe.rows.csv");
  // every grid start appears once: 12 x 12 rows plus the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 145);
}

TEST_CASE("declared moment order below the requirement raises a warning") {
  config::Config cfg = small_tail_config("runner_out_warn");
  cfg.set("model", "moment_alpha", "1.5");
  std::string log;
  CHECK(runner::run(cfg, "tail", {}, &log) == runner::kExitPass);
  CHECK(log.find("warning") != std::string::npos);
  std::string manifest = slurp("runner_out_warn/manifest.json");
  CHECK(manifest.find("warnings") != std::string::npos);
}

TEST_CASE("plot rows: empty reports give a header-only file, bins plot per bin") {
  theorems::VerifierReport empty;
  CHECK(report::plot_csv(empty) == "n,quantity,value,low,high,predicted\n");

  theorems::VerifierReport hist;
  hist.bins.columns = {"bin_center", "observed", "predicted", "hits"};
  hist.bins.rows.push_back({0.5, 0.25, 0.24, 100.0});
  hist.bins.rows.push_back({1.5, 0.75, 0.76, 300.0});
  std::string csv = report::plot_csv(hist);
  CHECK(csv.find("0.5,bin,0.25,,,0.24") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
