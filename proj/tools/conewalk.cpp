#include <CLI11.hpp>

#include <iostream>

#include "conewalk/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo toolkit for random walks killed at the boundary of a cone"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int64_t paths = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--paths", paths, "path budget override");
    sub->add_option("--workers", workers, "worker threads (0/1 = serial)");
  };

  std::vector<std::string> names = conewalk::runner::experiment_names();
  names.push_back("all");
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(
        name, name == "all" ? "run every experiment section in the config"
                            : "run the '" + name + "' experiment");
    add_common(sub);
  }

  CLI11_PARSE(app, argc, argv);

  std::string sub = app.get_subcommands().front()->get_name();
  conewalk::runner::Overrides ov;
  if (seed_set) ov.seed = seed;
  if (!out_dir.empty()) ov.out_dir = out_dir;
  if (paths > 0) ov.paths = paths;
  if (workers > 0) ov.workers = workers;

  std::string log;
  int code = conewalk::runner::run_file(config_path, sub, ov, &log);
  std::cout << log;
  return code;
}
