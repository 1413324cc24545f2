#pragma once

#include "conewalk/config.hpp"
#include "conewalk/report.hpp"

namespace conewalk::runner {

// CLI exit-code contract.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitError = 3;

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int64_t> paths;
  std::optional<int> workers;
};

// Runs one named experiment ("all" runs every experiment section in file
// order) and writes manifest.json plus per-experiment report/rows/plot files
// into the output directory. Returns the exit code.
int run(const config::Config& cfg, const std::string& subcommand, const Overrides& ov,
        std::string* log = nullptr);

int run_file(const std::string& config_path, const std::string& subcommand,
             const Overrides& ov, std::string* log = nullptr);

// The experiment names `run` understands, in canonical order.
const std::vector<std::string>& experiment_names();

}  // namespace conewalk::runner
