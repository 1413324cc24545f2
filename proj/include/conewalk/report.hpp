#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "conewalk/theorems.hpp"

namespace conewalk::report {

struct RunManifest {
  std::string config_hash;
  uint64_t master_seed = 0;
  std::string tool_version;
  std::string timestamp;  // the only field allowed to vary between runs
  std::string cone;
  std::string steps;
  bool whitened = false;
  std::string warnings;
  std::vector<std::pair<std::string, std::string>> verdicts;
};

std::string rows_csv(const theorems::Table& table);
// tidy plot rows: n, quantity, value, low, high, predicted
std::string plot_csv(const theorems::VerifierReport& rep);
nlohmann::json report_json(const theorems::VerifierReport& rep, const RunManifest& manifest);
nlohmann::json manifest_json(const RunManifest& manifest);

void write_text(const std::string& path, const std::string& content);

}  // namespace conewalk::report
