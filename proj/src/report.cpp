#include "conewalk/report.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

#include "conewalk/stats.hpp"

namespace conewalk::report {

using nlohmann::json;

std::string rows_csv(const theorems::Table& table) {
  std::string out;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ",";
    out += table.columns[i];
  }
  out += "\n";
  for (const Vec& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += fmt_double(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string plot_csv(const theorems::VerifierReport& rep) {
  std::string out = "n,quantity,value,low,high,predicted\n";
  if (!rep.bins.rows.empty()) {
    // histogram verifiers plot one row per bin
    size_t m = rep.bins.columns.size();
    for (const Vec& row : rep.bins.rows) {
      double v = row[m - 3], pred = row[m - 2];
      out += fmt_double(row[0]) + ",bin," + fmt_double(v) + ",,," + fmt_double(pred) + "\n";
    }
    return out;
  }
  const auto& cols = rep.rows.columns;
  auto col = [&](const std::string& name) -> int {
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return static_cast<int>(i);
    return -1;
  };
  int cn = col("horizon");
  int cp = col("phat"), cse = col("stderr"), cpred = col("predicted");
  int csurv = col("survivors"), ctot = col("total");
  int ctv = col("tv");
  for (const Vec& row : rep.rows.rows) {
    double n = cn >= 0 ? row[cn] : 0.0;
    if (cp >= 0 && cse >= 0) {
      double v = row[cp], se = row[cse];
      double lo = v - 1.96 * se, hi = v + 1.96 * se;
      if (csurv >= 0 && ctot >= 0 && row[ctot] >= 1.0) {
        // small survivor counts at large horizons are the norm, so score
        // intervals rather than plain normal ones
        stats::CI ci = stats::wilson_ci(static_cast<int64_t>(row[csurv]),
                                        static_cast<int64_t>(row[ctot]));
        lo = ci.low;
        hi = ci.high;
      }
      out += fmt_double(n) + ",phat," + fmt_double(v) + "," + fmt_double(lo) + "," +
             fmt_double(hi) + "," +
             (cpred >= 0 ? fmt_double(row[cpred]) : std::string("")) + "\n";
    } else if (ctv >= 0) {
      int ctse = col("tv_stderr");
      double v = row[ctv], se = ctse >= 0 ? row[ctse] : 0.0;
      out += fmt_double(n) + ",tv," + fmt_double(v) + "," + fmt_double(v - 1.96 * se) + "," +
             fmt_double(v + 1.96 * se) + ",0\n";
    } else {
      out += fmt_double(n) + ",value,";
      out += row.size() > 1 ? fmt_double(row[1]) : std::string("0");
      out += ",,,\n";
    }
  }
  return out;
}

json manifest_json(const RunManifest& m) {
  json j;
  j["schemaVersion"] = 1;
  j["configHash"] = m.config_hash;
  j["masterSeed"] = m.master_seed;
  j["toolVersion"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  j["cone"] = m.cone;
  j["steps"] = m.steps;
  j["whitened"] = m.whitened;
  if (!m.warnings.empty()) j["warnings"] = m.warnings;
  json verdicts = json::object();
  for (const auto& [name, verdict] : m.verdicts) verdicts[name] = verdict;
  j["verdicts"] = verdicts;
  return j;
}

json report_json(const theorems::VerifierReport& rep, const RunManifest& m) {
  json j;
  j["schemaVersion"] = 1;
  j["name"] = rep.name;
  j["verdict"] = theorems::verdict_name(rep.verdict);
  j["predicted"] = rep.predicted;
  j["estimated"] = rep.estimated;
  j["estimatedStderr"] = rep.est_stderr;
  j["ratio"] = rep.ratio;
  j["ratioStderr"] = rep.ratio_stderr;
  j["tolerance"] = rep.tolerance;
  if (!rep.note.empty()) j["note"] = rep.note;
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}});
  j["checks"] = checks;
  j["manifest"] = {{"configHash", m.config_hash},
                   {"masterSeed", m.master_seed},
                   {"cone", m.cone},
                   {"steps", m.steps}};
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write " + path);
  out << content;
}

}  // namespace conewalk::report
