#include "conewalk/runner.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace conewalk::runner {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "conewalk 1.0.0";

struct ModelContext {
  geometry::ConePtr cone;          // after whitening
  steps::StepsPtr steps;           // after whitening
  steps::StepsPtr raw_steps;       // as declared
  geometry::ConePtr raw_cone;
  bool whitened_nontrivially = false;
  std::optional<spectral::SpectralData> sd;
  std::string spectral_note;
  uint64_t seed = 1;
  int workers = 1;
  int64_t block_size = 8192;
  std::string out_dir = "out";
  std::string warnings;
};

ModelContext build_model(const config::Config& cfg, const Overrides& ov) {
  ModelContext mc;
  mc.seed = ov.seed ? *ov.seed
                    : static_cast<uint64_t>(cfg.get_int("run", "seed", 1));
  mc.workers = ov.workers ? *ov.workers
                          : static_cast<int>(cfg.get_int("run", "workers", 1));
  mc.block_size = cfg.get_int("run", "block_size", 8192);
  mc.out_dir = ov.out_dir ? *ov.out_dir : cfg.get_string("run", "out", "out");
  if (const char* env = std::getenv("CONEWALK_OUT"); env && !ov.out_dir &&
      !cfg.has("run", "out"))
    mc.out_dir = env;

  mc.raw_cone = geometry::parse_cone(cfg.get_string("model", "cone"));
  mc.raw_steps = steps::parse_steps(cfg.get_string("model", "steps"));
  if (mc.raw_cone->dim() != mc.raw_steps->dim())
    throw config_error("model: cone and steps dimensions differ");
  if (cfg.has("model", "lattice_basis")) {
    steps::LatticeStructure ls;
    ls.basis = cfg.get_point_list("model", "lattice_basis");
    ls.vector_dim = static_cast<int>(cfg.get_int(
        "model", "lattice_vector_dim",
        mc.raw_steps->dim() - static_cast<int64_t>(ls.basis.size())));
    mc.raw_steps->declare_lattice(std::move(ls));
    if (!steps::validate_lattice_declaration(*mc.raw_steps))
      throw config_error("model.lattice_basis: support does not match the declaration");
  }
  if (cfg.has("model", "moment_alpha"))
    mc.raw_steps->declare_moment_order(cfg.get_double("model", "moment_alpha"));

  bool whiten = cfg.get_bool("model", "whiten", true);
  if (whiten) {
    steps::Whitening w = steps::whitening_transform(mc.raw_steps);
    mc.steps = w.whitened;
    mc.cone = w.identity ? mc.raw_cone : geometry::make_linear_image(w.transform, mc.raw_cone);
    mc.whitened_nontrivially = !w.identity;
  } else {
    mc.steps = mc.raw_steps;
    mc.cone = mc.raw_cone;
  }

  double m1_scale = cfg.get_double("model", "m1_scale", 1.0);
  try {
    mc.sd = spectral::spectral_data(mc.cone, m1_scale);
    if (auto alpha = mc.steps->declared_moment_order()) {
      double need = mc.sd->p() > 2.0 ? mc.sd->p() : 2.0;
      if (*alpha < need)
        mc.warnings += "declared moment order " + fmt_double(*alpha) +
                       " is below the required " + fmt_double(need) + "; ";
    }
  } catch (const unsupported_error& e) {
    mc.spectral_note = e.what();
  }
  return mc;
}

const spectral::SpectralData& require_spectral(const ModelContext& mc) {
  if (!mc.sd)
    throw config_error("this experiment needs spectral data: " + mc.spectral_note);
  return *mc.sd;
}

constants::BrownianBudget brownian_budget(const config::Config& cfg, int workers) {
  constants::BrownianBudget b;
  b.paths = cfg.get_int("constants", "bm_paths", 20000);
  b.t_grid = cfg.get_double_list("constants", "bm_t_grid", {16.0, 32.0, 64.0});
  b.interior_scale = cfg.get_double("constants", "bm_interior_scale", 4.0);
  b.workers = workers;
  return b;
}

harmonic::VOptions v_options(const config::Config& cfg, const std::string& section,
                             const ModelContext& mc) {
  harmonic::VOptions vo;
  vo.horizons = cfg.get_int_list(section, "v_horizons", {64, 256, 1024});
  vo.paths = cfg.get_int(section, "v_paths", 200000);
  vo.workers = mc.workers;
  vo.block_size = mc.block_size;
  return vo;
}

struct ExperimentOutput {
  theorems::VerifierReport report;
  bool is_verifier = true;
  json extra;  // non-verifier payload written verbatim
};

theorems::Context make_theorem_context(const ModelContext& mc,
                                       const constants::ConstantSet* consts) {
  theorems::Context ctx;
  ctx.cone = mc.cone;
  ctx.steps = mc.steps;
  ctx.sd = mc.sd ? &*mc.sd : nullptr;
  ctx.consts = consts;
  ctx.master_seed = mc.seed;
  ctx.workers = mc.workers;
  ctx.block_size = mc.block_size;
  return ctx;
}

ExperimentOutput run_tail(const config::Config& cfg, const ModelContext& mc,
                          const constants::ConstantSet& consts, int64_t paths_override) {
  theorems::TailParams p;
  p.x = cfg.get_point("tail", "x");
  p.horizons = cfg.get_int_list("tail", "horizons", config::parse_int_list("64..8192 x2"));
  p.paths = paths_override > 0 ? paths_override : cfg.get_int("tail", "paths", 1000000);
  p.slope_tol = cfg.get_double("tail", "slope_tol", 0.1);
  p.ratio_tol = cfg.get_double("tail", "ratio_tol", 0.15);
  p.envelope_k = cfg.get_double("tail", "envelope_k", 2.0);
  p.v_opt = v_options(cfg, "tail", mc);
  ExperimentOutput out;
  out.report = theorems::verify_tail(make_theorem_context(mc, &consts), p);
  return out;
}

ExperimentOutput run_weak_limit(const config::Config& cfg, const ModelContext& mc,
                                const constants::ConstantSet& consts,
                                int64_t paths_override) {
  theorems::WeakLimitParams p;
  p.x = cfg.get_point("weak-limit", "x");
  p.horizons = cfg.get_int_list("weak-limit", "horizons", {256, 1024, 4096});
  p.paths =
      paths_override > 0 ? paths_override : cfg.get_int("weak-limit", "paths", 1000000);
  int d = mc.cone->dim();
  p.hist_lo = cfg.get_point("weak-limit", "hist_lo", Vec(d, 0.0));
  p.hist_width = cfg.get_double("weak-limit", "hist_width", 0.25);
  auto bins = cfg.get_int_list("weak-limit", "hist_bins", {16});
  p.hist_bins.clear();
  for (int64_t b : bins) p.hist_bins.push_back(static_cast<int>(b));
  while (static_cast<int>(p.hist_bins.size()) < d) p.hist_bins.push_back(p.hist_bins.back());
  p.min_bin_hits = cfg.get_int("weak-limit", "min_bin_hits", 500);
  p.min_survivors = cfg.get_int("weak-limit", "min_survivors", 10000);
  p.max_dev_tol = cfg.get_double("weak-limit", "max_dev_tol", 0.2);
  ExperimentOutput out;
  out.report = theorems::verify_weak_limit(make_theorem_context(mc, &consts), p);
  return out;
}

ExperimentOutput run_llt(const config::Config& cfg, const ModelContext& mc,
                         const constants::ConstantSet& consts, int64_t paths_override) {
  theorems::LltParams p;
  p.x = cfg.get_point("llt", "x");
  int d = mc.cone->dim();
  p.box_center_scale = cfg.get_point("llt", "box_center_scale", Vec(d, 1.0));
  p.box_side = cfg.get_double("llt", "box_side", 1.0);
  p.horizons = cfg.get_int_list("llt", "horizons", {4096});
  p.paths = paths_override > 0 ? paths_override : cfg.get_int("llt", "paths", 1000000);
  p.tol = cfg.get_double("llt", "tol", 0.2);
  p.min_hits = cfg.get_int("llt", "min_hits", 300);
  p.v_opt = v_options(cfg, "llt", mc);
  ExperimentOutput out;
  out.report = theorems::verify_stone_llt(make_theorem_context(mc, &consts), p);
  return out;
}

ExperimentOutput run_return(const config::Config& cfg, const ModelContext& mc,
                            const constants::ConstantSet& consts, int64_t paths_override) {
  theorems::ReturnParams p;
  p.x = cfg.get_point("return", "x");
  Vec lo = cfg.get_point("return", "box_lo");
  Vec hi = cfg.get_point("return", "box_hi");
  p.target = geometry::Box(lo, hi);
  p.horizons = cfg.get_int_list("return", "horizons", {400});
  p.paths = paths_override > 0 ? paths_override : cfg.get_int("return", "paths", 10000000);
  p.tol = cfg.get_double("return", "tol", 0.25);
  p.envelope_c = cfg.get_double("return", "envelope_c", 1.5);
  p.min_hits = cfg.get_int("return", "min_hits", 100);
  p.vtilde_grid = static_cast<int>(cfg.get_int("return", "vtilde_grid", 8));
  p.v_opt = v_options(cfg, "return", mc);
  ExperimentOutput out;
  out.report = theorems::verify_return_prob(make_theorem_context(mc, &consts), p);
  return out;
}

ExperimentOutput run_duality(const config::Config& cfg, const ModelContext& mc,
                             int64_t paths_override) {
  theorems::DualityParams p;
  p.xs = cfg.get_point_list("duality", "xs");
  p.ys = cfg.get_point_list("duality", "ys");
  p.delta = cfg.get_double("duality", "delta", 0.25);
  p.delta_tilde = cfg.get_double("duality", "delta_tilde", 0.5);
  p.horizon = cfg.get_int("duality", "horizon", 64);
  p.paths = paths_override > 0 ? paths_override : cfg.get_int("duality", "paths", 1000000);
  ExperimentOutput out;
  out.report = theorems::verify_duality(make_theorem_context(mc, nullptr), p);
  return out;
}

ExperimentOutput run_bounds(const config::Config& cfg, const ModelContext& mc,
                            int64_t paths_override) {
  theorems::BoundsParams p;
  p.x_dir = cfg.get_point("bounds", "x_dir", Vec(mc.cone->dim(), 1.0));
  p.delta = cfg.get_double("bounds", "delta", 1.0);
  p.horizons = cfg.get_int_list("bounds", "horizons", {64, 256, 1024, 4096});
  p.paths = paths_override > 0 ? paths_override : cfg.get_int("bounds", "paths", 200000);
  p.t_values = cfg.get_double_list("bounds", "t_values", {0.5, 1.0, 2.0});
  p.slope_tol = cfg.get_double("bounds", "slope_tol", 0.15);
  ExperimentOutput out;
  out.report = theorems::check_gaussian_bounds(make_theorem_context(mc, nullptr), p);
  return out;
}

ExperimentOutput run_constants_exp(const config::Config& cfg, const ModelContext& mc) {
  const spectral::SpectralData& sd = require_spectral(mc);
  constants::ConstantSet c =
      constants::compute_constants(sd, brownian_budget(cfg, mc.workers), mc.seed);
  ExperimentOutput out;
  out.is_verifier = false;
  out.report.name = "constants";
  out.report.verdict = theorems::Verdict::pass;
  out.report.rows.columns = {"p", "lambda1", "H0", "kappa0", "kappa0_stderr", "kappa1"};
  out.report.rows.rows.push_back(
      {c.p, c.lambda1, c.H0, c.kappa0.value, c.kappa0.stderr_, c.kappa1});
  out.extra = {{"cone", mc.cone->describe()},
               {"p", c.p},
               {"lambda1", c.lambda1},
               {"m1_norm_constant", sd.norm_constant()},
               {"H0", c.H0},
               {"uIntegral", c.u_integral.value},
               {"u2Integral", c.u2_integral.value},
               {"kappa0", c.kappa0.value},
               {"kappa0_stderr", c.kappa0.stderr_},
               {"kappa0_closed_form", c.kappa0.closed_form},
               {"kappa0_universality_ok", c.kappa0.universality_ok},
               {"kappa1", c.kappa1},
               {"kappa1_stderr", c.kappa1_stderr}};
  if (!c.kappa0.universality_ok) out.report.verdict = theorems::Verdict::fail;
  return out;
}

ExperimentOutput run_harmonic_exp(const config::Config& cfg, const ModelContext& mc,
                                  int64_t paths_override) {
  const spectral::SpectralData& sd = require_spectral(mc);
  Vec x = cfg.get_point("harmonic", "x");
  harmonic::VOptions vo = v_options(cfg, "harmonic", mc);
  if (paths_override > 0) vo.paths = paths_override;
  bool reversed = cfg.get_bool("harmonic", "reversed", false);
  harmonic::VEstimate v =
      reversed ? harmonic::estimate_v_tilde(x, mc.steps, mc.cone, sd, vo, mc.seed)
               : harmonic::estimate_v(x, mc.steps, mc.cone, sd, vo, mc.seed);
  ExperimentOutput out;
  out.is_verifier = false;
  out.report.name = "harmonic";
  out.report.verdict = v.stabilized ? theorems::Verdict::pass : theorems::Verdict::inconclusive;
  if (!v.stabilized) out.report.note = "estimate not stabilized over the last horizons";
  out.report.estimated = v.value;
  out.report.est_stderr = v.stderr_;
  out.report.rows.columns = {"horizon", "value", "stderr"};
  json curve = json::array();
  for (const auto& c : v.curve) {
    out.report.rows.rows.push_back({static_cast<double>(c.n), c.value, c.stderr_});
    curve.push_back({{"n", c.n}, {"value", c.value}, {"stderr", c.stderr_}});
  }
  json jx = json::array();
  for (double c : x) jx.push_back(c);
  out.extra = {{"x", jx},           {"value", v.value},   {"stderr", v.stderr_},
               {"horizon", v.horizon}, {"stabilized", v.stabilized}, {"curve", curve},
               {"reversed", reversed}};
  return out;
}

ExperimentOutput run_aperiodicity_exp(const config::Config& cfg, const ModelContext& mc) {
  int res = static_cast<int>(cfg.get_int("aperiodicity", "grid", 256));
  double window = cfg.get_double("aperiodicity", "vector_window", 8.0);
  steps::AperiodicityVerdict v = steps::check_aperiodicity(*mc.raw_steps, res, window);
  ExperimentOutput out;
  out.is_verifier = false;
  out.report.name = "aperiodicity";
  out.report.verdict = v.verdict == steps::Periodicity::inconclusive
                           ? theorems::Verdict::inconclusive
                           : theorems::Verdict::pass;
  out.report.rows.columns = {"max_modulus"};
  out.report.rows.rows.push_back({v.max_modulus});
  json jw = json::array();
  for (double c : v.witness) jw.push_back(c);
  out.extra = {{"verdict", v.verdict == steps::Periodicity::periodic      ? "periodic"
                           : v.verdict == steps::Periodicity::aperiodic ? "aperiodic"
                                                                        : "inconclusive"},
               {"gridCertified", v.grid_certified},
               {"maxModulus", v.max_modulus},
               {"witness", jw},
               {"note", v.note}};
  return out;
}

ExperimentOutput run_cmu_probe_exp(const config::Config& cfg, const ModelContext& mc) {
  double gamma = cfg.get_double("cmu-probe", "gamma", 0.05);
  double radius = cfg.get_double("cmu-probe", "R", 0.5);
  int n_max = static_cast<int>(cfg.get_int("cmu-probe", "n_max", 8));
  ExperimentOutput out;
  out.is_verifier = false;
  out.report.name = "cmu-probe";
  out.report.rows.columns = {"x1", "x2", "reachable", "steps"};
  json results = json::array();
  std::vector<Vec> starts;
  if (cfg.has("cmu-probe", "x")) {
    starts.push_back(cfg.get_point("cmu-probe", "x"));
  } else {
    // grid mode over (0, grid_max]^d with the given spacing
    double spacing = cfg.get_double("cmu-probe", "grid_spacing", 0.25);
    double top = cfg.get_double("cmu-probe", "grid_max", 3.0);
    int d = mc.raw_cone->dim();
    std::vector<int> idx(d, 1);
    int per = static_cast<int>(std::llround(top / spacing));
    while (true) {
      Vec x(d);
      for (int i = 0; i < d; ++i) x[i] = idx[i] * spacing;
      if (mc.raw_cone->contains(x)) starts.push_back(x);
      int c = 0;
      while (c < d && ++idx[c] > per) idx[c++] = 1;
      if (c == d) break;
    }
  }
  bool any_budget = false;
  for (const Vec& x : starts) {
    steps::CmuProbe probe = steps::cmu_probe(*mc.raw_steps, *mc.raw_cone, x, gamma, radius,
                                             n_max);
    any_budget = any_budget || probe.budget_exceeded;
    out.report.rows.rows.push_back({x[0], x.size() > 1 ? x[1] : 0.0,
                                    probe.reachable ? 1.0 : 0.0,
                                    static_cast<double>(probe.steps_to_reach)});
    json jx = json::array();
    for (double c : x) jx.push_back(c);
    results.push_back({{"x", jx},
                       {"reachable", probe.reachable},
                       {"steps", probe.steps_to_reach},
                       {"budgetExceeded", probe.budget_exceeded}});
  }
  out.report.verdict =
      any_budget ? theorems::Verdict::inconclusive : theorems::Verdict::pass;
  out.extra = {{"gamma", gamma}, {"R", radius}, {"nMax", n_max}, {"results", results}};
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "constants", "tail",    "harmonic", "weak-limit", "llt",
      "return",    "duality", "bounds",   "aperiodicity", "cmu-probe"};
  return names;
}

int run(const config::Config& cfg, const std::string& subcommand, const Overrides& ov,
        std::string* log) {
  auto say = [&](const std::string& s) {
    if (log) *log += s + "\n";
  };
  try {
    ModelContext mc = build_model(cfg, ov);
    int64_t paths_override = ov.paths ? *ov.paths : -1;

    std::vector<std::string> todo;
    if (subcommand == "all") {
      for (const std::string& name : cfg.section_names()) {
        const auto& known = experiment_names();
        if (std::find(known.begin(), known.end(), name) != known.end()) todo.push_back(name);
      }
      if (todo.empty()) throw config_error("config declares no experiment sections");
    } else {
      todo.push_back(subcommand);
    }

    // constants are shared by the verifiers that need a prediction
    std::optional<constants::ConstantSet> consts;
    auto need_consts = [&](const std::string& n) {
      return n == "tail" || n == "weak-limit" || n == "llt" || n == "return";
    };
    for (const std::string& name : todo)
      if (need_consts(name) && !consts) {
        const spectral::SpectralData& sd = require_spectral(mc);
        consts = constants::compute_constants(sd, brownian_budget(cfg, mc.workers), mc.seed);
      }

    report::RunManifest manifest;
    manifest.config_hash = hex64(cfg.hash());
    manifest.master_seed = mc.seed;
    manifest.tool_version = kToolVersion;
    {
      auto now = std::chrono::system_clock::now();
      auto t = std::chrono::system_clock::to_time_t(now);
      char buf[32];
      std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
      manifest.timestamp = buf;
    }
    manifest.cone = mc.raw_cone->describe();
    manifest.steps = mc.raw_steps->describe();
    manifest.whitened = mc.whitened_nontrivially;
    manifest.warnings = mc.warnings;

    bool any_fail = false, any_soft = false;
    for (const std::string& name : todo) {
      ExperimentOutput out;
      if (name == "tail")
        out = run_tail(cfg, mc, *consts, paths_override);
      else if (name == "weak-limit")
        out = run_weak_limit(cfg, mc, *consts, paths_override);
      else if (name == "llt")
        out = run_llt(cfg, mc, *consts, paths_override);
      else if (name == "return")
        out = run_return(cfg, mc, *consts, paths_override);
      else if (name == "duality")
        out = run_duality(cfg, mc, paths_override);
      else if (name == "bounds")
        out = run_bounds(cfg, mc, paths_override);
      else if (name == "constants")
        out = run_constants_exp(cfg, mc);
      else if (name == "harmonic")
        out = run_harmonic_exp(cfg, mc, paths_override);
      else if (name == "aperiodicity")
        out = run_aperiodicity_exp(cfg, mc);
      else if (name == "cmu-probe")
        out = run_cmu_probe_exp(cfg, mc);
      else
        throw config_error("unknown experiment: " + name);

      const theorems::VerifierReport& rep = out.report;
      manifest.verdicts.emplace_back(name, theorems::verdict_name(rep.verdict));
      if (rep.verdict == theorems::Verdict::fail) any_fail = true;
      if (rep.verdict == theorems::Verdict::inconclusive ||
          rep.verdict == theorems::Verdict::refused)
        any_soft = true;

      std::string base = mc.out_dir + "/" + name;
      json j = report::report_json(rep, manifest);
      if (!out.extra.is_null()) j["payload"] = out.extra;
      report::write_text(base + ".report.json", j.dump(2) + "\n");
      report::write_text(base + ".rows.csv", report::rows_csv(rep.rows));
      report::write_text(base + ".plot.csv", report::plot_csv(rep));
      say(name + ": " + theorems::verdict_name(rep.verdict) +
          (rep.note.empty() ? "" : " (" + rep.note + ")"));
      if (name == "constants" && !out.extra.is_null())
        say("  p=" + fmt_double(out.extra["p"].get<double>()) +
            " lambda1=" + fmt_double(out.extra["lambda1"].get<double>()) +
            " m1_norm=" + fmt_double(out.extra["m1_norm_constant"].get<double>()) +
            " H0=" + fmt_double(out.extra["H0"].get<double>()) +
            " kappa0=" + fmt_double(out.extra["kappa0"].get<double>()) +
            " kappa1=" + fmt_double(out.extra["kappa1"].get<double>()));
    }
    if (!mc.warnings.empty()) say("warning: " + mc.warnings);

    report::write_text(mc.out_dir + "/manifest.json",
                       report::manifest_json(manifest).dump(2) + "\n");
    if (any_fail) return kExitFail;
    if (any_soft) return kExitInconclusive;
    return kExitPass;
  } catch (const std::exception& e) {
    say(std::string("error: ") + e.what());
    return kExitError;
  }
}

int run_file(const std::string& config_path, const std::string& subcommand,
             const Overrides& ov, std::string* log) {
  try {
    config::Config cfg = config::Config::load(config_path);
    return run(cfg, subcommand, ov, log);
  } catch (const std::exception& e) {
    if (log) *log += std::string("error: ") + e.what() + "\n";
    return kExitError;
  }
}

}  // namespace conewalk::runner
