#include "conewalk/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace conewalk::harmonic {

namespace {

VEstimate estimate_impl(std::span<const double> x, const steps::StepsPtr& dist,
                        const geometry::ConePtr& cone, const spectral::SpectralData& sd,
                        const VOptions& opt, uint64_t master_seed, bool reversed) {
  if (!cone->contains(x))
    throw precondition_error("estimate_v: start outside the cone");
  walk::BatchRequest req;
  req.region = cone.get();
  req.steps = dist;
  req.start.assign(x.begin(), x.end());
  req.reversed = reversed;
  req.horizons = opt.horizons;
  req.paths = opt.paths;
  req.master_seed = master_seed;
  req.purpose = opt.purpose;
  req.block_size = opt.block_size;
  req.reservoir_capacity = 0;
  req.functional = [&sd](std::span<const double> p) { return sd.u(p); };
  walk::SurvivalTable table = walk::survival_batch(req, opt.workers);

  VEstimate est;
  for (size_t h = 0; h < table.horizons.size(); ++h)
    est.curve.push_back({table.horizons[h], table.func_mean(h), table.func_stderr(h)});
  est.horizon = est.curve.back().n;
  est.value = est.curve.back().value;
  est.stderr_ = est.curve.back().stderr_;
  est.stabilized = false;
  if (est.curve.size() >= 3) {
    est.stabilized = true;
    for (size_t i = est.curve.size() - 3; i < est.curve.size(); ++i) {
      double tol = 2.0 * std::max(est.stderr_, est.curve[i].stderr_);
      if (std::fabs(est.curve[i].value - est.value) > tol) est.stabilized = false;
    }
  }
  return est;
}

}  // namespace

VEstimate estimate_v(std::span<const double> x, const steps::StepsPtr& dist,
                     const geometry::ConePtr& cone, const spectral::SpectralData& sd,
                     const VOptions& opt, uint64_t master_seed) {
  return estimate_impl(x, dist, cone, sd, opt, master_seed, false);
}

VEstimate estimate_v_tilde(std::span<const double> y, const steps::StepsPtr& dist,
                           const geometry::ConePtr& cone, const spectral::SpectralData& sd,
                           const VOptions& opt, uint64_t master_seed) {
  return estimate_impl(y, dist, cone, sd, opt, master_seed, true);
}

HarmonicityResidual harmonicity_residual(std::span<const double> x, const steps::StepsPtr& dist,
                                         const geometry::ConePtr& cone,
                                         const spectral::SpectralData& sd,
                                         const ResidualOptions& opt, uint64_t master_seed) {
  if (!cone->contains(x))
    throw precondition_error("harmonicity_residual: start outside the cone");
  const int d = cone->dim();

  // E[u(x+S(n+1)); alive] == E[ 1{x+X in C} E[u(x+X+S(n)); alive] ] at every
  // finite n, so comparing horizon n+1 against a one-step average of
  // horizon-n estimates tests harmonicity without any asymptotics.
  VOptions base_opt;
  base_opt.horizons = {opt.inner_horizon + 1};
  base_opt.paths = opt.inner_paths * 4;
  base_opt.workers = opt.workers;
  base_opt.purpose = walk::purpose::kVEstimate;
  VEstimate base = estimate_v(x, dist, cone, sd, base_opt, master_seed);

  VOptions inner_opt;
  inner_opt.horizons = {opt.inner_horizon};
  inner_opt.paths = opt.inner_paths;
  inner_opt.workers = opt.workers;
  inner_opt.purpose = walk::purpose::kVInner;

  struct KeyHash {
    size_t operator()(const std::vector<int64_t>& v) const {
      uint64_t h = 0xcbf29ce484222325ull;
      for (int64_t q : v) {
        h ^= static_cast<uint64_t>(q);
        h *= 0x100000001b3ull;
      }
      return static_cast<size_t>(h);
    }
  };
  std::unordered_map<std::vector<int64_t>, double, KeyHash> cache;

  HarmonicityResidual out;
  rng::Stream outer(master_seed, walk::purpose::kVOuter, 0);
  double sum = 0.0, sum_sq = 0.0;
  double step[kMaxDim];
  Vec y(d);
  for (int64_t j = 0; j < opt.outer_paths; ++j) {
    dist->sample(outer, std::span<double>(step, d));
    for (int i = 0; i < d; ++i) y[i] = x[i] + step[i];
    double z = 0.0;
    if (cone->contains(y)) {
      if (opt.use_cache) {
        std::vector<int64_t> key(d);
        for (int i = 0; i < d; ++i)
          key[i] = llround(y[i] / opt.cache_resolution);
        auto it = cache.find(key);
        if (it != cache.end()) {
          z = it->second;
          ++out.cache_hits;
        } else {
          z = estimate_v(y, dist, cone, sd, inner_opt, mix64(master_seed ^ (j + 1))).value;
          cache.emplace(std::move(key), z);
        }
      } else {
        z = estimate_v(y, dist, cone, sd, inner_opt, mix64(master_seed ^ (j + 1))).value;
      }
    }
    sum += z;
    sum_sq += z * z;
  }
  double n = static_cast<double>(opt.outer_paths);
  double mean = sum / n;
  double var = std::max(sum_sq / n - mean * mean, 0.0);
  out.one_step_mean = mean;
  out.v_value = base.value;
  out.residual = base.value - mean;
  out.stderr_ = std::sqrt(base.stderr_ * base.stderr_ + var / n);
  out.cache_entries = static_cast<int64_t>(cache.size());
  return out;
}

RenewalResult renewal_v_1d(const steps::StepDistribution& mu, double x,
                           const RenewalOptions& opt) {
  const auto* atoms = mu.atoms();
  if (!atoms) throw unsupported_error("renewal_v_1d: requires a finite support");
  if (mu.dim() != 1) throw argument_error("renewal_v_1d: requires a 1-d law");
  if (x < 0.0) throw argument_error("renewal_v_1d: x must be >= 0");
  double mean = mu.mean()[0];
  if (std::fabs(mean) > 1e-12)
    throw argument_error("renewal_v_1d: law must be centered");

  auto key_of = [](double pos) { return llround(pos * 4294967296.0); };

  // enumerate killed paths below 0 until they first climb above it; the mass
  // leaving through (0, inf) is the ladder-height law
  std::unordered_map<int64_t, std::pair<double, double>> cur;  // key -> (pos, mass)
  cur[key_of(0.0)] = {0.0, 1.0};
  std::map<int64_t, std::pair<double, double>> ladder;
  double remaining = 1.0;
  for (int depth = 0; depth < opt.depth && remaining > opt.mass_tol; ++depth) {
    std::unordered_map<int64_t, std::pair<double, double>> next;
    for (const auto& [key, pm] : cur) {
      for (const auto& a : *atoms) {
        double q = pm.first + a.x[0];
        double w = pm.second * a.w;
        if (q > 0.0) {
          auto& slot = ladder[key_of(q)];
          slot.first = q;
          slot.second += w;
        } else {
          auto& slot = next[key_of(q)];
          slot.first = q;
          slot.second += w;
        }
      }
    }
    cur = std::move(next);
    remaining = 0.0;
    for (const auto& [key, pm] : cur) remaining += pm.second;
  }

  RenewalResult out;
  double captured = 0.0;
  for (const auto& [key, pm] : ladder) captured += pm.second;
  out.ladder_deficit = 1.0 - captured;
  if (!(captured > 0.0))
    throw argument_error("renewal_v_1d: no ascending mass captured");
  // renormalize by the captured mass; with a single ladder atom this is exact
  for (const auto& [key, pm] : ladder)
    out.ladder_atoms.emplace_back(pm.first, pm.second / captured);

  // renewal series: repeatedly convolve with the ladder law, dropping mass
  // that climbs past x (ladder heights are positive, so it never returns)
  auto in_range = [&](double pos) {
    return opt.convention == HalfLineConvention::closed ? pos <= x + 1e-12
                                                        : pos < x - 1e-12;
  };
  std::unordered_map<int64_t, std::pair<double, double>> series;
  series[key_of(0.0)] = {0.0, 1.0};
  double value = 1.0;  // the zeroth term: the origin is always counted
  int terms = 0;
  double live = 1.0;
  while (live > opt.mass_tol && terms < opt.max_terms) {
    std::unordered_map<int64_t, std::pair<double, double>> next;
    for (const auto& [key, pm] : series) {
      for (const auto& [height, w] : out.ladder_atoms) {
        double q = pm.first + height;
        if (!in_range(q)) continue;
        auto& slot = next[key_of(q)];
        slot.first = q;
        slot.second += pm.second * w;
      }
    }
    series = std::move(next);
    live = 0.0;
    for (const auto& [key, pm] : series) live += pm.second;
    value += live;
    ++terms;
  }
  out.value = value;
  out.terms = terms;
  if (live > opt.mass_tol) {
    // geometric bound on the dropped tail
    double retain = 0.0;
    for (const auto& [height, w] : out.ladder_atoms)
      if (in_range(height)) retain += w;
    out.truncation_error =
        retain < 1.0 - 1e-12 ? live * retain / (1.0 - retain) : std::nan("");
  }
  return out;
}

}  // namespace conewalk::harmonic
