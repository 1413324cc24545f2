#include "conewalk/theorems.hpp"

#include <algorithm>
#include <cmath>

#include "conewalk/stats.hpp"

namespace conewalk::theorems {

namespace {

Vec shifted(const Vec& x, double s) {
  Vec y = x;
  for (double& v : y) v += s;
  return y;
}

geometry::Box box_around(const Vec& lo, const Vec& hi) { return geometry::Box(lo, hi); }

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::refused: return "refused";
  }
  return "?";
}

double box_quadrature(const geometry::Box& box,
                      const std::function<double(std::span<const double>)>& f, int panels) {
  int d = box.dim();
  int pts = 2 * panels + 1;  // composite Simpson nodes per axis
  std::vector<double> w(pts);
  for (int i = 0; i < pts; ++i) w[i] = (i == 0 || i == pts - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  double cell = 1.0;
  for (int i = 0; i < d; ++i) cell *= (box.hi[i] - box.lo[i]) / (2.0 * panels) / 3.0;
  std::vector<int> idx(d, 0);
  Vec y(d);
  double acc = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      y[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / (pts - 1.0);
      weight *= w[idx[i]];
    }
    acc += weight * f(y);
    int c = 0;
    while (c < d && ++idx[c] >= pts) idx[c++] = 0;
    if (c == d) break;
  }
  return acc * cell;
}

std::optional<std::string> aperiodicity_guard(const steps::StepDistribution& dist) {
  if (dist.atoms()) {
    if (!dist.declared_lattice())
      return "finite support without a declared lattice structure";
    auto verdict = steps::check_aperiodicity(dist, 256);
    if (verdict.verdict == steps::Periodicity::periodic)
      return "law is lattice-periodic (witness theta found with |char_fn| = 1)";
    if (verdict.verdict == steps::Periodicity::inconclusive)
      return "aperiodicity scan inconclusive: " + verdict.note;
    return std::nullopt;
  }
  // no finite support: products mixing atomic marginals with continuous ones
  // cannot be certified here
  if (dist.describe().find("atoms[") != std::string::npos)
    return "mixed product with atomic marginals cannot be certified aperiodic";
  return std::nullopt;
}

// -----------------------------------------------------------------------------

VerifierReport verify_tail(const Context& ctx, const TailParams& p) {
  VerifierReport rep;
  rep.name = "tail";
  rep.tolerance = p.ratio_tol;
  const spectral::SpectralData& sd = *ctx.sd;
  double exponent = sd.p();

  walk::BatchRequest req;
  req.region = ctx.cone.get();
  req.steps = ctx.steps;
  req.start = p.x;
  req.horizons = p.horizons;
  req.paths = p.paths;
  req.master_seed = ctx.master_seed;
  req.purpose = walk::purpose::kWalk;
  req.block_size = ctx.block_size;
  req.reservoir_capacity = 0;
  walk::SurvivalTable table = walk::survival_batch(req, ctx.workers);

  rep.rows.columns = {"horizon", "survivors", "total", "phat", "stderr", "predicted"};
  harmonic::VOptions vo = p.v_opt;
  vo.workers = ctx.workers;
  harmonic::VEstimate v = harmonic::estimate_v(p.x, ctx.steps, ctx.cone, sd, vo,
                                               mix64(ctx.master_seed ^ 0x7645535441ull));
  double kappa0 = ctx.consts->kappa0.value;
  double kappa0_se = ctx.consts->kappa0.stderr_;

  std::vector<stats::LogLogPoint> pts;
  for (size_t h = 0; h < table.horizons.size(); ++h) {
    double n = static_cast<double>(table.horizons[h]);
    double predicted = kappa0 * v.value * std::pow(n, -exponent / 2.0);
    rep.rows.rows.push_back({n, static_cast<double>(table.at[h].survivors),
                             static_cast<double>(table.total_paths), table.phat(h),
                             table.phat_stderr(h), predicted});
    pts.push_back({n, table.phat(h), table.phat_stderr(h)});
  }

  size_t top = table.horizons.size() - 1;
  if (table.at[top].survivors < p.min_survivors) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "too few survivors at the top horizon";
    return rep;
  }

  // (a) slope of the log-log tail over the top half of the schedule
  std::vector<stats::LogLogPoint> upper(pts.begin() + pts.size() / 2, pts.end());
  stats::FitResult fit = stats::loglog_fit(upper);
  double slope_err = std::fabs(fit.slope.value + exponent / 2.0);
  bool slope_ok = slope_err <= p.slope_tol + 3.0 * fit.slope.stderr_;
  rep.checks.push_back({"slope", slope_ok, fit.slope.value});
  rep.checks.push_back({"slope_stderr", true, fit.slope.stderr_});

  // (b) constant at the top horizon
  double n_top = static_cast<double>(table.horizons[top]);
  stats::Estimate est{std::pow(n_top, exponent / 2.0) * table.phat(top),
                      std::pow(n_top, exponent / 2.0) * table.phat_stderr(top)};
  stats::Estimate pred{kappa0 * v.value,
                       std::sqrt(pow_int(kappa0_se * v.value, 2) +
                                 pow_int(kappa0 * v.stderr_, 2))};
  rep.estimated = est.value;
  rep.est_stderr = est.stderr_;
  rep.predicted = pred.value;
  auto ratio = stats::ratio_with_ci(est, pred);
  bool ratio_ok = false;
  if (ratio) {
    rep.ratio = ratio->value;
    rep.ratio_stderr = ratio->stderr_;
    ratio_ok = std::fabs(ratio->value - 1.0) <= p.ratio_tol + 3.0 * ratio->stderr_;
  }
  rep.checks.push_back({"ratio", ratio_ok, rep.ratio});

  // (c) envelope with the pinned constant
  double xn = norm(p.x);
  double envelope_scale = p.envelope_k * (1.0 + std::pow(xn, exponent));
  bool envelope_ok = true;
  for (size_t h = 0; h < table.horizons.size(); ++h) {
    double bound = envelope_scale * std::pow(static_cast<double>(table.horizons[h]),
                                             -exponent / 2.0);
    if (table.phat(h) > bound + 3.0 * table.phat_stderr(h)) envelope_ok = false;
  }
  rep.checks.push_back({"envelope", envelope_ok, envelope_scale});

  if (!ratio) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "prediction indistinguishable from zero";
  } else if (rep.ratio_stderr > p.ratio_tol) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "ratio uncertainty alone exceeds the tolerance";
  } else {
    rep.verdict = (slope_ok && ratio_ok && envelope_ok) ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

// -----------------------------------------------------------------------------

VerifierReport verify_weak_limit(const Context& ctx, const WeakLimitParams& p) {
  VerifierReport rep;
  rep.name = "weak-limit";
  rep.tolerance = p.max_dev_tol;
  const spectral::SpectralData& sd = *ctx.sd;
  double H0 = ctx.consts->H0;
  int d = ctx.cone->dim();

  walk::BatchRequest req;
  req.region = ctx.cone.get();
  req.steps = ctx.steps;
  req.start = p.x;
  req.horizons = p.horizons;
  req.paths = p.paths;
  req.master_seed = ctx.master_seed;
  req.purpose = walk::purpose::kWalk;
  req.block_size = ctx.block_size;
  req.reservoir_capacity = 0;
  walk::HistSpec hs;
  hs.lo = p.hist_lo;
  hs.bin_width = p.hist_width;
  hs.bins = p.hist_bins;
  req.hist = hs;
  walk::SurvivalTable table = walk::survival_batch(req, ctx.workers);

  // predicted conditional masses per scaled bin (same for every horizon)
  int64_t nbins = hs.total_bins();
  std::vector<double> predicted(nbins, 0.0);
  auto density = [&](std::span<const double> y) {
    return H0 * sd.u(y) * std::exp(-0.5 * norm2(y));
  };
  for (int64_t b = 0; b < nbins; ++b) {
    Vec lo(d), hi(d);
    int64_t rem = b;
    for (int i = 0; i < d; ++i) {
      int idx = static_cast<int>(rem % hs.bins[i]);
      rem /= hs.bins[i];
      lo[i] = hs.lo[i] + idx * hs.bin_width;
      hi[i] = lo[i] + hs.bin_width;
    }
    predicted[b] = box_quadrature(geometry::Box(lo, hi), density, 8);
  }

  rep.rows.columns = {"horizon", "tv", "tv_stderr", "max_rel_dev", "bins_compared",
                      "survivors"};
  std::vector<stats::HistComparison> cmps;
  for (size_t h = 0; h < table.horizons.size(); ++h) {
    int64_t survivors = table.at[h].survivors;
    auto cmp = stats::histogram_compare(table.at[h].hist_counts, std::max<int64_t>(survivors, 1),
                                        predicted, p.min_bin_hits);
    cmps.push_back(cmp);
    rep.rows.rows.push_back({static_cast<double>(table.horizons[h]), cmp.tv_estimate,
                             cmp.tv_stderr, cmp.max_rel_dev,
                             static_cast<double>(cmp.bins_compared),
                             static_cast<double>(survivors)});
  }

  size_t top = table.horizons.size() - 1;
  // per-bin detail at the decision horizon
  rep.bins.columns.assign({"bin_center"});
  for (int i = 1; i < d; ++i) rep.bins.columns.push_back("bin_center" + std::to_string(i + 1));
  rep.bins.columns.push_back("observed");
  rep.bins.columns.push_back("predicted");
  rep.bins.columns.push_back("hits");
  {
    double survivors = std::max<double>(1.0, static_cast<double>(table.at[top].survivors));
    for (int64_t b = 0; b < nbins; ++b) {
      Vec row;
      int64_t rem = b;
      for (int i = 0; i < d; ++i) {
        int idx = static_cast<int>(rem % hs.bins[i]);
        rem /= hs.bins[i];
        row.push_back(hs.lo[i] + (idx + 0.5) * hs.bin_width);
      }
      row.push_back(table.at[top].hist_counts[b] / survivors);
      row.push_back(predicted[b]);
      row.push_back(static_cast<double>(table.at[top].hist_counts[b]));
      rep.bins.rows.push_back(std::move(row));
    }
  }
  if (table.at[top].survivors < p.min_survivors) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "too few survivors at the decision horizon";
    return rep;
  }
  bool dev_ok = cmps[top].max_rel_dev <= p.max_dev_tol && cmps[top].bins_compared > 0;
  rep.checks.push_back({"max_rel_dev", dev_ok, cmps[top].max_rel_dev});
  rep.estimated = cmps[top].max_rel_dev;
  rep.predicted = 0.0;
  rep.ratio = cmps[top].max_rel_dev;
  rep.ratio_stderr = 0.0;

  bool trend_ok = true;
  for (size_t h = 0; h + 1 < cmps.size(); ++h) {
    double slack = 3.0 * (cmps[h].tv_stderr + cmps[h + 1].tv_stderr);
    if (cmps[h + 1].tv_estimate > cmps[h].tv_estimate + slack) trend_ok = false;
  }
  if (cmps.size() >= 2) rep.checks.push_back({"tv_decreasing", trend_ok, cmps[top].tv_estimate});

  rep.verdict = (dev_ok && trend_ok) ? Verdict::pass : Verdict::fail;
  return rep;
}

// -----------------------------------------------------------------------------

VerifierReport verify_stone_llt(const Context& ctx, const LltParams& p) {
  VerifierReport rep;
  rep.name = "llt";
  rep.tolerance = p.tol;
  if (auto refusal = aperiodicity_guard(*ctx.steps)) {
    rep.verdict = Verdict::refused;
    rep.note = *refusal;
    return rep;
  }
  const spectral::SpectralData& sd = *ctx.sd;
  int d = ctx.cone->dim();
  double exponent = sd.p() / 2.0 + d / 2.0;

  // per-horizon box centered at c*sqrt(n)
  std::vector<std::vector<geometry::Box>> boxes(p.horizons.size());
  for (size_t h = 0; h < p.horizons.size(); ++h) {
    double root = std::sqrt(static_cast<double>(p.horizons[h]));
    Vec lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      lo[i] = p.box_center_scale[i] * root - p.box_side / 2.0;
      hi[i] = lo[i] + p.box_side;
    }
    boxes[h].push_back(box_around(lo, hi));
  }

  walk::BatchRequest req;
  req.region = ctx.cone.get();
  req.steps = ctx.steps;
  req.start = p.x;
  req.horizons = p.horizons;
  req.paths = p.paths;
  req.master_seed = ctx.master_seed;
  req.purpose = walk::purpose::kWalk;
  req.block_size = ctx.block_size;
  req.reservoir_capacity = 0;
  req.target_boxes = boxes;
  walk::SurvivalTable table = walk::survival_batch(req, ctx.workers);

  harmonic::VOptions vo = p.v_opt;
  vo.workers = ctx.workers;
  harmonic::VEstimate v = harmonic::estimate_v(p.x, ctx.steps, ctx.cone, sd, vo,
                                               mix64(ctx.master_seed ^ 0x7645535441ull));
  double kappa0 = ctx.consts->kappa0.value;
  double kappa0_se = ctx.consts->kappa0.stderr_;
  double H0 = ctx.consts->H0;

  rep.rows.columns = {"horizon", "hits", "phat", "stderr", "predicted", "ratio",
                      "ratio_stderr", "decided"};
  bool any_decided = false, all_ok = true;
  for (size_t h = 0; h < p.horizons.size(); ++h) {
    double n = static_cast<double>(p.horizons[h]);
    auto integrand = [&](std::span<const double> y) {
      double buf[kMaxDim];
      for (int i = 0; i < d; ++i) buf[i] = y[i] / std::sqrt(n);
      return sd.u(std::span<const double>(buf, d)) * std::exp(-norm2(y) / (2.0 * n));
    };
    double integral = box_quadrature(boxes[h][0], integrand, 16);
    stats::Estimate pred{
        kappa0 * H0 * v.value * integral / std::pow(n, exponent),
        H0 * integral / std::pow(n, exponent) *
            std::sqrt(pow_int(kappa0_se * v.value, 2) + pow_int(kappa0 * v.stderr_, 2))};
    int64_t hits = table.at[h].box_hits[0];
    stats::Estimate est{table.box_phat(h, 0), table.box_stderr(h, 0)};
    auto ratio = stats::ratio_with_ci(est, pred);
    bool decided = hits >= p.min_hits && ratio.has_value() && ratio->stderr_ <= p.tol;
    double rv = ratio ? ratio->value : 0.0;
    double rs = ratio ? ratio->stderr_ : 0.0;
    if (decided) {
      any_decided = true;
      if (std::fabs(rv - 1.0) > p.tol + 3.0 * rs) all_ok = false;
      rep.estimated = est.value;
      rep.est_stderr = est.stderr_;
      rep.predicted = pred.value;
      rep.ratio = rv;
      rep.ratio_stderr = rs;
    }
    rep.rows.rows.push_back({n, static_cast<double>(hits), est.value, est.stderr_, pred.value,
                             rv, rs, decided ? 1.0 : 0.0});
  }
  if (!any_decided) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "no box reached the hit-count threshold";
  } else {
    rep.verdict = all_ok ? Verdict::pass : Verdict::fail;
  }
  rep.checks.push_back({"ratio", rep.verdict == Verdict::pass, rep.ratio});
  return rep;
}

// -----------------------------------------------------------------------------

VerifierReport verify_return_prob(const Context& ctx, const ReturnParams& p) {
  VerifierReport rep;
  rep.name = "return";
  rep.tolerance = p.tol;
  if (auto refusal = aperiodicity_guard(*ctx.steps)) {
    rep.verdict = Verdict::refused;
    rep.note = *refusal;
    return rep;
  }
  const spectral::SpectralData& sd = *ctx.sd;
  int d = ctx.cone->dim();
  double exponent = sd.p() + d / 2.0;

  std::vector<std::vector<geometry::Box>> boxes(p.horizons.size());
  for (auto& bl : boxes) bl.push_back(p.target);

  walk::BatchRequest req;
  req.region = ctx.cone.get();
  req.steps = ctx.steps;
  req.start = p.x;
  req.horizons = p.horizons;
  req.paths = p.paths;
  req.master_seed = ctx.master_seed;
  req.purpose = walk::purpose::kWalk;
  req.block_size = ctx.block_size;
  req.reservoir_capacity = 0;
  req.target_boxes = boxes;
  walk::SurvivalTable table = walk::survival_batch(req, ctx.workers);

  harmonic::VOptions vo = p.v_opt;
  vo.workers = ctx.workers;
  harmonic::VEstimate v = harmonic::estimate_v(p.x, ctx.steps, ctx.cone, sd, vo,
                                               mix64(ctx.master_seed ^ 0x7645535441ull));

  // quadrature of the reversed harmonic over the target box: midpoint cells,
  // one estimate per cell
  int cells = p.vtilde_grid;
  int64_t total_cells = 1;
  for (int i = 0; i < d; ++i) total_cells *= cells;
  double cell_vol = p.target.volume() / static_cast<double>(total_cells);
  double vt_sum = 0.0, vt_var = 0.0;
  harmonic::VOptions vt_opt = p.v_opt;
  vt_opt.workers = ctx.workers;
  vt_opt.purpose = walk::purpose::kReverse;
  for (int64_t cidx = 0; cidx < total_cells; ++cidx) {
    Vec y(d);
    int64_t rem = cidx;
    for (int i = 0; i < d; ++i) {
      int k = static_cast<int>(rem % cells);
      rem /= cells;
      y[i] = p.target.lo[i] + (k + 0.5) * (p.target.hi[i] - p.target.lo[i]) / cells;
    }
    harmonic::VEstimate vt = harmonic::estimate_v_tilde(
        y, ctx.steps, ctx.cone, sd, vt_opt, mix64(ctx.master_seed ^ (0xabcd01ull + cidx)));
    vt_sum += vt.value * cell_vol;
    vt_var += pow_int(vt.stderr_ * cell_vol, 2);
  }
  stats::Estimate vtilde_integral{vt_sum, std::sqrt(vt_var)};

  double kappa1_se = 0.0;
  double kappa1 = ctx.consts->kappa1;
  kappa1_se = ctx.consts->kappa1_stderr;

  rep.rows.columns = {"horizon", "hits", "phat", "stderr", "predicted", "ratio",
                      "ratio_stderr", "envelope_ok"};
  // prediction and envelope per horizon; the decision row is the largest
  // horizon with enough hits
  int decision = -1;
  bool envelope_ok = true;
  double xn = norm(p.x);
  double envelope_scale =
      p.envelope_c * (1.0 + std::pow(xn, sd.p())) * vtilde_integral.value;
  std::vector<stats::Estimate> ratios(p.horizons.size());
  std::vector<bool> usable(p.horizons.size(), false);
  for (size_t h = 0; h < p.horizons.size(); ++h) {
    double n = static_cast<double>(p.horizons[h]);
    int64_t hits = table.at[h].box_hits[0];
    stats::Estimate est{table.box_phat(h, 0), table.box_stderr(h, 0)};
    stats::Estimate pred{
        kappa1 * v.value * vtilde_integral.value / std::pow(n, exponent),
        std::pow(n, -exponent) *
            std::sqrt(pow_int(kappa1_se * v.value * vtilde_integral.value, 2) +
                      pow_int(kappa1 * v.stderr_ * vtilde_integral.value, 2) +
                      pow_int(kappa1 * v.value * vtilde_integral.stderr_, 2))};
    auto ratio = stats::ratio_with_ci(est, pred);
    bool env = est.value * std::pow(n, exponent) <=
               envelope_scale + 3.0 * est.stderr_ * std::pow(n, exponent);
    if (!env) envelope_ok = false;
    double rv = ratio ? ratio->value : 0.0;
    double rs = ratio ? ratio->stderr_ : 0.0;
    if (hits >= p.min_hits && ratio) {
      usable[h] = true;
      ratios[h] = *ratio;
      decision = static_cast<int>(h);
    }
    rep.rows.rows.push_back({n, static_cast<double>(hits), est.value, est.stderr_, pred.value,
                             rv, rs, env ? 1.0 : 0.0});
  }
  rep.checks.push_back({"envelope", envelope_ok, envelope_scale});
  if (decision < 0) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "no horizon reached the hit-count threshold";
    return rep;
  }
  double n_dec = static_cast<double>(p.horizons[decision]);
  rep.estimated = table.box_phat(decision, 0) * std::pow(n_dec, exponent);
  rep.est_stderr = table.box_stderr(decision, 0) * std::pow(n_dec, exponent);
  rep.predicted = kappa1 * v.value * vtilde_integral.value;
  rep.ratio = ratios[decision].value;
  rep.ratio_stderr = ratios[decision].stderr_;
  if (rep.ratio_stderr > p.tol) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "ratio uncertainty alone exceeds the tolerance";
    return rep;
  }
  bool ratio_ok = std::fabs(rep.ratio - 1.0) <= p.tol + 3.0 * rep.ratio_stderr;
  rep.checks.push_back({"ratio", ratio_ok, rep.ratio});
  rep.note = "decision horizon n=" + std::to_string(p.horizons[decision]);
  rep.verdict = (ratio_ok && envelope_ok) ? Verdict::pass : Verdict::fail;
  return rep;
}

// -----------------------------------------------------------------------------

namespace {

// exact probability of (stay in region for n steps, endpoint in box) for a
// finite-support law, by enumeration over atom sequences
double enumerate_exact(const geometry::Region& region, const geometry::Box& box,
                       const std::vector<steps::Atom>& atoms, const Vec& start, bool reversed,
                       int64_t n) {
  struct Node {
    Vec pos;
    double w;
  };
  std::vector<Node> layer{{start, 1.0}};
  for (int64_t s = 0; s < n; ++s) {
    std::vector<Node> next;
    next.reserve(layer.size() * atoms.size());
    for (const Node& nd : layer) {
      for (const auto& a : atoms) {
        Vec y = nd.pos;
        for (size_t i = 0; i < y.size(); ++i) y[i] += reversed ? -a.x[i] : a.x[i];
        if (!region.contains(y)) continue;
        next.push_back({std::move(y), nd.w * a.w});
      }
    }
    layer = std::move(next);
  }
  double p = 0.0;
  for (const Node& nd : layer)
    if (box.contains(nd.pos)) p += nd.w;
  return p;
}

struct SideEstimate {
  double p = 0.0;
  double se = 0.0;
  bool exact = false;
};

SideEstimate side_probability(const Context& ctx, const geometry::Region& region,
                              const geometry::Box& box, const Vec& start, bool reversed,
                              int64_t horizon, int64_t paths, int64_t enum_budget,
                              uint64_t purpose) {
  SideEstimate out;
  const auto* atoms = ctx.steps->atoms();
  if (atoms) {
    double states = 1.0;
    for (int64_t s = 0; s < horizon && states < 2.0 * enum_budget; ++s)
      states *= static_cast<double>(atoms->size());
    if (states <= enum_budget) {
      out.p = enumerate_exact(region, box, *atoms, start, reversed, horizon);
      out.exact = true;
      return out;
    }
  }
  walk::BatchRequest req;
  req.region = &region;
  req.steps = ctx.steps;
  req.start = start;
  req.reversed = reversed;
  req.horizons = {horizon};
  req.paths = paths;
  req.master_seed = ctx.master_seed;
  req.purpose = purpose;
  req.block_size = ctx.block_size;
  req.reservoir_capacity = 0;
  req.target_boxes = {{box}};
  walk::SurvivalTable t = walk::survival_batch(req, ctx.workers);
  out.p = t.box_phat(0, 0);
  out.se = t.box_stderr(0, 0);
  return out;
}

}  // namespace

VerifierReport verify_duality(const Context& ctx, const DualityParams& p) {
  VerifierReport rep;
  rep.name = "duality";
  rep.tolerance = 0.0;
  int d = ctx.cone->dim();
  double dl = p.delta, dt = p.delta_tilde;
  if (!(dt > dl)) {
    rep.verdict = Verdict::refused;
    rep.note = "needs delta_tilde > delta";
    return rep;
  }
  geometry::ThickenedCone grown = geometry::thicken(ctx.cone, dt, -1);
  geometry::ThickenedCone shrunk = geometry::thicken(ctx.cone, dt, +1);

  rep.rows.columns = {"key", "x1", "y1", "p_left", "se_left", "p_right", "se_right",
                      "pass", "exact"};
  bool all_ok = true;
  int tuples = 0, skipped = 0;
  for (const Vec& x : p.xs) {
    for (const Vec& y : p.ys) {
      // key1: forward walk from a point of the x-box against the reversed
      // walk from y in the grown cone
      Vec z = shifted(x, dl / 2.0);
      if (ctx.cone->contains(z) && ctx.cone->contains(y)) {
        geometry::Box target(y, shifted(y, dt));
        Vec lo = shifted(x, -dt), hi = shifted(x, dl);
        geometry::Box mirror(lo, hi);
        SideEstimate L = side_probability(ctx, *ctx.cone, target, z, false, p.horizon,
                                          p.paths, p.enumeration_budget, walk::purpose::kWalk);
        SideEstimate R = side_probability(ctx, grown, mirror, y, true, p.horizon, p.paths,
                                          p.enumeration_budget, walk::purpose::kWalk);
        bool ok = L.exact && R.exact ? L.p <= R.p + 1e-12
                                     : L.p <= R.p + 3.0 * (L.se + R.se);
        all_ok = all_ok && ok;
        ++tuples;
        rep.rows.rows.push_back({1.0, x[0], y[0], L.p, L.se, R.p, R.se, ok ? 1.0 : 0.0,
                                 L.exact && R.exact ? 1.0 : 0.0});
      } else {
        ++skipped;
      }
      // key2: reversed walk from y in the shrunk cone against the forward
      // walk from x; requires y in the shrunk cone
      if (shrunk.contains(y) && ctx.cone->contains(x)) {
        Vec lo = shifted(x, -(dt - dl));
        geometry::Box mirror(lo, x);
        geometry::Box target(y, shifted(y, dt));
        SideEstimate L = side_probability(ctx, shrunk, mirror, y, true, p.horizon, p.paths,
                                          p.enumeration_budget, walk::purpose::kReverse);
        SideEstimate R = side_probability(ctx, *ctx.cone, target, x, false, p.horizon,
                                          p.paths, p.enumeration_budget, walk::purpose::kReverse);
        bool ok = L.exact && R.exact ? L.p <= R.p + 1e-12
                                     : L.p <= R.p + 3.0 * (L.se + R.se);
        all_ok = all_ok && ok;
        ++tuples;
        rep.rows.rows.push_back({2.0, x[0], y[0], L.p, L.se, R.p, R.se, ok ? 1.0 : 0.0,
                                 L.exact && R.exact ? 1.0 : 0.0});
      } else {
        ++skipped;
      }
    }
  }
  rep.checks.push_back({"tuples", true, static_cast<double>(tuples)});
  rep.checks.push_back({"skipped", true, static_cast<double>(skipped)});
  if (tuples == 0) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "no tuple satisfied the preconditions";
  } else {
    rep.verdict = all_ok ? Verdict::pass : Verdict::fail;
  }
  (void)d;
  return rep;
}

// -----------------------------------------------------------------------------

VerifierReport check_gaussian_bounds(const Context& ctx, const BoundsParams& p) {
  VerifierReport rep;
  rep.name = "bounds";
  rep.tolerance = p.slope_tol;
  int d = ctx.cone->dim();
  const spectral::SpectralData& sd = *ctx.sd;
  geometry::AllSpace all(d);

  // per horizon: start at x_dir*sqrt(n); boxes at the start (t=0) and at
  // distances t*sqrt(n) for each configured t
  rep.rows.columns = {"horizon", "t", "free_scaled", "free_se", "killed_scaled",
                      "exited_scaled", "conditioned_scaled"};
  std::vector<double> ns, ca, cb_t, cb_val, cc_t, cc_val, c1;
  struct PerN {
    double n;
    std::vector<double> free_scaled, exited_scaled;
  };
  std::vector<PerN> data;
  for (int64_t n : p.horizons) {
    double root = std::sqrt(static_cast<double>(n));
    Vec start(d);
    for (int i = 0; i < d; ++i) start[i] = p.x_dir[i] * root;
    std::vector<geometry::Box> boxes;
    std::vector<double> ts;
    for (double t : p.t_values) {
      Vec lo(d);
      // offset along the interior direction, scaled to distance t*sqrt(n)
      for (int i = 0; i < d; ++i)
        lo[i] = start[i] + t * root / std::sqrt(static_cast<double>(d)) - p.delta / 2.0;
      boxes.push_back(geometry::cube_at(lo, p.delta));
      ts.push_back(t);
    }
    {
      Vec lo(d);
      for (int i = 0; i < d; ++i) lo[i] = start[i] - p.delta / 2.0;
      boxes.push_back(geometry::cube_at(lo, p.delta));  // box at the start itself
      ts.push_back(0.0);
    }

    walk::BatchRequest free_req;
    free_req.region = &all;
    free_req.steps = ctx.steps;
    free_req.start = start;
    free_req.horizons = {n};
    free_req.paths = p.paths;
    free_req.master_seed = ctx.master_seed;
    free_req.purpose = walk::purpose::kBounds;
    free_req.block_size = ctx.block_size;
    free_req.reservoir_capacity = 0;
    free_req.target_boxes = {boxes};
    walk::SurvivalTable free_table = walk::survival_batch(free_req, ctx.workers);

    walk::BatchRequest cone_req = free_req;
    cone_req.region = ctx.cone.get();
    walk::SurvivalTable cone_table = walk::survival_batch(cone_req, ctx.workers);

    // the killed-walk box bound carries a start-dependent constant, so it is
    // checked from the fixed direction point, not the scaled start
    walk::BatchRequest fixed_req = free_req;
    fixed_req.region = ctx.cone.get();
    fixed_req.start = p.x_dir;
    walk::SurvivalTable fixed_table = walk::survival_batch(fixed_req, ctx.workers);

    double scale = std::pow(static_cast<double>(n), d / 2.0);
    double scale1 = std::pow(static_cast<double>(n), sd.p() / 2.0 + d / 2.0);
    PerN pn;
    pn.n = static_cast<double>(n);
    for (size_t b = 0; b < boxes.size(); ++b) {
      double pf = free_table.box_phat(0, b);
      double se = free_table.box_stderr(0, b);
      double pk = fixed_table.box_phat(0, b);
      // exited: landed in the box after leaving the cone at some earlier step
      double pe = std::max(pf - cone_table.box_phat(0, b), 0.0);
      rep.rows.rows.push_back({pn.n, ts[b], pf * scale, se * scale, pk * scale1, pe * scale,
                               pe * scale});
      pn.free_scaled.push_back(pf * scale);
      pn.exited_scaled.push_back(pe * scale);
      if (ts[b] > 0.0) {
        cb_t.push_back(ts[b]);
        cb_val.push_back(pf * scale);
        cc_t.push_back(ts[b]);
        cc_val.push_back(pe * scale);
      }
      c1.push_back(pk * scale1);
    }
    ns.push_back(pn.n);
    double cmax = 0.0;
    for (double v : pn.free_scaled) cmax = std::max(cmax, v);
    ca.push_back(cmax);
    data.push_back(std::move(pn));
  }

  // (a) scaled free-walk box mass stays bounded: slope of log sup vs log n
  bool a_ok = true;
  {
    std::vector<stats::LogLogPoint> pts;
    for (size_t i = 0; i < ns.size(); ++i)
      if (ca[i] > 0.0) pts.push_back({ns[i], ca[i], ca[i] * 0.05});
    if (pts.size() >= 2) {
      auto fit = stats::loglog_fit(pts);
      a_ok = std::fabs(fit.slope.value) <= p.slope_tol + 3.0 * fit.slope.stderr_;
      rep.checks.push_back({"free_bounded_slope", a_ok, fit.slope.value});
    }
  }
  // (b) gaussian off-center decay: fit log(val) = log C - c t^2 and require c > 0
  bool b_ok = true;
  {
    std::vector<double> xs, ys, ses;
    for (size_t i = 0; i < cb_t.size(); ++i) {
      if (cb_val[i] <= 0.0) continue;
      xs.push_back(cb_t[i] * cb_t[i]);
      ys.push_back(std::log(cb_val[i]));
      ses.push_back(0.2);
    }
    if (xs.size() >= 2) {
      auto fit = stats::weighted_linear_fit(xs, ys, ses);
      b_ok = fit.slope.value < 0.0;
      rep.checks.push_back({"offcenter_decay_rate", b_ok, -fit.slope.value});
    }
  }
  // (c) same decay for paths that exited the cone first (deep starts/targets)
  bool c_ok = true;
  {
    std::vector<double> xs, ys, ses;
    for (size_t i = 0; i < cc_t.size(); ++i) {
      if (cc_val[i] <= 0.0) continue;
      xs.push_back(cc_t[i] * cc_t[i]);
      ys.push_back(std::log(cc_val[i]));
      ses.push_back(0.3);
    }
    if (xs.size() >= 3) {
      auto fit = stats::weighted_linear_fit(xs, ys, ses);
      c_ok = fit.slope.value < 0.0;
      rep.checks.push_back({"exited_decay_rate", c_ok, -fit.slope.value});
    }
  }
  // (estimate1) killed-walk box mass at the n^{p/2+d/2} scale stays bounded
  bool e1_ok = true;
  {
    double cmax = 0.0;
    for (double v : c1) cmax = std::max(cmax, v);
    rep.checks.push_back({"killed_scaled_max", true, cmax});
    std::vector<stats::LogLogPoint> pts;
    for (size_t i = 0; i < data.size(); ++i) {
      double m = 0.0;
      for (size_t b = 0; b < data[i].free_scaled.size(); ++b) m = std::max(m, c1[i * data[i].free_scaled.size() + b]);
      if (m > 0.0) pts.push_back({data[i].n, m, m * 0.1});
    }
    if (pts.size() >= 2) {
      auto fit = stats::loglog_fit(pts);
      e1_ok = fit.slope.value <= p.slope_tol + 3.0 * fit.slope.stderr_;
      rep.checks.push_back({"killed_bounded_slope", e1_ok, fit.slope.value});
    }
  }
  rep.verdict = (a_ok && b_ok && c_ok && e1_ok) ? Verdict::pass : Verdict::fail;
  return rep;
}

}  // namespace conewalk::theorems
