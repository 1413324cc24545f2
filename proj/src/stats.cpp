#include "conewalk/stats.hpp"

#include <cmath>

namespace conewalk::stats {

CI wilson_ci(int64_t successes, int64_t trials, double level) {
  if (trials < 1) throw argument_error("wilson_ci: trials must be >= 1");
  if (successes < 0 || successes > trials)
    throw argument_error("wilson_ci: successes out of range");
  double z = normal_quantile(0.5 + level / 2.0);
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  CI ci;
  ci.point = phat;
  ci.low = std::max(0.0, center - half);
  ci.high = std::min(1.0, center + half);
  ci.level = level;
  ci.method = "wilson";
  return ci;
}

FitResult weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& se) {
  if (x.size() != y.size() || x.size() != se.size() || x.size() < 2)
    throw argument_error("weighted_linear_fit: need >= 2 points");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double s = se[i] > 0.0 ? se[i] : 1e-12;
    double w = 1.0 / (s * s);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  double det = sw * swxx - swx * swx;
  if (!(std::fabs(det) > 0.0)) throw argument_error("weighted_linear_fit: degenerate x");
  FitResult r;
  r.slope.value = (sw * swxy - swx * swy) / det;
  r.intercept.value = (swxx * swy - swx * swxy) / det;
  r.slope.stderr_ = std::sqrt(sw / det);
  r.intercept.stderr_ = std::sqrt(swxx / det);
  r.points_used = static_cast<int>(x.size());
  return r;
}

FitResult loglog_fit(const std::vector<LogLogPoint>& pts) {
  std::vector<double> x, y, se;
  int dropped = 0;
  for (const auto& pt : pts) {
    if (!(pt.p > 0.0)) {
      ++dropped;
      continue;
    }
    x.push_back(std::log(pt.n));
    y.push_back(std::log(pt.p));
    se.push_back(pt.se > 0.0 ? pt.se / pt.p : 1e-12);
  }
  if (x.size() < 2) throw argument_error("loglog_fit: need >= 2 usable points");
  FitResult r = weighted_linear_fit(x, y, se);
  r.points_dropped = dropped;
  return r;
}

std::optional<Estimate> ratio_with_ci(const Estimate& a, const Estimate& b) {
  if (!(std::fabs(b.value) > 3.0 * b.stderr_)) return std::nullopt;
  Estimate r;
  r.value = a.value / b.value;
  double ra = a.value != 0.0 ? a.stderr_ / a.value : 0.0;
  double rb = b.stderr_ / b.value;
  r.stderr_ = std::fabs(r.value) == 0.0
                  ? a.stderr_ / std::fabs(b.value)
                  : std::fabs(r.value) * std::sqrt(ra * ra + rb * rb);
  return r;
}

HistComparison histogram_compare(const std::vector<int64_t>& observed, int64_t total,
                                 const std::vector<double>& predicted, int64_t min_hits) {
  if (observed.size() != predicted.size())
    throw argument_error("histogram_compare: size mismatch");
  double psum = 0.0;
  for (double q : predicted) psum += q;
  if (psum > 1.0 + 1e-9)
    throw argument_error("histogram_compare: predicted masses exceed 1");
  HistComparison out;
  double l1 = 0.0, var = 0.0;
  double obs_sum = 0.0;
  double n = static_cast<double>(total);
  for (size_t i = 0; i < observed.size(); ++i) {
    double phat = observed[i] / n;
    obs_sum += phat;
    l1 += std::fabs(phat - predicted[i]);
    var += phat * (1.0 - phat) / n;
    if (observed[i] >= min_hits && predicted[i] > 0.0) {
      out.max_rel_dev = std::max(out.max_rel_dev, std::fabs(phat / predicted[i] - 1.0));
      ++out.bins_compared;
    }
  }
  l1 += std::fabs((1.0 - obs_sum) - (1.0 - psum));
  out.tv_estimate = 0.5 * l1;
  out.tv_stderr = 0.5 * std::sqrt(var);
  return out;
}

}  // namespace conewalk::stats
