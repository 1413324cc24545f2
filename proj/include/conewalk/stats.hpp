#pragma once

#include <optional>
#include <vector>

#include "conewalk/common.hpp"

namespace conewalk::stats {

struct CI {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
  double level = 0.95;
  const char* method = "";
};

// Wilson score interval; never leaves [0,1].
CI wilson_ci(int64_t successes, int64_t trials, double level = 0.95);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct FitResult {
  Estimate slope;
  Estimate intercept;
  int points_used = 0;
  int points_dropped = 0;
};

struct LogLogPoint {
  double n = 0.0;
  double p = 0.0;
  double se = 0.0;
};

// Weighted least squares of log(p) on log(n); weights from the delta method
// (se of log p is se/p). Points with p <= 0 are dropped and counted.
FitResult loglog_fit(const std::vector<LogLogPoint>& pts);

// Straight weighted least squares y = a + b*x with given stderr per y.
FitResult weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& se);

// Delta-method ratio a/b; empty when b is statistically indistinguishable
// from zero (|b| <= 3 se_b).
std::optional<Estimate> ratio_with_ci(const Estimate& a, const Estimate& b);

struct HistComparison {
  double max_rel_dev = 0.0;      // over bins with at least min_hits observations
  double tv_estimate = 0.0;      // half L1 distance including unbinned tails
  double tv_stderr = 0.0;
  int bins_compared = 0;
};

// observed: counts per bin out of `total`; predicted: masses per bin (sum <= 1).
HistComparison histogram_compare(const std::vector<int64_t>& observed, int64_t total,
                                 const std::vector<double>& predicted,
                                 int64_t min_hits = 500);

inline double binom_stderr(int64_t successes, int64_t trials) {
  double p = static_cast<double>(successes) / static_cast<double>(trials);
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
}

}  // namespace conewalk::stats
