#include <doctest.h>

#include <cmath>
#include <random>

#include "conewalk/stats.hpp"

using namespace conewalk;
using namespace conewalk::stats;

TEST_CASE("wilson interval basics") {
  CI zero = wilson_ci(0, 100);
  CHECK(zero.low == 0.0);
  CHECK(zero.high == doctest::Approx(0.037).epsilon(0.02));

  CI half = wilson_ci(50, 100);
  CHECK(half.point == doctest::Approx(0.5));
  CHECK(half.high - 0.5 == doctest::Approx(0.5 - half.low).epsilon(1e-9));

  CI full = wilson_ci(100, 100);
  CHECK(full.high == 1.0);
  CHECK(full.low < 1.0);

  CHECK_THROWS_AS(wilson_ci(1, 0), argument_error);
  CHECK_THROWS_AS(wilson_ci(5, 3), argument_error);
}

TEST_CASE("wilson coverage calibration") {
  std::mt19937 gen(42);
  const double p = 0.37;
  const int trials = 500;
  std::binomial_distribution<int> binom(trials, p);
  int covered = 0;
  const int reps = 10000;
  for (int i = 0; i < reps; ++i) {
    CI ci = wilson_ci(binom(gen), trials);
    if (ci.low <= p && p <= ci.high) ++covered;
  }
  double rate = static_cast<double>(covered) / reps;
  CHECK(rate >= 0.94);
  CHECK(rate <= 0.96);
}

TEST_CASE("interval width shrinks like n^{-1/2}") {
  CI a = wilson_ci(100, 1000);
  CI b = wilson_ci(10000, 100000);
  double wa = a.high - a.low, wb = b.high - b.low;
  CHECK(wa / wb == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("loglog fit recovers a noiseless power law") {
  std::vector<LogLogPoint> pts;
  for (double n : {16.0, 32.0, 64.0, 128.0, 256.0})
    pts.push_back({n, 3.0 * std::pow(n, -0.5), 1e-9});
  FitResult fit = loglog_fit(pts);
  CHECK(fit.slope.value == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fit.intercept.value == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("loglog fit drops nonpositive points and reports calibrated errors") {
  std::mt19937 gen(9);
  std::normal_distribution<double> noise(0.0, 0.01);
  int within = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    std::vector<LogLogPoint> pts;
    pts.push_back({8.0, 0.0, 0.0});  // dropped
    for (double n : {16.0, 32.0, 64.0, 128.0, 256.0, 512.0}) {
      double p = 3.0 * std::pow(n, -0.5) * (1.0 + noise(gen));
      pts.push_back({n, p, 0.01 * p});
    }
    FitResult fit = loglog_fit(pts);
    CHECK(fit.points_dropped == 1);
    if (std::fabs(fit.slope.value + 0.5) <= 3.0 * fit.slope.stderr_) ++within;
  }
  CHECK(within >= reps * 95 / 100);
}

TEST_CASE("loglog fit needs two usable points") {
  CHECK_THROWS_AS(loglog_fit({{10.0, 0.1, 0.01}}), argument_error);
}

TEST_CASE("ratio with delta-method error") {
  auto r = ratio_with_ci({2.0, 0.0}, {1.0, 0.0});
  REQUIRE(r.has_value());
  CHECK(r->value == doctest::Approx(2.0));
  CHECK(r->stderr_ == doctest::Approx(0.0));

  auto q = ratio_with_ci({1.0, 0.1}, {1.0, 0.1});
  REQUIRE(q.has_value());
  CHECK(q->stderr_ == doctest::Approx(std::sqrt(0.02)).epsilon(1e-9));

  CHECK_FALSE(ratio_with_ci({1.0, 0.1}, {0.01, 0.02}).has_value());
}

TEST_CASE("histogram comparison") {
  std::vector<int64_t> obs{600, 300, 100};
  std::vector<double> pred{0.6, 0.3, 0.1};
  HistComparison cmp = histogram_compare(obs, 1000, pred, 50);
  CHECK(cmp.max_rel_dev == doctest::Approx(0.0));
  CHECK(cmp.tv_estimate == doctest::Approx(0.0));
  CHECK(cmp.bins_compared == 3);

  std::vector<int64_t> skew{700, 200, 100};
  HistComparison c2 = histogram_compare(skew, 1000, pred, 50);
  CHECK(c2.max_rel_dev == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(c2.tv_estimate == doctest::Approx(0.1).epsilon(1e-9));

  CHECK_THROWS_AS(histogram_compare(obs, 1000, {0.9, 0.9, 0.9}, 50), argument_error);
}
