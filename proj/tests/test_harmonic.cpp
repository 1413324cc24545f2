#include <doctest.h>

#include <cmath>

#include "conewalk/harmonic.hpp"
#include "oracles.hpp"

using namespace conewalk;
using namespace conewalk::harmonic;

namespace {

steps::StepsPtr pm1_law() {
  return steps::make_atoms({{{1.0}, 0.5}, {{-1.0}, 0.5}});
}

steps::StepsPtr lazy_law() {
  return steps::make_atoms({{{0.0}, 0.5}, {{1.0}, 0.25}, {{-1.0}, 0.25}});
}

// sqrt(2) atom against -1, weighted to be centered
steps::StepsPtr sqrt2_law() {
  double s = std::sqrt(2.0);
  return steps::make_atoms({{{s}, 1.0 / (s + 1.0)}, {{-1.0}, s / (s + 1.0)}});
}

}  // namespace

TEST_CASE("oracle self-check: the simple walk keeps E[u; alive] = x") {
  // with u(x) = x the killed mean is a stopped martingale that exits at 0
  for (int64_t x : {1, 3, 5})
    CHECK(oracles::halfline_killed_mean_dp({{1.0, 0.5}, {-1.0, 0.5}}, x, 1000) ==
          doctest::Approx(static_cast<double>(x)).epsilon(1e-12));
}

TEST_CASE("estimate_v matches the lattice oracle on the half line") {
  auto hl = geometry::make_half_line();
  auto sd = spectral::spectral_data(hl);
  VOptions opt;
  opt.horizons = {16, 64, 256};
  opt.paths = 400000;
  VEstimate v = estimate_v(Vec{3.0}, pm1_law(), hl, sd, opt, 7);
  double expect = oracles::halfline_killed_mean_dp({{1.0, 0.5}, {-1.0, 0.5}}, 3, 256);
  CHECK(expect == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::fabs(v.value - expect) < 3.0 * v.stderr_);
  CHECK(v.stabilized);
  CHECK(v.curve.size() == 3);
  CHECK_THROWS_AS(estimate_v(Vec{-3.0}, pm1_law(), hl, sd, opt, 7), precondition_error);
}

TEST_CASE("deep interior: the estimate approaches the cone harmonic") {
  auto o2 = geometry::make_orthant(2);
  auto sd = spectral::spectral_data(o2);
  VOptions opt;
  opt.horizons = {16, 64, 256};
  opt.paths = 50000;
  Vec x{50.0, 50.0};
  VEstimate v = estimate_v(x, steps::make_gaussian(2), o2, sd, opt, 13);
  double ratio = v.value / sd.u(x);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("reversed estimate equals the forward one for symmetric laws") {
  auto hl = geometry::make_half_line();
  auto sd = spectral::spectral_data(hl);
  VOptions opt;
  opt.horizons = {16, 64, 256};
  opt.paths = 200000;
  auto g = steps::make_gaussian(1);
  VEstimate v = estimate_v(Vec{3.0}, g, hl, sd, opt, 19);
  VEstimate vt = estimate_v_tilde(Vec{3.0}, g, hl, sd, opt, 19);
  CHECK(std::fabs(v.value - vt.value) < 3.0 * (v.stderr_ + vt.stderr_));
  CHECK_THROWS_AS(estimate_v_tilde(Vec{-1.0}, g, hl, sd, opt, 19), precondition_error);
}

TEST_CASE("harmonicity residual is pure noise for the half line") {
  auto hl = geometry::make_half_line();
  auto sd = spectral::spectral_data(hl);
  ResidualOptions opt;
  opt.outer_paths = 1500;
  opt.inner_paths = 1500;
  opt.inner_horizon = 64;
  HarmonicityResidual r = harmonicity_residual(Vec{2.0}, steps::make_gaussian(1), hl, sd,
                                               opt, 23);
  CHECK(std::fabs(r.residual) <= 3.0 * r.stderr_);
  CHECK(r.v_value > 0.0);
}

TEST_CASE("cache reuse changes the estimate by less than the noise floor") {
  auto hl = geometry::make_half_line();
  auto sd = spectral::spectral_data(hl);
  ResidualOptions opt;
  opt.outer_paths = 800;
  opt.inner_paths = 800;
  opt.inner_horizon = 32;
  HarmonicityResidual control = harmonicity_residual(Vec{2.0}, steps::make_gaussian(1), hl,
                                                     sd, opt, 29);
  opt.use_cache = true;
  HarmonicityResidual cached = harmonicity_residual(Vec{2.0}, steps::make_gaussian(1), hl,
                                                    sd, opt, 29);
  CHECK(cached.cache_entries > 0);
  CHECK(cached.cache_hits > 0);
  CHECK(std::fabs(cached.one_step_mean - control.one_step_mean) <
        4.0 * (control.stderr_ + cached.stderr_));
}

TEST_CASE("ladder renewal for the simple walk is the floor staircase") {
  auto pm = pm1_law();
  for (double x : {0.0, 0.5, 1.0, 2.0, 2.5, 7.0}) {
    RenewalResult r = renewal_v_1d(*pm, x);
    CHECK(r.value == std::floor(x) + 1.0);  // exact
    CHECK(r.ladder_atoms.size() == 1);
    CHECK(r.ladder_atoms[0].first == doctest::Approx(1.0));
    CHECK(r.ladder_atoms[0].second == 1.0);
  }
  // strict convention: integer x counts [0, x)
  RenewalOptions strict;
  strict.convention = HalfLineConvention::strict;
  CHECK(renewal_v_1d(*pm, 3.0, strict).value == doctest::Approx(3.0));
  CHECK(renewal_v_1d(*pm, 3.5, strict).value == doctest::Approx(4.0));
}

TEST_CASE("lazy law has the same ladder") {
  auto lz = lazy_law();
  RenewalResult r = renewal_v_1d(*lz, 4.0);
  CHECK(r.value == doctest::Approx(5.0));
  CHECK(r.ladder_atoms.size() == 1);
}

TEST_CASE("irrational two-atom law: ladder support and staircase output") {
  auto law = sqrt2_law();
  RenewalOptions opt;
  opt.depth = 1500;
  RenewalResult r = renewal_v_1d(*law, 2.0, opt);
  // every ladder height must be of the form p*sqrt(2) - q
  double s = std::sqrt(2.0);
  for (const auto& [h, w] : r.ladder_atoms) {
    CHECK(h > 0.0);
    CHECK(h <= s + 1e-12);
    bool representable = false;
    for (int pc = 1; pc <= 3000 && !representable; ++pc) {
      double q = std::round(pc * s - h);
      if (std::fabs(pc * s - q - h) < 1e-6) representable = true;
    }
    CHECK(representable);
  }
  // the renewal function is a step function: flat between consecutive
  // support points of the renewal measure
  // the renewal function jumps at sqrt(2)-1; later support points inside a
  // short window carry far less mass than the jump itself
  double just_below = renewal_v_1d(*law, s - 1.0 - 1e-9, opt).value;
  double just_above = renewal_v_1d(*law, s - 1.0 + 1e-9, opt).value;
  CHECK(just_above > just_below);
  double mid1 = renewal_v_1d(*law, s - 1.0 + 0.02, opt).value;
  CHECK(mid1 >= just_above - 1e-12);
  CHECK(mid1 - just_above < 0.5 * (just_above - just_below));
}

TEST_CASE("renewal output is non-decreasing in x") {
  auto lz = lazy_law();
  double prev = -1.0;
  for (double x = 0.0; x <= 6.0; x += 0.25) {
    double v = renewal_v_1d(*lz, x).value;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("renewal rejects bad input") {
  auto biased = steps::make_atoms({{{1.0}, 0.75}, {{-1.0}, 0.25}});
  CHECK_THROWS_AS(renewal_v_1d(*biased, 1.0), argument_error);
  CHECK_THROWS_AS(renewal_v_1d(*steps::make_gaussian(1), 1.0), unsupported_error);
  CHECK_THROWS_AS(renewal_v_1d(*pm1_law(), -1.0), argument_error);
}

TEST_CASE("planar product law: estimate factorizes into half-line values") {
  auto o2 = geometry::make_orthant(2);
  auto sd = spectral::spectral_data(o2);
  auto prod = steps::make_product({pm1_law(), pm1_law()});
  VOptions opt;
  opt.horizons = {64, 128, 256};
  opt.paths = 400000;
  Vec x{2.0, 3.0};
  VEstimate v = estimate_v(x, prod, o2, sd, opt, 31);
  // per-coordinate killed means are exactly the coordinates, so the limit is
  // the normalization constant times the product of strict renewal values
  RenewalOptions strict;
  strict.convention = HalfLineConvention::strict;
  double r1 = renewal_v_1d(*pm1_law(), 2.0, strict).value;
  double r2 = renewal_v_1d(*pm1_law(), 3.0, strict).value;
  double expect = sd.norm_constant() * r1 * r2;
  CHECK(std::fabs(v.value - expect) < 3.0 * v.stderr_);
}
