#include <doctest.h>

#include <cmath>

#include "conewalk/theorems.hpp"
#include "oracles.hpp"

using namespace conewalk;
using namespace conewalk::theorems;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Fixture {
  geometry::ConePtr cone;
  steps::StepsPtr steps;
  spectral::SpectralData sd;
  constants::ConstantSet consts;
  Context ctx;

  Fixture(geometry::ConePtr c, steps::StepsPtr s, uint64_t seed = 101)
      : cone(std::move(c)), steps(std::move(s)), sd(spectral::spectral_data(cone)) {
    constants::BrownianBudget budget;
    budget.paths = 20000;
    consts = constants::compute_constants(sd, budget, seed);
    ctx.cone = cone;
    ctx.steps = steps;
    ctx.sd = &sd;
    ctx.consts = &consts;
    ctx.master_seed = seed;
    ctx.workers = 1;
  }
};

}  // namespace

TEST_CASE("box quadrature on polynomials and gaussians") {
  geometry::Box unit(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  double xy = box_quadrature(unit, [](std::span<const double> y) { return y[0] * y[1]; });
  CHECK(xy == doctest::Approx(0.25).epsilon(1e-12));
  geometry::Box wide(Vec{-8.0}, Vec{8.0});
  double mass = box_quadrature(
      wide, [](std::span<const double> y) {
        return std::exp(-0.5 * y[0] * y[0]) / std::sqrt(2.0 * kPi);
      },
      64);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("aperiodicity guard") {
  auto pm = steps::make_atoms({{{1.0}, 0.5}, {{-1.0}, 0.5}});
  pm->declare_lattice({0, {{1.0}}});
  CHECK(aperiodicity_guard(*pm).has_value());

  auto lazy = steps::make_atoms({{{0.0}, 0.5}, {{1.0}, 0.25}, {{-1.0}, 0.25}});
  lazy->declare_lattice({0, {{1.0}}});
  CHECK_FALSE(aperiodicity_guard(*lazy).has_value());

  auto undeclared = steps::make_atoms({{{0.0}, 0.5}, {{1.0}, 0.25}, {{-1.0}, 0.25}});
  CHECK(aperiodicity_guard(*undeclared).has_value());

  CHECK_FALSE(aperiodicity_guard(*steps::make_gaussian(2)).has_value());
}

TEST_CASE("tail verifier on the half line") {
  Fixture f(geometry::make_half_line(), steps::make_gaussian(1));
  TailParams p;
  p.x = {2.0};
  p.horizons = {64, 128, 256, 512, 1024};
  p.paths = 300000;
  p.slope_tol = 0.1;
  p.ratio_tol = 0.15;
  p.v_opt.horizons = {64, 256, 1024};
  p.v_opt.paths = 150000;
  VerifierReport rep = verify_tail(f.ctx, p);
  CHECK(rep.verdict == Verdict::pass);
  REQUIRE(rep.checks.size() >= 3);
  CHECK(std::fabs(rep.checks[0].value + 0.5) < 0.1);  // fitted slope near -1/2
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.12));
  CHECK(rep.rows.rows.size() == p.horizons.size());
}

TEST_CASE("tail verifier goes inconclusive without survivors") {
  Fixture f(geometry::make_half_line(), steps::make_gaussian(1));
  TailParams p;
  p.x = {0.05};
  p.horizons = {4096, 8192};
  p.paths = 2000;
  p.v_opt.paths = 2000;
  VerifierReport rep = verify_tail(f.ctx, p);
  CHECK(rep.verdict == Verdict::inconclusive);
}

TEST_CASE("weak limit verifier on the half line") {
  Fixture f(geometry::make_half_line(), steps::make_gaussian(1));
  WeakLimitParams p;
  p.x = {2.0};
  p.horizons = {64, 256, 1024};
  p.paths = 400000;
  p.hist_lo = {0.0};
  p.hist_width = 0.25;
  p.hist_bins = {16};
  p.min_survivors = 5000;
  VerifierReport rep = verify_weak_limit(f.ctx, p);
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.estimated <= 0.2);
  // the scaled mode of the limit density sits near one
  double best_tv = rep.rows.rows.back()[1];
  CHECK(best_tv < 0.1);
}

TEST_CASE("llt verifier refuses periodic laws") {
  auto pm = steps::make_atoms({{{1.0}, 0.5}, {{-1.0}, 0.5}});
  pm->declare_lattice({0, {{1.0}}});
  Fixture f(geometry::make_half_line(), pm);
  LltParams p;
  p.x = {2.0};
  p.horizons = {256};
  p.paths = 1000;
  VerifierReport rep = verify_stone_llt(f.ctx, p);
  CHECK(rep.verdict == Verdict::refused);
}

TEST_CASE("llt verifier on the half line") {
  Fixture f(geometry::make_half_line(), steps::make_gaussian(1));
  LltParams p;
  p.x = {2.0};
  p.box_center_scale = {1.0};
  p.box_side = 2.0;
  p.horizons = {1024};
  p.paths = 400000;
  p.tol = 0.2;
  p.v_opt.horizons = {64, 256, 1024};
  p.v_opt.paths = 200000;
  VerifierReport rep = verify_stone_llt(f.ctx, p);
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.2));

  // a box far outside the bulk is reported inconclusive, not failed
  LltParams far = p;
  far.box_center_scale = {6.0};  // exp(-18) tail
  far.paths = 50000;
  VerifierReport deep = verify_stone_llt(f.ctx, far);
  CHECK(deep.verdict == Verdict::inconclusive);
}

TEST_CASE("return verifier on the half line") {
  Fixture f(geometry::make_half_line(), steps::make_gaussian(1));
  ReturnParams p;
  p.x = {1.0};
  p.target = geometry::Box(Vec{1.0}, Vec{2.0});
  p.horizons = {100, 200};
  p.paths = 1000000;
  p.tol = 0.25;
  p.vtilde_grid = 6;
  p.v_opt.horizons = {64, 256};
  p.v_opt.paths = 100000;
  VerifierReport rep = verify_return_prob(f.ctx, p);
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.note.find("200") != std::string::npos);  // largest feasible horizon
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("duality: exact one-step enumeration and a small monte carlo run") {
  auto corner =
      steps::make_atoms({{{2.0, -1.0}, 0.25}, {{0.0, -1.0}, 0.25}, {{-1.0, 1.0}, 0.5}});
  corner->declare_lattice({0, {{1.0, 0.0}, {0.0, 1.0}}});
  Fixture f(geometry::make_orthant(2), corner);
  DualityParams p;
  p.xs = {{2.0, 2.0}};
  p.ys = {{1.5, 1.5}};
  p.delta = 0.5;
  p.delta_tilde = 1.0;
  p.horizon = 2;
  VerifierReport rep = verify_duality(f.ctx, p);
  CHECK(rep.verdict == Verdict::pass);
  for (const Vec& row : rep.rows.rows) CHECK(row.back() == 1.0);  // exact mode

  Fixture g(geometry::make_orthant(2), steps::make_gaussian(2));
  DualityParams mc;
  mc.xs = {{2.0, 2.0}};
  mc.ys = {{3.0, 3.0}};
  mc.delta = 0.25;
  mc.delta_tilde = 0.5;
  mc.horizon = 16;
  mc.paths = 200000;
  VerifierReport mcr = verify_duality(g.ctx, mc);
  CHECK(mcr.verdict == Verdict::pass);

  DualityParams bad = mc;
  bad.delta_tilde = 0.2;  // must exceed delta
  CHECK(verify_duality(g.ctx, bad).verdict == Verdict::refused);
}

TEST_CASE("gaussian bound checks") {
  Fixture f(geometry::make_half_line(), steps::make_gaussian(1));
  BoundsParams p;
  p.x_dir = {1.0};
  p.horizons = {16, 64, 256};
  p.paths = 150000;
  VerifierReport rep = check_gaussian_bounds(f.ctx, p);
  CHECK(rep.verdict == Verdict::pass);
  REQUIRE(!rep.checks.empty());
}

TEST_CASE("prediction pipeline is invariant under eigenfunction rescaling") {
  auto cone = geometry::make_half_line();
  auto g = steps::make_gaussian(1);
  auto s1 = spectral::spectral_data(cone, 1.0);
  auto s2 = spectral::spectral_data(cone, 2.0);
  constants::BrownianBudget budget;
  auto c1 = constants::compute_constants(s1, budget, 3);
  auto c2 = constants::compute_constants(s2, budget, 3);
  harmonic::VOptions vo;
  vo.horizons = {64, 256};
  vo.paths = 50000;
  auto v1 = harmonic::estimate_v(Vec{2.0}, g, cone, s1, vo, 77);
  auto v2 = harmonic::estimate_v(Vec{2.0}, g, cone, s2, vo, 77);
  // same seeds: the estimate is exactly linear in the scale
  CHECK(v2.value == doctest::Approx(2.0 * v1.value).epsilon(1e-12));
  // tail prediction kappa0 * V
  CHECK(c2.kappa0.value * v2.value ==
        doctest::Approx(c1.kappa0.value * v1.value).epsilon(1e-9));
  // llt prediction kappa0 * H0 * V * integral(u)
  geometry::Box box(Vec{30.0}, Vec{34.0});
  auto integrand = [&](const spectral::SpectralData& sd) {
    return box_quadrature(box, [&](std::span<const double> y) {
      double b = y[0] / 32.0;
      return sd.u(std::span<const double>(&b, 1)) * std::exp(-norm2(y) / 2048.0);
    });
  };
  double pred1 = c1.kappa0.value * c1.H0 * v1.value * integrand(s1);
  double pred2 = c2.kappa0.value * c2.H0 * v2.value * integrand(s2);
  CHECK(pred2 == doctest::Approx(pred1).epsilon(1e-9));
}
