#include <doctest.h>

#include <cmath>

#include "conewalk/spectral.hpp"
#include "conewalk/walk.hpp"
#include "oracles.hpp"

using namespace conewalk;
using namespace conewalk::walk;

namespace {

steps::StepsPtr pm1_law() {
  return steps::make_atoms({{{1.0}, 0.5}, {{-1.0}, 0.5}});
}

BatchRequest base_request(const geometry::Region* region, steps::StepsPtr s, Vec start,
                          std::vector<int64_t> horizons, int64_t paths, uint64_t seed) {
  BatchRequest req;
  req.region = region;
  req.steps = std::move(s);
  req.start = std::move(start);
  req.horizons = std::move(horizons);
  req.paths = paths;
  req.master_seed = seed;
  req.reservoir_capacity = 256;
  return req;
}

bool tables_equal(const SurvivalTable& a, const SurvivalTable& b) {
  if (a.total_paths != b.total_paths || a.horizons != b.horizons) return false;
  for (size_t h = 0; h < a.at.size(); ++h) {
    const auto& x = a.at[h];
    const auto& y = b.at[h];
    if (x.survivors != y.survivors) return false;
    if (x.func_sum != y.func_sum || x.func_sum_sq != y.func_sum_sq) return false;
    if (x.box_hits != y.box_hits || x.hist_counts != y.hist_counts) return false;
    if (x.sample.size() != y.sample.size()) return false;
    for (size_t i = 0; i < x.sample.size(); ++i)
      if (x.sample[i].priority != y.sample[i].priority ||
          x.sample[i].path != y.sample[i].path || x.sample[i].x != y.sample[i].x)
        return false;
  }
  return true;
}

}  // namespace

TEST_CASE("one-step survival on the half line is exactly one half") {
  auto hl = geometry::make_half_line();
  auto dp = oracles::halfline_survival_dp({{1.0, 0.5}, {-1.0, 0.5}}, 1, 3);
  CHECK(dp[0] == doctest::Approx(0.5));
  CHECK(dp[1] == doctest::Approx(0.5));
  CHECK(dp[2] == doctest::Approx(0.375));

  auto table = survival_batch(
      base_request(hl.get(), pm1_law(), {1.0}, {1, 2, 3}, 100000, 11), 1);
  for (int h = 0; h < 3; ++h)
    CHECK(std::fabs(table.phat(h) - dp[h]) < 3.0 * table.phat_stderr(h));
}

TEST_CASE("survival against the exact lattice oracle out to n = 30") {
  auto hl = geometry::make_half_line();
  auto dp = oracles::halfline_survival_dp({{1.0, 0.5}, {-1.0, 0.5}}, 1, 30);
  std::vector<int64_t> horizons;
  for (int64_t n : {5, 10, 20, 30}) horizons.push_back(n);
  auto table = survival_batch(
      base_request(hl.get(), pm1_law(), {1.0}, horizons, 1000000, 17), 1);
  for (size_t h = 0; h < horizons.size(); ++h) {
    double expect = dp[horizons[h] - 1];
    CHECK(std::fabs(table.phat(h) - expect) < 4.0 * table.phat_stderr(h));
  }
}

TEST_CASE("planar lattice oracle: survival and endpoint boxes") {
  auto orthant = geometry::make_orthant(2);
  auto corner =
      steps::make_atoms({{{2.0, -1.0}, 0.25}, {{0.0, -1.0}, 0.25}, {{-1.0, 1.0}, 0.5}});
  auto contains = [](const std::vector<int64_t>& q) { return q[0] > 0 && q[1] > 0; };
  auto dp = oracles::lattice_walk_dp({{{2, -1}, 0.25}, {{0, -1}, 0.25}, {{-1, 1}, 0.5}},
                                     {3, 3}, 12, contains);
  // box [1,4]^2 mass at n = 12 from the DP endpoint table
  double box_mass = 0.0;
  for (const auto& [pos, w] : dp.endpoint_mass)
    if (pos[0] >= 1 && pos[0] <= 4 && pos[1] >= 1 && pos[1] <= 4) box_mass += w;

  auto req = base_request(orthant.get(), corner, {3.0, 3.0}, {6, 12}, 1000000, 23);
  req.target_boxes = {{geometry::Box(Vec{0.5, 0.5}, Vec{4.5, 4.5})},
                      {geometry::Box(Vec{0.5, 0.5}, Vec{4.5, 4.5})}};
  auto table = survival_batch(req, 1);
  CHECK(std::fabs(table.phat(0) - dp.survival[5]) < 4.0 * table.phat_stderr(0));
  CHECK(std::fabs(table.phat(1) - dp.survival[11]) < 4.0 * table.phat_stderr(1));
  CHECK(std::fabs(table.box_phat(1, 0) - box_mass) < 4.0 * table.box_stderr(1, 0));
}

TEST_CASE("deep gaussian start: counts decrease and one-step survival is near one") {
  auto orthant = geometry::make_orthant(2);
  auto table = survival_batch(
      base_request(orthant.get(), steps::make_gaussian(2), {5.0, 5.0}, {1, 2, 4, 8}, 200000,
                   5),
      1);
  for (size_t h = 1; h < table.at.size(); ++h)
    CHECK(table.at[h].survivors <= table.at[h - 1].survivors);
  CHECK(table.phat(0) > 0.9);
  CHECK(table.phat(0) < 1.0);
}

TEST_CASE("batch results are identical for any worker count") {
  auto orthant = geometry::make_orthant(2);
  auto req = base_request(orthant.get(), steps::make_gaussian(2), {2.0, 2.0},
                          {4, 16, 64, 256}, 120000, 31);
  req.block_size = 4096;
  req.target_boxes.assign(4, {geometry::Box(Vec{0.5, 0.5}, Vec{3.5, 3.5})});
  HistSpec hs;
  hs.lo = {0.0, 0.0};
  hs.bin_width = 0.5;
  hs.bins = {8, 8};
  req.hist = hs;
  spectral::SpectralData sd = spectral::spectral_data(orthant);
  req.functional = [&sd](std::span<const double> p) { return sd.u(p); };

  auto serial = survival_batch_serial(req);
  auto two = survival_batch_parallel(req, 2);
  auto seven = survival_batch_parallel(req, 7);
  CHECK(tables_equal(serial, two));
  CHECK(tables_equal(serial, seven));

  auto serial_again = survival_batch_serial(req);
  CHECK(tables_equal(serial, serial_again));
}

TEST_CASE("reversed walk with a symmetric law matches the forward walk") {
  auto hl = geometry::make_half_line();
  auto fwd = base_request(hl.get(), steps::make_gaussian(1), {3.0}, {4, 16, 64}, 200000, 41);
  auto rev = fwd;
  rev.reversed = true;
  rev.purpose = purpose::kReverse;
  auto tf = survival_batch(fwd, 1);
  auto tr = survival_batch(rev, 1);
  for (size_t h = 0; h < tf.at.size(); ++h) {
    double se = tf.phat_stderr(h) + tr.phat_stderr(h);
    CHECK(std::fabs(tf.phat(h) - tr.phat(h)) < 3.0 * se);
  }
}

TEST_CASE("pathwise domination: reversed walk survives longer in the grown cone") {
  auto orthant = geometry::make_orthant(2);
  auto corner =
      steps::make_atoms({{{2.0, -1.0}, 0.25}, {{0.0, -1.0}, 0.25}, {{-1.0, 1.0}, 0.5}});
  geometry::ThickenedCone grown = geometry::thicken(orthant, 0.5, -1);
  auto in_cone = base_request(orthant.get(), corner, {3.0, 3.0}, {2, 4, 8, 16}, 200000, 43);
  in_cone.reversed = true;
  auto in_grown = in_cone;
  in_grown.region = &grown;
  auto tc = survival_batch(in_cone, 1);
  auto tg = survival_batch(in_grown, 1);
  // same seeds couple the paths, so domination holds count by count
  for (size_t h = 0; h < tc.at.size(); ++h)
    CHECK(tc.at[h].survivors <= tg.at[h].survivors);
}

TEST_CASE("free-walk box hits match the exact gaussian law") {
  geometry::AllSpace all(2);
  Vec x{1.0, -2.0};
  Vec lo{2.0, 0.0}, hi{5.0, 4.0};
  auto req = base_request(&all, steps::make_gaussian(2), x, {9}, 400000, 47);
  req.target_boxes = {{geometry::Box(lo, hi)}};
  auto table = survival_batch(req, 1);
  double expect = oracles::gaussian_box_probability(x, 9.0, lo, hi);
  CHECK(std::fabs(table.box_phat(0, 0) - expect) < 4.0 * table.box_stderr(0, 0));
}

TEST_CASE("simulate_exit contract") {
  auto hl = geometry::make_half_line();
  auto pm = pm1_law();
  rng::Stream s(3, 0, 99);
  std::vector<int64_t> horizons{1, 2, 4};
  ExitRecord rec = simulate_exit(Vec{1.0}, *pm, *hl, horizons, s);
  CHECK(rec.exit_time >= 1);
  if (!rec.censored) CHECK(rec.exit_time <= 5);
  CHECK(rec.survived.size() == 3);
  CHECK_THROWS_AS(simulate_exit(Vec{-1.0}, *pm, *hl, horizons, s), precondition_error);

  // reservoir holds at most the capacity, ordered by priority
  auto req = base_request(hl.get(), pm, {5.0}, {4}, 50000, 53);
  req.reservoir_capacity = 100;
  auto table = survival_batch(req, 1);
  CHECK(table.at[0].sample.size() == 100);
  for (size_t i = 1; i < table.at[0].sample.size(); ++i)
    CHECK(table.at[0].sample[i - 1].priority >= table.at[0].sample[i].priority);
}

TEST_CASE("brownian exit tail against the reflection principle") {
  auto hl = geometry::make_half_line();
  BrownianTail t1 = brownian_exit_tail(Vec{1.0}, *hl, 1.0, 200000, 1e-3, 61);
  double expect = oracles::halfline_bm_survival(1.0, 1.0);
  CHECK(expect == doctest::Approx(0.6826894921370859));
  CHECK(std::fabs(t1.phat - expect) < 3.0 * t1.stderr_);
  CHECK(t1.bias_bound == 0.0);  // bridge-corrected, exact in law

  BrownianTail t4 = brownian_exit_tail(Vec{4.0}, *hl, 1.0, 200000, 1e-3, 67);
  CHECK(std::fabs(t4.phat - oracles::halfline_bm_survival(4.0, 1.0)) <
        3.0 * t4.stderr_ + 1e-4);

  // brownian scaling: (x, t) and (c x, c^2 t) agree
  BrownianTail a = brownian_exit_tail(Vec{1.0}, *hl, 1.0, 200000, 1e-3, 71);
  BrownianTail b = brownian_exit_tail(Vec{2.0}, *hl, 4.0, 200000, 4e-3, 73);
  CHECK(std::fabs(a.phat - b.phat) < 3.0 * (a.stderr_ + b.stderr_));

  CHECK_THROWS_AS(brownian_exit_tail(Vec{1.0}, *hl, 1.0, 1000, 0.1, 3), precondition_error);
  CHECK_THROWS_AS(brownian_exit_tail(Vec{-1.0}, *hl, 1.0, 1000, 1e-4, 3),
                  precondition_error);
}

TEST_CASE("brownian orthant tail matches the product of reflections") {
  auto o2 = geometry::make_orthant(2);
  // coordinates are independent: survival = product of half-line survivals
  BrownianTail t = brownian_exit_tail(Vec{1.0, 2.0}, *o2, 1.0, 200000, 1e-3, 79);
  double expect = oracles::halfline_bm_survival(1.0, 1.0) *
                  oracles::halfline_bm_survival(2.0, 1.0);
  CHECK(std::fabs(t.phat - expect) < 3.5 * t.stderr_);
  CHECK(t.bias_bound == 0.0);

  // plain Euler in the wedge carries a reported bias bound
  auto wedge = geometry::make_wedge(1.2);
  BrownianTail w = brownian_exit_tail(Vec{1.0, 1.0}, *wedge, 1.0, 2000, 1e-4, 83);
  CHECK(w.bias_bound > 0.0);
}

TEST_CASE("reverse-exit wrapper negates increments") {
  auto hl = geometry::make_half_line();
  auto drift_up = steps::make_atoms({{{1.0}, 0.75}, {{-1.0}, 0.25}});
  std::vector<int64_t> horizons{8};
  int fwd_alive = 0, rev_alive = 0;
  for (int i = 0; i < 4000; ++i) {
    rng::Stream sf(9, 0, i), sr(9, 0, i);
    if (simulate_exit(Vec{2.0}, *drift_up, *hl, horizons, sf).survived[0]) ++fwd_alive;
    if (simulate_reverse_exit(Vec{2.0}, *drift_up, *hl, horizons, sr).survived[0])
      ++rev_alive;
  }
  // the reversed walk drifts down, so it dies far more often
  CHECK(fwd_alive > 3 * rev_alive);
}

TEST_CASE("scaled histogram peaks where the limit density does") {
  auto hl = geometry::make_half_line();
  auto req = base_request(hl.get(), steps::make_gaussian(1), {2.0}, {1024}, 400000, 59);
  HistSpec hs;
  hs.lo = {0.0};
  hs.bin_width = 0.25;
  hs.bins = {16};
  req.hist = hs;
  auto table = survival_batch(req, 1);
  const auto& counts = table.at[0].hist_counts;
  size_t argmax = 0;
  for (size_t b = 1; b < counts.size(); ++b)
    if (counts[b] > counts[argmax]) argmax = b;
  // the conditioned endpoint density is proportional to y exp(-y^2/2) in the
  // scaled coordinate, peaking at one
  double center = hs.lo[0] + (argmax + 0.5) * hs.bin_width;
  CHECK(std::fabs(center - 1.0) <= hs.bin_width);
  int64_t total = 0;
  for (int64_t c : counts) total += c;
  CHECK(total <= table.at[0].survivors);
}

TEST_CASE("kernel symmetry: swapping start box and target box for symmetric laws") {
  // paths reversed in time have the same law when the steps are symmetric,
  // so the box-to-box killed mass is symmetric in the two boxes
  auto hl = geometry::make_half_line();
  auto g = steps::make_gaussian(1);
  geometry::Box box_a(Vec{1.5}, Vec{2.0});
  geometry::Box box_b(Vec{2.5}, Vec{3.0});
  auto fwd = base_request(hl.get(), g, {1.75}, {64}, 400000, 83);
  fwd.target_boxes = {{box_b}};
  auto rev = base_request(hl.get(), g, {2.75}, {64}, 400000, 89);
  rev.target_boxes = {{box_a}};
  auto tf = survival_batch(fwd, 1);
  auto tr = survival_batch(rev, 1);
  double se = tf.box_stderr(0, 0) + tr.box_stderr(0, 0);
  CHECK(std::fabs(tf.box_phat(0, 0) - tr.box_phat(0, 0)) < 3.0 * se + 2e-4);
}
