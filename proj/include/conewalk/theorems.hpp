#pragma once

#include "conewalk/constants.hpp"
#include "conewalk/harmonic.hpp"

namespace conewalk::theorems {

enum class Verdict { pass, fail, inconclusive, refused };
const char* verdict_name(Verdict v);

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<Vec> rows;
};

struct VerifierReport {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  double predicted = 0.0;
  double estimated = 0.0;
  double est_stderr = 0.0;
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  double tolerance = 0.0;
  std::vector<Check> checks;
  Table rows;
  Table bins;  // per-bin detail when the verifier histograms endpoints
  std::string note;
};

// Shared inputs: whitened steps, the cone they live in, spectral data and
// constants where the verifier needs a prediction.
struct Context {
  geometry::ConePtr cone;
  steps::StepsPtr steps;
  const spectral::SpectralData* sd = nullptr;
  const constants::ConstantSet* consts = nullptr;
  uint64_t master_seed = 1;
  int workers = 1;
  int64_t block_size = 8192;
};

struct TailParams {
  Vec x;
  std::vector<int64_t> horizons;
  int64_t paths = 1000000;
  double slope_tol = 0.1;
  double ratio_tol = 0.15;
  double envelope_k = 2.0;  // pinned constant of the tail upper bound
  int64_t min_survivors = 200;
  harmonic::VOptions v_opt;
};
VerifierReport verify_tail(const Context& ctx, const TailParams& p);

struct WeakLimitParams {
  Vec x;
  std::vector<int64_t> horizons;  // trend schedule; last entry is the decision horizon
  int64_t paths = 1000000;
  Vec hist_lo;
  double hist_width = 0.25;
  std::vector<int> hist_bins;
  int64_t min_bin_hits = 500;
  int64_t min_survivors = 10000;
  double max_dev_tol = 0.2;
};
VerifierReport verify_weak_limit(const Context& ctx, const WeakLimitParams& p);

struct LltParams {
  Vec x;
  Vec box_center_scale;  // box center at c * sqrt(n)
  double box_side = 1.0;
  std::vector<int64_t> horizons;
  int64_t paths = 1000000;
  double tol = 0.2;
  int64_t min_hits = 300;
  harmonic::VOptions v_opt;
};
VerifierReport verify_stone_llt(const Context& ctx, const LltParams& p);

struct ReturnParams {
  Vec x;
  geometry::Box target;  // fixed box near the origin region of the cone
  std::vector<int64_t> horizons;
  int64_t paths = 10000000;
  double tol = 0.25;
  double envelope_c = 1.5;  // pinned constant of the upper bound
  int64_t min_hits = 100;
  int vtilde_grid = 8;  // quadrature cells per dimension for the reversed harmonic
  harmonic::VOptions v_opt;
};
VerifierReport verify_return_prob(const Context& ctx, const ReturnParams& p);

struct DualityParams {
  std::vector<Vec> xs;
  std::vector<Vec> ys;
  double delta = 0.25;
  double delta_tilde = 0.5;
  int64_t horizon = 64;
  int64_t paths = 1000000;
  int64_t enumeration_budget = 2000000;  // switch to exact enumeration when feasible
};
VerifierReport verify_duality(const Context& ctx, const DualityParams& p);

struct BoundsParams {
  Vec x_dir;  // starts scale with sqrt(n): x_n = x_dir * sqrt(n)
  double delta = 1.0;
  std::vector<int64_t> horizons;
  int64_t paths = 200000;
  std::vector<double> t_values{0.5, 1.0, 2.0};
  double slope_tol = 0.15;
};
VerifierReport check_gaussian_bounds(const Context& ctx, const BoundsParams& p);

// Shared helpers --------------------------------------------------------------

// tensor Simpson quadrature of f over the box, `panels` intervals per axis
double box_quadrature(const geometry::Box& box,
                      const std::function<double(std::span<const double>)>& f, int panels = 16);

// refuses laws that cannot satisfy the aperiodicity assumption; returns an
// explanatory note when refused
std::optional<std::string> aperiodicity_guard(const steps::StepDistribution& dist);

}  // namespace conewalk::theorems
