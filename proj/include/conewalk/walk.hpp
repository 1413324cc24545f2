#pragma once

#include <array>
#include <functional>
#include <optional>

#include "conewalk/geometry.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/steps.hpp"

namespace conewalk::walk {

// Fixed stream namespaces so different estimators never share randomness.
namespace purpose {
inline constexpr uint64_t kWalk = 1;
inline constexpr uint64_t kBrownian = 2;
inline constexpr uint64_t kVEstimate = 3;
inline constexpr uint64_t kVInner = 4;
inline constexpr uint64_t kVOuter = 5;
inline constexpr uint64_t kReverse = 6;
inline constexpr uint64_t kBounds = 7;
}  // namespace purpose

struct ExitRecord {
  int64_t exit_time = 0;  // first step outside the region; n_max+1 when censored
  bool censored = false;
  Vec endpoint;                     // position at exit time - 1 (last inside), or at n_max
  std::vector<uint8_t> survived;    // one flag per requested horizon
  std::vector<Vec> horizon_points;  // position at each surviving horizon
};

// Single-path simulation. Steps are drawn from `stream`; the walk is killed on
// the first step landing outside `region`.
ExitRecord simulate_exit(std::span<const double> start, const steps::StepDistribution& dist,
                         const geometry::Region& region, std::span<const int64_t> horizons,
                         rng::Stream& stream, bool reversed = false);

// Same contract with the increments negated; the region may be a shifted cone.
inline ExitRecord simulate_reverse_exit(std::span<const double> start,
                                        const steps::StepDistribution& dist,
                                        const geometry::Region& region,
                                        std::span<const int64_t> horizons,
                                        rng::Stream& stream) {
  return simulate_exit(start, dist, region, horizons, stream, true);
}

// Scaled histogram request: endpoint/sqrt(horizon) is binned on a regular grid.
struct HistSpec {
  Vec lo;
  double bin_width = 0.0;
  std::vector<int> bins;  // per dimension
  int64_t total_bins() const {
    int64_t t = 1;
    for (int b : bins) t *= b;
    return t;
  }
};

struct BatchRequest {
  const geometry::Region* region = nullptr;
  steps::StepsPtr steps;
  Vec start;
  bool reversed = false;
  std::vector<int64_t> horizons;  // strictly increasing
  int64_t paths = 0;
  uint64_t master_seed = 0;
  uint64_t purpose = purpose::kWalk;
  int64_t block_size = 8192;
  int64_t reservoir_capacity = 20000;
  // per-horizon target boxes; empty, or one list per horizon
  std::vector<std::vector<geometry::Box>> target_boxes;
  std::optional<HistSpec> hist;
  // accumulated at surviving horizons, e.g. the cone harmonic
  std::function<double(std::span<const double>)> functional;
};

struct EndpointSample {
  uint64_t priority;
  int64_t path;
  std::array<double, kMaxDim> x;
};

struct HorizonStats {
  int64_t survivors = 0;
  double func_sum = 0.0;     // sum of functional over survivors (dead paths add 0)
  double func_sum_sq = 0.0;
  std::vector<int64_t> box_hits;
  std::vector<int64_t> hist_counts;
  std::vector<EndpointSample> sample;  // kept sorted by (priority desc, path asc)
};

struct SurvivalTable {
  std::vector<int64_t> horizons;
  int64_t total_paths = 0;
  std::vector<HorizonStats> at;

  double phat(size_t h) const {
    return static_cast<double>(at[h].survivors) / static_cast<double>(total_paths);
  }
  double phat_stderr(size_t h) const;
  // mean and stderr of the functional taken over all paths (dead contribute 0)
  double func_mean(size_t h) const { return at[h].func_sum / static_cast<double>(total_paths); }
  double func_stderr(size_t h) const;
  double box_phat(size_t h, size_t b) const {
    return static_cast<double>(at[h].box_hits[b]) / static_cast<double>(total_paths);
  }
  double box_stderr(size_t h, size_t b) const;
};

// Embarrassingly parallel over fixed-size path blocks; partial tables merge in
// block order, so results are bit-identical for any worker count.
// workers <= 1 runs the serial reference.
SurvivalTable survival_batch(const BatchRequest& req, int workers = 1);

// Exposed for the benchmark: same kernel, forced serial / OpenMP.
SurvivalTable survival_batch_serial(const BatchRequest& req);
SurvivalTable survival_batch_parallel(const BatchRequest& req, int workers);

struct BrownianTail {
  double phat = 0.0;
  double stderr_ = 0.0;
  double bias_bound = 0.0;  // reported discretization bias bound
  double dt = 0.0;
  int64_t paths = 0;
};

// Euler scheme with exact Gaussian increments; flat-boundary cones get an
// exact bridge-crossing correction, wedges rely on dt being small and report
// the bias bound.
BrownianTail brownian_exit_tail(std::span<const double> start, const geometry::Cone& cone,
                                double t_horizon, int64_t paths, double dt,
                                uint64_t master_seed, int workers = 1,
                                uint64_t purpose = purpose::kBrownian);

}  // namespace conewalk::walk
