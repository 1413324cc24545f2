// Throughput comparison of the serial reference kernel against the OpenMP
// kernel, and a check that both produce the same table.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "conewalk/harmonic.hpp"
#include "conewalk/walk.hpp"

using namespace conewalk;

namespace {

double seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int64_t paths = argc > 1 ? std::atoll(argv[1]) : 400000;
  int workers = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();

  geometry::ConePtr cone = geometry::make_orthant(2);
  steps::StepsPtr gauss = steps::make_gaussian(2);

  walk::BatchRequest req;
  req.region = cone.get();
  req.steps = gauss;
  req.start = {3.0, 3.0};
  req.horizons = {16, 64, 256, 1024};
  req.paths = paths;
  req.master_seed = 7;
  req.reservoir_capacity = 0;

  walk::SurvivalTable serial, parallel;
  double ts = seconds([&] { serial = walk::survival_batch_serial(req); });
  double tp = seconds([&] { parallel = walk::survival_batch_parallel(req, workers); });

  bool same = serial.total_paths == parallel.total_paths;
  for (size_t h = 0; h < serial.at.size() && same; ++h)
    same = serial.at[h].survivors == parallel.at[h].survivors &&
           serial.at[h].func_sum == parallel.at[h].func_sum;

  std::printf("survival_batch  paths=%lld  horizons=%zu\n",
              static_cast<long long>(paths), req.horizons.size());
  std::printf("  serial          %8.3f s   %10.0f paths/s\n", ts, paths / ts);
  std::printf("  openmp (%2d thr) %8.3f s   %10.0f paths/s   speedup %.2fx\n", workers, tp,
              paths / tp, ts / tp);
  std::printf("  tables identical: %s\n", same ? "yes" : "NO");

  spectral::SpectralData sd = spectral::spectral_data(cone);
  harmonic::VOptions vo;
  vo.paths = paths / 2;
  vo.horizons = {64, 256, 1024};
  double tv_serial = seconds([&] {
    vo.workers = 1;
    (void)harmonic::estimate_v(req.start, gauss, cone, sd, vo, 11);
  });
  double tv_par = seconds([&] {
    vo.workers = workers;
    (void)harmonic::estimate_v(req.start, gauss, cone, sd, vo, 11);
  });
  std::printf("estimate_v      paths=%lld\n", static_cast<long long>(vo.paths));
  std::printf("  serial          %8.3f s\n", tv_serial);
  std::printf("  openmp (%2d thr) %8.3f s   speedup %.2fx\n", workers, tv_par,
              tv_serial / tv_par);
  return same ? 0 : 1;
}
