#pragma once

#include <map>

#include "conewalk/spectral.hpp"
#include "conewalk/walk.hpp"

namespace conewalk::harmonic {

// Monte Carlo estimate of the killed-walk harmonic function at one point,
// with the full horizon curve kept for stabilization diagnostics.
struct VEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int64_t horizon = 0;
  bool stabilized = false;
  struct CurvePoint {
    int64_t n;
    double value;
    double stderr_;
  };
  std::vector<CurvePoint> curve;
};

struct VOptions {
  std::vector<int64_t> horizons{64, 256, 1024};
  int64_t paths = 200000;
  int workers = 1;
  uint64_t purpose = walk::purpose::kVEstimate;
  int64_t block_size = 8192;
};

VEstimate estimate_v(std::span<const double> x, const steps::StepsPtr& dist,
                     const geometry::ConePtr& cone, const spectral::SpectralData& sd,
                     const VOptions& opt, uint64_t master_seed);

// Same estimator for the reversed walk (increments negated).
VEstimate estimate_v_tilde(std::span<const double> y, const steps::StepsPtr& dist,
                           const geometry::ConePtr& cone, const spectral::SpectralData& sd,
                           const VOptions& opt, uint64_t master_seed);

struct ResidualOptions {
  int64_t outer_paths = 4000;
  int64_t inner_paths = 4000;
  int64_t inner_horizon = 256;
  bool use_cache = false;
  double cache_resolution = 0.01;
  int workers = 1;
};

struct HarmonicityResidual {
  double residual = 0.0;
  double stderr_ = 0.0;        // combined: base estimate + one-step average
  double v_value = 0.0;        // estimate at horizon inner_horizon + 1
  double one_step_mean = 0.0;  // mean over first-step survivors of the inner estimates
  int64_t cache_hits = 0;
  int64_t cache_entries = 0;
};

// One-step mean against the estimate one horizon later; the two target the
// same quantity exactly, so the residual is pure noise for a harmonic V.
HarmonicityResidual harmonicity_residual(std::span<const double> x, const steps::StepsPtr& dist,
                                         const geometry::ConePtr& cone,
                                         const spectral::SpectralData& sd,
                                         const ResidualOptions& opt, uint64_t master_seed);

enum class HalfLineConvention {
  closed,  // renewal mass counted on [0, x]
  strict,  // renewal mass counted on [0, x)
};

struct RenewalResult {
  double value = 0.0;
  double truncation_error = 0.0;  // bound on the dropped series tail
  double ladder_deficit = 0.0;    // path mass not yet ascended at the depth cap
  int terms = 0;
  std::vector<std::pair<double, double>> ladder_atoms;  // (height, mass)
};

struct RenewalOptions {
  int depth = 2000;            // enumeration depth for the ladder law
  double mass_tol = 1e-10;     // stop when un-ascended mass drops below this
  int max_terms = 200000;      // cap on renewal series terms
  HalfLineConvention convention = HalfLineConvention::closed;
};

// Ladder-height renewal series for a centered 1-d law with finite support.
// The ladder law is enumerated exactly over killed paths, renormalized by the
// captured mass, and the renewal sum is truncated at x.
RenewalResult renewal_v_1d(const steps::StepDistribution& mu, double x,
                           const RenewalOptions& opt = {});

}  // namespace conewalk::harmonic
