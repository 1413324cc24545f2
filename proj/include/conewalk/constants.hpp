#pragma once

#include "conewalk/spectral.hpp"
#include "conewalk/walk.hpp"

namespace conewalk::constants {

struct QuadratureSpec {
  double tol = 1e-8;
  int max_depth = 40;
};

struct IntegralResult {
  double value = 0.0;
  double error_bound = 0.0;
};

// integral over the cone of u(y)^power * exp(-|y|^2/2): radial part in closed
// form (a Gamma integral), angular part by adaptive quadrature on the cap for
// d <= 3 and by the exact Gamma-function form above that.
IntegralResult gaussian_cone_integral(const spectral::SpectralData& sd, int power,
                                      const QuadratureSpec& quad = {});

// exact angular moment of the cap eigenfunction; the quadrature's cross-check
double angular_moment_closed_form(const spectral::SpectralData& sd, int power);

struct Kappa0 {
  double value = 0.0;
  double stderr_ = 0.0;
  bool closed_form = false;
  bool universality_ok = true;  // fit route: estimates from two starts agree
  // per-start fit results for diagnostics
  struct StartFit {
    Vec x;
    double value;
    double stderr_;
  };
  std::vector<StartFit> fits;
};

struct BrownianBudget {
  int64_t paths = 20000;
  std::vector<double> t_grid{16.0, 32.0, 64.0};
  double interior_scale = 4.0;  // starts placed at scale * interior direction
  int workers = 1;
};

// Tail constant of the Brownian exit time: closed form for flat-boundary
// cones, otherwise a weighted fit of t^{p/2} * phat / u(x) against 1/t over a
// geometric t-grid, cross-checked between two interior starts.
Kappa0 kappa0(const spectral::SpectralData& sd, const BrownianBudget& budget,
              uint64_t master_seed);

struct ConstantSet {
  double p = 0.0;
  double lambda1 = 0.0;
  IntegralResult u_integral;   // power 1
  IntegralResult u2_integral;  // power 2
  double H0 = 0.0;             // 1 / u_integral
  Kappa0 kappa0;
  double kappa1 = 0.0;
  double kappa1_stderr = 0.0;
};

ConstantSet compute_constants(const spectral::SpectralData& sd, const BrownianBudget& budget,
                              uint64_t master_seed, const QuadratureSpec& quad = {});

// kappa1 = kappa0^2 * H0^2 * u2_integral with the error propagated from kappa0
double kappa1_from(const ConstantSet& c, double* stderr_out = nullptr);

}  // namespace conewalk::constants
