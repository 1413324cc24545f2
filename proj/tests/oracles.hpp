// Test-only oracles, independent of the library's Monte Carlo machinery:
// exact dynamic programming for lattice walks, reflection-principle values
// for Brownian motion, and Gamma-function forms of the cone integrals.
#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "conewalk/common.hpp"

namespace oracles {

using conewalk::Vec;

struct Atom1D {
  double x;
  double w;
};

// Exact survival probabilities P(tau > n) for a 1-d lattice walk on the open
// half-line, by convolving the sub-probability mass function over states.
// Atoms must be integers; start is a positive integer.
inline std::vector<double> halfline_survival_dp(const std::vector<Atom1D>& atoms,
                                                int64_t start, int64_t n_max) {
  std::map<int64_t, double> mass{{start, 1.0}};
  std::vector<double> out;
  for (int64_t n = 1; n <= n_max; ++n) {
    std::map<int64_t, double> next;
    for (const auto& [pos, w] : mass)
      for (const auto& a : atoms) {
        int64_t q = pos + llround(a.x);
        if (q > 0) next[q] += w * a.w;
      }
    mass = std::move(next);
    double total = 0.0;
    for (const auto& [pos, w] : mass) total += w;
    out.push_back(total);
  }
  return out;
}

// Exact E[u(x + S(n)); tau > n] with u(x) = x, same DP.
inline double halfline_killed_mean_dp(const std::vector<Atom1D>& atoms, int64_t start,
                                      int64_t n) {
  std::map<int64_t, double> mass{{start, 1.0}};
  for (int64_t k = 1; k <= n; ++k) {
    std::map<int64_t, double> next;
    for (const auto& [pos, w] : mass)
      for (const auto& a : atoms) {
        int64_t q = pos + llround(a.x);
        if (q > 0) next[q] += w * a.w;
      }
    mass = std::move(next);
  }
  double acc = 0.0;
  for (const auto& [pos, w] : mass) acc += w * static_cast<double>(pos);
  return acc;
}

struct AtomND {
  std::vector<int64_t> x;
  double w;
};

// Exact joint law of (tau > n, x + S(n)) for an integer lattice walk in an
// arbitrary membership region; returns survival per step and the final mass
// per endpoint.
struct LatticeDp {
  std::vector<double> survival;
  std::map<std::vector<int64_t>, double> endpoint_mass;
};

template <typename Contains>
LatticeDp lattice_walk_dp(const std::vector<AtomND>& atoms, std::vector<int64_t> start,
                          int64_t n_max, Contains contains) {
  std::map<std::vector<int64_t>, double> mass{{start, 1.0}};
  LatticeDp out;
  for (int64_t n = 1; n <= n_max; ++n) {
    std::map<std::vector<int64_t>, double> next;
    for (const auto& [pos, w] : mass)
      for (const auto& a : atoms) {
        std::vector<int64_t> q(pos.size());
        for (size_t i = 0; i < q.size(); ++i) q[i] = pos[i] + a.x[i];
        if (contains(q)) next[q] += w * a.w;
      }
    mass = std::move(next);
    double total = 0.0;
    for (const auto& [pos, w] : mass) total += w;
    out.survival.push_back(total);
  }
  out.endpoint_mass = std::move(mass);
  return out;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P(Brownian motion from x stays positive up to time t), reflection principle.
inline double halfline_bm_survival(double x, double t) {
  return 2.0 * normal_cdf(x / std::sqrt(t)) - 1.0;
}

// P(x + S(n) in [lo,hi]^d) for standard Gaussian steps: product of normal
// interval masses with variance n.
inline double gaussian_box_probability(const Vec& x, double n, const Vec& lo, const Vec& hi) {
  double p = 1.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double s = std::sqrt(n);
    p *= normal_cdf((hi[i] - x[i]) / s) - normal_cdf((lo[i] - x[i]) / s);
  }
  return p;
}

// closed-form angular pieces used to cross-check the quadrature route
inline double wedge_angular_moment(double alpha, double norm_const, int k) {
  double sink = std::sqrt(M_PI) * std::tgamma((k + 1.0) / 2.0) / std::tgamma(k / 2.0 + 1.0);
  return std::pow(norm_const, k) * (alpha / M_PI) * sink;
}

// analytic tail constant of the Brownian exit time for a cone with unit-
// normalized cap eigenfunction: 2^{-(p + d/2 - 1)} / (H0 * Gamma(p + d/2))
inline double kappa0_analytic(double p, int d, double H0) {
  return std::pow(2.0, -(p + d / 2.0 - 1.0)) / (H0 * std::tgamma(p + d / 2.0));
}

}  // namespace oracles
