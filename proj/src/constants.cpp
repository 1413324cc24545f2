#include "conewalk/constants.hpp"

#include <cmath>
#include <functional>

#include "conewalk/stats.hpp"

namespace conewalk::constants {

namespace {

constexpr double kPi = 3.14159265358979323846;

// adaptive Simpson with an absolute tolerance
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// describes which parametrization covers the cap
enum class CapKind { point, arc_2d, polar_3d };

struct CapLayout {
  CapKind kind;
  // arc: theta in (t0, t1); polar: theta in (t0, t1) x phi in (p0, p1),
  // measure sin(phi) dphi dtheta with phi the polar angle from e3
  double t0 = 0, t1 = 0, p0 = 0, p1 = 0;
};

CapLayout cap_layout(const spectral::SpectralData& sd) {
  const geometry::Cone& cone = *sd.cone();
  int d = cone.dim();
  if (d == 1) return {CapKind::point};
  if (d == 2) {
    if (const auto* w = geometry::wedge_data(cone))
      return {CapKind::arc_2d, w->theta_lo, w->theta_lo + w->alpha};
    // halfspace(2): upper half circle
    return {CapKind::arc_2d, 0.0, kPi};
  }
  if (d == 3) {
    std::string name = cone.describe();
    if (name == "orthant(3)") return {CapKind::polar_3d, 0.0, kPi / 2.0, 0.0, kPi / 2.0};
    if (name == "halfspace(3)") return {CapKind::polar_3d, 0.0, 2.0 * kPi, 0.0, kPi / 2.0};
  }
  throw unsupported_error("gaussian_cone_integral: no quadrature layout for " +
                          sd.cone()->describe());
}

}  // namespace

double angular_moment_closed_form(const spectral::SpectralData& sd, int power) {
  const geometry::Cone& cone = *sd.cone();
  int d = cone.dim();
  double c = sd.norm_constant();
  double k = static_cast<double>(power);
  std::string name = cone.describe();
  if (name == "halfline") return std::pow(sd.scale(), k);
  if (const auto* w = geometry::wedge_data(cone)) {
    // integral over the arc of sin^k: (alpha/pi) * sqrt(pi)*Gamma((k+1)/2)/Gamma(k/2+1)
    double sink = std::sqrt(kPi) * std::tgamma((k + 1.0) / 2.0) / std::tgamma(k / 2.0 + 1.0);
    return std::pow(c, k) * (w->alpha / kPi) * sink;
  }
  if (name == "halfspace(" + std::to_string(d) + ")") {
    // half of the sphere moment of |x_d|^k
    double lg = std::log(2.0) + std::lgamma((k + 1.0) / 2.0) +
                (d - 1) * std::lgamma(0.5) - std::lgamma((k + d) / 2.0);
    return std::pow(c, k) * 0.5 * std::exp(lg);
  }
  if (name == "orthant(" + std::to_string(d) + ")") {
    double lg = std::log(2.0) + d * std::lgamma((k + 1.0) / 2.0) -
                std::lgamma((k * d + d) / 2.0);
    return std::pow(c, k) * std::exp(lg) / std::pow(2.0, d);
  }
  if (const geometry::Cone* base = geometry::linear_base(cone)) {
    if (geometry::linear_is_orthogonal(cone))
      return angular_moment_closed_form(
          spectral::spectral_data(geometry::ConePtr(sd.cone(), base), sd.scale()), power);
  }
  throw unsupported_error("angular_moment_closed_form: unsupported cone");
}

IntegralResult gaussian_cone_integral(const spectral::SpectralData& sd, int power,
                                      const QuadratureSpec& quad) {
  if (power < 1) throw argument_error("gaussian_cone_integral: power must be >= 1");
  int d = sd.dim();
  double kp = power * sd.p();
  // radial integral of r^{k p + d - 1} e^{-r^2/2}
  double radial = std::exp(((kp + d) / 2.0 - 1.0) * std::log(2.0) +
                           std::lgamma((kp + d) / 2.0));
  IntegralResult out;
  if (d > 3) {
    out.value = radial * angular_moment_closed_form(sd, power);
    out.error_bound = 1e-14 * std::fabs(out.value);
    return out;
  }
  // rotations leave the integrals unchanged; integrate on the base cap
  const spectral::SpectralData* use = &sd;
  spectral::SpectralData base_sd;
  if (const geometry::Cone* base = geometry::linear_base(*sd.cone())) {
    if (!geometry::linear_is_orthogonal(*sd.cone()))
      throw unsupported_error("gaussian_cone_integral: unsupported cone");
    base_sd = spectral::spectral_data(geometry::ConePtr(sd.cone(), base), sd.scale());
    use = &base_sd;
  }
  CapLayout lay = cap_layout(*use);
  double angular = 0.0;
  switch (lay.kind) {
    case CapKind::point:
      angular = std::pow(use->scale(), power);
      break;
    case CapKind::arc_2d: {
      auto f = [&](double theta) {
        double dir[2] = {std::cos(theta), std::sin(theta)};
        return std::pow(use->m1(std::span<const double>(dir, 2)), power);
      };
      angular = adaptive_simpson(f, lay.t0, lay.t1, quad.tol, quad.max_depth);
      break;
    }
    case CapKind::polar_3d: {
      auto inner = [&](double theta) {
        auto g = [&](double phi) {
          double dir[3] = {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                           std::cos(phi)};
          return std::pow(use->m1(std::span<const double>(dir, 3)), power) * std::sin(phi);
        };
        return adaptive_simpson(g, lay.p0, lay.p1, quad.tol / (lay.t1 - lay.t0),
                                quad.max_depth);
      };
      angular = adaptive_simpson(inner, lay.t0, lay.t1, quad.tol, quad.max_depth);
      break;
    }
  }
  out.value = radial * angular;
  out.error_bound = radial * 4.0 * quad.tol;
  return out;
}

Kappa0 kappa0(const spectral::SpectralData& sd, const BrownianBudget& budget,
              uint64_t master_seed) {
  Kappa0 out;
  const geometry::Cone& cone = *sd.cone();
  std::string name = cone.describe();
  bool flat = name == "halfline" || name == "halfspace(" + std::to_string(sd.dim()) + ")";
  if (!flat && geometry::linear_base(cone) && geometry::linear_is_orthogonal(cone)) {
    std::string base = geometry::linear_base(cone)->describe();
    flat = base == "halfline" || base == "halfspace(" + std::to_string(sd.dim()) + ")";
  }
  if (flat) {
    // only the facet-normal coordinate matters: the exit tail is
    // 2*Phi(dist/sqrt(t)) - 1 ~ sqrt(2/pi) * dist * t^{-1/2}, and u assigns
    // that coordinate the weight norm_constant
    out.value = std::sqrt(2.0 / kPi) / sd.norm_constant();
    out.stderr_ = 0.0;
    out.closed_form = true;
    return out;
  }

  // fit route: two interior starts, geometric t-grid, intercept of
  // t^{p/2} phat / u(x) against 1/t
  int d = sd.dim();
  const Vec& dir = cone.interior_direction();
  double dirn = norm(dir);
  std::vector<Vec> starts;
  {
    Vec a(d), b(d);
    for (int i = 0; i < d; ++i) a[i] = budget.interior_scale * dir[i] / dirn * std::sqrt(1.0 * d);
    // second start: skewed inside the cone, halfway to the boundary along one axis
    b = a;
    double bd = cone.boundary_distance(a);
    b[0] += bd * 0.5;
    if (!cone.contains(b)) b = a;  // fall back to a single start direction
    starts.push_back(a);
    starts.push_back(b);
  }
  uint64_t sub = 0;
  for (const Vec& x : starts) {
    if (!cone.contains(x))
      throw precondition_error("kappa0: fit start outside the cone");
    double ux = sd.u(x);
    std::vector<double> xs, ys, ses;
    for (double t : budget.t_grid) {
      double dt = 1e-3 * t;
      ++sub;
      walk::BrownianTail tail = walk::brownian_exit_tail(
          x, cone, t, budget.paths, dt, mix64(master_seed ^ (0x5bd1e995u * sub)),
          budget.workers);
      if (tail.phat <= 0.0) continue;
      double scale = std::pow(t, sd.p() / 2.0) / ux;
      xs.push_back(1.0 / t);
      ys.push_back(tail.phat * scale);
      // discretization bias folded into the quoted uncertainty
      ses.push_back((tail.stderr_ + tail.bias_bound) * scale);
    }
    if (xs.size() < 2) throw precondition_error("kappa0: too few usable grid points");
    stats::FitResult fit = stats::weighted_linear_fit(xs, ys, ses);
    out.fits.push_back({x, fit.intercept.value, fit.intercept.stderr_});
  }
  // inverse-variance combination
  double wsum = 0.0, acc = 0.0;
  for (const auto& f : out.fits) {
    double w = 1.0 / (f.stderr_ * f.stderr_);
    wsum += w;
    acc += w * f.value;
  }
  out.value = acc / wsum;
  out.stderr_ = std::sqrt(1.0 / wsum);
  double diff = std::fabs(out.fits[0].value - out.fits[1].value);
  double se = std::sqrt(out.fits[0].stderr_ * out.fits[0].stderr_ +
                        out.fits[1].stderr_ * out.fits[1].stderr_);
  out.universality_ok = diff <= 3.0 * se;
  return out;
}

ConstantSet compute_constants(const spectral::SpectralData& sd, const BrownianBudget& budget,
                              uint64_t master_seed, const QuadratureSpec& quad) {
  ConstantSet c;
  c.p = sd.p();
  c.lambda1 = sd.lambda1();
  c.u_integral = gaussian_cone_integral(sd, 1, quad);
  c.u2_integral = gaussian_cone_integral(sd, 2, quad);
  c.H0 = 1.0 / c.u_integral.value;
  c.kappa0 = kappa0(sd, budget, master_seed);
  c.kappa1 = kappa1_from(c, &c.kappa1_stderr);
  return c;
}

double kappa1_from(const ConstantSet& c, double* stderr_out) {
  double k1 = c.kappa0.value * c.kappa0.value * c.H0 * c.H0 * c.u2_integral.value;
  if (stderr_out)
    *stderr_out = 2.0 * c.kappa0.value * c.kappa0.stderr_ * c.H0 * c.H0 * c.u2_integral.value;
  return k1;
}

}  // namespace conewalk::constants
