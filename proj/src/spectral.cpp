#include "conewalk/spectral.hpp"

#include <cmath>

namespace conewalk::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

// surface integral over the unit sphere of prod_i |x_i|^{a_i}:
//   2 * prod Gamma((a_i+1)/2) / Gamma((sum a_i + d)/2)
double sphere_moment(const std::vector<double>& a) {
  double lg = std::log(2.0);
  double s = 0.0;
  for (double ai : a) {
    lg += std::lgamma((ai + 1.0) / 2.0);
    s += ai;
  }
  lg -= std::lgamma((s + a.size()) / 2.0);
  return std::exp(lg);
}

double exponent_from_eigenvalue(double lambda1, int d) {
  double h = d / 2.0 - 1.0;
  return std::sqrt(lambda1 + h * h) - h;
}

}  // namespace

SpectralData spectral_data(geometry::ConePtr cone, double scale) {
  SpectralData sd;
  sd.cone_ = cone;
  sd.scale_ = scale;
  int d = cone->dim();
  const geometry::Cone& c = *cone;

  if (c.describe() == "halfline") {
    sd.kind_ = SpectralData::Kind::half_line;
    sd.p_ = 1.0;
    sd.lambda1_ = 0.0;  // the 0-sphere carries no spherical Laplacian; declared data
    sd.unit_norm_constant_ = 1.0;
    return sd;
  }
  if (c.describe() == "halfspace(" + std::to_string(d) + ")") {
    sd.kind_ = SpectralData::Kind::half_space;
    sd.p_ = 1.0;
    sd.lambda1_ = static_cast<double>(d - 1);  // p*(p+d-2) with p = 1
    // m1 = const * x_d restricted to the half sphere
    std::vector<double> a(d, 0.0);
    a[d - 1] = 2.0;
    sd.unit_norm_constant_ = 1.0 / std::sqrt(sphere_moment(a) / 2.0);
    return sd;
  }
  if (c.describe() == "orthant(" + std::to_string(d) + ")") {
    if (d == 1) return spectral_data(geometry::make_half_line(), scale);
    sd.kind_ = SpectralData::Kind::orthant;
    sd.p_ = static_cast<double>(d);  // the coordinate product is harmonic of degree d
    sd.lambda1_ = sd.p_ * (sd.p_ + d - 2.0);
    std::vector<double> a(d, 2.0);
    sd.unit_norm_constant_ = 1.0 / std::sqrt(sphere_moment(a) / std::pow(2.0, d));
    return sd;
  }
  if (const auto* w = geometry::wedge_data(c)) {
    sd.kind_ = SpectralData::Kind::wedge;
    sd.alpha_ = w->alpha;
    sd.theta_lo_ = w->theta_lo;
    sd.lambda1_ = (kPi / w->alpha) * (kPi / w->alpha);
    sd.p_ = exponent_from_eigenvalue(sd.lambda1_, 2);  // = pi/alpha in d = 2
    sd.unit_norm_constant_ = std::sqrt(2.0 / w->alpha);
    return sd;
  }
  if (const geometry::Cone* base = geometry::linear_base(c)) {
    if (!geometry::linear_is_orthogonal(c))
      throw unsupported_error(
          "spectral_data: linear images are supported only for orthogonal maps");
    auto base_sd = std::make_shared<SpectralData>(
        spectral_data(geometry::ConePtr(cone, base), scale));
    sd.kind_ = SpectralData::Kind::rotated;
    sd.lambda1_ = base_sd->lambda1();
    sd.p_ = base_sd->p();
    sd.unit_norm_constant_ = base_sd->unit_norm_constant_;
    sd.pre_ = *geometry::linear_inverse(c);
    sd.base_ = base_sd;
    return sd;
  }
  throw unsupported_error("spectral_data: no closed form for cone " + c.describe());
}

double SpectralData::m1(std::span<const double> direction) const {
  check_dim(direction, dim(), "m1");
  switch (kind_) {
    case Kind::half_line:
      return direction[0] > 0.0 ? scale_ : 0.0;
    case Kind::half_space: {
      double v = direction[dim() - 1];
      return v > 0.0 ? norm_constant() * v : 0.0;
    }
    case Kind::orthant: {
      double prod = 1.0;
      for (double v : direction) {
        if (!(v > 0.0)) return 0.0;
        prod *= v;
      }
      return norm_constant() * prod;
    }
    case Kind::wedge: {
      double theta = std::atan2(direction[1], direction[0]);
      // bring the angle into [theta_lo, theta_lo + 2*pi)
      while (theta < theta_lo_) theta += 2.0 * kPi;
      while (theta >= theta_lo_ + 2.0 * kPi) theta -= 2.0 * kPi;
      double rel = theta - theta_lo_;
      if (rel <= 0.0 || rel >= alpha_) return 0.0;
      return norm_constant() * std::sin(kPi * rel / alpha_);
    }
    case Kind::rotated: {
      double buf[kMaxDim];
      int d = dim();
      for (int i = 0; i < d; ++i) buf[i] = dot(pre_[i], direction);
      return base_->m1(std::span<const double>(buf, d));
    }
  }
  return 0.0;
}

double SpectralData::u(std::span<const double> x) const {
  check_dim(x, dim(), "u");
  double r = norm(x);
  if (r == 0.0 || !cone_->contains(x)) return 0.0;
  double buf[kMaxDim];
  int d = dim();
  for (int i = 0; i < d; ++i) buf[i] = x[i] / r;
  return std::pow(r, p_) * m1(std::span<const double>(buf, d));
}

double laplacian_residual(const SpectralData& sd, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw argument_error("laplacian_residual: h must be positive");
  const geometry::Cone& cone = *sd.cone();
  int d = cone.dim();
  check_dim(x, d, "laplacian_residual");
  // the stencil reaches 2h along each axis; keep it strictly inside
  if (cone.boundary_distance(x) <= 2.0 * h * std::sqrt(static_cast<double>(d)))
    throw precondition_error("laplacian_residual: point too close to the boundary");
  double res = 0.0;
  Vec y(x.begin(), x.end());
  double u0 = sd.u(y);
  for (int i = 0; i < d; ++i) {
    double xi = y[i];
    auto at = [&](double step) {
      y[i] = xi + step;
      double v = sd.u(y);
      y[i] = xi;
      return v;
    };
    // fourth-order central second difference
    res += (-at(2 * h) + 16 * at(h) - 30 * u0 + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
  }
  return res;
}

}  // namespace conewalk::spectral
