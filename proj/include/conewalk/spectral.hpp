#pragma once

#include "conewalk/geometry.hpp"

namespace conewalk::spectral {

// Closed-form spectral data of the cap: principal Dirichlet eigenvalue of the
// spherical Laplacian, the derived positivity exponent, and the principal
// eigenfunction normalized to unit L2 norm on the cap (times an optional
// scale, threaded through so downstream ratios can be checked for
// normalization invariance).
class SpectralData {
 public:
  double lambda1() const { return lambda1_; }
  double p() const { return p_; }
  int dim() const { return cone_->dim(); }
  double scale() const { return scale_; }
  const geometry::ConePtr& cone() const { return cone_; }

  // principal eigenfunction at a unit direction; 0 outside the cap
  double m1(std::span<const double> direction) const;
  // positively homogeneous extension |x|^p * m1(x/|x|); 0 outside the cone
  double u(std::span<const double> x) const;
  // the multiplicative constant in front of the raw eigenfunction shape
  // (coordinate product, sine, ...) after L2 normalization and scaling
  double norm_constant() const { return scale_ * unit_norm_constant_; }

 private:
  friend SpectralData spectral_data(geometry::ConePtr cone, double scale);
  enum class Kind { half_line, half_space, orthant, wedge, rotated };
  Kind kind_;
  geometry::ConePtr cone_;
  double lambda1_ = 0.0, p_ = 0.0;
  double unit_norm_constant_ = 1.0;
  double scale_ = 1.0;
  // wedge parameters
  double alpha_ = 0.0, theta_lo_ = 0.0;
  // orthogonal pre-map for rotated images (inverse of the image transform)
  Mat pre_;
  std::shared_ptr<const SpectralData> base_;
};

// Closed-form data for half-line, half-space, orthant, planar wedge, and
// orthogonal images of these. Throws unsupported_error otherwise.
SpectralData spectral_data(geometry::ConePtr cone, double scale = 1.0);

// Central fourth-order second-difference estimate of the Laplacian of u at an
// interior point; the stencil reaches 2h along each axis.
double laplacian_residual(const SpectralData& sd, std::span<const double> x, double h);

}  // namespace conewalk::spectral
