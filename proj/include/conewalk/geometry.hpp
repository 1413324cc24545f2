#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conewalk/common.hpp"

namespace conewalk::geometry {

// Axis-aligned box. `half_open` selects [lo,hi) per coordinate instead of
// [lo,hi]; interior/corner helpers are shared by both flavors.
struct Box {
  Vec lo, hi;
  bool half_open = false;

  Box() = default;
  Box(Vec lo_, Vec hi_, bool half_open_ = false);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(std::span<const double> x) const;
  // corner k: bit i of k selects hi[i] over lo[i]
  Vec corner(unsigned k) const;
};

Box cube_at(const Vec& lo_corner, double side, bool half_open = false);

// Kill regions for the walk kernels. Membership is the only requirement.
class Region {
 public:
  virtual ~Region() = default;
  virtual int dim() const = 0;
  virtual bool contains(std::span<const double> x) const = 0;
};

// No kill: the whole space.
class AllSpace final : public Region {
 public:
  explicit AllSpace(int d) : d_(d) {}
  int dim() const override { return d_; }
  bool contains(std::span<const double>) const override { return true; }

 private:
  int d_;
};

class Cone;
using ConePtr = std::shared_ptr<const Cone>;

// Open cone: boundary and origin excluded. Supported families keep the
// all-ones vector inside the set of valid translation directions, which is
// what the thickening machinery shifts along.
class Cone : public Region {
 public:
  // Euclidean distance to the boundary; 0 for points outside the cone.
  virtual double boundary_distance(std::span<const double> x) const = 0;
  virtual const Vec& interior_direction() const = 0;
  // Inward unit facet normals when the cone is an intersection of open
  // halfspaces through the origin; empty otherwise (reflex wedge).
  virtual const std::vector<Vec>& facet_normals() const;
  virtual bool is_convex() const { return !facet_normals().empty(); }
  virtual std::string describe() const = 0;
};

ConePtr make_half_line();
ConePtr make_half_space(int d);      // {x : x_d > 0}
ConePtr make_orthant(int d);         // all coordinates > 0
// Planar wedge of opening `alpha` in (0, 2*pi), bisector through (1,1) so the
// all-ones direction is always a valid translation direction.
ConePtr make_wedge(double alpha);
// Image T(base) for an invertible matrix T (rows of length d).
ConePtr make_linear_image(const Mat& transform, ConePtr base);

// Wedge internals needed by the spectral and shift code.
struct WedgeData {
  double alpha;      // opening angle
  double theta_lo;   // lower edge angle; upper edge at theta_lo + alpha
};
const WedgeData* wedge_data(const Cone& cone);
// For linear images: composed inverse map (nullptr otherwise).
const Mat* linear_inverse(const Cone& cone);
const Cone* linear_base(const Cone& cone);
bool linear_is_orthogonal(const Cone& cone);

// Shifted cone. sign=-1 grows the cone (shift by -t*1), sign=+1 shrinks it.
class ThickenedCone final : public Region {
 public:
  ThickenedCone(ConePtr base, double delta, int sign, double t_delta);
  int dim() const override { return base_->dim(); }
  bool contains(std::span<const double> x) const override;
  double delta() const { return delta_; }
  int sign() const { return sign_; }
  double t_delta() const { return t_delta_; }
  const ConePtr& base() const { return base_; }

 private:
  ConePtr base_;
  double delta_;
  int sign_;
  double t_delta_;
};

// Smallest t such that every box with side `delta` meeting the cone is
// contained in -t*1 + cone. Closed form for convex polyhedral cones, bisection
// with sampled boundary boxes otherwise.
double shift_param(const Cone& cone, double delta);

ThickenedCone thicken(ConePtr cone, double delta, int sign);

// Largest s such that the box of half-width s around the all-ones vector
// consists of valid translation directions. Used to bracket shift_param.
double interior_box_slack(const Cone& cone);

bool box_meets_cone(const Cone& cone, const Box& box);
bool box_in_region(const Region& region, const Box& box);

// Config grammar: orthant(d) | halfspace(d) | wedge(alpha) | halfline |
// linear(r11 r12; r21 r22; base)
ConePtr parse_cone(const std::string& text);

}  // namespace conewalk::geometry
