#include "conewalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conewalk::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec ones(int d) { return Vec(d, 1.0); }

Mat invert_matrix(const Mat& m) {
  int n = static_cast<int>(m.size());
  Mat a = m;
  Mat inv(n, Vec(n, 0.0));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m[i].size()) != n)
      throw argument_error("matrix must be square");
    inv[i][i] = 1.0;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-12)
      throw degeneracy_error("linear image: matrix is singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    double s = 1.0 / a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] *= s;
      inv[col][j] *= s;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Vec mat_apply(const Mat& m, std::span<const double> x) {
  Vec y(m.size(), 0.0);
  for (size_t i = 0; i < m.size(); ++i) y[i] = dot(m[i], x);
  return y;
}

const std::vector<Vec> kNoNormals;

// Distance from x to the ray {t*dir : t >= 0}, dir unit length.
double ray_distance(std::span<const double> x, const double dir[2]) {
  double t = x[0] * dir[0] + x[1] * dir[1];
  double n2 = x[0] * x[0] + x[1] * x[1];
  if (t <= 0.0) return std::sqrt(n2);
  double perp2 = std::max(0.0, n2 - t * t);
  return std::sqrt(perp2);
}

}  // namespace

Box::Box(Vec lo_, Vec hi_, bool half_open_)
    : lo(std::move(lo_)), hi(std::move(hi_)), half_open(half_open_) {
  if (lo.size() != hi.size() || lo.empty()) throw argument_error("box: bad corners");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw argument_error("box: lo must be < hi in every coordinate");
}

double Box::volume() const {
  double v = 1.0;
  for (size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Box::contains(std::span<const double> x) const {
  check_dim(x, dim(), "box.contains");
  for (size_t i = 0; i < lo.size(); ++i) {
    if (x[i] < lo[i]) return false;
    if (half_open ? (x[i] >= hi[i]) : (x[i] > hi[i])) return false;
  }
  return true;
}

Vec Box::corner(unsigned k) const {
  Vec c(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) c[i] = (k >> i) & 1u ? hi[i] : lo[i];
  return c;
}

Box cube_at(const Vec& lo_corner, double side, bool half_open) {
  Vec hi = lo_corner;
  for (double& v : hi) v += side;
  return Box(lo_corner, hi, half_open);
}

const std::vector<Vec>& Cone::facet_normals() const { return kNoNormals; }

// ---------------------------------------------------------------------------

namespace {

class HalfLineCone final : public Cone {
 public:
  HalfLineCone() : dir_(1, 1.0), normals_{Vec{1.0}} {}
  int dim() const override { return 1; }
  bool contains(std::span<const double> x) const override {
    check_dim(x, 1, "cone.contains");
    return x[0] > 0.0;
  }
  double boundary_distance(std::span<const double> x) const override {
    check_dim(x, 1, "boundary_distance");
    return std::max(0.0, x[0]);
  }
  const Vec& interior_direction() const override { return dir_; }
  const std::vector<Vec>& facet_normals() const override { return normals_; }
  std::string describe() const override { return "halfline"; }

 private:
  Vec dir_;
  std::vector<Vec> normals_;
};

class HalfSpaceCone final : public Cone {
 public:
  explicit HalfSpaceCone(int d) : d_(d), dir_(ones(d)) {
    if (d < 1) throw argument_error("halfspace: dimension must be >= 1");
    Vec n(d, 0.0);
    n[d - 1] = 1.0;
    normals_.push_back(std::move(n));
  }
  int dim() const override { return d_; }
  bool contains(std::span<const double> x) const override {
    check_dim(x, d_, "cone.contains");
    return x[d_ - 1] > 0.0;
  }
  double boundary_distance(std::span<const double> x) const override {
    check_dim(x, d_, "boundary_distance");
    return std::max(0.0, x[d_ - 1]);
  }
  const Vec& interior_direction() const override { return dir_; }
  const std::vector<Vec>& facet_normals() const override { return normals_; }
  std::string describe() const override { return "halfspace(" + std::to_string(d_) + ")"; }

 private:
  int d_;
  Vec dir_;
  std::vector<Vec> normals_;
};

class OrthantCone final : public Cone {
 public:
  explicit OrthantCone(int d) : d_(d), dir_(ones(d)) {
    if (d < 1) throw argument_error("orthant: dimension must be >= 1");
    for (int i = 0; i < d; ++i) {
      Vec n(d, 0.0);
      n[i] = 1.0;
      normals_.push_back(std::move(n));
    }
  }
  int dim() const override { return d_; }
  bool contains(std::span<const double> x) const override {
    check_dim(x, d_, "cone.contains");
    for (int i = 0; i < d_; ++i)
      if (!(x[i] > 0.0)) return false;
    return true;
  }
  double boundary_distance(std::span<const double> x) const override {
    check_dim(x, d_, "boundary_distance");
    double m = x[0];
    for (int i = 1; i < d_; ++i) m = std::min(m, x[i]);
    return std::max(0.0, m);
  }
  const Vec& interior_direction() const override { return dir_; }
  const std::vector<Vec>& facet_normals() const override { return normals_; }
  std::string describe() const override { return "orthant(" + std::to_string(d_) + ")"; }

 private:
  int d_;
  Vec dir_;
  std::vector<Vec> normals_;
};

class WedgeCone final : public Cone {
 public:
  explicit WedgeCone(double alpha) : dir_{1.0, 1.0} {
    if (!(alpha > 0.0 && alpha < 2.0 * kPi))
      throw argument_error("wedge: opening angle must be in (0, 2*pi)");
    data_.alpha = alpha;
    data_.theta_lo = kPi / 4.0 - alpha / 2.0;
    double th = data_.theta_lo, tu = data_.theta_lo + alpha;
    edge_lo_[0] = std::cos(th);
    edge_lo_[1] = std::sin(th);
    edge_hi_[0] = std::cos(tu);
    edge_hi_[1] = std::sin(tu);
    n_lo_ = {-std::sin(th), std::cos(th)};
    n_hi_ = {std::sin(tu), -std::cos(tu)};
    if (convex()) normals_ = {n_lo_, n_hi_};
  }
  bool convex() const { return data_.alpha <= kPi; }
  int dim() const override { return 2; }
  bool contains(std::span<const double> x) const override {
    check_dim(x, 2, "cone.contains");
    double a = n_lo_[0] * x[0] + n_lo_[1] * x[1];
    double b = n_hi_[0] * x[0] + n_hi_[1] * x[1];
    if (convex()) return a > 0.0 && b > 0.0;
    return (a > 0.0 || b > 0.0) && (x[0] != 0.0 || x[1] != 0.0);
  }
  double boundary_distance(std::span<const double> x) const override {
    check_dim(x, 2, "boundary_distance");
    if (!contains(x)) return 0.0;
    return std::min(ray_distance(x, edge_lo_), ray_distance(x, edge_hi_));
  }
  const Vec& interior_direction() const override { return dir_; }
  const std::vector<Vec>& facet_normals() const override { return normals_; }
  bool is_convex() const override { return convex(); }
  std::string describe() const override {
    return "wedge(" + fmt_double(data_.alpha) + ")";
  }
  const WedgeData& data() const { return data_; }
  const Vec& lower_normal() const { return n_lo_; }
  const Vec& upper_normal() const { return n_hi_; }

 private:
  Vec dir_;
  WedgeData data_;
  double edge_lo_[2], edge_hi_[2];
  Vec n_lo_, n_hi_;
  std::vector<Vec> normals_;
};

class LinearImageCone final : public Cone {
 public:
  LinearImageCone(Mat transform, ConePtr base)
      : t_(std::move(transform)), base_(std::move(base)) {
    int d = base_->dim();
    if (static_cast<int>(t_.size()) != d)
      throw argument_error("linear image: matrix/base dimension mismatch");
    tinv_ = invert_matrix(t_);
    dir_ = mat_apply(t_, base_->interior_direction());
    // orthogonality check: T^T T == I
    orthogonal_ = true;
    for (int i = 0; i < d && orthogonal_; ++i)
      for (int j = 0; j < d && orthogonal_; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += t_[k][i] * t_[k][j];
        if (std::fabs(s - (i == j ? 1.0 : 0.0)) > 1e-12) orthogonal_ = false;
      }
    // transformed facet normals: n -> T^{-T} n, renormalized
    for (const Vec& n : base_->facet_normals()) {
      Vec m(d, 0.0);
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) m[i] += tinv_[k][i] * n[k];
      double s = norm(m);
      for (double& v : m) v /= s;
      normals_.push_back(std::move(m));
    }
  }
  int dim() const override { return base_->dim(); }
  bool contains(std::span<const double> x) const override {
    check_dim(x, dim(), "cone.contains");
    double buf[kMaxDim];
    int d = dim();
    for (int i = 0; i < d; ++i) buf[i] = dot(tinv_[i], x);
    return base_->contains(std::span<const double>(buf, d));
  }
  double boundary_distance(std::span<const double> x) const override {
    check_dim(x, dim(), "boundary_distance");
    int d = dim();
    double buf[kMaxDim];
    for (int i = 0; i < d; ++i) buf[i] = dot(tinv_[i], x);
    std::span<const double> pre(buf, d);
    if (orthogonal_) return base_->boundary_distance(pre);
    if (!base_->contains(pre)) return 0.0;
    if (!normals_.empty()) {
      double m = dot(normals_[0], x);
      for (size_t i = 1; i < normals_.size(); ++i) m = std::min(m, dot(normals_[i], x));
      return std::max(0.0, m);
    }
    // reflex wedge image: boundary is the two transformed edge rays
    if (const auto* w = dynamic_cast<const WedgeCone*>(base_.get())) {
      double th = w->data().theta_lo, tu = th + w->data().alpha;
      double r0[2] = {std::cos(th), std::sin(th)}, r1[2] = {std::cos(tu), std::sin(tu)};
      double e0[2] = {t_[0][0] * r0[0] + t_[0][1] * r0[1], t_[1][0] * r0[0] + t_[1][1] * r0[1]};
      double e1[2] = {t_[0][0] * r1[0] + t_[0][1] * r1[1], t_[1][0] * r1[0] + t_[1][1] * r1[1]};
      double s0 = std::hypot(e0[0], e0[1]), s1 = std::hypot(e1[0], e1[1]);
      e0[0] /= s0; e0[1] /= s0; e1[0] /= s1; e1[1] /= s1;
      return std::min(ray_distance(x, e0), ray_distance(x, e1));
    }
    throw unsupported_error("boundary_distance: unsupported linear image");
  }
  const Vec& interior_direction() const override { return dir_; }
  const std::vector<Vec>& facet_normals() const override { return normals_; }
  bool is_convex() const override { return base_->is_convex(); }
  std::string describe() const override {
    std::ostringstream os;
    os << "linear(";
    for (size_t i = 0; i < t_.size(); ++i) {
      if (i) os << "; ";
      for (size_t j = 0; j < t_[i].size(); ++j) {
        if (j) os << " ";
        os << fmt_double(t_[i][j]);
      }
    }
    os << "; " << base_->describe() << ")";
    return os.str();
  }
  const Mat& inverse() const { return tinv_; }
  const Cone* base() const { return base_.get(); }
  bool orthogonal() const { return orthogonal_; }

 private:
  Mat t_, tinv_;
  ConePtr base_;
  Vec dir_;
  bool orthogonal_;
  std::vector<Vec> normals_;
};

}  // namespace

ConePtr make_half_line() { return std::make_shared<HalfLineCone>(); }
ConePtr make_half_space(int d) { return std::make_shared<HalfSpaceCone>(d); }
ConePtr make_orthant(int d) { return std::make_shared<OrthantCone>(d); }
ConePtr make_wedge(double alpha) { return std::make_shared<WedgeCone>(alpha); }
ConePtr make_linear_image(const Mat& transform, ConePtr base) {
  return std::make_shared<LinearImageCone>(transform, std::move(base));
}

const WedgeData* wedge_data(const Cone& cone) {
  if (const auto* w = dynamic_cast<const WedgeCone*>(&cone)) return &w->data();
  return nullptr;
}

const Mat* linear_inverse(const Cone& cone) {
  if (const auto* l = dynamic_cast<const LinearImageCone*>(&cone)) return &l->inverse();
  return nullptr;
}

const Cone* linear_base(const Cone& cone) {
  if (const auto* l = dynamic_cast<const LinearImageCone*>(&cone)) return l->base();
  return nullptr;
}

bool linear_is_orthogonal(const Cone& cone) {
  if (const auto* l = dynamic_cast<const LinearImageCone*>(&cone)) return l->orthogonal();
  return false;
}

// ---------------------------------------------------------------------------

ThickenedCone::ThickenedCone(ConePtr base, double delta, int sign, double t_delta)
    : base_(std::move(base)), delta_(delta), sign_(sign), t_delta_(t_delta) {
  if (sign_ != 1 && sign_ != -1) throw argument_error("thicken: sign must be +1 or -1");
  if (!(delta_ > 0.0)) throw argument_error("thicken: delta must be positive");
}

bool ThickenedCone::contains(std::span<const double> x) const {
  double buf[kMaxDim];
  int d = dim();
  check_dim(x, d, "thickened.contains");
  // membership in s*t*1 + C is membership of x - s*t*1 in C
  double shift = sign_ * t_delta_;
  for (int i = 0; i < d; ++i) buf[i] = x[i] - shift;
  return base_->contains(std::span<const double>(buf, d));
}

double interior_box_slack(const Cone& cone) {
  const auto& normals = cone.facet_normals();
  if (!normals.empty()) {
    // slack of the all-ones direction against each facet
    double best = 1e300;
    for (const Vec& n : normals) {
      double h = 0.0, l1 = 0.0;
      for (double v : n) {
        h += v;
        l1 += std::fabs(v);
      }
      if (!(h > 0.0))
        throw unsupported_error(
            "interior_box_slack: all-ones direction is not interior to this cone");
      best = std::min(best, h / l1);
    }
    return best;
  }
  if (const auto* w = wedge_data(cone)) {
    // Valid translation directions of a reflex wedge form the convex wedge
    // spanned by [theta_hi - pi, theta_lo + pi]; slack of the all-ones
    // direction against its two edges.
    double a = w->theta_lo + w->alpha - kPi;  // lower edge of the direction set
    double b = w->theta_lo + kPi;             // upper edge
    Vec n1{-std::sin(a), std::cos(a)};
    Vec n2{std::sin(b), -std::cos(b)};
    double best = 1e300;
    for (const Vec& n : {n1, n2}) {
      double h = n[0] + n[1];
      double l1 = std::fabs(n[0]) + std::fabs(n[1]);
      if (!(h > 0.0))
        throw unsupported_error("interior_box_slack: degenerate reflex wedge");
      best = std::min(best, h / l1);
    }
    return best;
  }
  throw unsupported_error("interior_box_slack: unsupported cone");
}

namespace {

// 2-d convex clip: intersect polygon with {n.x <= c}. Closed halfplane.
using Poly = std::vector<std::array<double, 2>>;

Poly clip_halfplane(const Poly& poly, double nx, double ny, double c) {
  Poly out;
  size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    double fa = nx * a[0] + ny * a[1] - c;
    double fb = nx * b[0] + ny * b[1] - c;
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double t = fa / (fa - fb);
      out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  return out;
}

double poly_area(const Poly& p) {
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::fabs(s);
}

Poly box_poly(const Box& b) {
  return {{b.lo[0], b.lo[1]}, {b.hi[0], b.lo[1]}, {b.hi[0], b.hi[1]}, {b.lo[0], b.hi[1]}};
}

// Does the box contain a point satisfying n_i.x > 0 for all i? Exact for 2-d
// convex cones: clip by the closed halfplanes and test for positive area.
bool box_meets_convex_2d(const std::vector<Vec>& normals, const Box& box) {
  Poly p = box_poly(box);
  for (const Vec& n : normals) {
    p = clip_halfplane(p, -n[0], -n[1], 0.0);  // keep n.x >= 0
    if (p.empty()) return false;
  }
  double scale = std::max({std::fabs(box.lo[0]), std::fabs(box.hi[0]), std::fabs(box.lo[1]),
                           std::fabs(box.hi[1]), 1.0});
  return poly_area(p) > 1e-14 * scale * scale;
}

// Does the box intersect the closed convex wedge {n1.x <= 0, n2.x <= 0}?
bool box_hits_closed_complement(const Vec& n1, const Vec& n2, const Box& box) {
  Poly p = box_poly(box);
  p = clip_halfplane(p, n1[0], n1[1], 0.0);
  if (p.empty()) return false;
  p = clip_halfplane(p, n2[0], n2[1], 0.0);
  return !p.empty();
}

bool normals_all_nonnegative(const std::vector<Vec>& normals) {
  for (const Vec& n : normals)
    for (double v : n)
      if (v < 0.0) return false;
  return true;
}

const WedgeCone* as_reflex_wedge(const Cone& cone) {
  const auto* w = dynamic_cast<const WedgeCone*>(&cone);
  return (w && !w->convex()) ? w : nullptr;
}

}  // namespace

bool box_meets_cone(const Cone& cone, const Box& box) {
  if (box.dim() != cone.dim()) throw argument_error("box_meets_cone: dimension mismatch");
  if (const auto* w = as_reflex_wedge(cone)) {
    // complement is convex and closed, so some corner lies in the open wedge
    // iff the box is not fully inside the complement
    for (unsigned k = 0; k < 4u; ++k) {
      Vec c = box.corner(k);
      if (w->contains(c)) return true;
    }
    return false;
  }
  const auto& normals = cone.facet_normals();
  if (normals.empty()) throw unsupported_error("box_meets_cone: unsupported cone");
  if (normals_all_nonnegative(normals)) {
    // the all-hi corner simultaneously maximizes every facet functional
    Vec c = box.hi;
    return cone.contains(c);
  }
  if (cone.dim() == 2) return box_meets_convex_2d(normals, box);
  throw unsupported_error("box_meets_cone: unsupported cone");
}

bool box_in_region(const Region& region, const Box& box) {
  if (box.dim() != region.dim()) throw argument_error("box_in_region: dimension mismatch");
  if (dynamic_cast<const AllSpace*>(&region)) return true;

  // shifted cones reduce to their base after translating the box
  if (const auto* t = dynamic_cast<const ThickenedCone*>(&region)) {
    double shift = t->sign() * t->t_delta();
    Vec lo = box.lo, hi = box.hi;
    for (double& v : lo) v -= shift;
    for (double& v : hi) v -= shift;
    return box_in_region(*t->base(), Box(lo, hi, box.half_open));
  }

  const auto* cone = dynamic_cast<const Cone*>(&region);
  if (!cone) throw unsupported_error("box_in_region: unsupported region");

  if (const auto* w = as_reflex_wedge(*cone)) {
    // contained iff the box avoids the closed convex complement
    return !box_hits_closed_complement(w->lower_normal(), w->upper_normal(), box);
  }
  if (!cone->is_convex()) throw unsupported_error("box_in_region: unsupported cone");
  unsigned corners = 1u << box.dim();
  for (unsigned k = 0; k < corners; ++k) {
    Vec c = box.corner(k);
    if (!cone->contains(c)) return false;
  }
  return true;
}

namespace {

// Feasibility for the reflex-wedge shift search: every sampled side-delta box
// meeting the wedge must land inside -t*1 + wedge.
bool reflex_shift_feasible(const WedgeCone& w, double delta, double t) {
  const Vec& n1 = w.lower_normal();
  const Vec& n2 = w.upper_normal();
  auto contained = [&](const Box& b) {
    Vec lo = b.lo, hi = b.hi;
    lo[0] += t; lo[1] += t;
    hi[0] += t; hi[1] += t;
    return !box_hits_closed_complement(n1, n2, Box(lo, hi));
  };
  double th = w.data().theta_lo, tu = th + w.data().alpha;
  const int kRad = 25, kOff = 20;
  for (double ang : {th, tu}) {
    double e[2] = {std::cos(ang), std::sin(ang)};
    for (int ir = 0; ir < kRad; ++ir) {
      double r = delta * std::pow(2.0, -4.0 + ir * 0.75);
      for (int ia = -kOff; ia <= kOff; ++ia) {
        for (int ib = -kOff; ib <= kOff; ++ib) {
          Vec lo{r * e[0] + delta * (ia / double(kOff)) - delta * 0.5,
                 r * e[1] + delta * (ib / double(kOff)) - delta * 0.5};
          Box b = cube_at(lo, delta);
          if (!box_meets_cone(w, b)) continue;
          if (!contained(b)) return false;
        }
      }
    }
  }
  // boxes straddling the apex
  for (int ia = -kOff; ia <= kOff; ++ia)
    for (int ib = -kOff; ib <= kOff; ++ib) {
      Vec lo{delta * (ia / double(kOff)) - delta * 0.5,
             delta * (ib / double(kOff)) - delta * 0.5};
      Box b = cube_at(lo, delta);
      if (box_meets_cone(w, b) && !contained(b)) return false;
    }
  return true;
}

}  // namespace

double shift_param(const Cone& cone, double delta) {
  if (!(delta > 0.0)) throw argument_error("shift_param: delta must be positive");
  const auto& normals = cone.facet_normals();
  if (!normals.empty()) {
    // Worst box corner per facet: a side-delta box meeting the cone can dip
    // below facet i by at most delta*|n_i|_1, and the shift -t*1 buys t*<n_i,1>
    // of slack, so t = delta * max_i |n_i|_1 / <n_i,1>.
    double t = 0.0;
    for (const Vec& n : normals) {
      double h = 0.0, l1 = 0.0;
      for (double v : n) {
        h += v;
        l1 += std::fabs(v);
      }
      if (!(h > 0.0))
        throw unsupported_error(
            "shift_param: all-ones direction is not interior to this cone");
      t = std::max(t, delta * l1 / h);
    }
    return t;
  }
  if (const auto* w = as_reflex_wedge(cone)) {
    double lo = delta / 2.0;
    double hi = delta / interior_box_slack(cone);
    for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
      double mid = 0.5 * (lo + hi);
      if (reflex_shift_feasible(*w, delta, mid))
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }
  throw unsupported_error("shift_param: unsupported cone");
}

ThickenedCone thicken(ConePtr cone, double delta, int sign) {
  double t = shift_param(*cone, delta);
  return ThickenedCone(std::move(cone), delta, sign, t);
}

// ---------------------------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

ConePtr parse_cone(const std::string& text) {
  std::string s = strip(text);
  if (s == "halfline") return make_half_line();
  auto call = [&](const std::string& name) -> std::optional<std::string> {
    if (s.rfind(name + "(", 0) == 0 && s.back() == ')')
      return s.substr(name.size() + 1, s.size() - name.size() - 2);
    return std::nullopt;
  };
  if (auto arg = call("orthant")) return make_orthant(std::stoi(*arg));
  if (auto arg = call("halfspace")) return make_half_space(std::stoi(*arg));
  if (auto arg = call("wedge")) return make_wedge(std::stod(*arg));
  if (auto arg = call("linear")) {
    // rows separated by ';', final element is the base cone
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : *arg) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ';' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() < 2) throw config_error("cone: linear(...) needs rows and a base");
    ConePtr base = parse_cone(parts.back());
    Mat rows;
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
      std::istringstream is(parts[i]);
      Vec row;
      double v;
      while (is >> v) row.push_back(v);
      rows.push_back(std::move(row));
    }
    return make_linear_image(rows, std::move(base));
  }
  throw config_error("unrecognized cone spec: " + text);
}

}  // namespace conewalk::geometry
