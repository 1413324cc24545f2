#include "conewalk/steps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace conewalk::steps {

namespace {

constexpr double kPi = 3.14159265358979323846;

class GaussianSteps final : public StepDistribution {
 public:
  explicit GaussianSteps(int d) : d_(d) {
    if (d < 1) throw argument_error("gaussian: dimension must be >= 1");
  }
  int dim() const override { return d_; }
  void sample(rng::Stream& stream, std::span<double> out) const override {
    for (int i = 0; i < d_; ++i) out[i] = stream.next_gaussian();
  }
  Vec mean() const override { return Vec(d_, 0.0); }
  Mat covariance() const override {
    Mat c(d_, Vec(d_, 0.0));
    for (int i = 0; i < d_; ++i) c[i][i] = 1.0;
    return c;
  }
  std::string describe() const override { return "gaussian(" + std::to_string(d_) + ")"; }

 private:
  int d_;
};

class UniformCubeSteps final : public StepDistribution {
 public:
  UniformCubeSteps(int d, double side) : d_(d), side_(side) {
    if (d < 1) throw argument_error("uniform_cube: dimension must be >= 1");
    if (!(side > 0.0)) throw argument_error("uniform_cube: side must be positive");
  }
  int dim() const override { return d_; }
  void sample(rng::Stream& stream, std::span<double> out) const override {
    for (int i = 0; i < d_; ++i) out[i] = side_ * (stream.next_double() - 0.5);
  }
  Vec mean() const override { return Vec(d_, 0.0); }
  Mat covariance() const override {
    Mat c(d_, Vec(d_, 0.0));
    for (int i = 0; i < d_; ++i) c[i][i] = side_ * side_ / 12.0;
    return c;
  }
  std::string describe() const override {
    return "uniform_cube(" + std::to_string(d_) + ", " + fmt_double(side_) + ")";
  }

 private:
  int d_;
  double side_;
};

class AtomSteps final : public StepDistribution {
 public:
  explicit AtomSteps(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw argument_error("atoms: empty support");
    d_ = static_cast<int>(atoms_[0].x.size());
    double total = 0.0;
    for (const Atom& a : atoms_) {
      if (static_cast<int>(a.x.size()) != d_)
        throw argument_error("atoms: inconsistent dimensions");
      if (!(a.w > 0.0)) throw argument_error("atoms: weights must be positive");
      total += a.w;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw argument_error("atoms: weights must sum to 1");
    cum_.reserve(atoms_.size());
    double run = 0.0;
    for (const Atom& a : atoms_) {
      run += a.w / total;
      cum_.push_back(run);
    }
    cum_.back() = 1.0;
  }
  int dim() const override { return d_; }
  void sample(rng::Stream& stream, std::span<double> out) const override {
    double v = stream.next_double();
    size_t k = 0;
    while (k + 1 < cum_.size() && v >= cum_[k]) ++k;
    const Vec& x = atoms_[k].x;
    for (int i = 0; i < d_; ++i) out[i] = x[i];
  }
  Vec mean() const override {
    Vec m(d_, 0.0);
    for (const Atom& a : atoms_)
      for (int i = 0; i < d_; ++i) m[i] += a.w * a.x[i];
    return m;
  }
  Mat covariance() const override {
    Vec m = mean();
    Mat c(d_, Vec(d_, 0.0));
    for (const Atom& a : atoms_)
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) c[i][j] += a.w * (a.x[i] - m[i]) * (a.x[j] - m[j]);
    return c;
  }
  const std::vector<Atom>* atoms() const override { return &atoms_; }
  std::string describe() const override {
    std::ostringstream os;
    os << "atoms[";
    for (size_t k = 0; k < atoms_.size(); ++k) {
      if (k) os << ";";
      os << "((";
      for (int i = 0; i < d_; ++i) {
        if (i) os << ",";
        os << fmt_double(atoms_[k].x[i]);
      }
      os << ")," << fmt_double(atoms_[k].w) << ")";
    }
    os << "]";
    return os.str();
  }

 private:
  int d_;
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
};

class ProductSteps final : public StepDistribution {
 public:
  explicit ProductSteps(std::vector<StepsPtr> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw argument_error("product: empty");
    for (const auto& p : parts_)
      if (p->dim() != 1) throw argument_error("product: components must be 1-d");
    d_ = static_cast<int>(parts_.size());
    // finite product supports materialize to a finite atom list
    bool finite = true;
    for (const auto& p : parts_) finite = finite && p->atoms();
    if (finite) {
      std::vector<Atom> acc{{Vec{}, 1.0}};
      for (const auto& p : parts_) {
        std::vector<Atom> next;
        for (const Atom& prefix : acc)
          for (const Atom& a : *p->atoms()) {
            Vec x = prefix.x;
            x.push_back(a.x[0]);
            next.push_back({std::move(x), prefix.w * a.w});
          }
        acc = std::move(next);
      }
      atoms_ = std::move(acc);
    }
  }
  int dim() const override { return d_; }
  void sample(rng::Stream& stream, std::span<double> out) const override {
    for (int i = 0; i < d_; ++i) parts_[i]->sample(stream, out.subspan(i, 1));
  }
  Vec mean() const override {
    Vec m(d_);
    for (int i = 0; i < d_; ++i) m[i] = parts_[i]->mean()[0];
    return m;
  }
  Mat covariance() const override {
    Mat c(d_, Vec(d_, 0.0));
    for (int i = 0; i < d_; ++i) c[i][i] = parts_[i]->covariance()[0][0];
    return c;
  }
  const std::vector<Atom>* atoms() const override {
    return atoms_.empty() ? nullptr : &atoms_;
  }
  std::string describe() const override {
    std::string s = "product[";
    for (size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ";";
      s += parts_[i]->describe();
    }
    return s + "]";
  }

 private:
  int d_;
  std::vector<StepsPtr> parts_;
  std::vector<Atom> atoms_;
};

class LinearImageSteps final : public StepDistribution {
 public:
  LinearImageSteps(Mat t, StepsPtr base) : t_(std::move(t)), base_(std::move(base)) {
    d_ = base_->dim();
    if (static_cast<int>(t_.size()) != d_)
      throw argument_error("linear image steps: dimension mismatch");
  }
  int dim() const override { return d_; }
  void sample(rng::Stream& stream, std::span<double> out) const override {
    double buf[kMaxDim];
    base_->sample(stream, std::span<double>(buf, d_));
    for (int i = 0; i < d_; ++i) out[i] = dot(t_[i], std::span<const double>(buf, d_));
  }
  Vec mean() const override {
    Vec m = base_->mean();
    Vec out(d_, 0.0);
    for (int i = 0; i < d_; ++i) out[i] = dot(t_[i], m);
    return out;
  }
  Mat covariance() const override {
    Mat c = base_->covariance();
    Mat out(d_, Vec(d_, 0.0));
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        double s = 0.0;
        for (int k = 0; k < d_; ++k)
          for (int l = 0; l < d_; ++l) s += t_[i][k] * c[k][l] * t_[j][l];
        out[i][j] = s;
      }
    return out;
  }
  std::string describe() const override { return "linear_image(" + base_->describe() + ")"; }

 private:
  Mat t_;
  StepsPtr base_;
  int d_;
};

Mat transform_rows(const Mat& t, const std::vector<Vec>& rows) {
  Mat out;
  for (const Vec& r : rows) {
    Vec y(t.size(), 0.0);
    for (size_t i = 0; i < t.size(); ++i) y[i] = dot(t[i], r);
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace

void StepDistribution::declare_lattice(LatticeStructure s) {
  if (s.vector_dim + static_cast<int>(s.basis.size()) != dim())
    throw argument_error("lattice declaration: vector part + basis rank must equal d");
  for (const Vec& u : s.basis)
    if (static_cast<int>(u.size()) != dim())
      throw argument_error("lattice declaration: basis vector dimension mismatch");
  lattice_ = std::move(s);
}

StepsPtr make_gaussian(int d) { return std::make_shared<GaussianSteps>(d); }
StepsPtr make_uniform_cube(int d, double side) {
  return std::make_shared<UniformCubeSteps>(d, side);
}
StepsPtr make_atoms(std::vector<Atom> atoms) {
  return std::make_shared<AtomSteps>(std::move(atoms));
}
StepsPtr make_product(std::vector<StepsPtr> one_dim_laws) {
  return std::make_shared<ProductSteps>(std::move(one_dim_laws));
}

StepsPtr make_linear_image(const Mat& transform, const StepsPtr& base) {
  StepsPtr out;
  if (const auto* as = base->atoms()) {
    // exact pushforward of a finite support
    std::vector<Atom> moved;
    for (const Atom& a : *as) {
      Vec y(transform.size(), 0.0);
      for (size_t i = 0; i < transform.size(); ++i) y[i] = dot(transform[i], a.x);
      moved.push_back({std::move(y), a.w});
    }
    out = make_atoms(std::move(moved));
  } else {
    out = std::make_shared<LinearImageSteps>(transform, base);
  }
  if (base->declared_lattice()) {
    LatticeStructure ls = *base->declared_lattice();
    ls.basis = transform_rows(transform, ls.basis);
    out->declare_lattice(std::move(ls));
  }
  if (base->declared_moment_order()) out->declare_moment_order(*base->declared_moment_order());
  return out;
}

Moments moments(const StepDistribution& dist) {
  Moments m;
  m.mean = dist.mean();
  m.covariance = dist.covariance();
  m.exact = true;
  return m;
}

Whitening whitening_transform(const StepsPtr& dist) {
  int d = dist->dim();
  Mat cov = dist->covariance();
  Vec mu = dist->mean();
  for (double v : mu)
    if (std::fabs(v) > 1e-9)
      throw argument_error("whitening: law must be centered");
  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) sigma(i, j) = cov[i][j];
  bool already = (sigma - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12;
  Whitening w;
  if (already) {
    w.transform = Mat(d, Vec(d, 0.0));
    for (int i = 0; i < d; ++i) w.transform[i][i] = 1.0;
    w.whitened = dist;
    w.identity = true;
    return w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) throw degeneracy_error("whitening: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < 1e-12 * std::max(1.0, ev.maxCoeff()))
    throw degeneracy_error("whitening: covariance is singular");
  Eigen::MatrixXd t =
      es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  w.transform = Mat(d, Vec(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) w.transform[i][j] = t(i, j);
  w.whitened = make_linear_image(w.transform, dist);
  return w;
}

std::complex<double> char_fn(const StepDistribution& dist, std::span<const double> theta) {
  const auto* as = dist.atoms();
  if (!as) throw unsupported_error("char_fn: requires a finite support");
  check_dim(theta, dist.dim(), "char_fn");
  std::complex<double> acc(0.0, 0.0);
  for (const Atom& a : *as) {
    double phase = dot(theta, a.x);
    acc += a.w * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

bool validate_lattice_declaration(const StepDistribution& dist, double tol) {
  const auto* as = dist.atoms();
  if (!as || !dist.declared_lattice()) return true;
  const LatticeStructure& ls = *dist.declared_lattice();
  int d = dist.dim();
  int t = static_cast<int>(ls.basis.size());
  if (t == 0) return true;
  Eigen::MatrixXd u(d, t);
  for (int j = 0; j < t; ++j)
    for (int i = 0; i < d; ++i) u(i, j) = ls.basis[j][i];
  Eigen::MatrixXd pinv = (u.transpose() * u).ldlt().solve(u.transpose());
  for (const Atom& a : *as) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = a.x[i];
    Eigen::VectorXd k = pinv * x;
    for (int j = 0; j < t; ++j) k(j) = std::round(k(j));
    Eigen::VectorXd resid = x - u * k;
    // the residual must lie in the declared vector part, taken orthogonal
    // to the basis span
    if ((u.transpose() * resid).cwiseAbs().maxCoeff() > tol) return false;
    if (ls.vector_dim == 0 && resid.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

AperiodicityVerdict check_aperiodicity(const StepDistribution& dist, int grid_resolution,
                                       double vector_window) {
  AperiodicityVerdict out;
  if (!dist.atoms()) {
    out.verdict = Periodicity::inconclusive;
    out.note = "requires a finite support";
    return out;
  }
  if (grid_resolution < 2) throw argument_error("check_aperiodicity: grid too coarse");
  int d = dist.dim();
  LatticeStructure ls;
  if (dist.declared_lattice()) {
    ls = *dist.declared_lattice();
  } else {
    ls.vector_dim = d;  // treat as fully nonlattice: scan a window of R^d
  }
  if (!validate_lattice_declaration(dist)) {
    out.verdict = Periodicity::inconclusive;
    out.note = "support does not match the declared lattice";
    return out;
  }

  // axis directions and half-widths of the scan box
  std::vector<Vec> axes;
  std::vector<double> half;
  for (const Vec& u : ls.basis) {
    double len = norm(u);
    Vec unit(u);
    for (double& v : unit) v /= len;
    axes.push_back(std::move(unit));
    half.push_back(kPi / len);
  }
  // orthonormal completion for the vector part
  for (int i = 0; i < d && static_cast<int>(axes.size()) < d; ++i) {
    Vec cand(d, 0.0);
    cand[i] = 1.0;
    for (const Vec& ax : axes) {
      double pr = dot(cand, ax);
      for (int j = 0; j < d; ++j) cand[j] -= pr * ax[j];
    }
    double len = norm(cand);
    if (len < 1e-9) continue;
    for (double& v : cand) v /= len;
    axes.push_back(std::move(cand));
    half.push_back(vector_window);
  }

  int64_t total = 1;
  for (int i = 0; i < d; ++i) {
    total *= grid_resolution + 1;
    if (total > (1ll << 26)) {
      out.verdict = Periodicity::inconclusive;
      out.note = "grid too large";
      return out;
    }
  }

  std::vector<int> idx(d, 0);
  Vec theta(d), coord(d);
  double best = 0.0;
  Vec best_theta(d, 0.0);
  while (true) {
    bool near_origin = true;
    for (int i = 0; i < d; ++i) {
      coord[i] = -half[i] + 2.0 * half[i] * idx[i] / grid_resolution;
      // the excluded ball reaches one grid cell; keep the cell boundary itself
      if (std::fabs(coord[i]) >= 2.0 * half[i] / grid_resolution - 1e-12) near_origin = false;
    }
    if (!near_origin) {
      for (int i = 0; i < d; ++i) {
        theta[i] = 0.0;
        for (int a = 0; a < d; ++a) theta[i] += coord[a] * axes[a][i];
      }
      double mod = std::abs(char_fn(dist, theta));
      if (mod > best) {
        best = mod;
        best_theta = theta;
      }
    }
    int c = 0;
    while (c < d && ++idx[c] > grid_resolution) idx[c++] = 0;
    if (c == d) break;
  }
  out.max_modulus = best;
  out.grid_certified = grid_resolution >= 64;
  if (best >= 1.0 - 1e-12) {
    out.verdict = Periodicity::periodic;
    out.witness = best_theta;
  } else {
    out.verdict = Periodicity::aperiodic;
  }
  return out;
}

namespace {
struct StateHash {
  size_t operator()(const std::vector<int64_t>& v) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (int64_t x : v) {
      h ^= static_cast<uint64_t>(x);
      h *= 0x100000001b3ull;
    }
    return static_cast<size_t>(h);
  }
};
}  // namespace

CmuProbe cmu_probe(const StepDistribution& dist, const geometry::Cone& cone,
                   std::span<const double> x, double gamma, double R, int n_max,
                   int64_t node_budget) {
  const auto* as = dist.atoms();
  if (!as) throw unsupported_error("cmu_probe: requires a finite support");
  if (n_max < 1 || n_max > 64) throw argument_error("cmu_probe: n_max must be in [1, 64]");
  if (!cone.contains(x)) throw precondition_error("cmu_probe: start outside the cone");
  int d = cone.dim();

  auto key_of = [d](const Vec& p) {
    std::vector<int64_t> key(d);
    for (int i = 0; i < d; ++i) key[i] = llround(p[i] * 1048576.0);
    return key;
  };
  auto in_target = [&](const Vec& p) {
    double r = norm(p);
    return r >= R && cone.boundary_distance(p) >= gamma * r;
  };

  CmuProbe out;
  std::unordered_set<std::vector<int64_t>, StateHash> seen;
  std::vector<Vec> frontier{Vec(x.begin(), x.end())};
  seen.insert(key_of(frontier[0]));
  for (int step = 1; step <= n_max; ++step) {
    std::vector<Vec> next;
    for (const Vec& state : frontier) {
      for (const Atom& a : *as) {
        Vec y(d);
        for (int i = 0; i < d; ++i) y[i] = state[i] + a.x[i];
        if (!cone.contains(y)) continue;
        auto key = key_of(y);
        if (!seen.insert(std::move(key)).second) continue;
        ++out.nodes_expanded;
        if (out.nodes_expanded > node_budget) {
          out.budget_exceeded = true;
          return out;
        }
        if (in_target(y)) {
          out.reachable = true;
          out.steps_to_reach = step;
          out.witness = y;
          return out;
        }
        next.push_back(std::move(y));
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_ws(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

Vec parse_point(const std::string& s) {
  std::string body = s;
  if (!body.empty() && body.front() == '(' && body.back() == ')')
    body = body.substr(1, body.size() - 2);
  Vec out;
  for (const std::string& tok : split_top(body, ','))
    out.push_back(std::stod(tok));
  return out;
}

}  // namespace

StepsPtr parse_steps(const std::string& text) {
  std::string s = strip_ws(text);
  auto call = [&](const std::string& name, char open, char close) -> std::optional<std::string> {
    if (s.rfind(name + open, 0) == 0 && s.back() == close)
      return s.substr(name.size() + 1, s.size() - name.size() - 2);
    return std::nullopt;
  };
  if (auto arg = call("gaussian", '(', ')')) return make_gaussian(std::stoi(*arg));
  if (auto arg = call("uniform_cube", '(', ')')) {
    auto parts = split_top(*arg, ',');
    if (parts.size() != 2) throw config_error("uniform_cube(d, side)");
    return make_uniform_cube(std::stoi(parts[0]), std::stod(parts[1]));
  }
  if (auto arg = call("atoms", '[', ']')) {
    std::vector<Atom> atoms;
    for (const std::string& entry : split_top(*arg, ';')) {
      std::string body = entry;
      if (body.empty()) continue;
      if (body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
      auto parts = split_top(body, ',');
      if (parts.size() < 2) throw config_error("atoms entry needs a point and a weight");
      std::string weight = parts.back();
      std::string point = body.substr(0, body.size() - weight.size() - 1);
      atoms.push_back({parse_point(point), std::stod(weight)});
    }
    return make_atoms(std::move(atoms));
  }
  if (auto arg = call("product", '[', ']')) {
    std::vector<StepsPtr> parts;
    for (const std::string& entry : split_top(*arg, ';')) parts.push_back(parse_steps(entry));
    return make_product(std::move(parts));
  }
  throw config_error("unrecognized steps spec: " + text);
}

}  // namespace conewalk::steps
