#pragma once

#include <complex>
#include <memory>
#include <optional>

#include "conewalk/geometry.hpp"
#include "conewalk/rng.hpp"

namespace conewalk::steps {

// Declared group structure of the increment support: a vector part of
// dimension `vector_dim` plus the integer span of `basis`. Declared in config,
// not inferred; validated against finite supports.
struct LatticeStructure {
  int vector_dim = 0;
  std::vector<Vec> basis;
};

struct Atom {
  Vec x;
  double w;
};

class StepDistribution {
 public:
  virtual ~StepDistribution() = default;
  virtual int dim() const = 0;
  // overwrite `out` with one increment
  virtual void sample(rng::Stream& stream, std::span<double> out) const = 0;
  virtual Vec mean() const = 0;
  virtual Mat covariance() const = 0;
  virtual std::string describe() const = 0;
  virtual const std::vector<Atom>* atoms() const { return nullptr; }

  const std::optional<LatticeStructure>& declared_lattice() const { return lattice_; }
  void declare_lattice(LatticeStructure s);
  std::optional<double> declared_moment_order() const { return moment_order_; }
  void declare_moment_order(double a) { moment_order_ = a; }

 protected:
  std::optional<LatticeStructure> lattice_;
  std::optional<double> moment_order_;
};

using StepsPtr = std::shared_ptr<StepDistribution>;

StepsPtr make_gaussian(int d);
StepsPtr make_uniform_cube(int d, double side);
StepsPtr make_atoms(std::vector<Atom> atoms);
StepsPtr make_product(std::vector<StepsPtr> one_dim_laws);
// exact pushforward by an invertible matrix; finite supports stay finite
StepsPtr make_linear_image(const Mat& transform, const StepsPtr& base);

struct Moments {
  Vec mean;
  Mat covariance;
  bool exact = true;
};
Moments moments(const StepDistribution& dist);

struct Whitening {
  Mat transform;  // inverse principal square root of the covariance
  StepsPtr whitened;
  bool identity = false;
};
// Throws degeneracy_error when the covariance is singular.
Whitening whitening_transform(const StepsPtr& dist);

// Exact finite sum; requires finite support.
std::complex<double> char_fn(const StepDistribution& dist, std::span<const double> theta);

enum class Periodicity { aperiodic, periodic, inconclusive };

struct AperiodicityVerdict {
  Periodicity verdict = Periodicity::inconclusive;
  Vec witness;             // a theta with |char_fn| ~ 1, when periodic
  double max_modulus = 0;  // largest |char_fn| seen off the origin
  bool grid_certified = false;
  std::string note;
};

// Scans |char_fn| over the fundamental box of the declared lattice part
// (intervals [-pi/|u_j|, pi/|u_j|] along each basis direction) and a compact
// window of the vector part, excluding one grid cell around the origin.
// Verdicts are grid-certified only.
AperiodicityVerdict check_aperiodicity(const StepDistribution& dist, int grid_resolution,
                                       double vector_window = 8.0);

// Validates that every atom decomposes as (vector part) + integer combination
// of the declared basis, to the given tolerance.
bool validate_lattice_declaration(const StepDistribution& dist, double tol = 1e-9);

struct CmuProbe {
  bool reachable = false;
  int steps_to_reach = -1;
  Vec witness;  // state in the target set, when reachable
  bool budget_exceeded = false;
  int64_t nodes_expanded = 0;
};

// Breadth-first search over states x + S(k) staying in the cone, k <= n_max,
// looking for a state with |y| >= R and dist(y, boundary) >= gamma * |y|.
CmuProbe cmu_probe(const StepDistribution& dist, const geometry::Cone& cone,
                   std::span<const double> x, double gamma, double R, int n_max,
                   int64_t node_budget = 1 << 20);

// Config grammar: gaussian(d) | atoms[(x1,...,xd),w;...] | uniform_cube(d,side)
// | product[law;law;...]
StepsPtr parse_steps(const std::string& text);

}  // namespace conewalk::steps
