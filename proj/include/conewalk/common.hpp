#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

// Points and increments are low-dimensional; kernels use fixed stack buffers.
inline constexpr int kMaxDim = 8;

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, square in practice

struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degeneracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline void check_dim(std::span<const double> x, int d, const char* who) {
  if (static_cast<int>(x.size()) != d)
    throw argument_error(std::string(who) + ": dimension mismatch, expected " +
                         std::to_string(d) + ", got " + std::to_string(x.size()));
}

// Shortest-possible decimal that round-trips a double. Used for every number
// we write to CSV/JSON so output bytes are reproducible.
std::string fmt_double(double v);

// FNV-1a, non-cryptographic; good enough to fingerprint configs in manifests.
uint64_t fnv1a64(std::span<const char> data, uint64_t seed = 0xcbf29ce484222325ull);
std::string hex64(uint64_t v);

// SplitMix64 finalizer; used to derive stream keys and reservoir priorities.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse of normal_cdf, Newton-refined; |error| < 1e-13 on (1e-300, 1-1e-16).
double normal_quantile(double p);

}  // namespace conewalk
