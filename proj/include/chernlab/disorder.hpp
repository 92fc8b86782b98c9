#pragma once

#include "chernlab/core.hpp"
#include "chernlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chernlab {

enum class DistKind { uniform, truncated_gaussian, custom_density };

inline std::string to_string(DistKind k) {
  switch (k) {
    case DistKind::uniform: return "uniform";
    case DistKind::truncated_gaussian: return "truncated_gaussian";
    case DistKind::custom_density: return "custom_density";
  }
  return "?";
}

// Single-site law supported on [-a, b].
struct DistributionSpec {
  DistKind kind = DistKind::uniform;
  double a = 1.0;
  double b = 1.0;
  double tau = 1.0;
  double C_tau = 0.5;
  // Edge decay exponent; +inf encodes "faster than any power", empty means not available.
  std::optional<double> beta;
  double beta_C = 1.0;
  // Tabulated density for custom_density: nodes ascending from -a to b, piecewise linear.
  std::vector<double> xs, fs;
  // custom: cumulative mass at each node after normalization
  std::vector<double> cum;

  double width() const { return a + b; }
  bool beta_infinite() const { return beta && std::isinf(*beta); }

  void validate() const {
    require(a >= 0 && b >= 0 && a + b > 0, "invalid distribution", "support [-a,b] must have a+b > 0");
    require(tau > 0 && tau <= 1, "invalid distribution", "Hoelder exponent must lie in (0,1]");
    if (beta) require(*beta > 2, "invalid distribution", "edge exponent beta must exceed 2");
  }

  double pdf(double v) const {
    if (v < -a || v > b) return 0.0;
    switch (kind) {
      case DistKind::uniform: return 1.0 / (a + b);
      case DistKind::truncated_gaussian: return std::exp(-0.5 * v * v) / std::sqrt(2 * kPi) / std::erf(a / std::sqrt(2.0));
      case DistKind::custom_density: {
        auto it = std::upper_bound(xs.begin(), xs.end(), v);
        if (it == xs.begin()) return fs.front() / cum.back();
        if (it == xs.end()) return fs.back() / cum.back();
        const std::size_t k = std::size_t(it - xs.begin()) - 1;
        const double t = (v - xs[k]) / (xs[k + 1] - xs[k]);
        return ((1 - t) * fs[k] + t * fs[k + 1]) / cum.back();
      }
    }
    return 0.0;
  }

  double cdf(double v) const {
    if (v <= -a) return 0.0;
    if (v >= b) return 1.0;
    switch (kind) {
      case DistKind::uniform: return (v + a) / (a + b);
      case DistKind::truncated_gaussian: {
        const double z = std::erf(a / std::sqrt(2.0));
        return (std::erf(v / std::sqrt(2.0)) + z) / (2 * z);
      }
      case DistKind::custom_density: {
        auto it = std::upper_bound(xs.begin(), xs.end(), v);
        const std::size_t k = std::size_t(it - xs.begin()) - 1;
        const double h = v - xs[k];
        const double slope = (fs[k + 1] - fs[k]) / (xs[k + 1] - xs[k]);
        return (cum[k] + fs[k] * h + 0.5 * slope * h * h) / cum.back();
      }
    }
    return 0.0;
  }

  // Bisection to 1e-14 in v.
  double quantile(double u) const {
    if (kind == DistKind::uniform) return -a + u * (a + b);
    double lo = -a, hi = b;
    while (hi - lo > 1e-14) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // E|v| by the midpoint rule on the support.
  double mean_abs() const {
    double s = 0;
    const int K = 4000;
    const double h = (a + b) / K;
    for (int i = 0; i < K; ++i) {
      const double v = -a + (i + 0.5) * h;
      s += std::abs(v) * pdf(v) * h;
    }
    return s;
  }
};

inline DistributionSpec uniform_dist(double a, double b) {
  DistributionSpec d;
  d.kind = DistKind::uniform;
  d.a = a;
  d.b = b;
  d.tau = 1;
  d.C_tau = 1.0 / (a + b);
  d.validate();
  return d;
}

inline DistributionSpec truncated_gaussian(double a) {
  require(a >= 1, "invalid distribution", "truncated Gaussian needs a >= 1");
  DistributionSpec d;
  d.kind = DistKind::truncated_gaussian;
  d.a = a;
  d.b = a;
  d.tau = 1;
  d.C_tau = 1.0 / (std::sqrt(2 * kPi) * std::erf(a / std::sqrt(2.0)));
  d.beta = std::numeric_limits<double>::infinity();
  d.validate();
  return d;
}

// L1 norm of the standard normal density over [-a, a].
inline double gaussian_mass(double a) { return std::erf(a / std::sqrt(2.0)); }

inline DistributionSpec custom_density(std::vector<double> xs, std::vector<double> fs) {
  require(xs.size() >= 2 && xs.size() == fs.size(), "invalid distribution", "density table needs >= 2 nodes");
  require(std::is_sorted(xs.begin(), xs.end()), "invalid distribution", "density nodes must ascend");
  for (double f : fs)
    require(std::isfinite(f) && f >= 0, "unbounded density", "density values must be finite and nonnegative");
  DistributionSpec d;
  d.kind = DistKind::custom_density;
  d.a = -xs.front();
  d.b = xs.back();
  d.xs = std::move(xs);
  d.fs = std::move(fs);
  d.cum.assign(d.xs.size(), 0.0);
  for (std::size_t k = 1; k < d.xs.size(); ++k)
    d.cum[k] = d.cum[k - 1] + 0.5 * (d.fs[k] + d.fs[k - 1]) * (d.xs[k] - d.xs[k - 1]);
  require(d.cum.back() > 0, "invalid distribution", "density has zero mass");
  d.tau = 1;
  d.C_tau = *std::max_element(d.fs.begin(), d.fs.end()) / d.cum.back();
  d.validate();
  return d;
}

struct HolderData {
  double tau;
  double C_tau;
};

// sup_u rho([u, u+t]) / t^tau; bounded densities give tau = 1 and the sup norm.
inline HolderData holder_constant(const DistributionSpec& d) {
  switch (d.kind) {
    case DistKind::uniform: return {1.0, 1.0 / (d.a + d.b)};
    case DistKind::truncated_gaussian: return {1.0, d.pdf(0.0)};
    case DistKind::custom_density: {
      require(std::isfinite(d.C_tau), "unbounded density", "no computable Hoelder constant");
      return {1.0, d.C_tau};
    }
  }
  throw Error("unbounded density", "unknown distribution kind");
}

// Counter-based hashing: every draw is a pure function of its indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
inline std::uint64_t hash64(std::uint64_t x, std::uint64_t y) {
  return splitmix64(splitmix64(x) ^ (y * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}
inline std::uint64_t hash64(std::uint64_t x, std::uint64_t y, std::uint64_t z) { return hash64(hash64(x, y), z); }

// Uniform in (0,1), never hitting the endpoints.
inline double unit_open(std::uint64_t h) { return (double(h >> 11) + 0.5) * 0x1.0p-53; }

struct DisorderSample {
  std::vector<double> values;  // indexed site_rank * n + orbital
  std::uint64_t seed = 0;
  std::uint64_t realization_index = 0;
  int n = 1;
  long L = 0;

  double at(std::size_t site_rank, int orbital) const { return values[site_rank * std::size_t(n) + std::size_t(orbital)]; }
};

inline DisorderSample sample_potential(const DistributionSpec& d, const Box& box, int n, std::uint64_t seed,
                                       std::uint64_t realization_index) {
  DisorderSample s;
  s.seed = seed;
  s.realization_index = realization_index;
  s.n = n;
  s.L = box.L();
  s.values.resize(box.size() * std::size_t(n));
  const std::uint64_t sub = hash64(seed, realization_index);
  for (std::size_t k = 0; k < box.size(); ++k)
    for (int i = 0; i < n; ++i)
      s.values[k * std::size_t(n) + std::size_t(i)] = d.quantile(unit_open(hash64(sub, k, std::uint64_t(i))));
  return s;
}

inline DisorderSample zero_sample(const Box& box, int n) {
  DisorderSample s;
  s.n = n;
  s.L = box.L();
  s.values.assign(box.size() * std::size_t(n), 0.0);
  return s;
}

}  // namespace chernlab
