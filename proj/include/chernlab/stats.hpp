#pragma once

#include "chernlab/core.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

namespace chernlab {

struct MeanErr {
  double mean = 0;
  double stderr_ = 0;
  long n = 0;
};

// Fixed summation order so results never depend on scheduling.
inline MeanErr mean_stderr(const std::vector<double>& xs) {
  MeanErr r;
  r.n = long(xs.size());
  if (xs.empty()) return r;
  double s = 0;
  for (double x : xs) s += x;
  r.mean = s / double(r.n);
  if (r.n > 1) {
    double v = 0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(v / double(r.n - 1) / double(r.n));
  }
  return r;
}

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

struct Interval {
  double lo, hi;
};

inline Interval wilson(long successes, long n, double z = kZ99) {
  if (n == 0) return {0, 1};
  const double p = double(successes) / double(n), nn = double(n), z2 = z * z;
  const double c = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double h = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, c - h), std::min(1.0, c + h)};
}

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit", "need at least two points");
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

inline LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// out[i] = fn(i) evaluated on a worker pool; output order is the index order.
template <class R, class Fn>
std::vector<R> parallel_map(long count, int threads, Fn&& fn) {
  std::vector<R> out(std::size_t(std::max(count, 0L)));
  std::vector<std::exception_ptr> errs(out.size());
  std::atomic<long> next{0};
  auto work = [&] {
    for (long i = next++; i < count; i = next++) {
      try {
        out[std::size_t(i)] = fn(i);
      } catch (...) {
        errs[std::size_t(i)] = std::current_exception();
      }
    }
  };
  const int T = std::max(1, std::min<int>(resolve_threads(threads), int(std::max(count, 1L))));
  if (T == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace chernlab
