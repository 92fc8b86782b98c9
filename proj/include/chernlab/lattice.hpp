#pragma once

#include "chernlab/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <vector>

namespace chernlab {

struct LatticeBasis {
  std::array<double, 2> a1{1.5, 0.8660254037844386};
  std::array<double, 2> a2{-1.5, 0.8660254037844386};

  double area() const { return a1[0] * a2[1] - a1[1] * a2[0]; }
  void validate() const {
    require(std::abs(area()) > 1e-14, "invalid basis", "a1 and a2 are linearly dependent");
  }
  // Dual vectors with a_i . b_j = 2 pi delta_ij.
  std::array<std::array<double, 2>, 2> dual() const {
    const double det = area();
    return {{{2 * kPi * a2[1] / det, -2 * kPi * a2[0] / det},
             {-2 * kPi * a1[1] / det, 2 * kPi * a1[0] / det}}};
  }
};

// Integer coefficients in the (a1, a2) basis.
struct LatticePoint {
  long g1 = 0;
  long g2 = 0;

  friend LatticePoint operator+(LatticePoint x, LatticePoint y) { return {x.g1 + y.g1, x.g2 + y.g2}; }
  friend LatticePoint operator-(LatticePoint x, LatticePoint y) { return {x.g1 - y.g1, x.g2 - y.g2}; }
  friend LatticePoint operator-(LatticePoint x) { return {-x.g1, -x.g2}; }
  friend LatticePoint operator*(long k, LatticePoint x) { return {k * x.g1, k * x.g2}; }
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

inline long wedge(LatticePoint x, LatticePoint y) { return x.g2 * y.g1 - x.g1 * y.g2; }
inline double norm(LatticePoint x) { return std::hypot(double(x.g1), double(x.g2)); }
inline long norm_inf(LatticePoint x) { return std::max(std::labs(x.g1), std::labs(x.g2)); }

inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline long pos_mod(long a, long m) { return ((a % m) + m) % m; }

class Box {
 public:
  Box() = default;
  explicit Box(long L) : L_(L) {
    require(L >= 1, "invalid box", "side length must be positive");
    lo_ = -(L / 2);
    sites_.reserve(std::size_t(L * L));
    for (long i = 0; i < L; ++i)
      for (long j = 0; j < L; ++j) sites_.push_back({lo_ + i, lo_ + j});
  }

  long L() const { return L_; }
  long lo() const { return lo_; }
  long hi() const { return lo_ + L_ - 1; }
  std::size_t size() const { return sites_.size(); }
  const std::vector<LatticePoint>& sites() const { return sites_; }
  const LatticePoint& operator[](std::size_t k) const { return sites_[k]; }

  bool contains(LatticePoint x) const {
    return x.g1 >= lo_ && x.g1 <= hi() && x.g2 >= lo_ && x.g2 <= hi();
  }
  // Row-major rank; -1 when outside.
  long rank(LatticePoint x) const {
    if (!contains(x)) return -1;
    return (x.g1 - lo_) * L_ + (x.g2 - lo_);
  }
  // Representative of x modulo L Gamma inside the box.
  LatticePoint wrap(LatticePoint x) const {
    return {lo_ + pos_mod(x.g1 - lo_, L_), lo_ + pos_mod(x.g2 - lo_, L_)};
  }
  // Shortest representative of a displacement modulo L Gamma.
  LatticePoint min_image(LatticePoint d) const {
    auto f = [this](long v) {
      long w = pos_mod(v, L_);
      return (2 * w > L_) ? w - L_ : w;
    };
    return {f(d.g1), f(d.g2)};
  }

 private:
  long L_ = 0;
  long lo_ = 0;
  std::vector<LatticePoint> sites_;
};

inline Box box_sites(long L) { return Box(L); }

// Sites of the box within sup-distance r of the complement.
inline std::vector<LatticePoint> inner_boundary(const Box& box, long r) {
  require(r >= 1, "invalid range", "r must be positive");
  std::vector<LatticePoint> out;
  for (const auto& x : box.sites()) {
    long d = std::min({x.g1 - box.lo(), box.hi() - x.g1, x.g2 - box.lo(), box.hi() - x.g2});
    if (d < r) out.push_back(x);
  }
  return out;
}

inline bool is_suitable_side(long L, long r) { return L > 4 * r && (L - 4 * r) % 3 == 0; }

inline Box core_sites(const Box& box, long r) {
  require(r >= 1, "invalid range", "r must be positive");
  require(is_suitable_side(box.L(), r), "invalid box",
          "side " + std::to_string(box.L()) + " is not of the form 3k+4r");
  return Box((box.L() + 2 * r) / 3);
}

}  // namespace chernlab
