#pragma once

#include "chernlab/core.hpp"
#include "chernlab/lattice.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace chernlab {

// Finite-range hopping data plus a flux parameter. The operator kernel is
//   H(eta, xi) = exp(i B eta^xi) * hoppings[xi - eta]
// which is the gauge satisfying H(eta+g, xi+g) = exp(-i B g^(eta-xi)) H(eta, xi).
struct HoppingModel {
  LatticeBasis basis;
  int n = 1;
  long r = 1;
  std::map<LatticePoint, MatC> hoppings;
  double B = 0.0;
  // Explicit kernel overrides for (eta, xi); the adjoint entry is implied.
  // Used to model broken periodicity.
  std::map<std::pair<LatticePoint, LatticePoint>, MatC> defects;

  MatC zero() const { return MatC::Zero(n, n); }

  // Largest q <= 1000 with q B / (2 pi) integral, 0 when B is not such a rational.
  long flux_period() const {
    const double x = B / (2 * kPi);
    for (long q = 1; q <= 1000; ++q) {
      const double y = q * x;
      if (std::abs(y - std::round(y)) < 1e-12) return q;
    }
    return 0;
  }

  void validate() const {
    basis.validate();
    require(n >= 1, "invalid model", "orbital count must be positive");
    require(r >= 1, "invalid model", "hopping range must be positive");
    for (const auto& [d, h] : hoppings) {
      require(h.rows() == n && h.cols() == n, "invalid model", "hopping block has wrong shape");
      require(norm_inf(d) <= r, "invalid model", "hopping beyond declared range");
      auto it = hoppings.find(-d);
      const MatC partner = it == hoppings.end() ? zero() : it->second;
      require((h - partner.adjoint()).cwiseAbs().maxCoeff() < 1e-12, "invalid model",
              "hoppings are not Hermitian under delta -> -delta");
    }
  }

  const MatC* hop(LatticePoint d) const {
    auto it = hoppings.find(d);
    return it == hoppings.end() ? nullptr : &it->second;
  }
};

inline MatC kernel(const HoppingModel& m, LatticePoint eta, LatticePoint xi) {
  if (!m.defects.empty()) {
    if (auto it = m.defects.find({eta, xi}); it != m.defects.end()) return it->second;
    if (auto it = m.defects.find({xi, eta}); it != m.defects.end()) return it->second.adjoint();
  }
  const LatticePoint d = xi - eta;
  if (norm_inf(d) > m.r) return m.zero();
  const MatC* h = m.hop(d);
  if (!h) return m.zero();
  if (m.B == 0.0) return *h;
  return std::polar(1.0, m.B * double(wedge(eta, xi))) * (*h);
}

// sup over sites of the summed block 2-norms of the kernel row.
inline double row_norm_bound(const HoppingModel& m) {
  double s = 0;
  for (const auto& [d, h] : m.hoppings) s += Eigen::JacobiSVD<MatC>(h).singularValues()(0);
  return s;
}

inline bool check_magnetic_periodicity(const HoppingModel& m, long L) {
  const Box box(L);
  const LatticePoint gens[2] = {{1, 0}, {0, 1}};
  double dev = 0;
  for (const auto& g : gens)
    for (const auto& eta : box.sites())
      for (const auto& xi : box.sites()) {
        const cplx ph = std::polar(1.0, -m.B * double(wedge(g, eta - xi)));
        dev = std::max(dev, (kernel(m, eta + g, xi + g) - ph * kernel(m, eta, xi)).cwiseAbs().maxCoeff());
      }
  return dev < 1e-12;
}

enum class Dimerization { d1, d2, d3 };

struct HaldaneParams {
  double t1 = 1.0;
  double t2 = 1.0 / (3.0 * std::sqrt(3.0));
  double phi = kPi / 2;
  double M = 0.0;
  Dimerization dimerization = Dimerization::d3;

  void validate() const {
    require(t1 > 0, "invalid parameters", "t1 must be positive");
    require(t2 >= 0, "invalid parameters", "t2 must be nonnegative");
  }
};

// Orbital 0 is sublattice A at gamma, orbital 1 sublattice B at gamma + nu.
// For each dimerization nu the three nearest B neighbours of A(0) sit in the
// cells listed below; next-nearest hops are the same for every choice.
inline HoppingModel haldane_model(const HaldaneParams& p) {
  p.validate();
  HoppingModel m;
  m.n = 2;
  m.r = 1;
  auto add = [&m](LatticePoint d, int i, int j, cplx v) {
    auto& h = m.hoppings.try_emplace(d, MatC::Zero(2, 2)).first->second;
    h(i, j) += v;
    auto& hc = m.hoppings.try_emplace(-d, MatC::Zero(2, 2)).first->second;
    if (d == LatticePoint{0, 0}) {
      if (i != j) hc(j, i) += std::conj(v);
    } else {
      hc(j, i) += std::conj(v);
    }
  };
  m.hoppings[{0, 0}] = MatC::Zero(2, 2);
  m.hoppings[{0, 0}](0, 0) = p.M;
  m.hoppings[{0, 0}](1, 1) = -p.M;

  std::array<LatticePoint, 3> nn;
  switch (p.dimerization) {
    case Dimerization::d3: nn = {{{0, 0}, {1, 0}, {0, -1}}}; break;
    case Dimerization::d1: nn = {{{0, 0}, {0, 1}, {1, 1}}}; break;
    case Dimerization::d2: nn = {{{0, 0}, {-1, 0}, {-1, -1}}}; break;
  }
  for (const auto& s : nn) add(s, 0, 1, p.t1);

  const cplx ea = std::polar(p.t2, -p.phi);
  const cplx eb = std::polar(p.t2, p.phi);
  for (LatticePoint a : {LatticePoint{1, 0}, LatticePoint{0, 1}, LatticePoint{-1, -1}}) {
    add(a, 0, 0, ea);
    add(a, 1, 1, eb);
  }
  return m;
}

}  // namespace chernlab
