#pragma once

#include "chernlab/core.hpp"
#include "chernlab/model.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <vector>

namespace chernlab {

// k is given by its reduced phases: k . delta = k1 d1 + k2 d2 for delta = d1 a1 + d2 a2,
// i.e. k = (k1 b1 + k2 b2) / (2 pi) in the dual basis.
using KPoint = std::array<double, 2>;

inline MatC bloch_matrix(const HoppingModel& m, KPoint k) {
  require(m.B == 0.0, "flux", "Bloch analysis needs an ordinarily periodic model (B = 0)");
  MatC H = m.zero();
  for (const auto& [d, h] : m.hoppings) H += std::polar(1.0, k[0] * double(d.g1) + k[1] * double(d.g2)) * h;
  return 0.5 * (H + H.adjoint());
}

inline KPoint cartesian_to_reduced(const LatticeBasis& basis, std::array<double, 2> kc) {
  return {kc[0] * basis.a1[0] + kc[1] * basis.a1[1], kc[0] * basis.a2[0] + kc[1] * basis.a2[1]};
}

struct BlochEig {
  VecD values;
  MatC vectors;
};

inline BlochEig bloch_eig(const HoppingModel& m, KPoint k) {
  const MatC H = bloch_matrix(m, k);
  BlochEig out;
  if (m.n == 2) {
    const double a = H(0, 0).real(), d = H(1, 1).real();
    const cplx c = H(0, 1);
    const double mid = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), std::abs(c));
    out.values.resize(2);
    out.values << mid - rad, mid + rad;
    out.vectors.resize(2, 2);
    for (int b = 0; b < 2; ++b) {
      const double E = out.values(b);
      Eigen::Vector2cd v1(c, E - a), v2(E - d, std::conj(c));
      Eigen::Vector2cd v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
      if (v.squaredNorm() < 1e-300) v = (b == 0) == (a <= d) ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
      out.vectors.col(b) = v.normalized();
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatC> es(H);
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

inline VecD bloch_eigenvalues(const HoppingModel& m, KPoint k) { return bloch_eig(m, k).values; }

struct BandStructure {
  std::vector<std::array<double, 2>> bands;  // [alpha_i, beta_i]
  std::vector<double> gaps;                  // alpha_{i+1} - beta_i, clamped at 0
  std::vector<bool> gap_open;
  std::vector<double> refinement;  // per gap, largest polishing correction of its two edges
  long grid = 0;

  double gap(std::size_t i) const { return gaps.at(i - 1); }  // 1-based like the bands
};

namespace detail {

// Compass search for a local extremum of one band around a start point.
inline double polish_band(const HoppingModel& m, int band, KPoint k, double step, double sign) {
  auto f = [&](KPoint q) { return sign * bloch_eigenvalues(m, q)(band); };
  double best = f(k);
  while (step > 1e-11) {
    bool moved = false;
    for (int dir = 0; dir < 8 && !moved; ++dir) {
      static constexpr double dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
      static constexpr double dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
      KPoint q{k[0] + step * dx[dir], k[1] + step * dy[dir]};
      const double v = f(q);
      if (v < best - 1e-15) {
        best = v;
        k = q;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return sign * best;
}

}  // namespace detail

inline BandStructure band_structure(const HoppingModel& m, long grid) {
  require(grid >= 2, "invalid grid", "k-grid must have at least 2 points per direction");
  const int n = m.n;
  std::vector<double> lo(n, 1e300), hi(n, -1e300);
  std::vector<KPoint> klo(n), khi(n);
  for (long i = 0; i < grid; ++i)
    for (long j = 0; j < grid; ++j) {
      const KPoint k{2 * kPi * double(i) / double(grid), 2 * kPi * double(j) / double(grid)};
      const VecD e = bloch_eigenvalues(m, k);
      for (int b = 0; b < n; ++b) {
        if (e(b) < lo[b]) lo[b] = e(b), klo[b] = k;
        if (e(b) > hi[b]) hi[b] = e(b), khi[b] = k;
      }
    }
  const double h = 2 * kPi / double(grid);
  std::vector<double> dlo(n), dhi(n);
  BandStructure bs;
  bs.grid = grid;
  for (int b = 0; b < n; ++b) {
    const double plo = std::min(lo[b], detail::polish_band(m, b, klo[b], h, +1.0));
    const double phi = std::max(hi[b], detail::polish_band(m, b, khi[b], h, -1.0));
    dlo[b] = lo[b] - plo;
    dhi[b] = phi - hi[b];
    bs.bands.push_back({plo, phi});
  }
  for (int b = 0; b + 1 < n; ++b) {
    const double g = bs.bands[b + 1][0] - bs.bands[b][1];
    const double corr = std::max(dhi[b], dlo[b + 1]);
    bs.refinement.push_back(corr);
    bs.gap_open.push_back(g > std::max(3.0 * corr, 1e-9));
    bs.gaps.push_back(std::max(g, 0.0));
  }
  return bs;
}

inline double spectrum_norm(const BandStructure& bs) {
  return std::max(std::abs(bs.bands.front()[0]), std::abs(bs.bands.back()[1]));
}

struct ChernResult {
  long value = 0;
  double curvature_sum = 0;
  double max_plaquette = 0;  // largest |Berry flux| through one plaquette, radians
  long grid = 0;
};

// Link-variable lattice curvature for the projection onto the lowest
// `filled` bands. Orientation: plaquette (k, k+e1, k+e1+e2, k+e2).
inline ChernResult chern_fhs(const HoppingModel& m, int filled, long grid) {
  const long G = grid;
  std::vector<MatC> V(std::size_t(G * G));
  for (long i = 0; i < G; ++i)
    for (long j = 0; j < G; ++j)
      V[std::size_t(i * G + j)] =
          bloch_eig(m, {2 * kPi * double(i) / double(G), 2 * kPi * double(j) / double(G)}).vectors.leftCols(filled);
  auto at = [&](long i, long j) -> const MatC& { return V[std::size_t(pos_mod(i, G) * G + pos_mod(j, G))]; };
  auto link = [&](const MatC& a, const MatC& b) {
    const cplx d = (a.adjoint() * b).determinant();
    return d / std::abs(d);
  };
  ChernResult res;
  res.grid = G;
  double total = 0;
  for (long i = 0; i < G; ++i)
    for (long j = 0; j < G; ++j) {
      const cplx u = link(at(i, j), at(i + 1, j)) * link(at(i + 1, j), at(i + 1, j + 1)) *
                     link(at(i + 1, j + 1), at(i, j + 1)) * link(at(i, j + 1), at(i, j));
      const double f = std::arg(u);
      res.max_plaquette = std::max(res.max_plaquette, std::abs(f));
      total += f;
    }
  // With this orientation the sum approximates (1/2 pi i) int Tr P [d1 P, d2 P] dk.
  res.curvature_sum = total / (2 * kPi);
  res.value = std::lround(res.curvature_sum);
  return res;
}

// Doubles the grid until no plaquette carries more than `max_flux` radians.
inline ChernResult chern_number(const HoppingModel& m, int gap_index, long grid, double max_flux = 0.5,
                                long grid_cap = 1536) {
  require(gap_index >= 1 && gap_index < m.n, "invalid gap", "gap index out of range");
  const BandStructure bs = band_structure(m, std::max(grid, 24L));
  if (!bs.gap_open[std::size_t(gap_index - 1)]) throw Error("gapless", "requested gap is closed");
  ChernResult r = chern_fhs(m, gap_index, grid);
  while (r.max_plaquette > max_flux && 2 * r.grid <= grid_cap) r = chern_fhs(m, gap_index, 2 * r.grid);
  return r;
}

inline bool haldane_gapless(const HaldaneParams& p) {
  const double lhs = std::abs(p.M), rhs = 3.0 * std::sqrt(3.0) * p.t2 * std::abs(std::sin(p.phi));
  if (lhs == 0.0 && rhs < 1e-300) return true;
  return std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs);
}

struct PhasePoint {
  double phi, M_over_t2;
  long chern;  // 0 is also reported for gapless points, flagged separately
  bool gapless;
  long grid;
};

// Refinement stops at grid_cap: points that need more sit next to the critical curve anyway.
inline std::vector<PhasePoint> haldane_phase_diagram(HaldaneParams base, long nphi, long nM, double Mmax, long grid,
                                                     long grid_cap = 384) {
  std::vector<PhasePoint> out;
  for (long i = 0; i < nphi; ++i)
    for (long j = 0; j < nM; ++j) {
      HaldaneParams p = base;
      p.phi = -kPi + 2 * kPi * double(i) / double(nphi - 1);
      const double mt = -Mmax + 2 * Mmax * double(j) / double(nM - 1);
      p.M = mt * p.t2;
      PhasePoint pt{p.phi, mt, 0, false, 0};
      try {
        const ChernResult c = chern_number(haldane_model(p), 1, grid, 0.5, grid_cap);
        pt.chern = c.value;
        pt.grid = c.grid;
      } catch (const Error& e) {
        if (e.label() != "gapless") throw;
        pt.gapless = true;
      }
      out.push_back(pt);
    }
  return out;
}

}  // namespace chernlab
