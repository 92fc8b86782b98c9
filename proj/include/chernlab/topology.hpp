#pragma once

#include "chernlab/core.hpp"
#include "chernlab/finite_volume.hpp"
#include "chernlab/lattice.hpp"
#include "chernlab/linalg.hpp"

#include <cmath>
#include <vector>

namespace chernlab {

struct MarkerResult {
  double value = 0;
  long window_L = 0;
  double imag_residual = 0;
};

namespace detail {

inline std::vector<long> window_ranks(const Box& box, long window_L, LatticePoint shift) {
  require(window_L >= 1 && window_L <= box.L(), "window too large", "marker window must fit inside the box");
  std::vector<long> out;
  const Box w(window_L);
  for (const auto& x : w.sites()) {
    const long k = box.rank(x + shift);
    require(k >= 0, "window too large", "shifted window leaves the box");
    out.push_back(k);
  }
  return out;
}

inline VecD coord(const Box& box, int n, int axis) {
  VecD x(long(box.size()) * n);
  for (std::size_t k = 0; k < box.size(); ++k)
    for (int i = 0; i < n; ++i) x(long(k) * n + i) = double(axis == 0 ? box[k].g1 : box[k].g2);
  return x;
}

// Tr over the window of P[[X1,P],[X2,P]]P given U = P restricted to window columns
// and an applier of P.
template <class ApplyP>
MarkerResult marker_core(const MatC& U, const Box& box, int n, long window_L, ApplyP&& applyP) {
  const VecD x1 = coord(box, n, 0), x2 = coord(box, n, 1);
  const MatC A1 = x1.asDiagonal() * U, A2 = x2.asDiagonal() * U;
  const MatC Y1 = applyP(A1), Y2 = applyP(A2);
  // c = -P X1 Q X2 P + P X2 Q X1 P on the window diagonal
  cplx tr = 0;
  for (long c = 0; c < U.cols(); ++c) {
    const cplx z12 = A1.col(c).dot(A2.col(c)) - Y1.col(c).dot(Y2.col(c));
    const cplx z21 = A2.col(c).dot(A1.col(c)) - Y2.col(c).dot(Y1.col(c));
    tr += z21 - z12;
  }
  const double vol = double(window_L * window_L);
  const cplx val = cplx(0, 2 * kPi) * tr / vol;
  return {val.real(), window_L, std::abs(val.imag())};
}

inline std::vector<long> window_columns(const Box& box, int n, long window_L, LatticePoint shift) {
  std::vector<long> cols;
  for (long k : window_ranks(box, window_L, shift))
    for (int i = 0; i < n; ++i) cols.push_back(k * n + i);
  return cols;
}

}  // namespace detail

inline MarkerResult chern_marker(const ProjectionMatrix& P, long window_L, LatticePoint shift = {0, 0}) {
  const auto cols = detail::window_columns(P.box, P.n, window_L, shift);
  MatC U(P.matrix.rows(), long(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) U.col(long(c)) = P.matrix.col(cols[c]);
  return detail::marker_core(U, P.box, P.n, window_L, [&](const MatC& A) -> MatC { return P.matrix * A; });
}

// Same quantity from occupied eigenvectors V (P = V V^dagger) without forming P.
inline MarkerResult chern_marker(const MatC& V, const Box& box, int n, long window_L, LatticePoint shift = {0, 0}) {
  const auto cols = detail::window_columns(box, n, window_L, shift);
  MatC Vw(long(cols.size()), V.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) Vw.row(long(c)) = V.row(cols[c]);
  const MatC U = V * Vw.adjoint();
  return detail::marker_core(U, box, n, window_L, [&](const MatC& A) -> MatC { return V * (V.adjoint() * A); });
}

// 2 pi Im sum_{g,x} Tr P(c,g) P(g,x) P(x,c) (g-c)^(x-c), averaged over centres c of the window.
inline double chern_marker_triple(const ProjectionMatrix& P, long window_L, LatticePoint shift = {0, 0}) {
  const Box& box = P.box;
  const int n = P.n;
  const long N = P.matrix.rows();
  const auto centres = detail::window_ranks(box, window_L, shift);
  double acc = 0;
  for (long c : centres) {
    const LatticePoint pc = box[std::size_t(c)];
    VecD y1(N), y2(N);
    for (std::size_t k = 0; k < box.size(); ++k)
      for (int i = 0; i < n; ++i) {
        y1(long(k) * n + i) = double(box[k].g1 - pc.g1);
        y2(long(k) * n + i) = double(box[k].g2 - pc.g2);
      }
    const MatC row = P.matrix.middleRows(c * n, n);  // P(c, .)
    const MatC col = P.matrix.middleCols(c * n, n);  // P(., c)
    // weight (g-c)^(x-c) = y2(g) y1(x) - y1(g) y2(x)
    const MatC t1 = (row * y2.asDiagonal()) * P.matrix * (y1.asDiagonal() * col);
    const MatC t2 = (row * y1.asDiagonal()) * P.matrix * (y2.asDiagonal() * col);
    acc += 2 * kPi * (t1.trace() - t2.trace()).imag();
  }
  return acc / double(centres.size());
}

struct FluxUnitary {
  VecC phases;  // diagonal entries e^{-i theta_p(gamma)}
  std::array<double, 2> p{};
};

inline FluxUnitary flux_unitary(std::array<double, 2> p, const Box& box, int n) {
  const bool on_lattice = p[0] == std::round(p[0]) && p[1] == std::round(p[1]);
  require(!on_lattice, "invalid flux point", "p must not be a lattice point");
  FluxUnitary U;
  U.p = p;
  U.phases.resize(long(box.size()) * n);
  for (std::size_t k = 0; k < box.size(); ++k) {
    const double th = std::atan2(double(box[k].g2) - p[1], double(box[k].g1) - p[0]);
    for (int i = 0; i < n; ++i) U.phases(long(k) * n + i) = std::polar(1.0, -th);
  }
  return U;
}

// On a finite box rank P = rank Q, so the global count of +-1 eigenvalues always
// cancels: the flux vortex at p is paired with a partner at the boundary (simple
// bc) or at the branch cut (periodic bc). Only eigenvectors carrying more than half
// of their weight within sup-distance `radius` of p are counted; radius <= 0 picks L/4.
inline long index_pair(const ProjectionMatrix& P, std::array<double, 2> p, double tol_window = 0.1,
                       double radius = 0) {
  const Box& box = P.box;
  const int n = P.n;
  if (radius <= 0) radius = double(box.L()) / 4;
  const FluxUnitary U = flux_unitary(p, box, n);
  const MatC Q = U.phases.asDiagonal() * P.matrix * U.phases.conjugate().asDiagonal();
  const Eigensystem es = eigh(Q - P.matrix);  // Index(Q, P) with Q first
  VecD near(long(box.size()) * n);
  for (std::size_t k = 0; k < box.size(); ++k) {
    const double d = std::max(std::abs(double(box[k].g1) - p[0]), std::abs(double(box[k].g2) - p[1]));
    for (int i = 0; i < n; ++i) near(long(k) * n + i) = d <= radius ? 1.0 : 0.0;
  }
  long plus = 0, minus = 0;
  for (long i = 0; i < es.values.size(); ++i) {
    const double e = es.values(i);
    if (std::abs(e - (1 - tol_window)) < 1e-6 || std::abs(e - (-1 + tol_window)) < 1e-6)
      throw Error("ambiguous index", "eigenvalue on the tolerance boundary");
    const bool hi = e >= 1 - tol_window, lo = e <= -1 + tol_window;
    if (!hi && !lo) continue;
    const double w = (near.array() * es.vectors.col(i).cwiseAbs2().array()).sum();
    if (w <= 0.5) continue;
    plus += hi;
    minus += lo;
  }
  return plus - minus;
}

}  // namespace chernlab
