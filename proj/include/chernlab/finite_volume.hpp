#pragma once

#include "chernlab/core.hpp"
#include "chernlab/disorder.hpp"
#include "chernlab/lattice.hpp"
#include "chernlab/linalg.hpp"
#include "chernlab/model.hpp"

#include <Eigen/LU>

#include <string>
#include <vector>

namespace chernlab {

enum class BC { simple, periodic };

inline std::string to_string(BC bc) { return bc == BC::simple ? "simple" : "periodic"; }
inline BC parse_bc(const std::string& s) {
  if (s == "simple") return BC::simple;
  if (s == "periodic") return BC::periodic;
  throw Error("invalid config", "boundary condition must be simple or periodic, got " + s);
}

struct FiniteOperator {
  MatC matrix;
  Box box;
  int n = 1;
  BC bc = BC::simple;
  double lambda = 0;
  std::uint64_t seed = 0;
  std::uint64_t realization_index = 0;

  long dim() const { return matrix.rows(); }
  long index(std::size_t site_rank, int orbital) const { return long(site_rank) * n + orbital; }
};

namespace detail {

inline void add_potential(FiniteOperator& op, const DisorderSample& s, double lambda) {
  if (lambda == 0.0) return;
  require(s.values.size() == std::size_t(op.dim()), "invalid sample", "sample size does not match the box");
  for (long k = 0; k < op.dim(); ++k) op.matrix(k, k) += lambda * s.values[std::size_t(k)];
}

inline FiniteOperator make_op(const HoppingModel& m, const DisorderSample& s, double lambda, const Box& box, BC bc) {
  FiniteOperator op;
  op.box = box;
  op.n = m.n;
  op.bc = bc;
  op.lambda = lambda;
  op.seed = s.seed;
  op.realization_index = s.realization_index;
  const long N = long(box.size()) * m.n;
  op.matrix = MatC::Zero(N, N);
  return op;
}

}  // namespace detail

inline FiniteOperator restrict_simple(const HoppingModel& m, const DisorderSample& s, double lambda, const Box& box) {
  FiniteOperator op = detail::make_op(m, s, lambda, box, BC::simple);
  const int n = m.n;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const LatticePoint g = box[k];
    for (long d1 = -m.r; d1 <= m.r; ++d1)
      for (long d2 = -m.r; d2 <= m.r; ++d2) {
        const long j = box.rank(g + LatticePoint{d1, d2});
        if (j < 0) continue;
        op.matrix.block(long(k) * n, j * n, n, n) = kernel(m, g, g + LatticePoint{d1, d2});
      }
  }
  detail::add_potential(op, s, lambda);
  return op;
}

// Wrapped kernel: sum over images xi + L zeta. Needs the flux period to divide L.
inline FiniteOperator restrict_periodic(const HoppingModel& m, const DisorderSample& s, double lambda, const Box& box) {
  const long q = m.flux_period();
  require(q > 0 && box.L() % q == 0, "incommensurate box",
          "box side " + std::to_string(box.L()) + " is not a multiple of the flux period");
  require(2 * m.r < box.L(), "incommensurate box", "hopping range must be below L/2");
  require(m.defects.empty(), "incommensurate box", "periodic restriction needs a periodic model");
  FiniteOperator op = detail::make_op(m, s, lambda, box, BC::periodic);
  const int n = m.n;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const LatticePoint g = box[k];
    for (long d1 = -m.r; d1 <= m.r; ++d1)
      for (long d2 = -m.r; d2 <= m.r; ++d2) {
        const LatticePoint x = g + LatticePoint{d1, d2};
        const long j = box.rank(box.wrap(x));
        op.matrix.block(long(k) * n, j * n, n, n) += kernel(m, g, x);
      }
  }
  detail::add_potential(op, s, lambda);
  return op;
}

inline FiniteOperator restrict_box(const HoppingModel& m, const DisorderSample& s, double lambda, const Box& box, BC bc) {
  return bc == BC::simple ? restrict_simple(m, s, lambda, box) : restrict_periodic(m, s, lambda, box);
}

struct ProjectionMatrix {
  MatC matrix;
  double fermi_energy = 0;
  long rank = 0;
  Box box;
  int n = 1;

  MatC block(std::size_t r1, std::size_t r2) const {
    return matrix.block(long(r1) * n, long(r2) * n, n, n);
  }
};

inline long count_below(const VecD& values, double E) {
  long c = 0;
  for (long i = 0; i < values.size(); ++i) c += values(i) <= E;
  return c;
}

inline ProjectionMatrix projection_from(const Eigensystem& es, const Box& box, int n, double E) {
  ProjectionMatrix P;
  P.fermi_energy = E;
  P.box = box;
  P.n = n;
  P.rank = count_below(es.values, E);
  const auto V = es.vectors.leftCols(P.rank);
  P.matrix = V * V.adjoint();
  return P;
}

inline ProjectionMatrix spectral_projection(const FiniteOperator& op, double E) {
  return projection_from(eigh(op.matrix), op.box, op.n, E);
}

inline MatC green_from(const Eigensystem& es, cplx z) {
  const VecD& e = es.values;
  VecC w(e.size());
  for (long i = 0; i < e.size(); ++i) {
    const cplx d = e(i) - z;
    if (std::abs(d) < 1e-12) throw Error("resonant energy", "z is within 1e-12 of an eigenvalue");
    w(i) = 1.0 / d;
  }
  return es.vectors * w.asDiagonal() * es.vectors.adjoint();
}

inline MatC green_function(const FiniteOperator& op, cplx z) { return green_from(eigh(op.matrix), z); }

// Selected columns of (H - E)^{-1} by LU; resonance is declared when the
// solve residual is not small.
inline MatC resolvent_columns(const FiniteOperator& op, double E, const std::vector<long>& cols) {
  const long N = op.dim();
  MatC A = op.matrix;
  A.diagonal().array() -= E;
  Eigen::PartialPivLU<MatC> lu(A);
  MatC rhs = MatC::Zero(N, long(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) rhs(cols[c], long(c)) = 1.0;
  MatC X = lu.solve(rhs);
  const double res = (A * X - rhs).cwiseAbs().maxCoeff();
  if (!std::isfinite(res) || res > 1e-8) throw Error("resonant energy", "E is numerically in the spectrum");
  return X;
}

}  // namespace chernlab
