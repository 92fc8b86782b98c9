#pragma once

#include "chernlab/core.hpp"

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int);

namespace chernlab {

// BLAS threading would make reductions order-dependent; parallelism lives
// at the realization level instead.
inline void pin_blas_single_thread() {
  static const bool once = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)once;
}

struct Eigensystem {
  VecD values;   // ascending
  MatC vectors;  // columns, empty when only values were requested
};

inline Eigensystem eigh(const MatC& A, bool with_vectors = true) {
  pin_blas_single_thread();
  require(A.rows() == A.cols(), "linalg", "matrix not square");
  const lapack_int N = lapack_int(A.rows());
  Eigensystem es;
  es.values.resize(N);
  if (N == 0) return es;
  MatC work = A;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'U', N,
                     reinterpret_cast<lapack_complex_double*>(work.data()), N, es.values.data());
  require(info == 0, "linalg", "zheevd failed with info " + std::to_string(info));
  if (with_vectors) es.vectors = std::move(work);
  return es;
}

inline VecD eigvalsh(const MatC& A) { return eigh(A, false).values; }

inline double hermitian_defect(const MatC& A) { return (A - A.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace chernlab
