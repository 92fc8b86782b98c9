#include "chernlab/bloch.hpp"
#include "chernlab/topology.hpp"

#include <gtest/gtest.h>

using namespace chernlab;

namespace {

HoppingModel haldane(double phi) {
  HaldaneParams p;
  p.phi = phi;
  return haldane_model(p);
}

ProjectionMatrix clean_projection(const HoppingModel& m, long L, BC bc) {
  const Box box(L);
  return spectral_projection(restrict_box(m, zero_sample(box, m.n), 0, box, bc), 0.0);
}

ProjectionMatrix from_matrix(MatC M, long L, int n) {
  ProjectionMatrix P;
  P.matrix = std::move(M);
  P.box = Box(L);
  P.n = n;
  return P;
}

}  // namespace

TEST(Topology, MarkerEqualsTripleSum) {
  const Box box(10);
  const HoppingModel m = haldane(kPi / 2);
  for (double lam : {0.0, 1.0}) {
    const FiniteOperator op = restrict_simple(m, sample_potential(uniform_dist(1, 1), box, 2, 11, 0), lam, box);
    const ProjectionMatrix P = spectral_projection(op, 0.0);
    const MarkerResult r = chern_marker(P, 4);
    EXPECT_NEAR(r.value, chern_marker_triple(P, 4), 1e-10);
    EXPECT_LT(r.imag_residual, 1e-10);
    // the eigenvector form agrees with the dense form
    const Eigensystem es = eigh(op.matrix);
    EXPECT_NEAR(chern_marker(MatC(es.vectors.leftCols(P.rank)), box, 2, 4).value, r.value, 1e-10);
  }
}

TEST(Topology, TrivialProjectionsGiveZero) {
  const long L = 6;
  const long N = L * L * 2;
  EXPECT_EQ(chern_marker(from_matrix(MatC::Zero(N, N), L, 2), 4).value, 0.0);
  EXPECT_NEAR(chern_marker(from_matrix(MatC::Identity(N, N), L, 2), 4).value, 0.0, 1e-14);
}

TEST(Topology, LocalizedRankOneProjection) {
  const long L = 16;
  const long N = L * L * 2;
  const Box box(L);
  VecC v = VecC::Zero(N);
  v(box.rank({0, 0}) * 2) = 0.8;
  v(box.rank({1, 0}) * 2 + 1) = cplx(0, 0.6);
  const ProjectionMatrix P = from_matrix(v * v.adjoint(), L, 2);
  EXPECT_LT(std::abs(chern_marker(P, 8).value), 0.05);
}

TEST(Topology, MarkerTracksChernNumber) {
  for (double phi : {kPi / 2, -kPi / 2}) {
    const HoppingModel m = haldane(phi);
    const double c = double(chern_number(m, 1, 48).value);
    EXPECT_NEAR(chern_marker(clean_projection(m, 20, BC::periodic), 8).value, c, 0.15) << phi;
  }
  HaldaneParams triv;
  triv.M = 6 * triv.t2;
  EXPECT_NEAR(chern_marker(clean_projection(haldane_model(triv), 20, BC::periodic), 8).value, 0.0, 0.15);
}

TEST(Topology, WindowTooLargeThrows) {
  const ProjectionMatrix P = clean_projection(haldane(kPi / 2), 6, BC::periodic);
  try {
    chern_marker(P, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.label(), "window too large");
  }
  EXPECT_THROW(chern_marker(P, 6, {1, 0}), Error);
}

TEST(Topology, FluxUnitaryPhases) {
  const Box box(4);
  const FluxUnitary U = flux_unitary({0.5, 0.5}, box, 2);
  EXPECT_LT((U.phases.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-15);
  const long k = box.rank({1, 1});
  EXPECT_NEAR(std::arg(U.phases(k * 2)), -kPi / 4, 1e-15);
  EXPECT_EQ(U.phases(k * 2), U.phases(k * 2 + 1));
  const MatC D = U.phases.asDiagonal();
  EXPECT_LT((D * D.adjoint() - MatC::Identity(D.rows(), D.rows())).cwiseAbs().maxCoeff(), 1e-15);
  try {
    flux_unitary({1.0, -2.0}, box, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.label(), "invalid flux point");
  }
}

TEST(Topology, IndexOfSiteDiagonalProjectionIsZero) {
  const long L = 8;
  const long N = L * L * 2;
  MatC M = MatC::Zero(N, N);
  for (long i = 0; i < N; i += 2) M(i, i) = 1;
  EXPECT_EQ(index_pair(from_matrix(M, L, 2), {0.5, 0.5}), 0);
}

TEST(Topology, IndexPairMatchesChernSign) {
  for (double phi : {kPi / 2, -kPi / 2}) {
    const HoppingModel m = haldane(phi);
    const long idx = index_pair(clean_projection(m, 24, BC::simple), {0.5, 0.5});
    EXPECT_EQ(idx, chern_number(m, 1, 48).value) << phi;
  }
}
