#include "chernlab/lattice.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace chernlab;

TEST(Lattice, WedgeValues) {
  EXPECT_EQ(wedge({1, 0}, {0, 1}), -1);
  EXPECT_EQ(wedge({4, -7}, {4, -7}), 0);
  EXPECT_EQ(wedge({2, 3}, {5, 7}), 1);
  EXPECT_EQ(wedge({2, 3}, {5, 7}), -wedge({5, 7}, {2, 3}));
}

TEST(Lattice, NormsUseCoefficients) {
  EXPECT_DOUBLE_EQ(norm({3, 4}), 5.0);
  EXPECT_EQ(norm_inf({3, -4}), 4);
  LatticeBasis b;
  EXPECT_GT(std::abs(b.area()), 0.0);
  const auto d = b.dual();
  EXPECT_NEAR(b.a1[0] * d[0][0] + b.a1[1] * d[0][1], 2 * kPi, 1e-12);
  EXPECT_NEAR(b.a1[0] * d[1][0] + b.a1[1] * d[1][1], 0.0, 1e-12);
}

TEST(Lattice, DegenerateBasisRejected) {
  LatticeBasis b;
  b.a2 = {3.0, 1.7320508075688772};
  EXPECT_THROW(b.validate(), Error);
}

TEST(Lattice, BoxSites) {
  const Box b1(1);
  ASSERT_EQ(b1.size(), 1u);
  EXPECT_EQ(b1[0], (LatticePoint{0, 0}));
  const Box b2(2);
  std::set<LatticePoint> s2(b2.sites().begin(), b2.sites().end());
  EXPECT_EQ(s2, (std::set<LatticePoint>{{-1, -1}, {-1, 0}, {0, -1}, {0, 0}}));
  const Box b3(3);
  EXPECT_EQ(b3.size(), 9u);
  EXPECT_EQ(b3.lo(), -1);
  EXPECT_EQ(b3.hi(), 1);
}

TEST(Lattice, RowMajorRanks) {
  const Box b(4);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_EQ(b.rank(b[k]), long(k));
  EXPECT_EQ(b[1].g2, b[0].g2 + 1);
  EXPECT_EQ(b.rank({10, 0}), -1);
}

TEST(Lattice, WrapAndMinImage) {
  const Box b(6);
  EXPECT_EQ(b.wrap({b.hi() + 1, 0}), (LatticePoint{b.lo(), 0}));
  EXPECT_EQ(b.min_image({5, -5}), (LatticePoint{-1, 1}));
  for (long x = -20; x <= 20; ++x) {
    const LatticePoint w = b.wrap({x, 2 * x});
    EXPECT_TRUE(b.contains(w));
    EXPECT_EQ(pos_mod(w.g1 - x, 6), 0);
  }
}

// Brute force: x is on the inner boundary iff some lattice point outside the box
// lies within sup-distance r.
static std::size_t brute_boundary(long L, long r) {
  const Box b(L);
  std::size_t count = 0;
  for (const auto& x : b.sites()) {
    bool hit = false;
    for (long d1 = -r; d1 <= r && !hit; ++d1)
      for (long d2 = -r; d2 <= r && !hit; ++d2) hit = !b.contains(x + LatticePoint{d1, d2});
    count += hit;
  }
  return count;
}

TEST(Lattice, InnerBoundary) {
  EXPECT_EQ(inner_boundary(Box(3), 1).size(), 8u);
  EXPECT_EQ(inner_boundary(Box(5), 1).size(), 16u);
  EXPECT_EQ(inner_boundary(Box(5), 2).size(), 24u);
  for (long L = 1; L <= 9; ++L)
    for (long r = 1; r <= 3; ++r) EXPECT_EQ(inner_boundary(Box(L), r).size(), brute_boundary(L, r)) << L << " " << r;
}

TEST(Lattice, CoreSites) {
  EXPECT_EQ(core_sites(Box(7), 1).L(), 3);
  EXPECT_EQ(core_sites(Box(13), 1).L(), 5);
  EXPECT_EQ(core_sites(Box(10), 1).L(), 4);
  EXPECT_THROW(core_sites(Box(9), 1), Error);
  EXPECT_TRUE(is_suitable_side(19, 1));
  EXPECT_FALSE(is_suitable_side(4, 1));
}
