#include "chernlab/stats.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using namespace chernlab;

TEST(Stats, WilsonInterval) {
  const double z2 = kZ99 * kZ99;
  const Interval zero = wilson(0, 100);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, z2 / (100 + z2), 1e-15);
  const Interval half = wilson(50, 100);
  EXPECT_NEAR(half.lo + half.hi, 1.0, 1e-15);
  EXPECT_LT(half.lo, 0.5);
  const Interval all = wilson(100, 100);
  EXPECT_EQ(all.hi, 1.0);
  EXPECT_NEAR(all.lo, 100 / (100 + z2), 1e-15);
  EXPECT_EQ(wilson(0, 0).hi, 1.0);
}

TEST(Stats, MeanAndStandardError) {
  const MeanErr m = mean_stderr({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.stderr_, std::sqrt(5.0 / 3 / 4), 1e-15);
  EXPECT_EQ(mean_stderr({7}).stderr_, 0.0);
}

TEST(Stats, LinearFits) {
  const LinearFit f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(f.slope, 2, 1e-15);
  EXPECT_NEAR(f.intercept, 1, 1e-15);
  EXPECT_NEAR(f.r2, 1, 1e-15);
  const LinearFit g = loglog_fit({1, 2, 4, 8}, {3, 12, 48, 192});
  EXPECT_NEAR(g.slope, 2, 1e-14);
  EXPECT_THROW(linear_fit({1}, {1}), Error);
}

TEST(Stats, ParallelMapKeepsOrder) {
  for (int threads : {1, 2, 5}) {
    const auto v = parallel_map<long>(100, threads, [](long i) { return i * i; });
    for (long i = 0; i < 100; ++i) EXPECT_EQ(v[std::size_t(i)], i * i);
  }
  EXPECT_TRUE(parallel_map<int>(0, 3, [](long) { return 1; }).empty());
}

TEST(Stats, ParallelMapRethrows) {
  auto bad = [](long i) -> int {
    if (i == 37) throw std::runtime_error("task 37");
    return 0;
  };
  for (int threads : {1, 4}) {
    try {
      parallel_map<int>(64, threads, bad);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "task 37");
    }
  }
}
