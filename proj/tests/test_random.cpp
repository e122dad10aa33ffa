#include "fairshare/parallel.hpp"
#include "fairshare/random.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <stdexcept>

using namespace fairshare;

// Reference blocks computed with numpy's Philox4x64-10.
TEST(Philox, MatchesReferenceVectors) {
  EXPECT_EQ(random::philox4x64({1, 0, 0, 0}, {0, 0}),
            (random::Block{0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL}));
  EXPECT_EQ(random::philox4x64({2, 0, 0, 0}, {0, 0}),
            (random::Block{0x809bf322883987c3ULL, 0x471128b9e807f7ddULL, 0xf250ba0dbec065b7ULL, 0xfc6ed66767a457bcULL}));
  EXPECT_EQ(random::philox4x64({42, 7, 3, 0}, {0x123456789abcdef0ULL, 0x0fedcba987654321ULL}),
            (random::Block{0xfdc53052b3726f2dULL, 0x4bce629d0fefcb7fULL, 0xb220cbd1234d95edULL, 0x1a366cf6b00271c8ULL}));
}

TEST(Philox, StreamsDiffer) {
  EXPECT_NE(random::draw(1, 0, 0), random::draw(1, 1, 0));
  EXPECT_NE(random::draw(1, 0, 0), random::draw(2, 0, 0));
  EXPECT_NE(random::draw(1, 0, 0), random::draw(1, 0, 1));
  EXPECT_EQ(random::draw(9, 4, 17), random::draw(9, 4, 17));
}

TEST(Philox, UnitConversions) {
  EXPECT_EQ(random::to_unit(0), 0.0);
  EXPECT_LT(random::to_unit(~0ULL), 1.0);
  EXPECT_GT(random::to_unit_open(~0ULL), 0.0);
  EXPECT_EQ(random::to_unit_open(0), 1.0);
  // Moments of 100k draws.
  double sum = 0.0;
  double sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = random::to_unit(random::draw(3, 0, i)[0]);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n, 1.0 / 3, 0.005);
}

TEST(Parallel, PairwiseSumIsExactOnIntegersAndOrderFixed) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(parallel::pairwise_sum(v), 500500.0);
  EXPECT_EQ(parallel::pairwise_sum(std::span<const double>{}), 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (double& x : v) x = g(rng);
  EXPECT_EQ(parallel::pairwise_sum(v), parallel::pairwise_sum(v));
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  std::vector<double> a(5000), b(5000);
  const auto fill = [](std::vector<double>& out, unsigned workers) {
    parallel::for_each_index(out.size(), workers, [&](std::size_t i) {
      out[i] = random::to_unit(random::draw(11, i, 0)[1]);
    });
  };
  fill(a, 1);
  fill(b, 4);
  EXPECT_EQ(a, b);
}

TEST(Parallel, RethrowsSmallestFailingIndex) {
  for (unsigned workers : {1u, 3u}) {
    try {
      parallel::for_each_index(1000, workers, [](std::size_t i) {
        if (i % 97 == 13) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "13");
    }
  }
}
