#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "banditlab/rng.hpp"
#include "doctest.h"

using namespace banditlab;

namespace {

// Reference normal CDF via the complementary error function.
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("identical seeds replay the identical sequence") {
  RngStream a(0), b(0);
  for (int i = 0; i < 100; ++i) CHECK_EQ(a.next_u64(), b.next_u64());

  RngStream c(0), d(1);
  CHECK_NE(c.next_u64(), d.next_u64());
}

TEST_CASE("derived child streams get distinct seeds") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 100; ++i) {
    seeds.insert(RngStream::derive(42, i).seed());
  }
  CHECK_EQ(seeds.size(), 100u);

  // Derivation is a pure function of (master, index).
  CHECK_EQ(RngStream::derive(7, 3).seed(), RngStream::derive(7, 3).seed());
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
  RngStream rng(123);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK_GT(u, 0.0);
    CHECK_LT(u, 1.0);
  }
}

TEST_CASE("uniform_below covers [0,n) roughly uniformly") {
  RngStream rng(5);
  std::vector<int> counts(4, 0);
  const int n_draws = 100000;
  for (int i = 0; i < n_draws; ++i) ++counts[rng.uniform_below(4)];
  for (int c : counts) {
    CHECK_GT(c, 0);
    // 4-sigma band around n/4 for a binomial(n, 1/4).
    CHECK_LT(std::abs(c - n_draws / 4.0), 4.0 * std::sqrt(n_draws * 0.25 * 0.75));
  }
}

TEST_CASE("inverse normal cdf matches known quantiles") {
  CHECK_EQ(inverse_normal_cdf(0.5), doctest::Approx(0.0).epsilon(1e-12));
  CHECK_EQ(inverse_normal_cdf(0.975), doctest::Approx(1.959963985).epsilon(1e-7));
  CHECK_EQ(inverse_normal_cdf(0.841344746), doctest::Approx(1.0).epsilon(1e-6));

  // Round trip against the erfc-based CDF over both tails and the center.
  for (double p : {1e-6, 0.001, 0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98, 0.999,
                   1.0 - 1e-6}) {
    CHECK_EQ(normal_cdf(inverse_normal_cdf(p)), doctest::Approx(p).epsilon(1e-7));
  }

  // Antisymmetry about the median.
  for (double p : {0.01, 0.1, 0.25, 0.4}) {
    CHECK_EQ(inverse_normal_cdf(p),
             doctest::Approx(-inverse_normal_cdf(1.0 - p)).epsilon(1e-9));
  }

  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_normal_cdf(-0.5), std::invalid_argument);
  CHECK_THROWS_AS(inverse_normal_cdf(2.0), std::invalid_argument);
}

TEST_CASE("normal draws hit the configured moments") {
  RngStream rng(2024);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(1.0, 2.5);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK_EQ(mean, doctest::Approx(1.0).epsilon(0.03));
  CHECK_EQ(var, doctest::Approx(6.25).epsilon(0.032));
}

TEST_CASE("sigma zero is a point mass and consumes no draw") {
  RngStream rng(9);
  RngStream untouched = rng;
  CHECK_EQ(rng.normal(3.25, 0.0), 3.25);
  CHECK_EQ(rng.normal(-7.0, 0.0), -7.0);
  // The stream state is bit-identical to one that made no draws at all.
  CHECK_EQ(rng.next_u64(), untouched.next_u64());

  NormalParams point{0.0, 0.0};
  RngStream rng2(11);
  CHECK_EQ(sample_normal(rng2, point), 0.0);
}

TEST_CASE("sample_normal rejects invalid parameters") {
  RngStream rng(1);
  const double nan = std::nan("");
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sample_normal(rng, NormalParams{nan, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_normal(rng, NormalParams{0.0, inf}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_normal(rng, NormalParams{0.0, -0.1}),
                  std::invalid_argument);
}

TEST_CASE("moment checks hold across a (mu, sigma) grid") {
  const int n = 50000;
  int seed = 100;
  for (double mu : {-2.0, 0.0, 1.5}) {
    for (double sigma : {0.0, 0.5, 3.0}) {
      RngStream rng(static_cast<std::uint64_t>(seed++));
      double sum = 0.0, sum_sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = sample_normal(rng, NormalParams{mu, sigma});
        sum += x;
        sum_sq += x * x;
      }
      const double mean = sum / n;
      const double var = sum_sq / n - mean * mean;
      if (sigma == 0.0) {
        CHECK_EQ(mean, mu);
        CHECK_EQ(var, 0.0);
      } else {
        CHECK_LT(std::abs(mean - mu), 4.0 * sigma / std::sqrt(double(n)));
        CHECK_LT(std::abs(var - sigma * sigma),
                 5.0 * sigma * sigma * std::sqrt(2.0 / n));
      }
    }
  }
}
