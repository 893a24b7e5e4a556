#include <doctest.h>

#include <random>
#include <vector>

#include "clonescope/statistics.hpp"
#include "support/oracles.hpp"

using namespace clonescope;

TEST_CASE("empty and singleton samples") {
  std::vector<double> none;
  CHECK_FALSE(stats::mean(none));
  CHECK_FALSE(stats::sample_sd(none));
  CHECK_FALSE(stats::median(none));
  CHECK_FALSE(stats::iqr(none));
  std::vector<double> one{7};
  CHECK(stats::mean(one) == 7.0);
  CHECK_FALSE(stats::sample_sd(one));
  CHECK(stats::median(one) == 7.0);
  CHECK(stats::iqr(one) == 0.0);
}

TEST_CASE("type 7 quantiles") {
  std::vector<double> v{2, 2, 3};
  CHECK(stats::median(v) == 2.0);
  CHECK(stats::quantile(v, 0.25) == 2.0);
  CHECK(stats::quantile(v, 0.75) == 2.5);
  CHECK(stats::iqr(v) == 0.5);
  std::vector<double> w{4, 1, 3, 2};  // unsorted on purpose
  CHECK(stats::median(w) == doctest::Approx(2.5));
  CHECK(stats::quantile(w, 0.25) == doctest::Approx(1.75));
  CHECK(stats::quantile(w, 0.75) == doctest::Approx(3.25));
  CHECK(stats::quantile(w, 0.0) == 1.0);
  CHECK(stats::quantile(w, 1.0) == 4.0);
  CHECK(w == std::vector<double>{4, 1, 3, 2});
}

TEST_CASE("sample sd uses n - 1") {
  std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(*stats::mean(v) == doctest::Approx(5.0));
  CHECK(*stats::sample_sd(v) == doctest::Approx(2.138089935299395));
}

TEST_CASE("agrees with two-pass and sorting oracles") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(2 + rng() % 300);
    const bool ints = trial % 2 == 0;
    for (double& x : v) {
      x = ints ? static_cast<double>(2 + rng() % 60)
               : std::uniform_real_distribution<double>(-1e3, 1e6)(rng);
    }
    REQUIRE(oracle::close(*stats::mean(v), oracle::mean(v)));
    REQUIRE(oracle::close(*stats::sample_sd(v), oracle::sample_sd(v)));
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      REQUIRE(oracle::close(*stats::quantile(v, p), oracle::quantile(v, p)));
    }
    REQUIRE(oracle::close(*stats::iqr(v), oracle::quantile(v, 0.75) - oracle::quantile(v, 0.25)));
  }
}
