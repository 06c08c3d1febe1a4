#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsg/stats.hpp"

TEST_CASE("pairwise sum matches exact on simple inputs") {
  std::vector<double> x(1000);
  for (int i = 0; i < 1000; ++i) x[i] = 1.0 / (i + 1);
  double ref = 0.0;
  for (int i = 999; i >= 0; --i) ref += x[i];
  CHECK(dsg::pairwise_sum(x) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("mean_se on a known sample") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const auto m = dsg::mean_se(x);
  CHECK(m.mean == doctest::Approx(2.5));
  // sd = sqrt(5/3), se = sd/2
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("log_sum_exp is shift stable") {
  Eigen::ArrayXd a(3);
  a << 1000.0, 1000.0, 1000.0;
  CHECK(dsg::log_sum_exp(a) == doctest::Approx(1000.0 + std::log(3.0)));
  Eigen::ArrayXd b(2);
  b << -1e308, 0.0;
  CHECK(dsg::log_sum_exp(b) == doctest::Approx(0.0));
}

TEST_CASE("log_add_exp agrees with direct evaluation") {
  CHECK(dsg::log_add_exp(std::log(2.0), std::log(3.0)) ==
        doctest::Approx(std::log(5.0)));
  CHECK(dsg::log_add_exp(-2.0, -2.0) == doctest::Approx(-2.0 + std::log(2.0)));
}

TEST_CASE("correlation of identical and opposite samples") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y = {2, 4, 6, 8, 10};
  std::vector<double> z = {5, 4, 3, 2, 1};
  CHECK(dsg::correlation(x, y) == doctest::Approx(1.0));
  CHECK(dsg::correlation(x, z) == doctest::Approx(-1.0));
}
