#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsg/fields.hpp"
#include "dsg/stats.hpp"

using dsg::OrderParamH;
using dsg::RngStream;
using dsg::TreeShape;

TEST_CASE("piecewise-constant lookup follows the cell contract") {
  // r=2, G=2, values laid out row-major over (cell1, cell2).
  Eigen::ArrayXd values(4);
  values << 0.1, 0.2, 0.3, 0.4;  // [1][1], [1][2], [2][1], [2][2]
  OrderParamH h(2, 2, values);
  const double omegas[2] = {0.3, 0.9};
  CHECK(h(omegas) == doctest::Approx(0.2));  // cells (1,2) -> values[1]
  const double corner[2] = {1.0, 1.0};
  CHECK(h(corner) == doctest::Approx(0.4));
  const double low[2] = {0.0, 0.0};
  CHECK(h(low) == doctest::Approx(0.1));
  const double bad[2] = {1.2, 0.5};
  CHECK_THROWS_AS(h(bad), std::invalid_argument);
}

TEST_CASE("constant and single-cell order parameters ignore the input") {
  OrderParamH h = OrderParamH::constant(3, 0.7);
  const double a[3] = {0.1, 0.5, 0.9};
  const double b[3] = {0.99, 0.01, 0.5};
  CHECK(h(a) == doctest::Approx(0.7));
  CHECK(h(b) == doctest::Approx(0.7));
}

TEST_CASE("entries outside [-1,1] are rejected") {
  Eigen::ArrayXd bad(1);
  bad << 1.5;
  CHECK_THROWS_AS(OrderParamH(1, 1, bad), std::invalid_argument);
}

TEST_CASE("field copies share uniforms exactly along common ancestry") {
  const TreeShape shape(2, {3, 3});
  Eigen::ArrayXd values(16);
  for (int i = 0; i < 16; ++i) values[i] = -1.0 + 2.0 * i / 15.0;
  OrderParamH h(2, 4, values);
  RngStream rng(21, 0);
  const auto copy = dsg::sample_field_copy(h, shape, rng);
  REQUIRE(copy.leaf_values.size() == 9);
  // Leaves 0 and 1 share the depth-1 ancestor 0; leaves 0 and 3 do not.
  CHECK(copy.uniforms[0][0] == copy.uniforms[0][0]);
  for (long leaf = 0; leaf < 9; ++leaf) {
    const double w1 = copy.uniforms[0][leaf / 3];
    const double w2 = copy.uniforms[1][leaf];
    const double coords[2] = {w1, w2};
    CHECK(copy.leaf_values[leaf] == doctest::Approx(h(coords)));
  }
}

TEST_CASE("constant h gives identical leaf values") {
  const TreeShape shape(2, {4, 4});
  OrderParamH h = OrderParamH::constant(2, 0.25);
  RngStream rng(22, 0);
  const auto leaves = dsg::sample_field_leaves(h, shape, rng);
  CHECK(leaves.minCoeff() == doctest::Approx(0.25));
  CHECK(leaves.maxCoeff() == doctest::Approx(0.25));
}

TEST_CASE("disjoint-path leaves decorrelate for h = 2w1 - 1") {
  // h depends only on the first coordinate; leaves with wedge 0 use
  // independent first coordinates, so their correlation is 0.
  const TreeShape shape(1, {2});
  Eigen::ArrayXd values(64);
  for (int i = 0; i < 64; ++i) values[i] = -1.0 + 2.0 * (i + 0.5) / 64.0;
  OrderParamH h(1, 64, values);
  RngStream rng(23, 0);
  const int n = 50000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const auto leaves = dsg::sample_field_leaves(h, shape, rng);
    a[i] = leaves[0];
    b[i] = leaves[1];
  }
  CHECK(std::fabs(dsg::correlation(a, b)) < 3.0 / std::sqrt(n));
}

TEST_CASE("spin_from_field respects the bias") {
  RngStream rng(24, 0);
  CHECK(dsg::spin_from_field(1.0, rng) == 1);
  CHECK(dsg::spin_from_field(-1.0, rng) == -1);
  CHECK_THROWS_AS(dsg::spin_from_field(1.5, rng), std::invalid_argument);
  const int n = 100000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i)
    draws[i] = static_cast<double>(dsg::spin_from_field(0.5, rng));
  const auto m = dsg::mean_se(draws);
  CHECK(std::fabs(m.mean - 0.5) <= 3.0 * m.std_error);
}

TEST_CASE("star variant takes two leading coordinates") {
  Eigen::ArrayXd values(8);  // G=2, r=1, arity 3
  values << -0.8, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8;
  OrderParamH h(1, 2, values, true);
  CHECK(h.arity() == 3);
  const TreeShape shape(1, {2});
  RngStream rng(25, 0);
  const auto copy = dsg::sample_field_copy(h, shape, rng, 0.9);
  // omega_star = 0.9 selects the upper half of the table.
  for (long leaf = 0; leaf < 2; ++leaf) CHECK(copy.leaf_values[leaf] >= 0.2);
}

TEST_CASE("ultrametric gaussian covariance matches the levels") {
  const TreeShape shape(2, {2, 2});
  Eigen::ArrayXd levels(3);
  levels << 0.2, 0.5, 1.1;
  RngStream rng(26, 0);
  const int n = 100000;
  std::vector<double> v0(n), c0(n), c1(n);
  for (int i = 0; i < n; ++i) {
    const auto g = dsg::sample_ultrametric_gaussian(levels, shape, rng);
    v0[i] = g[0] * g[0];       // variance = c_2
    c0[i] = g[0] * g[3];       // wedge 0 -> c_0
    c1[i] = g[0] * g[1];       // wedge 1 -> c_1
  }
  const auto mv = dsg::mean_se(v0);
  CHECK(std::fabs(mv.mean - 1.1) <= 3.0 * mv.std_error);
  const auto m0 = dsg::mean_se(c0);
  CHECK(std::fabs(m0.mean - 0.2) <= 3.0 * m0.std_error);
  const auto m1 = dsg::mean_se(c1);
  CHECK(std::fabs(m1.mean - 0.5) <= 3.0 * m1.std_error);
}

TEST_CASE("telescoping degenerate levels give independent leaves") {
  const TreeShape shape(1, {2});
  Eigen::ArrayXd levels(2);
  levels << 0.0, 1.0;
  RngStream rng(27, 0);
  const int n = 50000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const auto g = dsg::sample_ultrametric_gaussian(levels, shape, rng);
    a[i] = g[0];
    b[i] = g[1];
  }
  CHECK(std::fabs(dsg::correlation(a, b)) < 3.0 / std::sqrt(n));
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) sq[i] = a[i] * a[i];
  const auto m = dsg::mean_se(sq);
  CHECK(std::fabs(m.mean - 1.0) <= 3.0 * m.std_error);
}

TEST_CASE("non-monotone covariance levels are rejected") {
  const TreeShape shape(1, {2});
  Eigen::ArrayXd bad(2);
  bad << 0.5, 0.3;
  RngStream rng(28, 0);
  CHECK_THROWS_AS(dsg::sample_ultrametric_gaussian(bad, shape, rng),
                  std::invalid_argument);
}
