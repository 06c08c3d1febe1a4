#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsg/cascade.hpp"

using dsg::CascadeParams;
using dsg::RngStream;
using dsg::TruncatedCascade;
using dsg::VertexPath;

namespace {

CascadeParams make_params(std::vector<double> zetas) {
  Eigen::ArrayXd z(zetas.size());
  for (std::size_t i = 0; i < zetas.size(); ++i) z[i] = zetas[i];
  return CascadeParams(static_cast<int>(zetas.size()), z);
}

}  // namespace

TEST_CASE("wedge counts the common prefix") {
  CHECK(dsg::wedge(VertexPath({1, 2}), VertexPath({1, 3})) == 1);
  CHECK(dsg::wedge(VertexPath({2, 2}), VertexPath({2, 2})) == 2);
  CHECK(dsg::wedge(VertexPath({1, 1}), VertexPath({2, 1})) == 0);
  CHECK(dsg::wedge(VertexPath{}, VertexPath({1})) == 0);
}

TEST_CASE("point transform and parameter validation") {
  CHECK(dsg::poisson_point_from_arrival(1.0, 0.5) == doctest::Approx(1.0));
  CHECK(dsg::poisson_point_from_arrival(4.0, 0.5) == doctest::Approx(1.0 / 16.0));
  RngStream rng(1, 0);
  CHECK_THROWS_AS(dsg::sample_poisson_points(1.5, 4, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(dsg::sample_poisson_points(0.0, 4, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_params({0.7, 0.3}).validate(), std::invalid_argument);
}

TEST_CASE("points come out strictly decreasing and positive") {
  RngStream rng(2, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::ArrayXd u = dsg::sample_poisson_points(0.4, 32, rng);
    for (int i = 0; i < u.size(); ++i) {
      CHECK(u[i] > 0.0);
      if (i) CHECK(u[i] < u[i - 1]);
    }
  }
}

TEST_CASE("heavy-tail law: mean count above x equals x^{-zeta}") {
  const int draws = 10000;
  for (double zeta : {0.3, 0.5, 0.8}) {
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
      RngStream rng(7, static_cast<std::uint64_t>(zeta * 100 + x));
      std::vector<double> counts(draws);
      for (int i = 0; i < draws; ++i) {
        const Eigen::ArrayXd u = dsg::sample_poisson_points(zeta, 64, rng);
        counts[i] = static_cast<double>((u > x).count());
      }
      const auto m = dsg::mean_se(counts);
      const double target = std::pow(x, -zeta);
      CHECK(std::fabs(m.mean - target) <= 3.0 * m.std_error + 1e-9);
    }
  }
}

TEST_CASE("single-leaf cascade is trivial") {
  RngStream rng(3, 0);
  TruncatedCascade cascade(make_params({0.5}), {1}, rng);
  CHECK(cascade.leaf_weights().size() == 1);
  CHECK(cascade.leaf_weights()[0] == doctest::Approx(1.0));
  CHECK(cascade.sorted_leaf_weights()[0] == doctest::Approx(1.0));
}

TEST_CASE("normalization and cluster consistency at r=2") {
  RngStream rng(4, 0);
  TruncatedCascade cascade(make_params({0.4, 0.8}), {3, 3}, rng);
  cascade.self_check();
  CHECK(std::fabs(cascade.leaf_weights().sum() - 1.0) <= 1e-12);
  for (int node = 0; node < 3; ++node) {
    const double child_sum = cascade.leaf_weights().segment(node * 3, 3).sum();
    CHECK(cascade.cluster_weights(1)[node] == doctest::Approx(child_sum));
  }
}

TEST_CASE("mean top sorted weight matches a direct simulation oracle") {
  const int reps = 20000;
  const int m = 200;
  const double zeta = 0.5;
  std::vector<double> lib(reps), oracle(reps);
  for (int i = 0; i < reps; ++i) {
    RngStream rng(5, static_cast<std::uint64_t>(i));
    TruncatedCascade cascade(make_params({zeta}), {m}, rng);
    lib[i] = cascade.sorted_leaf_weights()[0];
  }
  // Straight-line independent simulation of the same point process.
  for (int i = 0; i < reps; ++i) {
    RngStream rng(1005, static_cast<std::uint64_t>(i));
    double gamma = 0.0, total = 0.0, first = 0.0;
    for (int n = 0; n < m; ++n) {
      gamma += rng.exponential();
      const double u = std::pow(gamma, -1.0 / zeta);
      if (n == 0) first = u;
      total += u;
    }
    oracle[i] = first / total;
  }
  const auto ml = dsg::mean_se(lib);
  const auto mo = dsg::mean_se(oracle);
  const double se = std::hypot(ml.std_error, mo.std_error);
  CHECK(std::fabs(ml.mean - mo.mean) <= 3.0 * se);
}

TEST_CASE("sampled leaves follow the stored weights") {
  RngStream rng(6, 0);
  TruncatedCascade single(make_params({0.5}), {1}, rng);
  for (int i = 0; i < 10; ++i) CHECK(single.sample_leaf(rng) == 0);

  TruncatedCascade cascade(make_params({0.5}), {50}, rng);
  const int draws = 100000;
  std::vector<long> counts(50, 0);
  for (int i = 0; i < draws; ++i) ++counts[cascade.sample_leaf(rng)];
  for (int leaf = 0; leaf < 5; ++leaf) {
    const double p = cascade.sorted_leaf_weights()[leaf];
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::fabs(static_cast<double>(counts[leaf]) / draws - p) <=
          3.5 * se + 1e-12);
  }
}

TEST_CASE("pair wedge frequencies match the exact double sum") {
  RngStream rng(8, 0);
  TruncatedCascade cascade(make_params({0.3, 0.7}), {8, 8}, rng);
  // Exact P(wedge = p) for this cascade.
  std::vector<double> exact(3);
  exact[2] = cascade.sorted_leaf_weights().square().sum();
  for (int p = 1; p >= 0; --p)
    exact[p] = cascade.pair_overlap_mass(p) - cascade.pair_overlap_mass(p - 1);
  const int draws = 200000;
  std::vector<double> freq(3, 0.0);
  for (int i = 0; i < draws; ++i) {
    const long a = cascade.sample_leaf(rng);
    const long b = cascade.sample_leaf(rng);
    freq[cascade.shape().wedge_leaves(a, b)] += 1.0;
  }
  for (int p = 0; p <= 2; ++p) {
    const double phat = freq[p] / draws;
    const double se = std::sqrt(exact[p] * (1 - exact[p]) / draws);
    CHECK(std::fabs(phat - exact[p]) <= 3.5 * se + 1e-12);
  }
}

TEST_CASE("pair_overlap_mass boundary cases") {
  RngStream rng(9, 0);
  TruncatedCascade cascade(make_params({0.25, 0.75}), {4, 4}, rng);
  CHECK(cascade.pair_overlap_mass(2) == doctest::Approx(1.0));
  CHECK(cascade.pair_overlap_mass(5) == doctest::Approx(1.0));
  CHECK(cascade.pair_overlap_mass(0) <= 1.0);
  CHECK(cascade.pair_overlap_mass(-1) == 0.0);
}

TEST_CASE("overlap law converges to zeta_p") {
  const auto params = make_params({0.3});
  const auto est = dsg::overlap_cdf_check(params, {400}, 0, 10000, 11, 4);
  CHECK(std::fabs(est.value - 0.3) <= 3.0 * est.std_error + est.truncation_budget);
  // The budget itself should be small at this branching.
  CHECK(est.truncation_budget < 0.02);
}

TEST_CASE("sort map preserves the wedge of random pairs") {
  RngStream rng(10, 0);
  TruncatedCascade cascade(make_params({0.4, 0.6}), {5, 5}, rng);
  const auto& shape = cascade.shape();
  for (int trial = 0; trial < 200; ++trial) {
    const long a = static_cast<long>(rng.uniform_index(shape.leaves()));
    const long b = static_cast<long>(rng.uniform_index(shape.leaves()));
    const VertexPath pa = shape.path(a, 2), pb = shape.path(b, 2);
    const VertexPath qa = cascade.sort_map(pa), qb = cascade.sort_map(pb);
    CHECK(dsg::wedge(pa, pb) == dsg::wedge(qa, qb));
  }
}

TEST_CASE("choose_branching meets the requested budget") {
  const auto params = make_params({0.3, 0.6});
  const auto branching = dsg::choose_branching(params, 0.02);
  REQUIRE(branching.size() == 2);
  RngStream rng(12, 0);
  std::vector<double> budgets;
  for (int i = 0; i < 50; ++i) {
    TruncatedCascade cascade(params, branching, rng);
    budgets.push_back(cascade.truncation_budget());
  }
  CHECK(dsg::mean_se(budgets).mean < 0.04);
}
