#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsg/rng.hpp"
#include "dsg/stats.hpp"

using dsg::RngStream;

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_equal = false;
  for (int i = 0; i < 32; ++i) {
    const auto x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_equal = any_equal || (x == c.next_u64());
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal);
}

TEST_CASE("substreams do not collide with the parent") {
  RngStream a(1, 0);
  RngStream s = a.substream(0);
  RngStream fresh(1, 0);
  CHECK(s.next_u64() != fresh.next_u64());
}

TEST_CASE("uniform stays inside the open interval") {
  RngStream rng(3, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("moment sanity for the basic draws") {
  RngStream rng(11, 0);
  const int n = 200000;
  std::vector<double> u(n), e(n), g(n);
  for (int i = 0; i < n; ++i) {
    u[i] = rng.uniform();
    e[i] = rng.exponential();
    g[i] = rng.normal();
  }
  const auto mu = dsg::mean_se(u);
  CHECK(std::fabs(mu.mean - 0.5) < 3 * mu.std_error);
  const auto me = dsg::mean_se(e);
  CHECK(std::fabs(me.mean - 1.0) < 3 * me.std_error);
  const auto mg = dsg::mean_se(g);
  CHECK(std::fabs(mg.mean) < 3 * mg.std_error);
  std::vector<double> g2(n);
  for (int i = 0; i < n; ++i) g2[i] = g[i] * g[i];
  const auto mg2 = dsg::mean_se(g2);
  CHECK(std::fabs(mg2.mean - 1.0) < 3 * mg2.std_error);
}

TEST_CASE("poisson mean and variance, both samplers") {
  RngStream rng(5, 0);
  for (double mean : {0.7, 3.5, 9.9, 30.0, 120.0}) {
    const int n = 100000;
    std::vector<double> k(n), k2(n);
    for (int i = 0; i < n; ++i) {
      k[i] = static_cast<double>(rng.poisson(mean));
      k2[i] = k[i] * k[i];
    }
    const auto mk = dsg::mean_se(k);
    CHECK(std::fabs(mk.mean - mean) < 4 * mk.std_error);
    const auto mk2 = dsg::mean_se(k2);
    const double var = mk2.mean - mk.mean * mk.mean;
    // Var = mean for a Poisson; generous tolerance for the plug-in variance.
    CHECK(std::fabs(var - mean) / mean < 0.05);
  }
  CHECK(rng.poisson(0.0) == 0);
  CHECK_THROWS_AS(rng.poisson(-1.0), std::invalid_argument);
}

TEST_CASE("rademacher is a fair sign") {
  RngStream rng(9, 0);
  long sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int s = rng.rademacher();
    CHECK((s == 1 || s == -1));
    sum += s;
  }
  CHECK(std::fabs(static_cast<double>(sum)) < 3.0 * std::sqrt(n));
}

TEST_CASE("uniform_index covers the range") {
  RngStream rng(13, 0);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 5000; ++i) ++seen[rng.uniform_index(5)];
  for (int c : seen) CHECK(c > 0);
  CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}
