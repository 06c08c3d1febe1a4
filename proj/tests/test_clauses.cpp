#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsg/clauses.hpp"
#include "dsg/stats.hpp"

using dsg::ClauseInstance;
using dsg::ClauseModel;
using dsg::DisorderDist;
using dsg::RngStream;

namespace {

// Brute-force corner average of exp(theta) against product measures with
// means x_j; the independent oracle for the extension.
double corner_average(const ClauseInstance& c, std::span<const double> x) {
  const int K = c.model.K;
  double total = 0.0;
  std::vector<std::int8_t> sigma(K);
  for (int bits = 0; bits < (1 << K); ++bits) {
    double weight = 1.0;
    for (int j = 0; j < K; ++j) {
      sigma[j] = (bits >> j) & 1 ? 1 : -1;
      weight *= sigma[j] > 0 ? 0.5 * (1 + x[j]) : 0.5 * (1 - x[j]);
    }
    total += std::exp(dsg::theta_corner(c, sigma)) * weight;
  }
  return total;
}

}  // namespace

TEST_CASE("ksat corner values") {
  RngStream rng(31, 0);
  const auto c = dsg::sample_disorder(ClauseModel::ksat(3, 1.7), rng);
  std::vector<std::int8_t> sigma(c.j.begin(), c.j.end());
  CHECK(dsg::theta_corner(c, sigma) == doctest::Approx(-1.7));
  sigma[1] = static_cast<std::int8_t>(-sigma[1]);
  CHECK(dsg::theta_corner(c, sigma) == 0.0);
}

TEST_CASE("kspin corner and zero-coupling cases") {
  ClauseInstance c;
  c.model = ClauseModel::kspin(3, 2.0);
  c.g = 0.5;
  std::vector<std::int8_t> sigma = {1, -1, -1};
  CHECK(dsg::theta_corner(c, sigma) == doctest::Approx(2.0 * 0.5));
  sigma[0] = -1;
  CHECK(dsg::theta_corner(c, sigma) == doctest::Approx(-1.0));
  c.g = 0.0;
  const std::vector<double> x = {0.3, -0.2, 0.9};
  CHECK(dsg::exp_theta_extended(c, x) == doctest::Approx(1.0));
}

TEST_CASE("perturbation clause vanishes off the all-plus corner") {
  ClauseInstance c;
  c.model = ClauseModel::pert(3, 0.1);
  c.g = 0.37;
  std::vector<std::int8_t> all_plus = {1, 1, 1};
  CHECK(dsg::theta_corner(c, all_plus) == doctest::Approx(0.37));
  std::vector<std::int8_t> off = {1, -1, 1};
  CHECK(dsg::theta_corner(c, off) == 0.0);
}

TEST_CASE("extension equals the brute-force corner average") {
  RngStream rng(32, 0);
  const std::vector<ClauseModel> models = {
      ClauseModel::kspin(3, 1.2),
      ClauseModel::kspin(2, 0.8, DisorderDist::rademacher),
      ClauseModel::ksat(4, 1.5),
      ClauseModel::pert(3, 0.2),
  };
  for (const auto& model : models) {
    for (int rep = 0; rep < 200; ++rep) {
      const auto c = dsg::sample_disorder(model, rng);
      std::vector<double> x(model.K);
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      const double direct = dsg::exp_theta_extended(c, x);
      CHECK(direct == doctest::Approx(corner_average(c, x)).epsilon(1e-12));
      CHECK(direct > 0.0);
    }
  }
}

TEST_CASE("corner inputs reproduce exp(theta_corner) exactly") {
  RngStream rng(33, 0);
  for (const auto& model :
       {ClauseModel::kspin(2, 1.0), ClauseModel::ksat(3, 2.0),
        ClauseModel::pert(2, 0.1)}) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto c = dsg::sample_disorder(model, rng);
      std::vector<std::int8_t> sigma(model.K);
      std::vector<double> x(model.K);
      for (int j = 0; j < model.K; ++j) {
        sigma[j] = rng.rademacher() > 0 ? 1 : -1;
        x[j] = sigma[j];
      }
      CHECK(dsg::theta_extended(c, x) ==
            doctest::Approx(dsg::theta_corner(c, sigma)).epsilon(1e-12));
    }
  }
}

TEST_CASE("both evaluations are symmetric in the coordinates") {
  RngStream rng(34, 0);
  const std::vector<double> x = {0.2, -0.5, 0.8};
  const std::vector<double> y = {0.8, 0.2, -0.5};  // cyclic shift of x

  const auto kspin = dsg::sample_disorder(ClauseModel::kspin(3, 1.1), rng);
  CHECK(dsg::theta_extended(kspin, x) ==
        doctest::Approx(dsg::theta_extended(kspin, y)));

  // ksat symmetry holds jointly with its signs; equal signs isolate it.
  ClauseInstance ksat;
  ksat.model = ClauseModel::ksat(3, 0.9);
  ksat.j = {-1, -1, -1};
  CHECK(dsg::theta_extended(ksat, x) ==
        doctest::Approx(dsg::theta_extended(ksat, y)));
}

TEST_CASE("disorder sampling laws") {
  RngStream rng(35, 0);
  const int n = 10000;
  // ksat signs are fair coins.
  std::vector<double> mean_j(n);
  for (int i = 0; i < n; ++i) {
    const auto c = dsg::sample_disorder(ClauseModel::ksat(4, 1.0), rng);
    double s = 0.0;
    for (auto j : c.j) {
      CHECK((j == 1 || j == -1));
      s += j;
    }
    mean_j[i] = s / 4.0;
  }
  const auto mj = dsg::mean_se(mean_j);
  CHECK(std::fabs(mj.mean) <= 3.0 * mj.std_error);

  // Rademacher couplings have unit magnitude.
  for (int i = 0; i < 100; ++i) {
    const auto c = dsg::sample_disorder(
        ClauseModel::kspin(2, 1.0, DisorderDist::rademacher), rng);
    CHECK(std::fabs(c.g) == doctest::Approx(1.0));
  }

  // Perturbation variance honors 2^{-d} eps_pert.
  const ClauseModel pert = ClauseModel::pert(5, 0.1);
  const double sigma2 = pert.pert_sigma2();
  CHECK(sigma2 == doctest::Approx(0.1 / 32.0));
  std::vector<double> g2(n);
  for (int i = 0; i < n; ++i) {
    const auto c = dsg::sample_disorder(pert, rng);
    g2[i] = c.g * c.g;
  }
  const auto mg = dsg::mean_se(g2);
  CHECK(mg.mean <= sigma2 + 3.0 * mg.std_error);
  CHECK(std::fabs(mg.mean - sigma2) <= 3.0 * mg.std_error);
}

TEST_CASE("out-of-range extension inputs are rejected") {
  RngStream rng(36, 0);
  const auto c = dsg::sample_disorder(ClauseModel::ksat(2, 1.0), rng);
  const std::vector<double> bad = {0.5, 1.2};
  CHECK_THROWS_AS(dsg::theta_extended(c, bad), std::invalid_argument);
  const std::vector<double> short_x = {0.5};
  CHECK_THROWS_AS(dsg::theta_extended(c, short_x), std::invalid_argument);
}
