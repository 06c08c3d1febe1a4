#include "dsg/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace dsg {

namespace {

double pairwise_sum_impl(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  return pairwise_sum_impl(x.data(), x.size());
}

MeanSE mean_se(std::span<const double> x) {
  MeanSE out;
  out.n = static_cast<long>(x.size());
  if (x.empty()) return out;
  out.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() < 2) return out;
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - out.mean;
    sq[i] = d * d;
  }
  const double var =
      pairwise_sum(sq) / static_cast<double>(x.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(x.size()));
  return out;
}

double log_sum_exp(const Eigen::ArrayXd& a) {
  if (a.size() == 0) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = a.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a nan propagates
  return m + std::log((a - m).exp().sum());
}

double log_add_exp(double a, double b) {
  const double m = a > b ? a : b;
  if (!std::isfinite(m)) return m;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("correlation: size mismatch");
  const MeanSE mx = mean_se(x);
  const MeanSE my = mean_se(y);
  std::vector<double> xy(x.size()), xx(x.size()), yy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx.mean;
    const double dy = y[i] - my.mean;
    xy[i] = dx * dy;
    xx[i] = dx * dx;
    yy[i] = dy * dy;
  }
  const double denom = std::sqrt(pairwise_sum(xx) * pairwise_sum(yy));
  if (denom == 0.0) return 0.0;
  return pairwise_sum(xy) / denom;
}

}  // namespace dsg
