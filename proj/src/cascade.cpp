#include "dsg/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dsg/parallel.hpp"

namespace dsg {

void CascadeParams::validate() const {
  if (r < 1) throw std::invalid_argument("CascadeParams: r must be >= 1");
  if (zetas.size() != r)
    throw std::invalid_argument("CascadeParams: need r zeta values");
  double prev = 0.0;
  for (int p = 0; p < r; ++p) {
    if (!(zetas[p] > prev && zetas[p] < 1.0))
      throw std::invalid_argument(
          "CascadeParams: zetas must satisfy 0 < zeta_0 < ... < zeta_{r-1} < 1");
    prev = zetas[p];
  }
  if (overlaps.size() != 0) {
    if (overlaps.size() != r + 1)
      throw std::invalid_argument("CascadeParams: need r+1 overlap values");
    double q = -1.0;
    for (int p = 0; p <= r; ++p) {
      if (!(overlaps[p] > q) || overlaps[p] < 0.0 || overlaps[p] > 1.0)
        throw std::invalid_argument(
            "CascadeParams: overlaps must satisfy 0 <= q_0 < ... < q_r <= 1");
      q = overlaps[p];
    }
  }
}

double poisson_point_from_arrival(double gamma, double zeta) {
  return std::pow(gamma, -1.0 / zeta);
}

Eigen::ArrayXd sample_poisson_points(double zeta, int m, RngStream& rng) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("sample_poisson_points: zeta must be in (0,1)");
  if (m < 1) throw std::invalid_argument("sample_poisson_points: m must be >= 1");
  Eigen::ArrayXd u(m);
  double gamma = 0.0;
  for (int n = 0; n < m; ++n) {
    gamma += rng.exponential();
    u[n] = poisson_point_from_arrival(gamma, zeta);
  }
  return u;
}

namespace {

// Expected untracked point mass beyond the m-th arrival, conditionally on
// Gamma_m: integral of (Gamma_m + t)^{-1/zeta} dt = Gamma_m^{1-1/zeta}/(1/zeta-1).
double expected_tail_mass(double gamma_last, double zeta) {
  const double inv = 1.0 / zeta;
  return std::pow(gamma_last, 1.0 - inv) / (inv - 1.0);
}

}  // namespace

std::vector<int> choose_branching(const CascadeParams& params, double budget,
                                  long max_leaves) {
  params.validate();
  if (!(budget > 0.0))
    throw std::invalid_argument("choose_branching: budget must be positive");
  std::vector<int> branching(params.r);
  const double per_level = budget / params.r;
  for (int p = 0; p < params.r; ++p) {
    const double zeta = params.zetas[p];
    int m = 2;
    for (;; m = m < 16 ? m + 1 : m * 2) {
      // Deterministic proxy: Gamma_m ~ m, tracked mass ~ sum n^{-1/zeta}.
      double tracked = 0.0;
      for (int n = 1; n <= m; ++n) tracked += std::pow(n, -1.0 / zeta);
      const double tail = expected_tail_mass(static_cast<double>(m), zeta);
      if (tail / (tracked + tail) <= per_level || m >= (1 << 20)) break;
    }
    branching[p] = m;
  }
  // Respect the leaf cap, shrinking the cheapest (smallest-zeta) levels last.
  while (true) {
    long leaves = 1;
    bool overflow = false;
    for (int p = 0; p < params.r; ++p) {
      if (leaves > max_leaves / branching[p]) {
        overflow = true;
        break;
      }
      leaves *= branching[p];
    }
    if (!overflow && leaves <= max_leaves) break;
    int widest = 0;
    for (int p = 1; p < params.r; ++p)
      if (branching[p] > branching[widest]) widest = p;
    if (branching[widest] <= 2)
      throw std::invalid_argument("choose_branching: leaf cap too small");
    branching[widest] = std::max(2, branching[widest] / 2);
  }
  return branching;
}

TruncatedCascade::TruncatedCascade(CascadeParams params,
                                   std::vector<int> branching, RngStream& rng)
    : params_(std::move(params)), shape_(params_.r, std::move(branching)) {
  params_.validate();
  const int r = params_.r;

  log_points_.resize(r);
  last_arrival_.resize(r);
  for (int p = 0; p < r; ++p) {
    const long nodes = shape_.nodes_at(p);
    const int m = shape_.branching_at(p);
    const double inv_zeta = 1.0 / params_.zetas[p];
    log_points_[p].resize(nodes * m);
    last_arrival_[p].resize(nodes);
    for (long node = 0; node < nodes; ++node) {
      double gamma = 0.0;
      for (int j = 0; j < m; ++j) {
        gamma += rng.exponential();
        log_points_[p][node * m + j] = -inv_zeta * std::log(gamma);
      }
      last_arrival_[p][node] = gamma;
    }
  }

  // log w along root paths, one level at a time.
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(1);
  for (int p = 0; p < r; ++p) {
    const long nodes = shape_.nodes_at(p);
    const int m = shape_.branching_at(p);
    Eigen::ArrayXd next(nodes * m);
    for (long node = 0; node < nodes; ++node)
      next.segment(node * m, m) =
          log_points_[p].segment(node * m, m) + acc[node];
    acc.swap(next);
  }
  leaf_log_w_ = std::move(acc);

  const double lse = log_sum_exp(leaf_log_w_);
  cluster_v_.resize(r + 1);
  cluster_v_[r] = (leaf_log_w_ - lse).exp();
  for (int p = r; p > 0; --p) {
    const long nodes = shape_.nodes_at(p - 1);
    const int m = shape_.branching_at(p - 1);
    cluster_v_[p - 1].resize(nodes);
    for (long node = 0; node < nodes; ++node)
      cluster_v_[p - 1][node] = cluster_v_[p].segment(node * m, m).sum();
  }

  sort_to_raw_ = recursive_weight_sort(shape_, cluster_v_);
  cluster_V_.resize(r + 1);
  for (int p = 0; p <= r; ++p) {
    const long nodes = shape_.nodes_at(p);
    cluster_V_[p].resize(nodes);
    for (long i = 0; i < nodes; ++i)
      cluster_V_[p][i] = cluster_v_[p][sort_to_raw_[p][i]];
  }

  // Truncation budget: cluster-weighted mean of per-node untracked fractions.
  truncation_budget_ = 0.0;
  for (int p = 0; p < r; ++p) {
    const long nodes = shape_.nodes_at(p);
    const int m = shape_.branching_at(p);
    const double zeta = params_.zetas[p];
    double level = 0.0;
    for (long node = 0; node < nodes; ++node) {
      double tracked = 0.0;
      for (int j = 0; j < m; ++j)
        tracked += std::exp(log_points_[p][node * m + j]);
      const double tail = expected_tail_mass(last_arrival_[p][node], zeta);
      level += cluster_v_[p][node] * (tail / (tracked + tail));
    }
    truncation_budget_ += level;
  }

  leaf_cdf_.resize(shape_.leaves());
  double run = 0.0;
  for (long i = 0; i < shape_.leaves(); ++i) {
    run += cluster_V_[r][i];
    leaf_cdf_[i] = run;
  }
}

std::vector<std::vector<long>> recursive_weight_sort(
    const TreeShape& shape, const std::vector<Eigen::ArrayXd>& cluster_weights) {
  const int r = shape.depth();
  std::vector<std::vector<long>> sort_to_raw(r + 1);
  sort_to_raw[0] = {0};
  std::vector<long> order;
  for (int p = 0; p < r; ++p) {
    const long nodes = shape.nodes_at(p);
    const int m = shape.branching_at(p);
    sort_to_raw[p + 1].resize(nodes * m);
    order.resize(m);
    for (long s = 0; s < nodes; ++s) {
      const long raw = sort_to_raw[p][s];
      std::iota(order.begin(), order.end(), 0L);
      const Eigen::ArrayXd& w = cluster_weights[p + 1];
      // Ties broken by child index for reproducibility.
      std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
        return w[raw * m + a] > w[raw * m + b];
      });
      for (int j = 0; j < m; ++j)
        sort_to_raw[p + 1][s * m + j] = raw * m + order[j];
    }
  }
  return sort_to_raw;
}

VertexPath TruncatedCascade::sort_map(const VertexPath& sorted_vertex) const {
  const int p = sorted_vertex.depth();
  const long s = shape_.index(sorted_vertex);
  return shape_.path(sort_to_raw_[p][s], p);
}

long TruncatedCascade::sample_leaf(RngStream& rng, bool sorted) const {
  const double u = rng.uniform() * leaf_cdf_[leaf_cdf_.size() - 1];
  const double* begin = leaf_cdf_.data();
  const double* end = begin + leaf_cdf_.size();
  long s = std::lower_bound(begin, end, u) - begin;
  if (s >= leaf_cdf_.size()) s = leaf_cdf_.size() - 1;
  return sorted ? s : sort_to_raw_[shape_.depth()][s];
}

double TruncatedCascade::pair_overlap_mass(int p) const {
  if (p < 0) return 0.0;  // zeta_{-1} = 0 boundary
  if (p >= shape_.depth()) return 1.0;
  return 1.0 - cluster_V_[p + 1].square().sum();
}

void TruncatedCascade::self_check() const {
  const int r = shape_.depth();
  const double leaf_sum = cluster_v_[r].sum();
  if (std::fabs(leaf_sum - 1.0) > 1e-10)
    throw std::runtime_error("cascade self_check: leaf weights not normalized");
  if (std::fabs(cluster_V_[r].sum() - 1.0) > 1e-10)
    throw std::runtime_error("cascade self_check: sorted weights not normalized");
  for (int p = 0; p < r; ++p) {
    const long nodes = shape_.nodes_at(p);
    const int m = shape_.branching_at(p);
    for (long node = 0; node < nodes; ++node) {
      const double child_sum = cluster_v_[p + 1].segment(node * m, m).sum();
      if (std::fabs(child_sum - cluster_v_[p][node]) > 1e-12)
        throw std::runtime_error("cascade self_check: cluster sum mismatch");
      for (int j = 0; j + 1 < m; ++j)
        if (cluster_V_[p + 1][node * m + j] < cluster_V_[p + 1][node * m + j + 1])
          throw std::runtime_error("cascade self_check: children not sorted");
    }
  }
}

FunctionalEstimate overlap_cdf_check(const CascadeParams& params,
                                     const std::vector<int>& branching, int p,
                                     long n_cascades, std::uint64_t seed,
                                     int workers) {
  params.validate();
  std::vector<double> mass(n_cascades), budget(n_cascades);
  parallel_for(n_cascades, workers, [&](long i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    TruncatedCascade cascade(params, branching, rng);
    mass[i] = cascade.pair_overlap_mass(p);
    budget[i] = cascade.truncation_budget();
  });
  const MeanSE m = mean_se(mass);
  FunctionalEstimate est;
  est.value = m.mean;
  est.std_error = m.std_error;
  est.n_samples = n_cascades;
  est.branching = branching;
  est.truncation_budget = mean_se(budget).mean;
  return est;
}

}  // namespace dsg
