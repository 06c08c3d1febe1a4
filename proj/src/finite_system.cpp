#include "dsg/finite_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsg/parallel.hpp"

namespace dsg {

namespace {

std::vector<std::int32_t> uniform_sites(int N, int k, RngStream& rng) {
  std::vector<std::int32_t> sites(k);
  for (int j = 0; j < k; ++j)
    sites[j] = static_cast<std::int32_t>(rng.uniform_index(N));
  return sites;
}

double clause_value(const AttachedClause& ac,
                    std::span<const std::int8_t> sigma,
                    std::vector<std::int8_t>& scratch) {
  scratch.resize(ac.sites.size());
  for (std::size_t j = 0; j < ac.sites.size(); ++j)
    scratch[j] = sigma[ac.sites[j]];
  return theta_corner(ac.clause, scratch);
}

// Site -> indices of clauses touching it, over model + perturbation parts.
struct Incidence {
  std::vector<const AttachedClause*> clauses;
  std::vector<std::vector<std::int32_t>> by_site;

  explicit Incidence(const HamiltonianInstance& inst) {
    clauses.reserve(inst.model_clauses.size() + inst.pert_clauses.size());
    for (const auto& c : inst.model_clauses) clauses.push_back(&c);
    for (const auto& c : inst.pert_clauses) clauses.push_back(&c);
    by_site.resize(inst.N);
    for (std::size_t idx = 0; idx < clauses.size(); ++idx)
      for (std::int32_t s : clauses[idx]->sites)
        by_site[s].push_back(static_cast<std::int32_t>(idx));
  }
};

// Visits every state exactly once in Gray-code order with the running H.
template <class Visitor>
void enumerate_states(const HamiltonianInstance& inst, Visitor&& visit) {
  if (inst.N < 1 || inst.N > kEnumerationCap)
    throw std::invalid_argument(
        "enumeration requires 1 <= N <= 24; use the mcmc estimate above the cap");
  const Incidence inc(inst);
  std::vector<std::int8_t> sigma(inst.N, -1);
  std::vector<std::int8_t> scratch;
  double h = 0.0;
  for (const auto* c : inc.clauses) h += clause_value(*c, sigma, scratch);
  std::uint32_t mask = 0;
  visit(mask, h);
  const std::uint64_t total = 1ULL << inst.N;
  for (std::uint64_t t = 1; t < total; ++t) {
    const int site = std::countr_zero(t);
    double before = 0.0, after = 0.0;
    for (std::int32_t ci : inc.by_site[site])
      before += clause_value(*inc.clauses[ci], sigma, scratch);
    sigma[site] = static_cast<std::int8_t>(-sigma[site]);
    mask ^= (1u << site);
    for (std::int32_t ci : inc.by_site[site])
      after += clause_value(*inc.clauses[ci], sigma, scratch);
    h += after - before;
    visit(mask, h);
  }
}

std::vector<std::int8_t> spins_from_mask(std::uint32_t mask, int N) {
  std::vector<std::int8_t> s(N);
  for (int i = 0; i < N; ++i)
    s[i] = (mask >> i) & 1u ? std::int8_t{1} : std::int8_t{-1};
  return s;
}

// Gibbs probabilities over all 2^N states, indexed by spin mask.
struct GibbsTable {
  int N = 0;
  std::vector<double> prob;  // normalized
  std::vector<double> cdf;

  std::uint32_t sample_mask(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::uint32_t>(
        std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
  }
};

GibbsTable build_gibbs_table(const HamiltonianInstance& inst) {
  GibbsTable t;
  t.N = inst.N;
  t.prob.assign(1ULL << inst.N, 0.0);
  double max_h = -std::numeric_limits<double>::infinity();
  enumerate_states(inst, [&](std::uint32_t mask, double h) {
    t.prob[mask] = h;
    max_h = std::max(max_h, h);
  });
  double z = 0.0;
  for (double& p : t.prob) {
    p = std::exp(p - max_h);
    z += p;
  }
  t.cdf.resize(t.prob.size());
  double run = 0.0;
  for (std::size_t i = 0; i < t.prob.size(); ++i) {
    t.prob[i] /= z;
    run += t.prob[i];
    t.cdf[i] = run;
  }
  return t;
}

double overlap_masks(std::uint32_t a, std::uint32_t b, int N) {
  const int agree = N - std::popcount((a ^ b) & ((1u << N) - 1u));
  return (2.0 * agree - N) / N;
}

// Single-spin-flip Metropolis chain for the Gibbs measure ~ exp(scale * H).
class MetropolisChain {
 public:
  MetropolisChain(const Incidence& inc, int N, double scale, RngStream rng)
      : inc_(inc), scale_(scale), rng_(std::move(rng)), sigma_(N, -1) {
    for (int i = 0; i < N; ++i)
      sigma_[i] = rng_.rademacher() > 0 ? std::int8_t{1} : std::int8_t{-1};
    energy_ = 0.0;
    std::vector<std::int8_t> scratch;
    for (const auto* c : inc_.clauses)
      energy_ += clause_value(*c, sigma_, scratch);
  }

  void sweep() {
    const int N = static_cast<int>(sigma_.size());
    for (int site = 0; site < N; ++site) {
      double before = 0.0, after = 0.0;
      for (std::int32_t ci : inc_.by_site[site])
        before += clause_value(*inc_.clauses[ci], sigma_, scratch_);
      sigma_[site] = static_cast<std::int8_t>(-sigma_[site]);
      for (std::int32_t ci : inc_.by_site[site])
        after += clause_value(*inc_.clauses[ci], sigma_, scratch_);
      const double delta = after - before;
      if (scale_ * delta >= 0.0 ||
          rng_.uniform() < std::exp(scale_ * delta)) {
        energy_ += delta;
      } else {
        sigma_[site] = static_cast<std::int8_t>(-sigma_[site]);  // reject
      }
    }
  }

  double energy() const { return energy_; }
  const std::vector<std::int8_t>& spins() const { return sigma_; }

 private:
  const Incidence& inc_;
  double scale_;
  RngStream rng_;
  std::vector<std::int8_t> sigma_;
  std::vector<std::int8_t> scratch_;
  double energy_ = 0.0;
};

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration.
void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[n - 1 - i] = 0.5 * 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

HamiltonianInstance sample_instance(int N, double lambda,
                                    const ClauseModel& model, double eps_pert,
                                    int d_max, RngStream& rng) {
  if (N < 1) throw std::invalid_argument("sample_instance: N must be >= 1");
  if (lambda < 0.0)
    throw std::invalid_argument("sample_instance: lambda must be >= 0");
  model.validate();
  HamiltonianInstance inst;
  inst.N = N;
  inst.eps_pert = eps_pert;
  inst.d_max = d_max;
  if (lambda > 0.0) {
    const long n_clauses = rng.poisson(lambda * N);
    inst.model_clauses.reserve(n_clauses);
    for (long k = 0; k < n_clauses; ++k) {
      AttachedClause ac;
      ac.clause = sample_disorder(model, rng);
      ac.sites = uniform_sites(N, model.K, rng);
      inst.model_clauses.push_back(std::move(ac));
    }
  }
  if (eps_pert > 0.0) {
    const ClauseModel one = ClauseModel::pert(1, eps_pert);
    for (int i = 0; i < N; ++i) {
      AttachedClause ac;
      ac.clause = sample_disorder(one, rng);
      ac.sites = {static_cast<std::int32_t>(i)};
      inst.pert_clauses.push_back(std::move(ac));
    }
    for (int d = 2; d <= d_max; ++d) {
      const ClauseModel pd = ClauseModel::pert(d, eps_pert);
      const long nd = rng.poisson(static_cast<double>(N));
      for (long k = 0; k < nd; ++k) {
        AttachedClause ac;
        ac.clause = sample_disorder(pd, rng);
        ac.sites = uniform_sites(N, d, rng);
        inst.pert_clauses.push_back(std::move(ac));
      }
    }
  }
  return inst;
}

double hamiltonian_value(const HamiltonianInstance& inst,
                         std::span<const std::int8_t> sigma) {
  if (static_cast<int>(sigma.size()) != inst.N)
    throw std::invalid_argument("hamiltonian_value: spin count mismatch");
  std::vector<std::int8_t> scratch;
  double h = 0.0;
  for (const auto& c : inst.model_clauses) h += clause_value(c, sigma, scratch);
  for (const auto& c : inst.pert_clauses) h += clause_value(c, sigma, scratch);
  return h;
}

double free_energy_exact(const HamiltonianInstance& inst) {
  double max_h = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  enumerate_states(inst, [&](std::uint32_t, double h) {
    if (h <= max_h) {
      sum += std::exp(h - max_h);
    } else {
      sum = sum * std::exp(max_h - h) + 1.0;
      max_h = h;
    }
  });
  return (max_h + std::log(sum)) / inst.N;
}

FreeEnergyResult free_energy(const HamiltonianInstance& inst, RngStream& rng,
                             const McmcOptions& opt) {
  FreeEnergyResult out;
  if (inst.N <= kEnumerationCap) {
    out.value = free_energy_exact(inst);
    out.exact = true;
    return out;
  }
  // Thermodynamic integration: F = log 2 + (1/N) int_0^1 <H>_t dt.
  const Incidence inc(inst);
  std::vector<double> nodes, weights;
  gauss_legendre_01(opt.ti_nodes, nodes, weights);
  double integral = 0.0, var = 0.0;
  for (int k = 0; k < opt.ti_nodes; ++k) {
    MetropolisChain chain(inc, inst.N, nodes[k],
                          rng.substream(1000 + static_cast<std::uint64_t>(k)));
    for (long s = 0; s < opt.burn_sweeps; ++s) chain.sweep();
    std::vector<double> energies(opt.ti_samples);
    for (long s = 0; s < opt.ti_samples; ++s) {
      for (long th = 0; th < opt.thin_sweeps; ++th) chain.sweep();
      energies[s] = chain.energy();
    }
    const MeanSE m = mean_se(energies);
    integral += weights[k] * m.mean;
    var += weights[k] * weights[k] * m.std_error * m.std_error;
  }
  out.value = M_LN2 + integral / inst.N;
  out.std_error = std::sqrt(var) / inst.N;
  out.exact = false;
  return out;
}

EnsembleFreeEnergy free_energy_ensemble(int N, double lambda,
                                        const ClauseModel& model,
                                        double eps_pert, int d_max,
                                        long n_instances, std::uint64_t seed,
                                        int workers, const McmcOptions& opt) {
  EnsembleFreeEnergy out;
  out.per_instance.resize(n_instances);
  out.exact = N <= kEnumerationCap;
  parallel_for(n_instances, workers, [&](long i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const HamiltonianInstance inst =
        sample_instance(N, lambda, model, eps_pert, d_max, rng);
    out.per_instance[i] = free_energy(inst, rng, opt).value;
  });
  out.estimate = mean_se(out.per_instance);
  return out;
}

ReplicaBatch sample_replicas(const HamiltonianInstance& inst, long n,
                             RngStream& rng, SamplingMethod method,
                             const McmcOptions& opt) {
  ReplicaBatch batch;
  batch.N = inst.N;
  batch.method = method;
  batch.spins.reserve(n);
  if (method == SamplingMethod::exact) {
    const GibbsTable table = build_gibbs_table(inst);
    for (long k = 0; k < n; ++k)
      batch.spins.push_back(spins_from_mask(table.sample_mask(rng), inst.N));
    return batch;
  }
  const Incidence inc(inst);
  const int chains = std::max(1, opt.chains);
  std::vector<MetropolisChain> pool;
  pool.reserve(chains);
  for (int c = 0; c < chains; ++c) {
    pool.emplace_back(inc, inst.N, 1.0,
                      rng.substream(static_cast<std::uint64_t>(c)));
    for (long s = 0; s < opt.burn_sweeps; ++s) pool.back().sweep();
  }
  std::vector<std::vector<double>> energies(chains);
  for (long k = 0; k < n; ++k) {
    MetropolisChain& chain = pool[k % chains];
    for (long th = 0; th < opt.thin_sweeps; ++th) chain.sweep();
    batch.spins.push_back(chain.spins());
    energies[k % chains].push_back(chain.energy());
  }
  if (chains >= 2 && n >= 2 * chains) {
    // Potential-scale-reduction style diagnostic on chain energies.
    std::vector<double> means(chains), vars(chains);
    double w = 0.0;
    for (int c = 0; c < chains; ++c) {
      const MeanSE m = mean_se(energies[c]);
      means[c] = m.mean;
      const double nc = static_cast<double>(energies[c].size());
      vars[c] = m.std_error * m.std_error * nc;
      w += vars[c] / chains;
    }
    const MeanSE mm = mean_se(means);
    const double b = mm.std_error * mm.std_error * chains *
                     static_cast<double>(energies[0].size());
    const double nc = static_cast<double>(energies[0].size());
    batch.rhat_energy =
        w > 0 ? std::sqrt(((nc - 1.0) / nc * w + b / nc) / w) : 1.0;
  }
  return batch;
}

Eigen::ArrayXd magnetizations_exact(const HamiltonianInstance& inst) {
  const GibbsTable table = build_gibbs_table(inst);
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(inst.N);
  for (std::size_t mask = 0; mask < table.prob.size(); ++mask)
    for (int i = 0; i < inst.N; ++i)
      m[i] += table.prob[mask] * ((mask >> i) & 1u ? 1.0 : -1.0);
  return m;
}

double overlap(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("overlap: configuration size mismatch");
  long dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    dot += static_cast<long>(a[i]) * b[i];
  return static_cast<double>(dot) / a.size();
}

GGResult gg_residual(int N, double lambda, const ClauseModel& model,
                     double eps_pert, int d_max, const ReplicaFn& f,
                     const std::function<double(double)>& psi,
                     const GGOptions& opt) {
  const int n = opt.n_replicas;
  if (n < 2) throw std::invalid_argument("gg_residual: n must be >= 2");
  if (opt.exact_bracket && (n != 2 || N > 12))
    throw std::invalid_argument(
        "gg_residual: exact bracket supports n = 2 and N <= 12");
  const long m = opt.n_instances;

  // Per instance: a_l = <f psi(R_{1,l})> for l = 2..n+1, b = <f>,
  // y = <n psi(R_{1,n+1}) - sum_l psi(R_{1,l})>, an unbiased estimate of
  // <psi(R_{1,2})> chosen so that f == 1 cancels the residual identically.
  Eigen::MatrixXd a(m, n);  // columns l-2 = 0..n-1, last = l = n+1
  Eigen::VectorXd b(m), y(m);
  const int n_bins = N + 1;
  Eigen::MatrixXd hist_new(m, n_bins), hist_pair(m, n_bins), hist_old(m, n_bins);
  hist_new.setZero();
  hist_pair.setZero();
  hist_old.setZero();

  parallel_for(m, opt.workers, [&](long i) {
    RngStream rng(opt.seed, static_cast<std::uint64_t>(i));
    const HamiltonianInstance inst =
        sample_instance(N, lambda, model, eps_pert, d_max, rng);
    auto bin_of = [&](double r) {
      int k = static_cast<int>(std::lround((r + 1.0) * N / 2.0));
      return std::clamp(k, 0, N);
    };
    if (opt.exact_bracket) {
      const GibbsTable table = build_gibbs_table(inst);
      const std::size_t states = table.prob.size();
      std::vector<std::vector<std::int8_t>> spins(states);
      for (std::size_t s = 0; s < states; ++s)
        spins[s] = spins_from_mask(static_cast<std::uint32_t>(s), N);
      std::vector<double> t1(states, 0.0);
      for (std::size_t s = 0; s < states; ++s) {
        double acc = 0.0;
        for (std::size_t t = 0; t < states; ++t)
          acc += table.prob[t] *
                 psi(overlap_masks(static_cast<std::uint32_t>(s),
                                   static_cast<std::uint32_t>(t), N));
        t1[s] = acc;
      }
      double a2 = 0.0, a3 = 0.0, bb = 0.0, yy = 0.0;
      std::vector<std::span<const std::int8_t>> pair(2);
      for (std::size_t s = 0; s < states; ++s) {
        yy += table.prob[s] * t1[s];
        for (std::size_t t = 0; t < states; ++t) {
          const double pp = table.prob[s] * table.prob[t];
          pair[0] = spins[s];
          pair[1] = spins[t];
          const double fv = f(pair);
          const double psv = psi(overlap_masks(
              static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t), N));
          a2 += pp * fv * psv;
          a3 += pp * fv * t1[s];
          bb += pp * fv;
        }
      }
      a(i, 0) = a2;
      a(i, n - 1) = a3;
      b(i) = bb;
      y(i) = yy;
      return;
    }
    // Monte Carlo bracket: tuples of n+3 replicas; the trailing pair feeds
    // the mixture-law diagnostic only.
    const GibbsTable table = N <= kEnumerationCap ? build_gibbs_table(inst)
                                                  : GibbsTable{};
    ReplicaBatch batch;
    if (N <= kEnumerationCap) {
      batch.N = N;
      for (long t = 0; t < opt.tuples_per_instance * (n + 3); ++t)
        batch.spins.push_back(spins_from_mask(table.sample_mask(rng), N));
    } else {
      batch = sample_replicas(inst, opt.tuples_per_instance * (n + 3), rng,
                              SamplingMethod::mcmc);
    }
    Eigen::VectorXd ai = Eigen::VectorXd::Zero(n);
    double bi = 0.0, yi = 0.0;
    std::vector<std::span<const std::int8_t>> view(n);
    for (long t = 0; t < opt.tuples_per_instance; ++t) {
      const auto* tuple = &batch.spins[t * (n + 3)];
      for (int l = 0; l < n; ++l) view[l] = tuple[l];
      const double fv = f(view);
      double psum = 0.0;
      for (int l = 2; l <= n; ++l) {
        const double ps = psi(overlap(tuple[0], tuple[l - 1]));
        ai[l - 2] += fv * ps;
        psum += ps;
      }
      const double r_new = overlap(tuple[0], tuple[n]);
      const double ps_new = psi(r_new);
      ai[n - 1] += fv * ps_new;
      bi += fv;
      yi += n * ps_new - psum;
      hist_new(i, bin_of(r_new)) += 1.0;
      hist_pair(i, bin_of(overlap(tuple[n + 1], tuple[n + 2]))) += 1.0;
      for (int l = 2; l <= n; ++l)
        hist_old(i, bin_of(overlap(tuple[0], tuple[l - 1]))) +=
            1.0 / (n - 1);
    }
    const double inv = 1.0 / opt.tuples_per_instance;
    for (int l = 0; l < n; ++l) a(i, l) = ai[l] * inv;
    b(i) = bi * inv;
    y(i) = yi * inv;
    hist_new.row(i) *= inv;
    hist_pair.row(i) *= inv;
    hist_old.row(i) *= inv;
  });

  auto col_mean = [&](const Eigen::VectorXd& v) {
    return mean_se({v.data(), static_cast<std::size_t>(m)}).mean;
  };
  const double b_bar = col_mean(b);
  const double y_bar = col_mean(y);
  double a_sum_old = 0.0;
  for (int l = 0; l < n - 1; ++l) a_sum_old += col_mean(a.col(l));
  const double a_new = col_mean(a.col(n - 1));

  GGResult out;
  out.lhs = a_new;
  out.residual = a_new - (b_bar * y_bar + a_sum_old) / n;

  out.per_instance_influence.resize(m);
  for (long i = 0; i < m; ++i) {
    double old_terms = 0.0;
    for (int l = 0; l < n - 1; ++l) old_terms += a(i, l);
    out.per_instance_influence[i] =
        a(i, n - 1) -
        (y_bar * b(i) + b_bar * y(i) - b_bar * y_bar + old_terms) / n;
  }
  out.std_error = mean_se(out.per_instance_influence).std_error;

  if (!opt.exact_bracket) {
    double sup = 0.0;
    for (int k = 0; k < n_bins; ++k) {
      const double p_new = col_mean(hist_new.col(k));
      const double p_mix = col_mean(hist_pair.col(k)) / n +
                           col_mean(hist_old.col(k)) * (n - 1.0) / n;
      sup = std::max(sup, std::fabs(p_new - p_mix));
    }
    out.mixture_sup_distance = sup;
  }
  return out;
}

namespace {

FunctionalEstimate replica_event_probability(
    int N, double lambda, const ClauseModel& model, double eps_pert, int d_max,
    int replicas_per_event, long n_instances, long events_per_instance,
    std::uint64_t seed, int workers, SamplingMethod method,
    const std::function<bool(const std::vector<std::uint32_t>&, int)>& mask_event,
    const std::function<bool(const std::vector<std::vector<std::int8_t>>&)>&
        spin_event) {
  std::vector<double> freq(n_instances);
  parallel_for(n_instances, workers, [&](long i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const HamiltonianInstance inst =
        sample_instance(N, lambda, model, eps_pert, d_max, rng);
    long hits = 0;
    if (method == SamplingMethod::exact) {
      const GibbsTable table = build_gibbs_table(inst);
      std::vector<std::uint32_t> masks(replicas_per_event);
      for (long e = 0; e < events_per_instance; ++e) {
        for (auto& mk : masks) mk = table.sample_mask(rng);
        if (mask_event(masks, N)) ++hits;
      }
    } else {
      ReplicaBatch batch =
          sample_replicas(inst, events_per_instance * replicas_per_event, rng,
                          SamplingMethod::mcmc);
      std::vector<std::vector<std::int8_t>> tuple(replicas_per_event);
      for (long e = 0; e < events_per_instance; ++e) {
        for (int l = 0; l < replicas_per_event; ++l)
          tuple[l] = batch.spins[e * replicas_per_event + l];
        if (spin_event(tuple)) ++hits;
      }
    }
    freq[i] = static_cast<double>(hits) / events_per_instance;
  });
  const MeanSE m = mean_se(freq);
  FunctionalEstimate est;
  est.value = m.mean;
  est.std_error = m.std_error;
  est.n_samples = n_instances * events_per_instance;
  return est;
}

}  // namespace

FunctionalEstimate ultrametricity_violation(int N, double lambda,
                                            const ClauseModel& model,
                                            double eps_pert, int d_max,
                                            double delta, long n_instances,
                                            long triplets_per_instance,
                                            std::uint64_t seed, int workers,
                                            SamplingMethod method) {
  auto mask_event = [delta](const std::vector<std::uint32_t>& mk, int n) {
    const double r12 = overlap_masks(mk[0], mk[1], n);
    const double r13 = overlap_masks(mk[0], mk[2], n);
    const double r23 = overlap_masks(mk[1], mk[2], n);
    return r23 < std::min(r12, r13) - delta;
  };
  auto spin_event = [delta](const std::vector<std::vector<std::int8_t>>& t) {
    const double r12 = overlap(t[0], t[1]);
    const double r13 = overlap(t[0], t[2]);
    const double r23 = overlap(t[1], t[2]);
    return r23 < std::min(r12, r13) - delta;
  };
  return replica_event_probability(N, lambda, model, eps_pert, d_max, 3,
                                   n_instances, triplets_per_instance, seed,
                                   workers, method, mask_event, spin_event);
}

FunctionalEstimate positivity_mass(int N, double lambda,
                                   const ClauseModel& model, double eps_pert,
                                   int d_max, double threshold,
                                   long n_instances, long pairs_per_instance,
                                   std::uint64_t seed, int workers,
                                   SamplingMethod method) {
  auto mask_event = [threshold](const std::vector<std::uint32_t>& mk, int n) {
    return overlap_masks(mk[0], mk[1], n) < -threshold;
  };
  auto spin_event = [threshold](const std::vector<std::vector<std::int8_t>>& t) {
    return overlap(t[0], t[1]) < -threshold;
  };
  return replica_event_probability(N, lambda, model, eps_pert, d_max, 2,
                                   n_instances, pairs_per_instance, seed,
                                   workers, method, mask_event, spin_event);
}

}  // namespace dsg
