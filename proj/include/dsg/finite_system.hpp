#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dsg/clauses.hpp"
#include "dsg/mp_functional.hpp"
#include "dsg/rng.hpp"
#include "dsg/stats.hpp"

namespace dsg {

// A clause attached to concrete sites of a finite system (0-based indices).
struct AttachedClause {
  ClauseInstance clause;
  std::vector<std::int32_t> sites;
};

// H_N = sum of model clauses on Poisson(lambda N) uniform site tuples, plus
// (when eps_pert > 0) the perturbation part: theta^1_i for every site i and
// Poisson(N) clauses theta^d on d uniform sites for each 2 <= d <= d_max.
struct HamiltonianInstance {
  int N = 0;
  double eps_pert = 0.0;
  int d_max = 12;
  std::vector<AttachedClause> model_clauses;
  std::vector<AttachedClause> pert_clauses;

  long clause_count() const {
    return static_cast<long>(model_clauses.size() + pert_clauses.size());
  }
};

HamiltonianInstance sample_instance(int N, double lambda,
                                    const ClauseModel& model, double eps_pert,
                                    int d_max, RngStream& rng);

double hamiltonian_value(const HamiltonianInstance& inst,
                         std::span<const std::int8_t> sigma);

inline constexpr int kEnumerationCap = 24;

struct McmcOptions {
  long burn_sweeps = 100;
  long thin_sweeps = 10;
  int chains = 2;
  int ti_nodes = 12;        // Gauss-Legendre nodes for thermodynamic integration
  long ti_samples = 200;    // energy samples per node
};

struct FreeEnergyResult {
  double value = 0.0;
  double std_error = 0.0;  // 0 in exact mode
  bool exact = true;
};

// (1/N) log sum_sigma exp H(sigma) by Gray-code enumeration (N <= cap).
double free_energy_exact(const HamiltonianInstance& inst);

// Exact when N <= kEnumerationCap, otherwise a thermodynamic-integration
// MCMC estimate flagged approximate.
FreeEnergyResult free_energy(const HamiltonianInstance& inst, RngStream& rng,
                             const McmcOptions& opt = {});

// Disorder-averaged free energy over independently sampled instances.
struct EnsembleFreeEnergy {
  MeanSE estimate;
  bool exact = true;
  std::vector<double> per_instance;
};
EnsembleFreeEnergy free_energy_ensemble(int N, double lambda,
                                        const ClauseModel& model,
                                        double eps_pert, int d_max,
                                        long n_instances, std::uint64_t seed,
                                        int workers = 1,
                                        const McmcOptions& opt = {});

enum class SamplingMethod { exact, mcmc };

struct ReplicaBatch {
  int N = 0;
  SamplingMethod method = SamplingMethod::exact;
  std::vector<std::vector<std::int8_t>> spins;
  double rhat_energy = 1.0;  // split-chain diagnostic, mcmc only
};

ReplicaBatch sample_replicas(const HamiltonianInstance& inst, long n,
                             RngStream& rng, SamplingMethod method,
                             const McmcOptions& opt = {});

// Exact single-site magnetizations <sigma_i> (N <= cap).
Eigen::ArrayXd magnetizations_exact(const HamiltonianInstance& inst);

double overlap(std::span<const std::int8_t> a, std::span<const std::int8_t> b);

// Bounded observable of an n-replica spin array.
using ReplicaFn =
    std::function<double(const std::vector<std::span<const std::int8_t>>&)>;

struct GGOptions {
  int n_replicas = 2;  // the n of the identity; n+1 replicas get drawn
  long n_instances = 100;
  long tuples_per_instance = 200;  // MC mode
  bool exact_bracket = false;      // exact <.> by enumeration (n = 2, small N)
  std::uint64_t seed = 1;
  int workers = 1;
};

struct GGResult {
  double residual = 0.0;
  double std_error = 0.0;
  double lhs = 0.0;          // E<f psi(R_{1,n+1})>
  double mixture_sup_distance = 0.0;
  std::vector<double> per_instance_influence;  // for paired comparisons
};

// Monte Carlo residual of the Ghirlanda-Guerra identity
//   E<f psi(R_{1,n+1})> - (1/n) E<f> E<psi(R_{1,2})> - (1/n) sum_l E<f psi(R_{1,l})>
// estimated so that f == 1 cancels exactly. Reported, not asserted: the
// identity is asymptotic.
GGResult gg_residual(int N, double lambda, const ClauseModel& model,
                     double eps_pert, int d_max, const ReplicaFn& f,
                     const std::function<double(double)>& psi,
                     const GGOptions& opt);

// P(R_{2,3} < min(R_{1,2}, R_{1,3}) - delta) over replica triplets.
FunctionalEstimate ultrametricity_violation(int N, double lambda,
                                            const ClauseModel& model,
                                            double eps_pert, int d_max,
                                            double delta, long n_instances,
                                            long triplets_per_instance,
                                            std::uint64_t seed, int workers = 1,
                                            SamplingMethod method = SamplingMethod::exact);

// P(R_{1,2} < -threshold) over replica pairs.
FunctionalEstimate positivity_mass(int N, double lambda,
                                   const ClauseModel& model, double eps_pert,
                                   int d_max, double threshold,
                                   long n_instances, long pairs_per_instance,
                                   std::uint64_t seed, int workers = 1,
                                   SamplingMethod method = SamplingMethod::exact);

}  // namespace dsg
