#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "dsg/finite_system.hpp"
#include "dsg/mp_functional.hpp"

namespace dsg {

struct NelderMeadOptions {
  int max_iter = 300;
  double f_tol = 1e-7;
  double init_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opt = {});

// Unconstrained parameterization of the order parameter: r+1 logits map
// through a cumulative softmax to strictly increasing zetas in (0,1);
// h grid entries are raw values clamped to [-1,1].
Eigen::ArrayXd zetas_from_logits(const Eigen::VectorXd& logits);

struct SearchSpec {
  int r = 1;
  ClauseModel model;
  double lambda = 1.0;
  int grid = 4;  // h resolution per coordinate
  std::vector<int> branching;
  PerturbationSpec pert;  // usually disabled for the Franz-Leone comparison
  long n_samples = 400;          // MC budget per evaluation (first stage)
  std::vector<double> budget_scale = {1.0, 4.0};  // escalation schedule
  int multistarts = 4;
  std::uint64_t seed = 1;
  int workers = 1;
  NelderMeadOptions nm;
};

struct TraceRow {
  int start = 0;
  int stage = 0;
  int iteration = 0;
  double value = 0.0;
};

struct MinimizeResult {
  Eigen::ArrayXd zetas;
  OrderParamH h = OrderParamH::constant(1, 0.0);
  FunctionalEstimate value;          // at the final budget and CRN seed
  FunctionalEstimate revalidation;   // fresh seed, 4x budget
  bool revalidation_consistent = false;  // within 3 combined SE
  std::vector<TraceRow> trace;
  int best_start = 0;
};

// Nelder-Mead minimization of the estimated functional over (zeta, h) at
// fixed r, with common random numbers per stage and multistart.
MinimizeResult minimize_P(const SearchSpec& spec);

struct FlRow {
  int N = 0;
  double free_energy = 0.0;
  double fe_std_error = 0.0;
  bool exact = true;
  double gap = 0.0;       // min P - F_N
  double combined_se = 0.0;
};

struct FlReport {
  MinimizeResult minimum;
  std::vector<FlRow> rows;
  bool fl_valid = true;       // K-sat any K; K-spin even K
  std::string warning;
  long fe_instances = 0;
};

// Finite-N free energies against the minimized functional value.
FlReport fl_gap_report(const ClauseModel& model, double lambda,
                       const std::vector<int>& system_sizes,
                       const SearchSpec& spec, long fe_instances,
                       std::uint64_t fe_seed);

}  // namespace dsg
