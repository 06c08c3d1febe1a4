#pragma once

#include <vector>

#include "dsg/cascade.hpp"
#include "dsg/clauses.hpp"
#include "dsg/fields.hpp"
#include "dsg/mp_functional.hpp"

namespace dsg {

// Replica moment spec for the cavity equations: q replica index sets
// C_l within {1..m}, split into cavity coordinates (<= n) and plain ones.
struct CavitySpec {
  int n_cavity = 1;
  int m_total = 1;
  int q_replicas = 1;
  std::vector<std::vector<int>> coord_sets;  // 1-based, one set per replica

  ClauseModel model;
  double lambda = 0.0;
  PerturbationSpec pert;
  OrderParamH h = OrderParamH::constant(1, 0.0);
  CascadeParams cascade;
  std::vector<int> branching;
  double omega_star = 0.0;

  void validate() const;
};

// Per-leaf cavity field of one coordinate: A_i = log Av exp A_i(eps) and
// xi_i = Av eps exp A_i(eps) / exp A_i = tanh((A_i(+1) - A_i(-1))/2).
struct CavityField {
  Eigen::ArrayXd log_av;  // A_i per leaf
  Eigen::ArrayXd xi;      // in [-1, 1] per leaf
};

CavityField cavity_field(const OrderParamH& h, const TreeShape& shape,
                         const ClauseModel& model, double lambda,
                         const PerturbationSpec& pert, RngStream& rng,
                         double omega_star = 0.0, long* term_count = nullptr);

struct CavityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double std_error = 0.0;  // of the residual, common random numbers
  long n_samples = 0;
  double truncation_budget = 0.0;
};

// Both sides of the cavity equations in the pure-state form, by Monte Carlo
// with shared cascades and fields between the two sides:
//   LHS = E prod_l sum_a V_a prod_{i in C_l} s_i^a
//   RHS = E prod_l sum_a Vtilde_a prod_{i in C_l^1} xi_i^a prod_{i in C_l^2} s_i^a
// with Vtilde_a ~ V_a exp(sum_{i<=n} A_i^a).
CavityResult cavity_residual(const CavitySpec& spec, long n_samples,
                             std::uint64_t seed, int workers = 1);

}  // namespace dsg
