#include "dsg/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include "dsg/parallel.hpp"
#include "dsg/stats.hpp"

namespace dsg {

void CavitySpec::validate() const {
  if (n_cavity < 0 || m_total < n_cavity || q_replicas < 1)
    throw std::invalid_argument("CavitySpec: need 0 <= n <= m and q >= 1");
  if (static_cast<int>(coord_sets.size()) != q_replicas)
    throw std::invalid_argument("CavitySpec: one coordinate set per replica");
  for (const auto& set : coord_sets)
    for (int i : set)
      if (i < 1 || i > m_total)
        throw std::invalid_argument("CavitySpec: coordinate outside 1..m");
  model.validate();
  cascade.validate();
  if (h.r() != cascade.r)
    throw std::invalid_argument("CavitySpec: h depth must match cascade depth");
}

CavityField cavity_field(const OrderParamH& h, const TreeShape& shape,
                         const ClauseModel& model, double lambda,
                         const PerturbationSpec& pert, RngStream& rng,
                         double omega_star, long* term_count) {
  const LeafFieldPair pair = sample_cavity_terms(h, shape, model, lambda, pert,
                                                 rng, omega_star, term_count);
  CavityField out;
  out.log_av.resize(pair.a_plus.size());
  out.xi.resize(pair.a_plus.size());
  for (long leaf = 0; leaf < pair.a_plus.size(); ++leaf) {
    out.log_av[leaf] =
        log_add_exp(pair.a_plus[leaf], pair.a_minus[leaf]) - M_LN2;
    out.xi[leaf] = std::tanh(0.5 * (pair.a_plus[leaf] - pair.a_minus[leaf]));
  }
  return out;
}

CavityResult cavity_residual(const CavitySpec& spec, long n_samples,
                             std::uint64_t seed, int workers) {
  spec.validate();
  std::vector<double> lhs(n_samples), rhs(n_samples), budget(n_samples);
  parallel_for(n_samples, workers, [&](long s) {
    RngStream rng(seed, static_cast<std::uint64_t>(s));
    TruncatedCascade cascade(spec.cascade, spec.branching, rng);
    const TreeShape& shape = cascade.shape();
    const Eigen::ArrayXd& v = cascade.sorted_leaf_weights();

    // One independent hierarchical field copy per coordinate i <= m.
    std::vector<Eigen::ArrayXd> sbar;
    sbar.reserve(spec.m_total);
    for (int i = 0; i < spec.m_total; ++i)
      sbar.push_back(
          sample_field_leaves(spec.h, shape, rng, spec.omega_star));

    // Cavity fields for coordinates i <= n.
    std::vector<CavityField> fields;
    fields.reserve(spec.n_cavity);
    Eigen::ArrayXd a_total = Eigen::ArrayXd::Zero(shape.leaves());
    for (int i = 0; i < spec.n_cavity; ++i) {
      fields.push_back(cavity_field(spec.h, shape, spec.model, spec.lambda,
                                    spec.pert, rng, spec.omega_star, nullptr));
      a_total += fields.back().log_av;
    }
    const Eigen::ArrayXd log_tilted = v.log() + a_total;
    const Eigen::ArrayXd v_tilted =
        (log_tilted - log_sum_exp(log_tilted)).exp();

    double lhs_prod = 1.0, rhs_prod = 1.0;
    for (const auto& set : spec.coord_sets) {
      Eigen::ArrayXd lhs_leaf = Eigen::ArrayXd::Ones(shape.leaves());
      Eigen::ArrayXd rhs_leaf = Eigen::ArrayXd::Ones(shape.leaves());
      for (int i : set) {
        lhs_leaf *= sbar[i - 1];
        if (i <= spec.n_cavity)
          rhs_leaf *= fields[i - 1].xi;
        else
          rhs_leaf *= sbar[i - 1];
      }
      lhs_prod *= (v * lhs_leaf).sum();
      rhs_prod *= (v_tilted * rhs_leaf).sum();
    }
    lhs[s] = lhs_prod;
    rhs[s] = rhs_prod;
    budget[s] = cascade.truncation_budget();
  });

  std::vector<double> diff(n_samples);
  for (long s = 0; s < n_samples; ++s) diff[s] = lhs[s] - rhs[s];
  const MeanSE d = mean_se(diff);
  CavityResult out;
  out.lhs = mean_se(lhs).mean;
  out.rhs = mean_se(rhs).mean;
  out.residual = d.mean;
  out.std_error = d.std_error;
  out.n_samples = n_samples;
  out.truncation_budget = mean_se(budget).mean;
  return out;
}

}  // namespace dsg
