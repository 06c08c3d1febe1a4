#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace dsg {

// Sum with a fixed pairwise reduction tree. The result depends only on the
// order of the inputs, never on how work was scheduled, which keeps parallel
// ensembles bit-reproducible.
double pairwise_sum(std::span<const double> x);

struct MeanSE {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

MeanSE mean_se(std::span<const double> x);

double log_sum_exp(const Eigen::ArrayXd& a);
// log(exp(a) + exp(b))
double log_add_exp(double a, double b);

// Sample correlation of two equally sized samples.
double correlation(std::span<const double> x, std::span<const double> y);

// Monte Carlo estimate bundled with its error and truncation metadata.
struct FunctionalEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::vector<int> branching;       // per-level cascade truncation, empty if n/a
  double truncation_budget = 0.0;   // estimated bias allowance from truncation
};

}  // namespace dsg
