#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsg/rng.hpp"

namespace dsg {

enum class ClauseKind { kspin, ksat, pert };
enum class DisorderDist { gaussian, rademacher };

// A random clause family: K-spin interaction, K-sat penalty, or the
// single-Gaussian perturbation clause of d variables.
struct ClauseModel {
  ClauseKind kind = ClauseKind::ksat;
  int K = 2;              // arity (d for the perturbation variant)
  double beta = 1.0;      // inverse temperature (kspin, ksat)
  DisorderDist gdist = DisorderDist::gaussian;  // kspin coupling law
  double eps_pert = 0.0;  // perturbation scale; Var g^d = 2^{-d} eps_pert

  static ClauseModel kspin(int K, double beta,
                           DisorderDist g = DisorderDist::gaussian);
  static ClauseModel ksat(int K, double beta);
  static ClauseModel pert(int d, double eps_pert);

  double pert_sigma2() const;
  void validate() const;
};

// A clause with its disorder frozen. Evaluation is pure and reentrant.
struct ClauseInstance {
  ClauseModel model;
  double g = 0.0;              // kspin coupling or perturbation Gaussian
  std::vector<std::int8_t> j;  // ksat literal signs, +/-1
};

ClauseInstance sample_disorder(const ClauseModel& model, RngStream& rng);

// theta on a corner of the cube, sigma in {-1,+1}^K.
double theta_corner(const ClauseInstance& c, std::span<const std::int8_t> sigma);

// The extension of exp(theta) to [-1,1]^K: the average of exp(theta) over
// independent +/-1 spins with means x_j. Strictly positive.
double exp_theta_extended(const ClauseInstance& c, std::span<const double> x);

// log of the above, computed without forming the exponential.
double theta_extended(const ClauseInstance& c, std::span<const double> x);

}  // namespace dsg
