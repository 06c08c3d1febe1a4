#include "dsg/clauses.hpp"

#include <cmath>
#include <stdexcept>

namespace dsg {

namespace {

double log_cosh(double y) {
  const double a = std::fabs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
}

void check_box(std::span<const double> x) {
  for (double v : x)
    if (!(std::fabs(v) <= 1.0))
      throw std::invalid_argument("clause evaluation: coordinate outside [-1,1]");
}

}  // namespace

ClauseModel ClauseModel::kspin(int K, double beta, DisorderDist g) {
  ClauseModel m;
  m.kind = ClauseKind::kspin;
  m.K = K;
  m.beta = beta;
  m.gdist = g;
  m.validate();
  return m;
}

ClauseModel ClauseModel::ksat(int K, double beta) {
  ClauseModel m;
  m.kind = ClauseKind::ksat;
  m.K = K;
  m.beta = beta;
  m.validate();
  return m;
}

ClauseModel ClauseModel::pert(int d, double eps_pert) {
  ClauseModel m;
  m.kind = ClauseKind::pert;
  m.K = d;
  m.eps_pert = eps_pert;
  m.validate();
  return m;
}

double ClauseModel::pert_sigma2() const {
  return std::ldexp(eps_pert, -K);  // 2^{-d} * eps_pert
}

void ClauseModel::validate() const {
  if (K < 1) throw std::invalid_argument("ClauseModel: arity must be >= 1");
  if (kind == ClauseKind::pert) {
    if (!(eps_pert >= 0.0))
      throw std::invalid_argument("ClauseModel: eps_pert must be >= 0");
  } else if (!(beta > 0.0) && beta != 0.0) {
    throw std::invalid_argument("ClauseModel: beta must be nonnegative");
  }
}

ClauseInstance sample_disorder(const ClauseModel& model, RngStream& rng) {
  model.validate();
  ClauseInstance c;
  c.model = model;
  switch (model.kind) {
    case ClauseKind::kspin:
      c.g = model.gdist == DisorderDist::gaussian
                ? rng.normal()
                : static_cast<double>(rng.rademacher());
      break;
    case ClauseKind::ksat:
      c.j.resize(model.K);
      for (int k = 0; k < model.K; ++k)
        c.j[k] = static_cast<std::int8_t>(rng.rademacher());
      break;
    case ClauseKind::pert:
      c.g = std::sqrt(model.pert_sigma2()) * rng.normal();
      break;
  }
  return c;
}

double theta_corner(const ClauseInstance& c, std::span<const std::int8_t> sigma) {
  if (static_cast<int>(sigma.size()) != c.model.K)
    throw std::invalid_argument("theta_corner: arity mismatch");
  switch (c.model.kind) {
    case ClauseKind::kspin: {
      int prod = 1;
      for (auto s : sigma) prod *= s;
      return c.model.beta * c.g * prod;
    }
    case ClauseKind::ksat: {
      for (int k = 0; k < c.model.K; ++k)
        if (sigma[k] != c.j[k]) return 0.0;
      return -c.model.beta;
    }
    case ClauseKind::pert: {
      for (auto s : sigma)
        if (s != 1) return 0.0;
      return c.g;
    }
  }
  return 0.0;
}

double theta_extended(const ClauseInstance& c, std::span<const double> x) {
  if (static_cast<int>(x.size()) != c.model.K)
    throw std::invalid_argument("theta_extended: arity mismatch");
  check_box(x);
  switch (c.model.kind) {
    case ClauseKind::kspin: {
      double prod = 1.0;
      for (double v : x) prod *= v;
      const double y = c.model.beta * c.g;
      // ch(y)(1 + s th(y)) = e^{s y} at corner products s = +/-1; keeping this
      // branch exact also avoids log1p(-1) once tanh saturates.
      if (prod == 1.0 || prod == -1.0) return prod * y;
      return log_cosh(y) + std::log1p(std::tanh(y) * prod);
    }
    case ClauseKind::ksat: {
      double prod = 1.0;
      for (int k = 0; k < c.model.K; ++k)
        prod *= 0.5 * (1.0 + c.j[k] * x[k]);
      return std::log1p(std::expm1(-c.model.beta) * prod);
    }
    case ClauseKind::pert: {
      double prod = 1.0;
      for (double v : x) prod *= 0.5 * (1.0 + v);
      return std::log1p(std::expm1(c.g) * prod);
    }
  }
  return 0.0;
}

double exp_theta_extended(const ClauseInstance& c, std::span<const double> x) {
  return std::exp(theta_extended(c, x));
}

}  // namespace dsg
