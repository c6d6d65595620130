#include "qphase/posterior.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "qphase/errors.hpp"

namespace qphase {

GibbsPosterior::GibbsPosterior(const ProblemInstance& inst, PriorConfig prior, double lambda)
    : inst_(&inst), prior_(prior), lambda_(lambda) {
  validate(inst);
  validate(prior_);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("inverse temperature lambda must be positive and finite");
}

double GibbsPosterior::log_density(const Vector& theta) const {
  const double log_prior = log_prior_unnorm(prior_, theta);
  if (std::isinf(log_prior))
    return log_prior;
  return -lambda_ * empirical_risk(*inst_, theta) + log_prior;
}

double GibbsPosterior::log_density_and_gradient(const Vector& theta, Vector& gradient) const {
  gradient.setZero(theta.size());
  if (!in_support(prior_, theta))
    return -std::numeric_limits<double>::infinity();
  Vector risk_grad(theta.size());
  const double risk = risk_and_gradient(*inst_, theta, risk_grad);
  Vector prior_grad;
  const double log_prior = log_prior_and_gradient(prior_, theta, prior_grad);
  gradient = -lambda_ * risk_grad + prior_grad;
  return -lambda_ * risk + log_prior;
}

double log_posterior_unnorm(const ProblemInstance& inst, const PriorConfig& prior, double lambda,
                            const Vector& theta) {
  return GibbsPosterior(inst, prior, lambda).log_density(theta);
}

Vector grad_log_posterior(const ProblemInstance& inst, const PriorConfig& prior, double lambda,
                          const Vector& theta) {
  if (!in_support(prior, theta))
    throw DomainError("grad_log_posterior: theta lies outside the prior support");
  Vector gradient;
  GibbsPosterior(inst, prior, lambda).log_density_and_gradient(theta, gradient);
  return gradient;
}

double resolve_lambda(const std::string& spec, Eigen::Index m) {
  if (spec.empty())
    throw DomainError("empty lambda specification");
  const bool per_m = spec.back() == 'm';
  const std::string number = per_m ? spec.substr(0, spec.size() - 1) : spec;
  double factor = 1.0;
  if (!number.empty()) {
    char* end = nullptr;
    factor = std::strtod(number.c_str(), &end);
    if (end != number.c_str() + number.size())
      throw DomainError("cannot parse lambda specification '" + spec + "'");
  } else if (!per_m) {
    throw DomainError("cannot parse lambda specification '" + spec + "'");
  }
  const double lambda = per_m ? factor * static_cast<double>(m) : factor;
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("lambda must be positive, got '" + spec + "'");
  return lambda;
}

} // namespace qphase
