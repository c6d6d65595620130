#include "qphase/prior.hpp"

#include <cmath>
#include <string>

#include "qphase/errors.hpp"

namespace qphase {

void validate(const PriorConfig& cfg) {
  if (!(cfg.varsigma > 0.0) || !std::isfinite(cfg.varsigma))
    throw DomainError("prior scale varsigma must be positive and finite");
  if (!(cfg.h1 > 0.0))
    throw DomainError("prior support radius h1 must be positive (inf allowed)");
}

bool in_support(const PriorConfig& cfg, const Vector& theta) {
  return std::isinf(cfg.h1) || theta.norm() <= cfg.h1;
}

double log_prior_unnorm(const PriorConfig& cfg, const Vector& theta) {
  if (!in_support(cfg, theta))
    return -std::numeric_limits<double>::infinity();
  const double s2 = cfg.varsigma * cfg.varsigma;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    sum += std::log(s2 + theta[i] * theta[i]);
  return -2.0 * sum;
}

double log_prior_and_gradient(const PriorConfig& cfg, const Vector& theta, Vector& gradient) {
  const double s2 = cfg.varsigma * cfg.varsigma;
  gradient.resize(theta.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double denom = s2 + theta[i] * theta[i];
    sum += std::log(denom);
    gradient[i] = -4.0 * theta[i] / denom;
  }
  return -2.0 * sum;
}

Vector log_prior_gradient(const PriorConfig& cfg, const Vector& theta) {
  if (!in_support(cfg, theta))
    throw DomainError("log_prior_gradient: theta has norm " + std::to_string(theta.norm()) +
                      " outside the support radius " + std::to_string(cfg.h1));
  Vector gradient;
  log_prior_and_gradient(cfg, theta, gradient);
  return gradient;
}

} // namespace qphase
