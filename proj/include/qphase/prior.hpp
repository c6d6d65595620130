#pragma once

#include <limits>

#include "qphase/model.hpp"

namespace qphase {

/// Scaled Student shrinkage prior pi(theta) ~ prod_i (varsigma^2 + theta_i^2)^-2,
/// restricted to the ball |theta|_2 <= h1.
struct PriorConfig {
  double varsigma = 0.1;
  double h1 = std::numeric_limits<double>::infinity();
};

void validate(const PriorConfig& cfg);

bool in_support(const PriorConfig& cfg, const Vector& theta);

/// -2 sum_i log(varsigma^2 + theta_i^2), or -inf outside the support ball.
/// The normalizing constant is never needed and never computed.
double log_prior_unnorm(const PriorConfig& cfg, const Vector& theta);

/// Componentwise -4 theta_l / (varsigma^2 + theta_l^2). Each entry is bounded
/// by 2/varsigma in magnitude. Throws DomainError outside the support.
Vector log_prior_gradient(const PriorConfig& cfg, const Vector& theta);

/// Value and gradient together; the caller guarantees theta is in the support.
double log_prior_and_gradient(const PriorConfig& cfg, const Vector& theta, Vector& gradient);

} // namespace qphase
