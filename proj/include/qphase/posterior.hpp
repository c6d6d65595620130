#pragma once

#include <string>

#include "qphase/model.hpp"
#include "qphase/prior.hpp"

namespace qphase {

/// Gibbs quasi-posterior exp(-lambda r(theta)) pi(theta), unnormalized.
/// Holds a non-owning reference to the instance, which must outlive it.
class GibbsPosterior {
public:
  GibbsPosterior(const ProblemInstance& inst, PriorConfig prior, double lambda);

  Eigen::Index dimension() const noexcept { return inst_->p(); }
  double support_radius() const noexcept { return prior_.h1; }
  double lambda() const noexcept { return lambda_; }
  const PriorConfig& prior() const noexcept { return prior_; }
  const ProblemInstance& instance() const noexcept { return *inst_; }

  double log_density(const Vector& theta) const;

  /// Returns -inf (gradient left zeroed) outside the prior support.
  double log_density_and_gradient(const Vector& theta, Vector& gradient) const;

private:
  const ProblemInstance* inst_;
  PriorConfig prior_;
  double lambda_;
};

/// -lambda r(theta) + log pi(theta)
double log_posterior_unnorm(const ProblemInstance& inst, const PriorConfig& prior, double lambda,
                            const Vector& theta);

/// Exact gradient of log_posterior_unnorm. Throws DomainError outside the support.
Vector grad_log_posterior(const ProblemInstance& inst, const PriorConfig& prior, double lambda,
                          const Vector& theta);

/// Resolves a lambda specification: either a literal number or "<k>m"
/// (e.g. "4m", "0.04m"), meaning k times the measurement count.
double resolve_lambda(const std::string& spec, Eigen::Index m);

} // namespace qphase
