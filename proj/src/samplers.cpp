#include "qphase/samplers.hpp"

#include <algorithm>

namespace qphase {

void validate(const SamplerConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma))
    throw DomainError("step size gamma must be positive and finite");
  if (!(cfg.lambda > 0.0))
    throw DomainError("inverse temperature lambda must be positive");
  if (cfg.n_iter < 1)
    throw DomainError("iteration count must be at least 1");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.n_iter)
    throw DomainError("burn-in must lie in [0, iterations)");
  if (cfg.thin < 1)
    throw DomainError("thinning interval must be at least 1");
  if (!(cfg.target_acceptance > 0.0 && cfg.target_acceptance < 1.0))
    throw DomainError("target acceptance must lie in (0, 1)");
  if (cfg.adapt_window < 1 || !(cfg.adapt_factor > 1.0))
    throw DomainError("adaptation window must be positive and factor above 1");
}

Vector estimate(const Chain& chain) {
  if (chain.n_kept == 0 || chain.posterior_mean.size() == 0)
    throw DomainError("cannot estimate from an empty chain");
  return chain.posterior_mean;
}

Vector lmc_step(const Vector& theta, const Vector& grad, double gamma, const Vector& noise) {
  return theta + gamma * grad + std::sqrt(2.0 * gamma) * noise;
}

double mala_log_acceptance(const Vector& current, double log_current, const Vector& grad_current,
                           const Vector& proposal, double log_proposal,
                           const Vector& grad_proposal, double gamma) {
  // log q(b | a) = -|b - a - gamma g(a)|^2 / (4 gamma) + const
  const double forward = (proposal - current - gamma * grad_current).squaredNorm();
  const double backward = (current - proposal - gamma * grad_proposal).squaredNorm();
  return log_proposal - log_current + (forward - backward) / (4.0 * gamma);
}

double acceptance_probability(double log_ratio) {
  if (std::isnan(log_ratio))
    return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double default_lmc_step(const ProblemInstance& inst, double lambda) {
  const double max_y = inst.observations.maxCoeff();
  const double scale = max_y > 0.0 ? max_y : 1.0;
  return 1e-2 / (lambda * scale);
}

double default_mala_step(const ProblemInstance& inst, const PriorConfig& prior, double lambda) {
  const double mean_y = std::max(inst.observations.mean(), 0.0);
  const double curvature = 6.0 * lambda * mean_y + 4.0 / (prior.varsigma * prior.varsigma);
  return 1.0 / (curvature * std::cbrt(static_cast<double>(inst.p())));
}

Chain lmc_run(const ProblemInstance& inst, const PriorConfig& prior, const SamplerConfig& cfg,
              const Vector& theta0) {
  return run_lmc(GibbsPosterior(inst, prior, cfg.lambda), cfg, theta0);
}

Chain mala_run(const ProblemInstance& inst, const PriorConfig& prior, const SamplerConfig& cfg,
               const Vector& theta0) {
  return run_mala(GibbsPosterior(inst, prior, cfg.lambda), cfg, theta0);
}

} // namespace qphase
