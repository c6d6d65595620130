#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qphase/errors.hpp"
#include "qphase/posterior.hpp"
#include "qphase/randomness.hpp"

namespace qphase {

/// Anything the Langevin samplers can explore: an unnormalized log-density
/// with gradient, supported on a ball of radius support_radius() (may be inf).
template <class T>
concept LogDensity = requires(const T& t, const Vector& x, Vector& g) {
  { t.dimension() } -> std::convertible_to<Eigen::Index>;
  { t.log_density(x) } -> std::convertible_to<double>;
  { t.log_density_and_gradient(x, g) } -> std::convertible_to<double>;
  { t.support_radius() } -> std::convertible_to<double>;
};

struct SamplerConfig {
  double lambda = 1.0;
  double gamma = 1e-4;
  long n_iter = 30000;
  long burn_in = 1000;
  long thin = 1;
  double target_acceptance = 0.5; // MALA only
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t stream_id = 0;

  bool adapt = true;          // MALA step adaptation during burn-in
  long adapt_window = 50;
  double adapt_factor = 1.1;
  bool store_samples = true;  // off in sweeps; the mean is always accumulated
  bool record_trace = false;  // per-iteration log-density
};

void validate(const SamplerConfig& cfg);

struct Chain {
  std::vector<Vector> samples; // post burn-in, post thinning (empty if not stored)
  Vector posterior_mean;
  long n_kept = 0;
  double acceptance_rate = 1.0; // 1.0 for LMC by convention
  double final_gamma = 0.0;
  std::vector<double> trace;
  // Set when MALA adaptation left the realized acceptance outside [0.2, 0.8].
  std::optional<std::string> tuning_warning;
};

/// The posterior-mean estimator. Throws DomainError for an empty chain.
Vector estimate(const Chain& chain);

/// One unadjusted Langevin move theta + gamma*grad + sqrt(2 gamma)*noise.
Vector lmc_step(const Vector& theta, const Vector& grad, double gamma, const Vector& noise);

/// Log of the Metropolis-Hastings ratio for a Langevin proposal, including
/// the asymmetric proposal densities q(b|a) = N(a + gamma g(a), 2 gamma I).
double mala_log_acceptance(const Vector& current, double log_current, const Vector& grad_current,
                           const Vector& proposal, double log_proposal,
                           const Vector& grad_proposal, double gamma);

/// min(1, exp(log_ratio)), 0 for NaN.
double acceptance_probability(double log_ratio);

/// Curvature-scaled step for LMC when no tuned MALA step is available:
/// 1e-2 / (lambda * max_j y_j).
double default_lmc_step(const ProblemInstance& inst, double lambda);

/// Starting step for MALA adaptation: 1 / ((6 lambda mean(y)_+ + 4/varsigma^2) p^(1/3)).
double default_mala_step(const ProblemInstance& inst, const PriorConfig& prior, double lambda);

namespace detail {

inline void project_to_ball(Vector& theta, double radius) {
  if (std::isinf(radius))
    return;
  const double norm = theta.norm();
  if (norm > radius)
    theta *= radius / norm;
}

class MeanAccumulator {
public:
  explicit MeanAccumulator(Eigen::Index p) : sum_(Vector::Zero(p)) {}
  void add(const Vector& x) {
    sum_ += x;
    ++count_;
  }
  long count() const { return count_; }
  Vector mean() const { return count_ > 0 ? Vector(sum_ / static_cast<double>(count_)) : sum_; }

private:
  Vector sum_;
  long count_ = 0;
};

inline bool keep_sample(const SamplerConfig& cfg, long k) {
  return k >= cfg.burn_in && (k - cfg.burn_in) % cfg.thin == 0;
}

} // namespace detail

/// Unadjusted Langevin Monte Carlo with an injectable noise source
/// (`noise(p)` returns a length-p vector). Iterates move toward higher density.
template <LogDensity Target, class NoiseSource>
Chain run_lmc(const Target& target, const SamplerConfig& cfg, Vector theta, NoiseSource&& noise) {
  validate(cfg);
  const Eigen::Index p = target.dimension();
  if (theta.size() != p)
    throw DomainError("initial point has the wrong dimension");
  const double radius = target.support_radius();
  if (!std::isinf(radius) && theta.norm() > radius)
    throw DomainError("initial point lies outside the prior support");

  Chain chain;
  chain.final_gamma = cfg.gamma;
  detail::MeanAccumulator mean(p);
  Vector grad(p);
  double log_density = target.log_density_and_gradient(theta, grad);

  for (long k = 0; k < cfg.n_iter; ++k) {
    theta = lmc_step(theta, grad, cfg.gamma, noise(p));
    detail::project_to_ball(theta, radius);
    log_density = target.log_density_and_gradient(theta, grad);
    if (!theta.allFinite() || !grad.allFinite() || std::isnan(log_density))
      throw DivergenceError("LMC diverged at iteration " + std::to_string(k + 1) +
                                "; try a smaller step size",
                            k + 1);
    if (cfg.record_trace)
      chain.trace.push_back(log_density);
    if (detail::keep_sample(cfg, k)) {
      mean.add(theta);
      if (cfg.store_samples)
        chain.samples.push_back(theta);
    }
  }
  chain.n_kept = mean.count();
  chain.posterior_mean = mean.mean();
  chain.acceptance_rate = 1.0;
  return chain;
}

template <LogDensity Target>
Chain run_lmc(const Target& target, const SamplerConfig& cfg, const Vector& theta0) {
  Rng rng(cfg.seed, cfg.stream_id);
  return run_lmc(target, cfg, theta0, [&rng](Eigen::Index p) { return rng.normal_vector(p); });
}

/// Metropolis-adjusted Langevin. During burn-in the step is multiplied or
/// divided by adapt_factor after every adapt_window iterations, depending on
/// whether the window's acceptance exceeded the target; it is frozen afterwards.
template <LogDensity Target>
Chain run_mala(const Target& target, const SamplerConfig& cfg, Vector theta) {
  validate(cfg);
  const Eigen::Index p = target.dimension();
  if (theta.size() != p)
    throw DomainError("initial point has the wrong dimension");
  const double radius = target.support_radius();
  if (!std::isinf(radius) && theta.norm() > radius)
    throw DomainError("initial point lies outside the prior support");

  Rng rng(cfg.seed, cfg.stream_id);
  Chain chain;
  detail::MeanAccumulator mean(p);
  double gamma = cfg.gamma;

  Vector grad(p);
  double log_density = target.log_density_and_gradient(theta, grad);
  if (!std::isfinite(log_density) || !grad.allFinite())
    throw DomainError("log-density is not finite at the initial point");

  Vector proposal(p);
  Vector grad_proposal(p);
  long window_accepts = 0;
  long kept_accepts = 0;

  for (long k = 0; k < cfg.n_iter; ++k) {
    const Vector noise = rng.normal_vector(p);
    const double u = rng.uniform01();
    proposal = lmc_step(theta, grad, gamma, noise);

    bool accept = false;
    if (std::isinf(radius) || proposal.norm() <= radius) {
      const double log_proposal = target.log_density_and_gradient(proposal, grad_proposal);
      if (std::isfinite(log_proposal) && grad_proposal.allFinite()) {
        const double log_ratio = mala_log_acceptance(theta, log_density, grad, proposal,
                                                     log_proposal, grad_proposal, gamma);
        accept = std::log(u) < log_ratio;
        if (accept) {
          theta.swap(proposal);
          grad.swap(grad_proposal);
          log_density = log_proposal;
        }
      }
    }

    if (k < cfg.burn_in) {
      window_accepts += accept ? 1 : 0;
      if (cfg.adapt && (k + 1) % cfg.adapt_window == 0) {
        const double rate = static_cast<double>(window_accepts) / static_cast<double>(cfg.adapt_window);
        gamma = rate > cfg.target_acceptance ? gamma * cfg.adapt_factor : gamma / cfg.adapt_factor;
        window_accepts = 0;
      }
    } else {
      kept_accepts += accept ? 1 : 0;
    }

    if (cfg.record_trace)
      chain.trace.push_back(log_density);
    if (detail::keep_sample(cfg, k)) {
      mean.add(theta);
      if (cfg.store_samples)
        chain.samples.push_back(theta);
    }
  }

  chain.n_kept = mean.count();
  chain.posterior_mean = mean.mean();
  chain.final_gamma = gamma;
  chain.acceptance_rate =
      static_cast<double>(kept_accepts) / static_cast<double>(cfg.n_iter - cfg.burn_in);
  if (cfg.adapt && cfg.burn_in > 0 && (chain.acceptance_rate < 0.2 || chain.acceptance_rate > 0.8))
    chain.tuning_warning = "MALA acceptance rate " + std::to_string(chain.acceptance_rate) +
                           " is outside [0.2, 0.8] after adaptation";
  return chain;
}

/// LMC on the Gibbs quasi-posterior with inverse temperature cfg.lambda.
Chain lmc_run(const ProblemInstance& inst, const PriorConfig& prior, const SamplerConfig& cfg,
              const Vector& theta0);

/// MALA on the Gibbs quasi-posterior with inverse temperature cfg.lambda.
Chain mala_run(const ProblemInstance& inst, const PriorConfig& prior, const SamplerConfig& cfg,
               const Vector& theta0);

} // namespace qphase
