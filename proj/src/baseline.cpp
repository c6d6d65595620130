#include "qphase/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qphase/errors.hpp"

namespace qphase {

namespace {

constexpr int kPowerSteps = 100;
constexpr double kPowerTolerance = 1e-8;
// A final power-iteration move this large means no dominant direction emerged.
constexpr double kStagnationMove = 0.1;

Vector apply_weighted_moment(const ProblemInstance& inst, const Vector& v) {
  const Vector projection = inst.sensing * v;
  const Vector weighted = inst.observations.cwiseProduct(projection);
  return inst.sensing.transpose() * weighted / static_cast<double>(inst.m());
}

Vector random_unit(Rng& rng, Eigen::Index p) {
  Vector v = rng.normal_vector(p);
  return v / v.norm();
}

} // namespace

SpectralInit spectral_init(const ProblemInstance& inst, Rng& rng) {
  validate(inst);
  const Eigen::Index p = inst.p();
  SpectralInit result;

  Vector v = random_unit(rng, p);
  double last_move = 2.0;
  bool converged = false;
  bool vanished = false;
  for (int it = 0; it < kPowerSteps; ++it) {
    Vector next = apply_weighted_moment(inst, v);
    const double norm = next.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      vanished = true;
      break;
    }
    next /= norm;
    if (next.dot(v) < 0.0)
      next = -next;
    last_move = (next - v).norm();
    v = std::move(next);
    result.iterations = it + 1;
    if (last_move < kPowerTolerance) {
      converged = true;
      break;
    }
  }

  if (vanished || (!converged && last_move > kStagnationMove)) {
    v = random_unit(rng, p);
    result.fell_back = true;
  }

  const double scale = std::sqrt(std::max(inst.observations.mean(), 0.0));
  result.theta = scale * v;
  return result;
}

Vector hard_threshold(const Vector& v, Eigen::Index k) {
  const Eigen::Index p = v.size();
  if (k >= p)
    return v;
  Vector out = Vector::Zero(p);
  if (k <= 0)
    return out;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&v](Eigen::Index a, Eigen::Index b) {
                      const double ma = std::abs(v[a]);
                      const double mb = std::abs(v[b]);
                      return ma > mb || (ma == mb && a < b);
                    });
  for (Eigen::Index i = 0; i < k; ++i)
    out[order[static_cast<std::size_t>(i)]] = v[order[static_cast<std::size_t>(i)]];
  return out;
}

Vector thresholded_wf_iterate(const ProblemInstance& inst, const Vector& start, double step,
                              Eigen::Index k, long n_iter) {
  Vector theta = hard_threshold(start, k);
  Vector grad(inst.p());
  for (long it = 0; it < n_iter; ++it) {
    risk_and_gradient(inst, theta, grad);
    theta = hard_threshold(theta - step * grad, k);
    if (!theta.allFinite())
      throw DivergenceError("thresholded Wirtinger flow diverged at iteration " +
                                std::to_string(it + 1) + "; reduce the step size",
                            it + 1);
  }
  return theta;
}

BaselineResult thresholded_wf_run(const ProblemInstance& inst, const BaselineConfig& cfg,
                                  Rng& rng) {
  validate(inst);
  const Eigen::Index p = inst.p();
  if (cfg.n_iter < 1)
    throw DomainError("baseline iteration count must be at least 1");

  BaselineResult result;
  if (cfg.sparsity_k) {
    result.k = *cfg.sparsity_k;
  } else if (inst.s_star) {
    result.k = *inst.s_star;
    result.oracle_k = true;
  } else {
    result.k = (p + 9) / 10;
  }
  if (result.k < 1 || result.k > p)
    throw DomainError("sparsity level k must lie in [1, p], got " + std::to_string(result.k));

  double step = 0.0;
  if (cfg.step) {
    step = *cfg.step;
  } else {
    const double mean_y = inst.observations.mean();
    step = mean_y > 0.0 ? 0.1 / mean_y : 0.1;
  }
  if (!(step > 0.0) || !std::isfinite(step))
    throw DomainError("baseline step must be positive");

  const SpectralInit init = spectral_init(inst, rng);
  result.init_fell_back = init.fell_back;

  for (int attempt = 0;; ++attempt) {
    try {
      result.theta = thresholded_wf_iterate(inst, init.theta, step, result.k, cfg.n_iter);
      result.step = step;
      result.halvings = attempt;
      return result;
    } catch (const DivergenceError&) {
      if (attempt >= cfg.max_step_halvings)
        throw;
      step *= 0.5;
    }
  }
}

} // namespace qphase
