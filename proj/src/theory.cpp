#include "qphase/theory.hpp"

#include <algorithm>
#include <cmath>

#include "qphase/errors.hpp"

namespace qphase {

void validate(const TheoryParams& params) {
  if (!(params.sigma > 0.0) || !(params.xi > 0.0) || !(params.c_bound > 0.0) ||
      !(params.kappa0 > 0.0) || !(params.frak_c > 0.0))
    throw DomainError("sigma, xi, C, kappa0 and the universal constant must be positive");
  if (params.m < 1 || params.p < 1 || params.s_star < 1)
    throw DomainError("m, p and s* must be positive");
  if (params.s_star > params.p)
    throw DomainError("s* cannot exceed p");
  if (!(params.delta > 0.0 && params.delta < 1.0))
    throw DomainError("delta must lie in (0, 1)");
  if (!(params.h1 > 0.0))
    throw DomainError("h1 must be positive");
}

TheoryConstants constants(const TheoryParams& params) {
  validate(params);
  const double c = params.c_bound;
  const double m = static_cast<double>(params.m);
  TheoryConstants out;
  out.c1 = 8.0 * (params.sigma * params.sigma + c * c);
  out.c2 = 64.0 * std::max(params.xi, c) * c;
  out.lambda_star = m / (out.c1 + 2.0 * out.c2);
  out.varsigma_star = 1.0 / (4.0 * c * static_cast<double>(params.p) * m);
  return out;
}

AlphaBeta alpha_beta(const TheoryParams& params, double lambda) {
  const TheoryConstants k = constants(params);
  const double m = static_cast<double>(params.m);
  if (!(lambda > 0.0))
    throw DomainError("alpha_beta: lambda must be positive");
  if (!(lambda < m / k.c2))
    throw DomainError("alpha_beta: lambda must be below m / C2");
  const double correction = lambda * lambda * k.c1 / (2.0 * m * (1.0 - k.c2 * lambda / m));
  return {lambda - correction, lambda + correction};
}

double theorem1_rate(const TheoryParams& params) {
  validate(params);
  const double m = static_cast<double>(params.m);
  const double p = static_cast<double>(params.p);
  const double s = static_cast<double>(params.s_star);
  return params.frak_c * params.sigma * params.sigma *
         (s * std::log(m * p / s) + std::log(2.0 / params.delta)) / m;
}

double theorem1_rate_explicit(const TheoryParams& params) {
  const TheoryConstants k = constants(params);
  if (std::isinf(params.h1))
    return std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(params.m);
  const double p = static_cast<double>(params.p);
  const double s = static_cast<double>(params.s_star);
  const double complexity = 4.0 * s * std::log(4.0 * params.h1 * params.c_bound * p * m / s) +
                            std::log(2.0) + std::log(2.0 / params.delta);
  return (3.0 / (m * m) + 4.0 * (k.c1 + k.c2) * complexity / m) / params.kappa0;
}

double loss_product(const Vector& theta, const Vector& theta_star) {
  if (theta.size() != theta_star.size())
    throw DomainError("loss_product: dimension mismatch");
  return (theta - theta_star).squaredNorm() * (theta + theta_star).squaredNorm();
}

bool theta_m_member(const TheoryParams& params, const Vector& theta, const Vector& theta_star) {
  return loss_product(theta, theta_star) <= theorem1_rate(params);
}

} // namespace qphase
