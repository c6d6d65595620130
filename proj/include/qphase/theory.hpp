#pragma once

#include <limits>

#include "qphase/model.hpp"

namespace qphase {

/// Inputs to the closed-form tuning constants and error bounds.
///
/// `c_bound` is the design bound C (|A_j^T u| <= C). No finite C exists for
/// Gaussian rows, so it is always a user input; assumption_diagnostics()
/// gives an empirical stand-in. `frak_c` is the unspecified universal
/// constant of the rate; it defaults to 1.
struct TheoryParams {
  double sigma = 1.0;
  double xi = 1.0;
  double c_bound = 1.0;
  double kappa0 = 1.0;
  long m = 1;
  long p = 1;
  long s_star = 1;
  double delta = 0.05;
  double frak_c = 1.0;
  double h1 = std::numeric_limits<double>::infinity();
};

void validate(const TheoryParams& params);

struct TheoryConstants {
  double c1 = 0.0;            // 8 (sigma^2 + C^2)
  double c2 = 0.0;            // 2^6 max(xi, C) C
  double lambda_star = 0.0;   // m / (C1 + 2 C2)
  double varsigma_star = 0.0; // 1 / (4 C p m)
};

TheoryConstants constants(const TheoryParams& params);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

/// alpha, beta = lambda -/+ lambda^2 C1 / (2m (1 - C2 lambda / m)).
/// Throws DomainError unless 0 < lambda < m / C2.
AlphaBeta alpha_beta(const TheoryParams& params, double lambda);

/// frak_c sigma^2 (s* log(m p / s*) + log(2/delta)) / m
double theorem1_rate(const TheoryParams& params);

/// The bound with the proof's explicit constants,
/// [3/m^2 + 4(C1 + C2)(4 s* log(4 H1 C p m / s*) + log 2 + log(2/delta)) / m] / kappa0.
/// Infinite when h1 is infinite.
double theorem1_rate_explicit(const TheoryParams& params);

/// |theta - theta*|^2 |theta + theta*|^2
double loss_product(const Vector& theta, const Vector& theta_star);

/// Membership in the contraction set: loss_product <= theorem1_rate.
bool theta_m_member(const TheoryParams& params, const Vector& theta, const Vector& theta_star);

} // namespace qphase
