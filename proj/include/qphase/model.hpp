#pragma once

#include <optional>

#include <Eigen/Core>

#include "qphase/randomness.hpp"

namespace qphase {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Quadratic measurements y_j = (A_j^T theta*)^2 + eps_j. Rows of `sensing`
/// are the measurement vectors A_j.
struct ProblemInstance {
  Matrix sensing;
  Vector observations;
  std::optional<Vector> theta_star;
  std::optional<double> sigma;
  std::optional<Eigen::Index> s_star;

  Eigen::Index m() const noexcept { return sensing.rows(); }
  Eigen::Index p() const noexcept { return sensing.cols(); }
};

/// Throws DomainError unless the instance has m >= 1, p >= 1 and m observations.
void validate(const ProblemInstance& inst);

/// Unit-norm signal with exactly s_star nonzero N(0,1) entries on a
/// uniformly chosen support.
Vector generate_signal(Rng& rng, Eigen::Index p, Eigen::Index s_star);

/// Gaussian design A_j ~ N(0, I_p) with additive N(0, sigma^2) noise.
ProblemInstance generate_instance(Rng& rng, const Vector& theta_star, Eigen::Index m,
                                  double sigma);

/// r(theta) = (1/4m) sum_j ((A_j^T theta)^2 - y_j)^2
double empirical_risk(const ProblemInstance& inst, const Vector& theta);

/// (1/m) sum_j ((A_j^T theta)^2 - y_j) (A_j^T theta) A_j
Vector risk_gradient(const ProblemInstance& inst, const Vector& theta);

/// Risk and gradient from a single pass over the design.
double risk_and_gradient(const ProblemInstance& inst, const Vector& theta, Vector& gradient);

struct AssumptionReport {
  double max_abs_projection = 0.0; // realized max_j |A_j^T theta|, a stand-in for C
  double kappa_proxy = 0.0;        // (1/m) sum_j (A_j^T theta)^2 / |theta|^2, 0 at theta = 0
};

/// Empirical look at the bounded-design and anti-concentration conditions.
/// Purely diagnostic; nothing is enforced.
AssumptionReport assumption_diagnostics(const ProblemInstance& inst, const Vector& theta);

} // namespace qphase
