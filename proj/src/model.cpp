#include "qphase/model.hpp"

#include <numeric>
#include <string>
#include <vector>

#include "qphase/errors.hpp"

namespace qphase {

namespace {

void check_dimension(const ProblemInstance& inst, const Vector& theta, const char* where) {
  if (theta.size() != inst.p())
    throw DomainError(std::string(where) + ": theta has length " + std::to_string(theta.size()) +
                      ", expected " + std::to_string(inst.p()));
}

} // namespace

void validate(const ProblemInstance& inst) {
  if (inst.m() < 1 || inst.p() < 1)
    throw DomainError("problem instance needs at least one row and one column");
  if (inst.observations.size() != inst.m())
    throw DomainError("observation count " + std::to_string(inst.observations.size()) +
                      " does not match " + std::to_string(inst.m()) + " sensing rows");
  if (inst.theta_star && inst.theta_star->size() != inst.p())
    throw DomainError("ground truth length does not match the design");
}

Vector generate_signal(Rng& rng, Eigen::Index p, Eigen::Index s_star) {
  if (p < 1)
    throw DomainError("generate_signal: dimension must be at least 1");
  if (s_star < 1 || s_star > p)
    throw DomainError("generate_signal: sparsity must lie in [1, p], got " +
                      std::to_string(s_star));

  Vector theta = rng.normal_vector(p);

  // Partial Fisher-Yates: the first p - s_star shuffled indices are zeroed.
  std::vector<Eigen::Index> index(static_cast<std::size_t>(p));
  std::iota(index.begin(), index.end(), Eigen::Index{0});
  const auto n_zero = static_cast<std::size_t>(p - s_star);
  for (std::size_t i = 0; i < n_zero; ++i) {
    const std::size_t j = i + rng.uniform_index(index.size() - i);
    std::swap(index[i], index[j]);
    theta[index[i]] = 0.0;
  }

  // A nonzero draw being exactly 0.0 has probability zero; redraw if it happens.
  for (std::size_t i = n_zero; i < index.size(); ++i)
    while (theta[index[i]] == 0.0)
      theta[index[i]] = rng.standard_normal();

  theta /= theta.norm();
  return theta;
}

ProblemInstance generate_instance(Rng& rng, const Vector& theta_star, Eigen::Index m,
                                  double sigma) {
  if (m < 1)
    throw DomainError("generate_instance: measurement count must be at least 1");
  if (!(sigma >= 0.0))
    throw DomainError("generate_instance: noise level must be nonnegative");
  const Eigen::Index p = theta_star.size();
  if (p < 1)
    throw DomainError("generate_instance: empty signal");

  ProblemInstance inst;
  inst.sensing.resize(m, p);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < p; ++i)
      inst.sensing(j, i) = rng.standard_normal();

  const Vector projection = inst.sensing * theta_star;
  inst.observations = projection.array().square().matrix();
  if (sigma > 0.0)
    for (Eigen::Index j = 0; j < m; ++j)
      inst.observations[j] += sigma * rng.standard_normal();

  inst.theta_star = theta_star;
  inst.sigma = sigma;
  inst.s_star = static_cast<Eigen::Index>((theta_star.array() != 0.0).count());
  return inst;
}

double empirical_risk(const ProblemInstance& inst, const Vector& theta) {
  check_dimension(inst, theta, "empirical_risk");
  const Vector projection = inst.sensing * theta;
  const Vector residual = projection.array().square().matrix() - inst.observations;
  return residual.squaredNorm() / (4.0 * static_cast<double>(inst.m()));
}

double risk_and_gradient(const ProblemInstance& inst, const Vector& theta, Vector& gradient) {
  check_dimension(inst, theta, "risk_gradient");
  const double m = static_cast<double>(inst.m());
  const Vector projection = inst.sensing * theta;
  const Vector residual = projection.array().square().matrix() - inst.observations;
  const Vector weight = residual.cwiseProduct(projection);
  gradient.noalias() = inst.sensing.transpose() * weight;
  gradient /= m;
  return residual.squaredNorm() / (4.0 * m);
}

Vector risk_gradient(const ProblemInstance& inst, const Vector& theta) {
  Vector gradient(inst.p());
  risk_and_gradient(inst, theta, gradient);
  return gradient;
}

AssumptionReport assumption_diagnostics(const ProblemInstance& inst, const Vector& theta) {
  check_dimension(inst, theta, "assumption_diagnostics");
  const Vector projection = inst.sensing * theta;
  AssumptionReport report;
  report.max_abs_projection = projection.cwiseAbs().maxCoeff();
  const double norm2 = theta.squaredNorm();
  if (norm2 > 0.0)
    report.kappa_proxy = projection.squaredNorm() / (static_cast<double>(inst.m()) * norm2);
  return report;
}

} // namespace qphase
