#include <doctest.h>

#include <cmath>
#include <limits>

#include "qphase/errors.hpp"
#include "qphase/posterior.hpp"
#include "qphase/prior.hpp"

using namespace qphase;

namespace {

Vector fd_gradient(const PriorConfig& cfg, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (log_prior_unnorm(cfg, xp) - log_prior_unnorm(cfg, xm)) / (2.0 * h);
  }
  return g;
}

} // namespace

TEST_CASE("prior hand values") {
  const PriorConfig unit{1.0};
  CHECK(log_prior_unnorm(unit, Vector::Zero(7)) == 0.0);
  CHECK(log_prior_unnorm(unit, Vector::Ones(1)) == doctest::Approx(-2.0 * std::log(2.0)));
  CHECK(log_prior_gradient(unit, Vector::Ones(1))[0] == doctest::Approx(-2.0));
  CHECK(log_prior_gradient(unit, Vector::Zero(4)).norm() == 0.0);
}

TEST_CASE("support ball") {
  const PriorConfig ball{0.1, 1.0};
  Vector theta = Vector::Zero(3);
  theta[0] = 2.0;
  CHECK_FALSE(in_support(ball, theta));
  CHECK(log_prior_unnorm(ball, theta) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_prior_gradient(ball, theta), DomainError);
  theta[0] = 1.0;
  CHECK(in_support(ball, theta));
}

TEST_CASE("invalid prior configs") {
  CHECK_THROWS_AS(validate(PriorConfig{0.0}), DomainError);
  CHECK_THROWS_AS(validate(PriorConfig{-1.0}), DomainError);
  CHECK_THROWS_AS(validate(PriorConfig{0.1, 0.0}), DomainError);
  CHECK_NOTHROW(validate(PriorConfig{}));
}

TEST_CASE("prior gradient matches finite differences") {
  Rng rng(8);
  for (double varsigma : {0.05, 0.1, 1.0}) {
    const PriorConfig cfg{varsigma};
    for (int trial = 0; trial < 5; ++trial) {
      const Vector theta = 0.5 * rng.normal_vector(20);
      const Vector fd = fd_gradient(cfg, theta);
      const Vector g = log_prior_gradient(cfg, theta);
      CHECK((g - fd).norm() / std::max(1.0, fd.norm()) < 1e-5);
    }
  }
}

TEST_CASE("prior gradient is odd and bounded by 2/varsigma") {
  Rng rng(9);
  const PriorConfig cfg{0.1};
  for (int trial = 0; trial < 200; ++trial) {
    const Vector theta = rng.normal_vector(10) * (trial % 2 ? 0.05 : 3.0);
    CHECK(log_prior_gradient(cfg, -theta) == -log_prior_gradient(cfg, theta));
    CHECK(log_prior_unnorm(cfg, -theta) == log_prior_unnorm(cfg, theta));
    CHECK(log_prior_gradient(cfg, theta).cwiseAbs().maxCoeff() <= 2.0 / 0.1 + 1e-12);
  }
}

TEST_CASE("log posterior recomposes from risk and prior") {
  Rng rng(10);
  const Vector theta_star = generate_signal(rng, 20, 3);
  const auto inst = generate_instance(rng, theta_star, 50, 0.0);
  const PriorConfig cfg{1.0};
  const double lambda = 200.0;

  CHECK(log_posterior_unnorm(inst, cfg, lambda, theta_star) ==
        doctest::Approx(log_prior_unnorm(cfg, theta_star)));

  for (int trial = 0; trial < 5; ++trial) {
    const Vector theta = rng.normal_vector(20);
    const double expected = -lambda * empirical_risk(inst, theta) + log_prior_unnorm(cfg, theta);
    CHECK(log_posterior_unnorm(inst, cfg, lambda, theta) == doctest::Approx(expected));
  }
  CHECK(grad_log_posterior(inst, cfg, lambda, Vector::Zero(20)).norm() == 0.0);

  GibbsPosterior post(inst, cfg, lambda);
  const Vector theta = rng.normal_vector(20);
  Vector g;
  CHECK(post.log_density_and_gradient(theta, g) == log_posterior_unnorm(inst, cfg, lambda, theta));
  CHECK((g - grad_log_posterior(inst, cfg, lambda, theta)).norm() <= 1e-12 * g.norm());
  CHECK(grad_log_posterior(inst, cfg, lambda, -theta) == -grad_log_posterior(inst, cfg, lambda, theta));
}

TEST_CASE("log posterior gradient matches finite differences") {
  Rng rng(12);
  const Vector theta_star = generate_signal(rng, 20, 4);
  const auto inst = generate_instance(rng, theta_star, 50, 1.0);
  for (double lambda : {1.0, 50.0, 200.0}) {
    const PriorConfig cfg{0.1};
    const Vector theta = 0.3 * rng.normal_vector(20);
    const Vector g = grad_log_posterior(inst, cfg, lambda, theta);
    Vector fd(20);
    for (int i = 0; i < 20; ++i) {
      Vector xp = theta, xm = theta;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      fd[i] = (log_posterior_unnorm(inst, cfg, lambda, xp) -
               log_posterior_unnorm(inst, cfg, lambda, xm)) / 2e-6;
    }
    CHECK((g - fd).norm() / std::max(1.0, fd.norm()) < 1e-5);
  }
}
