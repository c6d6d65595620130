#include <doctest.h>

#include <cmath>

#include "qphase/errors.hpp"
#include "qphase/theory.hpp"

using namespace qphase;

namespace {

TheoryParams unit(long m) {
  TheoryParams t;
  t.m = m;
  return t;
}

} // namespace

TEST_CASE("constants at sigma = xi = C = 1") {
  const auto c = constants(unit(144));
  CHECK(c.c1 == 16.0);
  CHECK(c.c2 == 64.0);
  CHECK(c.lambda_star == doctest::Approx(1.0).epsilon(1e-15));

  TheoryParams t;
  t.p = 10;
  t.m = 10;
  CHECK(constants(t).varsigma_star == doctest::Approx(0.0025).epsilon(1e-15));
}

TEST_CASE("alpha and beta hand values") {
  const auto ab = alpha_beta(unit(144), 1.0);
  CHECK(std::abs(ab.alpha - 0.9) < 1e-12);
  CHECK(std::abs(ab.beta - 1.1) < 1e-12);
  CHECK(ab.beta / ab.alpha == doctest::Approx(11.0 / 9.0));
}

TEST_CASE("alpha and beta approach lambda as lambda -> 0") {
  const auto params = unit(144);
  for (double lambda : {1e-3, 1e-5, 1e-7}) {
    const auto ab = alpha_beta(params, lambda);
    CHECK(std::abs(ab.alpha / lambda - 1.0) < 100.0 * lambda);
    CHECK(std::abs(ab.beta / lambda - 1.0) < 100.0 * lambda);
  }
}

TEST_CASE("alpha_beta domain") {
  const auto params = unit(144);
  CHECK_THROWS_AS(alpha_beta(params, 0.0), DomainError);
  CHECK_THROWS_AS(alpha_beta(params, -1.0), DomainError);
  CHECK_THROWS_AS(alpha_beta(params, 144.0 / 64.0), DomainError);
  CHECK_NOTHROW(alpha_beta(params, 144.0 / 64.0 * 0.99));
}

TEST_CASE("grid: lambda* < m/C2, alpha > 0, beta/alpha <= 3") {
  const double levels[] = {0.5, 1.0, 2.0, 5.0, 10.0};
  for (long m : {10L, 144L, 10000L}) {
    for (double sigma : levels) {
      for (double xi : levels) {
        for (double c : levels) {
          TheoryParams t;
          t.sigma = sigma;
          t.xi = xi;
          t.c_bound = c;
          t.m = m;
          const auto k = constants(t);
          CHECK(k.lambda_star < static_cast<double>(m) / k.c2);
          const auto ab = alpha_beta(t, k.lambda_star);
          CHECK(ab.alpha > 0.0);
          CHECK(ab.beta / ab.alpha <= 3.0);
          CHECK(ab.beta / ab.alpha ==
                doctest::Approx((3.0 * k.c1 + 2.0 * k.c2) / (k.c1 + 2.0 * k.c2)));
        }
      }
    }
  }
}

TEST_CASE("theorem 1 rate") {
  TheoryParams t;
  t.m = 1;
  t.p = 1;
  t.s_star = 1;
  t.delta = 2.0 / std::exp(1.0);
  CHECK(theorem1_rate(t) == doctest::Approx(1.0));

  TheoryParams base;
  base.m = 500;
  base.p = 100;
  base.s_star = 10;
  TheoryParams doubled = base;
  doubled.m = 1000;
  CHECK(theorem1_rate(doubled) < theorem1_rate(base));
  for (long m = 3; m < 200; m += 7) {
    TheoryParams a = base, b = base;
    a.m = m;
    b.m = 2 * m;
    CHECK(theorem1_rate(b) < theorem1_rate(a));
  }
  TheoryParams loud = base;
  loud.sigma = 2.0;
  CHECK(theorem1_rate(loud) == doctest::Approx(4.0 * theorem1_rate(base)).epsilon(1e-15));
}

TEST_CASE("explicit theorem 1 bound") {
  TheoryParams t;
  t.m = 100;
  t.p = 50;
  t.s_star = 5;
  CHECK(std::isinf(theorem1_rate_explicit(t)));
  t.h1 = 2.0;
  t.kappa0 = 0.5;
  const double c1 = 16.0, c2 = 64.0;
  const double expected =
      (3.0 / (100.0 * 100.0) +
       4.0 * (c1 + c2) *
           (4.0 * 5.0 * std::log(4.0 * 2.0 * 1.0 * 50.0 * 100.0 / 5.0) + std::log(2.0) +
            std::log(2.0 / 0.05)) /
           100.0) /
      0.5;
  CHECK(theorem1_rate_explicit(t) == doctest::Approx(expected));
}

TEST_CASE("loss product") {
  Vector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(loss_product(a, b) == doctest::Approx(4.0));
  Vector star(3);
  star << 0.5, -1.0, 2.0;
  CHECK(loss_product(star, star) == 0.0);
  CHECK(loss_product(-star, star) == 0.0);
  CHECK(loss_product(Vector::Zero(3), star) == doctest::Approx(std::pow(star.squaredNorm(), 2)));

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vector x = rng.normal_vector(6), y = rng.normal_vector(6);
    CHECK(loss_product(-x, y) == loss_product(x, y));
  }
}

TEST_CASE("contraction set membership") {
  TheoryParams t;
  t.m = 500;
  t.p = 100;
  t.s_star = 10;
  Vector star = Vector::Zero(100);
  star[3] = 1.0;
  CHECK(theta_m_member(t, star, star));
  CHECK(theta_m_member(t, -star, star));
  t.frak_c = 1e-9;
  Vector far = star;
  far[50] = 3.0;
  CHECK(loss_product(far, star) > theorem1_rate(t));
  CHECK_FALSE(theta_m_member(t, far, star));
}

TEST_CASE("parameter validation") {
  TheoryParams t;
  t.delta = 1.0;
  CHECK_THROWS_AS(validate(t), DomainError);
  t = TheoryParams{};
  t.s_star = 2;
  t.p = 1;
  CHECK_THROWS_AS(validate(t), DomainError);
  t = TheoryParams{};
  t.sigma = -1.0;
  CHECK_THROWS_AS(validate(t), DomainError);
  t = TheoryParams{};
  t.c_bound = 0.0;
  CHECK_THROWS_AS(validate(t), DomainError);
}
