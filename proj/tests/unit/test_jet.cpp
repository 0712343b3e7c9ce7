#include <doctest.h>

#include <cmath>

#include "schlafli/jet.hpp"
#include "schlafli/quadrature.hpp"

using namespace schlafli;

TEST_CASE("third-order Taylor coefficients") {
  const Taylor u = Taylor::variable(Taylor::U, 0.3);
  const Taylor v = Taylor::variable(Taylor::V, -0.7);
  const Taylor f = sin(u) * exp(v);
  CHECK(f.derivative(3, 0, 0) == doctest::Approx(-std::cos(0.3) * std::exp(-0.7)));
  CHECK(f.derivative(2, 1, 0) == doctest::Approx(-std::sin(0.3) * std::exp(-0.7)));
  CHECK(f.derivative(1, 2, 0) == doctest::Approx(std::cos(0.3) * std::exp(-0.7)));
  const Taylor g = atan2(v, u);
  CHECK(g.value() == doctest::Approx(std::atan2(-0.7, 0.3)));
  CHECK(g.du() == doctest::Approx(0.7 / (0.09 + 0.49)));
}

TEST_CASE("diff lowers order") {
  const Taylor u = Taylor::variable(Taylor::U, 1.0);
  const Taylor f = u * u * u;
  const Taylor d = f.diff(Taylor::U);
  CHECK(d.order() == 2);
  CHECK(d.value() == doctest::Approx(3.0));
  CHECK(d.du() == doctest::Approx(6.0));
  CHECK(d.duu() == doctest::Approx(6.0));
}

TEST_CASE("inverse functions") {
  const Taylor x = Taylor::variable(Taylor::U, 0.4);
  CHECK((sin(asin(x)) - x).derivative(3, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((cosh(acosh(x + 1.0)) - x).derivative(2, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sqrt(x * x).du() == doctest::Approx(1.0));
  CHECK(pow(x, 2.5).duu() == doctest::Approx(2.5 * 1.5 * std::pow(0.4, 0.5)));
}

TEST_CASE("gauss legendre") {
  CHECK(integrate_gl([](double x) { return std::exp(x); }, 0, 1, 16) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-15));
  CHECK(integrate_gl([](double x) { return x * x * x * x * x * x * x; }, -1, 2, 4) ==
        doctest::Approx((256.0 - 1.0) / 8.0).epsilon(1e-14));
  CHECK(integrate_simpson([](double x) { return x * x * x; }, 0, 2, 2) == doctest::Approx(4.0));
  const auto& rule = gauss_legendre(64);
  double s = 0;
  for (double w : rule.weights) s += w;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}
