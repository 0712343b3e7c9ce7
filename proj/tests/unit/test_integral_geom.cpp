#include <doctest.h>

#include <cmath>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/integral_geom.hpp"
#include "schlafli/quadrature.hpp"

using namespace schlafli;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::SceneError;
}

// Spheroid x = a sin(phi) (cos, sin), z = c cos(phi) as a surface of
// revolution: area and integral of k1 + k2 by 1-D quadrature.
struct Spheroid {
  double area, mean;
};
Spheroid spheroid_oracle(double a, double c) {
  auto speed = [&](double p) { return std::hypot(a * std::cos(p), c * std::sin(p)); };
  const double area = integrate_gl([&](double p) { return 2 * pi * a * std::sin(p) * speed(p); }, 0, pi, 32, 8);
  const double mean = integrate_gl(
      [&](double p) {
        const double s = speed(p);
        const double k_meridian = a * c / (s * s * s);
        const double k_parallel = c / (a * s);
        return 2 * pi * a * std::sin(p) * s * (k_meridian + k_parallel);
      },
      0, pi, 32, 8);
  return {area, mean};
}

bool within(const McEstimate& e, double oracle, double sigmas = 4.0) {
  return std::abs(e.value - oracle) <= sigmas * e.std_error;
}

}  // namespace

TEST_CASE("convex bodies and the Steiner polynomial") {
  const SpaceForm e3 = SpaceForm::euclidean();
  const ConvexBody ball = make_convex_body(at_time(sphere_family(e3, 1.0), 0.0));
  CHECK(ball.outward == 1.0);
  CHECK(ball.area == doctest::Approx(4 * pi).epsilon(1e-10));
  CHECK(ball.mean_integral == doctest::Approx(8 * pi).epsilon(1e-10));
  CHECK(ball.volume == doctest::Approx(4 * pi / 3).epsilon(1e-10));

  const SteinerData s = steiner_from_curvature(ball);
  REQUIRE(s.coefficients.size() == 4);
  const double expect[4] = {4 * pi / 3, 4 * pi, 4 * pi, 4 * pi / 3};
  for (int i = 0; i < 4; ++i) {
    CHECK(s.coefficients[i] == doctest::Approx(expect[i]).epsilon(1e-10));
    CHECK(s.W[i] == doctest::Approx(4 * pi / 3).epsilon(1e-10));
  }
  CHECK(s.eval(0.5) == doctest::Approx(4 * pi / 3 * std::pow(1.5, 3)).epsilon(1e-10));
  CHECK(s.P[1] == doctest::Approx(2 * pi * pi).epsilon(1e-10));
  CHECK(s.P[2] == doctest::Approx(4 * pi).epsilon(1e-10));

  const ConvexBody ell = make_convex_body(at_time(ellipsoid_radial(e3, 1, 1, 2), 0.0));
  const SteinerData se = steiner_from_curvature(ell);
  const Spheroid o = spheroid_oracle(1.0, 2.0);
  CHECK(se.coefficients[3] == doctest::Approx(4 * pi / 3).epsilon(1e-9));
  CHECK(ell.area == doctest::Approx(o.area).epsilon(1e-9));
  CHECK(ell.mean_integral == doctest::Approx(o.mean).epsilon(1e-9));
  CHECK(ell.volume == doctest::Approx(4 * pi / 3 * 2).epsilon(1e-10));
  // quermassintegral bridge: coefficient i equals C(3, i) W_i
  const double binom[4] = {1, 3, 3, 1};
  for (int i = 0; i < 4; ++i) CHECK(se.coefficients[i] == doctest::Approx(binom[i] * se.W[i]).epsilon(1e-14));
  CHECK(se.P[1] == doctest::Approx(pi / 2 * ell.area).epsilon(1e-12));
  CHECK(se.P[2] == doctest::Approx(ell.mean_integral / 2).epsilon(1e-12));

  CHECK(kind_of([] { make_convex_body(at_time(torus(2.0, 0.5), 0.0)); }) == ErrorKind::NotConvex);
  CHECK(kind_of([] { make_convex_body(at_time(plane_patch(), 0.0)); }) == ErrorKind::NotConvex);
  CHECK(kind_of([&] { make_convex_body(at_time(perturbed_sphere(e3, 1.0, 0.9, 3), 0.0)); }) == ErrorKind::NotConvex);
}

TEST_CASE("epsilon neighbourhood by Monte Carlo") {
  const SpaceForm e3 = SpaceForm::euclidean();
  const ConvexBody ball = make_convex_body(at_time(sphere_family(e3, 1.0), 0.0));
  const McEstimate b = eps_volume_direct(ball, 0.5, 40000, 7);
  CHECK(within(b, 4 * pi / 3 * std::pow(1.5, 3)));

  const ConvexBody ell = make_convex_body(at_time(ellipsoid_radial(e3, 1, 1, 2), 0.0));
  const SteinerData s = steiner_from_curvature(ell);
  const McEstimate e = eps_volume_direct(ell, 0.3, 40000, 8);
  CHECK(within(e, s.eval(0.3)));
  CHECK(e.std_error < 0.02 * e.value);
  CHECK(kind_of([&] { eps_volume_direct(ell, -0.1, 10, 1); }) == ErrorKind::OutOfRange);
}

TEST_CASE("Crofton measures") {
  const SpaceForm e3 = SpaceForm::euclidean();
  const ConvexBody ball = make_convex_body(at_time(sphere_family(e3, 1.0), 0.0));
  const McEstimate p1 = crofton_lines_mc(ball, 50000, 3);
  const McEstimate p2 = crofton_planes_mc(ball, 50000, 4);
  CHECK(within(p1, 2 * pi * pi));
  CHECK(within(p2, 4 * pi));

  const ConvexBody ell = make_convex_body(at_time(ellipsoid_radial(e3, 1, 1, 2), 0.0));
  const Spheroid o = spheroid_oracle(1.0, 2.0);
  CHECK(within(crofton_lines_mc(ell, 30000, 5), pi / 2 * o.area));
  CHECK(within(crofton_planes_mc(ell, 30000, 6), o.mean / 2));

  CHECK(kind_of([&] { crofton_planes_mc(ball, 0, 1); }) == ErrorKind::EstimateUnavailable);
  CHECK(kind_of([&] { crofton_lines_mc(ball, 0, 1); }) == ErrorKind::EstimateUnavailable);
  const ConvexBody h = make_convex_body(at_time(sphere_family(SpaceForm::hyperbolic(), 1.0), 0.0));
  CHECK(kind_of([&] { crofton_lines_mc(h, 10, 1); }) == ErrorKind::ModelViolation);
}

TEST_CASE("curved P functionals") {
  const ConvexBody h = make_convex_body(at_time(sphere_family(SpaceForm::hyperbolic(), 1.0), 0.0));
  const CurvedCrofton ph = p_functionals_curved(h);
  CHECK(ph.P1 == doctest::Approx(2 * pi * pi * std::pow(std::sinh(1.0), 2)).epsilon(1e-10));
  CHECK(ph.P2 == doctest::Approx(pi * std::sinh(2.0) + 2 * pi).epsilon(1e-10));

  for (double r : {0.4, 1.0, 1.4}) {
    const ConvexBody s = make_convex_body(at_time(sphere_family(SpaceForm::sphere(), r), 0.0));
    const double vol = pi * (2 * r - std::sin(2 * r));
    CHECK(p_functionals_curved(s).P2 == doctest::Approx(4 * pi * std::sin(r) * std::cos(r) + vol).epsilon(1e-10));
  }
  // E^3: the k = 0 reduction
  const ConvexBody b = make_convex_body(at_time(sphere_family(SpaceForm::euclidean(), 1.0), 0.0));
  CHECK(p_functionals_curved(b).P2 == doctest::Approx(4 * pi).epsilon(1e-10));
}

TEST_CASE("tube growth in H3") {
  const SpaceForm h3 = SpaceForm::hyperbolic();
  const ConvexBody ball = make_convex_body(at_time(sphere_family(h3, 1.0), 0.0));
  CHECK(tube_growth_h3(ball, 0.0) == doctest::Approx(ball.volume).epsilon(1e-14));
  CHECK(std::abs(tube_growth_h3(ball, 0.5) - ball_volume_closed(h3, 1.5)) < 1e-8);
  // the printed closed form misses terms
  CHECK(std::abs(tube_growth_h3_as_printed(ball, 0.5) - ball_volume_closed(h3, 1.5)) > 1.0);

  const SpaceForm h3r = SpaceForm::hyperbolic(3, -0.25);
  const ConvexBody big = make_convex_body(at_time(sphere_family(h3r, 1.3), 0.0));
  CHECK(std::abs(tube_growth_h3(big, 0.7) - ball_volume_closed(h3r, 2.0)) < 1e-8);

  const ParamSurface egg = at_time(ellipsoid_radial(h3, 0.8, 0.8, 1.1), 0.0);
  const ConvexBody body = make_convex_body(egg);
  const double predicted = tube_growth_h3(body, 0.2);
  const double parallel = enclosed_volume(parallel_surface(egg, 0.2)).value;
  CHECK(predicted == doctest::Approx(parallel).epsilon(1e-8));
  const McEstimate mc = eps_volume_direct(body, 0.2, 20000, 11);
  CHECK(within(mc, predicted));
  CHECK(kind_of([&] { tube_growth_h3(make_convex_body(at_time(sphere_family(SpaceForm::sphere(), 1.0), 0.0)), 0.1); }) ==
        ErrorKind::ModelViolation);
}
