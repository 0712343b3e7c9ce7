#include <doctest.h>

#include <cmath>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/functionals.hpp"
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

// Principal curvatures of the spheroid x = a sin(phi) (cos, sin), z = c cos(phi).
struct SpheroidK {
  double meridian, parallel;
};
SpheroidK spheroid_curvatures(double a, double c, double phi) {
  const double s = std::hypot(a * std::cos(phi), c * std::sin(phi));
  return {a * c / (s * s * s), c / (a * s)};
}

}  // namespace

TEST_CASE("P2 of geodesic spheres") {
  const P2Value e = p2(at_time(sphere_family(SpaceForm::euclidean(), 1.0), 0.0));
  CHECK(e.int_H == doctest::Approx(-8 * pi).epsilon(1e-10));
  CHECK(e.P2 == doctest::Approx(-4 * pi).epsilon(1e-10));
  CHECK(e.recompute() == e.P2);

  const double r = 1.0;
  const P2Value h = p2(at_time(sphere_family(SpaceForm::hyperbolic(), r), 0.0));
  const double vol = pi * (std::sinh(2 * r) - 2 * r);
  CHECK(h.int_H == doctest::Approx(-8 * pi * std::sinh(r) * std::cosh(r)).epsilon(1e-10));
  CHECK(2 * h.P2 == doctest::Approx(h.int_H + 2 * vol).epsilon(1e-10));
  CHECK(h.recompute() == h.P2);

  const P2Value s = p2(at_time(sphere_family(SpaceForm::sphere(), pi / 2), 0.0));
  CHECK(std::abs(s.int_H) < 1e-10);
  CHECK(s.P2 == doctest::Approx(-pi * pi).epsilon(1e-10));

  const P2Value d = p2(at_time(de_sitter_slice(SpaceForm::de_sitter(), 1.0), 0.0));
  CHECK(d.epsilon == -1.0);
  CHECK(d.P2 == doctest::Approx(0.5 * d.int_H + d.volume).epsilon(1e-12));

  CHECK(kind_of([] { p2(at_time(plane_patch(), 0.0)); }) == ErrorKind::NotClosed);
}

TEST_CASE("P2 variation formulas") {
  // expanding unit sphere: P2 = -4 pi (1 + t), A = 4 pi (1 + t)^2
  const P2VariationResiduals e = p2_variation_residuals(sphere_family(SpaceForm::euclidean(), 1.0, 1.0), 0.0, 1e-3);
  CHECK(e.dP2 == doctest::Approx(-4 * pi).epsilon(1e-8));
  CHECK(e.dA == doctest::Approx(8 * pi).epsilon(1e-8));
  CHECK(e.normal_rhs == doctest::Approx(-4 * pi).epsilon(1e-9));
  CHECK(e.area_rhs == doctest::Approx(8 * pi).epsilon(1e-9));
  CHECK(std::abs(e.general) < 1e-6);
  CHECK(std::abs(e.normal) < 1e-6);
  CHECK(std::abs(e.area) < 1e-6);

  const P2VariationResiduals still = p2_variation_residuals(sphere_family(SpaceForm::euclidean(), 1.0), 0.0, 1e-3);
  CHECK(std::abs(still.dP2) < 1e-9);
  CHECK(std::abs(still.general) < 1e-9);
  CHECK(std::abs(still.normal) < 1e-9);
  CHECK(std::abs(still.area) < 1e-9);

  for (const SpaceForm& sp : {SpaceForm::hyperbolic(), SpaceForm::sphere()}) {
    const P2VariationResiduals r = p2_variation_residuals(sphere_family(sp, 0.8, 0.5), 0.0, 1e-3);
    CHECK(std::abs(r.general) < 1e-6);
    CHECK(std::abs(r.normal) < 1e-6);
    CHECK(std::abs(r.area) < 1e-6);
  }

  // a non-round normal deformation
  auto bump = [](const Taylor& u, const Taylor&, const Taylor& t) { return 1.0 + t * cos(u); };
  const P2VariationResiduals b = p2_variation_residuals(radial_family(SpaceForm::hyperbolic(), bump), 0.0, 1e-3);
  CHECK(std::abs(b.general) < 1e-6);
  CHECK(std::abs(b.normal) < 1e-6);

  const ParamSurface base = at_time(ellipsoid_radial(SpaceForm::euclidean(), 0.9, 1.0, 1.2), 0.0);
  const SurfaceFamily slide =
      tangential_slide(base, [](const Taylor& u, const Taylor& v, const Taylor&) { return 0.3 * sin(u) * cos(v); });
  CHECK(kind_of([&] { p2_variation_residuals(slide, 0.0, 1e-3); }) == ErrorKind::NotNormalGenerator);
  const P2VariationResiduals g = p2_variation_residuals(slide, 0.0, 1e-3, false);
  CHECK(!g.normal_generator);
  CHECK(std::isnan(g.normal));
  CHECK(std::abs(g.dP2) < 1e-8);
  CHECK(std::abs(g.general) < 1e-6);
}

TEST_CASE("Alexandrov comparison") {
  const SpaceForm e3 = SpaceForm::euclidean();
  const AlexandrovReport unit = alexandrov_compare(at_time(sphere_family(e3, 1.0), 0.0));
  CHECK(unit.sphere_radius == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(unit.difference) < 1e-9);
  CHECK(unit.equality);

  // spheroid (1, 1, 2) scaled to area 4 pi; oracle by 1-D quadrature
  const double a = 1.0, c = 2.0;
  auto speed = [&](double p) { return std::hypot(a * std::cos(p), c * std::sin(p)); };
  const double area = integrate_gl([&](double p) { return 2 * pi * a * std::sin(p) * speed(p); }, 0, pi, 32, 8);
  const double mean = integrate_gl(
      [&](double p) {
        const SpheroidK k = spheroid_curvatures(a, c, p);
        return 2 * pi * a * std::sin(p) * speed(p) * (k.meridian + k.parallel);
      },
      0, pi, 32, 8);
  const double scale = std::sqrt(4 * pi / area);
  const AlexandrovReport ell =
      alexandrov_compare(at_time(ellipsoid_radial(e3, scale * a, scale * a, scale * c), 0.0));
  CHECK(ell.area == doctest::Approx(4 * pi).epsilon(1e-9));
  CHECK(ell.difference == doctest::Approx(-4 * pi + 0.5 * scale * mean).epsilon(1e-8));
  CHECK(ell.difference > 0.1);
  CHECK(!ell.equality);

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const AlexandrovReport h = alexandrov_compare(at_time(perturbed_sphere(SpaceForm::hyperbolic(), 0.9, 0.05, seed), 0.0));
    CHECK(h.difference >= -1e-8);
    CHECK(h.difference > 0);
    CHECK(!h.equality);
  }
  const AlexandrovReport s = alexandrov_compare(at_time(sphere_family(SpaceForm::sphere(), 1.2), 0.0));
  CHECK(s.equality);
  CHECK(std::abs(s.difference) < 1e-9);

  CHECK(kind_of([] { sphere_radius_for_area(SpaceForm::sphere(), 5 * pi); }) == ErrorKind::NoMatchingSphere);
  CHECK(kind_of([] { alexandrov_compare(at_time(torus(2.0, 0.5), 0.0)); }) == ErrorKind::NotConvex);
  CHECK(sphere_radius_for_area(SpaceForm::hyperbolic(), 4 * pi * std::sinh(1.3) * std::sinh(1.3)) ==
        doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("K_e proportional to H") {
  for (const SpaceForm& sp : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()})
    CHECK(ke_proportional_check(at_time(sphere_family(sp, 0.9), 0.0), 1e-8).status == KeProportional::umbilic);
  const SpaceForm e3 = SpaceForm::euclidean();
  CHECK(ke_proportional_check(at_time(ellipsoid_radial(e3, 1, 1, 2), 0.0), 1e-4).status ==
        KeProportional::not_applicable);
  const KeProportionalReport near = ke_proportional_check(at_time(perturbed_sphere(e3, 1.0, 1e-6, 5), 0.0), 1e-4);
  CHECK(near.status == KeProportional::umbilic);
  CHECK(near.ratio_spread > 0);
  CHECK(to_string(KeProportional::not_applicable) == "not_applicable");
}

TEST_CASE("umbilic inequality") {
  const UmbilicReport h = umbilic_inequality(at_time(sphere_family(SpaceForm::hyperbolic(), 1.0), 0.0), 1.0, 2.0);
  const double sh = std::sinh(1.0);
  CHECK(h.lhs == doctest::Approx(2 / (sh * sh) + 2).epsilon(1e-10));
  CHECK(h.rhs == doctest::Approx(2 * std::pow(std::cosh(1.0) / sh, 2)).epsilon(1e-10));
  CHECK(std::abs(h.residual) < 1e-10);
  CHECK(h.equality);
  CHECK(std::abs(h.h2_residual) < 1e-10);

  // spheroid (1, 1, 2) through the radial chart: the point at polar angle u
  // sits at z = rho cos u, i.e. spheroid angle phi with cos phi = z / 2
  const ParamSurface ell = at_time(ellipsoid_radial(SpaceForm::euclidean(), 1, 1, 2), 0.0);
  for (double u : {0.4, 1.1, 2.0}) {
    const UmbilicReport r = umbilic_inequality(ell, u, 0.7);
    const double rho = 1.0 / std::sqrt(std::pow(std::sin(u), 2) + std::pow(std::cos(u) / 2, 2));
    const SpheroidK k = spheroid_curvatures(1, 2, std::acos(rho * std::cos(u) / 2));
    CHECK(r.residual == doctest::Approx(0.5 * std::pow(k.meridian - k.parallel, 2)).epsilon(1e-9));
    CHECK(r.residual > 0);
    CHECK(!r.equality);
    CHECK(std::abs(r.h2_residual) < 1e-10);
    CHECK(std::abs(r.trace_residual) < 1e-10);
  }

  const UmbilicReport p = umbilic_inequality(at_time(plane_patch(), 0.0), 0.3, -0.2);
  CHECK(std::abs(p.lhs) < 1e-14);
  CHECK(std::abs(p.rhs) < 1e-14);
  CHECK(p.equality);

  CHECK(kind_of([] { umbilic_inequality(at_time(de_sitter_slice(SpaceForm::de_sitter(), 1.0), 0.0), 1.0, 1.0); }) ==
        ErrorKind::ModelViolation);
}

TEST_CASE("foliation identities") {
  const double R = 1.0;
  for (const SpaceForm& sp : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const FoliationReport r = foliation_identities(concentric_ball_foliation(sp, R));
    CHECK(r.injective);
    CHECK(std::abs(r.residual_H2) < 1e-7);
    CHECK(std::abs(r.residual_HSi) < 1e-7);
    CHECK(std::abs(r.residual_S) < 1e-7);
    CHECK(r.volume == doctest::Approx(ball_volume_closed(sp, R)).epsilon(1e-9));
    if (sp.model() == Model::hyperbolic) {
      CHECK(r.lhs_S == doctest::Approx(8 * pi * R - 4 * pi * std::sinh(2 * R)).epsilon(1e-9));
      CHECK(r.rhs_S == doctest::Approx(8 * pi * R - 4 * pi * std::sinh(2 * R)).epsilon(1e-9));
    }
    if (sp.is_flat()) {
      // 0 = int S dV + int H dA = 8 pi R - 8 pi R
      CHECK(r.int_S == doctest::Approx(8 * pi * R).epsilon(1e-9));
      CHECK(r.boundary_H == doctest::Approx(-8 * pi * R).epsilon(1e-9));
    }
  }
  const SpaceForm h3 = SpaceForm::hyperbolic();
  const FoliationReport shell = foliation_identities(concentric_shell_foliation(h3, 0.5, 1.2));
  CHECK(std::abs(shell.residual_S) < 1e-7);
  CHECK(std::abs(shell.residual_H2) < 1e-7);
  CHECK(shell.volume == doctest::Approx(ball_volume_closed(h3, 1.2) - ball_volume_closed(h3, 0.5)).epsilon(1e-9));

  const FoliationReport g = foliation_identities(rotating_great_spheres(SpaceForm::sphere(), 1.0));
  CHECK(!g.injective);
  CHECK(g.minimal_leaves);
  CHECK(g.lhs_HSi > 0);
  CHECK(g.rhs_HSi <= 1e-9);
  CHECK(g.obstruction_margin > 0);

  const ParamSurface base = at_time(sphere_family(h3, 1.0), 0.0);
  FoliationSpec slide{tangential_slide(base, [](const Taylor& u, const Taylor&, const Taylor&) { return 0.1 * sin(u); })};
  CHECK(kind_of([&] { foliation_identities(slide); }) == ErrorKind::NonInjectiveSweep);
}

TEST_CASE("warped product Einstein conditions") {
  for (const char* name : {"sphere", "cone", "hyperbolic"}) {
    const WarpedResiduals r = warped_einstein_check(warp_catalog(name));
    CHECK(r.ode <= 1e-10);
    CHECK(r.first_integral <= 1e-10);
  }
  WarpedProductSpec off = warp_catalog("sphere");
  off.k = 2.0;
  CHECK(warped_einstein_check(off).first_integral == doctest::Approx(1.0).epsilon(1e-12));
  WarpedProductSpec neg = warp_catalog("sphere");
  neg.t1 = 4.0;
  CHECK(kind_of([&] { warped_einstein_check(neg); }) == ErrorKind::NonPositiveWarp);
  CHECK(kind_of([] { warp_catalog("torus"); }) == ErrorKind::SceneError);
}
