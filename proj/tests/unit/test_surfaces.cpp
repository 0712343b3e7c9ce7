#include <doctest.h>

#include <cmath>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/rng.hpp"
#include "schlafli/surfaces.hpp"

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

}  // namespace

TEST_CASE("unit sphere in E3") {
  const ParamSurface s = at_time(sphere_family(SpaceForm::euclidean(), 1.0), 0.0);
  for (double u : {0.3, 1.2, 2.5})
    for (double v : {0.1, 3.0, 5.5}) {
      const FormsAt f = fundamental_forms(s, u, v);
      CHECK(f.B(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(f.B(1, 1) == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(std::abs(f.B(0, 1)) < 1e-12);
      CHECK(f.H == doctest::Approx(-2.0).epsilon(1e-12));
      CHECK(f.S_intrinsic == doctest::Approx(2.0).epsilon(1e-9));
      // outward normal equals the position
      CHECK((f.normal - f.point.coords()).norm() < 1e-12);
    }
  CHECK(surface_integral(s, [](const FormsAt&) { return 1.0; }) == doctest::Approx(4 * pi).epsilon(1e-10));
  CHECK(enclosed_volume(s).value == doctest::Approx(4 * pi / 3).epsilon(1e-11));
  VolumeOptions div;
  div.method = VolumeMethod::divergence;
  CHECK(enclosed_volume(s, div).value == doctest::Approx(4 * pi / 3).epsilon(1e-11));
  VolumeOptions mc;
  mc.method = VolumeMethod::mc;
  const VolumeResult r = enclosed_volume(s, mc);
  CHECK(std::abs(r.value - 4 * pi / 3) < 4 * r.error_bound);
}

TEST_CASE("geodesic spheres in H3 and S3") {
  const double r = 1.0;
  const ParamSurface h = at_time(sphere_family(SpaceForm::hyperbolic(), r), 0.0);
  const FormsAt fh = fundamental_forms(h, 1.0, 2.0);
  CHECK(fh.H == doctest::Approx(-2.0 / std::tanh(r)).epsilon(1e-11));
  CHECK(fh.S_intrinsic == doctest::Approx(2.0 / (std::sinh(r) * std::sinh(r))).epsilon(1e-8));
  CHECK(surface_integral(h, [](const FormsAt&) { return 1.0; }) ==
        doctest::Approx(4 * pi * std::sinh(r) * std::sinh(r)).epsilon(1e-10));
  CHECK(enclosed_volume(h).value == doctest::Approx(pi * (std::sinh(2 * r) - 2 * r)).epsilon(1e-11));

  const ParamSurface s = at_time(sphere_family(SpaceForm::sphere(), r), 0.0);
  const FormsAt fs = fundamental_forms(s, 0.7, 4.0);
  CHECK(fs.H == doctest::Approx(-2.0 * std::cos(r) / std::sin(r)).epsilon(1e-11));
  CHECK(fs.S_intrinsic == doctest::Approx(2.0 / (std::sin(r) * std::sin(r))).epsilon(1e-8));
  CHECK(enclosed_volume(s).value == doctest::Approx(pi * (2 * r - std::sin(2 * r))).epsilon(1e-11));

  // off-center sphere: same invariants
  const ParamSurface h2 = at_time(sphere_family(SpaceForm::hyperbolic(), r, 0.0, {0.3, -0.2, 0.5}), 0.0);
  CHECK(fundamental_forms(h2, 1.1, 0.4).H == doctest::Approx(-2.0 / std::tanh(r)).epsilon(1e-10));
  CHECK(enclosed_volume(h2).value == doctest::Approx(pi * (std::sinh(2 * r) - 2 * r)).epsilon(1e-10));
}

TEST_CASE("de Sitter slice") {
  const SpaceForm ds = SpaceForm::de_sitter();
  const double s0 = 1.0;
  const ParamSurface s = at_time(de_sitter_slice(ds, s0), 0.0);
  const FormsAt f = fundamental_forms(s, 1.0, 1.0);
  CHECK(f.normal_sign == -1.0);
  CHECK(f.normal[0] > 0);
  CHECK(f.H == doctest::Approx(-2.0 * std::tanh(s0)).epsilon(1e-11));
  CHECK(f.S_intrinsic == doctest::Approx(2.0 / (std::cosh(s0) * std::cosh(s0))).epsilon(1e-8));
  // Gauss equation with eps = -1
  CHECK(f.S_intrinsic == doctest::Approx(2.0 * ds.curvature() - 2.0 * f.Ke).epsilon(1e-8));
  CHECK(enclosed_volume(s).value == doctest::Approx(2 * pi * s0 + pi * std::sinh(2 * s0)).epsilon(1e-11));
}

TEST_CASE("torus") {
  const double R = 2.0, r = 0.5;
  const ParamSurface t = at_time(torus(R, r), 0.0);
  VolumeOptions div;
  div.method = VolumeMethod::divergence;
  CHECK(enclosed_volume(t, div).value == doctest::Approx(2 * pi * pi * R * r * r).epsilon(1e-11));
  CHECK(surface_integral(t, [](const FormsAt&) { return 1.0; }) == doctest::Approx(4 * pi * pi * R * r).epsilon(1e-10));
  CHECK(surface_integral(t, [](const FormsAt& f) { return f.H; }) == doctest::Approx(-4 * pi * pi * R).epsilon(1e-10));
  CHECK(std::abs(surface_integral(t, [](const FormsAt& f) { return f.Ke; }, {1e-9, 1e-10, 1, 6})) < 1e-9);
  CHECK(kind_of([&] { enclosed_volume(t); }) == ErrorKind::NotStarShaped);
  CHECK(kind_of([&] { enclosed_volume(at_time(plane_patch(), 0.0)); }) == ErrorKind::NotClosed);
}

TEST_CASE("smooth Schlafli fixtures") {
  const double h = 1e-3;
  SUBCASE("E3 sphere") {
    const SchlafliReport rep = schlafli_residual_smooth(sphere_family(SpaceForm::euclidean(), 1.0, 1.0), 0.0, h);
    CHECK(rep.int_H_dot == doctest::Approx(8 * pi).epsilon(1e-8));
    CHECK(rep.int_half_IdotII == doctest::Approx(-8 * pi).epsilon(1e-8));
    CHECK(std::abs(rep.residual) < 1e-8);
  }
  SUBCASE("H3 sphere") {
    const SchlafliReport rep = schlafli_residual_smooth(sphere_family(SpaceForm::hyperbolic(), 1.0, 1.0), 0.0, h);
    CHECK(rep.lhs == doctest::Approx(-8 * pi * std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-8));
    CHECK(std::abs(rep.residual) < 1e-7);
  }
  SUBCASE("dS slice") {
    const SchlafliReport rep = schlafli_residual_smooth(de_sitter_slice(SpaceForm::de_sitter(), 1.0), 0.0, h);
    CHECK(rep.lhs == doctest::Approx(-8 * pi * std::cosh(1.0) * std::cosh(1.0)).epsilon(1e-8));
    CHECK(rep.V_dot == doctest::Approx(4 * pi * std::cosh(1.0) * std::cosh(1.0)).epsilon(1e-8));
    CHECK(std::abs(rep.residual) < 1e-7);
  }
  SUBCASE("non-round families") {
    for (const SpaceForm& sp : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
      const SchlafliReport rep = schlafli_residual_smooth(ellipsoid_radial(sp, 0.6, 0.8, 1.0, 0.5), 0.2, h);
      CHECK(std::abs(rep.residual) < 1e-6 * (1 + std::abs(rep.rhs)));
    }
    const SchlafliReport tilt = schlafli_residual_smooth(de_sitter_slice(SpaceForm::de_sitter(), 0.5, 1.0, 0.2), 0.0, h);
    CHECK(std::abs(tilt.residual) < 1e-6 * (1 + std::abs(tilt.rhs)));
  }
  SUBCASE("trivial generators") {
    const ParamSurface base = at_time(perturbed_sphere(SpaceForm::hyperbolic(), 0.8, 0.2, 7), 0.0);
    const SchlafliReport rig = schlafli_residual_smooth(rigid_motion(base, 0, 1, 0.7), 0.0, h);
    CHECK(std::abs(rig.lhs) < 1e-8);
    CHECK(std::abs(rig.rhs) < 1e-7);
    const SchlafliReport tan = schlafli_residual_smooth(
        tangential_slide(base, [](const Taylor& u, const Taylor&, const Taylor&) { return 0.3 * sin(u); }), 0.0, h);
    CHECK(std::abs(tan.rhs) < 1e-7);
    CHECK(std::abs(tan.lhs) < 1e-8);
  }
}

TEST_CASE("finite differences agree with time jets") {
  const SurfaceFamily fam = ellipsoid_radial(SpaceForm::hyperbolic(), 0.7, 0.9, 1.2, 0.8);
  for (double u : {0.4, 1.6, 2.8}) {
    const VariationAt a = variation_at(fam, 0.1, 1e-3, u, 1.3);
    const VariationAt b = variation_at_jet(fam, 0.1, u, 1.3);
    CHECK((a.I_dot - b.I_dot).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.II_dot - b.II_dot).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(a.H_dot == doctest::Approx(b.H_dot).epsilon(1e-8));
  }
}

TEST_CASE("normal variation identities") {
  auto bump = [](const Taylor& u, const Taylor&, const Taylor& t) { return 1.0 + t * cos(u); };
  for (const SpaceForm& sp : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const SurfaceFamily fam = radial_family(sp, bump);
    for (double u : {0.5, 1.3, 2.2}) {
      const NormalVariationResidual r = normal_variation_identities(fam, 0.0, 1e-3, u, 0.9);
      CHECK(r.f == doctest::Approx(std::cos(u)).epsilon(1e-12));
      CHECK(r.I_residual < 1e-8);
      CHECK(r.II_residual < 1e-8);
    }
  }
  // normal flow off a non-round surface uses the difference fallback for f
  const ParamSurface base = at_time(ellipsoid_radial(SpaceForm::hyperbolic(), 0.7, 0.9, 1.1), 0.0);
  const SurfaceFamily flow =
      normal_flow(base, [](const Taylor& u, const Taylor& v, const Taylor&) { return cos(u) * sin(v); });
  const NormalVariationResidual r = normal_variation_identities(flow, 0.0, 1e-3, 1.1, 0.8);
  CHECK(r.I_residual < 1e-8);
  CHECK(r.II_residual < 1e-6);

  const SurfaceFamily slide = tangential_slide(
      base, [](const Taylor& u, const Taylor&, const Taylor&) { return Taylor(0.5) + 0.0 * u; });
  CHECK(kind_of([&] { normal_variation_identities(slide, 0.0, 1e-3, 1.0, 1.0); }) == ErrorKind::NotNormalGenerator);
}

TEST_CASE("isometric variation classes") {
  Eigen::MatrixXd II = Eigen::Vector3d(1, 1, 0).asDiagonal();
  Eigen::MatrixXd IIp = Eigen::Vector3d(1, -1, 0).asDiagonal();
  CHECK(classify_isometric_variation(II, IIp) == IsometricClass::low_rank_ok);
  IIp = Eigen::Vector3d(1, 1, 0).asDiagonal();
  CHECK(classify_isometric_variation(II, IIp) == IsometricClass::inconsistent);
  CHECK(classify_isometric_variation(Eigen::MatrixXd::Zero(3, 3), IIp) == IsometricClass::flat);
  CHECK(classify_isometric_variation(Eigen::Matrix3d::Identity(), IIp) == IsometricClass::must_vanish);
  CHECK(kind_of([] { classify_isometric_variation(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(2, 2)); }) ==
        ErrorKind::DimensionMismatch);

  Rng rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Vector3d k;
    for (int i = 0; i < 3; ++i) k[i] = (rng.uniform() < 0.5 ? -1 : 1) * (0.1 + rng.uniform());
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(isometric_constraint_matrix(k));
    CHECK(svd.singularValues().minCoeff() > 1e-8);
  }
}

TEST_CASE("parallel surfaces") {
  const ParamSurface e = at_time(sphere_family(SpaceForm::euclidean(), 1.0), 0.0);
  const ParamSurface e2 = parallel_surface(e, 0.5);
  CHECK(fundamental_forms(e2, 1.0, 1.0).H == doctest::Approx(-2.0 / 1.5).epsilon(1e-10));
  CHECK(enclosed_volume(e2).value == doctest::Approx(4 * pi * 1.5 * 1.5 * 1.5 / 3).epsilon(1e-10));
  CHECK(kind_of([&] { parallel_surface(e, -1.0); }) == ErrorKind::FocalCrossing);

  const ParamSurface h = at_time(sphere_family(SpaceForm::hyperbolic(), 1.0), 0.0);
  const ParamSurface h2 = parallel_surface(h, 0.25);
  CHECK(fundamental_forms(h2, 1.0, 1.0).H == doctest::Approx(-2.0 / std::tanh(1.25)).epsilon(1e-10));
  CHECK(parallel_surface(h, 0.0).t == 0.0);
}

TEST_CASE("exprlang charts") {
  const ExprProgram prog = ExprProgram::parse("1 + a*t + 0.1*cos(u)", {"a"});
  const SurfaceFamily fam = expr_family(SpaceForm::hyperbolic(), prog, ChartMode::radial, {{"a", 1.0}});
  const SchlafliReport rep = schlafli_residual_smooth(fam, 0.0, 1e-3);
  CHECK(std::abs(rep.residual) < 1e-6 * (1 + std::abs(rep.rhs)));

  const ExprProgram amb = ExprProgram::parse("[sin(u)*cos(v), sin(u)*sin(v), cos(u)]");
  const ParamSurface s = at_time(expr_family(SpaceForm::euclidean(), amb, ChartMode::ambient).set_closed(true), 0.0);
  CHECK(std::abs(fundamental_forms(s, 1.0, 1.0).H) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kind_of([&] { expr_family(SpaceForm::hyperbolic(), amb, ChartMode::ambient); }) ==
        ErrorKind::DimensionMismatch);
}
