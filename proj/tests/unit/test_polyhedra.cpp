#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/polyhedra.hpp"
#include "schlafli/rng.hpp"

using namespace schlafli;
using Eigen::Vector3d;
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

// Cayley-Menger determinant for a Euclidean tetrahedron.
double cayley_menger_volume(const std::vector<Vector3d>& p) {
  Eigen::Matrix<double, 5, 5> m;
  m.setOnes();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i + 1, j + 1) = (p[i] - p[j]).squaredNorm();
  m(0, 0) = 0;
  return std::sqrt(m.determinant() / 288.0);
}

std::vector<Vector3d> random_velocities(Rng& rng, int n, double scale) {
  std::vector<Vector3d> v;
  for (int i = 0; i < n; ++i) v.emplace_back(scale * rng.normal(), scale * rng.normal(), scale * rng.normal());
  return v;
}

}  // namespace

TEST_CASE("cube") {
  const Polyhedron c = cube(2.0);
  CHECK(c.ridges().size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(dihedral_angle(c, i) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(ridge_measure(c, i) == doctest::Approx(2.0));
  }
  CHECK(total_mean_curvature_poly(c) == doctest::Approx(6 * pi * 2.0).epsilon(1e-13));
  PolyVolumeOptions mc;
  mc.method = PolyVolumeMethod::mc;
  mc.samples = 100000;
  const PolyVolume v = poly_volume(c, mc);
  CHECK(std::abs(v.value - 8.0) < 4 * v.error_bound);
  CHECK(kind_of([&] { poly_volume(c); }) == ErrorKind::NonSimplex);
  CHECK(flex_nullity(c) > 6);  // a cube with quadrilateral faces is not triangulated
}

TEST_CASE("regular tetrahedron") {
  const Polyhedron t = regular_tetrahedron(1.0);
  // normal-vector oracle: outward normals of a regular tetrahedron meet at -1/3
  for (int i = 0; i < 6; ++i) CHECK(dihedral_angle(t, i) == doctest::Approx(std::acos(1.0 / 3.0)).epsilon(1e-13));
  std::vector<Vector3d> p;
  for (const auto& v : t.vertices()) p.push_back(v.coords());
  CHECK(poly_volume(t).value == doctest::Approx(cayley_menger_volume(p)).epsilon(1e-12));
  CHECK(poly_volume(t).value == doctest::Approx(1.0 / (6 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(total_mean_curvature_poly(t) == doctest::Approx(6 * (pi - std::acos(1.0 / 3.0))).epsilon(1e-13));
  CHECK(flex_nullity(t) == 6);
  CHECK(kind_of([&] { flex_continuation(t, 10, 1e-3); }) == ErrorKind::RigidStart);
}

TEST_CASE("lune in S3") {
  for (double theta : {0.3, 1.0, 2.5, 4.0}) {
    const Polyhedron l = Polyhedron::lune(theta);
    CHECK(dihedral_angle(l, 0) == doctest::Approx(theta).epsilon(1e-13));
    CHECK(ridge_measure(l, 0) == doctest::Approx(2 * pi));
    CHECK(poly_volume(l).value == doctest::Approx(pi * theta));
  }
  PolyVolumeOptions mc;
  mc.method = PolyVolumeMethod::mc;
  mc.samples = 100000;
  const PolyVolume v = poly_volume(Polyhedron::lune(1.0), mc);
  CHECK(std::abs(v.value - pi) < 4 * v.error_bound);
}

TEST_CASE("curved simplices") {
  // the orthant simplex of S^3 is 1/16 of the sphere with all angles pi/2
  const SpaceForm s3 = SpaceForm::sphere();
  const Polyhedron o = tetrahedron(s3, {AmbientPoint{1, 0, 0, 0}, AmbientPoint{0, 1, 0, 0}, AmbientPoint{0, 0, 1, 0},
                                        AmbientPoint{0, 0, 0, 1}});
  for (int i = 0; i < 6; ++i) {
    CHECK(dihedral_angle(o, i) == doctest::Approx(pi / 2).epsilon(1e-13));
    CHECK(ridge_measure(o, i) == doctest::Approx(pi / 2).epsilon(1e-13));
  }
  CHECK(poly_volume(o).value == doctest::Approx(2 * pi * pi / 16).epsilon(1e-11));

  const SpaceForm h3 = SpaceForm::hyperbolic();
  const AmbientPoint a{1, 0, 0, 0};
  const AmbientPoint b = geodesic_eval(h3, a, TangentVector(a, Eigen::Vector4d(0, 0.6, 0.8, 0)), 0.7);
  CHECK(distance(h3, a, b) == doctest::Approx(0.7).epsilon(1e-13));

  const Polyhedron h = corner_tetrahedron(h3, 1.0);
  for (int i = 0; i < 6; ++i) {
    const auto& r = h.ridges()[i];
    if (r.a == 0 || r.b == 0) CHECK(ridge_measure(h, i) == doctest::Approx(1.0).epsilon(1e-13));
  }
  const double q = poly_volume(h).value;
  PolyVolumeOptions mc;
  mc.method = PolyVolumeMethod::mc;
  mc.samples = 200000;
  const PolyVolume m = poly_volume(h, mc);
  CHECK(std::abs(q - m.value) < 4 * m.error_bound);
  // smaller than the Euclidean corner simplex of the same leg length would suggest
  CHECK(q < 1.0 / 6.0 * std::pow(std::sinh(1.0), 3));

  // isometry invariance of angles and volume
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Isometry g = random_isometry(h3, seed);
    std::vector<AmbientPoint> moved;
    for (const auto& v : h.vertices()) moved.push_back(project(h3, g.apply(v).coords()));
    const Polyhedron hg = h.with_vertices(moved);
    for (int i = 0; i < 6; ++i) CHECK(dihedral_angle(hg, i) == doctest::Approx(dihedral_angle(h, i)).epsilon(1e-9));
    CHECK(poly_volume(hg).value == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("polyhedral Schlafli identity") {
  Rng rng(5, 0);
  SUBCASE("Euclidean tetrahedra") {
    for (int k = 0; k < 10; ++k) {
      const PolyPath path = vertex_velocity_path(regular_tetrahedron(), random_velocities(rng, 4, 0.3));
      const PolySchlafli r = schlafli_residual_poly(path, 0.5, 1e-4);
      CHECK(std::abs(r.rhs) < 1e-7);
      CHECK(r.lhs == 0.0);
    }
  }
  SUBCASE("curved tetrahedra") {
    for (const SpaceForm& sp : {SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
      for (int k = 0; k < 5; ++k) {
        const PolyPath path = vertex_velocity_path(corner_tetrahedron(sp, 0.8), random_velocities(rng, 4, 0.2));
        const PolySchlafli r = schlafli_residual_poly(path, 0.5, 1e-3);
        CHECK(std::abs(r.residual) < 1e-7 * (1 + std::abs(r.rhs)));
      }
    }
  }
  SUBCASE("lune") {
    const PolySchlafli r = schlafli_residual_poly(lune_path([](double t) { return 1.0 + t; }), 0.5, 1e-4);
    CHECK(r.lhs == doctest::Approx(2 * pi).epsilon(1e-9));
    CHECK(std::abs(r.residual) < 1e-9);
  }
  CHECK(kind_of([&] { schlafli_residual_poly(lune_path([](double t) { return 1.0 + t; }), 0.0, 1e-4); }) ==
        ErrorKind::OutOfRange);
}

TEST_CASE("volume by Schlafli integration") {
  const double v = volume_by_schlafli(lune_path([](double t) { return pi / 2 + t * pi / 2; }), pi * pi / 2, 8);
  CHECK(v == doctest::Approx(pi * pi).epsilon(1e-10));

  const SpaceForm h3 = SpaceForm::hyperbolic();
  const PolyPath shrink{[h3](double t) { return corner_tetrahedron(h3, t); }};
  const double vs = volume_by_schlafli(shrink, 0.0, 8);
  CHECK(vs == doctest::Approx(poly_volume(corner_tetrahedron(h3, 1.0)).value).epsilon(1e-7));

  const PolyPath constant{[h3](double) { return corner_tetrahedron(h3, 0.5); }};
  CHECK(volume_by_schlafli(constant, 0.25, 4) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(kind_of([] { volume_by_schlafli(vertex_velocity_path(regular_tetrahedron(), std::vector<Vector3d>(4)), 0, 4); }) ==
        ErrorKind::ZeroCurvature);
}

TEST_CASE("degenerate input") {
  const SpaceForm e3 = SpaceForm::euclidean();
  const Polyhedron flat(e3, {AmbientPoint{0, 0, 0}, AmbientPoint{1, 0, 0}, AmbientPoint{0, 1, 0}}, {{0, 1, 2}, {0, 2, 1}});
  CHECK(kind_of([&] { total_mean_curvature_poly(flat); }) == ErrorKind::DegenerateRidge);
  CHECK(kind_of([&] {
          Polyhedron(e3, {AmbientPoint{0, 0, 0}, AmbientPoint{1, 0, 0}, AmbientPoint{0, 1, 0}, AmbientPoint{0, 0, 1}},
                     {{0, 1, 2}, {0, 3, 1}});
        }) == ErrorKind::NotClosed);
  CHECK(flex_continuation(cube(), 0, 1e-3).states.size() == 1);
}

TEST_CASE("polyhedron JSON") {
  const Polyhedron p = polyhedron_from_json(
      R"({"space": {"K": 0, "dim": 3}, "vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]],
          "facets": [[0,1,2],[0,1,3],[1,2,3],[0,2,3]]})");
  CHECK(poly_volume(p).value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(kind_of([] { polyhedron_from_json("{\"space\": 1}"); }) == ErrorKind::SceneError);
}

TEST_CASE("flexing the nine-vertex polyhedron") {
  const Polyhedron s = steffen();
  CHECK(s.vertices().size() == 9);
  CHECK(s.facets().size() == 14);
  CHECK(s.ridges().size() == 21);
  CHECK(flex_nullity(s) == 7);

  const FlexPath path = flex_continuation(s, 60, 0.01);
  REQUIRE(path.states.size() == 61);
  CHECK(path.max_edge_drift <= 1e-9);
  // independent recomputation of the edge lengths
  double drift = 0.0;
  for (const auto& st : path.states)
    for (const auto& r : st.ridges()) {
      const double l0 = (s.vertices()[r.a].coords() - s.vertices()[r.b].coords()).norm();
      const double l = (st.vertices()[r.a].coords() - st.vertices()[r.b].coords()).norm();
      drift = std::max(drift, std::abs(l - l0));
    }
  CHECK(drift <= 1e-9);
  // the path actually moves
  const double moved = (path.states.back().vertices()[6].coords() - s.vertices()[6].coords()).norm() +
                       (path.states.back().vertices()[4].coords() - s.vertices()[4].coords()).norm();
  CHECK(moved > 0.05);

  const double m0 = total_mean_curvature_poly(s);
  PolyVolumeOptions mc;
  mc.method = PolyVolumeMethod::mc;
  mc.samples = 50000;
  const PolyVolume v0 = poly_volume(s, mc);
  for (std::size_t k = 10; k < path.states.size(); k += 25) {
    CHECK(total_mean_curvature_poly(path.states[k]) == doctest::Approx(m0).epsilon(1e-6));
    const PolyVolume v = poly_volume(path.states[k], mc);
    CHECK(std::abs(v.value - v0.value) < 4 * std::hypot(v.error_bound, v0.error_bound));
  }
}

TEST_CASE("bundled flexible polyhedron data") {
  std::ifstream in(std::string(SCHLAFLI_DATA_DIR) + "/steffen.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const Polyhedron p = polyhedron_from_json(ss.str());
  const Polyhedron s = steffen();
  REQUIRE(p.vertices().size() == s.vertices().size());
  for (std::size_t i = 0; i < p.vertices().size(); ++i)
    CHECK((p.vertices()[i].coords() - s.vertices()[i].coords()).norm() == 0.0);
  CHECK(p.facets() == s.facets());
}
