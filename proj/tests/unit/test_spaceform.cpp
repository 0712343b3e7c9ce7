#include <doctest.h>

#include <cmath>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/rng.hpp"
#include "schlafli/spaceform.hpp"

using namespace schlafli;
using Eigen::VectorXd;
constexpr double kPi = std::numbers::pi;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Radial quadrature oracle with a plain midpoint rule, independent of the
// library's Gauss-Legendre code.
double midpoint_ball(double (*area)(double), double r, int n = 200000) {
  double s = 0.0;
  const double h = r / n;
  for (int i = 0; i < n; ++i) s += area((i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_CASE("distance examples") {
  const auto h3 = SpaceForm::hyperbolic();
  CHECK(distance(h3, AmbientPoint{1, 0, 0, 0}, AmbientPoint{std::cosh(1.0), std::sinh(1.0), 0, 0}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const auto s3 = SpaceForm::sphere();
  CHECK(distance(s3, AmbientPoint{0.6, 0, 0.8, 0}, AmbientPoint{-0.6, 0, -0.8, 0}) == doctest::Approx(kPi));
  CHECK(distance(SpaceForm::euclidean(), AmbientPoint{0, 0, 0}, AmbientPoint{3, 4, 0}) == doctest::Approx(5.0));
}

TEST_CASE("distance rejects off-model points") {
  const auto h3 = SpaceForm::hyperbolic();
  try {
    distance(h3, AmbientPoint{1, 0.1, 0, 0}, AmbientPoint{1, 0, 0, 0});
    FAIL("expected ModelViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ModelViolation);
  }
  // Lower sheet.
  CHECK_THROWS_AS(distance(h3, AmbientPoint{-1, 0, 0, 0}, AmbientPoint{1, 0, 0, 0}), Error);
}

TEST_CASE("de Sitter joinability") {
  const auto ds = SpaceForm::de_sitter();
  const AmbientPoint p{0, 1, 0, 0};
  const AmbientPoint q{0, 0, 1, 0};
  CHECK(distance(ds, p, q) == doctest::Approx(kPi / 2));
  // Time-like separated pair.
  const AmbientPoint far{std::sinh(2.0), std::cosh(2.0), 0, 0};
  try {
    distance(ds, p, far);
    FAIL("expected NotJoinable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotJoinable);
  }
}

TEST_CASE("geodesic examples") {
  const auto e3 = SpaceForm::euclidean();
  const AmbientPoint o{0, 0, 0};
  auto x = geodesic_eval(e3, o, TangentVector(o, vec({1, 0, 0})), 2.0);
  CHECK(x[0] == doctest::Approx(2.0));

  const auto s3 = SpaceForm::sphere();
  const AmbientPoint e0{1, 0, 0, 0};
  x = geodesic_eval(s3, e0, TangentVector(e0, vec({0, 1, 0, 0})), kPi / 2);
  CHECK(std::abs(x[0]) < 1e-15);
  CHECK(x[1] == doctest::Approx(1.0));

  const auto h3 = SpaceForm::hyperbolic();
  x = geodesic_eval(h3, e0, TangentVector(e0, vec({0, 1, 0, 0})), 1.0);
  CHECK(x[0] == doctest::Approx(std::cosh(1.0)));
  CHECK(x[1] == doctest::Approx(std::sinh(1.0)));
}

TEST_CASE("distance along random geodesics equals |t|") {
  for (const auto& space : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic(),
                            SpaceForm::de_sitter(), SpaceForm::hyperbolic(3, -0.25)}) {
    Rng rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd w(3);
      for (int i = 0; i < 3; ++i) w[i] = rng.normal();
      const AmbientPoint p = from_normal_coords(space, space.model() == Model::de_sitter ? VectorXd(0.3 * w) : w);
      const auto basis = tangent_basis(space, p);
      VectorXd v = VectorXd::Zero(space.ambient_dim());
      // Space-like directions only (drop the time-like basis vector in de Sitter).
      for (int i = 0; i < 3; ++i) {
        const VectorXd b = basis.col(i);
        if (space.inner(b, b) > 0) v += rng.normal() * b;
      }
      v /= std::sqrt(space.inner(v, v));
      const double limit = space.model() == Model::spherical || space.model() == Model::de_sitter
                               ? 0.95 * kPi * space.radius()
                               : 6.0;
      const double t = rng.uniform(-limit, limit);
      const auto q = geodesic_eval(space, p, TangentVector(p, v), t);
      CHECK(is_valid_point(space, q));
      CHECK(std::abs(distance(space, p, q) - std::abs(t)) <= 1e-9);
    }
  }
}

TEST_CASE("log map inverts exp map") {
  const auto h3 = SpaceForm::hyperbolic();
  const AmbientPoint p = from_normal_coords(h3, vec({0.3, -0.2, 0.5}));
  const AmbientPoint q = from_normal_coords(h3, vec({-1.0, 0.4, 0.1}));
  const VectorXd v = log_map(h3, p, q);
  const auto back = exp_map(h3, p, v);
  CHECK((back.coords() - q.coords()).norm() < 1e-12);
  const VectorXd w = to_normal_coords(h3, q);
  CHECK((w - vec({-1.0, 0.4, 0.1})).norm() < 1e-12);
}

TEST_CASE("isometries preserve distance") {
  for (const auto& space : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const auto iso = random_isometry(space, 42);
    const AmbientPoint p = from_normal_coords(space, vec({0.1, 0.7, -0.3}));
    const AmbientPoint q = from_normal_coords(space, vec({-0.5, 0.2, 0.4}));
    CHECK(distance(space, iso.apply(p), iso.apply(q)) == doctest::Approx(distance(space, p, q)).epsilon(1e-12));
  }
}

TEST_CASE("closed ball volumes") {
  CHECK(ball_volume_closed(SpaceForm::euclidean(), 1.0) == doctest::Approx(4 * kPi / 3).epsilon(1e-13));
  CHECK(ball_volume_closed(SpaceForm::hyperbolic(), 1.0) ==
        doctest::Approx(kPi * (std::sinh(2.0) - 2.0)).epsilon(1e-12));
  CHECK(ball_volume_closed(SpaceForm::sphere(), kPi) == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
  const double mid = midpoint_ball([](double t) { return 4 * kPi * std::sinh(t) * std::sinh(t); }, 2.5);
  CHECK(ball_volume_closed(SpaceForm::hyperbolic(), 2.5) == doctest::Approx(mid).epsilon(1e-9));
  CHECK_THROWS_AS(ball_volume_closed(SpaceForm::sphere(), 3.5), Error);
  CHECK_THROWS_AS(ball_volume_closed(SpaceForm::euclidean(), -1.0), Error);
}

TEST_CASE("Monte Carlo volumes of geodesic balls") {
  for (const auto& space : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const double r = 1.0;
    const AmbientPoint c = from_normal_coords(space, vec({0.2, -0.1, 0.3}));
    RegionSpec region{space, [&](const AmbientPoint& x) { return distance(space, c, x) <= r; },
                      PolarChart{origin(space), 1.6}};
    const auto est = region_volume_mc(region, 100000, 7);
    const double exact = ball_volume_closed(space, r);
    CHECK(std::abs(est.estimate - exact) <= 4 * est.std_error);
  }
}

TEST_CASE("Monte Carlo edge cases") {
  const auto e3 = SpaceForm::euclidean();
  RegionSpec empty{e3, [](const AmbientPoint&) { return false; }, AmbientBoxChart{vec({-1, -1, -1}), vec({1, 1, 1})}};
  const auto est = region_volume_mc(empty, 1000, 1);
  CHECK(est.estimate == 0.0);
  CHECK(est.std_error == 0.0);

  RegionSpec ball{e3, [](const AmbientPoint& x) { return x.coords().norm() <= 1.0; },
                  AmbientBoxChart{vec({-1, -1, -1}), vec({1, 1, 1})}};
  const auto b = region_volume_mc(ball, 1000000, 3);
  CHECK(std::abs(b.estimate - 4 * kPi / 3) <= 3 * b.std_error);
  CHECK(region_volume_mc(ball, 20000, 5, 1).estimate == region_volume_mc(ball, 20000, 5, 4).estimate);

  RegionSpec unbounded{e3, [](const AmbientPoint&) { return true; },
                       AmbientBoxChart{vec({-1, -1, -1}), vec({1, 1, INFINITY})}};
  CHECK_THROWS_AS(region_volume_mc(unbounded, 10, 1), Error);
  CHECK_THROWS_AS(region_volume_mc(RegionSpec{e3, ball.contains, PolarChart{AmbientPoint{0, 0, 0}, -1}}, 10, 1),
                  Error);
}

TEST_CASE("de Sitter slab volume") {
  const auto ds = SpaceForm::de_sitter();
  const double exact = 2 * kPi + kPi * std::sinh(2.0);
  CHECK(slab_volume(ds, 1.0) == doctest::Approx(exact).epsilon(1e-13));
  RegionSpec band{ds, [](const AmbientPoint& x) { return x[0] >= 0 && x[0] <= std::sinh(1.0); },
                  TimeSlabChart{-0.5, 1.5}};
  const auto est = region_volume_mc(band, 200000, 9);
  CHECK(std::abs(est.estimate - exact) <= 4 * est.std_error);
}
