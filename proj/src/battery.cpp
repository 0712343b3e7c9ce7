#include "schlafli/battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "schlafli/error.hpp"
#include "schlafli/exprlang.hpp"
#include "schlafli/functionals.hpp"
#include "schlafli/integral_geom.hpp"
#include "schlafli/polyhedra.hpp"
#include "schlafli/rng.hpp"
#include "schlafli/surfaces.hpp"

namespace schlafli {

using Eigen::Vector3d;

const char* const kReportColumns =
    "task,object,quantity,computed,oracle,residual,tolerance,error_budget,pass,seed";

namespace {

constexpr double kPi = 3.14159265358979323846;

bool within(double residual, double tolerance, double budget) {
  return std::isfinite(residual) && std::abs(residual) <= tolerance + budget;
}

std::string g17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return g17(x);
}

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t criterion_seed(const BatteryOptions& o, int id) { return splitmix64(o.seed + 1000003ULL * id); }

std::string label(const std::string& base, int index) { return base + "#" + std::to_string(index); }

/// Runs `body`, turning a library error into a failing row.
void guarded(std::vector<ReportRow>& rows, const std::string& object, const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    rows.push_back(error_row(object, e.what()));
  }
}

std::vector<Vector3d> random_velocities(Rng& rng, int n, double scale) {
  std::vector<Vector3d> v;
  for (int i = 0; i < n; ++i) v.emplace_back(scale * rng.normal(), scale * rng.normal(), scale * rng.normal());
  return v;
}

int pick(Rng& rng, int n) { return std::min(n - 1, static_cast<int>(rng.uniform() * n)); }

/// Random programs that stay finite on [-1, 1]^3.
std::string random_expr(Rng& rng, int depth) {
  const char* vars[] = {"u", "v", "t"};
  if (depth == 0) {
    const int k = pick(rng, 4);
    if (k == 3) return "0." + std::to_string(2 + pick(rng, 8)) + "5";
    return vars[k];
  }
  const std::string a = random_expr(rng, depth - 1);
  const std::string b = random_expr(rng, depth - 1);
  switch (pick(rng, 12)) {
    case 0: return "(" + a + " + " + b + ")";
    case 1: return "(" + a + " - " + b + ")";
    case 2: return "(" + a + " * " + b + ")";
    case 3: return "(" + a + ") / (2 + cos(" + b + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "cos(" + a + ")";
    case 6: return "tanh(" + a + ")";
    case 7: return "exp(0.3 * sin(" + a + "))";
    case 8: return "log(1.5 + sin(" + a + "))";
    case 9: return "sqrt(1 + (" + a + ")^2)";
    case 10: return "atan2(" + a + ", 2 + cos(" + b + "))";
    default: return "sinh(0.5 * cos(" + a + ")) * cosh(0.3 * " + b + ")";
  }
}

const std::vector<SpaceForm>& riemannian_forms() {
  static const std::vector<SpaceForm> forms{SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()};
  return forms;
}

// --- criteria ------------------------------------------------------------------------

// 1. Polyhedral Schlafli on random tetrahedron paths.
CriterionResult polyhedral_schlafli(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  for (std::size_t s = 0; s < riemannian_forms().size(); ++s) {
    const SpaceForm& sp = riemannian_forms()[s];
    Rng rng(seed, s);
    c.timings["runtime " + sp.name()] = seconds([&] {
      for (int k = 0; k < o.tetra_paths; ++k) {
        const std::string obj = label("tetra-path-" + sp.name(), k);
        guarded(c.rows, obj, [&] {
          const Polyhedron start = sp.is_flat() ? regular_tetrahedron() : corner_tetrahedron(sp, 0.8);
          const PolyPath path = vertex_velocity_path(start, random_velocities(rng, 4, 0.15));
          const PolySchlafli r = schlafli_residual_poly(path, 0.5, 1e-4);
          c.rows.push_back(value_row(obj, "mK V' vs sum W dtheta", r.lhs, r.rhs, 1e-3 * (1 + std::abs(r.rhs)), 0.0,
                                     seed));
        });
      }
    });
  }
  return c;
}

// 2. Euclidean tetrahedra: sum W_i theta_i' = 0.
CriterionResult euclidean_specialization(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  Rng rng(seed, 0);
  for (int k = 0; k < o.euclidean_deformations; ++k) {
    const std::string obj = label("tetra-deformation-E3", k);
    guarded(c.rows, obj, [&] {
      const PolyPath path = vertex_velocity_path(regular_tetrahedron(), random_velocities(rng, 4, 0.3));
      const double t = rng.uniform(0.2, 0.8);
      const PolySchlafli r = schlafli_residual_poly(path, t, 1e-4);
      c.rows.push_back(value_row(obj, "sum W dtheta", r.rhs, 0.0, 1e-6, 0.0, seed));
    });
  }
  return c;
}

std::string random_radial_program(Rng& rng) {
  const double r0 = rng.uniform(0.6, 1.0);
  const double a = rng.uniform(-0.5, 0.5), b = rng.uniform(-0.5, 0.5), d = rng.uniform(-0.1, 0.1);
  const double p = rng.uniform(0.0, 2 * kPi);
  return g17(r0) + " * (1 + " + g17(a) + " * t * sin(u) * cos(v - " + g17(p) + ") + " + g17(b) + " * t * cos(u) + " +
         g17(d) + " * sin(u)^2 * cos(2 * v))";
}

// 3. Smooth Schlafli: canonical fixtures and random exprlang families.
CriterionResult smooth_schlafli(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  const double h = 1e-3;
  guarded(c.rows, "sphere-E3", [&] {
    const SchlafliReport r = schlafli_residual_smooth(sphere_family(SpaceForm::euclidean(), 1.0, 1.0), 0.0, h);
    c.rows.push_back(value_row("sphere-E3", "int H'", r.int_H_dot, 8 * kPi, 1e-5));
    c.rows.push_back(value_row("sphere-E3", "1/2 int <I', II>", r.int_half_IdotII, -8 * kPi, 1e-5));
    c.rows.push_back(value_row("sphere-E3", "residual", r.residual, 0.0, 1e-5));
  });
  guarded(c.rows, "sphere-H3", [&] {
    const SchlafliReport r = schlafli_residual_smooth(sphere_family(SpaceForm::hyperbolic(), 1.0, 1.0), 0.0, h);
    const double expect = -8 * kPi * std::sinh(1.0) * std::sinh(1.0);
    c.rows.push_back(value_row("sphere-H3", "mK V'", r.lhs, expect, 1e-5));
    c.rows.push_back(value_row("sphere-H3", "int H' + 1/2 int <I', II>", r.rhs, expect, 1e-5));
    c.rows.push_back(value_row("sphere-H3", "residual", r.residual, 0.0, 1e-5));
  });
  for (std::size_t s = 0; s < riemannian_forms().size(); ++s) {
    const SpaceForm& sp = riemannian_forms()[s];
    Rng rng(seed, s);
    for (int k = 0; k < o.random_families; ++k) {
      const std::string obj = label("expr-family-" + sp.name(), k);
      const std::string src = random_radial_program(rng);
      guarded(c.rows, obj, [&] {
        const SurfaceFamily fam = expr_family(sp, ExprProgram::parse(src), ChartMode::radial);
        const SchlafliReport r = schlafli_residual_smooth(fam, 0.0, h);
        c.rows.push_back(value_row(obj, "residual", r.residual, 0.0, 1e-4, 0.0, seed));
      });
    }
  }
  return c;
}

// 4. de Sitter slice.
CriterionResult lorentzian_schlafli(const BatteryOptions&, std::uint64_t) {
  CriterionResult c;
  guarded(c.rows, "slice-dS3", [&] {
    const SchlafliReport r = schlafli_residual_smooth(de_sitter_slice(SpaceForm::de_sitter(), 1.0), 0.0, 1e-3);
    const double expect = -8 * kPi * std::cosh(1.0) * std::cosh(1.0);
    c.rows.push_back(value_row("slice-dS3", "eps mK V'", r.lhs, expect, 1e-5));
    c.rows.push_back(value_row("slice-dS3", "int H' + 1/2 int <I', II>", r.rhs, expect, 1e-5));
    c.rows.push_back(value_row("slice-dS3", "residual", r.residual, 0.0, 1e-5));
  });
  return c;
}

// 5. Flexible polyhedron: total mean curvature and volume are constant.
CriterionResult bending_invariants(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  guarded(c.rows, "steffen", [&] {
    const Polyhedron start = steffen();
    const FlexPath path = flex_continuation(start, o.flex_steps, o.flex_step);
    c.rows.push_back(value_row("steffen", "flex steps", static_cast<double>(path.states.size() - 1), o.flex_steps, 0.0));
    c.rows.push_back(upper_bound_row("steffen", "max edge-length drift", path.max_edge_drift, 1e-9));
    double moved = 0.0;
    for (std::size_t i = 0; i < start.vertices().size(); ++i)
      moved = std::max(moved, (path.states.back().vertices()[i].coords() - start.vertices()[i].coords()).norm());
    c.rows.push_back(lower_bound_row("steffen", "max vertex displacement", moved, 0.05));
    const double m0 = total_mean_curvature_poly(start);
    double drift = 0.0;
    for (const Polyhedron& p : path.states) drift = std::max(drift, std::abs(total_mean_curvature_poly(p) - m0));
    c.rows.push_back(upper_bound_row("steffen", "relative total mean curvature variation", drift / std::abs(m0), 1e-6));
    PolyVolumeOptions vo;
    vo.method = PolyVolumeMethod::mc;
    vo.samples = o.flex_volume_samples;
    vo.seed = seed;
    const PolyVolume v0 = poly_volume(start, vo);
    vo.seed = seed + 1;
    const PolyVolume v1 = poly_volume(path.states.back(), vo);
    const double sigma = std::hypot(v0.error_bound, v1.error_bound);
    c.rows.push_back(value_row("steffen", "volume change", v1.value - v0.value, 0.0, o.mc_sigmas * sigma, 0.0, seed));
  });
  return c;
}

// 6. Isometric deformations with a rank-3 diagonal II are trivial.
CriterionResult isometric_rigidity(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  Rng rng(seed, 0);
  for (int k = 0; k < o.diagonal_trials; ++k) {
    const std::string obj = label("diagonal-II", k);
    Eigen::Vector3d kv;
    for (int i = 0; i < 3; ++i) kv[i] = (rng.uniform() < 0.5 ? -1 : 1) * (0.1 + rng.uniform());
    guarded(c.rows, obj, [&] {
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(isometric_constraint_matrix(kv));
      c.rows.push_back(lower_bound_row(obj, "smallest singular value", svd.singularValues().minCoeff(), 1e-8, 0.0, seed));
    });
  }
  return c;
}

// 7. Crofton measures of the ball and the Steiner polynomial of an ellipsoid.
CriterionResult steiner_crofton(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  const SpaceForm e3 = SpaceForm::euclidean();
  guarded(c.rows, "unit-ball", [&] {
    const ConvexBody ball = make_convex_body(at_time(sphere_family(e3, 1.0), 0.0));
    const McEstimate p1 = crofton_lines_mc(ball, o.crofton_samples, seed);
    c.rows.push_back(value_row("unit-ball", "P1 (lines)", p1.value, 2 * kPi * kPi, o.mc_sigmas * p1.std_error, 0.0, seed));
    const McEstimate p2 = crofton_planes_mc(ball, o.crofton_samples, seed + 1);
    c.rows.push_back(value_row("unit-ball", "P2 (planes)", p2.value, 4 * kPi, o.mc_sigmas * p2.std_error, 0.0, seed + 1));
  });
  guarded(c.rows, "ellipsoid-1-1-2", [&] {
    const ConvexBody ell = make_convex_body(at_time(ellipsoid_radial(e3, 1, 1, 2), 0.0));
    const SteinerData s = steiner_from_curvature(ell);
    std::uint64_t k = 2;
    for (double eps : {0.1, 0.3, 0.5}) {
      const McEstimate e = eps_volume_direct(ell, eps, o.steiner_samples, seed + k);
      c.rows.push_back(value_row("ellipsoid-1-1-2", "V_eps at " + g17(eps), e.value, s.eval(eps),
                                 o.mc_sigmas * e.std_error, 0.0, seed + k));
      ++k;
    }
  });
  return c;
}

// 8. Tube growth in H^3.
CriterionResult tube_growth(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  const SpaceForm h3 = SpaceForm::hyperbolic();
  guarded(c.rows, "ball-H3", [&] {
    const ConvexBody ball = make_convex_body(at_time(sphere_family(h3, 1.0), 0.0));
    c.rows.push_back(value_row("ball-H3", "V_eps at 0.5", tube_growth_h3(ball, 0.5), ball_volume_closed(h3, 1.5), 1e-8));
  });
  guarded(c.rows, "ellipsoid-H3", [&] {
    const ConvexBody body = make_convex_body(at_time(ellipsoid_radial(h3, 0.8, 0.8, 1.1), 0.0));
    const McEstimate e = eps_volume_direct(body, 0.3, o.tube_samples, seed);
    c.rows.push_back(value_row("ellipsoid-H3", "V_eps at 0.3", e.value, tube_growth_h3(body, 0.3),
                               o.mc_sigmas * e.std_error, 0.0, seed));
  });
  return c;
}

struct NamedSurface {
  std::string name;
  ParamSurface surface;
  bool sphere = false;
};

std::vector<NamedSurface> convex_battery() {
  std::vector<NamedSurface> out;
  for (const SpaceForm& sp : riemannian_forms()) {
    const std::string n = "-" + sp.name();
    const double s = sp.curvature() > 0 ? 0.6 : 1.0;  // keep S^3 bodies well inside a hemisphere
    out.push_back({"sphere-r0.5" + n, at_time(sphere_family(sp, 0.5), 0.0), true});
    out.push_back({"sphere-r1.2" + n, at_time(sphere_family(sp, 1.2 * s), 0.0), true});
    out.push_back({"ellipsoid-1-1-2" + n, at_time(ellipsoid_radial(sp, s * 0.5, s * 0.5, s), 0.0)});
    out.push_back({"ellipsoid-1-1.5-2" + n, at_time(ellipsoid_radial(sp, s * 0.5, s * 0.75, s), 0.0)});
    out.push_back({"ellipsoid-oblate" + n, at_time(ellipsoid_radial(sp, s, s, s * 0.6), 0.0)});
    out.push_back({"ellipsoid-near-round" + n, at_time(ellipsoid_radial(sp, s * 0.9, s * 0.95, s), 0.0)});
    for (std::uint64_t seed = 1; seed <= 4; ++seed)
      out.push_back({"perturbed-" + std::to_string(seed) + n,
                     at_time(perturbed_sphere(sp, 0.8 * s, 0.02 + 0.02 * seed, seed), 0.0)});
  }
  return out;
}

// 9. Alexandrov comparison on at least 30 convex bodies.
CriterionResult alexandrov(const BatteryOptions&, std::uint64_t) {
  CriterionResult c;
  for (const NamedSurface& body : convex_battery()) {
    guarded(c.rows, body.name, [&] {
      const AlexandrovReport r = alexandrov_compare(body.surface);
      c.rows.push_back(lower_bound_row(body.name, "P2(sphere) - P2(S)", r.difference, 0.0, 1e-8));
      c.rows.push_back(value_row(body.name, "equality flag", r.equality ? 1.0 : 0.0, body.sphere ? 1.0 : 0.0, 0.0));
    });
  }
  return c;
}

// 10. Umbilic inequality and the H2 identity at random points.
CriterionResult umbilic(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  std::vector<NamedSurface> surfaces;
  for (const SpaceForm& sp : riemannian_forms()) {
    const std::string n = "-" + sp.name();
    surfaces.push_back({"sphere" + n, at_time(sphere_family(sp, 0.9), 0.0), true});
    surfaces.push_back({"ellipsoid" + n, at_time(ellipsoid_radial(sp, 0.5, 0.7, 1.0), 0.0)});
    surfaces.push_back({"perturbed" + n, at_time(perturbed_sphere(sp, 0.8, 0.1, 3), 0.0)});
  }
  surfaces.push_back({"torus-E3", at_time(torus(2.0, 0.5), 0.0)});
  surfaces.push_back({"plane-E3", at_time(plane_patch(), 0.0), true});  // every point is umbilic
  for (std::size_t s = 0; s < surfaces.size(); ++s) {
    const NamedSurface& ns = surfaces[s];
    guarded(c.rows, ns.name, [&] {
      Rng rng(seed, s);
      const ChartDomain& d = ns.surface.domain();
      const double mu = 0.01 * (d.u1 - d.u0), mv = 0.01 * (d.v1 - d.v0);
      double worst = std::numeric_limits<double>::infinity(), h2 = 0.0, trace = 0.0;
      int equal = 0;
      for (int i = 0; i < o.umbilic_points; ++i) {
        const double u = rng.uniform(d.u0 + mu, d.u1 - mu), v = rng.uniform(d.v0 + mv, d.v1 - mv);
        const UmbilicReport r = umbilic_inequality(ns.surface, u, v);
        worst = std::min(worst, r.residual);
        h2 = std::max(h2, std::abs(r.h2_residual));
        trace = std::max(trace, std::abs(r.trace_residual));
        if (r.equality) ++equal;
      }
      c.rows.push_back(lower_bound_row(ns.name, "min H^2/m - (Sbar/(m-1) - S/(m+1))", worst, 0.0, 1e-10, seed));
      c.rows.push_back(value_row(ns.name, "points flagged umbilic", equal, ns.sphere ? o.umbilic_points : 0, 0.0, 0.0,
                                 seed));
      c.rows.push_back(upper_bound_row(ns.name, "max |2H2 - (Sbar - (m-1)/(m+1) S)|", h2, 1e-8, 0.0, seed));
      c.rows.push_back(upper_bound_row(ns.name, "max |H^2 - tr III - 2H2|", trace, 1e-8, 0.0, seed));
    });
  }
  return c;
}

// 11. Foliations of balls by concentric spheres.
CriterionResult foliations(const BatteryOptions&, std::uint64_t) {
  CriterionResult c;
  for (const SpaceForm& sp : riemannian_forms()) {
    const std::string obj = "ball-foliation-" + sp.name();
    guarded(c.rows, obj, [&] {
      const FoliationReport r = foliation_identities(concentric_ball_foliation(sp, 1.0));
      c.rows.push_back(value_row(obj, "m K V vs 2 int H2 + int H", r.lhs_H2, r.rhs_H2, 1e-5));
      c.rows.push_back(value_row(obj, "m K V vs int (H^2 - tr III) + int H", r.lhs_HSi, r.rhs_HSi, 1e-5));
      c.rows.push_back(value_row(obj, "m^2 K V vs int S + int H", r.lhs_S, r.rhs_S, 1e-5));
      if (sp.model() == Model::hyperbolic) {
        const double closed = 8 * kPi - 4 * kPi * std::sinh(2.0);
        c.rows.push_back(value_row(obj, "m^2 K V closed form", r.lhs_S, closed, 1e-5));
        c.rows.push_back(value_row(obj, "int S + int H closed form", r.rhs_S, closed, 1e-5));
      }
    });
  }
  return c;
}

// 12. Warped-product Einstein conditions.
CriterionResult warped(const BatteryOptions&, std::uint64_t) {
  CriterionResult c;
  for (const char* name : {"sphere", "cone", "hyperbolic"}) {
    const std::string obj = std::string("warp-") + name;
    guarded(c.rows, obj, [&] {
      const WarpedResiduals r = warped_einstein_check(warp_catalog(name));
      c.rows.push_back(value_row(obj, "max |f'' + k' f|", r.ode, 0.0, 1e-10));
      c.rows.push_back(value_row(obj, "max |k - k' f^2 - f'^2|", r.first_integral, 0.0, 1e-10));
    });
  }
  return c;
}

// 13. exprlang jets against finite differences, and parser fuzzing.
CriterionResult exprlang_checks(const BatteryOptions& o, std::uint64_t seed) {
  CriterionResult c;
  Rng rng(seed, 0);
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < o.random_programs; ++trial) {
    try {
      const ExprProgram prog = ExprProgram::parse(random_expr(rng, 1 + trial % 4));
      const double u = rng.uniform(-1, 1), v = rng.uniform(-1, 1), t = rng.uniform(-1, 1);
      const JetValue j = eval_jet(prog, u, v, t);
      auto f = [&](double du, double dv, double dt) { return prog.eval(u + du, v + dv, t + dt); };
      auto rich = [](auto d, double h) { return (4.0 * d(h / 2) - d(h)) / 3.0; };
      auto first = [&](int axis) {
        return rich(
            [&](double h) {
              const double e[3] = {axis == 0 ? h : 0, axis == 1 ? h : 0, axis == 2 ? h : 0};
              return (f(e[0], e[1], e[2]) - f(-e[0], -e[1], -e[2])) / (2 * h);
            },
            1e-3);
      };
      auto second = [&](int a, int b) {
        return rich(
            [&](double h) {
              if (a == b) {
                const double e[2] = {a == 0 ? h : 0, a == 1 ? h : 0};
                return (f(e[0], e[1], 0) - 2 * f(0, 0, 0) + f(-e[0], -e[1], 0)) / (h * h);
              }
              return (f(h, h, 0) - f(h, -h, 0) - f(-h, h, 0) + f(-h, -h, 0)) / (4 * h * h);
            },
            4e-3);
      };
      const double scale = 1.0 + std::abs(j.value);
      const double devs[6] = {j.du - first(0),        j.dv - first(1),        j.dt - first(2),
                              j.duu - second(0, 0), j.dvv - second(1, 1), j.duv - second(0, 1)};
      for (double d : devs) worst = std::max(worst, std::abs(d) / scale);
    } catch (const Error&) {
      ++failures;
    }
  }
  c.rows.push_back(upper_bound_row("random-programs", "max relative jet deviation", worst, 1e-6, 0.0, seed));
  c.rows.push_back(value_row("random-programs", "programs failing to evaluate", failures, 0.0, 0.0, 0.0, seed));

  const std::string alphabet = "uvt+-*/^(),[]. 0123456789esinpqrtcohxlgaw\n";
  int crashes = 0, unpositioned = 0, rejected = 0;
  for (int trial = 0; trial < o.fuzz_inputs; ++trial) {
    std::string s;
    const int n = 1 + pick(rng, 24);
    for (int i = 0; i < n; ++i) s += alphabet[pick(rng, static_cast<int>(alphabet.size()))];
    try {
      const ExprProgram p = ExprProgram::parse(s);
      (void)p.print();
    } catch (const Error& e) {
      ++rejected;
      if (e.line() < 1 || e.column() < 1) ++unpositioned;
    } catch (...) {
      ++crashes;
    }
  }
  c.rows.push_back(value_row("parser-fuzz", "inputs not handled", crashes, 0.0, 0.0, 0.0, seed));
  c.rows.push_back(value_row("parser-fuzz", "rejections without position", unpositioned, 0.0, 0.0, 0.0, seed));
  c.rows.push_back(lower_bound_row("parser-fuzz", "inputs rejected", rejected, 1.0, 0.0, seed));
  return c;
}

struct CriterionEntry {
  const char* key;
  CriterionResult (*run)(const BatteryOptions&, std::uint64_t);
};

const CriterionEntry kCriteria[] = {
    {"polyhedral-schlafli", polyhedral_schlafli},
    {"euclidean-specialization", euclidean_specialization},
    {"smooth-schlafli", smooth_schlafli},
    {"lorentzian-schlafli", lorentzian_schlafli},
    {"bending-invariants", bending_invariants},
    {"isometric-rigidity", isometric_rigidity},
    {"steiner-crofton", steiner_crofton},
    {"tube-growth", tube_growth},
    {"alexandrov", alexandrov},
    {"umbilic-inequality", umbilic},
    {"foliations", foliations},
    {"warped-products", warped},
    {"exprlang", exprlang_checks},
};

}  // namespace

// --- rows and reports -------------------------------------------------------------------------

ReportRow value_row(std::string object, std::string quantity, double computed, double oracle, double tolerance,
                    double error_budget, std::optional<std::uint64_t> seed) {
  ReportRow r;
  r.object = std::move(object);
  r.quantity = std::move(quantity);
  r.computed = computed;
  r.oracle = oracle;
  r.residual = computed - oracle;
  r.tolerance = tolerance;
  r.error_budget = error_budget;
  r.pass = within(r.residual, tolerance, error_budget);
  r.seed = seed;
  return r;
}

ReportRow lower_bound_row(std::string object, std::string quantity, double computed, double bound, double tolerance,
                          std::optional<std::uint64_t> seed) {
  ReportRow r = value_row(std::move(object), std::move(quantity), computed, bound, tolerance, 0.0, seed);
  r.residual = std::isnan(computed) ? computed : std::min(0.0, computed - bound);
  r.pass = within(r.residual, tolerance, 0.0);
  return r;
}

ReportRow upper_bound_row(std::string object, std::string quantity, double computed, double bound, double tolerance,
                          std::optional<std::uint64_t> seed) {
  ReportRow r = value_row(std::move(object), std::move(quantity), computed, bound, tolerance, 0.0, seed);
  r.residual = std::isnan(computed) ? computed : std::max(0.0, computed - bound);
  r.pass = within(r.residual, tolerance, 0.0);
  return r;
}

ReportRow error_row(std::string object, const std::string& what) {
  ReportRow r;
  r.object = std::move(object);
  r.quantity = "error: " + what;
  r.computed = r.residual = std::numeric_limits<double>::quiet_NaN();
  r.pass = false;
  return r;
}

bool VerificationReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::string VerificationReport::json() const {
  nlohmann::ordered_json out;
  out["schema"] = 1;
  out["passed"] = passed();
  out["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json j;
    j["task"] = r.task;
    j["object"] = r.object;
    j["quantity"] = r.quantity;
    j["computed"] = number(r.computed);
    j["oracle"] = number(r.oracle);
    j["residual"] = number(r.residual);
    j["tolerance"] = number(r.tolerance);
    j["error_budget"] = number(r.error_budget);
    j["pass"] = r.pass;
    j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
    out["rows"].push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string VerificationReport::csv() const {
  std::ostringstream out;
  out << kReportColumns << "\n";
  for (const ReportRow& r : rows) {
    out << csv_field(r.task) << ',' << csv_field(r.object) << ',' << csv_field(r.quantity) << ',' << g17(r.computed)
        << ',' << g17(r.oracle) << ',' << g17(r.residual) << ',' << g17(r.tolerance) << ',' << g17(r.error_budget)
        << ',' << (r.pass ? "pass" : "fail") << ',' << (r.seed ? std::to_string(*r.seed) : "") << "\n";
  }
  return out.str();
}

std::string VerificationReport::timing_csv() const {
  std::ostringstream out;
  out << "task,object,quantity,wall_time\n";
  for (const ReportRow& r : rows)
    out << csv_field(r.task) << ',' << csv_field(r.object) << ',' << csv_field(r.quantity) << ',' << g17(r.wall_time)
        << "\n";
  return out.str();
}

// --- battery ------------------------------------------------------------------------------------

BatteryOptions BatteryOptions::scaled(double factor) const {
  BatteryOptions o = *this;
  auto scale = [&](auto& n) {
    n = std::max<std::remove_reference_t<decltype(n)>>(1, std::llround(static_cast<double>(n) * factor));
  };
  scale(o.tetra_paths);
  scale(o.euclidean_deformations);
  scale(o.random_families);
  scale(o.flex_volume_samples);
  scale(o.diagonal_trials);
  scale(o.crofton_samples);
  scale(o.steiner_samples);
  scale(o.tube_samples);
  scale(o.umbilic_points);
  scale(o.random_programs);
  scale(o.fuzz_inputs);
  return o;
}

bool CriterionResult::passed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

int criterion_count() { return static_cast<int>(std::size(kCriteria)); }

std::string criterion_key(int id) {
  if (id < 1 || id > criterion_count()) throw Error(ErrorKind::OutOfRange, "no criterion " + std::to_string(id));
  return kCriteria[id - 1].key;
}

CriterionResult run_criterion(int id, const BatteryOptions& options) {
  const std::string key = criterion_key(id);
  CriterionResult c;
  const double wall = seconds([&] { c = kCriteria[id - 1].run(options, criterion_seed(options, id)); });
  c.id = id;
  c.key = key;
  c.timings["total"] = wall;
  for (ReportRow& r : c.rows) {
    r.task = key;
    r.wall_time = wall / static_cast<double>(c.rows.size());
  }
  return c;
}

}  // namespace schlafli
