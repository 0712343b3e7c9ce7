#include "schlafli/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schlafli/error.hpp"
#include "schlafli/integral_geom.hpp"
#include "schlafli/quadrature.hpp"

namespace schlafli {

using Eigen::Matrix2d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_surface_space(const SpaceForm& space) {
  if (space.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "surface functionals need a 3-D space form");
}

void require_riemannian(const SpaceForm& space, const char* what) {
  require_surface_space(space);
  if (space.signature() != Signature::riemannian) throw Error(ErrorKind::ModelViolation, what);
}

VolumeOptions volume_options_for(const ParamSurface& s) {
  VolumeOptions o;
  if (s.space().is_flat() && !s.family.radial()) o.method = VolumeMethod::divergence;
  return o;
}

/// Interior sample grid of the chart, away from the edges of polar charts.
template <class F>
void for_grid(const ChartDomain& d, int nu, int nv, F&& f) {
  for (int i = 0; i < nu; ++i)
    for (int k = 0; k < nv; ++k)
      f(d.u0 + (d.u1 - d.u0) * (i + 0.5) / nu, d.v0 + (d.v1 - d.v0) * (k + 0.5) / nv);
}

double max_abs_k(const FormsAt& f) { return std::max(std::abs(f.k1), std::abs(f.k2)); }

/// k2 - k1 from the traceless part of B; the eigenvalue route loses half the
/// digits near an umbilic.
double umbilic_gap(const FormsAt& f) {
  const Eigen::Matrix2d B0 = f.B - 0.5 * f.H * Eigen::Matrix2d::Identity();
  return std::sqrt(2.0 * std::max(0.0, (B0 * B0).trace()));
}

/// Integral of H at a fixed quadrature level (so time differences see no
/// change of rule).
double int_H_at_level(const SurfaceFamily& family, double t, int level) {
  IntegralOptions o;
  o.min_level = level - 1;
  o.max_level = level;
  o.abs_tol = std::numeric_limits<double>::infinity();
  return surface_integral({family, t}, [](const FormsAt& f) { return f.H; }, o);
}

int converged_level(const SurfaceFamily& family, double t, double rel_tol) {
  for (int level = 2; level <= 6; ++level) {
    IntegralOptions o;
    o.rel_tol = rel_tol;
    o.min_level = level - 1;
    o.max_level = level;
    try {
      surface_integral({family, t}, [](const FormsAt& f) { return f.H; }, o);
      return level;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
    }
  }
  throw Error(ErrorKind::NoConvergence, "mean curvature integral did not converge");
}

}  // namespace

// --- P2 --------------------------------------------------------------------------------

P2Value p2(const ParamSurface& surface, const IntegralOptions& options) {
  require_surface_space(surface.space());
  if (!surface.family.closed()) throw Error(ErrorKind::NotClosed, "P2 needs a closed surface");
  const SpaceForm& space = surface.space();
  const VectorXd ints = surface_integrals(
      surface, [](const FormsAt& f) { return Eigen::Vector2d(1.0, f.H); }, 2, options);
  P2Value r;
  r.K0 = space.curvature();
  r.epsilon = space.epsilon();
  r.area = ints[0];
  r.int_H = ints[1];
  if (r.K0 != 0.0) {
    r.volume = enclosed_volume(surface, volume_options_for(surface)).value;
  } else {
    try {
      r.volume = enclosed_volume(surface, volume_options_for(surface)).value;
    } catch (const Error&) {
      r.volume = kNaN;  // not needed in flat space
    }
  }
  r.P2 = r.K0 == 0.0 ? 0.5 * r.int_H : r.recompute();
  return r;
}

P2VariationResiduals p2_variation_residuals(const SurfaceFamily& family, double t, double h, bool require_normal) {
  require_surface_space(family.space());
  if (!(h > 0)) throw Error(ErrorKind::OutOfRange, "difference step must be positive");
  const SpaceForm& space = family.space();
  const ParamSurface s{family, t};

  double max_tangential = 0.0, max_speed = 0.0;
  IntegralOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-10;
  const VectorXd ints = surface_integrals(
      s,
      [&](const FormsAt& f) {
        const VariationAt var = variation_at(family, t, h, f.u, f.v);
        max_tangential = std::max(max_tangential, f.tangential_speed);
        max_speed = std::max({max_speed, std::abs(f.normal_speed), f.tangential_speed});
        Eigen::Vector3d out;
        out[0] = -0.25 * tensor_inner(f.I, var.I_dot, f.II - f.H * f.I);
        out[1] = -f.normal_speed * f.Ke;
        out[2] = -f.normal_speed * f.H;
        return VectorXd(out);
      },
      3, opt);
  const bool normal = max_tangential <= 1e-10 * std::max(1.0, max_speed);
  if (require_normal && !normal) throw Error(ErrorKind::NotNormalGenerator, "generator has a tangential component");

  const int level = converged_level(family, t, 1e-12);
  auto int_H = [&](double tt) { return int_H_at_level(family, tt, level); };
  const double d1 = (int_H(t + h) - int_H(t - h)) / (2 * h);
  const double d2 = (int_H(t + 0.5 * h) - int_H(t - 0.5 * h)) / h;
  const double dIntH = (4 * d2 - d1) / 3;
  const GlobalRates g = global_rates(family, t, h);
  const double K0 = space.curvature();

  P2VariationResiduals r;
  r.dP2 = 0.5 * dIntH - space.epsilon() * K0 * (K0 == 0.0 ? 0.0 : g.V_dot);
  r.general_rhs = ints[0];
  r.general = r.dP2 - r.general_rhs;
  r.normal_generator = normal;
  r.dA = g.A_dot;
  r.normal_rhs = ints[1];
  r.area_rhs = ints[2];
  r.normal = normal ? r.dP2 - r.normal_rhs : kNaN;
  r.area = normal ? r.dA - r.area_rhs : kNaN;
  return r;
}

// --- Alexandrov comparison ---------------------------------------------------------------

double sphere_radius_for_area(const SpaceForm& space, double area) {
  require_riemannian(space, "geodesic spheres are compared in Riemannian space forms");
  if (!(area > 0)) throw Error(ErrorKind::OutOfRange, "area must be positive");
  if (space.is_flat()) return std::sqrt(area / (4 * kPi));
  double hi;
  if (space.curvature() > 0) {
    hi = 0.5 * kPi * space.radius();
    if (area > sphere_area(space, hi) * (1 + 1e-14))
      throw Error(ErrorKind::NoMatchingSphere, "area exceeds the area of a great sphere");
  } else {
    hi = space.radius();
    while (sphere_area(space, hi) < area) hi *= 2;
  }
  double lo = 0.0;
  for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sphere_area(space, mid) < area ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int i = 0; i < 20; ++i) {
    const double slope = 8 * kPi * space.sn(r) * space.cs(r);
    if (!(slope > 0)) break;
    const double step = (sphere_area(space, r) - area) / slope;
    r -= step;
    if (std::abs(step) <= 1e-15 * r) break;
  }
  if (std::abs(sphere_area(space, r) - area) > 1e-10 * area)
    throw Error(ErrorKind::NoConvergence, "sphere radius search did not converge");
  return r;
}

double p2_sphere(const SpaceForm& space, double r) {
  require_riemannian(space, "geodesic spheres are compared in Riemannian space forms");
  const double sn = space.sn(r), cs = space.cs(r);
  return -4 * kPi * sn * cs - space.curvature() * ball_volume_closed(space, r);
}

AlexandrovReport alexandrov_compare(const ParamSurface& surface) {
  require_riemannian(surface.space(), "Alexandrov comparison is stated for Riemannian space forms");
  const SpaceForm& space = surface.space();
  const ConvexBody body = make_convex_body(surface);
  AlexandrovReport r;
  r.area = body.area;
  r.p2_surface = -0.5 * body.mean_integral - space.curvature() * body.volume;
  r.sphere_radius = sphere_radius_for_area(space, body.area);
  r.p2_sphere = p2_sphere(space, r.sphere_radius);
  r.difference = r.p2_sphere - r.p2_surface;
  double gap = 0.0, scale = 0.0;
  for_grid(surface.domain(), 24, 48, [&](double u, double v) {
    const FormsAt f = fundamental_forms(surface, u, v);
    gap = std::max(gap, umbilic_gap(f));
    scale = std::max(scale, max_abs_k(f));
  });
  r.max_umbilic_gap = gap / scale;
  r.equality = r.max_umbilic_gap <= 1e-7;
  return r;
}

// --- K_e proportional to H ----------------------------------------------------------------

std::string to_string(KeProportional k) {
  switch (k) {
    case KeProportional::umbilic: return "umbilic";
    case KeProportional::not_applicable: return "not_applicable";
    case KeProportional::counterexample: return "counterexample";
  }
  return "?";
}

KeProportionalReport ke_proportional_check(const ParamSurface& surface, double tol) {
  require_riemannian(surface.space(), "the K_e = kH criterion is stated for Riemannian space forms");
  make_convex_body(surface);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0, gap = 0.0, scale = 0.0;
  int n = 0;
  for_grid(surface.domain(), 24, 48, [&](double u, double v) {
    const FormsAt f = fundamental_forms(surface, u, v);
    const double ratio = f.Ke / f.H;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    sum += ratio;
    ++n;
    gap = std::max(gap, umbilic_gap(f));
    scale = std::max(scale, max_abs_k(f));
  });
  KeProportionalReport r;
  r.ratio_spread = (hi - lo) / std::abs(sum / n);
  r.max_umbilic_gap = gap / scale;
  if (r.ratio_spread > tol) r.status = KeProportional::not_applicable;
  else r.status = r.max_umbilic_gap <= 10 * tol ? KeProportional::umbilic : KeProportional::counterexample;
  return r;
}

// --- umbilic inequality ---------------------------------------------------------------------

UmbilicReport umbilic_inequality(const ParamSurface& surface, double u, double v, double tol) {
  require_riemannian(surface.space(), "the umbilic inequality is stated for Riemannian space forms");
  const SpaceForm& space = surface.space();
  const FormsAt f = fundamental_forms(surface, u, v);
  const double m = space.m();
  const double S = space.scalar_curvature();
  const double Sbar = f.S_intrinsic;
  UmbilicReport r;
  r.lhs = Sbar / (m - 1) - S / (m + 1);
  r.rhs = f.H * f.H / m;
  r.residual = r.rhs - r.lhs;
  r.k1 = f.k1;
  r.k2 = f.k2;
  r.equality = umbilic_gap(f) <= tol * std::max(1.0, max_abs_k(f));
  r.h2_residual = 2 * f.H2 - (Sbar - (m - 1) / (m + 1) * S);
  r.trace_residual = f.H * f.H - (f.I.inverse() * f.III).trace() - 2 * f.H2;
  return r;
}

// --- foliations -------------------------------------------------------------------------

FoliationReport foliation_identities(const FoliationSpec& spec) {
  const SpaceForm& space = spec.family.space();
  require_riemannian(space, "foliation identities are implemented for Riemannian space forms");
  if (!(spec.t1 > spec.t0)) throw Error(ErrorKind::OutOfRange, "leaf interval is empty");

  double f_min = std::numeric_limits<double>::infinity(), f_max = -f_min, H_max = 0.0, H_scale = 0.0;
  auto leaf = [&](double t) {
    return surface_integrals(
        {spec.family, t},
        [&](const FormsAt& f) {
          const double s = f.normal_speed;
          f_min = std::min(f_min, s);
          f_max = std::max(f_max, s);
          H_max = std::max(H_max, std::abs(f.H));
          H_scale = std::max(H_scale, std::sqrt(std::abs(f.Ke)) + std::sqrt(f.I.trace() > 0 ? 1.0 / f.I.trace() : 0.0));
          const double w = std::abs(s);
          const double trIII = (f.I.inverse() * f.III).trace();
          VectorXd out(4);
          out << w, 2 * f.H2 * w, (f.H * f.H - trIII) * w, f.S_intrinsic * w;
          return out;
        },
        4, spec.options);
  };

  VectorXd bulk = VectorXd::Zero(4);
  const auto& gl = gauss_legendre(16);
  const double width = (spec.t1 - spec.t0) / spec.t_panels;
  for (int p = 0; p < spec.t_panels; ++p) {
    const double lo = spec.t0 + p * width;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
      bulk += 0.5 * width * gl.weights[i] * leaf(lo + 0.5 * width * (gl.nodes[i] + 1.0));
  }

  IntegralOptions bopt = spec.options;
  auto int_H = [&](double t) { return surface_integral({spec.family, t}, [](const FormsAt& f) { return f.H; }, bopt); };
  const double outer = int_H(spec.t1);
  const double inner = spec.ball ? 0.0 : int_H(spec.t0);

  FoliationReport r;
  r.injective = f_min > 0 || f_max < 0;
  const double sgn = f_min + f_max >= 0 ? 1.0 : -1.0;
  r.volume = bulk[0];
  r.int_H2 = bulk[1];
  r.int_H2_minus_trIII = bulk[2];
  r.int_S = bulk[3];
  r.boundary_H = sgn * (outer - inner);
  const double m = space.m(), K = space.curvature();
  r.lhs_H2 = r.lhs_HSi = m * K * r.volume;
  r.rhs_H2 = r.int_H2 + r.boundary_H;
  r.rhs_HSi = r.int_H2_minus_trIII + r.boundary_H;
  r.lhs_S = m * m * K * r.volume;
  r.rhs_S = r.int_S + r.boundary_H;
  r.residual_H2 = r.lhs_H2 - r.rhs_H2;
  r.residual_HSi = r.lhs_HSi - r.rhs_HSi;
  r.residual_S = r.lhs_S - r.rhs_S;
  r.minimal_leaves = H_max <= 1e-9 * std::max(1.0, H_scale);
  if (r.minimal_leaves && K > 0) r.obstruction_margin = r.lhs_HSi - r.rhs_HSi;
  if (!r.injective && !(r.minimal_leaves && K > 0))
    throw Error(ErrorKind::NonInjectiveSweep, "normal speed of the leaves changes sign");
  return r;
}

FoliationSpec concentric_ball_foliation(const SpaceForm& space, double R) {
  if (!(R > 0)) throw Error(ErrorKind::OutOfRange, "radius must be positive");
  // leaves t in [-1, 0] so that the family is regular at t = 0
  const SurfaceFamily fam = radial_family(
      space, [R](const Taylor&, const Taylor&, const Taylor& t) { return R * (1.0 + t); }, "concentric-spheres");
  FoliationSpec spec{fam, -1.0, 0.0, true};
  return spec;
}

FoliationSpec concentric_shell_foliation(const SpaceForm& space, double R0, double R1) {
  if (!(R0 > 0 && R1 > R0)) throw Error(ErrorKind::OutOfRange, "shell radii must satisfy 0 < R0 < R1");
  FoliationSpec spec{sphere_family(space, R0, R1 - R0)};
  return spec;
}

FoliationSpec rotating_great_spheres(const SpaceForm& space, double angle) {
  if (space.model() != Model::spherical) throw Error(ErrorKind::ModelViolation, "great spheres live in S^3");
  const SurfaceFamily equator = sphere_family(space, 0.5 * kPi * space.radius());
  FoliationSpec spec{rigid_motion({equator, 0.0}, 0, 1, 1.0)};
  spec.t1 = angle;
  return spec;
}

// --- warped products ------------------------------------------------------------------------

WarpedResiduals warped_einstein_check(const WarpedProductSpec& spec) {
  if (spec.samples < 1 || !(spec.t1 > spec.t0)) throw Error(ErrorKind::OutOfRange, "empty sample grid");
  WarpedResiduals r;
  for (int i = 1; i <= spec.samples; ++i) {
    const double t = spec.t0 + (spec.t1 - spec.t0) * i / (spec.samples + 1.0);
    const Taylor f = spec.warp.eval_taylor(Taylor(0.0), Taylor(0.0), Taylor::variable(Taylor::T, t, 2), spec.params)[0];
    const double f0 = f.value(), f1 = f.derivative(0, 0, 1), f2 = f.derivative(0, 0, 2);
    if (!(f0 > 0)) throw Error(ErrorKind::NonPositiveWarp, "warp function is not positive at t = " + std::to_string(t));
    r.ode = std::max(r.ode, std::abs(f2 + spec.k_prime * f0));
    r.first_integral = std::max(r.first_integral, std::abs(spec.k - spec.k_prime * f0 * f0 - f1 * f1));
  }
  return r;
}

WarpedProductSpec warp_catalog(const std::string& name) {
  if (name == "sphere") return {1.0, 1.0, ExprProgram::parse("sin(t)"), {}, 0.0, kPi, 200};
  if (name == "cone") return {1.0, 0.0, ExprProgram::parse("t"), {}, 0.0, 2.0, 200};
  if (name == "hyperbolic") return {-1.0, -1.0, ExprProgram::parse("cosh(t)"), {}, -1.5, 1.5, 200};
  throw Error(ErrorKind::SceneError, "unknown warp '" + name + "'");
}

}  // namespace schlafli
