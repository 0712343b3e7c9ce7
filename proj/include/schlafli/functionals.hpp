#pragma once

#include <string>

#include "schlafli/exprlang.hpp"
#include "schlafli/surfaces.hpp"

namespace schlafli {

/// Sign table used throughout this header. The normal n is the outward
/// normal of the surface (catalog families are oriented that way), B = -Dn,
/// H = tr B, so a round sphere has H < 0, and f = <n, n> <dX/dt, n> is the
/// normal speed along n. With these signs:
///   2 P2   = int H dA - 2 eps K0 V
///   P2'    = -1/4 int <I', II - H I> dA     (any variation)
///   P2'    = -int f K_e dA                   (normal variations)
///   A'     = -int f H dA                     (normal variations)
/// The E^3 expanding unit sphere (P2 = -4 pi (1 + t), A = 4 pi (1 + t)^2)
/// fixes every sign in this table.
struct P2Value {
  double K0 = 0.0;
  double epsilon = 1.0;
  double area = 0.0;
  double volume = 0.0;
  double int_H = 0.0;  // signed
  double P2 = 0.0;

  double recompute() const { return 0.5 * (int_H - 2.0 * epsilon * K0 * volume); }
};

/// P2 of a closed surface in a 3-D space form or in de Sitter space (where
/// eps = -1 and V is the signed volume above the slice x0 = 0).
P2Value p2(const ParamSurface& surface, const IntegralOptions& options = {1e-10, 1e-12, 1, 6});

struct P2VariationResiduals {
  double dP2 = 0.0;          // finite difference of P2
  double general_rhs = 0.0;  // -1/4 int <I', II - H I>
  double general = 0.0;
  bool normal_generator = false;
  double normal_rhs = 0.0;  // -int f K_e
  double normal = 0.0;      // NaN when the generator is not normal
  double dA = 0.0;
  double area_rhs = 0.0;  // -int f H
  double area = 0.0;      // NaN when the generator is not normal
};

/// Residuals of the three variation formulas at time t, finite differences
/// with step h (Richardson with h/2). With `require_normal` a generator
/// with a tangential part throws NotNormalGenerator; otherwise the normal
/// identities are reported as NaN.
P2VariationResiduals p2_variation_residuals(const SurfaceFamily& family, double t, double h,
                                            bool require_normal = true);

struct AlexandrovReport {
  double area = 0.0;
  double sphere_radius = 0.0;
  double p2_surface = 0.0;
  double p2_sphere = 0.0;
  double difference = 0.0;  // p2_sphere - p2_surface
  double max_umbilic_gap = 0.0;  // max |k1 - k2| / max |k|
  bool equality = false;         // the surface is itself umbilic
};

/// Compares P2 of a strictly convex surface with P2 of the geodesic sphere
/// of the same area. Throws NotConvex, ModelViolation (de Sitter) or
/// NoMatchingSphere (S^3, area above the great-sphere area).
AlexandrovReport alexandrov_compare(const ParamSurface& surface);

/// Radius of the geodesic sphere with area A (r <= pi/2 R in S^3).
double sphere_radius_for_area(const SpaceForm& space, double area);
/// P2 of the geodesic sphere of radius r (outward normal).
double p2_sphere(const SpaceForm& space, double r);

enum class KeProportional { umbilic, not_applicable, counterexample };
std::string to_string(KeProportional k);

struct KeProportionalReport {
  KeProportional status = KeProportional::not_applicable;
  double ratio_spread = 0.0;     // (max - min) / |mean| of K_e / H
  double max_umbilic_gap = 0.0;  // max |k1 - k2| / max |k|
};

/// If K_e / H is constant to `tol` (relative) on a grid, checks that the
/// surface is umbilic to the same relative tolerance.
KeProportionalReport ke_proportional_check(const ParamSurface& surface, double tol);

struct UmbilicReport {
  double lhs = 0.0;  // S_bar / (m - 1) - S / (m + 1)
  double rhs = 0.0;  // H^2 / m
  double residual = 0.0;  // rhs - lhs
  bool equality = false;
  double k1 = 0.0, k2 = 0.0;
  double h2_residual = 0.0;    // 2 H2 - (S_bar - (m - 1)/(m + 1) S)
  double trace_residual = 0.0;  // H^2 - tr III - 2 H2
};

/// Pointwise umbilic inequality for a surface in a 3-D Riemannian space
/// form (m = 2). `tol` is the relative gap |k1 - k2| below which equality
/// is flagged.
UmbilicReport umbilic_inequality(const ParamSurface& surface, double u, double v, double tol = 1e-8);

/// Leaves t in [t0, t1]. For ball-type sweeps the leaf at t0 collapses to a
/// point and only the leaf at t1 bounds the domain.
struct FoliationSpec {
  SurfaceFamily family;
  double t0 = 0.0, t1 = 1.0;
  bool ball = false;
  int t_panels = 1;  // 16 Gauss-Legendre leaves per panel
  IntegralOptions options{1e-11, 1e-12, 1, 6};
};

struct FoliationReport {
  double volume = 0.0;
  double boundary_H = 0.0;  // int over the boundary of H, outward normal
  double int_H2 = 0.0, int_H2_minus_trIII = 0.0, int_S = 0.0;  // domain integrals
  double lhs_H2 = 0.0, rhs_H2 = 0.0, residual_H2 = 0.0;        // m K V = 2 int H2 + bdry
  double lhs_HSi = 0.0, rhs_HSi = 0.0, residual_HSi = 0.0;     // m K V = int (H^2 - tr III) + bdry
  double lhs_S = 0.0, rhs_S = 0.0, residual_S = 0.0;           // m^2 K V = int S + bdry
  bool minimal_leaves = false;
  /// For minimal leaves with K > 0: lhs_HSi - rhs_HSi, positive when no such
  /// foliation can exist. Zero otherwise.
  double obstruction_margin = 0.0;
  bool injective = true;
};

/// Throws NonInjectiveSweep when the normal speed changes sign, unless the
/// leaves are minimal in a positively curved space: that sweep is reported
/// (injective = false) with its obstruction margin.
FoliationReport foliation_identities(const FoliationSpec& spec);

/// Ball of radius R swept by the concentric spheres of radius R (1 + t),
/// t in [-1, 0].
FoliationSpec concentric_ball_foliation(const SpaceForm& space, double R);
/// Shell R0 <= r <= R1 swept by concentric spheres.
FoliationSpec concentric_shell_foliation(const SpaceForm& space, double R0, double R1);
/// Great spheres of S^3 rotated by angles t in [0, angle]: every leaf is
/// minimal, and the sweep is not injective.
FoliationSpec rotating_great_spheres(const SpaceForm& space, double angle);

struct WarpedProductSpec {
  double k = 0.0;        // curvature of the base
  double k_prime = 0.0;  // Einstein constant of the product
  ExprProgram warp;      // f(t)
  ParamMap params;
  double t0 = 0.0, t1 = 1.0;
  int samples = 200;
};

struct WarpedResiduals {
  double ode = 0.0;        // max |f'' + k' f|
  double first_integral = 0.0;  // max |k - k' f^2 - f'^2|
};

/// Max-norm residuals on the interior grid t0 + i (t1 - t0) / (samples + 1).
/// Throws NonPositiveWarp when f <= 0 there.
WarpedResiduals warped_einstein_check(const WarpedProductSpec& spec);

/// The three model warps: "sphere" (sin t, k = k' = 1), "cone" (t, k = 1,
/// k' = 0) and "hyperbolic" (cosh t, k = k' = -1).
WarpedProductSpec warp_catalog(const std::string& name);

}  // namespace schlafli
