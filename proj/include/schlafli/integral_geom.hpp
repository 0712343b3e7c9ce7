#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "schlafli/surfaces.hpp"

namespace schlafli {

/// Convex body given by its boundary. Curvatures here use the unsigned
/// convex convention (positive principal curvatures for the round ball),
/// i.e. k_unsigned = curvature_sign * k_signed with the surfaces module's
/// B = -Dn.
struct ConvexBody {
  ParamSurface boundary;
  /// +1 when the boundary normal points out of the body.
  double outward = 1.0;
  double curvature_sign = -1.0;
  double area = 0.0;
  double volume = 0.0;
  /// M = integral of (k1 + k2) dA, unsigned.
  double mean_integral = 0.0;
  /// Integral of K_e dA (4 pi in E^3 by Gauss-Bonnet).
  double gauss_integral = 0.0;
};

/// Builds the body and checks the convexity certificate (K_e > 0 and H of
/// one sign at every point of the quadrature grid). Throws NotConvex.
ConvexBody make_convex_body(const ParamSurface& boundary, const IntegralOptions& options = {});

struct SteinerData {
  /// V_eps = sum_i coefficients[i] eps^i (degree 3 in E^3).
  std::vector<double> coefficients;
  /// Quermassintegrals, coefficients[i] = C(3, i) W_i.
  std::array<double, 4> W{};
  /// Crofton measures P_1 (lines) and P_2 (planes); P[0] is unused.
  std::array<double, 3> P{};

  double eval(double eps) const;
};

/// Steiner polynomial from the curvature integrals A, M and int K_e (E^3).
SteinerData steiner_from_curvature(const ConvexBody& body);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo volume of the eps-neighbourhood {x : dist(x, K) <= eps}.
/// Distances come from projection onto the boundary (grid seed, Newton
/// refinement in the chart).
McEstimate eps_volume_direct(const ConvexBody& body, double eps, long samples, std::uint64_t seed);

/// Measure of lines meeting K (invariant measure, E^3), so that
/// P_1 = (pi / 2) A.
McEstimate crofton_lines_mc(const ConvexBody& body, long samples, std::uint64_t seed);
/// Measure of planes meeting K (E^3), so that P_2 = M / 2.
McEstimate crofton_planes_mc(const ConvexBody& body, long samples, std::uint64_t seed);

struct CurvedCrofton {
  double P1 = 0.0, P2 = 0.0;
};
/// P_1 = (pi/2) A, P_2 = M/2 + K V in a 3-D space form.
CurvedCrofton p_functionals_curved(const ConvexBody& body);

/// Volume of the eps-neighbourhood of a convex body in H^3 (curvature -1),
/// from V''' = 4 V' + 8 pi:
/// V_eps = V + (A/2 + pi) sinh 2eps + (M/4)(cosh 2eps - 1) - 2 pi eps.
double tube_growth_h3(const ConvexBody& body, double eps);
/// Uncorrected variant, kept for comparison (it misses exact ball volumes):
/// V_eps = A sinh eps + 4 pi (eps - sinh eps) + M (cosh eps - 1) + V.
double tube_growth_h3_as_printed(const ConvexBody& body, double eps);

}  // namespace schlafli
