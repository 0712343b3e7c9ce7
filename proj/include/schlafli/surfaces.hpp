#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "schlafli/exprlang.hpp"
#include "schlafli/jet.hpp"
#include "schlafli/spaceform.hpp"

namespace schlafli {

using TaylorVec = std::vector<Taylor>;

/// Embedding (u, v, t) -> ambient coordinates, evaluated on Taylor jets so
/// that chart and time derivatives come out exactly.
using ChartMap = std::function<TaylorVec(const Taylor& u, const Taylor& v, const Taylor& t)>;
/// Scalar function on the chart, e.g. a radial graph rho(u, v, t).
using ChartScalar = std::function<Taylor(const Taylor& u, const Taylor& v, const Taylor& t)>;

struct ChartDomain {
  double u0 = 0.0, u1 = 0.0, v0 = 0.0, v1 = 0.0;
  bool periodic_u = false, periodic_v = false;
  /// u is a polar angle on [0, pi]: crossing u = 0 or pi continues at v + pi.
  bool polar = false;

  /// Polar-angle / azimuth chart of the round 2-sphere.
  static ChartDomain sphere();
};

/// Star-shaped description: the surface is {exp_c(rho(u, v) * omega(u, v))}
/// with omega the unit sphere chart at the center (for de Sitter, rho is the
/// signed time above the slice x0 = 0 and omega the spatial direction).
struct RadialGraph {
  AmbientPoint center;
  Eigen::MatrixXd basis;  // tangent frame at the center
  ChartScalar rho;
};

/// A one-parameter family t -> Sigma_t on a fixed chart domain. Static
/// surfaces are families that ignore t.
class SurfaceFamily {
 public:
  SurfaceFamily(SpaceForm space, ChartMap map, ChartDomain domain, std::string name = "surface");

  const SpaceForm& space() const noexcept { return space_; }
  const ChartDomain& domain() const noexcept { return domain_; }
  const std::string& name() const noexcept { return name_; }
  bool closed() const noexcept { return closed_; }
  /// +1 keeps the raw cross-product normal, -1 flips it.
  double orientation() const noexcept { return orientation_; }
  const std::optional<RadialGraph>& radial() const noexcept { return radial_; }
  /// Center used by the radial volume method.
  const std::optional<AmbientPoint>& center() const noexcept { return center_; }

  SurfaceFamily& set_closed(bool closed) {
    closed_ = closed;
    return *this;
  }
  SurfaceFamily& set_orientation(double sign) {
    orientation_ = sign < 0 ? -1.0 : 1.0;
    return *this;
  }
  SurfaceFamily& set_radial(RadialGraph graph);
  SurfaceFamily& set_center(AmbientPoint center) {
    center_ = std::move(center);
    return *this;
  }
  /// Chooses the orientation so the normal points away from the center
  /// (Riemannian) or to the future (de Sitter), judged at a chart point.
  SurfaceFamily& orient_outward(double t = 0.0);
  /// Orders of differentiation the map spends internally (e.g. normal flows
  /// differentiate their base once); jets are seeded that much higher.
  int jet_loss() const noexcept { return jet_loss_; }
  SurfaceFamily& set_jet_loss(int loss) {
    jet_loss_ = loss;
    return *this;
  }

  TaylorVec eval(const Taylor& u, const Taylor& v, const Taylor& t) const { return map_(u, v, t); }
  AmbientPoint point(double u, double v, double t) const;

 private:
  SpaceForm space_;
  ChartMap map_;
  ChartDomain domain_;
  std::string name_;
  bool closed_ = false;
  double orientation_ = 1.0;
  int jet_loss_ = 0;
  std::optional<RadialGraph> radial_;
  std::optional<AmbientPoint> center_;
};

/// The family frozen at one time.
struct ParamSurface {
  SurfaceFamily family;
  double t = 0.0;

  const SpaceForm& space() const noexcept { return family.space(); }
  const ChartDomain& domain() const noexcept { return family.domain(); }
};

inline ParamSurface at_time(const SurfaceFamily& family, double t) { return {family, t}; }

// --- catalog ------------------------------------------------------------------

/// Geodesic sphere of radius r0 + rate * t about `center` (normal coordinates).
SurfaceFamily sphere_family(const SpaceForm& space, double r0, double rate = 0.0,
                            const Eigen::Vector3d& center = Eigen::Vector3d::Zero());
/// Geodesic radial graph with rho(omega) = scale(t) / sqrt(sum omega_i^2 / a_i^2);
/// in E^3 an axis-aligned ellipsoid. scale(t) = 1 + rate * t.
SurfaceFamily ellipsoid_radial(const SpaceForm& space, double a, double b, double c, double rate = 0.0);
/// Radial graph rho = r0 * (1 + amp * (a . omega)(b . omega)...) with a
/// smooth low-degree perturbation fixed by `seed`.
SurfaceFamily perturbed_sphere(const SpaceForm& space, double r0, double amp, std::uint64_t seed);
/// Radial graph about the origin given by an arbitrary chart scalar.
SurfaceFamily radial_family(const SpaceForm& space, ChartScalar rho, std::string name = "radial");
/// Torus of revolution in E^3 (tube radius r about a circle of radius R).
SurfaceFamily torus(double R, double r);
/// Flat patch z = 0, (u, v) in [-1, 1]^2, in E^3.
SurfaceFamily plane_patch();
/// de Sitter slice x0 = R sinh((s0 + rate t)/R), optionally tilted by
/// amp * omega_z (still space-like for small amp).
SurfaceFamily de_sitter_slice(const SpaceForm& space, double s0, double rate = 1.0, double amp = 0.0);

enum class ChartMode {
  ambient,  // program yields ambient coordinates on the model
  normal,   // program yields normal coordinates about origin(space)
  radial,   // program yields rho(u, v, t) over the sphere chart
};
/// Chart given by an exprlang program.
SurfaceFamily expr_family(const SpaceForm& space, const ExprProgram& program, ChartMode mode,
                          const ParamMap& params = {}, std::optional<ChartDomain> domain = std::nullopt);

/// Normal flow X_t = exp_X(t * f * n) with f a chart scalar.
SurfaceFamily normal_flow(const ParamSurface& base, ChartScalar f, std::string name = "normal-flow");
/// Rigid rotation by angle rate * t in the (i, j) ambient coordinate plane
/// (a boost when one index is the time-like coordinate).
SurfaceFamily rigid_motion(const ParamSurface& base, int i, int j, double rate = 1.0);
/// Reparametrization u -> u + t * g(u, v): a purely tangential generator.
SurfaceFamily tangential_slide(const ParamSurface& base, ChartScalar g);

// --- pointwise geometry -----------------------------------------------------

/// Pointwise extrinsic data. B = I^-1 II with BX = -D_X n, so a round
/// sphere with outward normal has B = -Id / r.
struct FormsAt {
  double u = 0.0, v = 0.0;
  AmbientPoint point;
  Eigen::VectorXd normal;
  double normal_sign = 1.0;  // <n, n>
  Eigen::Matrix2d I, II, III, B;
  double H = 0.0, H2 = 0.0, Ke = 0.0;
  double k1 = 0.0, k2 = 0.0;  // k1 <= k2
  double area_element = 0.0;
  /// Intrinsic scalar curvature 2 * (Gauss curvature of I), from the metric
  /// jets. NaN when the chart map carries fewer than three orders.
  double S_intrinsic = 0.0;
  /// Normal speed f = <n, n> <dX/dt, n> and tangential speed |dX/dt - f n|.
  double normal_speed = 0.0, tangential_speed = 0.0;
};

FormsAt fundamental_forms(const ParamSurface& surface, double u, double v);

/// <A, B> = tr(I^-1 A I^-1 B) on symmetric 2-tensors.
double tensor_inner(const Eigen::Matrix2d& I, const Eigen::Matrix2d& A, const Eigen::Matrix2d& B);

// --- integrals and volumes ---------------------------------------------------

struct IntegralOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  int min_level = 1;
  int max_level = 6;
};

/// Tensor Gauss–Legendre (16 points per panel, 2^level panels per axis),
/// refined until the change is at most rel_tol relative to the integral of
/// |field| (or at most abs_tol). Throws NoConvergence.
double surface_integral(const ParamSurface& surface, const std::function<double(const FormsAt&)>& field,
                        const IntegralOptions& options = {});
Eigen::VectorXd surface_integrals(const ParamSurface& surface,
                                  const std::function<Eigen::VectorXd(const FormsAt&)>& fields, int count,
                                  const IntegralOptions& options = {});

enum class VolumeMethod { radial, mc, divergence };

struct VolumeResult {
  double value = 0.0;
  double error_bound = 0.0;
};

struct VolumeOptions {
  VolumeMethod method = VolumeMethod::radial;
  long samples = 200000;
  std::uint64_t seed = 1;
  double rel_tol = 1e-11;
};

/// Volume bounded by a closed surface. For de Sitter surfaces the value is
/// the signed volume between the slice x0 = 0 and the surface.
VolumeResult enclosed_volume(const ParamSurface& surface, const VolumeOptions& options = {});

/// True when `p` lies inside a surface with a radial graph description.
bool radial_inside(const ParamSurface& surface, const AmbientPoint& p);

// --- variations --------------------------------------------------------------

struct VariationAt {
  double u = 0.0, v = 0.0;
  Eigen::Matrix2d I_dot, II_dot;
  double H_dot = 0.0;
  double V_dot = std::numeric_limits<double>::quiet_NaN();
  double A_dot = std::numeric_limits<double>::quiet_NaN();
};

/// Chart-fixed central differences in t (step h, Richardson with h/2).
VariationAt variation_at(const SurfaceFamily& family, double t, double h, double u, double v);
/// Same derivatives taken from the time jets of the chart map.
VariationAt variation_at_jet(const SurfaceFamily& family, double t, double u, double v);

/// V'(t) by differencing enclosed_volume and A'(t) by differencing area.
struct GlobalRates {
  double V_dot = 0.0, A_dot = 0.0;
  double error = 0.0;
};
GlobalRates global_rates(const SurfaceFamily& family, double t, double h);

struct SchlafliReport {
  double lhs = 0.0;            // eps * m * K * V' (= S/(m+1) V' when Riemannian)
  double int_H_dot = 0.0;      // integral of H'
  double int_half_IdotII = 0.0;  // integral of (1/2)<I', II>
  double rhs = 0.0;
  double V_dot = 0.0;
  double residual = 0.0;
  double error_budget = 0.0;
};

SchlafliReport schlafli_residual_smooth(const SurfaceFamily& family, double t, double h);

struct NormalVariationResidual {
  double I_residual = 0.0;   // max |I' + 2 f II|
  double II_residual = 0.0;  // max |II' - (eps H_f - f <R(n,.)n,.> - f III)|
  double f = 0.0;
  Eigen::Matrix2d hessian_f;
};

NormalVariationResidual normal_variation_identities(const SurfaceFamily& family, double t, double h, double u,
                                                    double v);

enum class IsometricClass { flat, low_rank_ok, must_vanish, inconsistent };
std::string to_string(IsometricClass c);

/// Linear system of the first-order Gauss constraint for a diagonal II
/// (k_p II'_qr = 0 for distinct p, q, r and k_p II'_qq + k_q II'_pp = 0).
/// Unknowns are the upper-triangular entries of II'.
Eigen::MatrixXd isometric_constraint_matrix(const Eigen::VectorXd& k);

IsometricClass classify_isometric_variation(const Eigen::MatrixXd& II, const Eigen::MatrixXd& IIprime,
                                            double tol = 1e-9);

/// Parallel surface exp_X(eps * n). Throws FocalCrossing when some point
/// reaches a focal point (cs(eps) - k_i sn(eps) <= 0 on the sampled grid).
ParamSurface parallel_surface(const ParamSurface& surface, double eps);

/// Taylor-jet exponential map exp_p(v) = C(K<v,v>) p + S(K<v,v>) v.
TaylorVec exp_jet(const SpaceForm& space, const TaylorVec& p, const TaylorVec& v);

}  // namespace schlafli
