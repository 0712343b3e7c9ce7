#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace schlafli {

enum class Signature { riemannian, lorentzian };

enum class Model { euclidean, spherical, hyperbolic, de_sitter };

/// Ambient constant-curvature space of dimension m+1.
///
/// Curved models are quadrics in a flat space of one more dimension:
///   spherical   {x : |x|^2 = 1/K}                       (Euclidean form)
///   hyperbolic  {x : <x,x> = 1/K, x0 > 0}               (form -x0^2 + ...)
///   de Sitter   {x : <x,x> = 1/K}                       (form -x0^2 + ...)
/// Euclidean space uses plain coordinates.
class SpaceForm {
 public:
  SpaceForm(int dim, double curvature, Signature signature = Signature::riemannian);

  static SpaceForm euclidean(int dim = 3) { return {dim, 0.0}; }
  static SpaceForm sphere(int dim = 3, double curvature = 1.0) { return {dim, curvature}; }
  static SpaceForm hyperbolic(int dim = 3, double curvature = -1.0) { return {dim, curvature}; }
  static SpaceForm de_sitter(int dim = 3, double curvature = 1.0) {
    return {dim, curvature, Signature::lorentzian};
  }

  int dim() const noexcept { return dim_; }
  int m() const noexcept { return dim_ - 1; }
  double curvature() const noexcept { return curvature_; }
  Signature signature() const noexcept { return signature_; }
  Model model() const noexcept;
  bool is_flat() const noexcept { return curvature_ == 0.0; }

  /// S = m(m+1)K.
  double scalar_curvature() const noexcept { return m() * (m() + 1.0) * curvature_; }
  /// +1 Riemannian, -1 Lorentzian.
  double epsilon() const noexcept { return signature_ == Signature::riemannian ? 1.0 : -1.0; }
  /// 1/sqrt|K| (infinite for flat space).
  double radius() const noexcept;
  int ambient_dim() const noexcept { return is_flat() ? dim_ : dim_ + 1; }
  /// True when the flat ambient form is -x0^2 + x1^2 + ...
  bool minkowski_ambient() const noexcept { return model() == Model::hyperbolic || model() == Model::de_sitter; }

  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// Diagonal of the ambient quadratic form.
  Eigen::VectorXd form_diagonal() const;

  /// "E3", "S3", "H3", "dS3" style label.
  std::string name() const;

  /// Generalized sine sn_K(r): r, sin(sqrt(K) r)/sqrt(K), sinh(sqrt(-K) r)/sqrt(-K).
  double sn(double r) const;
  double cs(double r) const;

  friend bool operator==(const SpaceForm&, const SpaceForm&) = default;

 private:
  int dim_;
  double curvature_;
  Signature signature_;
};

/// A point in ambient coordinates (length m+1 for flat space, m+2 otherwise).
class AmbientPoint {
 public:
  AmbientPoint() = default;
  explicit AmbientPoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {}
  AmbientPoint(std::initializer_list<double> coords);

  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  int size() const noexcept { return static_cast<int>(coords_.size()); }

 private:
  Eigen::VectorXd coords_;
};

/// Tangent vector at a base point, in ambient components.
class TangentVector {
 public:
  TangentVector() = default;
  TangentVector(AmbientPoint base, Eigen::VectorXd components)
      : base_(std::move(base)), components_(std::move(components)) {}

  const AmbientPoint& base() const noexcept { return base_; }
  const Eigen::VectorXd& components() const noexcept { return components_; }

 private:
  AmbientPoint base_;
  Eigen::VectorXd components_;
};

/// Throws ModelViolation unless |<x,x> - 1/K| <= 1e-12 (scaled), plus the
/// hyperboloid sheet condition.
void validate_point(const SpaceForm& space, const AmbientPoint& p);
/// Throws ModelViolation unless v is tangent at its base point.
void validate_tangent(const SpaceForm& space, const TangentVector& v);
bool is_valid_point(const SpaceForm& space, const AmbientPoint& p, double tol = 1e-12);

/// Pulls a nearby ambient vector back onto the model quadric.
AmbientPoint project(const SpaceForm& space, const Eigen::VectorXd& x);
/// Removes the component of v along the position (curved models).
Eigen::VectorXd project_tangent(const SpaceForm& space, const AmbientPoint& p, const Eigen::VectorXd& v);

/// Canonical base point: the origin, e0 * R, or the de Sitter point e1 * R.
AmbientPoint origin(const SpaceForm& space);
/// Orthonormal basis of the tangent space at p (columns).
Eigen::MatrixXd tangent_basis(const SpaceForm& space, const AmbientPoint& p);

double distance(const SpaceForm& space, const AmbientPoint& p, const AmbientPoint& q);

/// Point at arclength t along the geodesic from p with unit initial velocity v.
AmbientPoint geodesic_eval(const SpaceForm& space, const AmbientPoint& p, const TangentVector& v, double t);
/// Exponential map for an arbitrary tangent vector (no unit-length requirement).
AmbientPoint exp_map(const SpaceForm& space, const AmbientPoint& p, const Eigen::VectorXd& v);
/// Inverse of exp_map within the injectivity radius.
Eigen::VectorXd log_map(const SpaceForm& space, const AmbientPoint& p, const AmbientPoint& q);

/// Riemannian normal coordinates about origin(space): exp_origin(sum w_i b_i).
AmbientPoint from_normal_coords(const SpaceForm& space, const Eigen::VectorXd& w);
Eigen::VectorXd to_normal_coords(const SpaceForm& space, const AmbientPoint& p);

/// Model isometry x -> L x + b (b = 0 for curved models).
struct Isometry {
  Eigen::MatrixXd linear;
  Eigen::VectorXd translation;

  AmbientPoint apply(const AmbientPoint& p) const {
    return AmbientPoint(linear * p.coords() + translation);
  }
  Eigen::VectorXd apply_vector(const Eigen::VectorXd& v) const { return linear * v; }
};

/// Random orientation-preserving isometry (rotation; Lorentz boost composed
/// with a rotation on the Minkowski models; plus a translation in E^n).
Isometry random_isometry(const SpaceForm& space, std::uint64_t seed, double boost_scale = 0.5);

// --- region volumes ---------------------------------------------------------

/// Geodesic ball about `center` (chart "polar").
struct PolarChart {
  AmbientPoint center;
  double radius = 0.0;
};
/// Coordinate box in Euclidean space (chart "ambient-box").
struct AmbientBoxChart {
  Eigen::VectorXd lo, hi;
};
/// de Sitter band between the slices at signed time s_min..s_max from the
/// totally geodesic slice x0 = 0 (chart "time-slab").
struct TimeSlabChart {
  double s_min = 0.0, s_max = 0.0;
};
using BoundingChart = std::variant<PolarChart, AmbientBoxChart, TimeSlabChart>;

std::string chart_name(const BoundingChart& chart);

struct RegionSpec {
  SpaceForm space;
  std::function<bool(const AmbientPoint&)> contains;
  BoundingChart chart;
  /// Optional integrand replacing the indicator (e.g. a winding number).
  std::function<double(const AmbientPoint&)> weight = {};
};

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Model volume of the bounding chart.
double chart_volume(const SpaceForm& space, const BoundingChart& chart);

/// Monte Carlo volume: points are drawn uniformly with respect to the model
/// volume of the chart, so the estimate is chart volume times hit fraction.
VolumeEstimate region_volume_mc(const RegionSpec& region, long samples, std::uint64_t seed, int threads = 0);

/// Area of the geodesic sphere of radius r: |S^m| sn(r)^m.
double sphere_area(const SpaceForm& space, double r);
/// Geodesic ball volume by Gauss–Legendre quadrature of sphere_area.
double ball_volume_closed(const SpaceForm& space, double r);
/// Volume of the de Sitter band between time 0 and s (signed).
double slab_volume(const SpaceForm& space, double s);

/// Integral of sn(s)^m over [0, r]: ball volume divided by |S^m|.
double radial_cumulative(const SpaceForm& space, double r);
/// Integral of (R cosh(s/R))^m over [0, s] (de Sitter slab profile).
double slab_cumulative(const SpaceForm& space, double s);

/// Surface area of the unit m-sphere S^m.
double unit_sphere_area(int m);

}  // namespace schlafli
