#include "schlafli/spaceform.hpp"

#include <cmath>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/quadrature.hpp"
#include "schlafli/rng.hpp"

namespace schlafli {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SpaceForm::SpaceForm(int dim, double curvature, Signature signature)
    : dim_(dim), curvature_(curvature), signature_(signature) {
  if (dim < 2) throw Error(ErrorKind::DimensionMismatch, "space form dimension must be at least 2");
  if (!std::isfinite(curvature)) throw Error(ErrorKind::OutOfRange, "curvature must be finite");
  if (signature == Signature::lorentzian && curvature <= 0.0)
    throw Error(ErrorKind::ModelViolation, "only de Sitter (K > 0) is supported on the Lorentzian side");
}

Model SpaceForm::model() const noexcept {
  if (signature_ == Signature::lorentzian) return Model::de_sitter;
  if (curvature_ > 0.0) return Model::spherical;
  if (curvature_ < 0.0) return Model::hyperbolic;
  return Model::euclidean;
}

double SpaceForm::radius() const noexcept {
  return is_flat() ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(std::abs(curvature_));
}

double SpaceForm::inner(const VectorXd& a, const VectorXd& b) const {
  const double dot = a.dot(b);
  return minkowski_ambient() ? dot - 2.0 * a[0] * b[0] : dot;
}

VectorXd SpaceForm::form_diagonal() const {
  VectorXd d = VectorXd::Ones(ambient_dim());
  if (minkowski_ambient()) d[0] = -1.0;
  return d;
}

std::string SpaceForm::name() const {
  std::string prefix;
  switch (model()) {
    case Model::euclidean: prefix = "E"; break;
    case Model::spherical: prefix = "S"; break;
    case Model::hyperbolic: prefix = "H"; break;
    case Model::de_sitter: prefix = "dS"; break;
  }
  std::string label = prefix + std::to_string(dim_);
  if (!is_flat() && std::abs(std::abs(curvature_) - 1.0) > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(K=%g)", curvature_);
    label += buf;
  }
  return label;
}

double SpaceForm::sn(double r) const {
  if (signature_ == Signature::lorentzian || curvature_ < 0.0) {
    const double k = std::sqrt(std::abs(curvature_));
    if (signature_ == Signature::lorentzian) return std::sin(k * r) / k;
    return std::sinh(k * r) / k;
  }
  if (curvature_ > 0.0) {
    const double k = std::sqrt(curvature_);
    return std::sin(k * r) / k;
  }
  return r;
}

double SpaceForm::cs(double r) const {
  if (curvature_ == 0.0) return 1.0;
  const double k = std::sqrt(std::abs(curvature_));
  if (curvature_ < 0.0) return std::cosh(k * r);
  return std::cos(k * r);
}

AmbientPoint::AmbientPoint(std::initializer_list<double> coords) : coords_(static_cast<int>(coords.size())) {
  int i = 0;
  for (double c : coords) coords_[i++] = c;
}

bool is_valid_point(const SpaceForm& space, const AmbientPoint& p, double tol) {
  if (p.size() != space.ambient_dim()) return false;
  if (!p.coords().allFinite()) return false;
  if (space.is_flat()) return true;
  const double target = 1.0 / space.curvature();
  const double scale = std::max(1.0, p.coords().squaredNorm()) * std::max(1.0, std::abs(target));
  if (std::abs(space.inner(p.coords(), p.coords()) - target) > tol * scale) return false;
  if (space.model() == Model::hyperbolic && p[0] <= 0.0) return false;
  return true;
}

void validate_point(const SpaceForm& space, const AmbientPoint& p) {
  if (p.size() != space.ambient_dim())
    throw Error(ErrorKind::ModelViolation, "point has " + std::to_string(p.size()) + " coordinates, " +
                                               space.name() + " needs " + std::to_string(space.ambient_dim()));
  if (!is_valid_point(space, p)) throw Error(ErrorKind::ModelViolation, "point is off the " + space.name() + " model");
}

void validate_tangent(const SpaceForm& space, const TangentVector& v) {
  validate_point(space, v.base());
  if (v.components().size() != space.ambient_dim())
    throw Error(ErrorKind::ModelViolation, "tangent vector has wrong length");
  if (space.is_flat()) return;
  const double along = std::abs(space.inner(v.base().coords(), v.components()));
  const double scale = v.components().norm() * std::max(1.0, v.base().coords().norm());
  if (along > 1e-10 * std::max(scale, 1e-300) && along > 1e-14)
    throw Error(ErrorKind::ModelViolation, "vector is not tangent to the model at its base point");
}

AmbientPoint project(const SpaceForm& space, const VectorXd& x) {
  if (space.is_flat()) return AmbientPoint(x);
  const double r = space.radius();
  VectorXd y = x;
  switch (space.model()) {
    case Model::spherical: y *= r / x.norm(); break;
    case Model::hyperbolic: {
      const double s2 = x.tail(x.size() - 1).squaredNorm();
      y[0] = std::sqrt(r * r + s2);
      break;
    }
    case Model::de_sitter: {
      const double spatial = x.tail(x.size() - 1).norm();
      if (spatial > 0.0) y.tail(x.size() - 1) *= std::sqrt(r * r + x[0] * x[0]) / spatial;
      break;
    }
    case Model::euclidean: break;
  }
  return AmbientPoint(std::move(y));
}

VectorXd project_tangent(const SpaceForm& space, const AmbientPoint& p, const VectorXd& v) {
  if (space.is_flat()) return v;
  const double pp = space.inner(p.coords(), p.coords());
  return v - (space.inner(p.coords(), v) / pp) * p.coords();
}

AmbientPoint origin(const SpaceForm& space) {
  VectorXd x = VectorXd::Zero(space.ambient_dim());
  switch (space.model()) {
    case Model::euclidean: break;
    case Model::spherical:
    case Model::hyperbolic: x[0] = space.radius(); break;
    case Model::de_sitter: x[1] = space.radius(); break;
  }
  return AmbientPoint(std::move(x));
}

MatrixXd tangent_basis(const SpaceForm& space, const AmbientPoint& p) {
  const int n = space.ambient_dim();
  if (space.is_flat()) return MatrixXd::Identity(n, n);
  MatrixXd basis(n, space.dim());
  int found = 0;
  // Try coordinate axes in order of how tangent they are.
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) order.emplace_back(std::abs(p[i]), i);
  std::sort(order.begin(), order.end());
  for (const auto& [weight, axis] : order) {
    if (found == space.dim()) break;
    VectorXd e = VectorXd::Zero(n);
    e[axis] = 1.0;
    VectorXd w = project_tangent(space, p, e);
    for (int j = 0; j < found; ++j) {
      const VectorXd b = basis.col(j);
      w -= (space.inner(w, b) / space.inner(b, b)) * b;
    }
    const double nn = space.inner(w, w);
    if (std::abs(nn) < 1e-8 * std::max(1.0, w.squaredNorm())) continue;
    basis.col(found++) = w / std::sqrt(std::abs(nn));
  }
  if (found != space.dim()) throw Error(ErrorKind::ModelViolation, "could not build tangent basis");
  return basis;
}

double distance(const SpaceForm& space, const AmbientPoint& p, const AmbientPoint& q) {
  validate_point(space, p);
  validate_point(space, q);
  const VectorXd diff = p.coords() - q.coords();
  const VectorXd sum = p.coords() + q.coords();
  const double r = space.radius();
  switch (space.model()) {
    case Model::euclidean: return diff.norm();
    case Model::spherical: return 2.0 * r * std::atan2(diff.norm(), sum.norm());
    case Model::hyperbolic: {
      const double d2 = std::max(0.0, space.inner(diff, diff));
      return 2.0 * r * std::asinh(std::sqrt(d2) / (2.0 * r));
    }
    case Model::de_sitter: {
      const double d2 = space.inner(diff, diff);
      const double s2 = space.inner(sum, sum);
      const double tol = 1e-14 * std::max(1.0, diff.squaredNorm() + sum.squaredNorm());
      if (d2 < -tol || s2 < -tol)
        throw Error(ErrorKind::NotJoinable, "points are not joined by a space-like geodesic");
      return 2.0 * r * std::atan2(std::sqrt(std::max(0.0, d2)), std::sqrt(std::max(0.0, s2)));
    }
  }
  return 0.0;
}

AmbientPoint exp_map(const SpaceForm& space, const AmbientPoint& p, const VectorXd& v) {
  if (space.is_flat()) return AmbientPoint(p.coords() + v);
  const double r = space.radius();
  const double n2 = space.inner(v, v);
  const double n = std::sqrt(std::abs(n2));
  if (n == 0.0) return project(space, p.coords() + v);
  VectorXd x;
  const bool trig = space.model() == Model::spherical || (space.model() == Model::de_sitter && n2 > 0.0);
  if (trig) {
    x = std::cos(n / r) * p.coords() + (r * std::sin(n / r) / n) * v;
  } else {
    x = std::cosh(n / r) * p.coords() + (r * std::sinh(n / r) / n) * v;
  }
  if (!is_valid_point(space, AmbientPoint(x), 1e-12)) return project(space, x);
  return AmbientPoint(std::move(x));
}

AmbientPoint geodesic_eval(const SpaceForm& space, const AmbientPoint& p, const TangentVector& v, double t) {
  validate_point(space, p);
  const TangentVector at_p(p, v.components());
  validate_tangent(space, at_p);
  const double n2 = space.inner(v.components(), v.components());
  if (std::abs(n2 - 1.0) > 1e-9) throw Error(ErrorKind::ModelViolation, "geodesic velocity must be a unit vector");
  return exp_map(space, p, t * v.components());
}

VectorXd log_map(const SpaceForm& space, const AmbientPoint& p, const AmbientPoint& q) {
  if (space.is_flat()) return q.coords() - p.coords();
  const double d = distance(space, p, q);
  VectorXd w = project_tangent(space, p, q.coords());
  const double wn2 = space.inner(w, w);
  if (d == 0.0) return VectorXd::Zero(p.size());
  if (wn2 <= 0.0) throw Error(ErrorKind::OutOfRange, "logarithm undefined (antipodal or non-space-like pair)");
  return (d / std::sqrt(wn2)) * w;
}

AmbientPoint from_normal_coords(const SpaceForm& space, const VectorXd& w) {
  if (w.size() != space.dim()) throw Error(ErrorKind::DimensionMismatch, "normal coordinates need dim entries");
  const AmbientPoint o = origin(space);
  if (space.is_flat()) return AmbientPoint(w);
  return exp_map(space, o, tangent_basis(space, o) * w);
}

VectorXd to_normal_coords(const SpaceForm& space, const AmbientPoint& p) {
  if (space.is_flat()) return p.coords();
  const AmbientPoint o = origin(space);
  const MatrixXd basis = tangent_basis(space, o);
  const VectorXd v = log_map(space, o, p);
  VectorXd w(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const VectorXd b = basis.col(i);
    w[i] = space.inner(v, b) / space.inner(b, b);
  }
  return w;
}

namespace {

MatrixXd random_rotation(int n, Rng& rng) {
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd rr = qr.matrixQR();
  for (int i = 0; i < n; ++i)
    if (rr(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace

Isometry random_isometry(const SpaceForm& space, std::uint64_t seed, double boost_scale) {
  Rng rng(seed, 0x150);
  const int n = space.ambient_dim();
  Isometry iso{MatrixXd::Identity(n, n), VectorXd::Zero(n)};
  switch (space.model()) {
    case Model::euclidean:
      iso.linear = random_rotation(n, rng);
      for (int i = 0; i < n; ++i) iso.translation[i] = rng.normal();
      break;
    case Model::spherical: iso.linear = random_rotation(n, rng); break;
    case Model::hyperbolic:
    case Model::de_sitter: {
      auto spatial = [&] {
        MatrixXd m = MatrixXd::Identity(n, n);
        m.bottomRightCorner(n - 1, n - 1) = random_rotation(n - 1, rng);
        return m;
      };
      const double a = boost_scale * rng.normal();
      MatrixXd boost = MatrixXd::Identity(n, n);
      boost(0, 0) = boost(1, 1) = std::cosh(a);
      boost(0, 1) = boost(1, 0) = std::sinh(a);
      iso.linear = spatial() * boost * spatial();
      break;
    }
  }
  return iso;
}

// --- volumes ----------------------------------------------------------------

double unit_sphere_area(int m) { return 2.0 * std::pow(kPi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1)); }

double sphere_area(const SpaceForm& space, double r) {
  if (space.model() == Model::de_sitter) {
    const double rad = space.radius();
    return unit_sphere_area(space.m()) * std::pow(rad * std::cosh(r / rad), space.m());
  }
  return unit_sphere_area(space.m()) * std::pow(space.sn(r), space.m());
}

double radial_cumulative(const SpaceForm& space, double r) {
  const int m = space.m();
  const double K = space.curvature();
  if (m == 2) {
    if (K == 0.0) return r * r * r / 3.0;
    const double k = std::sqrt(std::abs(K));
    if (K > 0.0) return (r - std::sin(2.0 * k * r) / (2.0 * k)) / (2.0 * k * k);
    const double x = k * r;
    if (x < 1e-3) return r * r * r / 3.0 * (1.0 + x * x / 5.0 + 2.0 * x * x * x * x / 105.0);
    return (std::sinh(2.0 * x) / (2.0 * k) - r) / (2.0 * k * k);
  }
  const int panels = std::max(1, static_cast<int>(std::ceil(r / std::min(1.0, space.radius()))));
  return integrate_gl([&](double s) { return std::pow(space.sn(s), m); }, 0.0, r, 32, panels);
}

double slab_cumulative(const SpaceForm& space, double s) {
  const double rad = space.radius();
  const int m = space.m();
  if (m == 2) return rad * rad * (s / 2.0 + rad * std::sinh(2.0 * s / rad) / 4.0);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(s) / rad)));
  return integrate_gl([&](double x) { return std::pow(rad * std::cosh(x / rad), m); }, 0.0, s, 32, panels);
}

namespace {

double invert_monotone(const std::function<double(double)>& f, const std::function<double(double)>& df,
                       double target, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = f(x) - target;
    if (fx > 0) hi = x;
    else lo = x;
    const double d = df(x);
    double next = d > 0 ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

void check_chart(const SpaceForm& space, const BoundingChart& chart) {
  if (const auto* polar = std::get_if<PolarChart>(&chart)) {
    if (space.model() == Model::de_sitter)
      throw Error(ErrorKind::ChartUnbounded, "polar chart is not available in de Sitter space; use time-slab");
    if (!std::isfinite(polar->radius) || polar->radius < 0.0)
      throw Error(ErrorKind::ChartUnbounded, "polar chart radius must be finite and non-negative");
    if (space.model() == Model::spherical && polar->radius > kPi * space.radius() * (1.0 + 1e-12))
      throw Error(ErrorKind::ChartUnbounded, "polar chart radius exceeds the sphere");
    validate_point(space, polar->center);
  } else if (const auto* box = std::get_if<AmbientBoxChart>(&chart)) {
    if (!space.is_flat()) throw Error(ErrorKind::ChartUnbounded, "ambient-box chart needs Euclidean space");
    if (box->lo.size() != space.dim() || box->hi.size() != space.dim())
      throw Error(ErrorKind::DimensionMismatch, "box dimension mismatch");
    if (!box->lo.allFinite() || !box->hi.allFinite())
      throw Error(ErrorKind::ChartUnbounded, "ambient-box bounds must be finite");
  } else {
    const auto& slab = std::get<TimeSlabChart>(chart);
    if (space.model() != Model::de_sitter) throw Error(ErrorKind::ChartUnbounded, "time-slab chart needs de Sitter");
    if (!std::isfinite(slab.s_min) || !std::isfinite(slab.s_max) || slab.s_max < slab.s_min)
      throw Error(ErrorKind::ChartUnbounded, "time-slab bounds must be finite and ordered");
  }
}

VectorXd random_direction(int n, Rng& rng) {
  VectorXd w(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) w[i] = rng.normal();
    norm = w.norm();
  } while (norm == 0.0);
  return w / norm;
}

}  // namespace

std::string chart_name(const BoundingChart& chart) {
  if (std::holds_alternative<PolarChart>(chart)) return "polar";
  if (std::holds_alternative<AmbientBoxChart>(chart)) return "ambient-box";
  return "time-slab";
}

double chart_volume(const SpaceForm& space, const BoundingChart& chart) {
  check_chart(space, chart);
  if (const auto* polar = std::get_if<PolarChart>(&chart)) {
    const double r = std::min(polar->radius, space.model() == Model::spherical ? kPi * space.radius() : polar->radius);
    return unit_sphere_area(space.m()) * radial_cumulative(space, r);
  }
  if (const auto* box = std::get_if<AmbientBoxChart>(&chart)) return (box->hi - box->lo).prod();
  const auto& slab = std::get<TimeSlabChart>(chart);
  return unit_sphere_area(space.m()) * (slab_cumulative(space, slab.s_max) - slab_cumulative(space, slab.s_min));
}

VolumeEstimate region_volume_mc(const RegionSpec& region, long samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw Error(ErrorKind::EstimateUnavailable, "at least one sample is required");
  const SpaceForm& space = region.space;
  const double total = chart_volume(space, region.chart);
  const int dim = space.dim();

  std::function<AmbientPoint(Rng&)> sample;
  if (const auto* polar = std::get_if<PolarChart>(&region.chart)) {
    const double rb = std::min(polar->radius, space.model() == Model::spherical ? kPi * space.radius() : polar->radius);
    const double f_max = radial_cumulative(space, rb);
    const MatrixXd basis = tangent_basis(space, polar->center);
    const AmbientPoint center = polar->center;
    sample = [=, &space](Rng& rng) {
      const double target = rng.uniform() * f_max;
      const double r = invert_monotone([&](double x) { return radial_cumulative(space, x); },
                                       [&](double x) { return std::pow(space.sn(x), space.m()); }, target, 0.0, rb);
      const VectorXd dir = basis * random_direction(dim, rng);
      return exp_map(space, center, r * dir);
    };
  } else if (const auto* box = std::get_if<AmbientBoxChart>(&region.chart)) {
    const VectorXd lo = box->lo, hi = box->hi;
    sample = [=](Rng& rng) {
      VectorXd x(dim);
      for (int i = 0; i < dim; ++i) x[i] = rng.uniform(lo[i], hi[i]);
      return AmbientPoint(std::move(x));
    };
  } else {
    const auto slab = std::get<TimeSlabChart>(region.chart);
    const double rad = space.radius();
    const double g0 = slab_cumulative(space, slab.s_min), g1 = slab_cumulative(space, slab.s_max);
    sample = [=, &space](Rng& rng) {
      const double target = g0 + rng.uniform() * (g1 - g0);
      const double s = invert_monotone([&](double x) { return slab_cumulative(space, x); },
                                       [&](double x) { return std::pow(rad * std::cosh(x / rad), space.m()); },
                                       target, slab.s_min, slab.s_max);
      VectorXd x(dim + 1);
      x[0] = rad * std::sinh(s / rad);
      x.tail(dim) = rad * std::cosh(s / rad) * random_direction(dim, rng);
      return AmbientPoint(std::move(x));
    };
  }

  const auto est = mc_mean(
      samples, seed,
      [&](Rng& rng) {
        const AmbientPoint p = sample(rng);
        if (region.weight) return region.weight(p);
        return region.contains(p) ? 1.0 : 0.0;
      },
      threads);
  VolumeEstimate out;
  out.estimate = total * est.mean;
  out.std_error = samples > 1 ? total * est.std_error : total;
  if (est.mean == 0.0) out.std_error = 0.0;
  return out;
}

double ball_volume_closed(const SpaceForm& space, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorKind::OutOfRange, "radius must be finite and non-negative");
  if (space.model() == Model::de_sitter) throw Error(ErrorKind::OutOfRange, "geodesic balls are not defined in de Sitter");
  if (space.model() == Model::spherical && r > kPi * space.radius() * (1.0 + 1e-14))
    throw Error(ErrorKind::OutOfRange, "radius exceeds the diameter of the sphere");
  if (r == 0.0) return 0.0;
  const double scale = space.is_flat() ? r : space.radius();
  const int panels = std::max(1, static_cast<int>(std::ceil(r / scale)));
  return integrate_gl([&](double s) { return sphere_area(space, s); }, 0.0, r, 64, panels);
}

double slab_volume(const SpaceForm& space, double s) {
  if (space.model() != Model::de_sitter) throw Error(ErrorKind::OutOfRange, "slab volume needs de Sitter space");
  return unit_sphere_area(space.m()) * slab_cumulative(space, s);
}

}  // namespace schlafli
