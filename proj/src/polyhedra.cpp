#include "schlafli/polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numbers>
#include <queue>

#include "schlafli/error.hpp"
#include "schlafli/quadrature.hpp"

namespace schlafli {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

double det4(const VectorXd& a, const VectorXd& b, const VectorXd& c, const VectorXd& d) {
  Eigen::Matrix4d m;
  m << a, b, c, d;
  return m.determinant();
}

/// Vector N with <N, y> = det[y, a, b, c] under the model form.
VectorXd dual_cross(const SpaceForm& space, const VectorXd& a, const VectorXd& b, const VectorXd& c) {
  VectorXd n(4);
  for (int j = 0; j < 4; ++j) {
    VectorXd e = VectorXd::Zero(4);
    e[j] = 1.0;
    n[j] = det4(e, a, b, c);
  }
  if (space.minkowski_ambient()) n[0] = -n[0];
  return n;
}

/// Radial rescaling of a positive combination of points back onto the model.
VectorXd renormalize(const SpaceForm& space, const VectorXd& y) {
  return y * (space.radius() / std::sqrt(std::abs(space.inner(y, y))));
}

/// Tangent vector at x with <w, y> = det[x/R, a, b, y]; in the flat case a x b.
VectorXd cross_at(const SpaceForm& space, const VectorXd& x, const VectorXd& a, const VectorXd& b) {
  if (space.is_flat()) return Vector3d(a.head<3>().cross(b.head<3>()));
  const VectorXd xh = x / space.radius();
  VectorXd n(4);
  for (int j = 0; j < 4; ++j) {
    VectorXd e = VectorXd::Zero(4);
    e[j] = 1.0;
    n[j] = det4(xh, a, b, e);
  }
  if (space.minkowski_ambient()) n[0] = -n[0];
  return n;
}

/// Central-projection chart about c: geodesic polytopes become straight ones.
struct ProjectiveChart {
  SpaceForm space;
  VectorXd c;
  MatrixXd basis;

  ProjectiveChart(const SpaceForm& s, const AmbientPoint& center)
      : space(s), c(center.coords()), basis(tangent_basis(s, center)) {}

  /// Returns false when the point is outside the chart (far hemisphere).
  bool map(const VectorXd& y, Vector3d& z) const {
    if (space.is_flat()) {
      z = y - c;
      return true;
    }
    const double R2 = space.radius() * space.radius();
    const double s = (space.model() == Model::spherical ? 1.0 : -1.0) * space.inner(y, c) / R2;
    if (s <= 1e-300) return false;
    for (int k = 0; k < 3; ++k) z[k] = space.inner(y, basis.col(k)) / (space.radius() * s);
    return true;
  }

  double density(const Vector3d& z) const {
    if (space.is_flat()) return 1.0;
    const double R = space.radius();
    const double q = 1.0 + (space.model() == Model::spherical ? 1.0 : -1.0) * z.squaredNorm();
    return R * R * R / (q * q);
  }
};

double solid_angle(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double num = a.dot(b.cross(c));
  const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  return 2.0 * std::atan2(num, den);
}

}  // namespace

// --- Polyhedron ---------------------------------------------------------------

Polyhedron::Polyhedron(SpaceForm space, std::vector<AmbientPoint> vertices, std::vector<std::vector<int>> facets)
    : space_(space), vertices_(std::move(vertices)), facets_(std::move(facets)) {
  if (space_.signature() != Signature::riemannian)
    throw Error(ErrorKind::ModelViolation, "polyhedra are supported in Riemannian space forms only");
  if (space_.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "polyhedra are supported in dimension 3 only");
  for (const auto& v : vertices_) validate_point(space_, v);
  for (const auto& f : facets_) {
    if (f.size() < 3) throw Error(ErrorKind::DegenerateRidge, "facet with fewer than 3 vertices");
    for (int i : f)
      if (i < 0 || i >= static_cast<int>(vertices_.size()))
        throw Error(ErrorKind::OutOfRange, "facet references a missing vertex");
  }
  // Orient facets consistently by propagating across shared edges.
  const int nf = static_cast<int>(facets_.size());
  std::map<std::pair<int, int>, std::vector<int>> edge_facets;
  for (int f = 0; f < nf; ++f) {
    const auto& F = facets_[f];
    for (std::size_t k = 0; k < F.size(); ++k) {
      const int a = F[k], b = F[(k + 1) % F.size()];
      edge_facets[{std::min(a, b), std::max(a, b)}].push_back(f);
    }
  }
  for (const auto& [e, fs] : edge_facets)
    if (fs.size() != 2) throw Error(ErrorKind::NotClosed, "every edge must border exactly two facets");
  auto has_directed = [&](int f, int a, int b) {
    const auto& F = facets_[f];
    for (std::size_t k = 0; k < F.size(); ++k)
      if (F[k] == a && F[(k + 1) % F.size()] == b) return true;
    return false;
  };
  std::vector<int> state(nf, 0);
  for (int root = 0; root < nf; ++root) {
    if (state[root]) continue;
    state[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      const auto F = facets_[f];
      for (std::size_t k = 0; k < F.size(); ++k) {
        const int a = F[k], b = F[(k + 1) % F.size()];
        for (int g : edge_facets[{std::min(a, b), std::max(a, b)}]) {
          if (g == f) continue;
          const bool same = has_directed(g, a, b);
          if (!state[g]) {
            if (same) std::reverse(facets_[g].begin(), facets_[g].end());
            state[g] = 1;
            q.push(g);
          } else if (same) {
            throw Error(ErrorKind::NotClosed, "facet lattice is not orientable");
          }
        }
      }
    }
  }
  build_ridges();
  build_normals();
}

void Polyhedron::build_ridges() {
  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
    const auto& F = facets_[f];
    for (std::size_t k = 0; k < F.size(); ++k) directed[{F[k], F[(k + 1) % F.size()]}] = f;
  }
  ridges_.clear();
  for (const auto& [e, f] : directed) {
    if (e.first > e.second) continue;
    const auto back = directed.find({e.second, e.first});
    if (back == directed.end()) throw Error(ErrorKind::NotClosed, "unmatched edge");
    ridges_.push_back({e.first, e.second, f, back->second});
  }
}

void Polyhedron::build_normals() {
  const VectorXd c = center().coords();
  std::vector<VectorXd> raw;
  double total = 0.0;
  for (const auto& F : facets_) {
    const VectorXd& p0 = vertices_[F[0]].coords();
    VectorXd n = VectorXd::Zero(space_.ambient_dim());
    for (std::size_t k = 1; k + 1 < F.size(); ++k) {
      const VectorXd& p1 = vertices_[F[k]].coords();
      const VectorXd& p2 = vertices_[F[k + 1]].coords();
      if (space_.is_flat()) n += Vector3d((p1 - p0).head<3>().cross((p2 - p0).head<3>()));
      else n += dual_cross(space_, p0, p1, p2);
    }
    const double nn = space_.inner(n, n);
    if (!(nn > 0.0)) throw Error(ErrorKind::DegenerateRidge, "facet has zero area");
    total += space_.is_flat() ? n.dot(c - p0) : space_.inner(n, c);
    n /= std::sqrt(nn);
    for (int i : F) {
      const VectorXd& p = vertices_[i].coords();
      const double off = space_.is_flat() ? n.dot(p - p0) : space_.inner(n, p) / space_.radius();
      const double scale = space_.is_flat() ? std::max(1.0, (p - p0).norm()) : 1.0;
      if (std::abs(off) > 1e-9 * scale)
        throw Error(ErrorKind::ModelViolation, "facet vertices are not in a totally geodesic plane");
    }
    raw.push_back(n);
  }
  const double sign = total > 0 ? -1.0 : 1.0;
  // The dual cross product of points has the opposite handedness to the
  // Newell normal of the same cycle.
  cycle_sign_ = space_.is_flat() ? sign : -sign;
  normals_.clear();
  for (auto& n : raw) normals_.push_back(sign * n);
}

Polyhedron Polyhedron::lune(double theta, double curvature) {
  if (!(theta > 0 && theta < 2 * kPi)) throw Error(ErrorKind::OutOfRange, "lune angle must lie in (0, 2 pi)");
  if (!(curvature > 0)) throw Error(ErrorKind::ModelViolation, "lunes live in the sphere");
  Polyhedron p;
  p.space_ = SpaceForm::sphere(3, curvature);
  p.lune_angle_ = theta;
  VectorXd n1(4), n2(4);
  n1 << 0, 0, 0, -1;
  n2 << 0, 0, -std::sin(theta), std::cos(theta);
  p.normals_ = {n1, n2};
  p.ridges_ = {{-1, -1, 0, 1}};
  return p;
}

Polyhedron Polyhedron::with_vertices(std::vector<AmbientPoint> vertices) const {
  if (is_lune()) throw Error(ErrorKind::DimensionMismatch, "lunes have no vertices");
  if (vertices.size() != vertices_.size()) throw Error(ErrorKind::DimensionMismatch, "vertex count changed");
  Polyhedron p = *this;
  p.vertices_ = std::move(vertices);
  for (const auto& v : p.vertices_) validate_point(space_, v);
  p.build_normals();
  return p;
}

AmbientPoint Polyhedron::center() const {
  if (is_lune()) {
    const double R = space_.radius();
    const double a = 0.5 * lune_angle_;
    return AmbientPoint{0.0, 0.0, R * std::cos(a), R * std::sin(a)};
  }
  VectorXd s = VectorXd::Zero(space_.ambient_dim());
  for (const auto& v : vertices_) s += v.coords();
  s /= static_cast<double>(vertices_.size());
  return space_.is_flat() ? AmbientPoint(s) : AmbientPoint(renormalize(space_, s));
}

double Polyhedron::winding_number(const AmbientPoint& p) const {
  if (is_lune()) return contains(p) ? 1.0 : 0.0;
  const ProjectiveChart chart(space_, center());
  Vector3d z;
  if (!chart.map(p.coords(), z)) return 0.0;
  std::vector<Vector3d> q(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (!chart.map(vertices_[i].coords(), q[i]))
      throw Error(ErrorKind::ChartUnbounded, "polyhedron does not fit in an open hemisphere");
  double omega = 0.0, signed_volume = 0.0;
  for (const auto& F : facets_) {
    for (std::size_t k = 1; k + 1 < F.size(); ++k) {
      const Vector3d &a = q[F[0]], &b = q[F[k]], &c = q[F[k + 1]];
      omega += solid_angle(a - z, b - z, c - z);
      signed_volume += a.dot(b.cross(c));
    }
  }
  return (signed_volume > 0 ? 1.0 : -1.0) * omega / (4 * kPi);
}

bool Polyhedron::contains(const AmbientPoint& p) const {
  if (is_lune()) {
    const double x2 = p[2], x3 = p[3];
    if (x2 * x2 + x3 * x3 == 0.0) return false;
    double phi = std::atan2(x3, x2);
    if (phi < 0) phi += 2 * kPi;
    return phi > 0 && phi < lune_angle_;
  }
  return std::abs(winding_number(p)) > 0.5;
}

// --- ridge quantities -----------------------------------------------------------

double dihedral_angle(const Polyhedron& poly, int ridge) {
  if (ridge < 0 || ridge >= static_cast<int>(poly.ridges().size()))
    throw Error(ErrorKind::OutOfRange, "ridge index out of range");
  const SpaceForm& space = poly.space();
  const Ridge& r = poly.ridges()[ridge];
  VectorXd x, e;
  if (poly.is_lune()) {
    x = VectorXd::Zero(4);
    x[0] = space.radius();
    e = VectorXd::Zero(4);
    e[1] = -1.0;
  } else {
    const VectorXd& a = poly.vertices()[r.a].coords();
    const VectorXd& b = poly.vertices()[r.b].coords();
    if (space.is_flat()) {
      x = 0.5 * (a + b);
      e = b - a;
    } else {
      x = renormalize(space, a + b);
      e = log_map(space, AmbientPoint(x), poly.vertices()[r.b]);
    }
    const double len = std::sqrt(std::max(0.0, space.inner(e, e)));
    if (!(len > 0)) throw Error(ErrorKind::DegenerateRidge, "ridge has zero length");
    e *= poly.cycle_sign() / len;
  }
  const VectorXd& n1 = poly.facet_normal(r.f1);
  const VectorXd& n2 = poly.facet_normal(r.f2);
  const VectorXd w1 = cross_at(space, x, n1, e);
  const VectorXd w2 = cross_at(space, x, n2, -e);
  double theta = std::atan2(-space.inner(w2, n1), space.inner(w2, w1));
  if (theta < 0) theta += 2 * kPi;
  if (theta < 1e-9 || theta > 2 * kPi - 1e-9 || std::abs(theta - kPi) < 1e-9)
    throw Error(ErrorKind::DegenerateRidge, "facets at ridge " + std::to_string(ridge) + " are coplanar");
  return theta;
}

double ridge_measure(const Polyhedron& poly, int ridge) {
  if (ridge < 0 || ridge >= static_cast<int>(poly.ridges().size()))
    throw Error(ErrorKind::OutOfRange, "ridge index out of range");
  if (poly.is_lune()) return 2 * kPi * poly.space().radius();
  const Ridge& r = poly.ridges()[ridge];
  const double d = distance(poly.space(), poly.vertices()[r.a], poly.vertices()[r.b]);
  if (!(d > 0)) throw Error(ErrorKind::DegenerateRidge, "ridge has zero length");
  return d;
}

double total_mean_curvature_poly(const Polyhedron& poly) {
  double s = 0.0;
  for (int i = 0; i < static_cast<int>(poly.ridges().size()); ++i)
    s += ridge_measure(poly, i) * (kPi - dihedral_angle(poly, i));
  return s;
}

// --- volumes -------------------------------------------------------------------------

namespace {

double simplex_quadrature(const ProjectiveChart& chart, const std::array<Vector3d, 4>& z, int panels, int points) {
  const auto& gl = gauss_legendre(points);
  std::vector<double> nodes, weights;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      nodes.push_back((p + 0.5 * (gl.nodes[i] + 1.0)) / panels);
      weights.push_back(0.5 * gl.weights[i] / panels);
    }
  const Vector3d d1 = z[1] - z[0], d2 = z[2] - z[1], d3 = z[3] - z[2];
  Eigen::Matrix3d m;
  m << d1, d2, d3;
  const double jac = std::abs(m.determinant());
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double s1 = nodes[i];
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double s2 = nodes[j];
      const double w12 = weights[i] * weights[j] * s1 * s1 * s2;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Vector3d x = z[0] + s1 * (d1 + s2 * (d2 + nodes[k] * d3));
        sum += w12 * weights[k] * chart.density(x);
      }
    }
  }
  return sum * jac;
}

}  // namespace

PolyVolume poly_volume(const Polyhedron& poly, const PolyVolumeOptions& options) {
  const SpaceForm& space = poly.space();
  if (options.method == PolyVolumeMethod::quadrature) {
    if (poly.is_lune()) {
      // The lune is swept by rotating a hemisphere of the great 2-sphere;
      // its volume is linear in the angle.
      const double R = space.radius();
      return {kPi * R * R * R * poly.lune_angle(), 0.0};
    }
    if (!poly.is_simplex()) throw Error(ErrorKind::NonSimplex, "quadrature volume needs a tetrahedron");
    const ProjectiveChart chart(space, poly.center());
    std::array<Vector3d, 4> z;
    for (int i = 0; i < 4; ++i)
      if (!chart.map(poly.vertices()[i].coords(), z[i]))
        throw Error(ErrorKind::ChartUnbounded, "simplex does not fit in an open hemisphere");
    double prev = simplex_quadrature(chart, z, 1, 12);
    for (int panels = 1; panels <= 16; panels *= 2) {
      const double cur = simplex_quadrature(chart, z, panels, 20);
      if (std::abs(cur - prev) <= options.rel_tol * std::abs(cur)) return {cur, std::abs(cur - prev)};
      prev = cur;
    }
    throw Error(ErrorKind::NoConvergence, "simplex quadrature did not converge");
  }
  if (options.samples <= 0) throw Error(ErrorKind::EstimateUnavailable, "no samples requested");
  BoundingChart chart;
  if (poly.is_lune()) {
    chart = PolarChart{origin(space), kPi * space.radius()};
  } else {
    const AmbientPoint c = poly.center();
    double r = 0.0;
    for (const auto& v : poly.vertices()) r = std::max(r, distance(space, c, v));
    r *= 1.0 + 1e-9;
    if (space.model() == Model::spherical) r = std::min(r, kPi * space.radius());
    chart = PolarChart{c, r};
  }
  RegionSpec region{space, [&](const AmbientPoint& p) { return poly.contains(p); }, chart};
  // Weighting by the winding number gives the generalized (bellows) volume
  // of self-intersecting polyhedra; it agrees with the indicator otherwise.
  if (!poly.is_lune()) region.weight = [&](const AmbientPoint& p) { return poly.winding_number(p); };
  const VolumeEstimate est = region_volume_mc(region, options.samples, options.seed);
  return {est.estimate, est.std_error};
}

// --- paths and the Schlafli identity ------------------------------------------------

PolyPath vertex_velocity_path(const Polyhedron& start, const std::vector<Vector3d>& velocity) {
  if (velocity.size() != start.vertices().size())
    throw Error(ErrorKind::DimensionMismatch, "one velocity per vertex is required");
  const SpaceForm space = start.space();
  std::vector<Vector3d> w;
  for (const auto& v : start.vertices()) w.push_back(to_normal_coords(space, v));
  return {[start, space, w, velocity](double t) {
    std::vector<AmbientPoint> pts;
    for (std::size_t i = 0; i < w.size(); ++i) pts.push_back(from_normal_coords(space, w[i] + t * velocity[i]));
    return start.with_vertices(std::move(pts));
  }};
}

PolyPath lune_path(std::function<double(double)> theta, double curvature) {
  return {[theta, curvature](double t) { return Polyhedron::lune(theta(t), curvature); }};
}

namespace {

struct RidgeState {
  std::vector<double> W, theta;
  double volume = 0.0, volume_error = 0.0;
};

RidgeState ridge_state(const Polyhedron& p, bool with_volume, const PolyVolumeOptions& vopt) {
  RidgeState s;
  for (int i = 0; i < static_cast<int>(p.ridges().size()); ++i) {
    s.W.push_back(ridge_measure(p, i));
    s.theta.push_back(dihedral_angle(p, i));
  }
  if (with_volume) {
    const PolyVolume v = poly_volume(p, vopt);
    s.volume = v.value;
    s.volume_error = v.error_bound;
  }
  return s;
}

/// Richardson-extrapolated sum W_i theta_i' (W at t) and dV/dt.
struct Rates {
  double sum = 0.0, sum_error = 0.0;
  double vdot = 0.0, vdot_error = 0.0;
};

Rates rates(const PolyPath& path, double t, double h, bool with_volume, const PolyVolumeOptions& vopt) {
  const RidgeState s0 = ridge_state(path.at(t), false, vopt);
  const RidgeState p1 = ridge_state(path.at(t + h), with_volume, vopt);
  const RidgeState m1 = ridge_state(path.at(t - h), with_volume, vopt);
  const RidgeState p2 = ridge_state(path.at(t + 0.5 * h), with_volume, vopt);
  const RidgeState m2 = ridge_state(path.at(t - 0.5 * h), with_volume, vopt);
  Rates r;
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < s0.W.size(); ++i) {
    d1 += s0.W[i] * (p1.theta[i] - m1.theta[i]) / (2 * h);
    d2 += s0.W[i] * (p2.theta[i] - m2.theta[i]) / h;
  }
  r.sum = (4 * d2 - d1) / 3;
  r.sum_error = std::abs(d2 - d1) / 3 + 1e-12 / h;
  if (with_volume) {
    const double v1 = (p1.volume - m1.volume) / (2 * h);
    const double v2 = (p2.volume - m2.volume) / h;
    r.vdot = (4 * v2 - v1) / 3;
    const double noise = (p1.volume_error + m1.volume_error) / (2 * h) + (p2.volume_error + m2.volume_error) / h;
    r.vdot_error = std::abs(v2 - v1) / 3 + noise * 5.0 / 3.0;
  }
  return r;
}

}  // namespace

PolySchlafli schlafli_residual_poly(const PolyPath& path, double t, double h, const PolyVolumeOptions& volume) {
  if (!(h > 0)) throw Error(ErrorKind::OutOfRange, "difference step must be positive");
  if (t - h < 0.0 || t + h > 1.0) throw Error(ErrorKind::OutOfRange, "t +- h must lie in [0, 1]");
  const Polyhedron p = path.at(t);
  const SpaceForm& space = p.space();
  const double mK = space.m() * space.curvature();
  const Rates r = rates(path, t, h, mK != 0.0, volume);
  PolySchlafli out;
  out.rhs = r.sum;
  out.lhs = mK * r.vdot;
  out.residual = out.lhs - out.rhs;
  out.error_budget = std::abs(mK) * r.vdot_error + r.sum_error;
  return out;
}

double volume_by_schlafli(const PolyPath& path, double v_ref, int steps, double h) {
  const Polyhedron p0 = path.at(0.5);
  const SpaceForm& space = p0.space();
  if (space.curvature() == 0.0) throw Error(ErrorKind::ZeroCurvature, "Schlafli integration needs K != 0");
  if (steps < 1) throw Error(ErrorKind::OutOfRange, "steps must be positive");
  const double mK = space.m() * space.curvature();
  auto integrand = [&](double t) {
    const double hh = std::min(h, 0.25 * std::min(t, 1.0 - t));
    return rates(path, t, hh, false, {}).sum;
  };
  return v_ref + integrate_gl(integrand, 0.0, 1.0, 8, steps) / mK;
}

// --- rigidity and flexing ---------------------------------------------------------

namespace {

std::vector<std::pair<int, int>> edge_list(const Polyhedron& poly) {
  std::vector<std::pair<int, int>> e;
  for (const auto& r : poly.ridges()) e.emplace_back(r.a, r.b);
  return e;
}

VectorXd stack(const Polyhedron& poly) {
  VectorXd x(3 * poly.vertices().size());
  for (std::size_t i = 0; i < poly.vertices().size(); ++i) x.segment<3>(3 * i) = poly.vertices()[i].coords();
  return x;
}

MatrixXd rigidity_of(const VectorXd& x, const std::vector<std::pair<int, int>>& edges) {
  MatrixXd J = MatrixXd::Zero(static_cast<int>(edges.size()), x.size());
  for (std::size_t r = 0; r < edges.size(); ++r) {
    const auto [i, j] = edges[r];
    const Vector3d d = x.segment<3>(3 * i) - x.segment<3>(3 * j);
    J.block<1, 3>(static_cast<int>(r), 3 * i) = 2 * d.transpose();
    J.block<1, 3>(static_cast<int>(r), 3 * j) = -2 * d.transpose();
  }
  return J;
}

VectorXd squared_lengths(const VectorXd& x, const std::vector<std::pair<int, int>>& edges) {
  VectorXd l(static_cast<int>(edges.size()));
  for (std::size_t r = 0; r < edges.size(); ++r)
    l[static_cast<int>(r)] = (x.segment<3>(3 * edges[r].first) - x.segment<3>(3 * edges[r].second)).squaredNorm();
  return l;
}

}  // namespace

MatrixXd rigidity_matrix(const Polyhedron& poly) {
  if (!poly.space().is_flat() || poly.is_lune())
    throw Error(ErrorKind::ModelViolation, "rigidity matrix is implemented for E^3 vertex polyhedra");
  return rigidity_of(stack(poly), edge_list(poly));
}

int flex_nullity(const Polyhedron& poly, double rel_tol) {
  const MatrixXd J = rigidity_matrix(poly);
  Eigen::JacobiSVD<MatrixXd> svd(J);
  const VectorXd& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++rank;
  return static_cast<int>(J.cols()) - rank;
}

FlexPath flex_continuation(const Polyhedron& start, int steps, double step_size) {
  const MatrixXd J0 = rigidity_matrix(start);
  if (flex_nullity(start) <= 6) throw Error(ErrorKind::RigidStart, "polyhedron has no nontrivial infinitesimal flex");
  FlexPath path;
  path.states.push_back(start);
  if (steps <= 0) return path;

  const auto edges = edge_list(start);
  const VectorXd L0 = squared_lengths(stack(start), edges);
  const int n = static_cast<int>(stack(start).size());
  // Pins: vertex a fixed, edge a-b direction fixed, facet plane (a, b, c) fixed.
  const auto& F0 = start.facets()[0];
  const int a = F0[0], b = F0[1], c = F0[2];
  const VectorXd x0 = stack(start);
  const Vector3d d = (x0.segment<3>(3 * b) - x0.segment<3>(3 * a)).normalized();
  const Vector3d nrm = d.cross(x0.segment<3>(3 * c) - x0.segment<3>(3 * a)).normalized();
  const Vector3d d2 = nrm.cross(d);
  MatrixXd P = MatrixXd::Zero(6, n);
  for (int k = 0; k < 3; ++k) P(k, 3 * a + k) = 1.0;
  P.block<1, 3>(3, 3 * b) = nrm.transpose();
  P.block<1, 3>(3, 3 * a) = -nrm.transpose();
  P.block<1, 3>(4, 3 * b) = d2.transpose();
  P.block<1, 3>(4, 3 * a) = -d2.transpose();
  P.block<1, 3>(5, 3 * c) = nrm.transpose();
  P.block<1, 3>(5, 3 * a) = -nrm.transpose();
  const VectorXd pin0 = P * x0;

  auto augmented = [&](const VectorXd& x) {
    MatrixXd A(J0.rows() + 6, n);
    A << rigidity_of(x, edges), P;
    return A;
  };
  auto residual = [&](const VectorXd& x) {
    VectorXd r(J0.rows() + 6);
    r << squared_lengths(x, edges) - L0, P * x - pin0;
    return r;
  };
  const double scale = std::max(1.0, L0.cwiseAbs().maxCoeff());

  VectorXd x = x0, prev_dir;
  for (int s = 0; s < steps; ++s) {
    Eigen::JacobiSVD<MatrixXd> svd(augmented(x), Eigen::ComputeFullV);
    VectorXd dir = svd.matrixV().col(n - 1);
    if (prev_dir.size() && dir.dot(prev_dir) < 0) dir = -dir;
    prev_dir = dir;
    const VectorXd pred = x + step_size * dir;
    VectorXd y = pred;
    bool ok = false;
    // Pseudo-arclength Newton: the tangent row makes the system square and
    // regular along the flex.
    MatrixXd A(J0.rows() + 7, n);
    VectorXd r(J0.rows() + 7);
    for (int it = 0; it < 50; ++it) {
      r << residual(y), dir.dot(y - pred);
      if (r.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
        ok = true;
        break;
      }
      A << augmented(y), dir.transpose();
      const VectorXd delta = A.colPivHouseholderQr().solve(-r);
      y += delta;
      if (!y.allFinite() || delta.norm() > 10 * std::max(step_size, 1e-3) * std::sqrt(scale)) break;
      if (delta.norm() <= 1e-15 * std::sqrt(scale) && r.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
        ok = true;
        break;
      }
    }
    if (!ok) throw Error(ErrorKind::ProjectionDiverged, "Gauss-Newton projection failed at step " + std::to_string(s));
    x = y;
    std::vector<AmbientPoint> pts;
    for (int i = 0; i < n / 3; ++i) pts.emplace_back(VectorXd(x.segment<3>(3 * i)));
    path.states.push_back(start.with_vertices(std::move(pts)));
    const VectorXd L = squared_lengths(x, edges);
    for (int e = 0; e < L.size(); ++e)
      path.max_edge_drift = std::max(path.max_edge_drift, std::abs(std::sqrt(L[e]) - std::sqrt(L0[e])));
  }
  return path;
}

// --- catalog -----------------------------------------------------------------------

Polyhedron cube(double edge) {
  std::vector<AmbientPoint> v;
  for (int i = 0; i < 8; ++i) v.push_back(AmbientPoint{edge * (i & 1), edge * ((i >> 1) & 1), edge * ((i >> 2) & 1)});
  return Polyhedron(SpaceForm::euclidean(), v,
                    {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}});
}

Polyhedron tetrahedron(const SpaceForm& space, const std::vector<AmbientPoint>& vertices) {
  if (vertices.size() != 4) throw Error(ErrorKind::NonSimplex, "a tetrahedron has 4 vertices");
  return Polyhedron(space, vertices, {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {0, 2, 3}});
}

Polyhedron regular_tetrahedron(double edge) {
  const double s = edge / (2 * std::sqrt(2.0));
  return tetrahedron(SpaceForm::euclidean(), {AmbientPoint{s, s, s}, AmbientPoint{s, -s, -s}, AmbientPoint{-s, s, -s},
                                              AmbientPoint{-s, -s, s}});
}

Polyhedron corner_tetrahedron(const SpaceForm& space, double length) {
  const AmbientPoint v0 = origin(space);
  const MatrixXd basis = tangent_basis(space, v0);
  std::vector<AmbientPoint> v{v0};
  for (int i = 0; i < 3; ++i) v.push_back(geodesic_eval(space, v0, TangentVector(v0, basis.col(i)), length));
  return tetrahedron(space, v);
}

namespace {

// Bricard octahedron (line-symmetric) with the two faces at the hinge 0-2
// replaced by rigid caps.
const double kSteffenVertices[9][3] = {
    {1.3, 0.4, 0.8},
    {-1.3, -0.4, 0.8},
    {-0.5, 1.6, -0.6},
    {0.5, -1.6, -0.6},
    {0.9, -1.2, -0.3},
    {-0.9, 1.2, -0.3},
    {0.2174, 0.1274, 0.2963},
    {-0.0943, 1.402, 0.3325},
    {0.1468, 1.6424, 0.539},
};
const int kSteffenFacets[14][3] = {
    {0, 3, 4},
    {5, 3, 0},
    {1, 2, 4},
    {5, 2, 1},
    {4, 3, 1},
    {1, 3, 5},
    {0, 4, 6},
    {4, 2, 6},
    {2, 0, 6},
    {5, 7, 2},
    {5, 0, 7},
    {0, 2, 8},
    {2, 7, 8},
    {7, 0, 8},
};

}  // namespace

Polyhedron steffen() {
  std::vector<AmbientPoint> v;
  for (const auto& p : kSteffenVertices) v.push_back(AmbientPoint{p[0], p[1], p[2]});
  std::vector<std::vector<int>> f;
  for (const auto& t : kSteffenFacets) f.push_back({t[0], t[1], t[2]});
  return Polyhedron(SpaceForm::euclidean(), v, f);
}

Polyhedron polyhedron_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SceneError, std::string("polyhedron JSON: ") + e.what());
  }
  try {
    const auto& sp = j.at("space");
    const SpaceForm space(sp.value("dim", 3), sp.at("K").get<double>());
    std::vector<AmbientPoint> v;
    for (const auto& p : j.at("vertices")) {
      const auto c = p.get<std::vector<double>>();
      v.emplace_back(VectorXd(Eigen::Map<const VectorXd>(c.data(), static_cast<int>(c.size()))));
    }
    std::vector<std::vector<int>> f = j.at("facets").get<std::vector<std::vector<int>>>();
    return Polyhedron(space, v, f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SceneError, std::string("polyhedron JSON: ") + e.what());
  }
}

}  // namespace schlafli
