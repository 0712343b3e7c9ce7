#include "schlafli/integral_geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schlafli/error.hpp"
#include "schlafli/quadrature.hpp"
#include "schlafli/rng.hpp"

namespace schlafli {

using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Minimizes a polynomial objective q(X(u, v)) over the chart: best point of
/// a coarse grid, then damped Newton with exact jets.
class Projector {
 public:
  explicit Projector(const ParamSurface& s, int nu = 12, int nv = 24) : s_(s) {
    const ChartDomain& d = s.domain();
    for (int i = 0; i < nu; ++i)
      for (int k = 0; k < nv; ++k) {
        const double u = d.u0 + (d.u1 - d.u0) * (i + 0.5) / nu;
        const double v = d.v0 + (d.v1 - d.v0) * (k + 0.5) / nv;
        uv_.emplace_back(u, v);
        pts_.push_back(s.family.point(u, v, s.t).coords());
      }
    order_ = std::min(Taylor::kMaxOrder, 2 + s.family.jet_loss());
  }

  struct Min {
    double u = 0.0, v = 0.0, value = 0.0;
  };

  template <class Q, class QJ>
  Min minimize(const Q& q, const QJ& qj) const {
    std::size_t best = 0;
    double bv = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const double val = q(pts_[i]);
      if (val < bv) {
        bv = val;
        best = i;
      }
    }
    Vector2d x = uv_[best];
    double fx = bv;
    for (int it = 0; it < 60; ++it) {
      // near a pole of a polar chart, step in Cartesian coordinates
      // (r cos v, r sin v) about the pole instead of (u, v)
      const int pole = pole_of(x);
      Vector2d w = to_local(x, pole);
      if (pole != 0 && w.norm() < 1e-9) w[0] += 1e-9;  // the pole itself is a chart singularity
      Taylor a = Taylor::variable(Taylor::U, w[0], order_);
      Taylor b = Taylor::variable(Taylor::V, w[1], order_);
      Taylor tu = a, tv = b;
      if (pole != 0) {
        const Taylor r = sqrt(a * a + b * b);
        tu = pole > 0 ? s_.domain().u0 + r : s_.domain().u1 - r;
        tv = atan2(b, a);
      }
      const Taylor Q0 = qj(s_.family.eval(tu, tv, Taylor(s_.t)));
      fx = Q0.value();
      const Vector2d g(Q0.du(), Q0.dv());
      if (!(g.norm() > 0)) break;
      Matrix2d Hs;
      Hs << Q0.duu(), Q0.duv(), Q0.duv(), Q0.dvv();
      // shift the Hessian just enough to be positive definite, then
      // backtrack on the shift
      const double lmin = Eigen::SelfAdjointEigenSolver<Matrix2d>(Hs, Eigen::EigenvaluesOnly).eigenvalues()[0];
      const double scale = std::max(Hs.cwiseAbs().maxCoeff(), 1e-300);
      double mu = lmin > 1e-10 * scale ? 0.0 : -lmin + 1e-6 * scale;
      bool accepted = false;
      double change = 0.0, decrease = 0.0;
      for (int tries = 0; tries < 30; ++tries) {
        const Matrix2d A = Hs + mu * Matrix2d::Identity();
        const Vector2d wy = w - A.ldlt().solve(g);
        const Vector2d y = from_local(wy, pole);
        const double fy = q(s_.family.point(y[0], y[1], s_.t).coords());
        if (fy <= fx) {
          decrease = fx - fy;
          change = (wy - w).norm();
          x = y;
          fx = fy;
          accepted = true;
          break;
        }
        mu = std::max(4.0 * mu, 1e-3 * scale);
      }
      if (!accepted || change <= 1e-15 || decrease <= 1e-16 * std::abs(fx)) break;
    }
    return {x[0], x[1], fx};
  }

  const std::vector<VectorXd>& points() const { return pts_; }
  const ParamSurface& surface() const { return s_; }

 private:
  int pole_of(const Vector2d& x) const {
    const ChartDomain& d = s_.domain();
    if (!d.polar) return 0;
    if (x[0] - d.u0 < 0.3) return 1;
    if (d.u1 - x[0] < 0.3) return -1;
    return 0;
  }
  Vector2d to_local(const Vector2d& x, int pole) const {
    if (pole == 0) return x;
    const double r = pole > 0 ? x[0] - s_.domain().u0 : s_.domain().u1 - x[0];
    return {r * std::cos(x[1]), r * std::sin(x[1])};
  }
  Vector2d from_local(const Vector2d& w, int pole) const {
    if (pole == 0) return clamp(w);
    const double r = w.norm();
    const double v = std::atan2(w[1], w[0]);
    return clamp(Vector2d(pole > 0 ? s_.domain().u0 + r : s_.domain().u1 - r, v));
  }
  Vector2d clamp(Vector2d y) const {
    const ChartDomain& d = s_.domain();
    auto fix = [](double a, double lo, double hi, bool periodic) {
      if (periodic) {
        const double w = hi - lo;
        a = lo + std::fmod(std::fmod(a - lo, w) + w, w);
        return a;
      }
      return std::clamp(a, lo, hi);
    };
    if (d.polar && (y[0] < d.u0 || y[0] > d.u1)) {
      y[0] = y[0] < d.u0 ? 2 * d.u0 - y[0] : 2 * d.u1 - y[0];
      y[1] += kPi;
    }
    return {fix(y[0], d.u0, d.u1, d.periodic_u), fix(y[1], d.v0, d.v1, d.periodic_v)};
  }

  const ParamSurface& s_;
  std::vector<Vector2d> uv_;
  std::vector<VectorXd> pts_;
  int order_ = 2;
};

Taylor inner_jet(const SpaceForm& space, const VectorXd& x, const TaylorVec& X) {
  Taylor s(0.0);
  for (int j = 0; j < x.size(); ++j) {
    const double w = (j == 0 && space.minkowski_ambient()) ? -x[j] : x[j];
    s += w * X[j];
  }
  return s;
}

void require_euclidean(const ConvexBody& body, const char* what) {
  if (!body.boundary.space().is_flat() || body.boundary.space().dim() != 3)
    throw Error(ErrorKind::ModelViolation, std::string(what) + " is implemented in E^3");
}

Vector3d random_unit(Rng& rng) {
  Vector3d d;
  do d = Vector3d(rng.normal(), rng.normal(), rng.normal());
  while (d.squaredNorm() < 1e-24);
  return d.normalized();
}

/// Bounding ball about the grid centroid, radius from an exact max search.
void bounding_ball(const Projector& pr, Vector3d& c, double& radius) {
  c.setZero();
  for (const auto& p : pr.points()) c += p.head<3>();
  c /= static_cast<double>(pr.points().size());
  const auto m = pr.minimize([&](const VectorXd& X) { return -(X.head<3>() - c).squaredNorm(); },
                             [&](const TaylorVec& X) {
                               Taylor s(0.0);
                               for (int j = 0; j < 3; ++j) s -= (X[j] - c[j]) * (X[j] - c[j]);
                               return s;
                             });
  // margin keeps the hit fraction away from 1 for round bodies
  radius = 1.1 * std::sqrt(-m.value);
}

McEstimate checked_mean(long samples, std::uint64_t seed, double total, const std::function<double(Rng&)>& draw) {
  if (samples <= 0) throw Error(ErrorKind::EstimateUnavailable, "no samples requested");
  const MeanEstimate e = mc_mean(samples, seed, draw);
  return {total * e.mean, total * e.std_error};
}

}  // namespace

ConvexBody make_convex_body(const ParamSurface& boundary, const IntegralOptions& options) {
  if (!boundary.family.closed()) throw Error(ErrorKind::NotConvex, "a convex body needs a closed boundary");
  const SpaceForm& space = boundary.space();
  if (space.model() == Model::de_sitter || space.dim() != 3)
    throw Error(ErrorKind::ModelViolation, "convex bodies live in a 3-D Riemannian space form");

  // certificate on the level-2 quadrature grid
  const GaussRule& g = gauss_legendre(16);
  const ChartDomain& d = boundary.domain();
  const int panels = 4;
  double h_sign = 0.0;
  for (int pu = 0; pu < panels; ++pu)
    for (int iu = 0; iu < 16; ++iu)
      for (int pv = 0; pv < panels; ++pv)
        for (int iv = 0; iv < 16; ++iv) {
          const double u = d.u0 + (d.u1 - d.u0) * (pu + 0.5 * (g.nodes[iu] + 1)) / panels;
          const double v = d.v0 + (d.v1 - d.v0) * (pv + 0.5 * (g.nodes[iv] + 1)) / panels;
          const FormsAt f = fundamental_forms(boundary, u, v);
          if (!(f.Ke > 0.0)) throw Error(ErrorKind::NotConvex, "extrinsic curvature is not positive");
          if (!(f.H != 0.0) || (h_sign != 0.0 && f.H * h_sign < 0))
            throw Error(ErrorKind::NotConvex, "mean curvature changes sign");
          if (h_sign == 0.0) h_sign = f.H > 0 ? 1.0 : -1.0;
        }

  ConvexBody body{boundary};
  // B = -Dn: the outward normal of a convex body gives H < 0
  body.outward = h_sign < 0 ? 1.0 : -1.0;
  body.curvature_sign = -body.outward;
  const VectorXd q = surface_integrals(
      boundary, [&](const FormsAt& f) { return Eigen::Vector3d(1.0, body.curvature_sign * f.H, f.Ke); }, 3, options);
  body.area = q[0];
  body.mean_integral = q[1];
  body.gauss_integral = q[2];
  VolumeOptions vo;
  vo.method = space.is_flat() ? VolumeMethod::divergence : VolumeMethod::radial;
  body.volume = std::abs(enclosed_volume(boundary, vo).value);
  if (!(body.area > 0 && body.volume > 0 && body.mean_integral > 0))
    throw Error(ErrorKind::NotConvex, "degenerate body");
  return body;
}

double SteinerData::eval(double eps) const {
  double s = 0.0;
  for (std::size_t i = coefficients.size(); i-- > 0;) s = s * eps + coefficients[i];
  return s;
}

SteinerData steiner_from_curvature(const ConvexBody& body) {
  require_euclidean(body, "the Steiner polynomial");
  SteinerData s;
  s.coefficients = {body.volume, body.area, body.mean_integral / 2.0, body.gauss_integral / 3.0};
  const double binom[4] = {1, 3, 3, 1};
  for (int i = 0; i < 4; ++i) s.W[i] = s.coefficients[i] / binom[i];
  s.P[1] = 1.5 * kPi * s.W[1];
  s.P[2] = 3.0 * s.W[2];
  return s;
}

McEstimate eps_volume_direct(const ConvexBody& body, double eps, long samples, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::OutOfRange, "eps must be non-negative");
  if (samples <= 0) throw Error(ErrorKind::EstimateUnavailable, "no samples requested");
  const ParamSurface& s = body.boundary;
  const SpaceForm& space = s.space();
  const Projector pr(s);

  AmbientPoint c = origin(space);
  if (s.family.radial()) c = s.family.radial()->center;
  else if (s.family.center()) c = *s.family.center();
  double reach = 0.0;
  for (const auto& p : pr.points()) reach = std::max(reach, distance(space, c, AmbientPoint(p)));
  reach = reach * 1.05 + eps;
  if (space.model() == Model::spherical && reach >= kPi * space.radius())
    throw Error(ErrorKind::ChartUnbounded, "neighbourhood does not fit in a geodesic ball");

  const bool radial = s.family.radial().has_value();
  auto inside_or_near = [&](const AmbientPoint& x) {
    if (radial && radial_inside(s, x)) return true;
    const VectorXd& xc = x.coords();
    Projector::Min m;
    if (space.is_flat()) {
      m = pr.minimize([&](const VectorXd& X) { return (X - xc).squaredNorm(); },
                      [&](const TaylorVec& X) {
                        Taylor r(0.0);
                        for (int j = 0; j < 3; ++j) r += (X[j] - xc[j]) * (X[j] - xc[j]);
                        return r;
                      });
    } else {
      m = pr.minimize([&](const VectorXd& X) { return -space.inner(xc, X); },
                      [&](const TaylorVec& X) { return -inner_jet(space, xc, X); });
    }
    const AmbientPoint foot = s.family.point(m.u, m.v, s.t);
    if (distance(space, foot, x) <= eps) return true;
    if (radial) return false;
    const FormsAt f = fundamental_forms(s, m.u, m.v);
    const VectorXd diff = space.is_flat() ? VectorXd(xc - foot.coords()) : xc;
    return body.outward * space.inner(diff, f.normal) < 0;
  };
  RegionSpec region{space, inside_or_near, PolarChart{c, reach}};
  const VolumeEstimate e = region_volume_mc(region, samples, seed);
  return {e.estimate, e.std_error};
}

McEstimate crofton_lines_mc(const ConvexBody& body, long samples, std::uint64_t seed) {
  require_euclidean(body, "Crofton line sampling");
  if (samples <= 0) throw Error(ErrorKind::EstimateUnavailable, "no samples requested");
  const Projector pr(body.boundary);
  Vector3d c;
  double rb;
  bounding_ball(pr, c, rb);
  const double size = rb * rb;
  const bool radial = body.boundary.family.radial().has_value();
  // lines meeting the bounding ball: 2 pi (directions) times pi rb^2
  return checked_mean(samples, seed, 2 * kPi * kPi * rb * rb, [&](Rng& rng) {
    const Vector3d d = random_unit(rng);
    Vector3d e1 = d.unitOrthogonal();
    Vector3d e2 = d.cross(e1);
    const double r = rb * std::sqrt(rng.uniform());
    const double phi = 2 * kPi * rng.uniform();
    const Vector3d p = c + r * (std::cos(phi) * e1 + std::sin(phi) * e2);
    if (radial) {
      const Vector3d q = p - d * d.dot(p - c);
      if (radial_inside(body.boundary, AmbientPoint(VectorXd(q)))) return 1.0;
    }
    auto perp = [&](const Vector3d& y) { return (y - d * d.dot(y)).squaredNorm(); };
    const auto m = pr.minimize([&](const VectorXd& X) { return perp(X.head<3>() - p); },
                               [&](const TaylorVec& X) {
                                 Taylor w[3] = {X[0] - p[0], X[1] - p[1], X[2] - p[2]};
                                 const Taylor dw = d[0] * w[0] + d[1] * w[1] + d[2] * w[2];
                                 Taylor s(0.0);
                                 for (int j = 0; j < 3; ++j) {
                                   const Taylor q = w[j] - d[j] * dw;
                                   s += q * q;
                                 }
                                 return s;
                               });
    return m.value <= 1e-16 * size ? 1.0 : 0.0;
  });
}

McEstimate crofton_planes_mc(const ConvexBody& body, long samples, std::uint64_t seed) {
  require_euclidean(body, "Crofton plane sampling");
  if (samples <= 0) throw Error(ErrorKind::EstimateUnavailable, "no samples requested");
  const Projector pr(body.boundary);
  Vector3d c;
  double rb;
  bounding_ball(pr, c, rb);
  // planes meeting the bounding ball: 2 pi (normals) times 2 rb
  return checked_mean(samples, seed, 4 * kPi * rb, [&](Rng& rng) {
    const Vector3d nu = random_unit(rng);
    const double off = rng.uniform(-rb, rb);
    // grid points lie on the surface, so a plane between the grid extremes
    // certainly meets K; otherwise refine the relevant support value
    double glo = std::numeric_limits<double>::infinity(), ghi = -glo;
    for (const auto& X : pr.points()) {
      const double h = nu.dot(X.head<3>() - c);
      glo = std::min(glo, h);
      ghi = std::max(ghi, h);
    }
    if (off >= glo && off <= ghi) return 1.0;
    const double sign = off > ghi ? 1.0 : -1.0;
    const double support = -pr.minimize([&](const VectorXd& X) { return -sign * nu.dot(X.head<3>() - c); },
                                        [&](const TaylorVec& X) {
                                          return -sign * (nu[0] * (X[0] - c[0]) + nu[1] * (X[1] - c[1]) +
                                                          nu[2] * (X[2] - c[2]));
                                        })
                                .value;
    return sign * off <= support ? 1.0 : 0.0;
  });
}

CurvedCrofton p_functionals_curved(const ConvexBody& body) {
  const SpaceForm& space = body.boundary.space();
  return {0.5 * kPi * body.area, 0.5 * body.mean_integral + space.curvature() * body.volume};
}

double tube_growth_h3(const ConvexBody& body, double eps) {
  const SpaceForm& space = body.boundary.space();
  if (space.model() != Model::hyperbolic) throw Error(ErrorKind::ModelViolation, "tube growth formula is for H^3");
  if (!(eps >= 0.0)) throw Error(ErrorKind::OutOfRange, "eps must be non-negative");
  // V' = A, A' = M, M' = 4c A + 8 pi with c = -K (Riccati equation for the
  // principal curvatures plus Gauss-Bonnet on the parallel surfaces).
  const double c = -space.curvature();
  const double w = 2.0 * std::sqrt(c);
  const double drift = 8 * kPi / (w * w);
  const double alpha = body.area + drift;
  const double beta = body.mean_integral / w;
  return body.volume + alpha / w * std::sinh(w * eps) + beta / w * (std::cosh(w * eps) - 1.0) - drift * eps;
}

double tube_growth_h3_as_printed(const ConvexBody& body, double eps) {
  if (body.boundary.space().model() != Model::hyperbolic)
    throw Error(ErrorKind::ModelViolation, "tube growth formula is for H^3");
  return body.area * std::sinh(eps) + 4 * kPi * (eps - std::sinh(eps)) + body.mean_integral * (std::cosh(eps) - 1.0) +
         body.volume;
}

}  // namespace schlafli
