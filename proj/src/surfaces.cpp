#include "schlafli/surfaces.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "schlafli/error.hpp"
#include "schlafli/quadrature.hpp"
#include "schlafli/rng.hpp"

namespace schlafli {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Taylor tinner(const SpaceForm& space, const TaylorVec& a, const TaylorVec& b) {
  Taylor s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == 0 && space.minkowski_ambient()) s -= a[i] * b[i];
    else s += a[i] * b[i];
  }
  return s;
}

TaylorVec diff(const TaylorVec& x, int var) {
  TaylorVec r;
  r.reserve(x.size());
  for (const auto& c : x) r.push_back(c.diff(var));
  return r;
}

TaylorVec scale(const Taylor& s, const TaylorVec& x) {
  TaylorVec r;
  r.reserve(x.size());
  for (const auto& c : x) r.push_back(s * c);
  return r;
}

TaylorVec add(const TaylorVec& a, const TaylorVec& b) {
  TaylorVec r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

TaylorVec constant(const VectorXd& x) {
  TaylorVec r;
  for (int i = 0; i < x.size(); ++i) r.emplace_back(x[i]);
  return r;
}

VectorXd values(const TaylorVec& x) {
  VectorXd r(static_cast<int>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) r[static_cast<int>(i)] = x[i].value();
  return r;
}

Taylor det3(const Taylor& a00, const Taylor& a01, const Taylor& a02, const Taylor& a10, const Taylor& a11,
            const Taylor& a12, const Taylor& a20, const Taylor& a21, const Taylor& a22) {
  return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) + a02 * (a10 * a21 - a11 * a20);
}

/// Vector orthogonal (under the model form) to x, a and b.
TaylorVec normal_direction(const SpaceForm& space, const TaylorVec& x, const TaylorVec& a, const TaylorVec& b) {
  if (space.is_flat()) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  }
  TaylorVec n(4);
  for (int j = 0; j < 4; ++j) {
    int rows[3], k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != j) rows[k++] = i;
    const Taylor minor = det3(x[rows[0]], a[rows[0]], b[rows[0]], x[rows[1]], a[rows[1]], b[rows[1]], x[rows[2]],
                              a[rows[2]], b[rows[2]]);
    double sign = (j % 2 == 0) ? -1.0 : 1.0;
    if (j == 0 && space.minkowski_ambient()) sign = -sign;
    n[j] = sign * minor;
  }
  return n;
}

/// Derivatives 0..3 of C(x) = sum (-x)^k/(2k)! or S(x) = sum (-x)^k/(2k+1)!.
std::array<double, 4> cs_series(bool sine, double x) {
  std::array<double, 4> d{};
  if (std::abs(x) <= 1.0) {
    double coef = 1.0;  // (-1)^k / (2k + sine)!
    for (int k = 0; k < 40; ++k) {
      if (k > 0) coef *= -1.0 / ((2.0 * k - 1.0 + sine) * (2.0 * k + sine));
      for (int j = 0; j <= 3 && j <= k; ++j) {
        double falling = 1.0;
        for (int i = 0; i < j; ++i) falling *= (k - i);
        d[j] += coef * falling * std::pow(x, k - j);
      }
    }
    return d;
  }
  std::array<double, 4> C{}, S{};
  if (x > 0) {
    const double r = std::sqrt(x);
    C[0] = std::cos(r);
    S[0] = std::sin(r) / r;
  } else {
    const double r = std::sqrt(-x);
    C[0] = std::cosh(r);
    S[0] = std::sinh(r) / r;
  }
  for (int n = 1; n <= 3; ++n) {
    C[n] = -0.5 * S[n - 1];
    S[n] = (C[n - 1] - (2.0 * n - 1.0) * S[n - 1]) / (2.0 * x);
  }
  return sine ? S : C;
}

TaylorVec sphere_chart(const Taylor& u, const Taylor& v) {
  const Taylor su = sin(u);
  return {su * cos(v), su * sin(v), cos(u)};
}

TaylorVec tangent_combination(const MatrixXd& basis, const TaylorVec& w) {
  TaylorVec r(basis.rows(), Taylor(0.0));
  for (int i = 0; i < basis.rows(); ++i)
    for (int k = 0; k < basis.cols(); ++k)
      if (basis(i, k) != 0.0) r[i] += basis(i, k) * w[k];
  return r;
}

/// Position on a de Sitter space-like graph over the slice x0 = 0.
TaylorVec de_sitter_graph(const SpaceForm& space, const Taylor& s, const TaylorVec& omega) {
  const double R = space.radius();
  const Taylor c = R * cosh(s / R);
  return {R * sinh(s / R), c * omega[0], c * omega[1], c * omega[2]};
}

void require_surface_space(const SpaceForm& space) {
  if (space.dim() != 3)
    throw Error(ErrorKind::DimensionMismatch, "surfaces are supported in 3-dimensional space forms only");
}

struct Jets {
  TaylorVec X, Xu, Xv, n;
  Taylor E, F, G, L, M, N;  // I and II entries
  Taylor f;                 // normal speed
  VectorXd Xt;
  double eps = 1.0;
  int order = 3;
};

Jets compute_jets(const SurfaceFamily& fam, double u, double v, double t, int order) {
  const SpaceForm& space = fam.space();
  Jets j;
  j.order = order;
  const int seed = std::min(Taylor::kMaxOrder, order + fam.jet_loss());
  const Taylor U = Taylor::variable(Taylor::U, u, seed);
  const Taylor V = Taylor::variable(Taylor::V, v, seed);
  const Taylor T = Taylor::variable(Taylor::T, t, seed);
  j.X = fam.eval(U, V, T);
  if (static_cast<int>(j.X.size()) != space.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "chart map returns " + std::to_string(j.X.size()) +
                                                  " coordinates, expected " + std::to_string(space.ambient_dim()));
  if (j.X[0].order() < 1) throw Error(ErrorKind::NotImmersed, "chart map carries no derivatives");
  j.Xu = diff(j.X, Taylor::U);
  j.Xv = diff(j.X, Taylor::V);
  const TaylorVec N = normal_direction(space, j.X, j.Xu, j.Xv);
  const Taylor nn = tinner(space, N, N);
  if (!(std::abs(nn.value()) > 0.0) || !std::isfinite(nn.value()))
    throw Error(ErrorKind::NotImmersed, "chart is not an immersion at (" + std::to_string(u) + ", " +
                                            std::to_string(v) + ")");
  j.eps = nn.value() > 0 ? 1.0 : -1.0;
  if (space.model() == Model::de_sitter && j.eps > 0)
    throw Error(ErrorKind::NotImmersed, "surface is not space-like in de Sitter space");
  if (space.model() != Model::de_sitter && j.eps < 0)
    throw Error(ErrorKind::NotImmersed, "degenerate normal");
  j.n = scale(fam.orientation() / sqrt(j.eps * nn), N);

  j.E = tinner(space, j.Xu, j.Xu);
  j.F = tinner(space, j.Xu, j.Xv);
  j.G = tinner(space, j.Xv, j.Xv);
  const TaylorVec Xuu = diff(j.Xu, Taylor::U);
  const TaylorVec Xuv = diff(j.Xu, Taylor::V);
  const TaylorVec Xvv = diff(j.Xv, Taylor::V);
  j.L = tinner(space, Xuu, j.n);
  j.M = tinner(space, Xuv, j.n);
  j.N = tinner(space, Xvv, j.n);
  const TaylorVec Xt = diff(j.X, Taylor::T);
  j.Xt = values(Xt);
  j.f = j.eps * tinner(space, Xt, j.n);
  return j;
}

Matrix2d sym2(double a, double b, double c) {
  Matrix2d m;
  m << a, b, b, c;
  return m;
}

FormsAt forms_from_jets(const SurfaceFamily& fam, const Jets& j, double u, double v) {
  const SpaceForm& space = fam.space();
  FormsAt f;
  f.u = u;
  f.v = v;
  f.point = AmbientPoint(values(j.X));
  f.normal = values(j.n);
  f.normal_sign = j.eps;
  f.I = sym2(j.E.value(), j.F.value(), j.G.value());
  f.II = sym2(j.L.value(), j.M.value(), j.N.value());
  const double detI = f.I.determinant();
  const double scale = f.I.trace() * f.I.trace();
  if (!(detI > 1e-14 * scale) || !std::isfinite(detI))
    throw Error(ErrorKind::NotImmersed, "first fundamental form is degenerate at (" + std::to_string(u) + ", " +
                                            std::to_string(v) + ")");
  const Matrix2d Iinv = f.I.inverse();
  f.B = Iinv * f.II;
  f.III = f.II * Iinv * f.II;
  f.H = f.B.trace();
  f.Ke = f.B.determinant();
  f.H2 = f.Ke;
  const double disc = std::sqrt(std::max(0.0, 0.25 * f.H * f.H - f.Ke));
  f.k1 = 0.5 * f.H - disc;
  f.k2 = 0.5 * f.H + disc;
  f.area_element = std::sqrt(detI);

  if (j.E.order() >= 2) {
    const Taylor &E = j.E, &F = j.F, &G = j.G;
    const double Eu = E.du(), Ev = E.dv(), Fu = F.du(), Fv = F.dv(), Gu = G.du(), Gv = G.dv();
    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * E.dvv() + F.duv() - 0.5 * G.duu(), 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E.value(), F.value(),
        0.5 * Gv, F.value(), G.value();
    m2 << 0.0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E.value(), F.value(), 0.5 * Gu, F.value(), G.value();
    const double gauss = (m1.determinant() - m2.determinant()) / (detI * detI);
    f.S_intrinsic = 2.0 * gauss;
  } else {
    f.S_intrinsic = kNaN;
  }
  f.normal_speed = j.f.value();
  VectorXd tangential = j.Xt - f.normal_speed * f.normal;
  f.tangential_speed = std::sqrt(std::abs(space.inner(tangential, tangential)));
  return f;
}

/// Coordinates (rho, omega) of chart points about the radial center, as
/// jets. For de Sitter rho is the signed time above the slice x0 = 0.
void polar_jets(const SpaceForm& space, const TaylorVec& X, const AmbientPoint& c, const MatrixXd& basis, Taylor& rho,
                TaylorVec& omega) {
  const double R = space.radius();
  TaylorVec w;
  Taylor wn;
  switch (space.model()) {
    case Model::euclidean: {
      w = add(X, constant(-c.coords()));
      wn = sqrt(tinner(space, w, w));
      rho = wn;
      break;
    }
    case Model::spherical: {
      const Taylor a = tinner(space, X, constant(c.coords())) / (R * R);
      w = add(X, scale(-a, constant(c.coords())));
      wn = sqrt(tinner(space, w, w));
      rho = R * atan2(wn / R, a);
      break;
    }
    case Model::hyperbolic: {
      const Taylor a = tinner(space, X, constant(c.coords())) / (-R * R);
      w = add(X, scale(-a, constant(c.coords())));
      wn = sqrt(tinner(space, w, w));
      rho = R * asinh(wn / R);
      break;
    }
    case Model::de_sitter: {
      rho = R * asinh(X[0] / R);
      const Taylor sp = sqrt(X[1] * X[1] + X[2] * X[2] + X[3] * X[3]);
      omega = {X[1] / sp, X[2] / sp, X[3] / sp};
      return;
    }
  }
  omega.assign(3, Taylor(0.0));
  for (int k = 0; k < 3; ++k) {
    TaylorVec b = constant(basis.col(k));
    omega[k] = tinner(space, w, b) / wn;
  }
}

double triple(const Vector3d& a, const Vector3d& b, const Vector3d& c) { return a.dot(b.cross(c)); }

struct PanelRule {
  std::vector<double> nodes, weights;
};

PanelRule composite_rule(double a, double b, int panels) {
  const auto& gl = gauss_legendre(16);
  PanelRule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      r.nodes.push_back(lo + 0.5 * h * (gl.nodes[i] + 1.0));
      r.weights.push_back(0.5 * h * gl.weights[i]);
    }
  }
  return r;
}

/// Tensor-rule sum of `g(u, v) * wu * wv` at a fixed level; `abs` collects
/// the integral of |g| for relative tolerances.
template <class G>
void chart_sum(const ChartDomain& d, int level, int count, G&& g, VectorXd& sum, VectorXd& abs) {
  const int panels = 1 << level;
  const PanelRule ru = composite_rule(d.u0, d.u1, panels);
  const PanelRule rv = composite_rule(d.v0, d.v1, panels);
  sum = VectorXd::Zero(count);
  abs = VectorXd::Zero(count);
  for (std::size_t i = 0; i < ru.nodes.size(); ++i) {
    for (std::size_t k = 0; k < rv.nodes.size(); ++k) {
      const VectorXd val = g(ru.nodes[i], rv.nodes[k]);
      const double w = ru.weights[i] * rv.weights[k];
      sum += w * val;
      abs += w * val.cwiseAbs();
    }
  }
}

template <class G>
VectorXd adaptive_chart_integral(const ChartDomain& d, int count, G&& g, const IntegralOptions& opt,
                                 int* level_out = nullptr) {
  VectorXd prev, prev_abs, cur, cur_abs;
  chart_sum(d, opt.min_level, count, g, prev, prev_abs);
  for (int level = opt.min_level + 1; level <= opt.max_level; ++level) {
    chart_sum(d, level, count, g, cur, cur_abs);
    bool ok = true;
    for (int c = 0; c < count; ++c) {
      const double tol = std::max(opt.rel_tol * cur_abs[c], opt.abs_tol);
      if (std::abs(cur[c] - prev[c]) > std::max(tol, 1e-300)) ok = false;
    }
    if (ok) {
      if (level_out) *level_out = level;
      return cur;
    }
    prev = cur;
  }
  throw Error(ErrorKind::NoConvergence, "surface quadrature did not converge");
}

double radial_volume_level(const ParamSurface& s, int level, double* abs_out = nullptr);

}  // namespace

// --- SurfaceFamily ---------------------------------------------------------------

ChartDomain ChartDomain::sphere() { return {0.0, kPi, 0.0, 2.0 * kPi, false, true, true}; }

SurfaceFamily::SurfaceFamily(SpaceForm space, ChartMap map, ChartDomain domain, std::string name)
    : space_(space), map_(std::move(map)), domain_(domain), name_(std::move(name)) {
  require_surface_space(space_);
  if (!(domain_.u1 > domain_.u0) || !(domain_.v1 > domain_.v0))
    throw Error(ErrorKind::OutOfRange, "chart domain must be a non-empty rectangle");
}

SurfaceFamily& SurfaceFamily::set_radial(RadialGraph graph) {
  center_ = graph.center;
  radial_ = std::move(graph);
  return *this;
}

SurfaceFamily& SurfaceFamily::orient_outward(double t) {
  orientation_ = 1.0;
  const AmbientPoint c = center_ ? *center_ : origin(space_);
  double best = -1.0, sign = 1.0;
  for (int i = 1; i <= 5; ++i) {
    for (int k = 0; k < 6; ++k) {
      const double u = domain_.u0 + (domain_.u1 - domain_.u0) * i / 6.0;
      const double v = domain_.v0 + (domain_.v1 - domain_.v0) * (k + 0.5) / 6.0;
      const Jets j = compute_jets(*this, u, v, t, 1);
      const VectorXd X = values(j.X), n = values(j.n);
      if (space_.model() == Model::de_sitter) {
        sign = n[0] > 0 ? 1.0 : -1.0;
        orientation_ = sign;
        return *this;
      }
      VectorXd toward;
      double dist;
      if (space_.is_flat()) {
        toward = c.coords() - X;
        dist = toward.norm();
      } else {
        toward = c.coords() - (space_.inner(c.coords(), X) / space_.inner(X, X)) * X;
        dist = distance(space_, c, project(space_, X));
      }
      if (dist > best) {
        best = dist;
        sign = space_.inner(n, toward) < 0 ? 1.0 : -1.0;
      }
    }
  }
  orientation_ = sign;
  return *this;
}

AmbientPoint SurfaceFamily::point(double u, double v, double t) const {
  return AmbientPoint(values(map_(Taylor(u), Taylor(v), Taylor(t))));
}

// --- exp map on jets -------------------------------------------------------------

TaylorVec exp_jet(const SpaceForm& space, const TaylorVec& p, const TaylorVec& v) {
  if (space.is_flat()) return add(p, v);
  const Taylor x = space.curvature() * tinner(space, v, v);
  const Taylor C = x.compose(cs_series(false, x.value()));
  const Taylor S = x.compose(cs_series(true, x.value()));
  return add(scale(C, p), scale(S, v));
}

// --- catalog -----------------------------------------------------------------------

SurfaceFamily radial_family(const SpaceForm& space, ChartScalar rho, std::string name) {
  require_surface_space(space);
  if (space.model() == Model::de_sitter) {
    auto map = [space, rho](const Taylor& u, const Taylor& v, const Taylor& t) {
      return de_sitter_graph(space, rho(u, v, t), sphere_chart(u, v));
    };
    SurfaceFamily fam(space, map, ChartDomain::sphere(), std::move(name));
    fam.set_radial({origin(space), MatrixXd::Identity(3, 3), rho});
    fam.set_closed(true);
    fam.orient_outward();
    return fam;
  }
  const AmbientPoint c = origin(space);
  const MatrixXd basis = tangent_basis(space, c);
  const TaylorVec cj = constant(c.coords());
  auto map = [space, rho, basis, cj](const Taylor& u, const Taylor& v, const Taylor& t) {
    const TaylorVec dir = tangent_combination(basis, sphere_chart(u, v));
    return exp_jet(space, cj, scale(rho(u, v, t), dir));
  };
  SurfaceFamily fam(space, map, ChartDomain::sphere(), std::move(name));
  fam.set_radial({c, basis, rho});
  fam.set_closed(true);
  fam.orient_outward();
  return fam;
}

SurfaceFamily sphere_family(const SpaceForm& space, double r0, double rate, const Vector3d& center) {
  require_surface_space(space);
  if (space.model() == Model::de_sitter)
    throw Error(ErrorKind::ModelViolation, "geodesic spheres in de Sitter space are not space-like; use a slice");
  if (!(r0 > 0.0)) throw Error(ErrorKind::OutOfRange, "sphere radius must be positive");
  if (space.model() == Model::spherical && r0 >= kPi * space.radius())
    throw Error(ErrorKind::OutOfRange, "sphere radius must be below pi R");
  ChartScalar rho = [r0, rate](const Taylor&, const Taylor&, const Taylor& t) { return r0 + rate * t; };
  if (center.isZero()) return radial_family(space, rho, "sphere");
  const AmbientPoint c = from_normal_coords(space, center);
  const MatrixXd basis = tangent_basis(space, c);
  const TaylorVec cj = constant(c.coords());
  auto map = [space, rho, basis, cj](const Taylor& u, const Taylor& v, const Taylor& t) {
    return exp_jet(space, cj, scale(rho(u, v, t), tangent_combination(basis, sphere_chart(u, v))));
  };
  SurfaceFamily fam(space, map, ChartDomain::sphere(), "sphere");
  fam.set_radial({c, basis, rho});
  fam.set_closed(true);
  fam.orient_outward();
  return fam;
}

SurfaceFamily ellipsoid_radial(const SpaceForm& space, double a, double b, double c, double rate) {
  if (!(a > 0 && b > 0 && c > 0)) throw Error(ErrorKind::OutOfRange, "semi-axes must be positive");
  ChartScalar rho = [a, b, c, rate](const Taylor& u, const Taylor& v, const Taylor& t) {
    const TaylorVec w = sphere_chart(u, v);
    const Taylor q = w[0] * w[0] / (a * a) + w[1] * w[1] / (b * b) + w[2] * w[2] / (c * c);
    return (1.0 + rate * t) / sqrt(q);
  };
  return radial_family(space, rho, "ellipsoid-radial");
}

SurfaceFamily perturbed_sphere(const SpaceForm& space, double r0, double amp, std::uint64_t seed) {
  Rng rng(seed, 0x5e7);
  std::array<double, 7> k{};
  double norm = 0.0;
  for (auto& x : k) {
    x = rng.normal();
    norm += std::abs(x);
  }
  for (auto& x : k) x /= norm;  // |P| <= 1 on the unit sphere
  ChartScalar rho = [r0, amp, k](const Taylor& u, const Taylor& v, const Taylor&) {
    const TaylorVec w = sphere_chart(u, v);
    const Taylor p = k[0] * w[0] + k[1] * w[1] * w[2] + k[2] * (w[2] * w[2] - 1.0 / 3.0) + k[3] * w[0] * w[1] +
                     k[4] * w[0] * w[1] * w[2] + k[5] * w[1] + k[6] * (w[0] * w[0] - w[1] * w[1]) * w[2];
    return r0 * (1.0 + amp * p);
  };
  return radial_family(space, rho, "perturbed-sphere");
}

SurfaceFamily torus(double R, double r) {
  if (!(R > r && r > 0)) throw Error(ErrorKind::OutOfRange, "torus needs R > r > 0");
  auto map = [R, r](const Taylor& u, const Taylor& v, const Taylor&) -> TaylorVec {
    const Taylor rad = R + r * cos(v);
    return {rad * cos(u), rad * sin(u), r * sin(v)};
  };
  SurfaceFamily fam(SpaceForm::euclidean(), map, {0.0, 2 * kPi, 0.0, 2 * kPi, true, true}, "torus");
  fam.set_closed(true);
  fam.set_center(AmbientPoint{0, 0, 0});
  fam.orient_outward();
  return fam;
}

SurfaceFamily plane_patch() {
  auto map = [](const Taylor& u, const Taylor& v, const Taylor&) -> TaylorVec { return {u, v, Taylor(0.0)}; };
  return SurfaceFamily(SpaceForm::euclidean(), map, {-1.0, 1.0, -1.0, 1.0, false, false}, "plane");
}

SurfaceFamily de_sitter_slice(const SpaceForm& space, double s0, double rate, double amp) {
  if (space.model() != Model::de_sitter) throw Error(ErrorKind::ModelViolation, "slices need de Sitter space");
  ChartScalar s = [s0, rate, amp](const Taylor& u, const Taylor&, const Taylor& t) {
    return s0 + rate * t + amp * cos(u);
  };
  SurfaceFamily fam = radial_family(space, s, "ds-slice");
  return fam;
}

SurfaceFamily expr_family(const SpaceForm& space, const ExprProgram& program, ChartMode mode, const ParamMap& params,
                          std::optional<ChartDomain> domain) {
  require_surface_space(space);
  auto prog = std::make_shared<ExprProgram>(program);
  switch (mode) {
    case ChartMode::radial: {
      if (program.arity() != 1) throw Error(ErrorKind::DimensionMismatch, "radial chart program must be scalar");
      ChartScalar rho = [prog, params](const Taylor& u, const Taylor& v, const Taylor& t) {
        return prog->eval_taylor(u, v, t, params)[0];
      };
      return radial_family(space, rho, "expr-radial");
    }
    case ChartMode::ambient: {
      if (static_cast<int>(program.arity()) != space.ambient_dim())
        throw Error(ErrorKind::DimensionMismatch, "ambient chart program must have " +
                                                      std::to_string(space.ambient_dim()) + " components");
      auto map = [prog, params](const Taylor& u, const Taylor& v, const Taylor& t) {
        return prog->eval_taylor(u, v, t, params);
      };
      SurfaceFamily fam(space, map, domain.value_or(ChartDomain::sphere()), "expr-ambient");
      const AmbientPoint probe = fam.point(0.5 * (fam.domain().u0 + fam.domain().u1),
                                           0.5 * (fam.domain().v0 + fam.domain().v1), 0.0);
      if (!is_valid_point(space, probe, 1e-9))
        throw Error(ErrorKind::ModelViolation, "ambient chart program leaves the model");
      return fam;
    }
    case ChartMode::normal: {
      if (program.arity() != 3) throw Error(ErrorKind::DimensionMismatch, "normal chart program needs 3 components");
      const AmbientPoint c = origin(space);
      const MatrixXd basis = tangent_basis(space, c);
      const TaylorVec cj = constant(c.coords());
      auto map = [space, prog, params, basis, cj](const Taylor& u, const Taylor& v, const Taylor& t) {
        return exp_jet(space, cj, tangent_combination(basis, prog->eval_taylor(u, v, t, params)));
      };
      return SurfaceFamily(space, map, domain.value_or(ChartDomain::sphere()), "expr-normal");
    }
  }
  throw Error(ErrorKind::SceneError, "unknown chart mode");
}

namespace {

ChartMap frozen_map(const ParamSurface& base) {
  SurfaceFamily fam = base.family;
  const double t0 = base.t;
  return [fam, t0](const Taylor& u, const Taylor& v, const Taylor&) { return fam.eval(u, v, Taylor(t0)); };
}

TaylorVec normal_jet(const SurfaceFamily& fam, const TaylorVec& X) {
  const SpaceForm& space = fam.space();
  const TaylorVec Xu = diff(X, Taylor::U), Xv = diff(X, Taylor::V);
  const TaylorVec N = normal_direction(space, X, Xu, Xv);
  const Taylor nn = tinner(space, N, N);
  const double eps = nn.value() > 0 ? 1.0 : -1.0;
  return scale(fam.orientation() / sqrt(eps * nn), N);
}

SurfaceFamily derived(const ParamSurface& base, ChartMap map, std::string name) {
  SurfaceFamily fam(base.space(), std::move(map), base.domain(), std::move(name));
  fam.set_closed(base.family.closed());
  fam.set_orientation(base.family.orientation());
  fam.set_jet_loss(base.family.jet_loss());
  if (base.family.center()) fam.set_center(*base.family.center());
  return fam;
}

}  // namespace

SurfaceFamily normal_flow(const ParamSurface& base, ChartScalar f, std::string name) {
  const SpaceForm space = base.space();
  SurfaceFamily frozen = base.family;
  const double t0 = base.t;
  auto map = [space, frozen, t0, f](const Taylor& u, const Taylor& v, const Taylor& t) {
    const TaylorVec X0 = frozen.eval(u, v, Taylor(t0));
    const TaylorVec n0 = normal_jet(frozen, X0);
    return exp_jet(space, X0, scale(t * f(u, v, Taylor(t0)), n0));
  };
  SurfaceFamily fam = derived(base, map, std::move(name));
  fam.set_jet_loss(base.family.jet_loss() + 1);
  return fam;
}

SurfaceFamily rigid_motion(const ParamSurface& base, int i, int j, double rate) {
  const SpaceForm space = base.space();
  if (i == j || i < 0 || j < 0 || i >= space.ambient_dim() || j >= space.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "invalid rotation plane");
  const bool boost = space.minkowski_ambient() && (i == 0 || j == 0);
  ChartMap inner = frozen_map(base);
  auto map = [inner, i, j, rate, boost](const Taylor& u, const Taylor& v, const Taylor& t) {
    TaylorVec X = inner(u, v, t);
    const Taylor a = rate * t;
    const Taylor c = boost ? cosh(a) : cos(a);
    const Taylor s = boost ? sinh(a) : sin(a);
    const Taylor xi = X[i], xj = X[j];
    X[i] = c * xi + (boost ? s : -s) * xj;
    X[j] = s * xi + c * xj;
    return X;
  };
  return derived(base, map, "rigid-motion");
}

SurfaceFamily tangential_slide(const ParamSurface& base, ChartScalar g) {
  SurfaceFamily frozen = base.family;
  const double t0 = base.t;
  auto map = [frozen, t0, g](const Taylor& u, const Taylor& v, const Taylor& t) {
    return frozen.eval(u + t * g(u, v, Taylor(t0)), v, Taylor(t0));
  };
  return derived(base, map, "tangential-slide");
}

// --- pointwise geometry --------------------------------------------------------------

FormsAt fundamental_forms(const ParamSurface& surface, double u, double v) {
  const Jets j = compute_jets(surface.family, u, v, surface.t, 3);
  return forms_from_jets(surface.family, j, u, v);
}

double tensor_inner(const Matrix2d& I, const Matrix2d& A, const Matrix2d& B) {
  const Matrix2d Iinv = I.inverse();
  return (Iinv * A * Iinv * B).trace();
}

// --- integrals --------------------------------------------------------------------------

VectorXd surface_integrals(const ParamSurface& surface, const std::function<VectorXd(const FormsAt&)>& fields,
                           int count, const IntegralOptions& options) {
  auto g = [&](double u, double v) -> VectorXd {
    const FormsAt f = fundamental_forms(surface, u, v);
    return fields(f) * f.area_element;
  };
  return adaptive_chart_integral(surface.domain(), count, g, options);
}

double surface_integral(const ParamSurface& surface, const std::function<double(const FormsAt&)>& field,
                        const IntegralOptions& options) {
  return surface_integrals(
      surface, [&](const FormsAt& f) { return VectorXd::Constant(1, field(f)); }, 1, options)[0];
}

namespace {

double radial_volume_level(const ParamSurface& s, int level, double* abs_out) {
  const SurfaceFamily& fam = s.family;
  const SpaceForm& space = fam.space();
  AmbientPoint c;
  MatrixXd basis;
  if (space.model() != Model::de_sitter) {
    if (fam.radial()) {
      c = fam.radial()->center;
      basis = fam.radial()->basis;
    } else {
      c = fam.center() ? *fam.center() : origin(space);
      basis = tangent_basis(space, c);
    }
  }
  int sign = 0;
  const int seed = std::min(Taylor::kMaxOrder, 1 + fam.jet_loss());
  auto g = [&](double u, double v) -> VectorXd {
    const Taylor U = Taylor::variable(Taylor::U, u, seed);
    const Taylor V = Taylor::variable(Taylor::V, v, seed);
    const TaylorVec X = fam.eval(U, V, Taylor(s.t));
    Taylor rho;
    TaylorVec omega;
    polar_jets(space, X, c, basis, rho, omega);
    const Vector3d w(omega[0].value(), omega[1].value(), omega[2].value());
    const Vector3d wu(omega[0].du(), omega[1].du(), omega[2].du());
    const Vector3d wv(omega[0].dv(), omega[1].dv(), omega[2].dv());
    const double J = triple(w, wu, wv);
    const double scale = wu.norm() * wv.norm();
    if (std::abs(J) > 1e-9 * scale) {
      const int sj = J > 0 ? 1 : -1;
      if (sign == 0) sign = sj;
      else if (sj != sign)
        throw Error(ErrorKind::NotStarShaped, "surface is not star-shaped about the volume center");
    }
    const double F = space.model() == Model::de_sitter ? slab_cumulative(space, rho.value())
                                                       : radial_cumulative(space, rho.value());
    return VectorXd::Constant(1, F * J);
  };
  VectorXd sum, abs;
  chart_sum(fam.domain(), level, 1, g, sum, abs);
  if (sign == 0) throw Error(ErrorKind::NotImmersed, "radial projection of the surface is degenerate");
  if (abs_out) *abs_out = abs[0];
  return sign < 0 ? -sum[0] : sum[0];
}

double divergence_volume_level(const ParamSurface& s, int level) {
  const int seed = std::min(Taylor::kMaxOrder, 1 + s.family.jet_loss());
  auto g = [&](double u, double v) -> VectorXd {
    const Taylor U = Taylor::variable(Taylor::U, u, seed);
    const Taylor V = Taylor::variable(Taylor::V, v, seed);
    const TaylorVec X = s.family.eval(U, V, Taylor(s.t));
    const Vector3d x = values(X);
    const Vector3d xu(X[0].du(), X[1].du(), X[2].du());
    const Vector3d xv(X[0].dv(), X[1].dv(), X[2].dv());
    return VectorXd::Constant(1, s.family.orientation() * triple(x, xu, xv) / 3.0);
  };
  VectorXd sum, abs;
  chart_sum(s.domain(), level, 1, g, sum, abs);
  return sum[0];
}

}  // namespace

bool radial_inside(const ParamSurface& surface, const AmbientPoint& p) {
  const auto& graph = surface.family.radial();
  if (!graph) throw Error(ErrorKind::NotStarShaped, "surface has no radial description");
  const SpaceForm& space = surface.space();
  TaylorVec X = constant(p.coords());
  Taylor rho;
  TaylorVec omega;
  polar_jets(space, X, graph->center, graph->basis, rho, omega);
  Vector3d w(omega[0].value(), omega[1].value(), omega[2].value());
  if (!w.allFinite()) return space.model() != Model::de_sitter;  // the center itself
  w.normalize();
  const double u = std::acos(std::clamp(w[2], -1.0, 1.0));
  double v = std::atan2(w[1], w[0]);
  if (v < 0) v += 2 * kPi;
  const double r = graph->rho(Taylor(u), Taylor(v), Taylor(surface.t)).value();
  if (space.model() == Model::de_sitter) {
    const double s = rho.value();
    return r >= 0 ? (s >= 0 && s <= r) : (s <= 0 && s >= r);
  }
  return rho.value() <= r;
}

VolumeResult enclosed_volume(const ParamSurface& surface, const VolumeOptions& options) {
  if (!surface.family.closed()) throw Error(ErrorKind::NotClosed, "enclosed volume needs a closed surface");
  const SpaceForm& space = surface.space();
  switch (options.method) {
    case VolumeMethod::radial:
    case VolumeMethod::divergence: {
      const bool div = options.method == VolumeMethod::divergence;
      if (div && !space.is_flat())
        throw Error(ErrorKind::ModelViolation, "divergence volume is only available in Euclidean space");
      double prev = div ? divergence_volume_level(surface, 1) : radial_volume_level(surface, 1);
      for (int level = 2; level <= 7; ++level) {
        double abs = 0.0;
        const double cur = div ? divergence_volume_level(surface, level) : radial_volume_level(surface, level, &abs);
        const double scale = std::max({std::abs(cur), abs, 1e-300});
        if (std::abs(cur - prev) <= options.rel_tol * scale) return {cur, std::abs(cur - prev) + 1e-15 * scale};
        prev = cur;
      }
      throw Error(ErrorKind::NoConvergence, "volume quadrature did not converge");
    }
    case VolumeMethod::mc: {
      const auto& graph = surface.family.radial();
      if (!graph) throw Error(ErrorKind::NotStarShaped, "Monte Carlo volume needs a radial description");
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      const ChartDomain& d = surface.domain();
      for (int i = 0; i <= 64; ++i)
        for (int k = 0; k <= 64; ++k) {
          const double r = graph->rho(Taylor(d.u0 + (d.u1 - d.u0) * i / 64.0), Taylor(d.v0 + (d.v1 - d.v0) * k / 64.0),
                                      Taylor(surface.t))
                               .value();
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      BoundingChart chart;
      const double margin = 0.05 * (hi - lo) + 0.02 * std::abs(hi) + 1e-3;
      if (space.model() == Model::de_sitter) chart = TimeSlabChart{std::min(0.0, lo - margin), std::max(0.0, hi + margin)};
      else {
        double rb = hi + margin;
        if (space.model() == Model::spherical) rb = std::min(rb, kPi * space.radius());
        chart = PolarChart{graph->center, rb};
      }
      RegionSpec region{space, [&](const AmbientPoint& p) { return radial_inside(surface, p); }, chart};
      double sign = 1.0;
      if (space.model() == Model::de_sitter && hi <= 0) sign = -1.0;
      const auto est = region_volume_mc(region, options.samples, options.seed);
      return {sign * est.estimate, est.std_error};
    }
  }
  return {};
}

// --- variations ------------------------------------------------------------------------------

namespace {

struct FormSample {
  Matrix2d I, II;
  double H;
};

FormSample sample_forms(const SurfaceFamily& fam, double t, double u, double v) {
  const Jets j = compute_jets(fam, u, v, t, 2);
  FormSample s;
  s.I = sym2(j.E.value(), j.F.value(), j.G.value());
  s.II = sym2(j.L.value(), j.M.value(), j.N.value());
  s.H = (s.I.inverse() * s.II).trace();
  return s;
}

}  // namespace

VariationAt variation_at(const SurfaceFamily& family, double t, double h, double u, double v) {
  if (!(h > 0)) throw Error(ErrorKind::OutOfRange, "difference step must be positive");
  auto central = [&](double step) {
    const FormSample p = sample_forms(family, t + step, u, v);
    const FormSample m = sample_forms(family, t - step, u, v);
    FormSample d;
    d.I = (p.I - m.I) / (2 * step);
    d.II = (p.II - m.II) / (2 * step);
    d.H = (p.H - m.H) / (2 * step);
    return d;
  };
  const FormSample d1 = central(h), d2 = central(0.5 * h);
  VariationAt r;
  r.u = u;
  r.v = v;
  r.I_dot = (4.0 * d2.I - d1.I) / 3.0;
  r.II_dot = (4.0 * d2.II - d1.II) / 3.0;
  r.H_dot = (4.0 * d2.H - d1.H) / 3.0;
  return r;
}

VariationAt variation_at_jet(const SurfaceFamily& family, double t, double u, double v) {
  const Jets j = compute_jets(family, u, v, t, 3);
  VariationAt r;
  r.u = u;
  r.v = v;
  r.I_dot = sym2(j.E.dt(), j.F.dt(), j.G.dt());
  r.II_dot = sym2(j.L.dt(), j.M.dt(), j.N.dt());
  const Taylor det = j.E * j.G - j.F * j.F;
  const Taylor H = (j.G * j.L - 2.0 * j.F * j.M + j.E * j.N) / det;
  r.H_dot = H.dt();
  return r;
}

GlobalRates global_rates(const SurfaceFamily& family, double t, double h) {
  const ParamSurface s0{family, t};
  const SpaceForm& space = family.space();
  const bool flat_div = space.is_flat() && !family.radial();
  // Pick the quadrature level at t, then difference on that fixed rule.
  int level = 2;
  {
    double prev = flat_div ? divergence_volume_level(s0, 1) : radial_volume_level(s0, 1);
    for (level = 2; level <= 7; ++level) {
      double abs = 0.0;
      const double cur = flat_div ? divergence_volume_level(s0, level) : radial_volume_level(s0, level, &abs);
      if (std::abs(cur - prev) <= 1e-12 * std::max({std::abs(cur), abs, 1e-300})) break;
      prev = cur;
    }
    level = std::min(level, 7);
  }
  auto volume = [&](double tt) {
    const ParamSurface s{family, tt};
    return flat_div ? divergence_volume_level(s, level) : radial_volume_level(s, level);
  };
  int area_level = 0;
  IntegralOptions aopt;
  aopt.rel_tol = 1e-12;
  adaptive_chart_integral(
      family.domain(), 1,
      [&](double u, double v) { return VectorXd::Constant(1, fundamental_forms(s0, u, v).area_element); }, aopt,
      &area_level);
  auto area = [&](double tt) {
    VectorXd sum, abs;
    chart_sum(family.domain(), area_level, 1,
              [&](double u, double v) {
                const Jets j = compute_jets(family, u, v, tt, 1);
                const double det = j.E.value() * j.G.value() - j.F.value() * j.F.value();
                return VectorXd::Constant(1, std::sqrt(det));
              },
              sum, abs);
    return sum[0];
  };
  auto rich = [&](const std::function<double(double)>& F) {
    const double d1 = (F(t + h) - F(t - h)) / (2 * h);
    const double d2 = (F(t + 0.5 * h) - F(t - 0.5 * h)) / h;
    return std::pair<double, double>{(4 * d2 - d1) / 3, std::abs(d2 - d1) / 3};
  };
  GlobalRates r;
  const auto [vd, verr] = rich(volume);
  r.V_dot = vd;
  r.A_dot = rich(area).first;
  r.error = verr;
  return r;
}

SchlafliReport schlafli_residual_smooth(const SurfaceFamily& family, double t, double h) {
  const SpaceForm& space = family.space();
  const ParamSurface s{family, t};
  IntegralOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-10;
  auto field = [&](double u, double v) -> VectorXd {
    const FormSample f = sample_forms(family, t, u, v);
    const VariationAt var = variation_at(family, t, h, u, v);
    const double area = std::sqrt(f.I.determinant());
    VectorXd out(2);
    out[0] = var.H_dot * area;
    out[1] = 0.5 * tensor_inner(f.I, var.I_dot, f.II) * area;
    return out;
  };
  const VectorXd ints = adaptive_chart_integral(family.domain(), 2, field, opt);
  SchlafliReport r;
  r.int_H_dot = ints[0];
  r.int_half_IdotII = ints[1];
  r.rhs = ints[0] + ints[1];
  const double mK = space.m() * space.curvature();
  if (mK != 0.0) {
    const GlobalRates g = global_rates(family, t, h);
    r.V_dot = g.V_dot;
    r.lhs = space.epsilon() * mK * g.V_dot;
    r.error_budget = std::abs(mK) * g.error;
  } else {
    r.V_dot = kNaN;
    r.lhs = 0.0;
  }
  (void)s;
  r.residual = r.lhs - r.rhs;
  r.error_budget += 1e-9 * (std::abs(ints[0]) + std::abs(ints[1]) + std::abs(r.lhs));
  return r;
}

NormalVariationResidual normal_variation_identities(const SurfaceFamily& family, double t, double h, double u,
                                                    double v) {
  const SpaceForm& space = family.space();
  const Jets j = compute_jets(family, u, v, t, 3);
  const FormsAt forms = forms_from_jets(family, j, u, v);
  const double speed = std::sqrt(std::abs(space.inner(j.Xt, j.Xt)));
  if (forms.tangential_speed > 1e-10 * std::max(1.0, speed))
    throw Error(ErrorKind::NotNormalGenerator, "generator has a tangential component");
  NormalVariationResidual r;
  r.f = forms.normal_speed;

  // Derivatives of f: from the jets when available, otherwise by differences.
  double fu, fv, fuu, fuv, fvv;
  if (j.f.order() >= 2) {
    fu = j.f.du();
    fv = j.f.dv();
    fuu = j.f.duu();
    fuv = j.f.duv();
    fvv = j.f.dvv();
  } else {
    const double d = 1e-4;
    auto fval = [&](double a, double b) { return compute_jets(family, a, b, t, 2).f.value(); };
    const double f0 = r.f;
    fu = (fval(u + d, v) - fval(u - d, v)) / (2 * d);
    fv = (fval(u, v + d) - fval(u, v - d)) / (2 * d);
    fuu = (fval(u + d, v) - 2 * f0 + fval(u - d, v)) / (d * d);
    fvv = (fval(u, v + d) - 2 * f0 + fval(u, v - d)) / (d * d);
    fuv = (fval(u + d, v + d) - fval(u + d, v - d) - fval(u - d, v + d) + fval(u - d, v - d)) / (4 * d * d);
  }
  // Christoffel symbols of I from the metric jets.
  const double E = j.E.value(), F = j.F.value(), G = j.G.value();
  const double Eu = j.E.du(), Ev = j.E.dv(), Fu = j.F.du(), Fv = j.F.dv(), Gu = j.G.du(), Gv = j.G.dv();
  // First-kind symbols [ab, c] = (d_a g_bc + d_b g_ac - d_c g_ab) / 2.
  const double g111 = 0.5 * Eu, g112 = Fu - 0.5 * Ev;
  const double g121 = 0.5 * Ev, g122 = 0.5 * Gu;
  const double g221 = Fv - 0.5 * Gu, g222 = 0.5 * Gv;
  const Matrix2d Iinv = forms.I.inverse();
  (void)E;
  (void)F;
  (void)G;
  auto second_kind = [&](double c1, double c2) {
    Eigen::Vector2d w = Iinv * Eigen::Vector2d(c1, c2);
    return w;
  };
  const Eigen::Vector2d G11 = second_kind(g111, g112);
  const Eigen::Vector2d G12 = second_kind(g121, g122);
  const Eigen::Vector2d G22 = second_kind(g221, g222);
  Matrix2d Hf;
  Hf(0, 0) = fuu - (G11[0] * fu + G11[1] * fv);
  Hf(0, 1) = Hf(1, 0) = fuv - (G12[0] * fu + G12[1] * fv);
  Hf(1, 1) = fvv - (G22[0] * fu + G22[1] * fv);
  r.hessian_f = Hf;

  const VariationAt var = variation_at(family, t, h, u, v);
  const double eps = forms.normal_sign;
  const double K = space.curvature();
  // <R(n, X) n, Y> = -eps K I(X, Y) for constant curvature.
  const Matrix2d Rn = -eps * K * forms.I;
  const Matrix2d predicted_II = eps * Hf - r.f * Rn - r.f * forms.III;
  r.I_residual = (var.I_dot + 2.0 * r.f * forms.II).cwiseAbs().maxCoeff();
  r.II_residual = (var.II_dot - predicted_II).cwiseAbs().maxCoeff();
  return r;
}

std::string to_string(IsometricClass c) {
  switch (c) {
    case IsometricClass::flat: return "flat";
    case IsometricClass::low_rank_ok: return "low_rank_ok";
    case IsometricClass::must_vanish: return "must_vanish";
    case IsometricClass::inconsistent: return "inconsistent";
  }
  return "?";
}

MatrixXd isometric_constraint_matrix(const VectorXd& k) {
  const int m = static_cast<int>(k.size());
  const int n = m * (m + 1) / 2;
  auto idx = [m](int a, int b) {
    if (a > b) std::swap(a, b);
    return a * m - a * (a - 1) / 2 + (b - a);
  };
  std::vector<Eigen::RowVectorXd> rows;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = q + 1; r < m; ++r) {
        if (p == q || p == r) continue;
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        row[idx(q, r)] = k[p];
        rows.push_back(row);
      }
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
      row[idx(q, q)] += k[p];
      row[idx(p, p)] += k[q];
      rows.push_back(row);
    }
  MatrixXd A(static_cast<int>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) A.row(static_cast<int>(i)) = rows[i];
  return A;
}

IsometricClass classify_isometric_variation(const MatrixXd& II, const MatrixXd& IIprime, double tol) {
  const int m = static_cast<int>(II.rows());
  if (II.cols() != m || IIprime.rows() != m || IIprime.cols() != m || m < 1)
    throw Error(ErrorKind::DimensionMismatch, "II and II' must be square matrices of the same size");
  if ((II - II.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, II.cwiseAbs().maxCoeff()) ||
      (IIprime - IIprime.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, IIprime.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::DimensionMismatch, "II and II' must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(II);
  const VectorXd k = es.eigenvalues();
  const MatrixXd Q = es.eigenvectors();
  const MatrixXd P = Q.transpose() * IIprime * Q;
  const double kmax = k.cwiseAbs().maxCoeff();
  if (kmax <= tol) return IsometricClass::flat;
  if (m == 2) return IsometricClass::low_rank_ok;
  int rank = 0;
  for (int i = 0; i < m; ++i)
    if (std::abs(k[i]) > tol * std::max(1.0, kmax)) ++rank;
  VectorXd x(m * (m + 1) / 2);
  for (int a = 0, n = 0; a < m; ++a)
    for (int b = a; b < m; ++b) x[n++] = P(a, b);
  const double residual = (isometric_constraint_matrix(k) * x).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, kmax) * std::max(1.0, P.cwiseAbs().maxCoeff());
  if (rank >= 3) return IsometricClass::must_vanish;
  if (residual > tol * scale) return IsometricClass::inconsistent;
  double on_kernel = 0.0;
  for (int i = 0; i < m; ++i)
    if (std::abs(k[i]) <= tol * std::max(1.0, kmax)) on_kernel = std::max(on_kernel, P.col(i).cwiseAbs().maxCoeff());
  return on_kernel <= tol * scale ? IsometricClass::low_rank_ok : IsometricClass::inconsistent;
}

ParamSurface parallel_surface(const ParamSurface& surface, double eps) {
  if (eps == 0.0) return surface;
  const SpaceForm& space = surface.space();
  double cs, sn;
  if (space.model() == Model::de_sitter) {
    cs = std::cosh(eps / space.radius());
    sn = space.radius() * std::sinh(eps / space.radius());
  } else {
    cs = space.cs(eps);
    sn = space.sn(eps);
  }
  const ChartDomain& d = surface.domain();
  for (int i = 0; i < 24; ++i)
    for (int k = 0; k < 48; ++k) {
      const double u = d.u0 + (d.u1 - d.u0) * (i + 0.5) / 24.0;
      const double v = d.v0 + (d.v1 - d.v0) * (k + 0.5) / 48.0;
      const FormsAt f = fundamental_forms(surface, u, v);
      if (cs - f.k1 * sn <= 0.0 || cs - f.k2 * sn <= 0.0)
        throw Error(ErrorKind::FocalCrossing, "parallel distance reaches a focal point");
    }
  SurfaceFamily base = surface.family;
  const double t0 = surface.t;
  auto map = [space, base, eps](const Taylor& u, const Taylor& v, const Taylor& t) {
    const TaylorVec X = base.eval(u, v, t);
    const TaylorVec n = normal_jet(base, X);
    return exp_jet(space, X, scale(Taylor(eps), n));
  };
  SurfaceFamily fam(space, map, d, base.name() + "-parallel");
  fam.set_closed(base.closed());
  fam.set_orientation(base.orientation());
  fam.set_jet_loss(base.jet_loss() + 1);
  if (base.center()) fam.set_center(*base.center());
  ParamSurface out{fam, t0};
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 12; ++k)
      (void)fundamental_forms(out, d.u0 + (d.u1 - d.u0) * (i + 0.5) / 6.0, d.v0 + (d.v1 - d.v0) * (k + 0.5) / 12.0);
  return out;
}

}  // namespace schlafli
