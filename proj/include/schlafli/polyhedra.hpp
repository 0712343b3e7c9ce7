#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "schlafli/spaceform.hpp"

namespace schlafli {

/// Codimension-2 face. For vertex polyhedra in 3-D this is the edge a-b,
/// traversed a -> b by facet f1 and b -> a by facet f2.
struct Ridge {
  int a = -1, b = -1;
  int f1 = -1, f2 = -1;
};

/// Geodesic polyhedron in a Riemannian 3-D space form. Facets are vertex
/// cycles, oriented consistently; outward normals are fixed at construction.
class Polyhedron {
 public:
  Polyhedron(SpaceForm space, std::vector<AmbientPoint> vertices, std::vector<std::vector<int>> facets);

  /// Lune in S^3 between the half great spheres at angles 0 and theta about
  /// the great circle in the (x0, x1) plane. It has no vertices.
  static Polyhedron lune(double theta, double curvature = 1.0);

  const SpaceForm& space() const noexcept { return space_; }
  const std::vector<AmbientPoint>& vertices() const noexcept { return vertices_; }
  const std::vector<std::vector<int>>& facets() const noexcept { return facets_; }
  const std::vector<Ridge>& ridges() const noexcept { return ridges_; }
  /// Outward unit (co)normal of a facet hyperplane, in ambient coordinates.
  const Eigen::VectorXd& facet_normal(int facet) const { return normals_.at(facet); }
  /// +1 when facet cycles run counter-clockwise about the outward normal.
  double cycle_sign() const noexcept { return cycle_sign_; }
  bool is_lune() const noexcept { return lune_angle_ > 0.0; }
  double lune_angle() const noexcept { return lune_angle_; }
  bool is_simplex() const noexcept { return vertices_.size() == 4 && facets_.size() == 4; }

  /// Same combinatorics, new vertex positions.
  Polyhedron with_vertices(std::vector<AmbientPoint> vertices) const;

  /// Point used to center charts: normalized vertex centroid.
  AmbientPoint center() const;
  /// Winding number of the boundary about p (1 inside, 0 outside for
  /// embedded polyhedra), computed in the central-projection chart.
  double winding_number(const AmbientPoint& p) const;
  bool contains(const AmbientPoint& p) const;

 private:
  Polyhedron() = default;
  void build_ridges();
  void build_normals();

  SpaceForm space_ = SpaceForm::euclidean();
  std::vector<AmbientPoint> vertices_;
  std::vector<std::vector<int>> facets_;
  std::vector<Ridge> ridges_;
  std::vector<Eigen::VectorXd> normals_;
  double lune_angle_ = 0.0;
  double cycle_sign_ = 1.0;
};

/// Interior dihedral angle at a ridge, in (0, 2*pi).
double dihedral_angle(const Polyhedron& poly, int ridge);
/// Geodesic length of the ridge (2 pi R for the lune's great circle).
double ridge_measure(const Polyhedron& poly, int ridge);

enum class PolyVolumeMethod { mc, quadrature };

struct PolyVolume {
  double value = 0.0;
  double error_bound = 0.0;
};

struct PolyVolumeOptions {
  PolyVolumeMethod method = PolyVolumeMethod::quadrature;
  long samples = 200000;
  std::uint64_t seed = 1;
  double rel_tol = 1e-12;
};

PolyVolume poly_volume(const Polyhedron& poly, const PolyVolumeOptions& options = {});

/// One-parameter family t -> P_t with fixed combinatorics.
struct PolyPath {
  std::function<Polyhedron(double)> at;
};

/// Straight-line-in-normal-coordinates path of the vertices:
/// w_i(t) = w_i + t * velocity_i, mapped by from_normal_coords.
PolyPath vertex_velocity_path(const Polyhedron& start, const std::vector<Eigen::Vector3d>& velocity);
PolyPath lune_path(std::function<double(double)> theta, double curvature = 1.0);

struct PolySchlafli {
  double lhs = 0.0;  // m K dV/dt
  double rhs = 0.0;  // sum W_i dtheta_i/dt
  double residual = 0.0;
  double error_budget = 0.0;
};

/// Central differences at step h, Richardson-extrapolated with h/2.
PolySchlafli schlafli_residual_poly(const PolyPath& path, double t, double h,
                                    const PolyVolumeOptions& volume = {});

/// V(1) = v_ref + (1/(mK)) * integral of sum W_i theta_i' over [0, 1],
/// composite Gauss-Legendre (no endpoint evaluations) with `steps` panels.
double volume_by_schlafli(const PolyPath& path, double v_ref, int steps, double h = 1e-4);

/// Sum of W_i (pi - theta_i).
double total_mean_curvature_poly(const Polyhedron& poly);

/// Edge-length rigidity matrix (rows: edges, columns: 3 per vertex), E^3.
Eigen::MatrixXd rigidity_matrix(const Polyhedron& poly);
/// Dimension of the infinitesimal flex space (6 for rigid polyhedra).
int flex_nullity(const Polyhedron& poly, double rel_tol = 1e-8);

struct FlexPath {
  std::vector<Polyhedron> states;
  double max_edge_drift = 0.0;
};

/// Continuation along the nontrivial infinitesimal flex, pinned against
/// rigid motions, with Gauss-Newton projection back onto the edge lengths.
FlexPath flex_continuation(const Polyhedron& start, int steps, double step_size);

// --- catalog -------------------------------------------------------------

Polyhedron cube(double edge = 1.0);
/// Regular tetrahedron with unit edge in E^3.
Polyhedron regular_tetrahedron(double edge = 1.0);
/// Tetrahedron with the given vertices (orientation fixed automatically).
Polyhedron tetrahedron(const SpaceForm& space, const std::vector<AmbientPoint>& vertices);
/// v0 = origin, v_i = geodesic_eval(v0, e_i, length) for i = 1..3.
Polyhedron corner_tetrahedron(const SpaceForm& space, double length = 1.0);
/// Flexible polyhedron with 9 vertices and 14 triangles in E^3: a
/// line-symmetric Bricard octahedron with two adjacent faces replaced by rigid
/// caps. It self-intersects, so its volume is the winding-number volume.
/// Same data as data/steffen.json.
Polyhedron steffen();
Polyhedron polyhedron_from_json(const std::string& text);

}  // namespace schlafli
