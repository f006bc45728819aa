#pragma once

#include <string>
#include <vector>

#include "linkdeg/common.hpp"
#include "linkdeg/map_oracle.hpp"

namespace linkdeg {

/// Oriented triangulation of the unit sphere S^k in R^{k+1}, k in {1,2,3}.
/// Level 0 is the boundary of the cross-polytope (square / octahedron /
/// 16-cell); each refinement splits every simplex and reprojects the new
/// vertices radially.  A stored simplex together with its sign is positively
/// oriented when sign * det(v_0, ..., v_k) > 0 (vertices as columns), which
/// orients the sphere by the outward normal.
struct SphereMesh {
  int dim = 0;                 // k
  Mat vertices;                // V x (k+1), unit rows
  Eigen::MatrixXi simplices;   // S x (k+1), vertex indices
  Eigen::VectorXi signs;       // S entries, each +1 or -1
  int refinement_level = 0;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_simplices() const { return static_cast<int>(simplices.rows()); }
};

SphereMesh make_sphere_mesh(int dim, int refinement);
SphereMesh subdivide_mesh(const SphereMesh& mesh);

/// Signed solid angle subtended at the origin by simplex s (respects the
/// stored sign).  Exact closed forms for k=1,2; adaptive quadrature with
/// Richardson extrapolation for k=3.
double signed_solid_angle(const SphereMesh& mesh, int s);

/// Sum of signed solid angles; equals vol(S^k) for a valid mesh.
double total_signed_solid_angle(const SphereMesh& mesh);

/// Checks unit vertices, index ranges, sign values, the closed-oriented-
/// manifold face pairing, and the total solid angle.  Throws on violation.
void validate_mesh(const SphereMesh& mesh, double angle_tol = 1e-6);

/// Plain-text format: "k V S" header, V vertex rows, S rows of k+1 indices
/// plus a sign.  load_mesh re-validates.
void save_mesh(const SphereMesh& mesh, const std::string& path);
SphereMesh load_mesh(const std::string& path);

/// Positively oriented orthonormal tangent frame at a unit vector u:
/// columns f_1..f_k with det([u f_1 ... f_k]) > 0.
Mat tangent_frame(const Vec& u);

/// Centroid quadrature rule on S^k derived from a mesh: one node per
/// simplex (normalized centroid), weight = unsigned spherical volume of the
/// simplex, plus a positively oriented tangent frame per node.
struct SphereQuadrature {
  int dim = 0;
  Mat nodes;                // N x (k+1)
  Vec weights;              // N, positive, sums to vol(S^k)
  std::vector<Mat> frames;  // N frames, (k+1) x k
  int num_nodes() const { return static_cast<int>(nodes.rows()); }
};

SphereQuadrature quadrature_from_mesh(const SphereMesh& mesh);

/// Midpoint rule on S^1 with n equally spaced nodes.
SphereQuadrature uniform_circle_quadrature(int nodes);

/// Product rule on S^k x S^l; weights are implicit products, so the total
/// weight is exactly vol(S^k) * vol(S^l).
struct ProductGrid {
  SphereQuadrature first;
  SphereQuadrature second;
  long num_nodes() const { return static_cast<long>(first.num_nodes()) * second.num_nodes(); }
  double total_weight() const { return first.weights.sum() * second.weights.sum(); }
};

ProductGrid make_product_grid(const SphereQuadrature& a, const SphereQuadrature& b);

// ---------------------------------------------------------------------------
// Two families of round spheres sitting on interlocked solid tori in R^n,
// n >= 4.  With half = floor(n/2) and nu = n - 1 - half:
//   iota1(x, sigma), sigma in S^nu,   x in closed unit ball of R^{half+1}
//   iota2(y, rho),   rho in S^half,   y in closed unit ball of R^{nu+1}
// The images are pairwise disjoint for all admissible parameters.
// ---------------------------------------------------------------------------

int iota_nu(int n);    // n - 1 - floor(n/2)
int iota_half(int n);  // floor(n/2)

Vec embed_iota1_point(int n, const Vec& x, const Vec& sigma);
Vec embed_iota2_point(int n, const Vec& y, const Vec& rho);

/// The embeddings as oracles S^nu -> R^n and S^half -> R^n.
MapOracle iota1_map(int n, const Vec& x);
MapOracle iota2_map(int n, const Vec& y);

/// Invert a point on an iota1/iota2 sphere back to (parameter, sphere point).
/// Returns the sphere point; optionally reports the family parameter.
Vec iota1_parameter(int n, const Vec& q, Vec* x_out = nullptr);
Vec iota2_parameter(int n, const Vec& q, Vec* y_out = nullptr);

/// Reflection of R^n across the last coordinate hyperplane.
Mat reflection_last(int n);

/// A mesh pushed through a vertex map into R^m.
struct EmbeddedSphere {
  SphereMesh mesh;
  Mat image;  // V x m
  std::string label;
};

EmbeddedSphere embed_iota1(int n, const Vec& x, const SphereMesh& mesh);
EmbeddedSphere embed_iota2(int n, const Vec& y, const SphereMesh& mesh);
EmbeddedSphere reflect_last(const EmbeddedSphere& sphere);

/// Total k-volume of the flat simplices of the embedded image.
double surface_area(const EmbeddedSphere& sphere);

}  // namespace linkdeg
