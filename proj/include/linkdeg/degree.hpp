#pragma once

#include <optional>
#include <vector>

#include "linkdeg/common.hpp"
#include "linkdeg/map_oracle.hpp"
#include "linkdeg/mesh.hpp"

namespace linkdeg {

/// Axis-aligned box [lo, hi].
struct Box {
  Vec lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  Vec center() const { return 0.5 * (lo + hi); }
  bool contains(const Vec& x, double tol = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
  }
};

Box make_box(const Vec& lo, const Vec& hi);
Box cube_box(int dim, double lo, double hi);

enum class DegreeMethod { RegularValue, Simplicial, Kronecker };

struct DegreeResult {
  double value = 0.0;    // raw numerical value
  int rounded = 0;       // nearest integer
  double residual = 0.0; // |value - rounded|
  DegreeMethod method = DegreeMethod::RegularValue;
  Mat preimages;                 // P x n, RegularValue only
  Eigen::VectorXi preimage_signs;  // P entries
  bool valid() const { return residual < 0.5; }
};

struct RegularValueOptions {
  int seeds_per_axis = 16;           // Newton seed lattice density
  int boundary_samples_per_axis = 0; // 0 = pick automatically from dim
  double boundary_tol = 1e-3;        // p must stay this far from f(boundary)
  double newton_tol = 1e-10;
  int max_newton_iters = 60;
  double dedup_radius = 1e-6;
  double singular_tol = 1e-8;        // |det Df| below this at a preimage is an error
};

/// deg(f, box, p) for a regular value p: enumerate preimages by damped Newton
/// from a seed lattice and sum Jacobian signs.  Throws BoundaryHit when p is
/// within boundary_tol of f(boundary), SingularPreimage when a preimage has a
/// near-singular Jacobian.
DegreeResult local_degree_regular(const MapOracle& f, const Box& box, const Vec& p,
                                  const RegularValueOptions& opts = {});

/// Degree of a vertex-mapped sphere mesh (images in R^{k+1}, all nonzero):
/// radially project the image vertices and count the signed simplices whose
/// spherical cone covers a generic direction.  Throws DegenerateSimplex when
/// the direction hits a cone boundary or a flat covering simplex (redraw the
/// direction), ZeroVertex when an image vertex is too close to the origin.
DegreeResult degree_sphere_map_simplicial(const SphereMesh& mesh, const Mat& images,
                                          const Vec& direction);

/// Same, with images sampled from an oracle and automatic direction redraws.
DegreeResult degree_sphere_map_simplicial(const SphereMesh& mesh, const MapOracle& f,
                                          unsigned seed = 12345, int max_redraws = 32);

/// Kronecker-integral degree of f: S^k -> R^{k+1} \ {0}: the normalized map
/// psi = f/|f| is differentiated along the node frames by central geodesic
/// differences and (1/vol(S^k)) * integral det([psi, d_1 psi, ..., d_k psi])
/// is accumulated over the quadrature.  Throws NearZero if |f| < 1e-8 at a
/// node, NotConverged if the residual is >= 0.25.
DegreeResult degree_sphere_map_kronecker(const MapOracle& f, const SphereQuadrature& quad,
                                         bool normalize = true);

/// Deterministic pseudo-random unit vector.
Vec generic_direction(int dim, unsigned seed);

/// Compare deg(psi o phi, box, p) with deg(psi, phi(box), p) * deg(phi, box, q0)
/// for a homeomorphism phi of the box onto its image.  q0 defaults to
/// phi(center).  The middle factor is evaluated by enumerating psi-preimages
/// of p inside a bounding box of phi(boundary) and keeping those that lie in
/// phi(box) (membership decided by another regular-value degree).
struct MultiplicationReport {
  DegreeResult composite;   // deg(psi o phi, box, p)
  DegreeResult inner;       // deg(phi, box, q0)
  int outer = 0;            // deg(psi, phi(box), p)
  long rhs = 0;             // outer * inner
  bool agree = false;
  Vec q0;
};

MultiplicationReport verify_multiplication(const MapOracle& phi, const MapOracle& psi,
                                           const Box& box, const Vec& p,
                                           const RegularValueOptions& opts = {},
                                           std::optional<Vec> q0 = std::nullopt);

}  // namespace linkdeg
