#pragma once

#include <functional>
#include <vector>

#include "linkdeg/common.hpp"
#include "linkdeg/map_oracle.hpp"
#include "linkdeg/mesh.hpp"
#include "linkdeg/sobolev.hpp"

namespace linkdeg {

/// Radial mollifier on the unit ball of R^dim, normalized to unit mass.
struct Mollifier {
  int dim = 0;
  std::function<double(double)> profile;  // on [0, 1); zero outside
  double normalization = 1.0;

  double radial(double r) const { return r < 1.0 ? normalization * profile(r) : 0.0; }
  double operator()(const Vec& y) const {
    if (y.size() != dim) fail_precondition("DimensionMismatch", "mollifier argument dimension");
    return radial(y.norm());
  }

  /// smooth bump exp(-1/(1-r^2))
  static Mollifier standard(int dim);
};

/// Quadrature for integrals against the mollifier: midpoint lattice on
/// [-1,1]^dim with weights phi(y) * cell volume, renormalized to sum to 1
/// (so constants are reproduced exactly).  raw_mass records the unnormalized
/// sum, which should be close to 1 for an adequate lattice.
struct BallQuadrature {
  Mat nodes;    // Q x dim
  Vec weights;  // Q, positive, sums to 1
  double raw_mass = 0.0;
};

BallQuadrature mollifier_quadrature(const Mollifier& phi, int per_axis);

/// Mollifier extension to the upper half space: (Ef)(x,t) = (f * phi_t)(x).
/// Levels are sampled on the window of base nodes x with B(x, t_max) inside
/// the box; evaluate() works anywhere using the zero extension of f.
struct HalfSpaceFunction {
  GridFunction base;
  BallQuadrature quad;
  std::vector<double> t_levels;
  std::vector<GridFunction> levels;  // one grid per t, on the window lattice

  Vec evaluate(const Vec& x, double t) const;
};

HalfSpaceFunction extend(const GridFunction& f, const Mollifier& phi,
                         const std::vector<double>& t_levels, int quad_per_axis = 16);

/// Norm and trace diagnostics for a family of compactly supported functions:
///  - q = (n+1) p / n;
///  - ratios ||Ef||_{L^q(R^n x (0,1])} / ||f||_{L^p} across the family;
///  - relative trace error ||Ef(. , trace_t) - f||_p / ||f||_p;
///  - drift of the ratio under the dilation f(2x) of the first function;
///  - fitted constant for |grad Ef(x,t)| <= C avg_{B(x,t)} |grad f|.
struct ExtensionBoundsReport {
  double p = 0, q = 0;
  std::vector<double> ratios;
  double ratio_max = 0, ratio_min = 0;
  std::vector<double> trace_errors;
  double dilation_drift = 0;
  double grad_constant = 0;
};

struct ExtensionBoundsOptions {
  int t_samples = 24;
  int quad_per_axis = 16;
  double trace_t = 0.01;
  int grad_samples = 300;
  unsigned seed = 20240817;
};

ExtensionBoundsReport verify_extension_bounds(const std::vector<GridFunction>& fs,
                                              const Mollifier& phi, double p,
                                              const ExtensionBoundsOptions& opts = {});

/// Point location + P1 interpolation of vertex data on a sphere mesh.
class MeshInterpolator {
 public:
  MeshInterpolator() = default;
  MeshInterpolator(const SphereMesh& mesh, const Mat& vertex_values);
  /// interpolate at a (nonzero) direction x
  Vec operator()(const Vec& x) const;
  const SphereMesh& mesh() const { return mesh_; }

 private:
  SphereMesh mesh_;
  Mat values_;
  std::vector<Mat> inverse_;            // per simplex, (k+1)^2
  std::vector<std::vector<int>> bucket_;  // simplices by centroid orthant
  int locate(const Vec& x, Vec& lambda) const;
};

/// Homotopy on S^n x [0,1] between g (at t=0) and the P1 interpolant of f
/// (at t=1):  H(x,t) = g(x) + beta(t) * (smoothing of f - g at scale
/// rho0 * (1-t))(x), where the smoothing is a geodesic-ball kernel average.
/// beta is a smoothstep vanishing near 0 and equal to 1 near 1, so
/// H(.,0) = g exactly and H(.,1) = interpolated f exactly.
struct SphereHomotopy {
  int n = 0;  // domain sphere dimension
  int m = 0;  // target dimension
  MapOracle g;
  MeshInterpolator h_interp;  // interpolates f - g vertex data
  BallQuadrature ball;        // kernel weights on the unit tangent ball
  double rho0 = 0.6;
  double beta_lo = 0.05, beta_hi = 0.95;

  Vec operator()(const Vec& x, double t) const;
};

SphereHomotopy build_homotopy(const SphereMesh& mesh, const Mat& f_values, const MapOracle& g,
                              const Mollifier& kernel, int quad_per_axis = 12);

/// Area/volume of the image of S^n x [0,1) under a homotopy-like map:
/// sum over (simplex centroid, time midpoint) nodes of
/// sqrt(det(DH^T DH)) * spherical weight * dt, derivatives by central
/// differences (geodesic steps in x, plain steps in t).
double hausdorff_volume_estimate(const std::function<Vec(const Vec&, double)>& H,
                                 const SphereMesh& domain, int t_intervals,
                                 double fd_step = 1e-4);

/// Monte-Carlo check of |det(A+B)| <= 2^{n-1} Lambda(n) (|A|^n + |B|^n)
/// with Lambda(n) = n^{-n/2} the maximum of |det| on the unit
/// Hilbert-Schmidt ball (re-derived numerically as a cross-check).
struct DetBoundReport {
  int n = 0;
  long trials = 0;
  double bound = 0;           // 2^{n-1} * n^{-n/2}
  double max_ratio = 0;       // worst |det(A+B)| / (|A|^n + |B|^n)
  double lambda_numeric = 0;  // optimized max |det| on the unit HS sphere
  double lambda_analytic = 0; // n^{-n/2}
  double identity_ratio = 0;  // ratio at A = B = I (attains the bound)
  bool within = false;
};

DetBoundReport det_bound_check(int n, long trials, unsigned seed);

}  // namespace linkdeg
