#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linkdeg/common.hpp"
#include "linkdeg/degree.hpp"
#include "linkdeg/map_oracle.hpp"

namespace linkdeg {

/// Vector-valued function sampled on a regular lattice over a box.
/// Node (i_0, ..., i_{n-1}) sits at corner + (i_a * sides_a / (res_a - 1));
/// values are stored row-major with the LAST axis fastest.  Lattice
/// derivatives are central differences inside and second-order one-sided
/// differences on the boundary; integrals use tensor trapezoid weights.
struct GridFunction {
  Vec corner;             // n
  Vec sides;              // n, positive
  Eigen::VectorXi res;    // n, nodes per axis (>= 3 for derivative ops)
  int value_dim = 1;      // m
  Mat values;             // (prod res) x m

  int dim() const { return static_cast<int>(res.size()); }
  long num_nodes() const;
  double spacing(int axis) const { return sides[axis] / (res[axis] - 1); }
  long flat_index(const Eigen::VectorXi& mi) const;
  Eigen::VectorXi multi_index(long flat) const;
  Vec node_point(const Eigen::VectorXi& mi) const;
  /// trapezoid weight of a node (product over axes of h, halved at ends)
  double node_weight(const Eigen::VectorXi& mi) const;
  /// d(value_c)/d(axis a) at a node
  double derivative(const Eigen::VectorXi& mi, int component, int axis) const;
  /// multilinear interpolation; with zero_outside the function is extended
  /// by zero, otherwise points outside the box are an error
  Vec interpolate(const Vec& x, bool zero_outside = false) const;
};

GridFunction sample_grid(const MapOracle& f, const Vec& corner, const Vec& sides,
                         const Eigen::VectorXi& res);
GridFunction sample_grid_cube(const MapOracle& f, double lo, double hi, int res_per_axis);

/// W^{1,p} lattice norm (values + full gradient), optionally restricted to a
/// subbox (the sub-lattice must contain at least two nodes per axis).
double w1p_norm(const GridFunction& f, double p, const std::optional<Box>& subdomain = {});

/// Same quadrature, but weights vanish outside the ball B(center, radius).
double w1p_ball_norm(const GridFunction& f, double p, const Vec& center, double radius);

/// W^{1,p} distance of two functions on the same lattice.
double w1p_distance(const GridFunction& f, const GridFunction& g, double p);

/// Plain L^p lattice norm (no gradient term).
double lp_norm(const GridFunction& f, double p);

/// Rescaled difference quotient x -> (f(x0 + r x) - f(x0)) / r on the box
/// [-1,1]^n.  The oracle variant evaluates exactly; the grid variant
/// interpolates and requires x0 + r[-1,1]^n inside the source box.
MapOracle blow_up_map(const MapOracle& f, const Vec& x0, double r);
GridFunction blow_up_grid(const MapOracle& f, const Vec& x0, double r, int res_per_axis);
GridFunction blow_up_grid(const GridFunction& f, const Vec& x0, double r, int res_per_axis);

/// Differentiability test at a lattice point: for a ladder of decreasing
/// radii, compute the ball averages of
///   (|f(y) - f(x) - Df(x)(y-x)| / r)^p        (difference-quotient remainder)
///   |Df(y) - Df(x)|^p                          (derivative oscillation)
/// Verdict "good" when both decay below 10% of their first value without
/// growing along the ladder, "bad" when either stalls above 50%, otherwise
/// "inconclusive".
struct GoodPointReport {
  Vec point;
  std::vector<double> radii;
  std::vector<double> cz_averages;        // remainder averages
  std::vector<double> lebesgue_averages;  // derivative oscillation averages
  std::string verdict;
};

GoodPointReport good_point_check(const GridFunction& f, const Eigen::VectorXi& node, double p,
                                 const std::vector<double>& radii);

/// Slice decomposition against the last slice_axes axes: per slice through
/// the leading block, the intrinsic norm uses only slice-direction
/// derivatives, the full norm uses the whole gradient.  Summing the p-th
/// powers of the full slice norms against the leading-block weights
/// reproduces the global norm exactly (discrete Fubini).
struct SliceReport {
  long slice_count = 0;
  std::vector<double> slice_norms;       // intrinsic
  std::vector<double> slice_norms_full;  // full-gradient
  double fubini_lhs = 0.0;               // sum_x w_x * full(x)^p
  double fubini_rhs = 0.0;               // w1p_norm(f)^p
  double fubini_gap = 0.0;               // relative gap
  std::vector<double> slice_distances;   // intrinsic distances to g, if given
};

SliceReport fubini_slices(const GridFunction& f, int slice_axes, double p,
                          const GridFunction* g = nullptr);

/// Restricted Hardy-Littlewood maximal function of a scalar grid function:
/// max over the given radii (balls kept inside the box) of the ball average
/// of |f|; falls back to |f(x)| where no ball fits.
GridFunction maximal_function(const GridFunction& f, const std::vector<double>& radii);

/// Spot-check that Df(x)^{-1} equals D(f^{-1})(f(x)) at random samples,
/// excluding near-critical points.  Throws NotInverse if f_inv fails to
/// invert f at a kept sample.
struct ChainRuleReport {
  int samples = 0;
  int excluded = 0;              // |det Df| < exclusion_tol
  double max_identity_error = 0; // |f_inv(f(x)) - x|
  double max_chain_error = 0;    // max-abs entry of Df(x)^{-1} - Df^{-1}(f(x))
};

ChainRuleReport chain_rule_check(const MapOracle& f, const MapOracle& f_inv, const Box& box,
                                 int nsamples, unsigned seed, double exclusion_tol = 1e-6);

/// Text format: header "n m", then res, corner, sides rows, then one line of
/// m values per node (last axis fastest).  load_grid re-validates.
void save_grid(const GridFunction& f, const std::string& path);
GridFunction load_grid(const std::string& path);

}  // namespace linkdeg
