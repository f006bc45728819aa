#pragma once

#include <functional>
#include <utility>

#include "linkdeg/common.hpp"

namespace linkdeg {

/// A map R^{dim_in} -> R^{dim_out} given by an evaluation callback.
/// Derivatives are always taken by central finite differences with step
/// fd_step, so any callable (closed form, composition, Newton inverse, ...)
/// can be used interchangeably.
struct MapOracle {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Vec(const Vec&)> fn;
  double fd_step = 1e-5;

  Vec operator()(const Vec& x) const {
    if (x.size() != dim_in)
      fail_precondition("DimensionMismatch", "oracle expects dimension " + std::to_string(dim_in) +
                                                 ", got " + std::to_string(x.size()));
    Vec y = fn(x);
    if (y.size() != dim_out) fail_internal("oracle returned wrong output dimension");
    return y;
  }

  /// Jacobian by central differences, columns are partials.
  Mat jacobian(const Vec& x) const {
    Mat J(dim_out, dim_in);
    Vec xp = x, xm = x;
    for (int j = 0; j < dim_in; ++j) {
      xp[j] = x[j] + fd_step;
      xm[j] = x[j] - fd_step;
      J.col(j) = ((*this)(xp) - (*this)(xm)) / (2.0 * fd_step);
      xp[j] = x[j];
      xm[j] = x[j];
    }
    return J;
  }

  double jacobian_det(const Vec& x) const {
    if (dim_in != dim_out) fail_precondition("DimensionMismatch", "jacobian_det needs a square map");
    return jacobian(x).determinant();
  }
};

/// outer after inner.
MapOracle compose(const MapOracle& outer, const MapOracle& inner);

MapOracle affine_map(const Mat& M, const Vec& b);

MapOracle identity_map(int dim);

/// Inverse of a bijective map by damped Newton iteration.  The seed for a
/// query y is the first-order predictor around the anchor point, so the
/// resulting oracle is deterministic.  Throws NotConverged when the residual
/// tolerance cannot be reached.
MapOracle newton_inverse(const MapOracle& f, const Vec& anchor, double tol = 1e-13,
                         int max_iters = 80);

}  // namespace linkdeg
