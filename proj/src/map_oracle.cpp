#include "linkdeg/map_oracle.hpp"

namespace linkdeg {

MapOracle compose(const MapOracle& outer, const MapOracle& inner) {
  if (outer.dim_in != inner.dim_out)
    fail_precondition("DimensionMismatch", "composition dimensions do not match");
  return MapOracle{inner.dim_in, outer.dim_out,
                   [outer, inner](const Vec& x) { return outer.fn(inner.fn(x)); },
                   std::min(outer.fd_step, inner.fd_step)};
}

MapOracle affine_map(const Mat& M, const Vec& b) {
  if (M.rows() != b.size()) fail_precondition("DimensionMismatch", "affine map shape mismatch");
  return MapOracle{static_cast<int>(M.cols()), static_cast<int>(M.rows()),
                   [M, b](const Vec& x) -> Vec { return M * x + b; }};
}

MapOracle identity_map(int dim) {
  return MapOracle{dim, dim, [](const Vec& x) { return x; }};
}

MapOracle newton_inverse(const MapOracle& f, const Vec& anchor, double tol, int max_iters) {
  if (f.dim_in != f.dim_out) fail_precondition("DimensionMismatch", "can only invert square maps");
  Vec f_anchor = f(anchor);
  Mat j_anchor = f.jacobian(anchor);
  Eigen::PartialPivLU<Mat> predictor(j_anchor);
  Vec anchor_copy = anchor;
  MapOracle fc = f;
  auto solve = [fc, anchor_copy, f_anchor, predictor, tol, max_iters](const Vec& y) -> Vec {
    Vec x = anchor_copy + predictor.solve(y - f_anchor);
    double res = (fc.fn(x) - y).norm();
    for (int it = 0; it < max_iters && res > tol; ++it) {
      Mat j = fc.jacobian(x);
      Vec step = j.partialPivLu().solve(y - fc.fn(x));
      double lambda = 1.0;
      for (int back = 0; back < 40; ++back) {
        Vec cand = x + lambda * step;
        double cres = (fc.fn(cand) - y).norm();
        if (cres < res * (1.0 - 0.25 * lambda) || cres < tol) {
          x = cand;
          res = cres;
          break;
        }
        lambda *= 0.5;
        if (back == 39) fail_not_converged("NotConverged", "newton inverse line search stalled");
      }
    }
    if (res > tol) fail_not_converged("NotConverged", "newton inverse did not reach tolerance");
    return x;
  };
  return MapOracle{f.dim_out, f.dim_in, solve, f.fd_step};
}

}  // namespace linkdeg
