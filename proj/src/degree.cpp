#include "linkdeg/degree.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace linkdeg {

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

int auto_boundary_samples(int dim) {
  switch (dim) {
    case 1: return 2;
    case 2: return 257;
    case 3: return 33;
    default: return 9;
  }
}

// Walk the lattice of an (dim)-dimensional index space.
bool advance(Eigen::VectorXi& idx, const Eigen::VectorXi& sizes) {
  for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
    if (++idx[a] < sizes[a]) return true;
    idx[a] = 0;
  }
  return false;
}

void check_boundary_distance(const MapOracle& f, const Box& box, const Vec& p,
                             const RegularValueOptions& opts) {
  int n = box.dim();
  int m = opts.boundary_samples_per_axis > 0 ? opts.boundary_samples_per_axis
                                             : auto_boundary_samples(n);
  double min_dist = std::numeric_limits<double>::infinity();
  Vec x(n);
  for (int face_axis = 0; face_axis < n; ++face_axis) {
    for (int side = 0; side < 2; ++side) {
      Eigen::VectorXi idx = Eigen::VectorXi::Zero(std::max(n - 1, 1));
      Eigen::VectorXi sizes = Eigen::VectorXi::Constant(std::max(n - 1, 1), n == 1 ? 1 : m);
      do {
        int w = 0;
        for (int a = 0; a < n; ++a) {
          if (a == face_axis) {
            x[a] = side == 0 ? box.lo[a] : box.hi[a];
          } else {
            double t = (n == 1) ? 0.0 : static_cast<double>(idx[w++]) / (m - 1);
            x[a] = box.lo[a] + t * (box.hi[a] - box.lo[a]);
          }
        }
        min_dist = std::min(min_dist, (f(x) - p).norm());
      } while (advance(idx, sizes));
    }
  }
  if (min_dist < opts.boundary_tol)
    fail_precondition("BoundaryHit", "target value is within " + std::to_string(min_dist) +
                                         " of the boundary image");
}

}  // namespace

Box make_box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size()) fail_precondition("DimensionMismatch", "box corner sizes differ");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) fail_precondition("EmptySubdomain", "box has empty interior");
  return Box{lo, hi};
}

Box cube_box(int dim, double lo, double hi) {
  return make_box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

DegreeResult local_degree_regular(const MapOracle& f, const Box& box, const Vec& p,
                                  const RegularValueOptions& opts) {
  if (f.dim_in != f.dim_out) fail_precondition("DimensionMismatch", "local degree needs a square map");
  if (box.dim() != f.dim_in || p.size() != f.dim_out)
    fail_precondition("DimensionMismatch", "box or target dimension mismatch");

  check_boundary_distance(f, box, p, opts);

  int n = box.dim();
  std::vector<Vec> found;
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
  Eigen::VectorXi sizes = Eigen::VectorXi::Constant(n, opts.seeds_per_axis);
  Vec x(n);
  do {
    for (int a = 0; a < n; ++a)
      x[a] = box.lo[a] + (idx[a] + 0.5) / opts.seeds_per_axis * (box.hi[a] - box.lo[a]);

    // damped Newton toward f(x) = p
    Vec cur = x;
    double res = (f(cur) - p).norm();
    bool ok = false;
    for (int it = 0; it < opts.max_newton_iters; ++it) {
      if (res < opts.newton_tol) {
        ok = true;
        break;
      }
      Mat j = f.jacobian(cur);
      Eigen::PartialPivLU<Mat> lu(j);
      Vec step = lu.solve(p - f(cur));
      if (!step.allFinite()) break;
      double lambda = 1.0;
      bool moved = false;
      for (int back = 0; back < 30; ++back) {
        Vec cand = cur + lambda * step;
        double cres = (f(cand) - p).norm();
        if (cres < res * (1.0 - 0.25 * lambda)) {
          cur = cand;
          res = cres;
          moved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!moved) break;
    }
    if (ok && res < opts.newton_tol && box.contains(cur, 1e-9)) {
      bool dup = false;
      for (const Vec& q : found)
        if ((q - cur).norm() < opts.dedup_radius) {
          dup = true;
          break;
        }
      if (!dup) found.push_back(cur);
    }
  } while (advance(idx, sizes));

  DegreeResult result;
  result.method = DegreeMethod::RegularValue;
  result.preimages.resize(static_cast<int>(found.size()), n);
  result.preimage_signs.resize(static_cast<int>(found.size()));
  long total = 0;
  for (size_t i = 0; i < found.size(); ++i) {
    double det = f.jacobian(found[i]).determinant();
    if (std::abs(det) < opts.singular_tol)
      fail_precondition("SingularPreimage",
                        "Jacobian nearly singular at a preimage; perturb the target value");
    result.preimages.row(static_cast<int>(i)) = found[i].transpose();
    result.preimage_signs[static_cast<int>(i)] = sgn(det);
    total += sgn(det);
  }
  result.value = static_cast<double>(total);
  result.rounded = static_cast<int>(total);
  result.residual = 0.0;
  return result;
}

DegreeResult degree_sphere_map_simplicial(const SphereMesh& mesh, const Mat& images,
                                          const Vec& direction) {
  int k = mesh.dim;
  if (images.rows() != mesh.num_vertices() || images.cols() != k + 1)
    fail_precondition("DimensionMismatch", "image array must be V x (k+1)");
  if (direction.size() != k + 1)
    fail_precondition("DimensionMismatch", "direction must have dim k+1");
  Vec d = direction.normalized();

  Mat unit(mesh.num_vertices(), k + 1);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    double norm = images.row(i).norm();
    if (norm < 1e-12)
      fail_precondition("ZeroVertex", "image vertex " + std::to_string(i) + " is at the origin");
    unit.row(i) = images.row(i) / norm;
  }

  long total = 0;
  Mat m(k + 1, k + 1);
  for (int s = 0; s < mesh.num_simplices(); ++s) {
    for (int i = 0; i <= k; ++i) m.col(i) = unit.row(mesh.simplices(s, i)).transpose();
    double det = m.determinant();
    if (std::abs(det) < 1e-10) {
      // flat projected simplex: only a problem if it could cover the direction
      Vec lam = m.completeOrthogonalDecomposition().solve(d);
      double res = (m * lam - d).norm();
      if (res < 1e-8 && lam.minCoeff() > -1e-9)
        fail_precondition("DegenerateSimplex", "direction lies on a flat projected simplex");
      continue;
    }
    Vec lam = m.partialPivLu().solve(d);
    double lo = lam.minCoeff();
    if (lo > 1e-9) {
      total += mesh.signs[s] * sgn(det);
    } else if (lo > -1e-9) {
      fail_precondition("DegenerateSimplex", "direction lies on a cone boundary; redraw it");
    }
  }

  DegreeResult result;
  result.method = DegreeMethod::Simplicial;
  result.value = static_cast<double>(total);
  result.rounded = static_cast<int>(total);
  result.residual = 0.0;
  return result;
}

DegreeResult degree_sphere_map_simplicial(const SphereMesh& mesh, const MapOracle& f,
                                          unsigned seed, int max_redraws) {
  Mat images(mesh.num_vertices(), mesh.dim + 1);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    images.row(i) = f(mesh.vertices.row(i).transpose()).transpose();
  for (int attempt = 0; attempt < max_redraws; ++attempt) {
    try {
      return degree_sphere_map_simplicial(mesh, images, generic_direction(mesh.dim + 1, seed + attempt));
    } catch (const Error& e) {
      if (e.kind() != "DegenerateSimplex" || attempt + 1 == max_redraws) throw;
    }
  }
  fail_internal("unreachable");
}

DegreeResult degree_sphere_map_kronecker(const MapOracle& f, const SphereQuadrature& quad,
                                         bool normalize) {
  int k = quad.dim;
  if (f.dim_in != k + 1 || f.dim_out != k + 1)
    fail_precondition("DimensionMismatch", "kronecker degree needs a map R^{k+1} -> R^{k+1}");
  double h = f.fd_step;
  auto eval = [&](const Vec& u) -> Vec {
    Vec v = f(u);
    double norm = v.norm();
    if (norm < 1e-8) fail_precondition("NearZero", "map value too close to the origin");
    return normalize ? Vec(v / norm) : v;
  };

  double total = 0.0;
  Mat cols(k + 1, k + 1);
  for (int i = 0; i < quad.num_nodes(); ++i) {
    Vec u = quad.nodes.row(i).transpose();
    const Mat& frame = quad.frames[i];
    cols.col(0) = eval(u);
    for (int a = 0; a < k; ++a) {
      Vec up = (u + h * frame.col(a)).normalized();
      Vec um = (u - h * frame.col(a)).normalized();
      cols.col(a + 1) = (eval(up) - eval(um)) / (2.0 * h);
    }
    total += quad.weights[i] * cols.determinant();
  }
  total /= sphere_volume(k);

  DegreeResult result;
  result.method = DegreeMethod::Kronecker;
  result.value = total;
  result.rounded = static_cast<int>(std::lround(total));
  result.residual = std::abs(total - result.rounded);
  if (result.residual >= 0.25)
    fail_not_converged("NotConverged", "kronecker residual " + std::to_string(result.residual) +
                                           "; refine the quadrature");
  return result;
}

Vec generic_direction(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-6);
  return v.normalized();
}

MultiplicationReport verify_multiplication(const MapOracle& phi, const MapOracle& psi,
                                           const Box& box, const Vec& p,
                                           const RegularValueOptions& opts,
                                           std::optional<Vec> q0_opt) {
  MultiplicationReport report;
  report.composite = local_degree_regular(compose(psi, phi), box, p, opts);

  Vec q0 = q0_opt ? *q0_opt : phi(box.center());
  report.q0 = q0;
  report.inner = local_degree_regular(phi, box, q0, opts);

  // Bounding box of phi(boundary); since phi is a homeomorphism onto its
  // image, phi(box) lies inside the hull of phi(boundary).
  int n = box.dim();
  int m = opts.boundary_samples_per_axis > 0 ? opts.boundary_samples_per_axis
                                             : auto_boundary_samples(n);
  Vec img_lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec img_hi = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  Vec x(n);
  for (int face_axis = 0; face_axis < n; ++face_axis)
    for (int side = 0; side < 2; ++side) {
      Eigen::VectorXi idx = Eigen::VectorXi::Zero(std::max(n - 1, 1));
      Eigen::VectorXi sizes = Eigen::VectorXi::Constant(std::max(n - 1, 1), n == 1 ? 1 : m);
      do {
        int w = 0;
        for (int a = 0; a < n; ++a) {
          if (a == face_axis) {
            x[a] = side == 0 ? box.lo[a] : box.hi[a];
          } else {
            double t = (n == 1) ? 0.0 : static_cast<double>(idx[w++]) / (m - 1);
            x[a] = box.lo[a] + t * (box.hi[a] - box.lo[a]);
          }
        }
        Vec y = phi(x);
        img_lo = img_lo.cwiseMin(y);
        img_hi = img_hi.cwiseMax(y);
      } while (advance(idx, sizes));
    }
  Vec pad = 0.05 * (img_hi - img_lo) + Vec::Constant(n, 1e-6);
  Box search = make_box(img_lo - pad, img_hi + pad);

  // Enumerate psi-preimages of p inside the search box, then keep the ones
  // lying in phi(box): z is in phi(box) iff deg(phi, box, z) != 0.
  DegreeResult psi_pre = local_degree_regular(psi, search, p, opts);
  int outer = 0;
  for (int i = 0; i < psi_pre.preimages.rows(); ++i) {
    Vec z = psi_pre.preimages.row(i).transpose();
    DegreeResult member = local_degree_regular(phi, box, z, opts);
    if (member.rounded != 0) outer += psi_pre.preimage_signs[i];
  }
  report.outer = outer;
  report.rhs = static_cast<long>(outer) * report.inner.rounded;
  report.agree = report.composite.rounded == report.rhs;
  return report;
}

}  // namespace linkdeg
