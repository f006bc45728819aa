#include "linkdeg/linking.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace linkdeg {

namespace {

constexpr double kSeparationFloor = 1e-6;

LinkingResult finish(double value, double separation, long nodes) {
  LinkingResult r;
  r.value = value;
  r.rounded = static_cast<int>(std::lround(value));
  r.residual = std::abs(value - r.rounded);
  r.separation = separation;
  r.nodes_used = nodes;
  if (r.residual >= 0.25)
    fail_not_converged("NotConverged", "linking residual " + std::to_string(r.residual) +
                                           "; refine the grid");
  return r;
}

// values of an oracle at all nodes and at the +-h frame perturbations
struct SampledSphereMap {
  Mat at;                          // N x n
  std::vector<std::vector<Mat>> perturbed;  // [node][direction] = n x 2 (plus, minus)
};

SampledSphereMap sample_map(const MapOracle& g, const SphereQuadrature& q, double h) {
  SampledSphereMap s;
  int n = g.dim_out;
  s.at.resize(q.num_nodes(), n);
  s.perturbed.resize(q.num_nodes());
  for (int i = 0; i < q.num_nodes(); ++i) {
    Vec u = q.nodes.row(i).transpose();
    s.at.row(i) = g(u).transpose();
    s.perturbed[i].reserve(q.dim);
    for (int a = 0; a < q.dim; ++a) {
      Mat pm(n, 2);
      pm.col(0) = g((u + h * q.frames[i].col(a)).normalized());
      pm.col(1) = g((u - h * q.frames[i].col(a)).normalized());
      s.perturbed[i].push_back(pm);
    }
  }
  return s;
}

}  // namespace

LinkingResult gauss_linking_circles(const MapOracle& c1, const MapOracle& c2, int nodes) {
  if (c1.dim_in != 2 || c2.dim_in != 2 || c1.dim_out != 3 || c2.dim_out != 3)
    fail_precondition("DimensionMismatch", "gauss_linking_circles needs two curves S^1 -> R^3");
  if (nodes < 3) fail_precondition("UnsupportedDimension", "need at least 3 nodes");

  const double two_pi = 2.0 * std::numbers::pi;
  double h = std::min(c1.fd_step, c2.fd_step);
  Mat p1(nodes, 3), p2(nodes, 3), d1(nodes, 3), d2(nodes, 3);
  for (int i = 0; i < nodes; ++i) {
    double th = two_pi * i / nodes;
    Vec u(2), up(2), um(2);
    u << std::cos(th), std::sin(th);
    up << std::cos(th + h), std::sin(th + h);
    um << std::cos(th - h), std::sin(th - h);
    p1.row(i) = c1(u).transpose();
    d1.row(i) = ((c1(up) - c1(um)) / (2.0 * h)).transpose();
    p2.row(i) = c2(u).transpose();
    d2.row(i) = ((c2(up) - c2(um)) / (2.0 * h)).transpose();
  }

  double sep = std::numeric_limits<double>::infinity();
  double total = 0.0;
  Eigen::Matrix3d m;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      Eigen::Vector3d diff = (p1.row(i) - p2.row(j)).transpose();
      double dist = diff.norm();
      sep = std::min(sep, dist);
      m.col(0) = d1.row(i).transpose();
      m.col(1) = d2.row(j).transpose();
      m.col(2) = diff;
      total += m.determinant() / (dist * dist * dist);
    }
  if (sep <= kSeparationFloor)
    fail_precondition("ImagesIntersect", "curve images come within " + std::to_string(sep));
  total *= (two_pi / nodes) * (two_pi / nodes) / (4.0 * std::numbers::pi);
  return finish(total, sep, static_cast<long>(nodes) * nodes);
}

LinkingResult linking_number(const MapOracle& g1, const MapOracle& g2, const ProductGrid& grid) {
  int k = grid.first.dim, l = grid.second.dim;
  int n = k + l + 1;
  if (g1.dim_in != k + 1 || g2.dim_in != l + 1)
    fail_precondition("DimensionMismatch", "sphere maps do not match the product grid");
  if (g1.dim_out != n || g2.dim_out != n)
    fail_precondition("DimensionMismatch", "linking_number needs target dim k + l + 1");

  double h = std::min(g1.fd_step, g2.fd_step);
  SampledSphereMap s1 = sample_map(g1, grid.first, h);
  SampledSphereMap s2 = sample_map(g2, grid.second, h);

  double sep = std::numeric_limits<double>::infinity();
  double total = 0.0;
  Mat cols(n, n);
  Vec diff(n), dplus(n), dminus(n);
  for (int i = 0; i < grid.first.num_nodes(); ++i) {
    for (int j = 0; j < grid.second.num_nodes(); ++j) {
      diff = (s2.at.row(j) - s1.at.row(i)).transpose();
      double dist = diff.norm();
      sep = std::min(sep, dist);
      if (dist <= kSeparationFloor)
        fail_precondition("ImagesIntersect", "sphere images come within " + std::to_string(dist));
      int c = 0;
      for (int a = 0; a < k; ++a, ++c) {
        dplus = (s2.at.row(j).transpose() - s1.perturbed[i][a].col(0)).normalized();
        dminus = (s2.at.row(j).transpose() - s1.perturbed[i][a].col(1)).normalized();
        cols.col(c) = (dplus - dminus) / (2.0 * h);
      }
      for (int b = 0; b < l; ++b, ++c) {
        dplus = (s2.perturbed[j][b].col(0) - s1.at.row(i).transpose()).normalized();
        dminus = (s2.perturbed[j][b].col(1) - s1.at.row(i).transpose()).normalized();
        cols.col(c) = (dplus - dminus) / (2.0 * h);
      }
      cols.col(c) = diff / dist;
      total += grid.first.weights[i] * grid.second.weights[j] * cols.determinant();
    }
  }
  total /= sphere_volume(n - 1);
  return finish(total, sep, grid.num_nodes());
}

InvarianceReport verify_linking_invariance(const MapOracle& c1, const MapOracle& c2,
                                           const MapOracle& h, int nodes) {
  InvarianceReport rep;
  rep.before = gauss_linking_circles(c1, c2, nodes);
  rep.after = gauss_linking_circles(compose(h, c1), compose(h, c2), nodes);
  Vec probe(2);
  probe << 1.0, 0.0;
  double det = h.jacobian_det(c1(probe));
  rep.sense = (det > 0) - (det < 0);
  rep.consistent = rep.after.rounded == rep.sense * rep.before.rounded;
  return rep;
}

InvarianceReport verify_linking_invariance(const MapOracle& g1, const MapOracle& g2,
                                           const MapOracle& h, const ProductGrid& grid) {
  InvarianceReport rep;
  rep.before = linking_number(g1, g2, grid);
  rep.after = linking_number(compose(h, g1), compose(h, g2), grid);
  Vec probe = grid.first.nodes.row(0).transpose();
  double det = h.jacobian_det(g1(probe));
  rep.sense = (det > 0) - (det < 0);
  rep.consistent = rep.after.rounded == rep.sense * rep.before.rounded;
  return rep;
}

}  // namespace linkdeg
