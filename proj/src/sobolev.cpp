#include "linkdeg/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace linkdeg {

namespace {

void check_lattice(const GridFunction& f, int min_res = 2) {
  int n = f.dim();
  if (f.corner.size() != n || f.sides.size() != n)
    fail_precondition("DimensionMismatch", "grid corner/sides/res sizes differ");
  for (int a = 0; a < n; ++a) {
    if (f.res[a] < min_res)
      fail_precondition("UnsupportedDimension",
                        "grid needs at least " + std::to_string(min_res) + " nodes per axis");
    if (!(f.sides[a] > 0)) fail_precondition("EmptySubdomain", "grid sides must be positive");
  }
  if (f.values.rows() != f.num_nodes() || f.values.cols() != f.value_dim)
    fail_precondition("DimensionMismatch", "grid value array has wrong shape");
}

bool advance(Eigen::VectorXi& idx, const Eigen::VectorXi& sizes) {
  for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
    if (++idx[a] < sizes[a]) return true;
    idx[a] = 0;
  }
  return false;
}

double hs_gradient_pow(const GridFunction& f, const Eigen::VectorXi& mi, double p,
                       const std::vector<int>& axes) {
  double sq = 0.0;
  for (int c = 0; c < f.value_dim; ++c)
    for (int a : axes) {
      double d = f.derivative(mi, c, a);
      sq += d * d;
    }
  return std::pow(sq, 0.5 * p);
}

}  // namespace

long GridFunction::num_nodes() const {
  long total = 1;
  for (int a = 0; a < dim(); ++a) total *= res[a];
  return total;
}

long GridFunction::flat_index(const Eigen::VectorXi& mi) const {
  long flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * res[a] + mi[a];
  return flat;
}

Eigen::VectorXi GridFunction::multi_index(long flat) const {
  Eigen::VectorXi mi(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    mi[a] = static_cast<int>(flat % res[a]);
    flat /= res[a];
  }
  return mi;
}

Vec GridFunction::node_point(const Eigen::VectorXi& mi) const {
  Vec x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = corner[a] + mi[a] * spacing(a);
  return x;
}

double GridFunction::node_weight(const Eigen::VectorXi& mi) const {
  double w = 1.0;
  for (int a = 0; a < dim(); ++a) {
    double edge = (mi[a] == 0 || mi[a] == res[a] - 1) ? 0.5 : 1.0;
    w *= edge * spacing(a);
  }
  return w;
}

double GridFunction::derivative(const Eigen::VectorXi& mi, int component, int axis) const {
  double h = spacing(axis);
  int i = mi[axis];
  Eigen::VectorXi a = mi, b = mi;
  if (i > 0 && i < res[axis] - 1) {
    a[axis] = i + 1;
    b[axis] = i - 1;
    return (values(flat_index(a), component) - values(flat_index(b), component)) / (2.0 * h);
  }
  if (res[axis] < 3)
    fail_precondition("UnsupportedDimension", "derivatives need at least 3 nodes per axis");
  int dir = (i == 0) ? 1 : -1;
  a[axis] = i + dir;
  b[axis] = i + 2 * dir;
  double f0 = values(flat_index(mi), component);
  double f1 = values(flat_index(a), component);
  double f2 = values(flat_index(b), component);
  return dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

Vec GridFunction::interpolate(const Vec& x, bool zero_outside) const {
  int n = dim();
  if (x.size() != n) fail_precondition("DimensionMismatch", "point dimension mismatch");
  for (int a = 0; a < n; ++a) {
    if (x[a] < corner[a] - 1e-9 || x[a] > corner[a] + sides[a] + 1e-9) {
      if (zero_outside) return Vec::Zero(value_dim);
      fail_precondition("OutOfDomain", "interpolation point outside the grid box");
    }
  }
  Eigen::VectorXi base(n);
  Vec frac(n);
  for (int a = 0; a < n; ++a) {
    double t = (x[a] - corner[a]) / spacing(a);
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, res[a] - 2);
    base[a] = i;
    frac[a] = std::clamp(t - i, 0.0, 1.0);
  }
  Vec out = Vec::Zero(value_dim);
  Eigen::VectorXi corner_idx(n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      bool hi = (mask >> a) & 1;
      corner_idx[a] = base[a] + (hi ? 1 : 0);
      w *= hi ? frac[a] : (1.0 - frac[a]);
    }
    if (w != 0.0) out += w * values.row(flat_index(corner_idx)).transpose();
  }
  return out;
}

GridFunction sample_grid(const MapOracle& f, const Vec& corner, const Vec& sides,
                         const Eigen::VectorXi& res) {
  GridFunction g;
  g.corner = corner;
  g.sides = sides;
  g.res = res;
  g.value_dim = f.dim_out;
  if (corner.size() != f.dim_in || sides.size() != f.dim_in || res.size() != f.dim_in)
    fail_precondition("DimensionMismatch", "grid box dimension does not match the oracle");
  for (int a = 0; a < g.dim(); ++a) {
    if (g.res[a] < 2)
      fail_precondition("UnsupportedDimension", "grid needs at least 2 nodes per axis");
    if (!(g.sides[a] > 0)) fail_precondition("EmptySubdomain", "grid sides must be positive");
  }
  g.values.resize(g.num_nodes(), g.value_dim);
  Eigen::VectorXi mi = Eigen::VectorXi::Zero(g.dim());
  long flat = 0;
  do {
    g.values.row(flat++) = f(g.node_point(mi)).transpose();
  } while (advance(mi, g.res));
  return g;
}

GridFunction sample_grid_cube(const MapOracle& f, double lo, double hi, int res_per_axis) {
  int n = f.dim_in;
  return sample_grid(f, Vec::Constant(n, lo), Vec::Constant(n, hi - lo),
                     Eigen::VectorXi::Constant(n, res_per_axis));
}

namespace {

// shared implementation: trapezoid quadrature of |f|^p + |Df|^p with an
// optional per-node weight mask
double w1p_core(const GridFunction& f, double p,
                const std::function<double(const Eigen::VectorXi&, const Vec&)>& mask) {
  check_lattice(f, 3);
  std::vector<int> all_axes(f.dim());
  for (int a = 0; a < f.dim(); ++a) all_axes[a] = a;
  double total = 0.0;
  Eigen::VectorXi mi = Eigen::VectorXi::Zero(f.dim());
  long flat = 0;
  do {
    Vec x = f.node_point(mi);
    double w = f.node_weight(mi) * mask(mi, x);
    if (w > 0.0) {
      double vp = std::pow(f.values.row(flat).norm(), p);
      total += w * (vp + hs_gradient_pow(f, mi, p, all_axes));
    }
    ++flat;
  } while (advance(mi, f.res));
  return std::pow(total, 1.0 / p);
}

}  // namespace

double w1p_norm(const GridFunction& f, double p, const std::optional<Box>& subdomain) {
  if (p < 1.0) fail_precondition("UnsupportedDimension", "need p >= 1");
  if (!subdomain)
    return w1p_core(f, p, [](const Eigen::VectorXi&, const Vec&) { return 1.0; });

  // restrict to the sub-lattice of nodes inside the box and rebuild the
  // trapezoid weights there
  const Box& sub = *subdomain;
  if (sub.dim() != f.dim()) fail_precondition("DimensionMismatch", "subdomain dimension mismatch");
  int n = f.dim();
  Eigen::VectorXi lo(n), hi(n);
  for (int a = 0; a < n; ++a) {
    double h = f.spacing(a);
    lo[a] = static_cast<int>(std::ceil((sub.lo[a] - f.corner[a]) / h - 1e-9));
    hi[a] = static_cast<int>(std::floor((sub.hi[a] - f.corner[a]) / h + 1e-9));
    lo[a] = std::max(lo[a], 0);
    hi[a] = std::min(hi[a], f.res[a] - 1);
    if (hi[a] - lo[a] < 1)
      fail_precondition("EmptySubdomain", "subdomain contains fewer than 2 nodes on axis " +
                                              std::to_string(a));
  }
  check_lattice(f, 3);
  std::vector<int> all_axes(n);
  for (int a = 0; a < n; ++a) all_axes[a] = a;
  double total = 0.0;
  Eigen::VectorXi span = hi - lo + Eigen::VectorXi::Ones(n);
  Eigen::VectorXi rel = Eigen::VectorXi::Zero(n);
  do {
    Eigen::VectorXi mi = lo + rel;
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      double edge = (rel[a] == 0 || rel[a] == span[a] - 1) ? 0.5 : 1.0;
      w *= edge * f.spacing(a);
    }
    double vp = std::pow(f.values.row(f.flat_index(mi)).norm(), p);
    total += w * (vp + hs_gradient_pow(f, mi, p, all_axes));
  } while (advance(rel, span));
  return std::pow(total, 1.0 / p);
}

double w1p_ball_norm(const GridFunction& f, double p, const Vec& center, double radius) {
  if (p < 1.0) fail_precondition("UnsupportedDimension", "need p >= 1");
  if (center.size() != f.dim()) fail_precondition("DimensionMismatch", "center dimension mismatch");
  double r2 = radius * radius;
  return w1p_core(f, p, [&](const Eigen::VectorXi&, const Vec& x) {
    return (x - center).squaredNorm() <= r2 ? 1.0 : 0.0;
  });
}

double w1p_distance(const GridFunction& f, const GridFunction& g, double p) {
  if (f.dim() != g.dim() || f.value_dim != g.value_dim || f.res != g.res ||
      (f.corner - g.corner).norm() > 1e-12 || (f.sides - g.sides).norm() > 1e-12)
    fail_precondition("DimensionMismatch", "grids live on different lattices");
  GridFunction diff = f;
  diff.values -= g.values;
  return w1p_norm(diff, p);
}

double lp_norm(const GridFunction& f, double p) {
  if (p < 1.0) fail_precondition("UnsupportedDimension", "need p >= 1");
  check_lattice(f, 2);
  double total = 0.0;
  Eigen::VectorXi mi = Eigen::VectorXi::Zero(f.dim());
  long flat = 0;
  do {
    total += f.node_weight(mi) * std::pow(f.values.row(flat++).norm(), p);
  } while (advance(mi, f.res));
  return std::pow(total, 1.0 / p);
}

MapOracle blow_up_map(const MapOracle& f, const Vec& x0, double r) {
  if (x0.size() != f.dim_in) fail_precondition("DimensionMismatch", "base point dimension mismatch");
  if (!(r > 0)) fail_precondition("OutOfDomain", "blow-up radius must be positive");
  Vec f0 = f(x0);
  Vec x0c = x0;
  MapOracle fc = f;
  return MapOracle{f.dim_in, f.dim_out,
                   [fc, x0c, f0, r](const Vec& x) -> Vec { return (fc.fn(x0c + r * x) - f0) / r; },
                   f.fd_step};
}

GridFunction blow_up_grid(const MapOracle& f, const Vec& x0, double r, int res_per_axis) {
  return sample_grid_cube(blow_up_map(f, x0, r), -1.0, 1.0, res_per_axis);
}

GridFunction blow_up_grid(const GridFunction& f, const Vec& x0, double r, int res_per_axis) {
  check_lattice(f, 2);
  int n = f.dim();
  if (x0.size() != n) fail_precondition("DimensionMismatch", "base point dimension mismatch");
  if (!(r > 0)) fail_precondition("OutOfDomain", "blow-up radius must be positive");
  for (int a = 0; a < n; ++a)
    if (x0[a] - r < f.corner[a] - 1e-12 || x0[a] + r > f.corner[a] + f.sides[a] + 1e-12)
      fail_precondition("OutOfDomain", "blow-up box leaves the sampled domain");
  Vec f0 = f.interpolate(x0);
  GridFunction g;
  g.corner = Vec::Constant(n, -1.0);
  g.sides = Vec::Constant(n, 2.0);
  g.res = Eigen::VectorXi::Constant(n, res_per_axis);
  g.value_dim = f.value_dim;
  g.values.resize(g.num_nodes(), g.value_dim);
  Eigen::VectorXi mi = Eigen::VectorXi::Zero(n);
  long flat = 0;
  do {
    Vec x = g.node_point(mi);
    g.values.row(flat++) = ((f.interpolate(x0 + r * x) - f0) / r).transpose();
  } while (advance(mi, g.res));
  return g;
}

GoodPointReport good_point_check(const GridFunction& f, const Eigen::VectorXi& node, double p,
                                 const std::vector<double>& radii) {
  check_lattice(f, 3);
  int n = f.dim();
  if (node.size() != n) fail_precondition("DimensionMismatch", "node index dimension mismatch");
  for (int a = 0; a < n; ++a)
    if (node[a] < 0 || node[a] >= f.res[a])
      fail_precondition("IndexOutOfRange", "node index outside the lattice");
  if (radii.size() < 2) fail_precondition("EmptySubdomain", "need at least two radii");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1]))
      fail_precondition("EmptySubdomain", "radii must be strictly decreasing");

  GoodPointReport report;
  report.point = f.node_point(node);
  report.radii = radii;
  Vec x = report.point;
  Vec fx = f.values.row(f.flat_index(node)).transpose();
  Mat dfx(f.value_dim, n);
  for (int c = 0; c < f.value_dim; ++c)
    for (int a = 0; a < n; ++a) dfx(c, a) = f.derivative(node, c, a);

  for (double r : radii) {
    for (int a = 0; a < n; ++a)
      if (x[a] - r < f.corner[a] - 1e-12 || x[a] + r > f.corner[a] + f.sides[a] + 1e-12)
        fail_precondition("OutOfDomain", "ball leaves the sampled domain");
    Eigen::VectorXi reach(n);
    for (int a = 0; a < n; ++a) reach[a] = static_cast<int>(std::floor(r / f.spacing(a)));
    long count = 0;
    double cz = 0.0, leb = 0.0;
    Eigen::VectorXi off = -reach;
    Eigen::VectorXi span = 2 * reach + Eigen::VectorXi::Ones(n);
    Eigen::VectorXi rel = Eigen::VectorXi::Zero(n);
    do {
      Eigen::VectorXi mi = node + off + rel;
      Vec y = f.node_point(mi);
      if ((y - x).norm() > r + 1e-12) continue;
      ++count;
      Vec fy = f.values.row(f.flat_index(mi)).transpose();
      cz += std::pow((fy - fx - dfx * (y - x)).norm() / r, p);
      double osc2 = 0.0;
      for (int c = 0; c < f.value_dim; ++c)
        for (int a = 0; a < n; ++a) {
          double d = f.derivative(mi, c, a) - dfx(c, a);
          osc2 += d * d;
        }
      leb += std::pow(osc2, 0.5 * p);
    } while (advance(rel, span));
    if (count < 2)
      fail_precondition("EmptySubdomain", "radius " + std::to_string(r) + " captures no neighbors");
    report.cz_averages.push_back(cz / count);
    report.lebesgue_averages.push_back(leb / count);
  }

  auto classify = [](const std::vector<double>& v) {
    double first = v.front(), last = v.back();
    bool monotone = true;
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1] * 1.1 + 1e-15) monotone = false;
    if (monotone && last <= 0.1 * first + 1e-15) return +1;  // decays
    if (last > 0.5 * first + 1e-14) return -1;               // stalls
    return 0;
  };
  int a = classify(report.cz_averages), b = classify(report.lebesgue_averages);
  if (a > 0 && b > 0)
    report.verdict = "good";
  else if (a < 0 || b < 0)
    report.verdict = "bad";
  else
    report.verdict = "inconclusive";
  return report;
}

SliceReport fubini_slices(const GridFunction& f, int slice_axes, double p,
                          const GridFunction* g) {
  check_lattice(f, 3);
  int n = f.dim();
  if (slice_axes < 1 || slice_axes >= n)
    fail_precondition("UnsupportedDimension", "slice_axes must be in [1, dim)");
  if (g) {
    if (g->dim() != n || g->res != f.res || g->value_dim != f.value_dim)
      fail_precondition("DimensionMismatch", "comparison grid lives on a different lattice");
  }
  int lead = n - slice_axes;
  std::vector<int> slice_dirs(slice_axes), all_dirs(n);
  for (int a = 0; a < slice_axes; ++a) slice_dirs[a] = lead + a;
  for (int a = 0; a < n; ++a) all_dirs[a] = a;

  SliceReport report;
  Eigen::VectorXi lead_sizes = f.res.head(lead);
  Eigen::VectorXi slice_sizes = f.res.tail(slice_axes);
  Eigen::VectorXi lead_idx = Eigen::VectorXi::Zero(lead);
  Eigen::VectorXi mi(n);
  do {
    double intr = 0.0, full = 0.0, dist = 0.0;
    Eigen::VectorXi slice_idx = Eigen::VectorXi::Zero(slice_axes);
    do {
      mi.head(lead) = lead_idx;
      mi.tail(slice_axes) = slice_idx;
      double w = 1.0;  // trapezoid weights over the slice block only
      for (int a = 0; a < slice_axes; ++a) {
        int i = slice_idx[a];
        double edge = (i == 0 || i == slice_sizes[a] - 1) ? 0.5 : 1.0;
        w *= edge * f.spacing(lead + a);
      }
      double vp = std::pow(f.values.row(f.flat_index(mi)).norm(), p);
      intr += w * (vp + hs_gradient_pow(f, mi, p, slice_dirs));
      full += w * (vp + hs_gradient_pow(f, mi, p, all_dirs));
      if (g) {
        double dvp = std::pow((f.values.row(f.flat_index(mi)) - g->values.row(g->flat_index(mi))).norm(), p);
        double dgrad = 0.0;
        for (int c = 0; c < f.value_dim; ++c)
          for (int a : slice_dirs) {
            double d = f.derivative(mi, c, a) - g->derivative(mi, c, a);
            dgrad += d * d;
          }
        dist += w * (dvp + std::pow(dgrad, 0.5 * p));
      }
    } while (advance(slice_idx, slice_sizes));

    report.slice_norms.push_back(std::pow(intr, 1.0 / p));
    report.slice_norms_full.push_back(std::pow(full, 1.0 / p));
    if (g) report.slice_distances.push_back(std::pow(dist, 1.0 / p));
    double lead_w = 1.0;
    for (int a = 0; a < lead; ++a) {
      int i = lead_idx[a];
      double edge = (i == 0 || i == lead_sizes[a] - 1) ? 0.5 : 1.0;
      lead_w *= edge * f.spacing(a);
    }
    report.fubini_lhs += lead_w * full;
  } while (advance(lead_idx, lead_sizes));

  report.slice_count = static_cast<long>(report.slice_norms.size());
  report.fubini_rhs = std::pow(w1p_norm(f, p), p);
  report.fubini_gap = std::abs(report.fubini_lhs - report.fubini_rhs) /
                      std::max(report.fubini_rhs, 1e-300);
  return report;
}

GridFunction maximal_function(const GridFunction& f, const std::vector<double>& radii) {
  check_lattice(f, 2);
  if (f.value_dim != 1)
    fail_precondition("DimensionMismatch", "maximal function expects a scalar grid function");
  if (radii.empty()) fail_precondition("EmptySubdomain", "need at least one radius");
  int n = f.dim();

  // precompute lattice offsets per radius
  struct BallOffsets {
    Eigen::VectorXi reach;
    std::vector<long> flat_offsets;
  };
  std::vector<BallOffsets> balls;
  for (double r : radii) {
    if (!(r > 0)) fail_precondition("EmptySubdomain", "radii must be positive");
    BallOffsets b;
    b.reach.resize(n);
    for (int a = 0; a < n; ++a) b.reach[a] = static_cast<int>(std::floor(r / f.spacing(a)));
    Eigen::VectorXi span = 2 * b.reach + Eigen::VectorXi::Ones(n);
    Eigen::VectorXi rel = Eigen::VectorXi::Zero(n);
    do {
      Eigen::VectorXi off = rel - b.reach;
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) {
        double da = off[a] * f.spacing(a);
        d2 += da * da;
      }
      if (d2 <= r * r + 1e-12) {
        long flat = 0;
        for (int a = 0; a < n; ++a) flat = flat * f.res[a] + off[a];
        // note: this linearization is only valid when applied to interior
        // nodes where the whole ball stays inside the lattice
        b.flat_offsets.push_back(flat);
      }
    } while (advance(rel, span));
    balls.push_back(std::move(b));
  }

  GridFunction out = f;
  Eigen::VectorXi mi = Eigen::VectorXi::Zero(n);
  long flat = 0;
  do {
    double best = std::abs(f.values(flat, 0));
    for (const auto& b : balls) {
      bool fits = true;
      for (int a = 0; a < n; ++a)
        if (mi[a] - b.reach[a] < 0 || mi[a] + b.reach[a] > f.res[a] - 1) {
          fits = false;
          break;
        }
      if (!fits) continue;
      double sum = 0.0;
      for (long off : b.flat_offsets) sum += std::abs(f.values(flat + off, 0));
      best = std::max(best, sum / static_cast<double>(b.flat_offsets.size()));
    }
    out.values(flat, 0) = best;
    ++flat;
  } while (advance(mi, f.res));
  return out;
}

ChainRuleReport chain_rule_check(const MapOracle& f, const MapOracle& f_inv, const Box& box,
                                 int nsamples, unsigned seed, double exclusion_tol) {
  if (f.dim_in != f.dim_out || f_inv.dim_in != f_inv.dim_out || f.dim_in != f_inv.dim_in)
    fail_precondition("DimensionMismatch", "chain rule check needs square maps of equal dim");
  if (box.dim() != f.dim_in) fail_precondition("DimensionMismatch", "box dimension mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChainRuleReport report;
  int n = f.dim_in;
  Vec x(n);
  for (int s = 0; s < nsamples; ++s) {
    for (int a = 0; a < n; ++a) x[a] = box.lo[a] + unit(rng) * (box.hi[a] - box.lo[a]);
    Mat j = f.jacobian(x);
    double det = j.determinant();
    if (std::abs(det) < exclusion_tol) {
      ++report.excluded;
      continue;
    }
    ++report.samples;
    Vec y = f(x);
    double id_err = (f_inv(y) - x).norm();
    report.max_identity_error = std::max(report.max_identity_error, id_err);
    if (id_err > 1e-8)
      fail_precondition("NotInverse", "claimed inverse misses by " + std::to_string(id_err));
    Mat lhs = j.inverse();
    Mat rhs = f_inv.jacobian(y);
    report.max_chain_error =
        std::max(report.max_chain_error, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return report;
}

void save_grid(const GridFunction& f, const std::string& path) {
  check_lattice(f, 2);
  std::ofstream out(path);
  if (!out) fail_precondition("IoError", "cannot open " + path + " for writing");
  int n = f.dim();
  out << n << " " << f.value_dim << "\n";
  char buf[32];
  auto row = [&](const auto& v, int count) {
    for (int i = 0; i < count; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v[i]));
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  };
  Eigen::VectorXd resd = f.res.cast<double>();
  row(resd, n);
  row(f.corner, n);
  row(f.sides, n);
  for (long i = 0; i < f.num_nodes(); ++i) {
    for (int c = 0; c < f.value_dim; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", f.values(i, c));
      out << (c ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) fail_precondition("IoError", "failed writing " + path);
}

GridFunction load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_precondition("IoError", "cannot open " + path);
  int n = 0, m = 0;
  if (!(in >> n >> m) || n < 1 || m < 1)
    fail_precondition("ParseError", "bad grid header in " + path);
  GridFunction f;
  f.res.resize(n);
  f.corner.resize(n);
  f.sides.resize(n);
  f.value_dim = m;
  for (int a = 0; a < n; ++a) {
    double v;
    if (!(in >> v)) fail_precondition("ParseError", "truncated grid resolution");
    f.res[a] = static_cast<int>(v);
  }
  for (int a = 0; a < n; ++a)
    if (!(in >> f.corner[a])) fail_precondition("ParseError", "truncated grid corner");
  for (int a = 0; a < n; ++a)
    if (!(in >> f.sides[a])) fail_precondition("ParseError", "truncated grid sides");
  long total = 1;
  for (int a = 0; a < n; ++a) total *= f.res[a];
  f.values.resize(total, m);
  for (long i = 0; i < total; ++i)
    for (int c = 0; c < m; ++c)
      if (!(in >> f.values(i, c))) fail_precondition("ParseError", "truncated grid values");
  check_lattice(f, 2);
  return f;
}

}  // namespace linkdeg
