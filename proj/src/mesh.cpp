#include "linkdeg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace linkdeg {

namespace {

constexpr double kPi = std::numbers::pi;

int sgn(double v) { return (v > 0) - (v < 0); }

// --- k=3 solid angles -------------------------------------------------------
//
// The signed solid angle of a spherical tetrahedron equals the flux of the
// field x/|x|^4 through any surface spanning the same cone.  We integrate
// over the flat tetrahedron of the four vertices:
//   angle = (det(v0,v1,v2,v3)/6) * mean over the tet of |x|^{-4}  ... (up to
// the volume factor folded into det/6).  The mean is computed by midpoint
// rules on uniform 8^m subdivisions and Richardson-extrapolated; two levels
// of spherical pre-splitting keep the leaf cells small enough that the
// extrapolated total is accurate to ~1e-7 even for the coarsest mesh.

using Tet = Eigen::Matrix4d;  // rows are vertices

// midpoint-subdivision template: rows 0..3 original, 4..9 edge midpoints
// (01,02,03,12,13,23); the eight children tile the parent.
constexpr int kTetChildren[8][4] = {
    {0, 4, 5, 6}, {4, 1, 7, 8}, {5, 7, 2, 9}, {6, 8, 9, 3},
    {4, 5, 6, 8}, {4, 5, 7, 8}, {5, 6, 8, 9}, {5, 7, 8, 9},
};

double mean_inv_r4(const Tet& t, int level) {
  if (level == 0) {
    Eigen::RowVector4d c = 0.25 * (t.row(0) + t.row(1) + t.row(2) + t.row(3));
    double r2 = c.squaredNorm();
    return 1.0 / (r2 * r2);
  }
  Eigen::Matrix<double, 10, 4> q;
  q.topRows<4>() = t;
  q.row(4) = 0.5 * (t.row(0) + t.row(1));
  q.row(5) = 0.5 * (t.row(0) + t.row(2));
  q.row(6) = 0.5 * (t.row(0) + t.row(3));
  q.row(7) = 0.5 * (t.row(1) + t.row(2));
  q.row(8) = 0.5 * (t.row(1) + t.row(3));
  q.row(9) = 0.5 * (t.row(2) + t.row(3));
  double acc = 0.0;
  Tet child;
  for (const auto& idx : kTetChildren) {
    for (int i = 0; i < 4; ++i) child.row(i) = q.row(idx[i]);
    acc += mean_inv_r4(child, level - 1);
  }
  return acc / 8.0;
}

double flat_tet_angle(const Tet& t) {
  double det = t.determinant();
  double a2 = (det / 6.0) * mean_inv_r4(t, 2);
  double a3 = (det / 6.0) * mean_inv_r4(t, 3);
  double a4 = (det / 6.0) * mean_inv_r4(t, 4);
  double r1 = (4.0 * a3 - a2) / 3.0;
  double r2 = (4.0 * a4 - a3) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

double solid_angle_k3(const Tet& t, int presplit) {
  if (presplit == 0) return flat_tet_angle(t);
  Eigen::Matrix<double, 10, 4> q;
  q.topRows<4>() = t;
  q.row(4) = (t.row(0) + t.row(1)).normalized();
  q.row(5) = (t.row(0) + t.row(2)).normalized();
  q.row(6) = (t.row(0) + t.row(3)).normalized();
  q.row(7) = (t.row(1) + t.row(2)).normalized();
  q.row(8) = (t.row(1) + t.row(3)).normalized();
  q.row(9) = (t.row(2) + t.row(3)).normalized();
  double acc = 0.0;
  Tet child;
  for (const auto& idx : kTetChildren) {
    for (int i = 0; i < 4; ++i) child.row(i) = q.row(idx[i]);
    acc += std::abs(solid_angle_k3(child, presplit - 1));
  }
  return (t.determinant() >= 0 ? 1.0 : -1.0) * acc;
}

double simplex_angle(const Mat& verts, int dim) {
  if (dim == 1) {
    return std::atan2(verts(0, 0) * verts(1, 1) - verts(0, 1) * verts(1, 0),
                      verts.row(0).dot(verts.row(1)));
  }
  if (dim == 2) {
    Eigen::Matrix3d m = verts.transpose();
    double num = m.determinant();
    double den = 1.0 + verts.row(0).dot(verts.row(1)) + verts.row(1).dot(verts.row(2)) +
                 verts.row(2).dot(verts.row(0));
    return 2.0 * std::atan2(num, den);
  }
  Tet t = verts;
  return solid_angle_k3(t, 2);
}

void recompute_signs(SphereMesh& mesh) {
  int k = mesh.dim;
  mesh.signs.resize(mesh.num_simplices());
  Mat m(k + 1, k + 1);
  for (int s = 0; s < mesh.num_simplices(); ++s) {
    for (int i = 0; i <= k; ++i) m.col(i) = mesh.vertices.row(mesh.simplices(s, i)).transpose();
    double det = m.determinant();
    if (det == 0.0) fail_internal("degenerate simplex while orienting mesh");
    mesh.signs[s] = sgn(det);
  }
}

}  // namespace

double sphere_volume(int k) {
  switch (k) {
    case 0: return 2.0;
    case 1: return 2.0 * kPi;
    case 2: return 4.0 * kPi;
    case 3: return 2.0 * kPi * kPi;
    default: break;
  }
  if (k < 0) fail_precondition("UnsupportedDimension", "negative sphere dimension");
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

SphereMesh make_sphere_mesh(int dim, int refinement) {
  if (dim < 1 || dim > 3)
    fail_precondition("UnsupportedDimension", "sphere meshes support dim 1..3, got " + std::to_string(dim));
  if (refinement < 0) fail_precondition("UnsupportedDimension", "negative refinement");
  int d = dim + 1;
  SphereMesh mesh;
  mesh.dim = dim;
  mesh.vertices = Mat::Zero(2 * d, d);
  for (int i = 0; i < d; ++i) {
    mesh.vertices(2 * i, i) = 1.0;
    mesh.vertices(2 * i + 1, i) = -1.0;
  }
  int nfacets = 1 << d;
  mesh.simplices.resize(nfacets, d);
  for (int mask = 0; mask < nfacets; ++mask)
    for (int i = 0; i < d; ++i) mesh.simplices(mask, i) = 2 * i + ((mask >> i) & 1);
  recompute_signs(mesh);
  for (int r = 0; r < refinement; ++r) mesh = subdivide_mesh(mesh);
  mesh.refinement_level = refinement;
  return mesh;
}

SphereMesh subdivide_mesh(const SphereMesh& mesh) {
  int k = mesh.dim;
  std::vector<Vec> verts;
  verts.reserve(mesh.num_vertices() * 4);
  for (int i = 0; i < mesh.num_vertices(); ++i) verts.push_back(mesh.vertices.row(i).transpose());
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec m = (verts[a] + verts[b]).normalized();
    int idx = static_cast<int>(verts.size());
    verts.push_back(m);
    midpoint.emplace(key, idx);
    return idx;
  };

  std::vector<std::array<int, 4>> out;  // up to k+1 = 4 entries used
  out.reserve(mesh.num_simplices() * 8);
  for (int s = 0; s < mesh.num_simplices(); ++s) {
    if (k == 1) {
      int a = mesh.simplices(s, 0), b = mesh.simplices(s, 1);
      int m = mid(a, b);
      out.push_back({a, m, 0, 0});
      out.push_back({m, b, 0, 0});
    } else if (k == 2) {
      int a = mesh.simplices(s, 0), b = mesh.simplices(s, 1), c = mesh.simplices(s, 2);
      int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      out.push_back({a, ab, ca, 0});
      out.push_back({ab, b, bc, 0});
      out.push_back({ca, bc, c, 0});
      out.push_back({ab, bc, ca, 0});
    } else {
      int v[4] = {mesh.simplices(s, 0), mesh.simplices(s, 1), mesh.simplices(s, 2),
                  mesh.simplices(s, 3)};
      int m01 = mid(v[0], v[1]), m02 = mid(v[0], v[2]), m03 = mid(v[0], v[3]);
      int m12 = mid(v[1], v[2]), m13 = mid(v[1], v[3]), m23 = mid(v[2], v[3]);
      int q[10] = {v[0], v[1], v[2], v[3], m01, m02, m03, m12, m13, m23};
      for (const auto& idx : kTetChildren)
        out.push_back({q[idx[0]], q[idx[1]], q[idx[2]], q[idx[3]]});
    }
  }

  SphereMesh fine;
  fine.dim = k;
  fine.refinement_level = mesh.refinement_level + 1;
  fine.vertices.resize(static_cast<int>(verts.size()), k + 1);
  for (size_t i = 0; i < verts.size(); ++i) fine.vertices.row(static_cast<int>(i)) = verts[i].transpose();
  fine.simplices.resize(static_cast<int>(out.size()), k + 1);
  for (size_t s = 0; s < out.size(); ++s)
    for (int i = 0; i <= k; ++i) fine.simplices(static_cast<int>(s), i) = out[s][i];
  recompute_signs(fine);
  return fine;
}

double signed_solid_angle(const SphereMesh& mesh, int s) {
  int k = mesh.dim;
  Mat verts(k + 1, k + 1);
  for (int i = 0; i <= k; ++i) verts.row(i) = mesh.vertices.row(mesh.simplices(s, i));
  return mesh.signs[s] * simplex_angle(verts, k);
}

double total_signed_solid_angle(const SphereMesh& mesh) {
  double total = 0.0;
  for (int s = 0; s < mesh.num_simplices(); ++s) total += signed_solid_angle(mesh, s);
  return total;
}

void validate_mesh(const SphereMesh& mesh, double angle_tol) {
  if (mesh.dim < 1 || mesh.dim > 3) fail_precondition("UnsupportedDimension", "mesh dim out of range");
  int k = mesh.dim;
  if (mesh.vertices.cols() != k + 1 || mesh.simplices.cols() != k + 1)
    fail_precondition("DimensionMismatch", "mesh arrays do not match dim");
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (std::abs(mesh.vertices.row(i).norm() - 1.0) > 1e-12)
      fail_precondition("NotUnit", "vertex " + std::to_string(i) + " is not on the unit sphere");
  if (mesh.signs.size() != mesh.num_simplices())
    fail_precondition("DimensionMismatch", "sign array size mismatch");
  for (int s = 0; s < mesh.num_simplices(); ++s) {
    if (mesh.signs[s] != 1 && mesh.signs[s] != -1)
      fail_precondition("BadOrientation", "simplex sign must be +-1");
    for (int i = 0; i <= k; ++i) {
      int v = mesh.simplices(s, i);
      if (v < 0 || v >= mesh.num_vertices())
        fail_precondition("IndexOutOfRange", "simplex refers to missing vertex");
      for (int j = i + 1; j <= k; ++j)
        if (mesh.simplices(s, j) == v)
          fail_precondition("DegenerateSimplex", "repeated vertex in simplex " + std::to_string(s));
    }
  }

  // Each (k-1)-face must be shared by exactly two simplices whose induced
  // orientations cancel; this is the closed-oriented-manifold condition.
  std::map<std::vector<int>, std::pair<int, int>> faces;  // key -> (count, orientation sum)
  std::vector<int> face(k);
  for (int s = 0; s < mesh.num_simplices(); ++s) {
    for (int omit = 0; omit <= k; ++omit) {
      int w = 0;
      for (int i = 0; i <= k; ++i)
        if (i != omit) face[w++] = mesh.simplices(s, i);
      // parity of the sort permutation
      std::vector<int> sorted = face;
      int swaps = 0;
      for (size_t a = 0; a < sorted.size(); ++a)
        for (size_t b = a + 1; b < sorted.size(); ++b)
          if (sorted[a] > sorted[b]) {
            std::swap(sorted[a], sorted[b]);
            ++swaps;
          }
      int orient = mesh.signs[s] * ((omit % 2 == 0) ? 1 : -1) * ((swaps % 2 == 0) ? 1 : -1);
      auto& slot = faces[sorted];
      slot.first += 1;
      slot.second += orient;
    }
  }
  for (const auto& [key, slot] : faces) {
    if (slot.first != 2)
      fail_precondition("NotClosed", "a face is shared by " + std::to_string(slot.first) +
                                         " simplices instead of 2");
    if (slot.second != 0)
      fail_precondition("BadOrientation", "adjacent simplices induce the same face orientation");
  }

  double total = total_signed_solid_angle(mesh);
  if (std::abs(total - sphere_volume(k)) > angle_tol)
    fail_precondition("BadOrientation",
                      "total signed solid angle " + std::to_string(total) + " != vol(S^k)");
}

void save_mesh(const SphereMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_precondition("IoError", "cannot open " + path + " for writing");
  out << mesh.dim << " " << mesh.num_vertices() << " " << mesh.num_simplices() << "\n";
  char buf[32];
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    for (int j = 0; j <= mesh.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", mesh.vertices(i, j));
      out << (j ? " " : "") << buf;
    }
    out << "\n";
  }
  for (int s = 0; s < mesh.num_simplices(); ++s) {
    for (int i = 0; i <= mesh.dim; ++i) out << mesh.simplices(s, i) << " ";
    out << mesh.signs[s] << "\n";
  }
  if (!out) fail_precondition("IoError", "failed writing " + path);
}

SphereMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_precondition("IoError", "cannot open " + path);
  int k = 0, nv = 0, ns = 0;
  if (!(in >> k >> nv >> ns)) fail_precondition("ParseError", "bad mesh header in " + path);
  if (k < 1 || k > 3) fail_precondition("UnsupportedDimension", "mesh dim out of range in " + path);
  if (nv <= 0 || ns <= 0) fail_precondition("ParseError", "bad mesh sizes in " + path);
  SphereMesh mesh;
  mesh.dim = k;
  mesh.vertices.resize(nv, k + 1);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j <= k; ++j)
      if (!(in >> mesh.vertices(i, j))) fail_precondition("ParseError", "truncated vertex data");
  mesh.simplices.resize(ns, k + 1);
  mesh.signs.resize(ns);
  for (int s = 0; s < ns; ++s) {
    for (int i = 0; i <= k; ++i)
      if (!(in >> mesh.simplices(s, i))) fail_precondition("ParseError", "truncated simplex data");
    if (!(in >> mesh.signs[s])) fail_precondition("ParseError", "truncated sign data");
  }
  validate_mesh(mesh);
  return mesh;
}

Mat tangent_frame(const Vec& u) {
  int d = static_cast<int>(u.size());
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(u[a]) < std::abs(u[b]); });

  Mat frame(d, d - 1);
  int built = 0;
  for (int idx : order) {
    if (built == d - 1) break;
    Vec w = Vec::Zero(d);
    w[idx] = 1.0;
    w -= w.dot(u) * u;
    for (int b = 0; b < built; ++b) w -= w.dot(frame.col(b)) * frame.col(b);
    double n = w.norm();
    if (n < 1e-9) continue;
    frame.col(built++) = w / n;
  }
  if (built != d - 1) fail_internal("tangent frame construction failed");

  Mat full(d, d);
  full.col(0) = u;
  full.rightCols(d - 1) = frame;
  if (full.determinant() < 0) frame.col(d - 2) *= -1.0;
  return frame;
}

SphereQuadrature quadrature_from_mesh(const SphereMesh& mesh) {
  SphereQuadrature q;
  q.dim = mesh.dim;
  int n = mesh.num_simplices();
  q.nodes.resize(n, mesh.dim + 1);
  q.weights.resize(n);
  q.frames.reserve(n);
  for (int s = 0; s < n; ++s) {
    Vec c = Vec::Zero(mesh.dim + 1);
    for (int i = 0; i <= mesh.dim; ++i) c += mesh.vertices.row(mesh.simplices(s, i)).transpose();
    c.normalize();
    q.nodes.row(s) = c.transpose();
    double w = signed_solid_angle(mesh, s);
    if (w <= 0) fail_internal("non-positive quadrature weight; mesh orientation broken");
    q.weights[s] = w;
    q.frames.push_back(tangent_frame(c));
  }
  return q;
}

SphereQuadrature uniform_circle_quadrature(int nodes) {
  if (nodes < 3) fail_precondition("UnsupportedDimension", "need at least 3 circle nodes");
  SphereQuadrature q;
  q.dim = 1;
  q.nodes.resize(nodes, 2);
  q.weights = Vec::Constant(nodes, 2.0 * kPi / nodes);
  q.frames.reserve(nodes);
  for (int i = 0; i < nodes; ++i) {
    double th = 2.0 * kPi * (i + 0.5) / nodes;
    q.nodes(i, 0) = std::cos(th);
    q.nodes(i, 1) = std::sin(th);
    Mat f(2, 1);
    f(0, 0) = -q.nodes(i, 1);
    f(1, 0) = q.nodes(i, 0);
    q.frames.push_back(f);
  }
  return q;
}

ProductGrid make_product_grid(const SphereQuadrature& a, const SphereQuadrature& b) {
  return ProductGrid{a, b};
}

// --- interlocked sphere families --------------------------------------------

int iota_half(int n) { return n / 2; }
int iota_nu(int n) { return n - 1 - n / 2; }

namespace {

void check_iota_args(int n, const Vec& param, int param_dim, const Vec& dir, int sphere_dim,
                     const char* which) {
  if (n < 4) fail_precondition("UnsupportedDimension", std::string(which) + " needs ambient dim >= 4");
  if (param.size() != param_dim)
    fail_precondition("DimensionMismatch", std::string(which) + " parameter must have dim " +
                                               std::to_string(param_dim));
  if (dir.size() != sphere_dim + 1)
    fail_precondition("DimensionMismatch", std::string(which) + " sphere point must have dim " +
                                               std::to_string(sphere_dim + 1));
  if (param.norm() > 1.0 + 1e-12)
    fail_precondition("OutOfBall", std::string(which) + " parameter must lie in the closed unit ball");
  if (dir.norm() < 1e-12)
    fail_precondition("NotUnit", std::string(which) + " sphere point must be nonzero");
}

}  // namespace

Vec embed_iota1_point(int n, const Vec& x, const Vec& sigma) {
  int half = iota_half(n), nu = iota_nu(n);
  check_iota_args(n, x, half + 1, sigma, nu, "iota1");
  Vec s = sigma.normalized();
  double radius = (5.0 + x[0]) / 10.0;
  Vec out = Vec::Zero(n);
  for (int i = 0; i <= nu; ++i) out[i] = radius * s[i];
  out[nu] -= 0.25;
  for (int j = 1; j <= half; ++j) out[nu + j] = x[j] / 10.0;
  return out;
}

Vec embed_iota2_point(int n, const Vec& y, const Vec& rho) {
  int half = iota_half(n), nu = iota_nu(n);
  check_iota_args(n, y, nu + 1, rho, half, "iota2");
  Vec r = rho.normalized();
  double radius = (5.0 + y[nu]) / 10.0;
  Vec out = Vec::Zero(n);
  for (int i = 0; i < nu; ++i) out[i] = y[i] / 10.0;
  for (int j = 0; j <= half; ++j) out[nu + j] = radius * r[j];
  out[nu] += 0.25;
  return out;
}

MapOracle iota1_map(int n, const Vec& x) {
  Vec xc = x;
  return MapOracle{iota_nu(n) + 1, n, [n, xc](const Vec& sigma) {
    return embed_iota1_point(n, xc, sigma);
  }};
}

MapOracle iota2_map(int n, const Vec& y) {
  Vec yc = y;
  return MapOracle{iota_half(n) + 1, n, [n, yc](const Vec& rho) {
    return embed_iota2_point(n, yc, rho);
  }};
}

Vec iota1_parameter(int n, const Vec& q, Vec* x_out) {
  int half = iota_half(n), nu = iota_nu(n);
  if (q.size() != n) fail_precondition("DimensionMismatch", "point must have ambient dim");
  Vec w(nu + 1);
  for (int i = 0; i < nu; ++i) w[i] = q[i];
  w[nu] = q[nu] + 0.25;
  double r = w.norm();
  if (r < 1e-12) fail_precondition("OutOfDomain", "point is on the core axis of the first family");
  Vec x(half + 1);
  x[0] = 10.0 * r - 5.0;
  for (int j = 1; j <= half; ++j) x[j] = 10.0 * q[nu + j];
  if (x.norm() > 1.0 + 1e-9)
    fail_precondition("OutOfDomain", "point is not on any sphere of the first family");
  if (x_out) *x_out = x;
  return w / r;
}

Vec iota2_parameter(int n, const Vec& q, Vec* y_out) {
  int half = iota_half(n), nu = iota_nu(n);
  if (q.size() != n) fail_precondition("DimensionMismatch", "point must have ambient dim");
  Vec w(half + 1);
  w[0] = q[nu] - 0.25;
  for (int j = 1; j <= half; ++j) w[j] = q[nu + j];
  double r = w.norm();
  if (r < 1e-12) fail_precondition("OutOfDomain", "point is on the core axis of the second family");
  Vec y(nu + 1);
  for (int i = 0; i < nu; ++i) y[i] = 10.0 * q[i];
  y[nu] = 10.0 * r - 5.0;
  if (y.norm() > 1.0 + 1e-9)
    fail_precondition("OutOfDomain", "point is not on any sphere of the second family");
  if (y_out) *y_out = y;
  return w / r;
}

Mat reflection_last(int n) {
  Mat r = Mat::Identity(n, n);
  r(n - 1, n - 1) = -1.0;
  return r;
}

namespace {

EmbeddedSphere embed_with(const SphereMesh& mesh, const MapOracle& f, const std::string& label) {
  EmbeddedSphere out;
  out.mesh = mesh;
  out.label = label;
  out.image.resize(mesh.num_vertices(), f.dim_out);
  for (int i = 0; i < mesh.num_vertices(); ++i)
    out.image.row(i) = f(mesh.vertices.row(i).transpose()).transpose();
  return out;
}

}  // namespace

EmbeddedSphere embed_iota1(int n, const Vec& x, const SphereMesh& mesh) {
  if (mesh.dim != iota_nu(n))
    fail_precondition("DimensionMismatch", "iota1 needs a mesh of dim " + std::to_string(iota_nu(n)));
  return embed_with(mesh, iota1_map(n, x), "iota1");
}

EmbeddedSphere embed_iota2(int n, const Vec& y, const SphereMesh& mesh) {
  if (mesh.dim != iota_half(n))
    fail_precondition("DimensionMismatch", "iota2 needs a mesh of dim " + std::to_string(iota_half(n)));
  return embed_with(mesh, iota2_map(n, y), "iota2");
}

EmbeddedSphere reflect_last(const EmbeddedSphere& sphere) {
  EmbeddedSphere out = sphere;
  out.image.col(out.image.cols() - 1) *= -1.0;
  out.label = sphere.label + "-reflected";
  return out;
}

double surface_area(const EmbeddedSphere& sphere) {
  int k = sphere.mesh.dim;
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  double total = 0.0;
  Mat edges(sphere.image.cols(), k);
  for (int s = 0; s < sphere.mesh.num_simplices(); ++s) {
    int v0 = sphere.mesh.simplices(s, 0);
    for (int i = 1; i <= k; ++i)
      edges.col(i - 1) =
          (sphere.image.row(sphere.mesh.simplices(s, i)) - sphere.image.row(v0)).transpose();
    double gram = (edges.transpose() * edges).determinant();
    total += std::sqrt(std::max(gram, 0.0)) / factorial;
  }
  return total;
}

}  // namespace linkdeg
