#pragma once

#include "linkdeg/common.hpp"
#include "linkdeg/map_oracle.hpp"
#include "linkdeg/mesh.hpp"

namespace linkdeg {

struct LinkingResult {
  double value = 0.0;
  int rounded = 0;
  double residual = 0.0;
  double separation = 0.0;  // min distance between sampled image points
  long nodes_used = 0;
  bool valid() const { return residual < 0.5; }
};

/// Classic double-integral linking number of two closed curves in R^3:
///   (1/4pi) * sum det([c1'(s), c2'(t), c1(s)-c2(t)]) / |c1(s)-c2(t)|^3
/// over a uniform parameter grid.  Curves are given as oracles S^1 -> R^3
/// (unit 2-vector input); derivatives are central differences along the
/// parameter circle.  Throws ImagesIntersect when the sampled images come
/// within 1e-6, NotConverged when the residual is >= 0.25.
LinkingResult gauss_linking_circles(const MapOracle& c1, const MapOracle& c2, int nodes);

/// Linking number of g1: S^k -> R^n, g2: S^l -> R^n (disjoint images,
/// k + l = n - 1) as the degree of the normalized difference map
///   psi(u, v) = (g2(v) - g1(u)) / |g2(v) - g1(u)|
/// on the product grid, with determinant columns ordered
/// (d_u psi ..., d_v psi ..., psi).  This orientation convention makes the
/// result agree with gauss_linking_circles for curve pairs in R^3.
LinkingResult linking_number(const MapOracle& g1, const MapOracle& g2, const ProductGrid& grid);

/// Recompute a linking number after applying a homeomorphism h of the
/// ambient space to both spheres, and compare against the sense of h
/// (sign of det Dh at a probe point on the first image).
struct InvarianceReport {
  LinkingResult before, after;
  int sense = 0;
  bool consistent = false;
};

InvarianceReport verify_linking_invariance(const MapOracle& c1, const MapOracle& c2,
                                           const MapOracle& h, int nodes);

InvarianceReport verify_linking_invariance(const MapOracle& g1, const MapOracle& g2,
                                           const MapOracle& h, const ProductGrid& grid);

}  // namespace linkdeg
