#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nodalcone/polynomial.hpp"

namespace nodalcone {

// Hyperplane {x : normal . x = offset} with |normal| = 1 and a canonical sign
// (first component of the normal that exceeds the sign tolerance is positive).
struct Hyperplane {
  std::vector<double> normal;
  double offset = 0.0;

  int dimension() const { return static_cast<int>(normal.size()); }
  double signed_distance(std::span<const double> x) const;
};

Hyperplane make_hyperplane(std::vector<double> normal, double offset);

// Max-norm closeness of canonical forms, tolerance 1e-9 by default.
bool hyperplane_close(const Hyperplane& a, const Hyperplane& b, double tol = 1e-9);

std::vector<double> mirror_point(std::span<const double> y, const Hyperplane& h);

// Image of hyperplane `h` under the reflection across `mirror`.
Hyperplane reflect_hyperplane(const Hyperplane& h, const Hyperplane& mirror);

// Reflection across a rational hyperplane {n . x = c} as an exact affine map.
// Requires |n|^2 != 0; the map is an exact orthogonal involution.
AffineMapQ reflection_map_exact(const RationalVec& normal, const Rational& offset);
AffineMapD reflection_map(const Hyperplane& h);

struct CoxeterClosureResult {
  std::vector<Hyperplane> hyperplanes;     // closed system, or partial when !closed
  bool closed = false;                     // false means the bound was exceeded
  std::uint64_t group_order_bound = 0;     // 2^(plane count), saturated at max
  std::optional<std::vector<double>> common_point;
};

// Smallest reflection-closed system containing the given hyperplanes, up to
// max_planes planes.  The generated group order is bounded by 2^q for q
// planes; a common point is reported when all planes (nearly) meet.
CoxeterClosureResult coxeter_closure(const std::vector<Hyperplane>& initial,
                                     int max_planes = 64);

// Finitely supported distribution sum_i G_i(d) delta_{y_i} with exact data.
struct FiniteDistribution {
  struct Source {
    RationalVec point;
    Polynomial weight;
  };

  int dimension = 0;
  std::vector<Source> sources;

  void validate() const;  // distinct points, matching dimensions, some weight != 0
  std::vector<std::vector<double>> support_points() const;
  int max_weight_degree() const;
};

// Pullback along an affine map sigma with exactly orthogonal linear part:
// sources move by sigma^{-1}, weights compose with the linear part, so that
// pairing against any test function transported by sigma is preserved.
FiniteDistribution pullback(const FiniteDistribution& f, const AffineMapQ& sigma);

// f is odd about h when the pullback along the reflection across h equals -f.
bool is_odd(const FiniteDistribution& f, const Hyperplane& h);

// Necessary support condition for h to be a mirror: reflection across h
// permutes the support points.
bool mirror_support_check(const FiniteDistribution& f, const Hyperplane& h, double tol = 1e-9);

// Perpendicular bisectors of support pairs plus caller-supplied candidates,
// filtered by mirror_support_check and deduplicated.
std::vector<Hyperplane> candidate_mirrors(const FiniteDistribution& f,
                                          const std::vector<Hyperplane>& extra_candidates = {});

// Affine subspace through `basepoint` spanned by orthonormal `basis` rows.
struct AffineSubspace {
  std::vector<double> basepoint;
  std::vector<std::vector<double>> basis;

  int ambient_dimension() const { return static_cast<int>(basepoint.size()); }
  int dimension() const { return static_cast<int>(basis.size()); }
  // Squared distance from x to the subspace.
  double distance_squared(std::span<const double> x) const;
};

// Affine hull of the support of f.
AffineSubspace span_support(const FiniteDistribution& f);

}  // namespace nodalcone
