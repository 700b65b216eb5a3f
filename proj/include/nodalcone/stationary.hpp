#pragma once

#include <optional>
#include <vector>

#include "nodalcone/coxeter.hpp"
#include "nodalcone/polynomial.hpp"

namespace nodalcone {

// Symbolic description of a predicted stationary set.
//
// The set is the union of
//   * the common zero set of `generators`, in coordinates centered at
//     `basepoint` (empty generator list contributes nothing), and
//   * the listed `hyperplanes`, in ambient coordinates.
// Every listed hyperplane is certified to lie inside the generator part when
// `containment_only` is false; when true (multi-source predictions), the
// description is guaranteed to be contained in the true stationary set but
// may be strict.
struct StationaryPrediction {
  int dimension = 0;
  RationalVec basepoint;
  std::vector<Polynomial> generators;
  std::vector<Hyperplane> hyperplanes;
  std::optional<AffineSubspace> edge;
  bool containment_only = false;

  bool is_empty_description() const { return generators.empty() && hyperplanes.empty(); }
};

struct HyperplaneExtractionOptions {
  std::vector<double> box_lo;  // default: [-1.5, 1.5]^n
  std::vector<double> box_hi;
  int resolution = 0;          // default: 61 (n<=2), 21 (n==3), 9 (n>=4)
  long max_denominator = 1000; // for exact certification of rational normals
  std::vector<Hyperplane> extra_candidates;
};

// Linear hyperplanes (through the origin of the centered coordinates) that
// are contained in the zero set of p, found by seeding on a grid, refining
// with Newton steps, and certifying by exact division when the plane has
// small rational coordinates, otherwise by a numeric division residual.
// Offsets of the returned planes are expressed in ambient coordinates
// (shifted by basepoint).
std::vector<Hyperplane> extract_hyperplanes(const Polynomial& p, const RationalVec& basepoint,
                                            const HyperplaneExtractionOptions& options = {});

// Prediction for a single source G(d) delta_y: the common zero set of the
// iterated Laplacians of every homogeneous component of G, centered at y.
StationaryPrediction predict_single_point(const Polynomial& g, const RationalVec& y);

// Prediction for a finitely supported distribution: odd-symmetry mirrors
// together with the intersection of all single-source predictions moved to
// ambient coordinates.  Sound (contained in the true stationary set) but not
// necessarily complete, hence containment_only = true.
StationaryPrediction predict_multi_point(const FiniteDistribution& f);

// Scale-relative membership test:
//   |g(x - basepoint)| <= tol * max|coeff(g)| * max(1,|x - basepoint|)^deg g
// for every generator, or distance to some listed hyperplane within
// tol * max(1,|x|).
bool membership(const StationaryPrediction& pred, std::span<const double> x, double tol);

// Exact membership in the generator part for rational query points.
bool membership_exact(const StationaryPrediction& pred, const RationalVec& x);

// Grid points of the box where every polynomial passes the scale-relative
// zero test with tolerance tol.  Grid coordinates use the exact-endpoint
// interpolation lo + (hi-lo) * i/(res-1).
std::vector<std::vector<double>> sample_zero_grid(const std::vector<Polynomial>& polys,
                                                  const std::vector<double>& box_lo,
                                                  const std::vector<double>& box_hi,
                                                  int resolution, double tol);

// Gauss-Newton refinement of x0 toward the common zero set of the system.
std::vector<double> refine_zero(const std::vector<PolynomialD>& system,
                                std::vector<double> x0, int max_iterations = 40);

}  // namespace nodalcone
