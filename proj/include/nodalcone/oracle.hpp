#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nodalcone/coxeter.hpp"
#include "nodalcone/errors.hpp"
#include "nodalcone/polynomial.hpp"
#include "nodalcone/stationary.hpp"

namespace nodalcone {

// Radially symmetric smooth mollifier on R^n, n in {2, 3}, unit mass.
//   gaussian: (2 pi sigma^2)^(-n/2) exp(-|x|^2 / (2 sigma^2))
//   bump:     c_n(eps) exp(-1 / (1 - |x|^2/eps^2)) on |x| < eps, 0 outside
class RadialMollifier {
 public:
  enum class Kind { gaussian, bump };

  static RadialMollifier gaussian(int dimension, double sigma);
  static RadialMollifier bump(int dimension, double epsilon);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  double parameter() const { return param_; }

  // Effective support radius used for grids and separation margins.
  double width() const;
  // Shorter scale governing quadrature resolution requirements.
  double sharpness_scale() const;
  double normalization() const { return norm_; }

  double value_at_radius(double r) const;

 private:
  RadialMollifier(Kind kind, int dimension, double param);

  Kind kind_;
  int dim_;
  double param_;
  double norm_;
};

// Precompiled evaluator of the mollified field
//   F(z) = (f * phi)(z) = sum_i (G_i(-d) phi)(z - y_i).
// Compiling closed-form derivative data once makes pointwise evaluation cheap
// enough for millions of quadrature nodes.
class MollifiedField {
 public:
  MollifiedField(const FiniteDistribution& f, const RadialMollifier& phi);

  double operator()(std::span<const double> z) const;
  int dimension() const { return dim_; }
  const std::vector<std::vector<double>>& source_points() const { return points_; }
  int max_weight_degree() const { return max_degree_; }
  const RadialMollifier& mollifier() const { return phi_; }

  // Per-source access, used by the compact-support quadrature: the field is
  // the sum of source_value(i, z) over all i, and source_spatial_degree
  // bounds the trigonometric degree of a source along any circle on which
  // its radial envelope is constant.
  std::size_t source_count() const { return sources_.size(); }
  double source_value(std::size_t i, std::span<const double> z) const;
  int source_spatial_degree(std::size_t i) const;

  // Largest distance from x to a source point.
  double max_source_distance(std::span<const double> x) const;

 private:
  struct Term {
    double coeff;
    std::array<int, 4> exps;
  };
  struct CompiledSource {
    std::vector<double> point;
    std::vector<Term> terms;       // polynomial factor (gaussian) or numerator (bump)
    int denominator_power = 0;     // bump only: power of v = 1 - |u|^2/eps^2
  };

  double evaluate_source(const CompiledSource& src, std::span<const double> z) const;

  RadialMollifier phi_;
  int dim_;
  int max_degree_ = 0;
  std::vector<CompiledSource> sources_;
  std::vector<std::vector<double>> points_;
};

// Normalized average over the sphere of radius r centered at x.
// n == 2: `order_a` equispaced angles (rounded up to a multiple of 8).
// n == 3: `order_a` Gauss-Legendre polar nodes, `order_b` equispaced azimuth
// angles (order_b == 0 picks twice the polar count).  The node sets are built
// sign-symmetric in every coordinate so that odd integrands cancel exactly.
// The MollifiedField overload with a bump mollifier instead integrates each
// source's support cap with an edge-adapted rule (order_a scales the node
// budget); a global rule resolves the support boundary far too slowly.
double spherical_mean(const std::function<double(std::span<const double>)>& field,
                      std::span<const double> x, double r, int order_a, int order_b = 0);
double spherical_mean(const MollifiedField& field, std::span<const double> x, double r,
                      int order_a, int order_b = 0);

struct OracleConfig {
  RadialMollifier mollifier = RadialMollifier::gaussian(2, 0.1);
  int quad_order = 0;           // base angular order; adaptive growth on top
  double r_min = 0.0;
  double r_max = 0.0;
  int r_count = 96;
  double pass_threshold = 1e-6; // on the indicator normalized by reference_scale
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  std::uint64_t seed = 0;
  double reference_scale = 0.0; // <= 0 requests computation from seeded probes

  void validate(int dimension) const;
};

// Defaults derived from the geometry of f: sigma = 0.1 * support diameter
// (0.1 for a single point), radius grid [sigma/2, diameter + 6 sigma] with 96
// log-spaced points, box centered at the support centroid.
OracleConfig default_oracle_config(const FiniteDistribution& f);

struct IndicatorResult {
  double value = 0.0;      // max over the radius grid of |spherical mean|
  bool widened = false;    // r_max was raised to cover max source distance + 3 width
  double r_max_used = 0.0;
  int peak_order = 0;      // largest angular order the adaptive rule selected
};

// Sup over the radius grid of the absolute spherical mean of f * phi at x;
// zero for every r > 0 characterizes stationary points.
IndicatorResult stationarity_indicator(const MollifiedField& field, const OracleConfig& cfg,
                                       std::span<const double> x);
IndicatorResult stationarity_indicator(const FiniteDistribution& f, const OracleConfig& cfg,
                                       std::span<const double> x);

// Median indicator over 32 seeded uniform probes in the box; used to express
// indicators on a scale intrinsic to f.
double reference_scale(const MollifiedField& field, const OracleConfig& cfg);

struct PointVerdict {
  std::vector<double> location;
  bool on_predicted_set = false;
  double indicator = 0.0;
  double normalized = 0.0;
  bool stationary = false;
  bool widened = false;
};

struct StationarityReport {
  OracleConfig config;
  double reference_scale = 0.0;
  std::vector<PointVerdict> points;  // on-points first, then off-points
  int on_requested = 0;
  int off_requested = 0;
  bool containment_only = false;
  bool pass = false;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  int on_count = 100;
  int off_count = 100;
};

// Samples the predicted set and its complement, runs the indicator on every
// sample, and aggregates the verdicts.  For containment-only predictions the
// off-set verdicts are informational and do not affect `pass`.
StationarityReport verify_prediction(const FiniteDistribution& f,
                                     const StationaryPrediction& pred, const OracleConfig& cfg,
                                     const VerifyOptions& options = {});

// Solution of u_tt = lap u, u(0) = 0, u_t(0) = f * phi, evaluated at (x, t):
// n == 3 uses the radius-t spherical mean scaled by t; n == 2 integrates the
// means over [0, t] with the flat-disc weight.
double wave_eval(const MollifiedField& field, const OracleConfig& cfg,
                 std::span<const double> x, double t);

namespace detail {
// Gauss-Legendre nodes/weights on [-1, 1], exactly sign-symmetric; cached.
const std::vector<std::pair<double, double>>& gauss_legendre(int count);
// Unit-circle nodes, count a positive multiple of 8, exactly symmetric under
// coordinate sign flips and swaps; cached.
const std::vector<std::array<double, 2>>& circle_nodes(int count);
// Angular order selection: sharpness z = d * r / scale^2.
int circle_order_for(int base, double z, int max_weight_degree);
int polar_order_for(int base, double z, int max_weight_degree);
}  // namespace detail

}  // namespace nodalcone
