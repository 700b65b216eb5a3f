#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "nodalcone/errors.hpp"
#include "nodalcone/oracle.hpp"

using namespace nodalcone;

namespace {

constexpr double kPi = 3.14159265358979323846;

FiniteDistribution unit_mass_at(RationalVec y) {
  FiniteDistribution f;
  f.dimension = static_cast<int>(y.size());
  FiniteDistribution::Source s;
  s.weight = Polynomial::constant(f.dimension, Rational(1));
  s.point = std::move(y);
  f.sources.push_back(std::move(s));
  return f;
}

FiniteDistribution dipole2() {
  FiniteDistribution f;
  f.dimension = 2;
  FiniteDistribution::Source a;
  a.point = {Rational(1), Rational(0)};
  a.weight = Polynomial::constant(2, Rational(1));
  FiniteDistribution::Source b;
  b.point = {Rational(-1), Rational(0)};
  b.weight = Polynomial::constant(2, Rational(-1));
  f.sources = {a, b};
  return f;
}

double mollifier_value(const RadialMollifier& phi, std::span<const double> u) {
  double r2 = 0.0;
  for (double c : u) r2 += c * c;
  return phi.value_at_radius(std::sqrt(r2));
}

// (w(-d) phi)(u) via nested fourth-order central differences; independent of
// the closed-form derivative tables used by MollifiedField.
double fd_apply(const Polynomial& w, const RadialMollifier& phi, std::vector<double> u,
                double h) {
  std::function<double(const Exponents&, std::vector<double>&)> rec =
      [&](const Exponents& alpha, std::vector<double>& at) -> double {
    int axis = -1;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] > 0) {
        axis = static_cast<int>(i);
        break;
      }
    }
    if (axis < 0) return mollifier_value(phi, at);
    Exponents next = alpha;
    --next[axis];
    const double x0 = at[axis];
    auto eval = [&](double shift) {
      at[axis] = x0 + shift;
      const double v = rec(next, at);
      at[axis] = x0;
      return v;
    };
    return (eval(-2.0 * h) - 8.0 * eval(-h) + 8.0 * eval(h) - eval(2.0 * h)) / (12.0 * h);
  };

  double acc = 0.0;
  for (const auto& [alpha, coeff] : w.terms()) {
    int order = 0;
    for (int a : alpha) order += a;
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    acc += sign * coeff.get_d() * rec(alpha, u);
  }
  return acc;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

TEST_CASE("mollifier normalization and shape") {
  const RadialMollifier g2 = RadialMollifier::gaussian(2, 0.1);
  CHECK(g2.value_at_radius(0.0) == doctest::Approx(1.0 / (2.0 * kPi * 0.01)).epsilon(1e-14));
  CHECK(g2.width() == doctest::Approx(0.1));
  CHECK(g2.sharpness_scale() == doctest::Approx(0.1));

  const RadialMollifier b2 = RadialMollifier::bump(2, 0.9);
  CHECK(b2.width() == doctest::Approx(0.3));
  CHECK(b2.sharpness_scale() == doctest::Approx(0.225));
  CHECK(b2.value_at_radius(0.9) == 0.0);
  CHECK(b2.value_at_radius(1.5) == 0.0);
  CHECK(b2.value_at_radius(0.2) > 0.0);

  // Unit mass, checked against an independent radial rule (Simpson, 20000
  // panels) for both dimensions and both families.
  for (int dim : {2, 3}) {
    for (int kind : {0, 1}) {
      const double param = (kind == 0) ? 0.35 : 0.8;
      const RadialMollifier phi = (kind == 0) ? RadialMollifier::gaussian(dim, param)
                                              : RadialMollifier::bump(dim, param);
      const double upper = (kind == 0) ? 12.0 * param : param;
      const int panels = 20000;
      const double h = upper / panels;
      long double acc = 0.0L;
      for (int i = 0; i <= panels; ++i) {
        const double r = i * h;
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double surface = (dim == 2) ? 2.0 * kPi * r : 4.0 * kPi * r * r;
        acc += w * surface * phi.value_at_radius(r);
      }
      const double mass = static_cast<double>(acc) * h / 3.0;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  CHECK_THROWS_AS(RadialMollifier::gaussian(4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(RadialMollifier::gaussian(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RadialMollifier::bump(3, -1.0), std::invalid_argument);
}

TEST_CASE("mollified field matches finite-difference derivatives: gaussian") {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  FiniteDistribution f;
  f.dimension = 2;
  FiniteDistribution::Source s;
  s.point = {Rational(1, 5), Rational(-1, 10)};
  s.weight = x * x * y - Rational(3) * y + Polynomial::constant(2, Rational(1));
  f.sources.push_back(s);

  const RadialMollifier phi = RadialMollifier::gaussian(2, 0.25);
  const MollifiedField field(f, phi);
  CHECK(field.max_weight_degree() == 3);

  const double h = 0.25 / 100.0;
  std::vector<double> values;
  std::vector<double> diffs;
  for (double zx : {0.2, 0.05, 0.4, -0.1}) {
    for (double zy : {-0.1, 0.15, -0.35}) {
      const std::vector<double> z = {zx, zy};
      const std::vector<double> u = {zx - 0.2, zy + 0.1};
      const double got = field(z);
      const double expect = fd_apply(s.weight, phi, u, h);
      values.push_back(got);
      diffs.push_back(got - expect);
    }
  }
  CHECK(max_abs(diffs) <= 1e-5 * max_abs(values));
}

TEST_CASE("mollified field matches finite-difference derivatives: bump") {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);
  FiniteDistribution f;
  f.dimension = 2;
  FiniteDistribution::Source s;
  s.point = {Rational(0), Rational(0)};
  s.weight = x * y * y - x + Rational(2) * y;
  f.sources.push_back(s);

  const double eps = 0.8;
  const RadialMollifier phi = RadialMollifier::bump(2, eps);
  const MollifiedField field(f, phi);

  const double h = eps / 400.0;
  std::vector<double> values;
  std::vector<double> diffs;
  for (double zx : {0.1, -0.25, 0.3}) {
    for (double zy : {0.0, 0.2, -0.15}) {
      const std::vector<double> z = {zx, zy};
      const double got = field(z);
      const double expect = fd_apply(s.weight, phi, std::vector<double>(z), h);
      values.push_back(got);
      diffs.push_back(got - expect);
    }
  }
  CHECK(max_abs(diffs) <= 1e-4 * max_abs(values));

  // Outside the support the field vanishes identically.
  CHECK(field(std::vector<double>{0.85, 0.0}) == 0.0);
  CHECK(field(std::vector<double>{2.0, -3.0}) == 0.0);

  // Derivative order ceiling for the closed-form bump tables.
  FiniteDistribution too_deep = f;
  too_deep.sources[0].weight = x.pow(9);
  CHECK_THROWS_AS(MollifiedField(too_deep, phi), ConfigError);
}

TEST_CASE("mollified field in three dimensions against finite differences") {
  const Polynomial z3 = Polynomial::variable(3, 2);
  const Polynomial x3 = Polynomial::variable(3, 0);
  FiniteDistribution f;
  f.dimension = 3;
  FiniteDistribution::Source s;
  s.point = {Rational(0), Rational(1, 2), Rational(0)};
  s.weight = x3 * z3 - z3;
  f.sources.push_back(s);

  const RadialMollifier phi = RadialMollifier::gaussian(3, 0.3);
  const MollifiedField field(f, phi);
  const double h = 0.3 / 100.0;
  std::vector<double> values;
  std::vector<double> diffs;
  for (double zx : {0.15, -0.2}) {
    for (double zz : {0.1, -0.3}) {
      const std::vector<double> z = {zx, 0.4, zz};
      const std::vector<double> u = {zx, -0.1, zz};
      const double got = field(z);
      const double expect = fd_apply(s.weight, phi, u, h);
      values.push_back(got);
      diffs.push_back(got - expect);
    }
  }
  CHECK(max_abs(diffs) <= 1e-5 * max_abs(values));
}

TEST_CASE("field is additive across sources") {
  FiniteDistribution both = dipole2();
  FiniteDistribution first;
  first.dimension = 2;
  first.sources = {both.sources[0]};
  FiniteDistribution second;
  second.dimension = 2;
  second.sources = {both.sources[1]};

  const RadialMollifier phi = RadialMollifier::gaussian(2, 0.4);
  const MollifiedField fb(both, phi);
  const MollifiedField f1(first, phi);
  const MollifiedField f2(second, phi);
  for (double zx : {-0.5, 0.0, 0.8}) {
    const std::vector<double> z = {zx, 0.3};
    CHECK(fb(z) == doctest::Approx(f1(z) + f2(z)).epsilon(1e-14));
  }
  CHECK(fb.max_source_distance(std::vector<double>{2.0, 0.0}) == doctest::Approx(3.0));
}

TEST_CASE("quadrature building blocks") {
  const auto& rule = detail::gauss_legendre(32);
  REQUIRE(rule.size() == 32);
  long double wsum = 0.0L;
  long double x20 = 0.0L;
  for (const auto& [xn, wn] : rule) {
    wsum += wn;
    x20 += wn * std::pow(xn, 20);
  }
  CHECK(static_cast<double>(wsum) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(static_cast<double>(x20) == doctest::Approx(2.0 / 21.0).epsilon(1e-13));
  for (std::size_t i = 0; i + 1 < rule.size(); i += 2) {
    CHECK(rule[i].first == -rule[i + 1].first);   // adjacent exact sign pairs
    CHECK(rule[i].second == rule[i + 1].second);
  }
  const auto& odd_rule = detail::gauss_legendre(5);
  REQUIRE(odd_rule.size() == 5);
  CHECK(odd_rule.back().first == 0.0);

  const auto& nodes = detail::circle_nodes(16);
  REQUIRE(nodes.size() == 16);
  for (const auto& p : nodes) {
    CHECK(std::fabs(p[0] * p[0] + p[1] * p[1] - 1.0) <= 1e-15);
  }
  const double d = std::sqrt(0.5);
  int axis_hits = 0;
  int diag_hits = 0;
  for (const auto& p : nodes) {
    if ((p[0] == 1.0 && p[1] == 0.0) || (p[0] == 0.0 && p[1] == 1.0) ||
        (p[0] == -1.0 && p[1] == 0.0) || (p[0] == 0.0 && p[1] == -1.0)) {
      ++axis_hits;
    }
    if (std::fabs(p[0]) == d && std::fabs(p[1]) == d) ++diag_hits;
  }
  CHECK(axis_hits == 4);
  CHECK(diag_hits == 4);
  CHECK_THROWS_AS(detail::circle_nodes(12), std::invalid_argument);

  CHECK(detail::circle_order_for(64, 0.0, 0) == 64);
  CHECK(detail::circle_order_for(8, 100.0, 2) == 104);
  CHECK(detail::circle_order_for(8, 400.0, 0) >= detail::circle_order_for(8, 100.0, 0));
  CHECK(detail::circle_order_for(8, 25.0, 0) % 8 == 0);
  CHECK(detail::polar_order_for(4, 100.0, 0) == 52);
  CHECK(detail::polar_order_for(4, 9.0, 1) % 2 == 0);
}

TEST_CASE("spherical means of polynomial fields") {
  // Circle averages of monomials centered at the origin.
  auto mono2 = [](int a, int b) {
    return [a, b](std::span<const double> p) {
      return std::pow(p[0], a) * std::pow(p[1], b);
    };
  };
  const double r = 0.7;
  CHECK(spherical_mean(mono2(2, 0), std::vector<double>{0.0, 0.0}, r, 16) ==
        doctest::Approx(r * r / 2.0).epsilon(1e-14));
  CHECK(spherical_mean(mono2(4, 0), std::vector<double>{0.0, 0.0}, r, 16) ==
        doctest::Approx(3.0 * std::pow(r, 4) / 8.0).epsilon(1e-14));
  CHECK(spherical_mean(mono2(2, 2), std::vector<double>{0.0, 0.0}, r, 16) ==
        doctest::Approx(std::pow(r, 4) / 8.0).epsilon(1e-14));
  CHECK(std::fabs(spherical_mean(mono2(3, 1), std::vector<double>{0.0, 0.0}, r, 16)) <= 1e-16);
  CHECK(std::fabs(spherical_mean(mono2(1, 0), std::vector<double>{0.0, 0.0}, r, 16)) <= 1e-16);

  // Mean of an affine function equals its value at the center, at any radius.
  auto affine = [](std::span<const double> p) { return 3.0 * p[0] - 2.0 * p[1] + 1.0; };
  const std::vector<double> c = {0.3, -0.2};
  for (double rr : {0.1, 1.0, 2.5}) {
    CHECK(spherical_mean(affine, c, rr, 24) ==
          doctest::Approx(affine(c)).epsilon(1e-14));
  }

  // Sphere averages in three dimensions.
  auto mono3 = [](int a, int b, int cc) {
    return [a, b, cc](std::span<const double> p) {
      return std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], cc);
    };
  };
  const std::vector<double> o3 = {0.0, 0.0, 0.0};
  CHECK(spherical_mean(mono3(2, 0, 0), o3, r, 16) ==
        doctest::Approx(r * r / 3.0).epsilon(1e-13));
  CHECK(spherical_mean(mono3(0, 0, 2), o3, r, 16) ==
        doctest::Approx(r * r / 3.0).epsilon(1e-13));
  CHECK(spherical_mean(mono3(2, 2, 0), o3, r, 16) ==
        doctest::Approx(std::pow(r, 4) / 15.0).epsilon(1e-13));
  CHECK(std::fabs(spherical_mean(mono3(1, 2, 0), o3, r, 16)) <= 1e-16);

  CHECK_THROWS_AS(spherical_mean(affine, c, 0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(spherical_mean(affine, c, -1.0, 16), std::invalid_argument);
}

TEST_CASE("gaussian spherical means match closed forms") {
  // n = 3: mean of the gaussian over a sphere at distance d has the two-sided
  // exponential form; n = 2 brings in the modified Bessel function I0.
  const double sigma = 0.3;
  const FiniteDistribution point3 = unit_mass_at({Rational(0), Rational(0), Rational(0)});
  const MollifiedField field3(point3, RadialMollifier::gaussian(3, sigma));
  const double n3 = std::pow(2.0 * kPi * sigma * sigma, -1.5);
  for (double d : {0.25, 0.6, 1.1}) {
    for (double r : {0.2, 0.5, 1.0}) {
      const std::vector<double> x = {0.0, d, 0.0};
      const double got = spherical_mean(field3, x, r, 64, 128);
      const double s2 = sigma * sigma;
      const double expect =
          n3 * (s2 / (2.0 * d * r)) *
          (std::exp(-(d - r) * (d - r) / (2.0 * s2)) - std::exp(-(d + r) * (d + r) / (2.0 * s2)));
      CHECK(got == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  const double sig2 = 0.25;
  const FiniteDistribution point2 = unit_mass_at({Rational(0), Rational(0)});
  const MollifiedField field2(point2, RadialMollifier::gaussian(2, sig2));
  const double n2 = 1.0 / (2.0 * kPi * sig2 * sig2);
  for (double d : {0.3, 0.6}) {
    for (double r : {0.25, 0.55}) {
      const std::vector<double> x = {d, 0.0};
      const double got = spherical_mean(field2, x, r, 64);
      const double s2 = sig2 * sig2;
      const double expect = n2 * std::exp(-(d * d + r * r) / (2.0 * s2)) *
                            std::cyl_bessel_i(0.0, d * r / s2);
      CHECK(got == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  // Doubling the angular order leaves converged means unchanged.
  const std::vector<double> probe = {0.45, 0.0};
  const double a = spherical_mean(field2, probe, 0.4, 64);
  const double b = spherical_mean(field2, probe, 0.4, 128);
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("default oracle configuration follows the geometry") {
  const FiniteDistribution f = dipole2();
  const OracleConfig cfg = default_oracle_config(f);
  CHECK(cfg.mollifier.kind() == RadialMollifier::Kind::gaussian);
  CHECK(cfg.mollifier.parameter() == doctest::Approx(0.2));
  CHECK(cfg.r_min == doctest::Approx(0.1));
  CHECK(cfg.r_max == doctest::Approx(3.2));
  CHECK(cfg.r_count == 96);
  CHECK(cfg.quad_order == 64);
  CHECK(cfg.box_lo[0] == doctest::Approx(-1.5));
  CHECK(cfg.box_hi[1] == doctest::Approx(1.5));
  CHECK_NOTHROW(cfg.validate(2));

  OracleConfig bad = cfg;
  bad.r_min = 0.0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = cfg;
  bad.r_max = 0.05;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = cfg;
  bad.pass_threshold = 0.0;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = cfg;
  bad.box_hi = {1.0};
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  bad = cfg;
  bad.quad_order = -1;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
  CHECK_THROWS_AS(cfg.validate(3), ConfigError);

  const OracleConfig single =
      default_oracle_config(unit_mass_at({Rational(0), Rational(0)}));
  CHECK(single.mollifier.parameter() == doctest::Approx(0.1));
}

TEST_CASE("stationarity indicator separates the dipole axis from the bulk") {
  const FiniteDistribution f = dipole2();
  const OracleConfig cfg = default_oracle_config(f);
  const MollifiedField field(f, cfg.mollifier);

  const double ref = reference_scale(field, cfg);
  CHECK(ref > 0.0);
  CHECK(reference_scale(field, cfg) == ref);  // bitwise deterministic

  OracleConfig other = cfg;
  other.seed = 17;
  CHECK(reference_scale(field, other) != ref);

  for (double yy : {0.05, 0.4, 1.2}) {
    const IndicatorResult on = stationarity_indicator(field, cfg, std::vector<double>{0.0, yy});
    CHECK(on.value <= 1e-13 * ref);
  }
  for (auto& off : {std::vector<double>{0.3, 0.2}, std::vector<double>{-0.7, 0.9}}) {
    const IndicatorResult res = stationarity_indicator(field, cfg, off);
    CHECK(res.value > 1e-3 * ref);
    CHECK(res.peak_order >= cfg.quad_order);
  }

  // A radius window that stops short of a far query point gets widened.
  const IndicatorResult far = stationarity_indicator(field, cfg, std::vector<double>{3.0, 0.0});
  CHECK(far.widened);
  CHECK(far.r_max_used == doctest::Approx(4.0 + 3.0 * cfg.mollifier.width()));
}

TEST_CASE("too-sharp geometry raises a numeric error") {
  const FiniteDistribution f = unit_mass_at({Rational(0), Rational(0)});
  OracleConfig cfg;
  cfg.mollifier = RadialMollifier::gaussian(2, 1e-4);
  cfg.quad_order = 64;
  cfg.r_min = 1.999;
  cfg.r_max = 2.001;
  cfg.r_count = 96;
  cfg.box_lo = {-3.0, -3.0};
  cfg.box_hi = {3.0, 3.0};
  const MollifiedField field(f, cfg.mollifier);
  CHECK_THROWS_AS(stationarity_indicator(field, cfg, std::vector<double>{2.0, 0.0}),
                  NumericError);
}

TEST_CASE("verification report for the dipole") {
  const FiniteDistribution f = dipole2();
  const OracleConfig cfg = default_oracle_config(f);
  const StationaryPrediction pred = predict_multi_point(f);

  VerifyOptions opts;
  opts.on_count = 10;
  opts.off_count = 10;
  const StationarityReport report = verify_prediction(f, pred, cfg, opts);
  CHECK(report.pass);
  CHECK(report.containment_only);
  CHECK(report.reference_scale > 0.0);
  REQUIRE(static_cast<int>(report.points.size()) >= 20);
  int on_seen = 0;
  for (const PointVerdict& v : report.points) {
    if (v.on_predicted_set) {
      ++on_seen;
      CHECK(v.stationary);
      CHECK(v.normalized <= cfg.pass_threshold);
    }
  }
  CHECK(on_seen >= opts.on_count);
}

TEST_CASE("verification rejects a wrong plane") {
  const FiniteDistribution f = dipole2();
  const OracleConfig cfg = default_oracle_config(f);

  StationaryPrediction wrong;
  wrong.dimension = 2;
  wrong.basepoint = {Rational(0), Rational(0)};
  wrong.hyperplanes = {make_hyperplane({0.0, 1.0}, 0.0)};  // the support line, not a mirror
  wrong.containment_only = false;

  VerifyOptions opts;
  opts.on_count = 8;
  opts.off_count = 4;
  const StationarityReport report = verify_prediction(f, wrong, cfg, opts);
  CHECK_FALSE(report.pass);
}

TEST_CASE("wave evaluation in three dimensions") {
  FiniteDistribution f;
  f.dimension = 3;
  FiniteDistribution::Source a;
  a.point = {Rational(0), Rational(0), Rational(1)};
  a.weight = Polynomial::constant(3, Rational(1));
  FiniteDistribution::Source b;
  b.point = {Rational(0), Rational(0), Rational(-1)};
  b.weight = Polynomial::constant(3, Rational(-1));
  f.sources = {a, b};

  const OracleConfig cfg = default_oracle_config(f);
  const MollifiedField field(f, cfg.mollifier);
  auto plain = [&](std::span<const double> p) { return field(p); };

  // The solution is t times the radius-t mean of the initial velocity.
  for (double t : {0.4, 1.0, 1.7}) {
    const std::vector<double> x = {0.3, -0.2, 0.6};
    const double direct = t * spherical_mean(plain, x, t, 128, 256);
    CHECK(wave_eval(field, cfg, x, t) == doctest::Approx(direct).epsilon(1e-9));
  }

  // Small-time limit recovers the initial velocity.
  const std::vector<double> near = {0.1, 0.05, 0.8};
  const double t0 = 1e-3 * cfg.mollifier.width();
  CHECK(wave_eval(field, cfg, near, t0) / t0 ==
        doctest::Approx(field(near)).epsilon(1e-4));

  CHECK(wave_eval(field, cfg, near, 0.0) == 0.0);
  CHECK_THROWS_AS(wave_eval(field, cfg, near, -0.5), std::invalid_argument);
}

TEST_CASE("wave evaluation in two dimensions against a flat-disc quadrature") {
  const FiniteDistribution f = dipole2();
  const OracleConfig cfg = default_oracle_config(f);
  const MollifiedField field(f, cfg.mollifier);
  auto plain = [&](std::span<const double> p) { return field(p); };

  // u(x, t) = t * int_0^(pi/2) sin(psi) * mean(x, t sin(psi)) dpsi; Simpson
  // in psi with a fixed high circle order is an independent evaluation.
  auto simpson_wave = [&](const std::vector<double>& x, double t) {
    const int panels = 800;
    const double h = (kPi / 2.0) / panels;
    long double acc = 0.0L;
    for (int i = 0; i <= panels; ++i) {
      const double psi = i * h;
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double r = t * std::sin(psi);
      const double mean = (r > 1e-12) ? spherical_mean(plain, x, r, 256) : plain(x);
      acc += w * std::sin(psi) * mean;
    }
    return t * static_cast<double>(acc) * h / 3.0;
  };

  for (double t : {0.5, 1.2}) {
    const std::vector<double> x = {0.4, 0.3};
    CHECK(wave_eval(field, cfg, x, t) == doctest::Approx(simpson_wave(x, t)).epsilon(1e-8));
  }

  const std::vector<double> near = {0.2, -0.3};
  const double t0 = 1e-3 * cfg.mollifier.width();
  CHECK(wave_eval(field, cfg, near, t0) / t0 ==
        doctest::Approx(field(near)).epsilon(1e-4));
}
