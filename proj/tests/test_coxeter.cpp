#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nodalcone/coxeter.hpp"

using namespace nodalcone;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Line through `center` whose direction makes angle `theta` with the x-axis.
Hyperplane line_at(double theta, std::vector<double> center = {0.0, 0.0}) {
  std::vector<double> normal = {-std::sin(theta), std::cos(theta)};
  const double offset = normal[0] * center[0] + normal[1] * center[1];
  return make_hyperplane(std::move(normal), offset);
}

FiniteDistribution::Source point_mass(RationalVec y, Rational w) {
  FiniteDistribution::Source s;
  s.weight = Polynomial::constant(static_cast<int>(y.size()), w);
  s.point = std::move(y);
  return s;
}

// <f, phi> with the convention that a source (y, w) contributes (w(d)phi)(y).
Rational pair_with(const FiniteDistribution& f, const Polynomial& phi) {
  Rational acc(0);
  for (const auto& src : f.sources) {
    Polynomial applied = Polynomial::zero(f.dimension);
    for (const auto& [exps, coeff] : src.weight.terms()) {
      Polynomial d = phi;
      for (int axis = 0; axis < f.dimension; ++axis) {
        for (int k = 0; k < exps[axis]; ++k) d = d.derivative(axis);
      }
      applied += d * coeff;
    }
    acc += applied.evaluate(src.point);
  }
  return acc;
}

FiniteDistribution alternating_hexagon() {
  FiniteDistribution f;
  f.dimension = 2;
  // Regular hexagon around the origin, alternating unit weights.  The radius
  // 2 keeps the rational surrogate coordinates (below) simple.
  for (int k = 0; k < 6; ++k) {
    const double angle = kPi * k / 3.0;
    FiniteDistribution::Source s;
    s.point = {rational_from_double(2.0 * std::cos(angle)),
               rational_from_double(2.0 * std::sin(angle))};
    s.weight = Polynomial::constant(2, Rational(k % 2 == 0 ? 1 : -1));
    f.sources.push_back(std::move(s));
  }
  return f;
}

}  // namespace

TEST_CASE("hyperplane construction canonicalizes length and sign") {
  const Hyperplane a = make_hyperplane({0.0, 2.0}, 4.0);
  CHECK(a.normal[0] == doctest::Approx(0.0));
  CHECK(a.normal[1] == doctest::Approx(1.0));
  CHECK(a.offset == doctest::Approx(2.0));

  const Hyperplane b = make_hyperplane({-3.0, 0.0}, 6.0);
  CHECK(b.normal[0] == doctest::Approx(1.0));
  CHECK(b.offset == doctest::Approx(-2.0));

  CHECK(hyperplane_close(make_hyperplane({1.0, 1.0}, 1.0),
                         make_hyperplane({-2.0, -2.0}, -2.0)));
  CHECK_FALSE(hyperplane_close(a, b));
  CHECK_THROWS_AS(make_hyperplane({0.0, 0.0}, 1.0), std::invalid_argument);

  CHECK(a.signed_distance(std::vector<double>{7.0, 5.0}) == doctest::Approx(3.0));
}

TEST_CASE("point reflection is an isometric involution") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  const Hyperplane h = make_hyperplane({1.0, 2.0, -1.0}, 0.75);
  for (int trial = 0; trial < 25; ++trial) {
    const std::vector<double> p = {coord(rng), coord(rng), coord(rng)};
    const std::vector<double> q = mirror_point(p, h);
    CHECK(h.signed_distance(q) == doctest::Approx(-h.signed_distance(p)));
    const std::vector<double> back = mirror_point(q, h);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(p[i]));
  }
  const std::vector<double> axis = mirror_point(std::vector<double>{2.0, 0.0}, line_at(kPi / 2));
  CHECK(axis[0] == doctest::Approx(-2.0));
  CHECK(axis[1] == doctest::Approx(0.0));
}

TEST_CASE("hyperplane reflection matches pointwise reflection") {
  const Hyperplane mirror = make_hyperplane({1.0, 1.0}, 0.5);
  const Hyperplane h = make_hyperplane({1.0, 0.0}, 2.0);
  const Hyperplane image = reflect_hyperplane(h, mirror);
  // Reflecting points of h must land on the image plane.
  for (double t : {-2.0, 0.0, 1.5, 3.0}) {
    const std::vector<double> p = {2.0, t};
    CHECK(image.signed_distance(mirror_point(p, mirror)) == doctest::Approx(0.0).epsilon(1e-12));
  }
  // Reflecting a plane across itself gives the plane back.
  CHECK(hyperplane_close(reflect_hyperplane(h, h), h));
}

TEST_CASE("exact reflection maps") {
  const AffineMapQ map = reflection_map_exact({Rational(3), Rational(4)}, Rational(0));
  CHECK(map.linear_part_is_orthogonal());
  const RationalVec on_plane = {Rational(-4), Rational(3)};
  CHECK(map.apply(on_plane) == on_plane);
  const RationalVec probe = {Rational(3), Rational(4)};
  const RationalVec image = map.apply(probe);
  CHECK(image[0] == Rational(-3));
  CHECK(image[1] == Rational(-4));
  const AffineMapQ twice = map.compose(map);
  CHECK(twice.apply(RationalVec{Rational(7), Rational(-2)}) ==
        RationalVec{Rational(7), Rational(-2)});

  // Offset plane {x = 2}: x -> 4 - x.
  const AffineMapQ shifted = reflection_map_exact({Rational(1), Rational(0)}, Rational(2));
  const RationalVec moved = shifted.apply(RationalVec{Rational(1), Rational(5)});
  CHECK(moved[0] == Rational(3));
  CHECK(moved[1] == Rational(5));

  CHECK_THROWS_AS(reflection_map_exact({Rational(0), Rational(0)}, Rational(1)),
                  std::invalid_argument);
}

TEST_CASE("double reflection map agrees with mirror_point") {
  const Hyperplane h = make_hyperplane({2.0, -1.0, 0.5}, 1.25);
  const AffineMapD map = reflection_map(h);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> p = {coord(rng), coord(rng), coord(rng)};
    const std::vector<double> expect = mirror_point(p, h);
    const std::vector<double> got = map.apply(p);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("closure of two concurrent lines at a rational angle") {
  const struct {
    int p, q;
  } cases[] = {{1, 3}, {1, 4}, {2, 5}, {1, 6}, {5, 12}};
  for (const auto& c : cases) {
    CAPTURE(c.p);
    CAPTURE(c.q);
    const auto result =
        coxeter_closure({line_at(0.0), line_at(kPi * c.p / c.q)}, 64);
    CHECK(result.closed);
    CHECK(static_cast<int>(result.hyperplanes.size()) == c.q);
    REQUIRE(result.common_point.has_value());
    CHECK((*result.common_point)[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK((*result.common_point)[1] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(result.group_order_bound == (std::uint64_t{1} << result.hyperplanes.size()));
  }
}

TEST_CASE("closure failure cases stay bounded") {
  const auto skew = coxeter_closure({line_at(0.0), line_at(1.0)}, 48);
  CHECK_FALSE(skew.closed);
  CHECK(skew.hyperplanes.size() == 48);

  const auto parallel = coxeter_closure(
      {make_hyperplane({1.0, 0.0}, 0.0), make_hyperplane({1.0, 0.0}, 1.0)}, 32);
  CHECK_FALSE(parallel.closed);
  CHECK_FALSE(parallel.common_point.has_value());

  CHECK_THROWS_AS(coxeter_closure({}, 16), std::invalid_argument);
}

TEST_CASE("closure of an already-closed translated pencil") {
  const std::vector<double> center = {0.5, -1.0 / 3.0};
  const auto result = coxeter_closure(
      {line_at(0.0, center), line_at(kPi / 4, center)}, 64);
  CHECK(result.closed);
  CHECK(result.hyperplanes.size() == 4);
  REQUIRE(result.common_point.has_value());
  CHECK((*result.common_point)[0] == doctest::Approx(center[0]).epsilon(1e-8));
  CHECK((*result.common_point)[1] == doctest::Approx(center[1]).epsilon(1e-8));

  const auto coords = coxeter_closure({make_hyperplane({1.0, 0.0, 0.0}, 0.0),
                                       make_hyperplane({0.0, 1.0, 0.0}, 0.0),
                                       make_hyperplane({0.0, 0.0, 1.0}, 0.0)},
                                      8);
  CHECK(coords.closed);
  CHECK(coords.hyperplanes.size() == 3);
}

TEST_CASE("distribution validation") {
  FiniteDistribution f;
  f.dimension = 2;
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  f.sources.push_back(point_mass({Rational(1), Rational(0)}, Rational(1)));
  CHECK_NOTHROW(f.validate());
  f.sources.push_back(point_mass({Rational(1), Rational(0)}, Rational(2)));
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);  // duplicate support point
  f.sources[1].point[0] = Rational(-1);
  CHECK_NOTHROW(f.validate());
  f.sources[0].weight = Polynomial::zero(2);
  f.sources[1].weight = Polynomial::zero(2);
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);  // all weights zero
  CHECK(f.max_weight_degree() == 0);
}

TEST_CASE("pullback preserves the pairing") {
  const Polynomial x = Polynomial::variable(2, 0);
  const Polynomial y = Polynomial::variable(2, 1);

  FiniteDistribution f;
  f.dimension = 2;
  FiniteDistribution::Source s0;
  s0.point = {Rational(1), Rational(0)};
  s0.weight = x * x - y;
  FiniteDistribution::Source s1;
  s1.point = {Rational(-1, 2), Rational(2)};
  s1.weight = Rational(3) * (x * y) + Polynomial::constant(2, Rational(1));
  f.sources = {s0, s1};

  // Rotation by the 3-4-5 angle plus a translation.
  const AffineMapQ sigma(2,
                         {Rational(3, 5), Rational(-4, 5), Rational(4, 5), Rational(3, 5)},
                         {Rational(1), Rational(-2)});
  REQUIRE(sigma.linear_part_is_orthogonal());
  const FiniteDistribution g = pullback(f, sigma);
  const AffineMapQ inv = sigma.inverse_orthogonal();

  const Polynomial tests[] = {x.pow(3) * y,
                              x * x + x * y,
                              (x + y + Polynomial::constant(2, Rational(1))).pow(2),
                              x.pow(4) - y.pow(4),
                              Polynomial::constant(2, Rational(5))};
  for (const Polynomial& phi : tests) {
    CHECK(pair_with(g, phi) == pair_with(f, phi.compose_affine(inv)));
  }

  // A shear is not a rigid motion, so the pullback must refuse it.
  const AffineMapQ shear(2, {Rational(1), Rational(1), Rational(0), Rational(1)},
                         {Rational(0), Rational(0)});
  CHECK_THROWS_AS(pullback(f, shear), std::invalid_argument);
}

TEST_CASE("odd symmetry of a two-point dipole") {
  FiniteDistribution f;
  f.dimension = 2;
  f.sources.push_back(point_mass({Rational(1), Rational(0)}, Rational(1)));
  f.sources.push_back(point_mass({Rational(-1), Rational(0)}, Rational(-1)));

  CHECK(is_odd(f, make_hyperplane({1.0, 0.0}, 0.0)));
  CHECK_FALSE(is_odd(f, make_hyperplane({0.0, 1.0}, 0.0)));
  CHECK_FALSE(is_odd(f, make_hyperplane({1.0, 0.0}, 1.0)));

  // Equal signs break the cancellation.
  f.sources[1].weight = Polynomial::constant(2, Rational(1));
  CHECK_FALSE(is_odd(f, make_hyperplane({1.0, 0.0}, 0.0)));
}

TEST_CASE("odd symmetry with polynomial weights at a fixed point") {
  const Polynomial x = Polynomial::variable(2, 0);
  FiniteDistribution f;
  f.dimension = 2;
  FiniteDistribution::Source s;
  s.point = {Rational(0), Rational(0)};
  s.weight = x;
  f.sources = {s};
  CHECK(is_odd(f, make_hyperplane({1.0, 0.0}, 0.0)));   // x -> -x flips the weight
  CHECK_FALSE(is_odd(f, make_hyperplane({0.0, 1.0}, 0.0)));

  f.sources[0].weight = x * x;
  CHECK_FALSE(is_odd(f, make_hyperplane({1.0, 0.0}, 0.0)));
}

TEST_CASE("hexagon with alternating signs is odd about its three edge axes") {
  const FiniteDistribution f = alternating_hexagon();
  int odd_axes = 0;
  for (int k = 0; k < 6; ++k) {
    const Hyperplane axis = line_at(kPi * k / 6.0);
    const bool edge_axis = (k % 2 == 1);  // between vertices
    CHECK(mirror_support_check(f, axis));
    CHECK(is_odd(f, axis) == edge_axis);
    if (is_odd(f, axis)) ++odd_axes;
  }
  CHECK(odd_axes == 3);

  const auto candidates = candidate_mirrors(f);
  CHECK(candidates.size() == 6);
  int odd_candidates = 0;
  for (const Hyperplane& h : candidates) {
    if (is_odd(f, h)) ++odd_candidates;
  }
  CHECK(odd_candidates == 3);
}

TEST_CASE("mirror support check on a square") {
  FiniteDistribution f;
  f.dimension = 2;
  f.sources.push_back(point_mass({Rational(1), Rational(0)}, Rational(1)));
  f.sources.push_back(point_mass({Rational(-1), Rational(0)}, Rational(1)));
  f.sources.push_back(point_mass({Rational(0), Rational(1)}, Rational(1)));
  f.sources.push_back(point_mass({Rational(0), Rational(-1)}, Rational(1)));

  CHECK(mirror_support_check(f, make_hyperplane({1.0, 0.0}, 0.0)));
  CHECK(mirror_support_check(f, make_hyperplane({0.0, 1.0}, 0.0)));
  CHECK(mirror_support_check(f, make_hyperplane({1.0, 1.0}, 0.0)));
  CHECK_FALSE(mirror_support_check(f, make_hyperplane({1.0, 0.0}, 0.5)));

  const auto candidates = candidate_mirrors(f);
  CHECK(candidates.size() == 4);  // two coordinate axes and two diagonals
}

TEST_CASE("affine hull of support") {
  FiniteDistribution single;
  single.dimension = 3;
  single.sources.push_back(point_mass({Rational(0), Rational(0), Rational(1)}, Rational(1)));
  const AffineSubspace p0 = span_support(single);
  CHECK(p0.dimension() == 0);
  CHECK(p0.distance_squared(std::vector<double>{0.0, 0.0, 1.0}) == doctest::Approx(0.0));
  CHECK(p0.distance_squared(std::vector<double>{0.0, 2.0, 1.0}) == doctest::Approx(4.0));

  FiniteDistribution pair = single;
  pair.sources.push_back(point_mass({Rational(0), Rational(0), Rational(-1)}, Rational(-1)));
  const AffineSubspace axis = span_support(pair);
  CHECK(axis.dimension() == 1);
  CHECK(axis.distance_squared(std::vector<double>{0.0, 0.0, 7.5}) == doctest::Approx(0.0));
  CHECK(axis.distance_squared(std::vector<double>{3.0, 4.0, 0.25}) == doctest::Approx(25.0));

  FiniteDistribution collinear = pair;
  collinear.sources.push_back(point_mass({Rational(0), Rational(0), Rational(5)}, Rational(1)));
  CHECK(span_support(collinear).dimension() == 1);

  FiniteDistribution triangle = pair;
  triangle.sources.push_back(point_mass({Rational(1), Rational(2), Rational(0)}, Rational(1)));
  const AffineSubspace plane = span_support(triangle);
  CHECK(plane.dimension() == 2);
  CHECK(plane.distance_squared(std::vector<double>{1.0, 2.0, 0.0}) == doctest::Approx(0.0));
}
