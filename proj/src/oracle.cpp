#include "nodalcone/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <type_traits>

namespace nodalcone {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(-x) with x >= this is treated as zero relative to the field's scale.
constexpr double kExpCut = 80.0;

double sq(double v) { return v * v; }

std::vector<double> he_coefficients(int k) {
  // Probabilists' Hermite He_k as monomial coefficients (exact small integers).
  std::vector<double> prev{1.0};
  if (k == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int m = 1; m < k; ++m) {
    std::vector<double> next(m + 2, 0.0);
    for (int j = 0; j <= m; ++j) next[j + 1] += cur[j];
    for (int j = 0; j + 1 <= m; ++j) next[j] -= m * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

int round_up_multiple(int value, int base) {
  return ((value + base - 1) / base) * base;
}

}  // namespace

namespace detail {

const std::vector<std::pair<double, double>>& gauss_legendre(int count) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(count);
  if (it != cache.end()) return it->second;
  if (count < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");

  std::vector<std::pair<double, double>> nodes;
  nodes.reserve(count);
  const int half = count / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev-like initial guess; x is the
    // i-th largest positive root.
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes.emplace_back(x, w);
    nodes.emplace_back(-x, w);  // exact sign mirror
  }
  if (count % 2 == 1) {
    double p0 = 1.0, p1 = 0.0;
    // P'_count(0) via the recurrence for derivative weight.
    double x = 0.0;
    for (int k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = count * (x * p1 - p0) / (x * x - 1.0);
    nodes.emplace_back(0.0, 2.0 / (dp * dp));
  }
  auto [pos, inserted] = cache.emplace(count, std::move(nodes));
  return pos->second;
}

const std::vector<std::array<double, 2>>& circle_nodes(int count) {
  static std::mutex mu;
  static std::map<int, std::vector<std::array<double, 2>>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(count);
  if (it != cache.end()) return it->second;
  if (count < 8 || count % 8 != 0) {
    throw std::invalid_argument("circle node count must be a positive multiple of 8");
  }

  // Build one octant and complete by exact sign flips and swaps so the node
  // set is bitwise invariant under reflections about the axes and diagonals.
  std::vector<std::array<double, 2>> nodes;
  nodes.reserve(count);
  const int octant = count / 8;
  nodes.push_back({1.0, 0.0});
  nodes.push_back({0.0, 1.0});
  nodes.push_back({-1.0, 0.0});
  nodes.push_back({0.0, -1.0});
  for (int k = 1; k < octant; ++k) {
    const double a = 2.0 * kPi * k / count;
    const double c = std::cos(a);
    const double s = std::sin(a);
    nodes.push_back({c, s});
    nodes.push_back({s, c});
    nodes.push_back({-s, c});
    nodes.push_back({-c, s});
    nodes.push_back({-c, -s});
    nodes.push_back({-s, -c});
    nodes.push_back({s, -c});
    nodes.push_back({c, -s});
  }
  const double d = std::sqrt(0.5);
  nodes.push_back({d, d});
  nodes.push_back({-d, d});
  nodes.push_back({-d, -d});
  nodes.push_back({d, -d});
  auto [pos, inserted] = cache.emplace(count, std::move(nodes));
  return pos->second;
}

int circle_order_for(int base, double z, int max_weight_degree) {
  const double needed = 8.0 * std::sqrt(std::max(z, 0.0)) + 16.0 + 4.0 * max_weight_degree;
  const int order = std::max({base, static_cast<int>(std::ceil(needed)), 8});
  return round_up_multiple(order, 8);
}

int polar_order_for(int base, double z, int max_weight_degree) {
  const double needed = 4.0 * std::sqrt(std::max(z, 0.0)) + 12.0 + 2.0 * max_weight_degree;
  const int order = std::max({base, static_cast<int>(std::ceil(needed)), 4});
  return round_up_multiple(order, 2);
}

}  // namespace detail

RadialMollifier::RadialMollifier(Kind kind, int dimension, double param)
    : kind_(kind), dim_(dimension), param_(param) {
  if (dimension != 2 && dimension != 3) {
    throw std::invalid_argument("mollifier dimension must be 2 or 3");
  }
  if (!(param > 0.0) || !std::isfinite(param)) {
    throw std::invalid_argument("mollifier parameter must be positive and finite");
  }
  if (kind_ == Kind::gaussian) {
    norm_ = std::pow(2.0 * kPi * param * param, -0.5 * dimension);
  } else {
    // Unit mass: 1 / (surface * int_0^eps exp(-1/(1-r^2/eps^2)) r^(n-1) dr).
    const auto& rule = detail::gauss_legendre(200);
    long double acc = 0.0L;
    for (const auto& [xi, w] : rule) {
      const double r = 0.5 * param * (xi + 1.0);
      const double v = 1.0 - sq(r / param);
      if (v <= 0.0) continue;
      acc += static_cast<long double>(w) * std::exp(-1.0 / v) *
             std::pow(r, dimension - 1);
    }
    const double radial = static_cast<double>(acc) * 0.5 * param;
    const double surface = (dimension == 2) ? 2.0 * kPi : 4.0 * kPi;
    norm_ = 1.0 / (surface * radial);
  }
}

RadialMollifier RadialMollifier::gaussian(int dimension, double sigma) {
  return RadialMollifier(Kind::gaussian, dimension, sigma);
}

RadialMollifier RadialMollifier::bump(int dimension, double epsilon) {
  return RadialMollifier(Kind::bump, dimension, epsilon);
}

double RadialMollifier::width() const {
  return kind_ == Kind::gaussian ? param_ : param_ / 3.0;
}

double RadialMollifier::sharpness_scale() const {
  return kind_ == Kind::gaussian ? param_ : param_ / 4.0;
}

double RadialMollifier::value_at_radius(double r) const {
  if (kind_ == Kind::gaussian) {
    const double a = sq(r / param_) / 2.0;
    return (a > kExpCut * 10.0) ? 0.0 : norm_ * std::exp(-a);
  }
  const double v = 1.0 - sq(r / param_);
  if (v <= 1e-12) return 0.0;
  return norm_ * std::exp(-1.0 / v);
}

MollifiedField::MollifiedField(const FiniteDistribution& f, const RadialMollifier& phi)
    : phi_(phi), dim_(f.dimension) {
  f.validate();
  if (phi.dimension() != f.dimension) {
    throw std::invalid_argument("mollifier/distribution dimension mismatch");
  }
  max_degree_ = f.max_weight_degree();
  points_ = f.support_points();

  const int n = dim_;
  for (const auto& src : f.sources) {
    CompiledSource compiled;
    compiled.point = std::vector<double>(n);
    for (int i = 0; i < n; ++i) compiled.point[i] = src.point[i].get_d();

    const PolynomialD weight = to_double(src.weight);
    PolynomialD factor(n + 1);  // last axis unused for gaussian, v for bump

    if (phi_.kind() == RadialMollifier::Kind::gaussian) {
      // G(-d) phi(u) = phi(u) * sum_a c_a prod_i sigma^(-a_i) He_{a_i}(u_i/sigma).
      const double sigma = phi_.parameter();
      for (const auto& [e, c] : weight.terms()) {
        PolynomialD prod = PolynomialD::constant(n + 1, c);
        for (int i = 0; i < n; ++i) {
          if (e[i] == 0) continue;
          const auto he = he_coefficients(e[i]);
          PolynomialD axis(n + 1);
          for (int j = 0; j < static_cast<int>(he.size()); ++j) {
            if (he[j] == 0.0) continue;
            Exponents mono(n + 1, 0);
            mono[i] = j;
            axis.add_term(std::move(mono), he[j] * std::pow(sigma, -(e[i] + j)));
          }
          prod = prod * axis;
        }
        factor += prod;
      }
    } else {
      // d^a phi = phi * N_a / v^(2|a|) with v = 1 - |u|^2/eps^2 carried as an
      // extra variable; the recurrence below advances N along one axis.
      const double eps = phi_.parameter();
      if (weight.degree() > 8) {
        throw ConfigError("bump mollifier supports derivative orders up to 8");
      }
      const double inv_eps2 = 1.0 / (eps * eps);
      PolynomialD v_poly(n + 1);
      v_poly.add_term([&] {
        Exponents e(n + 1, 0);
        e[n] = 1;
        return e;
      }(), 1.0);

      std::map<Exponents, PolynomialD, GrlexLess> memo;
      memo.emplace(Exponents(n, 0), PolynomialD::constant(n + 1, 1.0));
      std::function<const PolynomialD&(const Exponents&)> numerator =
          [&](const Exponents& alpha) -> const PolynomialD& {
        auto it = memo.find(alpha);
        if (it != memo.end()) return it->second;
        int axis = 0;
        while (alpha[axis] == 0) ++axis;
        Exponents beta = alpha;
        beta[axis] -= 1;
        const PolynomialD& prev = numerator(beta);
        const int m = 2 * total_degree(beta);

        PolynomialD dv(n + 1);
        Exponents e_u(n + 1, 0);
        e_u[axis] = 1;
        dv.add_term(std::move(e_u), -2.0 * inv_eps2);

        // Total derivative in u_axis of prev(u, v(u)).
        PolynomialD d_prev = prev.derivative(axis) + prev.derivative(n) * dv;
        PolynomialD next = dv * prev + v_poly * v_poly * d_prev -
                           static_cast<double>(m) * (v_poly * dv * prev);
        auto [pos, inserted] = memo.emplace(alpha, std::move(next));
        return pos->second;
      };

      const int common = 2 * std::max(weight.degree(), 0);
      for (const auto& [e, c] : weight.terms()) {
        Exponents alpha(e.begin(), e.end());
        const int order = total_degree(alpha);
        const double sign = (order % 2 == 0) ? 1.0 : -1.0;
        PolynomialD pad = PolynomialD::constant(n + 1, 1.0);
        for (int k = 0; k < common - 2 * order; ++k) pad = pad * v_poly;
        factor += (c * sign) * (numerator(alpha) * pad);
      }
      compiled.denominator_power = common;
    }

    for (const auto& [e, c] : factor.terms()) {
      Term t;
      t.coeff = c * phi_.normalization();
      t.exps = {0, 0, 0, 0};
      for (int i = 0; i <= n; ++i) t.exps[i] = e[i];
      compiled.terms.push_back(t);
    }
    sources_.push_back(std::move(compiled));
  }
}

double MollifiedField::evaluate_source(const CompiledSource& src,
                                       std::span<const double> z) const {
  const int n = dim_;
  double u[3];
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    u[i] = z[i] - src.point[i];
    r2 += u[i] * u[i];
  }

  double vars[4] = {0.0, 0.0, 0.0, 0.0};
  double envelope = 0.0;
  if (phi_.kind() == RadialMollifier::Kind::gaussian) {
    const double sigma = phi_.parameter();
    const double a = r2 / (2.0 * sigma * sigma);
    if (a > kExpCut) return 0.0;
    envelope = std::exp(-a);
    for (int i = 0; i < n; ++i) vars[i] = u[i];
  } else {
    const double eps = phi_.parameter();
    const double v = 1.0 - r2 / (eps * eps);
    if (v <= 1e-12) return 0.0;
    const double logterm = -1.0 / v - src.denominator_power * std::log(v);
    if (logterm < -700.0) return 0.0;
    envelope = std::exp(logterm);
    for (int i = 0; i < n; ++i) vars[i] = u[i];
    vars[n] = v;
  }

  // Power tables over the active variables.
  double pw[4][32];
  int maxexp[4] = {0, 0, 0, 0};
  for (const Term& t : src.terms) {
    for (int i = 0; i < 4; ++i) maxexp[i] = std::max(maxexp[i], t.exps[i]);
  }
  for (int i = 0; i < 4; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= maxexp[i]; ++k) pw[i][k] = pw[i][k - 1] * vars[i];
  }
  double poly = 0.0;
  for (const Term& t : src.terms) {
    poly += t.coeff * pw[0][t.exps[0]] * pw[1][t.exps[1]] * pw[2][t.exps[2]] * pw[3][t.exps[3]];
  }
  return envelope * poly;
}

double MollifiedField::operator()(std::span<const double> z) const {
  double acc = 0.0;
  for (const CompiledSource& src : sources_) acc += evaluate_source(src, z);
  return acc;
}

double MollifiedField::source_value(std::size_t i, std::span<const double> z) const {
  return evaluate_source(sources_.at(i), z);
}

int MollifiedField::source_spatial_degree(std::size_t i) const {
  int deg = 0;
  for (const Term& t : sources_.at(i).terms) {
    int d = 0;
    for (int k = 0; k < dim_; ++k) d += t.exps[k];
    deg = std::max(deg, d);
  }
  return deg;
}

double MollifiedField::max_source_distance(std::span<const double> x) const {
  double worst = 0.0;
  for (const auto& p : points_) {
    double d2 = 0.0;
    for (int i = 0; i < dim_; ++i) d2 += sq(x[i] - p[i]);
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

namespace {

// Radius beyond which a source's contribution is treated as zero.
double cutoff_radius(const RadialMollifier& phi) {
  if (phi.kind() == RadialMollifier::Kind::bump) return phi.parameter();
  return phi.parameter() * std::sqrt(2.0 * kExpCut);
}

// True when the sphere of radius r about x intersects no source's support.
bool sphere_misses_support(const MollifiedField& field, std::span<const double> x, double r,
                           double cut) {
  for (const auto& p : field.source_points()) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d2 += sq(x[i] - p[i]);
    if (std::fabs(std::sqrt(d2) - r) <= cut) return false;
  }
  return true;
}

// Tanh-sinh nodes/weights on [-1, 1], cached per side count.  The node
// density grows double-exponentially toward the endpoints, which integrates
// functions that are smooth inside but flat (all derivatives zero) at an
// endpoint to near machine precision with modest node counts.  Equispaced or
// Gauss-Legendre rules need orders growing linearly with the sharpness ratio
// to resolve the bump's support boundary.
const std::vector<std::pair<double, double>>& tanh_sinh_rule(int side_count) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(side_count);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> rule;
  const double h = 4.3 / side_count;
  for (int k = -side_count; k <= side_count; ++k) {
    const double t = k * h;
    const double s = kPi / 2.0 * std::sinh(t);
    const double node = std::tanh(s);
    const double weight = h * kPi / 2.0 * std::cosh(t) / sq(std::cosh(s));
    if (weight < 1e-300) continue;
    rule.emplace_back(node, weight);
  }
  return cache.emplace(side_count, std::move(rule)).first->second;
}

// Intersection of the sphere {|p - x| = r} with the ball {|p - y| <= eps},
// described as a polar cap of half-opening `angle` about the axis from x
// toward y; c = |x - y|.
struct SupportCap {
  bool empty = false;
  bool full = false;
  double angle = 0.0;
};

SupportCap sphere_support_cap(double c, double r, double eps) {
  SupportCap cap;
  if (std::fabs(r - c) >= eps) {
    cap.empty = true;
    return cap;
  }
  if (r + c <= eps) {
    cap.full = true;
    cap.angle = kPi;
    return cap;
  }
  const double cosang = std::clamp((c * c + r * r - eps * eps) / (2.0 * c * r), -1.0, 1.0);
  cap.angle = std::acos(cosang);
  return cap;
}

// Tanh-sinh side count: the base budget plus enough interior resolution for
// the polynomial factor, whose trigonometric degree sets the oscillation
// scale across an arc of the given half-width.
int bump_side_count(int order_a, double half_width, int spatial_degree) {
  return std::max(24, order_a / 2) +
         static_cast<int>(std::ceil(1.4 * half_width * (spatial_degree + 6)));
}

double mean_circle_bump(const MollifiedField& field, std::span<const double> x, double r,
                        int order_a) {
  const double eps = field.mollifier().parameter();
  const auto& points = field.source_points();
  long double acc = 0.0L;
  double z[2];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = points[i][0] - x[0];
    const double dy = points[i][1] - x[1];
    const double c = std::hypot(dx, dy);
    const SupportCap cap = sphere_support_cap(c, r, eps);
    if (cap.empty) continue;
    const int degree = field.source_spatial_degree(i);

    if (c <= 1e-13 * eps) {
      // Concentric circle: the envelope is constant, the rest is a
      // trigonometric polynomial, so equispaced angles integrate exactly.
      const int count = round_up_multiple(std::max(degree + 1, 8), 8);
      long double ring = 0.0L;
      for (int j = 0; j < count; ++j) {
        const double theta = 2.0 * kPi * j / count;
        z[0] = x[0] + r * std::cos(theta);
        z[1] = x[1] + r * std::sin(theta);
        ring += field.source_value(i, std::span<const double>(z, 2));
      }
      acc += ring * (2.0L * kPi / count);
      continue;
    }

    const double axis = std::atan2(dy, dx);
    const auto& rule = tanh_sinh_rule(bump_side_count(order_a, cap.angle, degree));
    for (const auto& [t, w] : rule) {
      const double theta = axis + cap.angle * t;
      z[0] = x[0] + r * std::cos(theta);
      z[1] = x[1] + r * std::sin(theta);
      acc += static_cast<long double>(w * cap.angle) *
             field.source_value(i, std::span<const double>(z, 2));
    }
  }
  return static_cast<double>(acc / (2.0L * kPi));
}

double mean_sphere3_bump(const MollifiedField& field, std::span<const double> x, double r,
                         int order_a) {
  const double eps = field.mollifier().parameter();
  const auto& points = field.source_points();
  long double acc = 0.0L;
  double z[3];
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d[3];
    double c2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      d[k] = points[i][k] - x[k];
      c2 += d[k] * d[k];
    }
    const double c = std::sqrt(c2);
    const SupportCap cap = sphere_support_cap(c, r, eps);
    if (cap.empty) continue;
    const int degree = field.source_spatial_degree(i);

    // Orthonormal frame with `a` along the axis from x toward the source.
    double a[3] = {0.0, 0.0, 1.0};
    if (c > 0.0) {
      for (int k = 0; k < 3; ++k) a[k] = d[k] / c;
    }
    int least = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::fabs(a[k]) < std::fabs(a[least])) least = k;
    }
    double b1[3] = {0.0, 0.0, 0.0};
    b1[least] = 1.0;
    const double proj = b1[0] * a[0] + b1[1] * a[1] + b1[2] * a[2];
    double norm1 = 0.0;
    for (int k = 0; k < 3; ++k) {
      b1[k] -= proj * a[k];
      norm1 += b1[k] * b1[k];
    }
    norm1 = std::sqrt(norm1);
    for (int k = 0; k < 3; ++k) b1[k] /= norm1;
    const double b2[3] = {a[1] * b1[2] - a[2] * b1[1], a[2] * b1[0] - a[0] * b1[2],
                          a[0] * b1[1] - a[1] * b1[0]};

    // The source's radial envelope is constant along each azimuth circle, so
    // the azimuth integral of the remaining polynomial factor is exact with
    // degree + 1 equispaced angles.
    const int azimuth = round_up_multiple(std::max(degree + 1, 8), 8);
    std::vector<double> cos_t(azimuth), sin_t(azimuth);
    for (int j = 0; j < azimuth; ++j) {
      cos_t[j] = std::cos(2.0 * kPi * j / azimuth);
      sin_t[j] = std::sin(2.0 * kPi * j / azimuth);
    }

    if (c <= 1e-13 * eps) {
      // Concentric sphere: the envelope is constant everywhere, so a
      // Gauss-Legendre polar rule integrates the polynomial factor exactly.
      const auto& mu_nodes = detail::gauss_legendre(degree + 2);
      for (const auto& [mu, w] : mu_nodes) {
        const double sp = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        long double ring = 0.0L;
        for (int j = 0; j < azimuth; ++j) {
          for (int k = 0; k < 3; ++k) {
            z[k] = x[k] + r * (mu * a[k] + sp * (cos_t[j] * b1[k] + sin_t[j] * b2[k]));
          }
          ring += field.source_value(i, std::span<const double>(z, 3));
        }
        acc += static_cast<long double>(w) * (2.0 * kPi / azimuth) * ring;
      }
      continue;
    }

    const double half = cap.angle / 2.0;
    const auto& rule = tanh_sinh_rule(bump_side_count(order_a, half, degree));
    for (const auto& [t, w] : rule) {
      const double psi = half * (t + 1.0);
      const double sp = std::sin(psi);
      const double cp = std::cos(psi);
      long double ring = 0.0L;
      for (int j = 0; j < azimuth; ++j) {
        for (int k = 0; k < 3; ++k) {
          z[k] = x[k] + r * (cp * a[k] + sp * (cos_t[j] * b1[k] + sin_t[j] * b2[k]));
        }
        ring += field.source_value(i, std::span<const double>(z, 3));
      }
      acc += static_cast<long double>(w * half * sp) * (2.0 * kPi / azimuth) * ring;
    }
  }
  return static_cast<double>(acc / (4.0L * kPi));
}

template <class FieldT>
double mean_circle(const FieldT& field, std::span<const double> x, double r, int order) {
  const auto& nodes = detail::circle_nodes(order);
  long double acc = 0.0L;
  double z[2];
  for (const auto& node : nodes) {
    z[0] = x[0] + r * node[0];
    z[1] = x[1] + r * node[1];
    acc += field(std::span<const double>(z, 2));
  }
  return static_cast<double>(acc / nodes.size());
}

template <class FieldT>
double mean_sphere3(const FieldT& field, std::span<const double> x, double r, int polar,
                    int azimuth) {
  const auto& mu_nodes = detail::gauss_legendre(polar);
  const auto& az_nodes = detail::circle_nodes(azimuth);
  long double acc = 0.0L;
  double z[3];
  for (const auto& [mu, w] : mu_nodes) {
    const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    long double ring = 0.0L;
    z[2] = x[2] + r * mu;
    for (const auto& node : az_nodes) {
      z[0] = x[0] + r * s * node[0];
      z[1] = x[1] + r * s * node[1];
      ring += field(std::span<const double>(z, 3));
    }
    acc += static_cast<long double>(w) * (ring / az_nodes.size());
  }
  return static_cast<double>(acc / 2.0L);
}

template <class FieldT>
double mean_dispatch(const FieldT& field, std::span<const double> x, double r, int order_a,
                     int order_b) {
  if (!(r > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  const int n = static_cast<int>(x.size());
  if constexpr (std::is_same_v<FieldT, MollifiedField>) {
    if (field.mollifier().kind() == RadialMollifier::Kind::bump && (n == 2 || n == 3)) {
      return (n == 2) ? mean_circle_bump(field, x, r, order_a)
                      : mean_sphere3_bump(field, x, r, order_a);
    }
  }
  if (n == 2) {
    return mean_circle(field, x, r, round_up_multiple(std::max(order_a, 8), 8));
  }
  if (n == 3) {
    const int polar = std::max(order_a, 2);
    int azimuth = (order_b > 0) ? order_b : 2 * polar;
    azimuth = round_up_multiple(std::max(azimuth, 8), 8);
    return mean_sphere3(field, x, r, polar, azimuth);
  }
  throw std::invalid_argument("spherical means require dimension 2 or 3");
}

constexpr int kMaxCircleOrder = 32768;
constexpr int kMaxPolarOrder = 4096;

struct QuadChoice {
  int order_a = 0;
  int order_b = 0;
};

QuadChoice choose_orders(const MollifiedField& field, const OracleConfig& cfg,
                         double max_dist, double r) {
  QuadChoice choice;
  if (field.mollifier().kind() == RadialMollifier::Kind::bump) {
    // The compact-support path integrates each source's cap with an
    // edge-adapted rule whose accuracy does not degrade with the sharpness
    // ratio, so the base order is the whole choice and no cap can overflow.
    choice.order_a = cfg.quad_order > 0 ? cfg.quad_order : (field.dimension() == 2 ? 64 : 32);
    return choice;
  }
  const double scale = field.mollifier().sharpness_scale();
  const double z = max_dist * r / (scale * scale);
  const int deg = field.max_weight_degree();
  if (field.dimension() == 2) {
    const int base = cfg.quad_order > 0 ? cfg.quad_order : 64;
    choice.order_a = detail::circle_order_for(base, z, deg);
    if (choice.order_a > kMaxCircleOrder) {
      throw NumericError("circle quadrature order " + std::to_string(choice.order_a) +
                         " exceeds the cap; the mollifier is too sharp for this geometry");
    }
  } else {
    const int base = cfg.quad_order > 0 ? cfg.quad_order : 32;
    choice.order_a = detail::polar_order_for(base, z, deg);
    choice.order_b = round_up_multiple(2 * choice.order_a, 8);
    if (choice.order_a > kMaxPolarOrder) {
      throw NumericError("polar quadrature order " + std::to_string(choice.order_a) +
                         " exceeds the cap; the mollifier is too sharp for this geometry");
    }
  }
  return choice;
}

std::vector<double> log_radius_grid(double r_min, double r_max, int count) {
  std::vector<double> grid(count);
  const double la = std::log(r_min);
  const double lb = std::log(r_max);
  for (int i = 0; i < count; ++i) {
    const double t = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
    grid[i] = std::exp(la + (lb - la) * t);
  }
  return grid;
}

int worker_count() {
  if (const char* env = std::getenv("NODALCONE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

double spherical_mean(const std::function<double(std::span<const double>)>& field,
                      std::span<const double> x, double r, int order_a, int order_b) {
  return mean_dispatch(field, x, r, order_a, order_b);
}

double spherical_mean(const MollifiedField& field, std::span<const double> x, double r,
                      int order_a, int order_b) {
  if (static_cast<int>(x.size()) != field.dimension()) {
    throw std::invalid_argument("query point dimension mismatch");
  }
  return mean_dispatch(field, x, r, order_a, order_b);
}

void OracleConfig::validate(int dimension) const {
  if (mollifier.dimension() != dimension) {
    throw ConfigError("mollifier dimension does not match the distribution");
  }
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw ConfigError("radius grid requires 0 < r_min < r_max");
  }
  if (r_count < 2) throw ConfigError("radius grid needs at least 2 points");
  if (!(pass_threshold > 0.0)) throw ConfigError("pass threshold must be positive");
  if (quad_order < 0) throw ConfigError("quadrature order must be >= 0");
  if (static_cast<int>(box_lo.size()) != dimension ||
      static_cast<int>(box_hi.size()) != dimension) {
    throw ConfigError("sampling box dimension mismatch");
  }
  for (int i = 0; i < dimension; ++i) {
    if (!(box_lo[i] < box_hi[i])) throw ConfigError("sampling box must have positive extent");
  }
}

OracleConfig default_oracle_config(const FiniteDistribution& f) {
  f.validate();
  const auto points = f.support_points();
  const int n = f.dimension;
  double diameter = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double d2 = 0.0;
      for (int k = 0; k < n; ++k) d2 += sq(points[i][k] - points[j][k]);
      diameter = std::max(diameter, std::sqrt(d2));
    }
  }
  const double sigma = (diameter > 0.0) ? 0.1 * diameter : 0.1;
  std::vector<double> centroid(n, 0.0);
  for (const auto& p : points) {
    for (int k = 0; k < n; ++k) centroid[k] += p[k] / points.size();
  }
  const double half = std::max(1.5, 0.75 * diameter);

  OracleConfig cfg;
  cfg.mollifier = RadialMollifier::gaussian(n, sigma);
  cfg.quad_order = (n == 2) ? 64 : 32;
  cfg.r_min = sigma / 2.0;
  cfg.r_max = diameter + 6.0 * sigma;
  cfg.r_count = 96;
  cfg.pass_threshold = 1e-6;
  cfg.box_lo.resize(n);
  cfg.box_hi.resize(n);
  for (int k = 0; k < n; ++k) {
    cfg.box_lo[k] = centroid[k] - half;
    cfg.box_hi[k] = centroid[k] + half;
  }
  return cfg;
}

IndicatorResult stationarity_indicator(const MollifiedField& field, const OracleConfig& cfg,
                                       std::span<const double> x) {
  cfg.validate(field.dimension());
  if (static_cast<int>(x.size()) != field.dimension()) {
    throw std::invalid_argument("query point dimension mismatch");
  }
  const double width = cfg.mollifier.width();
  const double max_dist = field.max_source_distance(x);

  IndicatorResult result;
  result.r_max_used = std::max(cfg.r_max, max_dist + 3.0 * width);
  result.widened = result.r_max_used > cfg.r_max * (1.0 + 1e-12);

  const double cut = cutoff_radius(cfg.mollifier);
  for (double r : log_radius_grid(cfg.r_min, result.r_max_used, cfg.r_count)) {
    if (sphere_misses_support(field, x, r, cut)) continue;
    const QuadChoice q = choose_orders(field, cfg, max_dist, r);
    result.peak_order = std::max(result.peak_order, q.order_a);
    const double mean = mean_dispatch(field, x, r, q.order_a, q.order_b);
    result.value = std::max(result.value, std::fabs(mean));
  }
  return result;
}

IndicatorResult stationarity_indicator(const FiniteDistribution& f, const OracleConfig& cfg,
                                       std::span<const double> x) {
  return stationarity_indicator(MollifiedField(f, cfg.mollifier), cfg, x);
}

double reference_scale(const MollifiedField& field, const OracleConfig& cfg) {
  cfg.validate(field.dimension());
  const int n = field.dimension();
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> probes;
  probes.reserve(32);
  std::vector<double> x(n);
  for (int k = 0; k < 32; ++k) {
    for (int i = 0; i < n; ++i) {
      x[i] = cfg.box_lo[i] + (cfg.box_hi[i] - cfg.box_lo[i]) * unit(rng);
    }
    probes.push_back(stationarity_indicator(field, cfg, x).value);
  }
  std::sort(probes.begin(), probes.end());
  const double median = 0.5 * (probes[15] + probes[16]);
  return std::max(median, 1e-300);
}

namespace {

std::vector<std::vector<double>> orthonormal_complement(const std::vector<double>& normal) {
  const int n = static_cast<int>(normal.size());
  std::vector<std::vector<double>> basis{normal};
  for (int seed = 0; seed < n && static_cast<int>(basis.size()) < n; ++seed) {
    std::vector<double> v(n, 0.0);
    v[seed] = 1.0;
    for (const auto& b : basis) {
      double t = 0.0;
      for (int i = 0; i < n; ++i) t += v[i] * b[i];
      for (int i = 0; i < n; ++i) v[i] -= t * b[i];
    }
    double len = 0.0;
    for (double c : v) len += c * c;
    len = std::sqrt(len);
    if (len > 1e-8) {
      for (double& c : v) c /= len;
      basis.push_back(std::move(v));
    }
  }
  basis.erase(basis.begin());
  return basis;
}

bool inside_box(std::span<const double> x, const OracleConfig& cfg) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < cfg.box_lo[i] - 1e-9 || x[i] > cfg.box_hi[i] + 1e-9) return false;
  }
  return true;
}

std::vector<std::vector<double>> hyperplane_grid_points(const Hyperplane& h,
                                                        const OracleConfig& cfg, int target) {
  const int n = h.dimension();
  std::vector<double> p0(n);
  for (int i = 0; i < n; ++i) p0[i] = h.offset * h.normal[i];
  const auto basis = orthonormal_complement(h.normal);
  double half = 0.0;
  for (int i = 0; i < n; ++i) half = std::max(half, (cfg.box_hi[i] - cfg.box_lo[i]) / 2.0);
  const double span = half * 1.8;

  std::vector<std::vector<double>> out;
  if (basis.size() == 1) {
    const int res = std::max(2 * target, 16);
    for (int i = 0; i < res; ++i) {
      const double t = -span + 2.0 * span * (static_cast<double>(i) / (res - 1));
      std::vector<double> x(n);
      for (int k = 0; k < n; ++k) x[k] = p0[k] + t * basis[0][k];
      if (inside_box(x, cfg)) out.push_back(std::move(x));
    }
  } else if (basis.size() == 2) {
    const int res = std::max(static_cast<int>(std::ceil(std::sqrt(4.0 * target))), 5);
    for (int i = 0; i < res; ++i) {
      for (int j = 0; j < res; ++j) {
        const double s = -span + 2.0 * span * (static_cast<double>(i) / (res - 1));
        const double t = -span + 2.0 * span * (static_cast<double>(j) / (res - 1));
        std::vector<double> x(n);
        for (int k = 0; k < n; ++k) x[k] = p0[k] + s * basis[0][k] + t * basis[1][k];
        if (inside_box(x, cfg)) out.push_back(std::move(x));
      }
    }
  }
  return out;
}

bool generators_have_nonzero_constant(const StationaryPrediction& pred) {
  for (const Polynomial& g : pred.generators) {
    if (!g.is_zero() && g.degree() == 0) return true;
  }
  return false;
}

// Candidate on-set points from the generator variety inside the box.
std::vector<std::vector<double>> variety_points(const StationaryPrediction& pred,
                                                const OracleConfig& cfg, int resolution) {
  const int n = pred.dimension;
  if (pred.generators.empty() || generators_have_nonzero_constant(pred)) return {};

  std::vector<double> base(n);
  for (int i = 0; i < n; ++i) base[i] = pred.basepoint[i].get_d();
  std::vector<double> lo(n), hi(n);
  double spacing = 0.0;
  for (int i = 0; i < n; ++i) {
    lo[i] = cfg.box_lo[i] - base[i];
    hi[i] = cfg.box_hi[i] - base[i];
    spacing = std::max(spacing, (hi[i] - lo[i]) / (resolution - 1));
  }
  auto seeds = sample_zero_grid(pred.generators, lo, hi, resolution, 2.0 * spacing);

  std::vector<PolynomialD> system;
  for (const Polynomial& g : pred.generators) system.push_back(to_double(g));

  std::vector<std::vector<double>> out;
  for (auto& seed : seeds) {
    std::vector<double> refined = refine_zero(system, seed);
    std::vector<double> ambient(n);
    for (int i = 0; i < n; ++i) ambient[i] = refined[i] + base[i];
    if (!inside_box(ambient, cfg)) continue;
    if (!membership(pred, ambient, 1e-9)) continue;
    bool dup = false;
    for (const auto& have : out) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d = std::max(d, std::fabs(have[i] - ambient[i]));
      if (d <= 1e-7) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(ambient));
  }
  return out;
}

// Distance from x to the generator variety, estimated by Gauss-Newton
// projection; infinite when there are no generators to project onto.
double variety_distance(const StationaryPrediction& pred, std::span<const double> x) {
  if (pred.generators.empty() || generators_have_nonzero_constant(pred)) {
    return std::numeric_limits<double>::infinity();
  }
  const int n = pred.dimension;
  std::vector<PolynomialD> system;
  for (const Polynomial& g : pred.generators) system.push_back(to_double(g));
  std::vector<double> rel(n);
  for (int i = 0; i < n; ++i) rel[i] = x[i] - pred.basepoint[i].get_d();
  std::vector<double> proj = refine_zero(system, rel);
  std::vector<double> ambient(n);
  for (int i = 0; i < n; ++i) ambient[i] = proj[i] + pred.basepoint[i].get_d();
  if (!membership(pred, ambient, 1e-7)) {
    return std::numeric_limits<double>::infinity();
  }
  double d2 = 0.0;
  for (int i = 0; i < n; ++i) d2 += sq(proj[i] - rel[i]);
  return std::sqrt(d2);
}

}  // namespace

StationarityReport verify_prediction(const FiniteDistribution& f,
                                     const StationaryPrediction& pred, const OracleConfig& cfg,
                                     const VerifyOptions& options) {
  f.validate();
  cfg.validate(f.dimension);
  if (pred.dimension != f.dimension) {
    throw std::invalid_argument("prediction/distribution dimension mismatch");
  }
  if (options.on_count < 0 || options.off_count < 0) {
    throw std::invalid_argument("sample counts must be >= 0");
  }
  const int n = f.dimension;

  StationarityReport report;
  report.config = cfg;
  report.containment_only = pred.containment_only;
  report.on_requested = options.on_count;
  report.off_requested = options.off_count;

  MollifiedField field(f, cfg.mollifier);
  report.reference_scale =
      (cfg.reference_scale > 0.0) ? cfg.reference_scale : reference_scale(field, cfg);
  report.config.reference_scale = report.reference_scale;

  // --- Sample the predicted set. ---
  std::vector<std::vector<double>> on_points;
  if (pred.is_empty_description()) {
    report.notes.push_back("prediction describes the empty set; no on-set samples exist");
  } else if (options.on_count > 0) {
    std::vector<std::vector<std::vector<double>>> pools;
    for (const Hyperplane& h : pred.hyperplanes) {
      pools.push_back(hyperplane_grid_points(h, cfg, options.on_count));
    }
    int resolution = (n == 2) ? 121 : 25;
    for (int attempt = 0; attempt < 3; ++attempt) {
      auto vp = variety_points(pred, cfg, resolution);
      if (!vp.empty()) pools.push_back(std::move(vp));

      on_points.clear();
      std::size_t cursor = 0;
      bool progress = true;
      while (static_cast<int>(on_points.size()) < options.on_count && progress) {
        progress = false;
        for (const auto& pool : pools) {
          if (cursor < pool.size()) {
            const auto& x = pool[cursor];
            bool dup = false;
            for (const auto& have : on_points) {
              double d = 0.0;
              for (int i = 0; i < n; ++i) d = std::max(d, std::fabs(have[i] - x[i]));
              if (d <= 1e-7) {
                dup = true;
                break;
              }
            }
            if (!dup) on_points.push_back(x);
            progress = true;
            if (static_cast<int>(on_points.size()) >= options.on_count) break;
          }
        }
        ++cursor;
      }
      if (static_cast<int>(on_points.size()) >= options.on_count) break;
      if (!vp.empty()) pools.pop_back();
      resolution = resolution * 2 + 1;
    }
    if (static_cast<int>(on_points.size()) < options.on_count) {
      report.notes.push_back("on-set sampling found only " +
                             std::to_string(on_points.size()) + " of " +
                             std::to_string(options.on_count) + " requested points");
    }
  }

  // --- Sample well-separated off-set points. ---
  std::vector<std::vector<double>> off_points;
  if (options.off_count > 0) {
    const double width = cfg.mollifier.width();
    double box_diag = 0.0;
    for (int i = 0; i < n; ++i) box_diag += sq(cfg.box_hi[i] - cfg.box_lo[i]);
    const double margin = std::max(5.0 * width, 0.02 * std::sqrt(box_diag));

    std::mt19937_64 rng(cfg.seed ^ 0xabcdef1234567891ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long max_attempts = 500L * options.off_count + 1000L;
    std::vector<double> x(n);
    for (long attempt = 0;
         attempt < max_attempts && static_cast<int>(off_points.size()) < options.off_count;
         ++attempt) {
      for (int i = 0; i < n; ++i) {
        x[i] = cfg.box_lo[i] + (cfg.box_hi[i] - cfg.box_lo[i]) * unit(rng);
      }
      bool near = false;
      for (const Hyperplane& h : pred.hyperplanes) {
        if (std::fabs(h.signed_distance(x)) < margin) {
          near = true;
          break;
        }
      }
      if (near) continue;
      const double dist = variety_distance(pred, x);
      if (dist < margin) continue;
      off_points.push_back(x);
    }
    if (static_cast<int>(off_points.size()) < options.off_count) {
      report.notes.push_back("off-set sampling found only " +
                             std::to_string(off_points.size()) + " of " +
                             std::to_string(options.off_count) + " requested points");
    }
  }

  // --- Run the indicator on every sample. ---
  std::vector<std::pair<std::vector<double>, bool>> queries;
  for (auto& p : on_points) queries.emplace_back(std::move(p), true);
  for (auto& p : off_points) queries.emplace_back(std::move(p), false);
  report.points.resize(queries.size());

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [location, on_set] = queries[i];
      const IndicatorResult ind = stationarity_indicator(field, cfg, location);
      PointVerdict v;
      v.location = location;
      v.on_predicted_set = on_set;
      v.indicator = ind.value;
      v.normalized = ind.value / report.reference_scale;
      v.stationary = v.normalized <= cfg.pass_threshold;
      v.widened = ind.widened;
      report.points[i] = std::move(v);
    }
  };
  const int workers =
      std::min(worker_count(), static_cast<int>(std::max<std::size_t>(queries.size(), 1)));
  if (workers <= 1) {
    run_range(0, queries.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (queries.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(queries.size(), begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run_range, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  bool on_ok = true;
  bool off_ok = true;
  int off_stationary = 0;
  for (const PointVerdict& v : report.points) {
    if (v.on_predicted_set && !v.stationary) on_ok = false;
    if (!v.on_predicted_set && v.stationary) {
      off_stationary += 1;
      off_ok = false;
    }
  }
  if (pred.containment_only && off_stationary > 0) {
    report.notes.push_back(std::to_string(off_stationary) +
                           " off-set point(s) look stationary; the prediction is "
                           "containment-only, so they are reported, not failed");
  }
  report.pass = on_ok && (pred.containment_only || off_ok);
  if (pred.is_empty_description() && options.on_count > 0) {
    report.notes.push_back("empty prediction: pass reflects off-set behavior only");
  }
  return report;
}

double wave_eval(const MollifiedField& field, const OracleConfig& cfg,
                 std::span<const double> x, double t) {
  cfg.validate(field.dimension());
  if (static_cast<int>(x.size()) != field.dimension()) {
    throw std::invalid_argument("query point dimension mismatch");
  }
  if (t < 0.0) throw std::invalid_argument("time must be >= 0");
  if (t == 0.0) return 0.0;
  const double max_dist = field.max_source_distance(x);

  if (field.dimension() == 3) {
    // u(x, t) = t * (spherical mean of the initial velocity at radius t).
    const QuadChoice q = choose_orders(field, cfg, max_dist, t);
    return t * mean_dispatch(field, x, t, q.order_a, q.order_b);
  }

  // n == 2: u(x, t) = t * int_0^(pi/2) sin(psi) mean(x, t sin(psi)) dpsi,
  // the flat-disc average written with the substitution rho = t sin(psi).
  const QuadChoice outer = choose_orders(field, cfg, max_dist, t);
  const int psi_count = std::max(outer.order_a / 2, 16);
  const auto& rule = detail::gauss_legendre(psi_count);
  long double acc = 0.0L;
  for (const auto& [xi, w] : rule) {
    const double psi = kPi / 4.0 * (xi + 1.0);
    const double r = t * std::sin(psi);
    if (!(r > 0.0)) continue;
    const double cut = cutoff_radius(cfg.mollifier);
    double mean = 0.0;
    if (!sphere_misses_support(field, x, r, cut)) {
      const QuadChoice q = choose_orders(field, cfg, max_dist, r);
      mean = mean_dispatch(field, x, r, q.order_a, q.order_b);
    }
    acc += static_cast<long double>(w) * std::sin(psi) * mean;
  }
  return t * (kPi / 4.0) * static_cast<double>(acc);
}

}  // namespace nodalcone
