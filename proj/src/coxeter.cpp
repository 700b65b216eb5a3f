#include "nodalcone/coxeter.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace nodalcone {

namespace {

constexpr double kSignTol = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> to_double_vec(const RationalVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

// Solve the (possibly singular) symmetric system (M + ridge I) x = rhs by
// Gaussian elimination; used only to locate an approximate common point.
std::vector<double> solve_ridge(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const int n = static_cast<int>(rhs.size());
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += m[i][i];
  const double ridge = std::max(trace, 1.0) * 1e-12;
  for (int i = 0; i < n; ++i) m[i][i] += ridge;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= m[r][c] * x[c];
    x[r] = acc / m[r][r];
  }
  return x;
}

}  // namespace

double Hyperplane::signed_distance(std::span<const double> x) const {
  return dot(normal, x) - offset;
}

Hyperplane make_hyperplane(std::vector<double> normal, double offset) {
  const double len = norm(normal);
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw std::invalid_argument("hyperplane normal must be nonzero and finite");
  }
  for (double& v : normal) v /= len;
  offset /= len;
  double sign = 0.0;
  for (double v : normal) {
    if (std::fabs(v) > kSignTol) {
      sign = (v > 0.0) ? 1.0 : -1.0;
      break;
    }
  }
  if (sign < 0.0) {
    for (double& v : normal) v = -v;
    offset = -offset;
  }
  return Hyperplane{std::move(normal), offset};
}

bool hyperplane_close(const Hyperplane& a, const Hyperplane& b, double tol) {
  if (a.dimension() != b.dimension()) return false;
  double d = std::fabs(a.offset - b.offset);
  for (int i = 0; i < a.dimension(); ++i) {
    d = std::max(d, std::fabs(a.normal[i] - b.normal[i]));
  }
  return d <= tol;
}

std::vector<double> mirror_point(std::span<const double> y, const Hyperplane& h) {
  if (static_cast<int>(y.size()) != h.dimension()) {
    throw std::invalid_argument("point/hyperplane dimension mismatch");
  }
  const double s = 2.0 * h.signed_distance(y);
  std::vector<double> out(y.begin(), y.end());
  for (int i = 0; i < h.dimension(); ++i) out[i] -= s * h.normal[i];
  return out;
}

Hyperplane reflect_hyperplane(const Hyperplane& h, const Hyperplane& mirror) {
  if (h.dimension() != mirror.dimension()) {
    throw std::invalid_argument("hyperplane dimension mismatch");
  }
  const int n = h.dimension();
  const double nm = dot(h.normal, mirror.normal);
  std::vector<double> normal(n);
  for (int i = 0; i < n; ++i) normal[i] = h.normal[i] - 2.0 * nm * mirror.normal[i];
  const double offset = h.offset - 2.0 * mirror.offset * nm;
  return make_hyperplane(std::move(normal), offset);
}

AffineMapQ reflection_map_exact(const RationalVec& normal, const Rational& offset) {
  const int n = static_cast<int>(normal.size());
  Rational s(0);
  for (const Rational& v : normal) s += v * v;
  if (sgn(s) == 0) throw std::invalid_argument("reflection normal must be nonzero");
  std::vector<Rational> m(static_cast<std::size_t>(n) * n, Rational(0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Rational v = (i == j) ? Rational(1) : Rational(0);
      v -= Rational(2) * normal[i] * normal[j] / s;
      m[i * n + j] = v;
    }
  }
  std::vector<Rational> b(n, Rational(0));
  for (int i = 0; i < n; ++i) b[i] = Rational(2) * offset * normal[i] / s;
  return AffineMapQ(n, std::move(m), std::move(b));
}

AffineMapD reflection_map(const Hyperplane& h) {
  const int n = h.dimension();
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m[i * n + j] = (i == j ? 1.0 : 0.0) - 2.0 * h.normal[i] * h.normal[j];
    }
  }
  std::vector<double> b(n, 0.0);
  for (int i = 0; i < n; ++i) b[i] = 2.0 * h.offset * h.normal[i];
  return AffineMapD(n, std::move(m), std::move(b));
}

CoxeterClosureResult coxeter_closure(const std::vector<Hyperplane>& initial, int max_planes) {
  if (initial.empty()) throw std::invalid_argument("closure needs at least one hyperplane");
  if (max_planes < 1) throw std::invalid_argument("max_planes must be >= 1");
  const int n = initial.front().dimension();

  CoxeterClosureResult result;
  auto add_unique = [&](const Hyperplane& h) {
    for (const Hyperplane& have : result.hyperplanes) {
      if (hyperplane_close(have, h)) return false;
    }
    result.hyperplanes.push_back(h);
    return true;
  };
  for (const Hyperplane& h : initial) {
    if (h.dimension() != n) throw std::invalid_argument("hyperplane dimension mismatch");
    add_unique(make_hyperplane(h.normal, h.offset));
  }

  result.closed = true;
  if (result.hyperplanes.size() > static_cast<std::size_t>(max_planes)) {
    result.hyperplanes.resize(max_planes);
    result.closed = false;
  }
  std::size_t frontier_begin = 0;
  while (result.closed && frontier_begin < result.hyperplanes.size()) {
    const std::size_t frontier_end = result.hyperplanes.size();
    for (std::size_t i = 0; i < frontier_end; ++i) {
      for (std::size_t j = (i < frontier_begin ? frontier_begin : 0); j < frontier_end; ++j) {
        if (i == j) continue;
        const Hyperplane image =
            reflect_hyperplane(result.hyperplanes[i], result.hyperplanes[j]);
        if (add_unique(image) &&
            result.hyperplanes.size() > static_cast<std::size_t>(max_planes)) {
          result.hyperplanes.resize(max_planes);
          result.closed = false;
        }
        if (!result.closed) break;
      }
      if (!result.closed) break;
    }
    if (!result.closed) break;
    frontier_begin = frontier_end;
  }

  const std::size_t q = result.hyperplanes.size();
  result.group_order_bound =
      (q >= 63) ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << q);

  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (const Hyperplane& h : result.hyperplanes) {
    for (int i = 0; i < n; ++i) {
      rhs[i] += h.offset * h.normal[i];
      for (int j = 0; j < n; ++j) m[i][j] += h.normal[i] * h.normal[j];
    }
  }
  std::vector<double> x = solve_ridge(std::move(m), std::move(rhs));
  double worst = 0.0;
  for (const Hyperplane& h : result.hyperplanes) {
    worst = std::max(worst, std::fabs(h.signed_distance(x)));
  }
  if (worst < 1e-8) result.common_point = std::move(x);
  return result;
}

void FiniteDistribution::validate() const {
  if (dimension < 1) throw std::invalid_argument("distribution dimension must be >= 1");
  if (sources.empty()) throw std::invalid_argument("distribution needs at least one source");
  bool any_nonzero = false;
  for (const Source& s : sources) {
    if (static_cast<int>(s.point.size()) != dimension ||
        s.weight.dimension() != dimension) {
      throw std::invalid_argument("source dimension mismatch");
    }
    if (!s.weight.is_zero()) any_nonzero = true;
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      bool same = true;
      for (int k = 0; k < dimension; ++k) {
        if (sources[i].point[k] != sources[j].point[k]) {
          same = false;
          break;
        }
      }
      if (same) throw std::invalid_argument("support points must be distinct");
    }
  }
  if (!any_nonzero) throw std::invalid_argument("all source weights are zero");
}

std::vector<std::vector<double>> FiniteDistribution::support_points() const {
  std::vector<std::vector<double>> out;
  out.reserve(sources.size());
  for (const Source& s : sources) out.push_back(to_double_vec(s.point));
  return out;
}

int FiniteDistribution::max_weight_degree() const {
  int d = 0;
  for (const Source& s : sources) d = std::max(d, s.weight.degree());
  return d;
}

FiniteDistribution pullback(const FiniteDistribution& f, const AffineMapQ& sigma) {
  f.validate();
  if (sigma.dimension() != f.dimension) {
    throw std::invalid_argument("map/distribution dimension mismatch");
  }
  if (!sigma.linear_part_is_orthogonal()) {
    throw std::invalid_argument("pullback requires an orthogonal linear part");
  }
  const AffineMapQ inv = sigma.inverse_orthogonal();
  const AffineMapQ lin = sigma.linear_part();
  FiniteDistribution out;
  out.dimension = f.dimension;
  out.sources.reserve(f.sources.size());
  for (const auto& src : f.sources) {
    FiniteDistribution::Source moved;
    moved.point = inv.apply(src.point);
    moved.weight = src.weight.compose_affine(lin);
    out.sources.push_back(std::move(moved));
  }
  return out;
}

bool is_odd(const FiniteDistribution& f, const Hyperplane& h) {
  f.validate();
  if (h.dimension() != f.dimension) {
    throw std::invalid_argument("hyperplane/distribution dimension mismatch");
  }
  const AffineMapD lin = reflection_map(h).linear_part();
  const auto points = f.support_points();
  const double match_tol = 1e-9;

  std::vector<bool> used(f.sources.size(), false);
  for (std::size_t i = 0; i < f.sources.size(); ++i) {
    const std::vector<double> image = mirror_point(points[i], h);
    int match = -1;
    for (std::size_t j = 0; j < f.sources.size(); ++j) {
      double dist = 0.0;
      for (int k = 0; k < f.dimension; ++k) dist = std::max(dist, std::fabs(image[k] - points[j][k]));
      if (dist <= match_tol) {
        if (match >= 0) return false;
        match = static_cast<int>(j);
      }
    }
    if (match < 0 || used[match]) return false;
    used[match] = true;

    // Weight transported from source i must cancel the weight at the match.
    PolynomialD moved = to_double(f.sources[i].weight).compose_affine(lin);
    PolynomialD residue = moved + to_double(f.sources[match].weight);
    const double scale = std::max({1.0, to_double(f.sources[i].weight).coefficient_inf_norm(),
                                   to_double(f.sources[match].weight).coefficient_inf_norm()});
    if (residue.coefficient_inf_norm() > 1e-10 * scale) return false;
  }
  return true;
}

bool mirror_support_check(const FiniteDistribution& f, const Hyperplane& h, double tol) {
  f.validate();
  if (h.dimension() != f.dimension) {
    throw std::invalid_argument("hyperplane/distribution dimension mismatch");
  }
  const auto points = f.support_points();
  std::vector<bool> used(points.size(), false);
  for (const auto& p : points) {
    const std::vector<double> image = mirror_point(p, h);
    bool found = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (used[j]) continue;
      double dist = 0.0;
      for (int k = 0; k < f.dimension; ++k) dist = std::max(dist, std::fabs(image[k] - points[j][k]));
      if (dist <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<Hyperplane> candidate_mirrors(const FiniteDistribution& f,
                                          const std::vector<Hyperplane>& extra_candidates) {
  f.validate();
  const auto points = f.support_points();
  std::vector<Hyperplane> candidates;
  auto push_unique = [&](Hyperplane h) {
    for (const Hyperplane& have : candidates) {
      if (hyperplane_close(have, h)) return;
    }
    candidates.push_back(std::move(h));
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      std::vector<double> normal(f.dimension);
      double offset = 0.0;
      for (int k = 0; k < f.dimension; ++k) {
        normal[k] = points[j][k] - points[i][k];
        offset += normal[k] * (points[i][k] + points[j][k]) / 2.0;
      }
      push_unique(make_hyperplane(std::move(normal), offset));
    }
  }
  for (const Hyperplane& h : extra_candidates) {
    push_unique(make_hyperplane(h.normal, h.offset));
  }
  std::vector<Hyperplane> out;
  for (const Hyperplane& h : candidates) {
    if (mirror_support_check(f, h)) out.push_back(h);
  }
  return out;
}

double AffineSubspace::distance_squared(std::span<const double> x) const {
  std::vector<double> rel(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rel[i] = x[i] - basepoint[i];
  for (const auto& b : basis) {
    const double t = dot(rel, b);
    for (std::size_t i = 0; i < rel.size(); ++i) rel[i] -= t * b[i];
  }
  return dot(rel, rel);
}

AffineSubspace span_support(const FiniteDistribution& f) {
  f.validate();
  const auto points = f.support_points();
  AffineSubspace sub;
  sub.basepoint = points.front();
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::vector<double> v(f.dimension);
    for (int k = 0; k < f.dimension; ++k) v[k] = points[i][k] - sub.basepoint[k];
    for (const auto& b : sub.basis) {
      const double t = dot(v, b);
      for (int k = 0; k < f.dimension; ++k) v[k] -= t * b[k];
    }
    const double len = norm(v);
    if (len > 1e-10) {
      for (double& c : v) c /= len;
      sub.basis.push_back(std::move(v));
    }
  }
  return sub;
}

}  // namespace nodalcone
