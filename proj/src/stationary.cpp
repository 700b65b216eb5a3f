#include "nodalcone/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nodalcone {

namespace {

double scale_factor(double coeff_norm, int degree, double radius) {
  return coeff_norm * std::pow(std::max(1.0, radius), std::max(degree, 0));
}

double vec_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Deduplicate generators exactly, preserving first-seen order.
void push_unique(std::vector<Polynomial>& list, Polynomial p) {
  for (const Polynomial& have : list) {
    if (have == p) return;
  }
  list.push_back(std::move(p));
}

bool any_nonzero_constant(const std::vector<Polynomial>& generators) {
  for (const Polynomial& g : generators) {
    if (!g.is_zero() && g.degree() == 0) return true;
  }
  return false;
}

struct CandidatePlane {
  std::vector<double> normal;  // unit, canonical sign
  double offset_centered;      // n . x = offset in centered coordinates
};

// Numeric certification: rotate so the plane normal becomes the first
// coordinate axis, substitute the first coordinate by the plane offset, and
// require the remainder to be negligible against the polynomial's scale.
bool divides_numeric(const PolynomialD& p, const CandidatePlane& plane) {
  const int n = p.dimension();
  // Orthonormal basis with first row = normal (Gram-Schmidt over seeds).
  std::vector<std::vector<double>> basis;
  basis.push_back(plane.normal);
  for (int seed = 0; seed < n && static_cast<int>(basis.size()) < n; ++seed) {
    std::vector<double> v(n, 0.0);
    v[seed] = 1.0;
    for (const auto& b : basis) {
      double t = 0.0;
      for (int i = 0; i < n; ++i) t += v[i] * b[i];
      for (int i = 0; i < n; ++i) v[i] -= t * b[i];
    }
    const double len = vec_norm(v);
    if (len > 1e-8) {
      for (double& c : v) c /= len;
      basis.push_back(std::move(v));
    }
  }
  if (static_cast<int>(basis.size()) != n) return false;

  // x = B^T u, so the rotated polynomial is p(B^T u).
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i * n + j] = basis[j][i];
  }
  const PolynomialD rotated = p.compose_affine(AffineMapD(n, std::move(m), std::vector<double>(n, 0.0)));

  // Remainder of division by (u_0 - offset): substitute u_0 = offset.
  PolynomialD remainder(n);
  for (const auto& [e, c] : rotated.terms()) {
    Exponents reduced = e;
    reduced[0] = 0;
    double value = c;
    for (int k = 0; k < e[0]; ++k) value *= plane.offset_centered;
    remainder.add_term(std::move(reduced), value);
  }
  const double scale =
      scale_factor(p.coefficient_inf_norm(), p.degree(), std::fabs(plane.offset_centered));
  return remainder.coefficient_inf_norm() <= 1e-10 * std::max(scale, 1e-300);
}

// Exact certification via small-denominator rational reconstruction of the
// plane; returns the exact linear form when it divides p.
std::optional<Polynomial> exact_linear_form(const Polynomial& p, const CandidatePlane& plane,
                                            long max_denominator) {
  const int n = p.dimension();
  Polynomial form(n);
  RationalVec normal_q(n);
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    auto q = rationalize(plane.normal[i], max_denominator);
    if (!q) return std::nullopt;
    normal_q[i] = *q;
    err = std::max(err, std::fabs(q->get_d() - plane.normal[i]));
  }
  auto c_q = rationalize(plane.offset_centered, max_denominator);
  if (!c_q) return std::nullopt;
  err = std::max(err, std::fabs(c_q->get_d() - plane.offset_centered));
  if (err > 1e-7) return std::nullopt;
  bool all_zero = true;
  for (int i = 0; i < n; ++i) {
    if (sgn(normal_q[i]) != 0) all_zero = false;
  }
  if (all_zero) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    if (sgn(normal_q[i]) == 0) continue;
    Exponents e(n, 0);
    e[i] = 1;
    form.add_term(std::move(e), normal_q[i]);
  }
  form.add_term(Exponents(n, 0), -*c_q);
  if (!divide_exact(p, form)) return std::nullopt;
  return form;
}

}  // namespace

std::vector<Hyperplane> extract_hyperplanes(const Polynomial& p, const RationalVec& basepoint,
                                            const HyperplaneExtractionOptions& options) {
  if (p.is_zero()) throw std::invalid_argument("cannot extract hyperplanes of the zero polynomial");
  const int n = p.dimension();
  if (static_cast<int>(basepoint.size()) != n) {
    throw std::invalid_argument("basepoint dimension mismatch");
  }
  if (p.degree() < 1) return {};

  HyperplaneExtractionOptions opt = options;
  if (opt.box_lo.empty()) opt.box_lo.assign(n, -1.5);
  if (opt.box_hi.empty()) opt.box_hi.assign(n, 1.5);
  if (opt.resolution <= 1) opt.resolution = (n <= 2) ? 61 : (n == 3 ? 21 : 9);
  if (static_cast<int>(opt.box_lo.size()) != n || static_cast<int>(opt.box_hi.size()) != n) {
    throw std::invalid_argument("box dimension mismatch");
  }

  const PolynomialD pd = to_double(p);
  std::vector<PolynomialD> system{pd};
  std::vector<PolynomialD> gradient;
  gradient.reserve(n);
  for (int i = 0; i < n; ++i) gradient.push_back(pd.derivative(i));

  const double coeff_norm = std::max(pd.coefficient_inf_norm(), 1e-300);
  double spacing = 0.0;
  for (int i = 0; i < n; ++i) {
    spacing = std::max(spacing, (opt.box_hi[i] - opt.box_lo[i]) / (opt.resolution - 1));
  }

  std::vector<CandidatePlane> candidates;
  auto push_candidate = [&](std::span<const double> at) {
    std::vector<double> x = refine_zero(system, std::vector<double>(at.begin(), at.end()));
    const double radius = vec_norm(x);
    const double residual = std::fabs(pd.evaluate_double(x));
    if (residual > 1e-11 * scale_factor(coeff_norm, pd.degree(), radius)) return;
    std::vector<double> grad(n);
    for (int i = 0; i < n; ++i) grad[i] = gradient[i].evaluate_double(x);
    const double glen = vec_norm(grad);
    if (glen < 1e-6 * scale_factor(coeff_norm, pd.degree() - 1, radius)) return;
    for (double& g : grad) g /= glen;
    double sign = 0.0;
    for (double g : grad) {
      if (std::fabs(g) > 1e-12) {
        sign = (g > 0.0) ? 1.0 : -1.0;
        break;
      }
    }
    if (sign < 0.0) {
      for (double& g : grad) g = -g;
    }
    double offset = 0.0;
    for (int i = 0; i < n; ++i) offset += grad[i] * x[i];
    for (const CandidatePlane& have : candidates) {
      double d = std::fabs(have.offset_centered - offset);
      for (int i = 0; i < n; ++i) d = std::max(d, std::fabs(have.normal[i] - grad[i]));
      if (d <= 1e-6) return;
    }
    candidates.push_back(CandidatePlane{std::move(grad), offset});
  };

  std::vector<int> idx(n, 0);
  std::vector<double> point(n, 0.0);
  const int res = opt.resolution;
  while (true) {
    double radius = 0.0;
    for (int i = 0; i < n; ++i) {
      point[i] = opt.box_lo[i] +
                 (opt.box_hi[i] - opt.box_lo[i]) * (static_cast<double>(idx[i]) / (res - 1));
      radius = std::max(radius, std::fabs(point[i]));
    }
    const double value = std::fabs(pd.evaluate_double(point));
    if (value <= 2.0 * spacing * scale_factor(coeff_norm, pd.degree(), radius)) {
      push_candidate(point);
    }
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == res) {
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  for (const Hyperplane& h : opt.extra_candidates) {
    const Hyperplane c = make_hyperplane(h.normal, h.offset);
    candidates.push_back(CandidatePlane{c.normal, c.offset});
  }

  std::vector<Hyperplane> accepted;
  for (const CandidatePlane& cand : candidates) {
    bool ok = false;
    if (exact_linear_form(p, cand, opt.max_denominator)) {
      ok = true;
    } else {
      ok = divides_numeric(pd, cand);
    }
    if (!ok) continue;
    Hyperplane h = make_hyperplane(cand.normal, cand.offset_centered);
    bool dup = false;
    for (const Hyperplane& have : accepted) {
      if (hyperplane_close(have, h, 1e-7)) {
        dup = true;
        break;
      }
    }
    if (!dup) accepted.push_back(std::move(h));
  }

  // Express offsets in ambient coordinates: n . x = c + n . basepoint.
  for (Hyperplane& h : accepted) {
    double shift = 0.0;
    for (int i = 0; i < n; ++i) shift += h.normal[i] * basepoint[i].get_d();
    h.offset += shift;
  }
  std::sort(accepted.begin(), accepted.end(), [](const Hyperplane& a, const Hyperplane& b) {
    return std::lexicographical_compare(a.normal.begin(), a.normal.end(), b.normal.begin(),
                                        b.normal.end());
  });
  return accepted;
}

StationaryPrediction predict_single_point(const Polynomial& g, const RationalVec& y) {
  if (g.is_zero()) throw std::invalid_argument("source weight must be nonzero");
  const int n = g.dimension();
  if (static_cast<int>(y.size()) != n) throw std::invalid_argument("point dimension mismatch");

  StationaryPrediction pred;
  pred.dimension = n;
  pred.basepoint = y;
  for (const auto& [deg, component] : g.homogeneous_components()) {
    for (const Polynomial& lap : component.iterated_laplacians()) {
      push_unique(pred.generators, lap);
    }
  }

  if (!any_nonzero_constant(pred.generators)) {
    // Candidate planes come from the lowest-degree generator (fewest factors);
    // a plane is kept only when its linear form divides every generator.
    const Polynomial* seed = nullptr;
    for (const Polynomial& gen : pred.generators) {
      if (seed == nullptr || gen.degree() < seed->degree()) seed = &gen;
    }
    if (seed != nullptr && seed->degree() >= 1) {
      RationalVec origin(n, Rational(0));
      HyperplaneExtractionOptions opts;
      for (Hyperplane h : extract_hyperplanes(*seed, origin, opts)) {
        bool in_all = true;
        for (const Polynomial& gen : pred.generators) {
          if (&gen == seed) continue;
          CandidatePlane cand{h.normal, h.offset};
          if (exact_linear_form(gen, cand, opts.max_denominator)) continue;
          if (!divides_numeric(to_double(gen), cand)) {
            in_all = false;
            break;
          }
        }
        if (!in_all) continue;
        double shift = 0.0;
        for (int i = 0; i < n; ++i) shift += h.normal[i] * y[i].get_d();
        h.offset += shift;
        pred.hyperplanes.push_back(std::move(h));
      }
    }
  }

  if (g.is_homogeneous()) {
    AffineSubspace edge;
    edge.basepoint.resize(n);
    for (int i = 0; i < n; ++i) edge.basepoint[i] = y[i].get_d();
    pred.edge = std::move(edge);
  }
  pred.containment_only = false;
  return pred;
}

StationaryPrediction predict_multi_point(const FiniteDistribution& f) {
  f.validate();
  const int n = f.dimension;

  StationaryPrediction pred;
  pred.dimension = n;
  pred.basepoint.assign(n, Rational(0));
  pred.containment_only = true;

  for (const Hyperplane& h : candidate_mirrors(f)) {
    if (is_odd(f, h)) pred.hyperplanes.push_back(h);
  }

  for (const auto& src : f.sources) {
    if (src.weight.is_zero()) {
      // A bare zero weight cannot constrain anything; the intersection over
      // sources is taken only across nonzero weights.
      continue;
    }
    RationalVec minus_y(n);
    for (int i = 0; i < n; ++i) minus_y[i] = -src.point[i];
    const AffineMapQ translate = AffineMapQ::translation(n, std::move(minus_y));
    for (const auto& [deg, component] : src.weight.homogeneous_components()) {
      for (const Polynomial& lap : component.iterated_laplacians()) {
        push_unique(pred.generators, lap.compose_affine(translate));
      }
    }
  }

  pred.edge = span_support(f);
  return pred;
}

bool membership(const StationaryPrediction& pred, std::span<const double> x, double tol) {
  if (static_cast<int>(x.size()) != pred.dimension) {
    throw std::invalid_argument("query point dimension mismatch");
  }
  if (tol < 0.0) throw std::invalid_argument("tolerance must be >= 0");

  if (!pred.generators.empty()) {
    std::vector<double> rel(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rel[i] = x[i] - pred.basepoint[i].get_d();
    const double radius = vec_norm(rel);
    bool all_zero = true;
    for (const Polynomial& g : pred.generators) {
      const PolynomialD gd = to_double(g);
      const double bound = tol * scale_factor(std::max(gd.coefficient_inf_norm(), 1e-300),
                                              gd.degree(), radius);
      if (std::fabs(gd.evaluate_double(rel)) > bound) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) return true;
  }
  const double xr = std::max(1.0, vec_norm(x));
  for (const Hyperplane& h : pred.hyperplanes) {
    if (std::fabs(h.signed_distance(x)) <= tol * xr) return true;
  }
  return false;
}

bool membership_exact(const StationaryPrediction& pred, const RationalVec& x) {
  if (static_cast<int>(x.size()) != pred.dimension) {
    throw std::invalid_argument("query point dimension mismatch");
  }
  if (pred.generators.empty()) return false;
  RationalVec rel(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rel[i] = x[i] - pred.basepoint[i];
  for (const Polynomial& g : pred.generators) {
    if (sgn(g.evaluate(rel)) != 0) return false;
  }
  return true;
}

std::vector<std::vector<double>> sample_zero_grid(const std::vector<Polynomial>& polys,
                                                  const std::vector<double>& box_lo,
                                                  const std::vector<double>& box_hi,
                                                  int resolution, double tol) {
  if (polys.empty()) throw std::invalid_argument("need at least one polynomial");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  const int n = polys.front().dimension();
  if (static_cast<int>(box_lo.size()) != n || static_cast<int>(box_hi.size()) != n) {
    throw std::invalid_argument("box dimension mismatch");
  }
  std::vector<PolynomialD> pd;
  std::vector<double> norms;
  for (const Polynomial& p : polys) {
    if (p.dimension() != n) throw std::invalid_argument("polynomial dimension mismatch");
    pd.push_back(to_double(p));
    norms.push_back(std::max(pd.back().coefficient_inf_norm(), 1e-300));
  }

  std::vector<std::vector<double>> hits;
  std::vector<int> idx(n, 0);
  std::vector<double> point(n, 0.0);
  while (true) {
    for (int i = 0; i < n; ++i) {
      point[i] = box_lo[i] +
                 (box_hi[i] - box_lo[i]) * (static_cast<double>(idx[i]) / (resolution - 1));
    }
    const double radius = vec_norm(point);
    bool ok = true;
    for (std::size_t k = 0; k < pd.size(); ++k) {
      const double bound = tol * scale_factor(norms[k], pd[k].degree(), radius);
      if (std::fabs(pd[k].evaluate_double(point)) > bound) {
        ok = false;
        break;
      }
    }
    if (ok) hits.push_back(point);
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == resolution) {
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return hits;
}

std::vector<double> refine_zero(const std::vector<PolynomialD>& system, std::vector<double> x0,
                                int max_iterations) {
  if (system.empty()) throw std::invalid_argument("need at least one polynomial");
  const int n = system.front().dimension();
  if (static_cast<int>(x0.size()) != n) throw std::invalid_argument("point dimension mismatch");
  const int m = static_cast<int>(system.size());

  std::vector<std::vector<PolynomialD>> jac(m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) jac[r].push_back(system[r].derivative(c));
  }

  auto residual_norm = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (int r = 0; r < m; ++r) {
      const double v = system[r].evaluate_double(x);
      s += v * v;
    }
    return s;
  };

  double best = residual_norm(x0);
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<double> rvec(m);
    std::vector<std::vector<double>> j(m, std::vector<double>(n));
    for (int r = 0; r < m; ++r) {
      rvec[r] = system[r].evaluate_double(x0);
      for (int c = 0; c < n; ++c) j[r][c] = jac[r][c].evaluate_double(x0);
    }
    // Normal equations (J^T J + ridge) dx = -J^T r.
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    double trace = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        for (int r = 0; r < m; ++r) a[i][k] += j[r][i] * j[r][k];
      }
      trace += a[i][i];
      for (int r = 0; r < m; ++r) b[i] -= j[r][i] * rvec[r];
    }
    const double ridge = std::max(trace, 1e-30) * 1e-14;
    for (int i = 0; i < n; ++i) a[i][i] += ridge;
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < n; ++col) {
      int pivot = col;
      for (int r = col + 1; r < n; ++r) {
        if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
      }
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
      if (std::fabs(a[col][col]) < 1e-300) return x0;
      for (int r = col + 1; r < n; ++r) {
        const double f = a[r][col] / a[col][col];
        for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        b[r] -= f * b[col];
      }
    }
    std::vector<double> dx(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
      double acc = b[r];
      for (int c = r + 1; c < n; ++c) acc -= a[r][c] * dx[c];
      dx[r] = acc / a[r][r];
    }
    std::vector<double> next(n);
    double step = 1.0;
    bool improved = false;
    for (int half = 0; half < 8 && !improved; ++half) {
      for (int i = 0; i < n; ++i) next[i] = x0[i] + step * dx[i];
      const double rn = residual_norm(next);
      if (rn < best) {
        best = rn;
        x0 = next;
        improved = true;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return x0;
}

}  // namespace nodalcone
