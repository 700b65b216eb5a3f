#include "nodalcone/harmonic.hpp"

#include <stdexcept>

#include "nodalcone/exact_linalg.hpp"

namespace nodalcone {

namespace {

// Laplacian of |x|^(2j) h_d equals mu(j, d, n) |x|^(2j-2) h_d for harmonic
// homogeneous h_d in n variables, with mu = 2j (n + 2j + 2d - 2).
Rational peel_factor(int j, int d, int n) {
  return Rational(2L * j) * Rational(n + 2L * j + 2L * d - 2L);
}

// Recursive peeling: the harmonic components of g are recovered from those of
// its Laplacian, then the top harmonic part is whatever remains.
// Returns [h_k, h_{k-2}, ...] without trailing padding.
std::vector<Polynomial> peel(const Polynomial& g, int k) {
  const int n = g.dimension();
  const Polynomial lap = g.laplacian();
  if (lap.is_zero()) return {g};

  const std::vector<Polynomial> sub = peel(lap, k - 2);
  std::vector<Polynomial> out(sub.size() + 1, Polynomial::zero(n));
  const Polynomial r2 = Polynomial::radius_squared(n);
  Polynomial top = g;
  Polynomial r2_power = Polynomial::constant(n, Rational(1));
  for (std::size_t j = 1; j <= sub.size(); ++j) {
    const int d = k - 2 * static_cast<int>(j);
    const Rational mu = peel_factor(static_cast<int>(j), d, n);
    out[j] = sub[j - 1] * (Rational(1) / mu);
    r2_power = r2_power * r2;
    top -= r2_power * out[j];
  }
  out[0] = top;
  if (!out[0].laplacian().is_zero()) {
    throw std::logic_error("harmonic peeling produced a non-harmonic top component");
  }
  return out;
}

void require_nonzero_homogeneous(const Polynomial& g, const char* what) {
  if (g.is_zero()) throw std::invalid_argument(std::string(what) + " must be nonzero");
  // Euler identity: sum_i x_i d_i g == deg(g) * g exactly iff g is homogeneous.
  const int n = g.dimension();
  Polynomial euler(n);
  for (int i = 0; i < n; ++i) {
    euler += Polynomial::variable(n, i) * g.derivative(i);
  }
  if (euler != g * Rational(g.degree())) {
    throw std::invalid_argument(std::string(what) + " must be homogeneous");
  }
}

}  // namespace

Polynomial HarmonicDecomposition::reconstruct() const {
  Polynomial acc(dimension);
  const Polynomial r2 = Polynomial::radius_squared(dimension);
  Polynomial r2_power = Polynomial::constant(dimension, Rational(1));
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (j > 0) r2_power = r2_power * r2;
    acc += r2_power * components[j];
  }
  return acc;
}

HarmonicDecomposition gauss_decompose(const Polynomial& g) {
  require_nonzero_homogeneous(g, "gauss_decompose input");
  const int k = g.degree();
  HarmonicDecomposition dec;
  dec.dimension = g.dimension();
  dec.degree = k;
  dec.components = peel(g, k);
  dec.components.resize(k / 2 + 1, Polynomial::zero(g.dimension()));
  for (std::size_t j = 0; j < dec.components.size(); ++j) {
    const Polynomial& h = dec.components[j];
    if (h.is_zero()) continue;
    int d = -1;
    if (!h.is_homogeneous(&d) || d != k - 2 * static_cast<int>(j)) {
      throw std::logic_error("harmonic component has unexpected degree");
    }
  }
  return dec;
}

bool divides_all_laplacians(const Polynomial& psi, const Polynomial& g) {
  if (psi.is_zero()) throw std::invalid_argument("divisor polynomial must be nonzero");
  if (psi.dimension() != g.dimension()) {
    throw std::invalid_argument("polynomial dimension mismatch");
  }
  for (const Polynomial& lap : g.iterated_laplacians()) {
    if (!divide_exact(lap, psi)) return false;
  }
  return true;
}

HarmonicMultipleWitness find_harmonic_multiple(const Polynomial& p, int max_extra_degree) {
  require_nonzero_homogeneous(p, "find_harmonic_multiple input");
  if (max_extra_degree < 0) throw std::invalid_argument("degree bound must be >= 0");
  const int n = p.dimension();

  HarmonicMultipleWitness witness;
  witness.searched_up_to = max_extra_degree;
  for (int d = 0; d <= max_extra_degree; ++d) {
    const auto basis = homogeneous_exponents(n, d);
    // Column m: coefficients of lap(p * x^m); a null vector is a multiplier.
    std::map<Exponents, int, GrlexLess> row_index;
    std::vector<std::vector<std::pair<int, Rational>>> cols(basis.size());
    for (std::size_t m = 0; m < basis.size(); ++m) {
      const Polynomial lap = (p * Polynomial::monomial(n, basis[m], Rational(1))).laplacian();
      for (const auto& [e, c] : lap.terms()) {
        auto [it, inserted] = row_index.emplace(e, static_cast<int>(row_index.size()));
        cols[m].emplace_back(it->second, c);
      }
    }
    ExactMatrix a(row_index.size(), std::vector<Rational>(basis.size(), Rational(0)));
    for (std::size_t m = 0; m < basis.size(); ++m) {
      for (const auto& [row, value] : cols[m]) a[row][m] += value;
    }
    const auto kernel = nullspace_exact(std::move(a), static_cast<int>(basis.size()));
    if (kernel.empty()) continue;
    Polynomial q(n);
    for (std::size_t m = 0; m < basis.size(); ++m) {
      if (sgn(kernel[0][m]) != 0) q.add_term(basis[m], kernel[0][m]);
    }
    witness.multiplier = std::move(q);
    return witness;
  }
  return witness;
}

}  // namespace nodalcone
