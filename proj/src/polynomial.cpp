#include "nodalcone/polynomial.hpp"

#include "nodalcone/exact_linalg.hpp"

namespace nodalcone {

namespace {

void enumerate_homogeneous(int dimension, int axis, int remaining, Exponents& scratch,
                           std::vector<Exponents>& out) {
  if (axis == dimension - 1) {
    scratch[axis] = remaining;
    out.push_back(scratch);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    scratch[axis] = k;
    enumerate_homogeneous(dimension, axis + 1, remaining - k, scratch, out);
  }
}

}  // namespace

std::vector<Exponents> homogeneous_exponents(int dimension, int degree) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (degree < 0) return {};
  std::vector<Exponents> out;
  Exponents scratch(dimension, 0);
  enumerate_homogeneous(dimension, 0, degree, scratch, out);
  std::sort(out.begin(), out.end(), GrlexLess());
  return out;
}

std::vector<Exponents> exponents_up_to(int dimension, int max_degree) {
  std::vector<Exponents> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto level = homogeneous_exponents(dimension, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

PolynomialD to_double(const Polynomial& p) {
  PolynomialD out(p.dimension());
  for (const auto& [e, c] : p.terms()) out.add_term(e, c.get_d());
  return out;
}

std::optional<Polynomial> divide_exact(const Polynomial& numerator, const Polynomial& divisor) {
  if (divisor.is_zero()) throw std::invalid_argument("division by the zero polynomial");
  if (numerator.dimension() != divisor.dimension()) {
    throw std::invalid_argument("polynomial dimension mismatch");
  }
  if (numerator.is_zero()) return Polynomial::zero(numerator.dimension());
  const int dn = numerator.degree();
  const int dd = divisor.degree();
  if (dn < dd) return std::nullopt;

  // Unknown quotient Q of degree <= dn - dd; match coefficients of Q * divisor
  // against the numerator and solve the resulting exact linear system.
  const int n = numerator.dimension();
  const auto q_basis = exponents_up_to(n, dn - dd);

  std::map<Exponents, int, GrlexLess> row_index;
  auto row_of = [&](const Exponents& e) {
    auto [it, inserted] = row_index.emplace(e, static_cast<int>(row_index.size()));
    return it->second;
  };
  for (const auto& [e, c] : numerator.terms()) row_of(e);
  std::vector<std::pair<int, std::vector<std::pair<int, Rational>>>> columns;
  columns.reserve(q_basis.size());
  for (std::size_t col = 0; col < q_basis.size(); ++col) {
    std::vector<std::pair<int, Rational>> entries;
    for (const auto& [e, c] : divisor.terms()) {
      Exponents prod(n);
      for (int i = 0; i < n; ++i) prod[i] = e[i] + q_basis[col][i];
      entries.emplace_back(row_of(prod), c);
    }
    columns.emplace_back(static_cast<int>(col), std::move(entries));
  }

  const int rows = static_cast<int>(row_index.size());
  const int cols = static_cast<int>(q_basis.size());
  ExactMatrix a(rows, std::vector<Rational>(cols, Rational(0)));
  std::vector<Rational> b(rows, Rational(0));
  for (const auto& [col, entries] : columns) {
    for (const auto& [row, value] : entries) a[row][col] += value;
  }
  for (const auto& [e, c] : numerator.terms()) b[row_index.at(e)] = c;

  auto sol = solve_exact(a, b);
  if (!sol) return std::nullopt;
  Polynomial q(n);
  for (int col = 0; col < cols; ++col) {
    if (sgn((*sol)[col]) != 0) q.add_term(q_basis[col], (*sol)[col]);
  }
  return q;
}

}  // namespace nodalcone
