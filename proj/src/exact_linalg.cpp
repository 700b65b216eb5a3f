#include "nodalcone/exact_linalg.hpp"

#include <stdexcept>

namespace nodalcone {

namespace {

struct Echelon {
  ExactMatrix mat;                 // reduced row echelon form
  std::vector<Rational> rhs;       // transformed right-hand side (may be empty)
  std::vector<int> pivot_col;      // pivot column of each nonzero row
};

Echelon reduce(ExactMatrix a, std::vector<Rational> b, int cols) {
  const int rows = static_cast<int>(a.size());
  const bool with_rhs = !b.empty();
  for (auto& row : a) {
    if (static_cast<int>(row.size()) != cols) throw std::invalid_argument("ragged matrix");
  }
  Echelon ech;
  int lead = 0;
  for (int col = 0; col < cols && lead < rows; ++col) {
    int pivot = -1;
    for (int r = lead; r < rows; ++r) {
      if (sgn(a[r][col]) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(a[pivot], a[lead]);
    if (with_rhs) std::swap(b[pivot], b[lead]);
    const Rational inv = Rational(1) / a[lead][col];
    for (int c = col; c < cols; ++c) a[lead][c] *= inv;
    if (with_rhs) b[lead] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == lead || sgn(a[r][col]) == 0) continue;
      const Rational factor = a[r][col];
      for (int c = col; c < cols; ++c) a[r][c] -= factor * a[lead][c];
      if (with_rhs) b[r] -= factor * b[lead];
    }
    ech.pivot_col.push_back(col);
    ++lead;
  }
  ech.mat = std::move(a);
  ech.rhs = std::move(b);
  return ech;
}

}  // namespace

std::optional<std::vector<Rational>> solve_exact(ExactMatrix a, std::vector<Rational> b) {
  if (a.size() != b.size()) throw std::invalid_argument("matrix/rhs size mismatch");
  if (a.empty()) return std::vector<Rational>();
  const int cols = static_cast<int>(a[0].size());
  Echelon ech = reduce(std::move(a), std::move(b), cols);
  const int rank = static_cast<int>(ech.pivot_col.size());
  const int rows = static_cast<int>(ech.mat.size());
  for (int r = rank; r < rows; ++r) {
    if (sgn(ech.rhs[r]) != 0) return std::nullopt;
  }
  std::vector<Rational> x(cols, Rational(0));
  for (int r = 0; r < rank; ++r) x[ech.pivot_col[r]] = ech.rhs[r];
  return x;
}

std::vector<std::vector<Rational>> nullspace_exact(ExactMatrix a, int columns) {
  if (columns < 0) throw std::invalid_argument("negative column count");
  if (columns == 0) return {};
  if (a.empty()) a.emplace_back(columns, Rational(0));
  Echelon ech = reduce(std::move(a), {}, columns);
  std::vector<bool> is_pivot(columns, false);
  for (int c : ech.pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free_col = 0; free_col < columns; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rational> v(columns, Rational(0));
    v[free_col] = 1;
    for (std::size_t r = 0; r < ech.pivot_col.size(); ++r) {
      v[ech.pivot_col[r]] = -ech.mat[r][free_col];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace nodalcone
