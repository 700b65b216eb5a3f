#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nodalcone/rational.hpp"

namespace nodalcone {

// Exponent vector of a monomial; length equals the ambient dimension.
using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

// Graded lexicographic order: lower total degree first, ties broken
// lexicographically.  This fixes the canonical term order used everywhere
// (serialization, iteration, equality of printed forms).
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

namespace detail {

template <class Coeff>
struct CoeffOps;

template <>
struct CoeffOps<Rational> {
  static bool is_zero(const Rational& c) { return sgn(c) == 0; }
  static double as_double(const Rational& c) { return c.get_d(); }
  static Rational from_int(long v) { return Rational(v); }
  static std::string to_text(const Rational& c) { return rational_to_string(c); }
  // GMP arithmetic assumes canonical operands; enforce at entry boundaries.
  static void normalize(Rational& c) { c.canonicalize(); }
};

template <>
struct CoeffOps<double> {
  static bool is_zero(double c) { return c == 0.0; }
  static double as_double(double c) { return c; }
  static double from_int(long v) { return static_cast<double>(v); }
  static std::string to_text(double c) { return std::to_string(c); }
  static void normalize(double&) {}
};

}  // namespace detail

template <class Coeff>
class BasicAffineMap;

// Sparse multivariate polynomial with a fixed ambient dimension.  The zero
// polynomial has no terms and, by convention, degree() == -1.
template <class Coeff>
class BasicPolynomial {
 public:
  using TermMap = std::map<Exponents, Coeff, GrlexLess>;
  using Ops = detail::CoeffOps<Coeff>;

  BasicPolynomial() : dim_(0) {}
  explicit BasicPolynomial(int dimension) : dim_(dimension) {
    if (dimension < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
  }

  static BasicPolynomial zero(int dimension) { return BasicPolynomial(dimension); }

  static BasicPolynomial constant(int dimension, Coeff c) {
    BasicPolynomial p(dimension);
    p.add_term(Exponents(dimension, 0), std::move(c));
    return p;
  }

  static BasicPolynomial variable(int dimension, int axis) {
    BasicPolynomial p(dimension);
    Exponents e(dimension, 0);
    p.check_axis(axis);
    e[axis] = 1;
    p.add_term(std::move(e), Ops::from_int(1));
    return p;
  }

  static BasicPolynomial monomial(int dimension, Exponents exponents, Coeff c) {
    BasicPolynomial p(dimension);
    p.check_exponents(exponents);
    p.add_term(std::move(exponents), std::move(c));
    return p;
  }

  // Sum of squares of the coordinates, |x|^2.
  static BasicPolynomial radius_squared(int dimension) {
    BasicPolynomial p(dimension);
    for (int i = 0; i < dimension; ++i) {
      Exponents e(dimension, 0);
      e[i] = 2;
      p.add_term(std::move(e), Ops::from_int(1));
    }
    return p;
  }

  int dimension() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  int term_count() const { return static_cast<int>(terms_.size()); }
  const TermMap& terms() const { return terms_; }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  Coeff coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    if (it == terms_.end()) return Ops::from_int(0);
    return it->second;
  }

  void add_term(Exponents e, Coeff c) {
    check_exponents(e);
    Ops::normalize(c);
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!Ops::is_zero(c)) terms_.emplace(std::move(e), std::move(c));
      return;
    }
    it->second = it->second + c;
    if (Ops::is_zero(it->second)) terms_.erase(it);
  }

  BasicPolynomial operator-() const {
    BasicPolynomial r(dim_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  BasicPolynomial& operator+=(const BasicPolynomial& other) {
    check_same_dim(other);
    for (const auto& [e, c] : other.terms_) {
      auto [it, inserted] = terms_.emplace(e, c);
      if (!inserted) {
        it->second = it->second + c;
        if (Ops::is_zero(it->second)) terms_.erase(it);
      }
    }
    return *this;
  }

  BasicPolynomial& operator-=(const BasicPolynomial& other) { return *this += -other; }

  friend BasicPolynomial operator+(BasicPolynomial a, const BasicPolynomial& b) {
    a += b;
    return a;
  }
  friend BasicPolynomial operator-(BasicPolynomial a, const BasicPolynomial& b) {
    a -= b;
    return a;
  }

  friend BasicPolynomial operator*(const BasicPolynomial& a, const BasicPolynomial& b) {
    a.check_same_dim(b);
    BasicPolynomial r(a.dim_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.dim_);
        for (int i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
        const Coeff prod = ca * cb;
        auto [it, inserted] = r.terms_.emplace(std::move(e), prod);
        if (!inserted) it->second = it->second + prod;
      }
    }
    r.prune();
    return r;
  }

  friend BasicPolynomial operator*(const BasicPolynomial& a, const Coeff& s) {
    BasicPolynomial r(a.dim_);
    if (Ops::is_zero(s)) return r;
    for (const auto& [e, c] : a.terms_) r.terms_.emplace(e, c * s);
    r.prune();
    return r;
  }
  friend BasicPolynomial operator*(const Coeff& s, const BasicPolynomial& a) { return a * s; }

  bool operator==(const BasicPolynomial& other) const {
    return dim_ == other.dim_ && terms_ == other.terms_;
  }
  bool operator!=(const BasicPolynomial& other) const { return !(*this == other); }

  BasicPolynomial pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative polynomial power");
    BasicPolynomial r = constant(dim_, Ops::from_int(1));
    for (int i = 0; i < k; ++i) r = r * (*this);
    return r;
  }

  BasicPolynomial derivative(int axis) const {
    check_axis(axis);
    BasicPolynomial r(dim_);
    for (const auto& [e, c] : terms_) {
      if (e[axis] == 0) continue;
      Exponents d = e;
      d[axis] -= 1;
      r.terms_.emplace(std::move(d), c * Ops::from_int(e[axis]));
    }
    return r;
  }

  BasicPolynomial laplacian() const {
    BasicPolynomial r(dim_);
    for (const auto& [e, c] : terms_) {
      for (int axis = 0; axis < dim_; ++axis) {
        if (e[axis] < 2) continue;
        Exponents d = e;
        d[axis] -= 2;
        const Coeff add = c * Ops::from_int(static_cast<long>(e[axis]) * (e[axis] - 1));
        auto [it, inserted] = r.terms_.emplace(std::move(d), add);
        if (!inserted) it->second = it->second + add;
      }
    }
    r.prune();
    return r;
  }

  // [P, lap P, lap^2 P, ...] down to (and excluding) the first identically
  // zero iterate.  The list for P != 0 always ends at the constant or earlier;
  // for P == 0 the list is empty.
  std::vector<BasicPolynomial> iterated_laplacians() const {
    std::vector<BasicPolynomial> chain;
    BasicPolynomial cur = *this;
    while (!cur.is_zero()) {
      chain.push_back(cur);
      cur = cur.laplacian();
    }
    return chain;
  }

  Coeff evaluate(std::span<const Coeff> point) const {
    if (static_cast<int>(point.size()) != dim_) {
      throw std::invalid_argument("evaluation point has wrong dimension");
    }
    std::vector<Coeff> at(point.begin(), point.end());
    for (Coeff& v : at) Ops::normalize(v);
    std::vector<int> maxexp(dim_, 0);
    for (const auto& [e, c] : terms_) {
      for (int i = 0; i < dim_; ++i) maxexp[i] = std::max(maxexp[i], e[i]);
    }
    std::vector<std::vector<Coeff>> powers(dim_);
    for (int i = 0; i < dim_; ++i) {
      powers[i].resize(maxexp[i] + 1, Ops::from_int(1));
      for (int k = 1; k <= maxexp[i]; ++k) powers[i][k] = powers[i][k - 1] * at[i];
    }
    Coeff acc = Ops::from_int(0);
    for (const auto& [e, c] : terms_) {
      Coeff t = c;
      for (int i = 0; i < dim_; ++i) {
        if (e[i] > 0) t = t * powers[i][e[i]];
      }
      acc = acc + t;
    }
    return acc;
  }

  double evaluate_double(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != dim_) {
      throw std::invalid_argument("evaluation point has wrong dimension");
    }
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = Ops::as_double(c);
      for (int i = 0; i < dim_; ++i) {
        for (int k = 0; k < e[i]; ++k) t *= point[i];
      }
      acc += t;
    }
    return acc;
  }

  // Largest absolute coefficient, as a double.  Used for scale-relative
  // zero tests.
  double coefficient_inf_norm() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::fabs(Ops::as_double(c)));
    return m;
  }

  // Components by total degree, ascending; only nonzero components listed.
  std::vector<std::pair<int, BasicPolynomial>> homogeneous_components() const {
    std::map<int, BasicPolynomial> buckets;
    for (const auto& [e, c] : terms_) {
      const int d = total_degree(e);
      auto [it, inserted] = buckets.try_emplace(d, BasicPolynomial(dim_));
      it->second.terms_.emplace(e, c);
    }
    std::vector<std::pair<int, BasicPolynomial>> out;
    out.reserve(buckets.size());
    for (auto& [d, p] : buckets) out.emplace_back(d, std::move(p));
    return out;
  }

  // True when every term has the same total degree (vacuously true for 0,
  // with *degree_out = -1).
  bool is_homogeneous(int* degree_out = nullptr) const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      const int t = total_degree(e);
      if (d == -1) {
        d = t;
      } else if (t != d) {
        return false;
      }
    }
    if (degree_out) *degree_out = d;
    return true;
  }

  // P(A x + b) for an affine map of matching dimension.
  BasicPolynomial compose_affine(const BasicAffineMap<Coeff>& map) const;

  std::string to_text() const {
    if (terms_.empty()) return "0";
    static const char* named = "xyzw";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += "(" + Ops::to_text(c) + ")";
      for (int i = 0; i < dim_; ++i) {
        if (e[i] == 0) continue;
        out += "*";
        if (dim_ <= 4) {
          out += named[i];
        } else {
          out += "x" + std::to_string(i + 1);
        }
        if (e[i] > 1) out += "^" + std::to_string(e[i]);
      }
    }
    return out;
  }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (Ops::is_zero(it->second)) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void check_axis(int axis) const {
    if (axis < 0 || axis >= dim_) throw std::invalid_argument("axis out of range");
  }

  void check_exponents(const Exponents& e) const {
    if (static_cast<int>(e.size()) != dim_) {
      throw std::invalid_argument("exponent vector has wrong dimension");
    }
    for (int v : e) {
      if (v < 0) throw std::invalid_argument("negative exponent");
    }
  }

  void check_same_dim(const BasicPolynomial& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  int dim_;
  TermMap terms_;
};

using Polynomial = BasicPolynomial<Rational>;
using PolynomialD = BasicPolynomial<double>;

// Affine map x -> A x + b with A stored row-major.
template <class Coeff>
class BasicAffineMap {
 public:
  using Ops = detail::CoeffOps<Coeff>;

  BasicAffineMap(int dimension, std::vector<Coeff> matrix_row_major, std::vector<Coeff> shift)
      : dim_(dimension), matrix_(std::move(matrix_row_major)), shift_(std::move(shift)) {
    if (dimension < 1) throw std::invalid_argument("affine map dimension must be >= 1");
    if (matrix_.size() != static_cast<std::size_t>(dim_) * dim_ ||
        shift_.size() != static_cast<std::size_t>(dim_)) {
      throw std::invalid_argument("affine map shape mismatch");
    }
    for (Coeff& v : matrix_) Ops::normalize(v);
    for (Coeff& v : shift_) Ops::normalize(v);
  }

  static BasicAffineMap identity(int dimension) {
    std::vector<Coeff> m(static_cast<std::size_t>(dimension) * dimension, Ops::from_int(0));
    for (int i = 0; i < dimension; ++i) m[i * dimension + i] = Ops::from_int(1);
    return BasicAffineMap(dimension, std::move(m), std::vector<Coeff>(dimension, Ops::from_int(0)));
  }

  static BasicAffineMap translation(int dimension, std::vector<Coeff> shift) {
    auto id = identity(dimension);
    return BasicAffineMap(dimension, id.matrix_, std::move(shift));
  }

  int dimension() const { return dim_; }
  const Coeff& matrix_at(int row, int col) const { return matrix_[row * dim_ + col]; }
  const std::vector<Coeff>& matrix() const { return matrix_; }
  const std::vector<Coeff>& shift() const { return shift_; }

  std::vector<Coeff> apply(std::span<const Coeff> x) const {
    if (static_cast<int>(x.size()) != dim_) {
      throw std::invalid_argument("affine map applied to wrong dimension");
    }
    std::vector<Coeff> y(dim_, Ops::from_int(0));
    for (int i = 0; i < dim_; ++i) {
      Coeff acc = shift_[i];
      for (int j = 0; j < dim_; ++j) acc = acc + matrix_at(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

  // this(other(x)).
  BasicAffineMap compose(const BasicAffineMap& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("affine map dimension mismatch");
    std::vector<Coeff> m(static_cast<std::size_t>(dim_) * dim_, Ops::from_int(0));
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        Coeff acc = Ops::from_int(0);
        for (int k = 0; k < dim_; ++k) acc = acc + matrix_at(i, k) * other.matrix_at(k, j);
        m[i * dim_ + j] = acc;
      }
    }
    std::vector<Coeff> b = apply(other.shift_);
    return BasicAffineMap(dim_, std::move(m), std::move(b));
  }

  // Exact test A^T A == I (meaningful over the rationals).
  bool linear_part_is_orthogonal() const {
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        Coeff acc = Ops::from_int(0);
        for (int k = 0; k < dim_; ++k) acc = acc + matrix_at(k, i) * matrix_at(k, j);
        const Coeff expect = Ops::from_int(i == j ? 1 : 0);
        if (!Ops::is_zero(acc - expect)) return false;
      }
    }
    return true;
  }

  // Inverse assuming the linear part is orthogonal: x -> A^T (y - b).
  BasicAffineMap inverse_orthogonal() const {
    std::vector<Coeff> m(static_cast<std::size_t>(dim_) * dim_, Ops::from_int(0));
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) m[i * dim_ + j] = matrix_at(j, i);
    }
    std::vector<Coeff> b(dim_, Ops::from_int(0));
    for (int i = 0; i < dim_; ++i) {
      Coeff acc = Ops::from_int(0);
      for (int j = 0; j < dim_; ++j) acc = acc + matrix_at(j, i) * shift_[j];
      b[i] = -acc;
    }
    return BasicAffineMap(dim_, std::move(m), std::move(b));
  }

  BasicAffineMap linear_part() const {
    return BasicAffineMap(dim_, matrix_, std::vector<Coeff>(dim_, Ops::from_int(0)));
  }

 private:
  int dim_;
  std::vector<Coeff> matrix_;
  std::vector<Coeff> shift_;
};

using AffineMapQ = BasicAffineMap<Rational>;
using AffineMapD = BasicAffineMap<double>;

template <class Coeff>
BasicPolynomial<Coeff> BasicPolynomial<Coeff>::compose_affine(
    const BasicAffineMap<Coeff>& map) const {
  if (map.dimension() != dim_) throw std::invalid_argument("affine map dimension mismatch");
  // Images of the coordinates under the map, as degree-<=1 polynomials.
  std::vector<BasicPolynomial> image;
  image.reserve(dim_);
  for (int i = 0; i < dim_; ++i) {
    BasicPolynomial li(dim_);
    if (!Ops::is_zero(map.shift()[i])) {
      li.add_term(Exponents(dim_, 0), map.shift()[i]);
    }
    for (int j = 0; j < dim_; ++j) {
      if (Ops::is_zero(map.matrix_at(i, j))) continue;
      Exponents e(dim_, 0);
      e[j] = 1;
      li.add_term(std::move(e), map.matrix_at(i, j));
    }
    image.push_back(std::move(li));
  }
  std::vector<int> maxexp(dim_, 0);
  for (const auto& [e, c] : terms_) {
    for (int i = 0; i < dim_; ++i) maxexp[i] = std::max(maxexp[i], e[i]);
  }
  // Power tables of the coordinate images.
  std::vector<std::vector<BasicPolynomial>> powers(dim_);
  for (int i = 0; i < dim_; ++i) {
    powers[i].push_back(constant(dim_, Ops::from_int(1)));
    for (int k = 1; k <= maxexp[i]; ++k) powers[i].push_back(powers[i][k - 1] * image[i]);
  }
  BasicPolynomial acc(dim_);
  for (const auto& [e, c] : terms_) {
    BasicPolynomial t = constant(dim_, c);
    for (int i = 0; i < dim_; ++i) {
      if (e[i] > 0) t = t * powers[i][e[i]];
    }
    acc += t;
  }
  return acc;
}

// All exponent vectors in `dimension` variables of exact total degree.
std::vector<Exponents> homogeneous_exponents(int dimension, int degree);

// All exponent vectors of total degree <= max_degree, in graded lex order.
std::vector<Exponents> exponents_up_to(int dimension, int max_degree);

PolynomialD to_double(const Polynomial& p);

// Exact polynomial division: returns Q with numerator == Q * divisor, or
// nullopt when no such polynomial exists.  Division by zero throws.
std::optional<Polynomial> divide_exact(const Polynomial& numerator, const Polynomial& divisor);

}  // namespace nodalcone
