#include "nodalcone/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace nodalcone {

namespace {

bool is_integer_token(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rational rational_from_string(const std::string& text) {
  const auto slash = text.find('/');
  std::string num = (slash == std::string::npos) ? text : text.substr(0, slash);
  std::string den = (slash == std::string::npos) ? "1" : text.substr(slash + 1);
  if (!is_integer_token(num) || !is_integer_token(den)) {
    throw std::invalid_argument("malformed rational literal: '" + text + "'");
  }
  if (num[0] == '+') num.erase(0, 1);  // mpz rejects a leading plus sign
  if (den[0] == '+') den.erase(0, 1);
  const mpz_class numerator(num);
  const mpz_class denominator(den);
  Rational value(numerator, denominator);
  if (value.get_den() == 0) {
    throw std::invalid_argument("zero denominator in rational literal: '" + text + "'");
  }
  value.canonicalize();
  return value;
}

std::string rational_to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot convert non-finite double to rational");
  }
  Rational r;
  mpq_set_d(r.get_mpq_t(), value);
  r.canonicalize();
  return r;
}

std::optional<Rational> rationalize(double value, long max_denominator) {
  if (!std::isfinite(value)) return std::nullopt;
  if (max_denominator < 1) max_denominator = 1;

  // Continued-fraction convergents p_k/q_k of |value|.
  double x = std::fabs(value);
  long p_prev = 1, q_prev = 0;
  long p_cur = static_cast<long>(std::floor(x));
  long q_cur = 1;
  double frac = x - std::floor(x);
  for (int step = 0; step < 64 && frac > 1e-18; ++step) {
    x = 1.0 / frac;
    const double a_f = std::floor(x);
    if (a_f > 9e17) break;
    const long a = static_cast<long>(a_f);
    const long p_next = a * p_cur + p_prev;
    const long q_next = a * q_cur + q_prev;
    if (q_next > max_denominator || p_next < 0 || q_next < 0) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    frac = x - a_f;
  }
  Rational r(p_cur, q_cur);
  r.canonicalize();
  if (value < 0) r = -r;
  return r;
}

}  // namespace nodalcone
