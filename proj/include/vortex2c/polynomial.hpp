#pragma once

// Dense univariate polynomials over an exact or floating scalar, with the
// Sturm-sequence root count used to certify sign-definiteness on (0, 1].

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <system_error>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace vortex2c {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <class T>
inline constexpr bool is_exact_v = !std::is_floating_point_v<T>;

template <class T>
int sign_of(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return (v > 0) - (v < 0);
  } else {
    return v.sign();
  }
}

template <class T>
double to_double(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return static_cast<double>(v);
  } else {
    return v.template convert_to<double>();
  }
}

/// Exact rational with the value of the shortest decimal string that
/// round-trips to x, so 0.7 becomes 7/10 rather than its binary expansion.
inline Rational to_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("to_rational: non-finite input");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
  if (res.ec != std::errc()) throw std::runtime_error("to_rational: formatting failed");
  const std::string s(buf, res.ptr);
  const auto e = s.find('e');
  std::string mant = s.substr(0, e);
  const int exp10 = std::stoi(s.substr(e + 1));
  bool neg = false;
  if (!mant.empty() && mant[0] == '-') {
    neg = true;
    mant.erase(0, 1);
  }
  int frac_digits = 0;
  if (const auto dot = mant.find('.'); dot != std::string::npos) {
    frac_digits = static_cast<int>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  BigInt num(mant);
  if (neg) num = -num;
  const int p = exp10 - frac_digits;
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(p)));
  return p >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
}

inline std::string fraction_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

template <class T>
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
  static Polynomial monomial(const T& v, std::size_t power) {
    std::vector<T> c(power + 1, T(0));
    c[power] = v;
    return Polynomial(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  /// Degree, or -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  /// Coefficient of s^k (zero past the degree).
  T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
  const std::vector<T>& coeffs() const { return c_; }
  const T& leading() const { return c_.back(); }

  T operator()(const T& s) const {
    T acc(0);
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * s + c_[k];
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<long long>(k));
    return Polynomial(std::move(d));
  }

  /// p(s) / s^k, dropping the k lowest coefficients (assumed zero).
  Polynomial shift_down(std::size_t k) const {
    if (k >= c_.size()) return {};
    return Polynomial(std::vector<T>(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end()));
  }

  /// Index of the lowest nonzero coefficient (size() for the zero polynomial).
  std::size_t lowest_nonzero() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (sign_of(c_[k]) != 0) return k;
    return c_.size();
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<T> c(a.c_);
    for (auto& v : c) v = -v;
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(const T& s, const Polynomial& p) {
    std::vector<T> c(p.c_);
    for (auto& v : c) v *= s;
    return Polynomial(std::move(c));
  }

  /// Remainder of Euclidean division a = q b + r, deg r < deg b.
  friend Polynomial remainder(Polynomial a, const Polynomial& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    while (!a.is_zero() && a.degree() >= b.degree()) {
      const T factor = a.leading() / b.leading();
      const std::size_t shift = static_cast<std::size_t>(a.degree() - b.degree());
      for (std::size_t k = 0; k < b.c_.size(); ++k) a.c_[k + shift] -= factor * b.c_[k];
      // the leading term cancels exactly for exact scalars; force it for floats
      a.c_.back() = T(0);
      a.trim();
    }
    return a;
  }

private:
  void trim() {
    while (!c_.empty() && sign_of(c_.back()) == 0) c_.pop_back();
  }

  std::vector<T> c_;
};

template <class T>
std::vector<Polynomial<T>> sturm_sequence(const Polynomial<T>& p) {
  std::vector<Polynomial<T>> seq;
  if (p.is_zero()) return seq;
  seq.push_back(p);
  auto d = p.derivative();
  if (d.is_zero()) return seq;
  seq.push_back(d);
  while (true) {
    auto r = -remainder(seq[seq.size() - 2], seq.back());
    if (r.is_zero()) break;
    seq.push_back(std::move(r));
  }
  return seq;
}

template <class T>
int sign_changes_at(const std::vector<Polynomial<T>>& seq, const T& x) {
  int changes = 0, prev = 0;
  for (const auto& q : seq) {
    const int s = sign_of(q(x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

/// Number of distinct real roots in (a, b].
template <class T>
int count_roots(const Polynomial<T>& p, const T& a, const T& b) {
  const auto seq = sturm_sequence(p);
  if (seq.empty()) throw std::domain_error("count_roots: zero polynomial");
  return sign_changes_at(seq, a) - sign_changes_at(seq, b);
}

/// True when p has sign `sign` (+1 or -1) everywhere on (0, 1].
template <class T>
bool has_sign_on_unit_interval(const Polynomial<T>& p, int sign) {
  if (p.is_zero()) return false;
  // factor out the root at s = 0 (sign there is set by the lowest term)
  const auto q = p.shift_down(p.lowest_nonzero());
  if (sign_of(q(T(1))) != sign) return false;
  if (sign_of(q(T(0))) != sign) return false;
  if constexpr (is_exact_v<T>) {
    return count_roots(q, T(0), T(1)) == 0;
  } else {
    constexpr int samples = 20000;
    for (int i = 1; i <= samples; ++i)
      if (sign_of(q(T(i) / T(samples))) != sign) return false;
    return true;
  }
}

}  // namespace vortex2c
