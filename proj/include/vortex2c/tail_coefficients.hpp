#pragma once

// Large-r expansion f = t + a/r^2 + b/r^4 + O(r^-6) and the defect series of
// the envelope candidates
//
//   w(r) = t + a/r^2 + b/r^4 + c (R/r)^6,
//
// written in s = (R/r)^2 as w = t + (a/R^2) s + (b/R^4) s^2 + c s^3.  Every
// routine is templated on the scalar so the same code runs in exact rational
// arithmetic (certifying M_2 = M_4 = 0) and in double precision.

#include <array>
#include <stdexcept>

#include "model.hpp"
#include "polynomial.hpp"

namespace vortex2c {

template <class T>
struct Coefficients {
  T A_plus, A_minus, B, t_plus, t_minus;

  const T& A(Component c) const { return c == Component::plus ? A_plus : A_minus; }
  const T& t(Component c) const { return c == Component::plus ? t_plus : t_minus; }
  T det() const { return A_plus * A_minus - B * B; }
};

inline Coefficients<double> coefficients(const CouplingParams& p) {
  return {p.A_plus, p.A_minus, p.B, p.t_plus, p.t_minus};
}

inline Coefficients<Rational> exact_coefficients(const CouplingParams& p) {
  return {to_rational(p.A_plus), to_rational(p.A_minus), to_rational(p.B), to_rational(p.t_plus),
          to_rational(p.t_minus)};
}

template <class T>
struct TailExpansion {
  T a_plus{0}, a_minus{0}, b_plus{0}, b_minus{0};

  const T& a(Component c) const { return c == Component::plus ? a_plus : a_minus; }
  const T& b(Component c) const { return c == Component::plus ? b_plus : b_minus; }
};

/// a_s = (1/2)(B n_o^2 - A_o n_s^2) / ((A_+ A_- - B^2) t_s)
template <class T>
T leading_coefficient(const Coefficients<T>& k, const DegreePair& d, Component s) {
  const Component o = other(s);
  const T ns2 = T(d.n(s) * d.n(s));
  const T no2 = T(d.n(o) * d.n(o));
  return (k.B * no2 - k.A(o) * ns2) / (T(2) * k.det() * k.t(s));
}

/// Coefficient of r^-4, fixed by requiring the s^2 term of the defect series
/// to vanish once a_+/- are chosen.
template <class T>
T second_coefficient(const Coefficients<T>& k, const DegreePair& d, Component s) {
  const Component o = other(s);
  const T ns2 = T(d.n(s) * d.n(s));
  const T no2 = T(d.n(o) * d.n(o));
  const T ns4 = ns2 * ns2;
  const T no4 = no2 * no2;
  const T& As = k.A(s);
  const T& Ao = k.A(o);
  const T& B = k.B;
  const T ts2 = k.t(s) * k.t(s);
  const T to2 = k.t(o) * k.t(o);
  const T D = k.det();
  const T num = Ao * Ao * (T(8) * ns2 + ns4) * to2 - B * Ao * (T(2) * ns2 + T(8)) * no2 * to2 -
                T(8) * B * As * no2 * ts2 + B * B * (T(8) * ts2 * ns2 + no4 * to2);
  return -num / (T(8) * D * D * ts2 * k.t(s) * to2);
}

template <class T>
TailExpansion<T> leading_coeffs(const Coefficients<T>& k, const DegreePair& d) {
  TailExpansion<T> e;
  e.a_plus = leading_coefficient(k, d, Component::plus);
  e.a_minus = leading_coefficient(k, d, Component::minus);
  return e;
}

template <class T>
TailExpansion<T> second_coeffs(const Coefficients<T>& k, const DegreePair& d) {
  TailExpansion<T> e = leading_coeffs(k, d);
  e.b_plus = second_coefficient(k, d, Component::plus);
  e.b_minus = second_coefficient(k, d, Component::minus);
  return e;
}

inline TailExpansion<double> tail_expansion(const CouplingParams& p, const DegreePair& d) {
  return second_coeffs(coefficients(p), d);
}

/// Solution of A_+ t_+ c_+ + B t_- c_- = 1, B t_+ c_+ + A_- t_- c_- = -1.
template <class T>
std::array<T, 2> mixed_envelope_constants(const Coefficients<T>& k) {
  const T D = k.det();
  return {(k.A_minus + k.B) / (D * k.t_plus), -(k.A_plus + k.B) / (D * k.t_minus)};
}

/// Solution of A_+ t_+ c_+ + B t_- c_- = 1, B t_+ c_+ + A_- t_- c_- = 1.
template <class T>
std::array<T, 2> same_sign_envelope_constants(const Coefficients<T>& k) {
  const T D = k.det();
  return {(k.A_minus - k.B) / (D * k.t_plus), (k.A_plus - k.B) / (D * k.t_minus)};
}

/// Which of the two candidates in a pair bounds its component from above.
enum class EnvelopeBranch {
  upper_plus_lower_minus,  // B > 0
  lower_plus_upper_minus,  // B > 0, roles exchanged
  upper_both,              // B <= 0
  lower_both,              // B <= 0
};

inline constexpr std::array<int, 2> required_signs(EnvelopeBranch b) {
  switch (b) {
    case EnvelopeBranch::upper_plus_lower_minus: return {+1, -1};
    case EnvelopeBranch::lower_plus_upper_minus: return {-1, +1};
    case EnvelopeBranch::upper_both: return {+1, +1};
    case EnvelopeBranch::lower_both: return {-1, -1};
  }
  return {0, 0};
}

inline const char* to_string(EnvelopeBranch b) {
  switch (b) {
    case EnvelopeBranch::upper_plus_lower_minus: return "upper_plus_lower_minus";
    case EnvelopeBranch::lower_plus_upper_minus: return "lower_plus_upper_minus";
    case EnvelopeBranch::upper_both: return "upper_both";
    case EnvelopeBranch::lower_both: return "lower_both";
  }
  return "?";
}

/// r^-6 coefficients (c_+, c_-) of the candidate pair for a given delta.
template <class T>
std::array<T, 2> envelope_c(const Coefficients<T>& k, EnvelopeBranch branch, const T& delta) {
  switch (branch) {
    case EnvelopeBranch::upper_plus_lower_minus: {
      auto c = mixed_envelope_constants(k);
      return {delta * c[0], delta * c[1]};
    }
    case EnvelopeBranch::lower_plus_upper_minus: {
      auto c = mixed_envelope_constants(k);
      return {-delta * c[0], -delta * c[1]};
    }
    case EnvelopeBranch::upper_both: {
      auto c = same_sign_envelope_constants(k);
      return {delta * c[0], delta * c[1]};
    }
    case EnvelopeBranch::lower_both: {
      auto c = same_sign_envelope_constants(k);
      return {-delta * c[0], -delta * c[1]};
    }
  }
  throw std::logic_error("envelope_c: bad branch");
}

/// Candidate w = t + (a/R^2) s + (b/R^4) s^2 + c s^3 as a polynomial in s.
template <class T>
Polynomial<T> envelope_polynomial(const T& t, const T& a, const T& b, const T& c, const T& R) {
  const T R2 = R * R;
  return Polynomial<T>(std::vector<T>{t, a / R2, b / (R2 * R2), c});
}

/// Defect series LHS(w_s) = sum_k M_{2k} s^k for both members of a pair.
/// Uses -Delta_r s^k = -4 k^2 s^{k+1} / R^2 and n^2/r^2 = n^2 s / R^2.
template <class T>
std::array<Polynomial<T>, 2> expand_defect_series(const Coefficients<T>& k, const DegreePair& d,
                                                  const TailExpansion<T>& tail, const std::array<T, 2>& c,
                                                  const T& R) {
  const std::array<Polynomial<T>, 2> w = {
      envelope_polynomial(k.t_plus, tail.a_plus, tail.b_plus, c[0], R),
      envelope_polynomial(k.t_minus, tail.a_minus, tail.b_minus, c[1], R)};
  const T inv_R2 = T(1) / (R * R);
  const auto s_poly = Polynomial<T>::monomial(T(1), 1);

  std::array<Polynomial<T>, 2> excess;  // w^2 - t^2
  for (int i = 0; i < 2; ++i) {
    const T& t = i == 0 ? k.t_plus : k.t_minus;
    excess[i] = w[i] * w[i] - Polynomial<T>::constant(t * t);
  }

  std::array<Polynomial<T>, 2> out;
  for (int i = 0; i < 2; ++i) {
    const Component s = i == 0 ? Component::plus : Component::minus;
    const auto& wi = w[i];
    std::vector<T> lap(static_cast<std::size_t>(wi.degree() + 2), T(0));
    for (std::size_t p = 1; p < wi.coeffs().size(); ++p) {
      const T kk = T(static_cast<long long>(4 * p * p));
      lap[p + 1] = -kk * wi.coeffs()[p] * inv_R2;
    }
    const T n2 = T(d.n(s) * d.n(s));
    const Polynomial<T> linear = Polynomial<T>(std::move(lap)) + (n2 * inv_R2) * (s_poly * wi);
    const Polynomial<T> bracket = k.A(s) * excess[i] + k.B * excess[1 - i];
    out[i] = linear + bracket * wi;
  }
  return out;
}

/// M_{2k} for k = 1..9 (index 0 holds M_2).
template <class T>
std::array<T, 9> defect_coefficients(const Polynomial<T>& series) {
  std::array<T, 9> m{};
  for (std::size_t k = 1; k <= 9; ++k) m[k - 1] = series.coeff(k);
  return m;
}

}  // namespace vortex2c
