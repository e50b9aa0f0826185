#pragma once

// Coefficients of the two-component Ginzburg-Landau system
//
//   -f'' - f'/r + n^2 f/r^2 + [A_s (f_s^2 - t_s^2) + B (f_o^2 - t_o^2)] f_s = 0
//
// for s = +/-, o the other component, together with the positivity
// hypothesis A_+ > 0, A_- > 0, t_+ > 0, t_- > 0, B^2 < A_+ A_-.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "errors.hpp"

namespace vortex2c {

enum class Component { plus = 0, minus = 1 };

inline constexpr Component other(Component c) {
  return c == Component::plus ? Component::minus : Component::plus;
}

struct CouplingParams {
  double A_plus = 1.0;
  double A_minus = 1.0;
  double B = 0.0;
  double t_plus = 1.0;
  double t_minus = 1.0;

  double A(Component c) const { return c == Component::plus ? A_plus : A_minus; }
  double t(Component c) const { return c == Component::plus ? t_plus : t_minus; }

  /// A_+ A_- - B^2, positive under the hypothesis.
  double det() const { return A_plus * A_minus - B * B; }

  CouplingParams with_B(double b) const {
    CouplingParams p = *this;
    p.B = b;
    return p;
  }

  friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

struct DegreePair {
  int n_plus = 0;
  int n_minus = 0;

  int n(Component c) const { return c == Component::plus ? n_plus : n_minus; }

  friend bool operator==(const DegreePair&, const DegreePair&) = default;
};

struct ConjugationFlags {
  bool plus = false;
  bool minus = false;

  friend bool operator==(const ConjugationFlags&, const ConjugationFlags&) = default;
};

struct NormalizedDegrees {
  DegreePair degrees;
  ConjugationFlags conjugated;
};

struct DerivedBounds {
  double lambda_s = 0.0;   // smallest eigenvalue of [[A_+, B], [B, A_-]]
  double M = 0.0;          // max{A_+ t_+^2 + B t_-^2, A_- t_-^2 + B t_+^2}
  double Lambda_sq = 0.0;  // min{2M / lambda_s, t_+^2 + t_-^2}
};

/// Two-component condensate data before rescaling.
struct BecParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double g1 = 1.0;
  double g2 = 1.0;
  double g12 = 0.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double hbar = 1.0;
};

struct GlFromBec {
  CouplingParams params;
  double epsilon = 1.0;
};

inline const CouplingParams& validate(const CouplingParams& p) {
  auto fail = [](const std::string& what) {
    throw HypothesisViolation("hypothesis (H) violated: " + what);
  };
  if (!(std::isfinite(p.A_plus) && std::isfinite(p.A_minus) && std::isfinite(p.B) &&
        std::isfinite(p.t_plus) && std::isfinite(p.t_minus)))
    fail("coefficients must be finite");
  if (!(p.A_plus > 0)) fail("A_plus > 0");
  if (!(p.A_minus > 0)) fail("A_minus > 0");
  if (!(p.t_plus > 0)) fail("t_plus > 0");
  if (!(p.t_minus > 0)) fail("t_minus > 0");
  // strict: positive definiteness of the quartic potential
  if (!(p.B * p.B < p.A_plus * p.A_minus)) fail("B^2 < A_plus * A_minus");
  return p;
}

inline bool is_valid(const CouplingParams& p) {
  try {
    validate(p);
    return true;
  } catch (const HypothesisViolation&) {
    return false;
  }
}

/// Closed-form smallest eigenvalue of the symmetric 2x2 coupling matrix.
inline double smallest_coupling_eigenvalue(double a, double d, double b) {
  const double disc = std::hypot(a - d, 2.0 * b);
  const double big = 0.5 * (a + d + disc);
  // product of eigenvalues is a*d - b^2; avoids cancellation when small
  if (big > 0) return (a * d - b * b) / big;
  return 0.5 * (a + d - disc);
}

inline DerivedBounds derived_bounds(const CouplingParams& p) {
  DerivedBounds d;
  d.lambda_s = smallest_coupling_eigenvalue(p.A_plus, p.A_minus, p.B);
  const double tp2 = p.t_plus * p.t_plus;
  const double tm2 = p.t_minus * p.t_minus;
  d.M = std::max(p.A_plus * tp2 + p.B * tm2, p.A_minus * tm2 + p.B * tp2);
  d.Lambda_sq = std::min(2.0 * d.M / d.lambda_s, tp2 + tm2);
  return d;
}

inline GlFromBec bec_to_gl(const BecParams& bec) {
  if (!(bec.m1 > 0 && bec.m2 > 0)) throw NonPositiveDensity("masses must be positive");
  const double det = bec.g1 * bec.g2 - bec.g12 * bec.g12;
  if (!(det > 0)) throw HypothesisViolation("g1*g2 - g12^2 > 0 required");
  const double tp2 = (bec.mu1 * bec.g2 - bec.mu2 * bec.g12) / det * std::sqrt(bec.m2 / bec.m1);
  const double tm2 = (bec.mu2 * bec.g1 - bec.mu1 * bec.g12) / det * std::sqrt(bec.m1 / bec.m2);
  if (!(tp2 > 0)) throw NonPositiveDensity("t_plus^2 <= 0 for the given chemical potentials");
  if (!(tm2 > 0)) throw NonPositiveDensity("t_minus^2 <= 0 for the given chemical potentials");
  GlFromBec out;
  out.params.A_plus = bec.m1 / bec.m2 * bec.g1;
  out.params.A_minus = bec.m2 / bec.m1 * bec.g2;
  out.params.B = bec.g12;
  out.params.t_plus = std::sqrt(tp2);
  out.params.t_minus = std::sqrt(tm2);
  out.epsilon = std::sqrt(bec.hbar * bec.hbar / std::sqrt(bec.m1 * bec.m2));
  validate(out.params);
  return out;
}

/// Degrees are taken nonnegative by complex conjugation of a component.
inline NormalizedDegrees normalize_degrees(int n_plus, int n_minus) {
  NormalizedDegrees out;
  out.degrees = {std::abs(n_plus), std::abs(n_minus)};
  out.conjugated = {n_plus < 0, n_minus < 0};
  return out;
}

}  // namespace vortex2c
