#pragma once

// Envelope selection, tail fitting and envelope verification on solved
// profiles.  The closed-form coefficients and the defect series live in
// tail_coefficients.hpp.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "solver.hpp"
#include "tail_coefficients.hpp"

namespace vortex2c {

struct EnvelopeSearch {
  int max_delta_exponent = 10;  // delta = 2^-1 .. 2^-10
  int max_R_exponent = 6;       // R = 2 .. 64
  int budget = 60;              // candidate (delta, R) pairs
};

/// Which candidate pairs build the envelopes: the mixed pairs (B >= 0) or
/// the same-sign pairs (B <= 0).  At B = 0 both families are admissible.
enum class EnvelopeFamily { automatic, mixed, same_sign };

/// Certified defect series of one candidate pair.
struct DefectRecord {
  EnvelopeBranch branch = EnvelopeBranch::upper_both;
  std::array<std::array<Rational, 9>, 2> exact{};  // M_2 .. M_18 per component
  std::array<std::array<double, 9>, 2> value{};
};

struct EnvelopeSpec {
  double c_tilde_plus = 0.0, c_tilde_minus = 0.0;  // mixed family
  double c_hat_plus = 0.0, c_hat_minus = 0.0;      // same-sign family
  double delta = 0.0;
  double R = 0.0;
  int delta_exponent = 0;  // delta = 2^-delta_exponent
  EnvelopeFamily family = EnvelopeFamily::same_sign;
  EnvelopeBranch upper_branch = EnvelopeBranch::upper_both;
  EnvelopeBranch lower_branch = EnvelopeBranch::lower_both;
  TailExpansion<double> tail;
  double t_plus = 1.0, t_minus = 1.0;
  std::array<double, 2> c_upper{};  // coefficients of (R/r)^6, plus and minus
  std::array<double, 2> c_lower{};
  std::vector<DefectRecord> series;
  int candidates_tried = 0;

  /// w_upper or w_lower for component c at radius r.
  double envelope(Component c, double r, bool upper) const {
    const int i = static_cast<int>(c);
    const double t = i == 0 ? t_plus : t_minus;
    const double r2 = r * r;
    const double s3 = std::pow(R * R / r2, 3);
    return t + tail.a(c) / r2 + tail.b(c) / (r2 * r2) + (upper ? c_upper[i] : c_lower[i]) * s3;
  }
};

inline EnvelopeFamily resolve_family(double B, EnvelopeFamily f) {
  if (f == EnvelopeFamily::automatic) return B > 0 ? EnvelopeFamily::mixed : EnvelopeFamily::same_sign;
  if (f == EnvelopeFamily::mixed && B < 0) throw SelectionFailed("mixed envelopes require B >= 0");
  if (f == EnvelopeFamily::same_sign && B > 0) throw SelectionFailed("same-sign envelopes require B <= 0");
  return f;
}

/// Source pair of each envelope: the upper envelope of a component comes from
/// the candidate pair in which that component is the supersolution.
struct BranchPair {
  EnvelopeBranch upper_plus, upper_minus, lower_plus, lower_minus;
};

inline BranchPair branches_for(EnvelopeFamily f) {
  if (f == EnvelopeFamily::mixed)
    return {EnvelopeBranch::upper_plus_lower_minus, EnvelopeBranch::lower_plus_upper_minus,
            EnvelopeBranch::lower_plus_upper_minus, EnvelopeBranch::upper_plus_lower_minus};
  return {EnvelopeBranch::upper_both, EnvelopeBranch::upper_both, EnvelopeBranch::lower_both,
          EnvelopeBranch::lower_both};
}

inline std::vector<EnvelopeBranch> candidate_branches(EnvelopeFamily f) {
  if (f == EnvelopeFamily::mixed) return {EnvelopeBranch::upper_plus_lower_minus, EnvelopeBranch::lower_plus_upper_minus};
  return {EnvelopeBranch::upper_both, EnvelopeBranch::lower_both};
}

namespace detail {

template <class T>
bool dominance_holds(const std::array<T, 9>& m) {
  // m[k] holds M_{2k+2}
  using std::abs;
  const T m6 = abs(m[2]);
  if (sign_of(m6) == 0) return false;
  for (int idx : {3, 4, 6, 7})  // M_8, M_10, M_14, M_16
    if (T(20) * abs(m[idx]) > m6) return false;
  if (T(5) * abs(m[5]) > m6) return false;  // M_12
  if (T(5) * abs(m[8]) > m6) return false;  // M_18
  return true;
}

/// Exact certificate for one candidate pair at (delta, R).
inline std::optional<DefectRecord> certify(const Coefficients<Rational>& k, const DegreePair& d,
                                           const TailExpansion<Rational>& tail, EnvelopeBranch branch,
                                           const Rational& delta, const Rational& R) {
  const auto c = envelope_c(k, branch, delta);
  const auto series = expand_defect_series(k, d, tail, c, R);
  const auto signs = required_signs(branch);
  DefectRecord rec;
  rec.branch = branch;
  for (int i = 0; i < 2; ++i) {
    if (sign_of(series[i].coeff(0)) != 0) return std::nullopt;
    rec.exact[i] = defect_coefficients(series[i]);
    if (sign_of(rec.exact[i][0]) != 0 || sign_of(rec.exact[i][1]) != 0) return std::nullopt;
    if (sign_of(rec.exact[i][2]) != signs[i]) return std::nullopt;
    if (!dominance_holds(rec.exact[i])) return std::nullopt;
    if (!has_sign_on_unit_interval(series[i], signs[i])) return std::nullopt;
    for (int j = 0; j < 9; ++j) rec.value[i][j] = to_double(rec.exact[i][j]);
  }
  return rec;
}

inline EnvelopeSpec make_spec(const CouplingParams& p, const DegreePair& d, int delta_exp, double R,
                              EnvelopeFamily family) {
  EnvelopeSpec s;
  const auto k = coefficients(p);
  s.family = resolve_family(p.B, family);
  if (s.family == EnvelopeFamily::mixed) {
    const auto ct = mixed_envelope_constants(k);
    s.c_tilde_plus = ct[0];
    s.c_tilde_minus = ct[1];
  } else {
    const auto ch = same_sign_envelope_constants(k);
    s.c_hat_plus = ch[0];
    s.c_hat_minus = ch[1];
  }
  s.delta_exponent = delta_exp;
  s.delta = std::ldexp(1.0, -delta_exp);
  s.R = R;
  s.tail = tail_expansion(p, d);
  s.t_plus = p.t_plus;
  s.t_minus = p.t_minus;
  const auto bp = branches_for(s.family);
  s.upper_branch = bp.upper_plus;
  s.lower_branch = bp.lower_plus;
  auto c_of = [&](EnvelopeBranch b, int comp) { return envelope_c(k, b, s.delta)[comp]; };
  s.c_upper = {c_of(bp.upper_plus, 0), c_of(bp.upper_minus, 1)};
  s.c_lower = {c_of(bp.lower_plus, 0), c_of(bp.lower_minus, 1)};
  return s;
}

}  // namespace detail

/// Searches dyadic delta and doubling R until every candidate pair required
/// for the sign of B is certified for each parameter set.  The same (delta,
/// R) is used for all parameter sets.
inline EnvelopeSpec select_envelope_uniform(const std::vector<CouplingParams>& sets, const DegreePair& d,
                                            const EnvelopeSearch& search = {},
                                            EnvelopeFamily family = EnvelopeFamily::automatic) {
  if (sets.empty()) throw SelectionFailed("no parameter sets given");
  std::vector<Coefficients<Rational>> ks;
  std::vector<TailExpansion<Rational>> tails;
  std::vector<EnvelopeFamily> families;
  for (const auto& p : sets) {
    validate(p);
    ks.push_back(exact_coefficients(p));
    tails.push_back(second_coeffs(ks.back(), d));
    families.push_back(resolve_family(p.B, family));
  }
  int tried = 0;
  for (int de = 1; de <= search.max_delta_exponent; ++de) {
    const Rational delta(BigInt(1), boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(de)));
    for (int re = 1; re <= search.max_R_exponent; ++re) {
      if (tried >= search.budget) break;
      ++tried;
      const Rational R(BigInt(1) << re);
      std::vector<DefectRecord> records;
      bool ok = true;
      for (std::size_t s = 0; s < sets.size() && ok; ++s)
        for (EnvelopeBranch b : candidate_branches(families[s])) {
          auto rec = detail::certify(ks[s], d, tails[s], b, delta, R);
          if (!rec) {
            ok = false;
            break;
          }
          records.push_back(std::move(*rec));
        }
      if (!ok) continue;
      EnvelopeSpec spec = detail::make_spec(sets.front(), d, de, std::ldexp(1.0, re), families.front());
      spec.series = std::move(records);
      spec.candidates_tried = tried;
      return spec;
    }
  }
  throw SelectionFailed("no (delta, R) certified within " + std::to_string(tried) + " candidates");
}

/// Envelope data for a single parameter set.
inline EnvelopeSpec select_envelope(const CouplingParams& p, const DegreePair& d, const EnvelopeSearch& search = {},
                                    EnvelopeFamily family = EnvelopeFamily::automatic) {
  return select_envelope_uniform({p}, d, search, family);
}

/// Rebuilds the envelope functions of `p` at a given (delta, R).
inline EnvelopeSpec envelope_at(const CouplingParams& p, const DegreePair& d, int delta_exponent, double R,
                                EnvelopeFamily family = EnvelopeFamily::automatic) {
  return detail::make_spec(p, d, delta_exponent, R, family);
}

struct EnvelopeCheck {
  bool pass = false;
  /// min over nodes r >= R and components of min(f - w_lower, w_upper - f)
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_r = 0.0;
  Component worst_component = Component::plus;
  std::size_t nodes_checked = 0;
};

inline EnvelopeCheck envelope_check(const Profile& p, const EnvelopeSpec& spec) {
  if (!(spec.R > 0) || spec.R > p.grid.r_max()) throw BadGridSpec("envelope radius must lie in (0, R_max]");
  EnvelopeCheck out;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double r = p.grid.r(i);
    if (r < spec.R) continue;
    ++out.nodes_checked;
    for (int c = 0; c < 2; ++c) {
      const Component comp = c == 0 ? Component::plus : Component::minus;
      const double f = p.f(comp)[i];
      const double m = std::min(f - spec.envelope(comp, r, false), spec.envelope(comp, r, true) - f);
      if (m < out.worst_margin) {
        out.worst_margin = m;
        out.worst_r = r;
        out.worst_component = comp;
      }
    }
  }
  out.pass = out.nodes_checked > 0 && out.worst_margin >= 0.0;
  return out;
}

struct FitWindow {
  double r_lo = 20.0;
  double r_hi = 60.0;
};

/// Default window [20, 60], scaled to [R_max/4, 3 R_max/4] on short domains.
inline FitWindow default_fit_window(double R_max) {
  if (R_max >= 60.0) return {20.0, 60.0};
  return {0.25 * R_max, 0.75 * R_max};
}

struct TailFitComponent {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;   // fitted r^-6 coefficient
  double C1 = 0.0;  // max over the window of |f - t - a/r^2 - b/r^4| r^6
};

struct TailFit {
  TailFitComponent plus, minus;
  std::size_t nodes = 0;
  double condition = 0.0;

  const TailFitComponent& operator[](Component c) const { return c == Component::plus ? plus : minus; }
};

/// Weighted least squares of f - t against {r^-2, r^-4, r^-6} with weight
/// r^4, i.e. r^2 (f - t) against {1, x, x^2} in x = r^-2.  The r^-6 column
/// only absorbs the next term of the expansion; C1 is measured against the
/// two-term model.
inline TailFitComponent fit_tail(std::span<const double> r, std::span<const double> f, double t,
                                 double* condition = nullptr) {
  if (r.size() != f.size()) throw LengthMismatch("fit_tail: size mismatch");
  if (r.size() < 20) throw IllConditionedFit("fit window holds fewer than 20 nodes");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  for (double ri : r) {
    xlo = std::min(xlo, 1.0 / (ri * ri));
    xhi = std::max(xhi, 1.0 / (ri * ri));
  }
  if (!(xhi > xlo)) throw IllConditionedFit("fit window has no extent");
  // regress on z = (x - mid)/half in [-1, 1]
  const double mid = 0.5 * (xhi + xlo), half = 0.5 * (xhi - xlo);
  std::array<std::array<double, 3>, 3> n{};
  std::array<double, 3> rhs{};
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double z = (1.0 / (r[i] * r[i]) - mid) / half;
    const std::array<double, 3> phi = {1.0, z, z * z};
    const double y = r[i] * r[i] * (f[i] - t);
    for (int a = 0; a < 3; ++a) {
      rhs[a] += phi[a] * y;
      for (int b = 0; b < 3; ++b) n[a][b] += phi[a] * phi[b];
    }
  }
  // Cholesky of the 3x3 normal matrix
  std::array<std::array<double, 3>, 3> L{};
  for (int j = 0; j < 3; ++j) {
    double d = n[j][j];
    for (int k = 0; k < j; ++k) d -= L[j][k] * L[j][k];
    if (!(d > 1e-14 * n[0][0])) throw IllConditionedFit("tail basis is numerically collinear on the window");
    L[j][j] = std::sqrt(d);
    for (int i = j + 1; i < 3; ++i) {
      double s = n[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      L[i][j] = s / L[j][j];
    }
  }
  if (condition) {
    const double dmin = std::min({L[0][0], L[1][1], L[2][2]}), dmax = std::max({L[0][0], L[1][1], L[2][2]});
    *condition = (dmax / dmin) * (dmax / dmin);
  }
  std::array<double, 3> c{};
  for (int i = 0; i < 3; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= L[i][k] * c[k];
    c[i] = s / L[i][i];
  }
  for (int i = 2; i >= 0; --i) {
    double s = c[i];
    for (int k = i + 1; k < 3; ++k) s -= L[k][i] * c[k];
    c[i] = s / L[i][i];
  }
  // back to powers of x: c0 + c1 z + c2 z^2 with z = (x - mid)/half
  TailFitComponent out;
  out.a = c[0] - c[1] * mid / half + c[2] * mid * mid / (half * half);
  out.b = c[1] / half - 2.0 * c[2] * mid / (half * half);
  out.c = c[2] / (half * half);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double r2 = r[i] * r[i];
    const double res = f[i] - t - out.a / r2 - out.b / (r2 * r2);
    out.C1 = std::max(out.C1, std::abs(res) * r2 * r2 * r2);
  }
  return out;
}

inline TailFit tail_fit(const Profile& p, FitWindow w) {
  if (!(w.r_lo > 0) || !(w.r_hi > w.r_lo)) throw IllConditionedFit("fit window must satisfy 0 < r_lo < r_hi");
  if (w.r_hi > p.grid.r_max() * (1 + 1e-12)) throw IllConditionedFit("fit window extends past R_max");
  std::vector<double> r;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    if (p.grid.r(i) >= w.r_lo && p.grid.r(i) <= w.r_hi) {
      r.push_back(p.grid.r(i));
      idx.push_back(i);
    }
  if (r.size() < 20) throw IllConditionedFit("fit window holds fewer than 20 nodes");
  TailFit out;
  out.nodes = r.size();
  for (int c = 0; c < 2; ++c) {
    const Component comp = c == 0 ? Component::plus : Component::minus;
    const double t = p.params.t(comp);
    std::vector<double> f;
    for (auto i : idx) f.push_back(p.f(comp)[i]);
    if (std::abs(f.front() - t) >= 0.1 * t)
      throw IllConditionedFit("profile is still in its core at r_lo; move the window outward");
    (c == 0 ? out.plus : out.minus) = fit_tail(r, f, t, &out.condition);
  }
  return out;
}

struct DerivativeTail {
  double C2_plus = 0.0;
  double C2_minus = 0.0;
  double C2() const { return std::max(C2_plus, C2_minus); }
  bool finite() const { return std::isfinite(C2_plus) && std::isfinite(C2_minus); }
};

/// max over the window of |f' + 2a/r^3| r^5 with a from the closed form.
inline DerivativeTail derivative_tail_check(const Profile& p, FitWindow w) {
  const auto a = leading_coeffs(coefficients(p.params), p.degrees);
  DerivativeTail out;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double r = p.grid.r(i);
    if (r < w.r_lo || r > w.r_hi) continue;
    const double r3 = r * r * r, r5 = r3 * r * r;
    out.C2_plus = std::max(out.C2_plus, std::abs(node_derivative(p.grid, p.f_plus, i) + 2 * a.a_plus / r3) * r5);
    out.C2_minus = std::max(out.C2_minus, std::abs(node_derivative(p.grid, p.f_minus, i) + 2 * a.a_minus / r3) * r5);
  }
  return out;
}

}  // namespace vortex2c
