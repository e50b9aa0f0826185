#pragma once

// Identities and inequalities evaluated on a solved profile: energy,
// quantization and Pohozaev integrals, the amplitude bound, the second
// variation and a slope-based monotonicity classifier.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "banded.hpp"
#include "solver.hpp"

namespace vortex2c {

namespace detail {

/// Control-volume weights truncated at node k, so that they integrate over
/// [0, r_k] exactly for constants.
inline std::vector<double> truncated_weights(const RadialGrid& grid, std::size_t k) {
  std::vector<double> w(grid.weights().begin(), grid.weights().begin() + static_cast<std::ptrdiff_t>(k) + 1);
  if (k > 0 && k < grid.last()) {
    const double rk = grid.r(k), hm = grid.half(k - 1);
    w[k] = 0.5 * (rk - hm) * (rk + hm);
  } else if (k == 0) {
    w[0] = 0.0;
  }
  return w;
}

inline std::size_t node_at(const RadialGrid& grid, double R) {
  if (!(R > 0) || R > grid.r_max() * (1 + 1e-12))
    throw BadGridSpec("radius " + std::to_string(R) + " outside (0, R_max]");
  return grid.nearest(R);
}

/// A_+ (f_+^2 - t_+^2)^2 + A_- (f_-^2 - t_-^2)^2 + 2B (f_+^2 - t_+^2)(f_-^2 - t_-^2)
inline double potential_density(const CouplingParams& p, double fp, double fm) {
  const double u = fp * fp - p.t_plus * p.t_plus;
  const double v = fm * fm - p.t_minus * p.t_minus;
  return p.A_plus * u * u + p.A_minus * v * v + 2.0 * p.B * u * v;
}

}  // namespace detail

/// Sum of n_s^2 t_s^2.
inline double quantization_target(const CouplingParams& p, const DegreePair& d) {
  return double(d.n_plus) * d.n_plus * p.t_plus * p.t_plus + double(d.n_minus) * d.n_minus * p.t_minus * p.t_minus;
}

/// Integral of the potential density against r dr over [0, R] (R rounded to
/// the nearest node).
inline double potential_integral(const Profile& p, double R) {
  const std::size_t k = detail::node_at(p.grid, R);
  const auto w = detail::truncated_weights(p.grid, k);
  double s = 0.0;
  for (std::size_t i = 0; i <= k; ++i) s += w[i] * detail::potential_density(p.params, p.f_plus[i], p.f_minus[i]);
  return s;
}

/// Discrete radial energy on [0, R]:
///   1/2 sum_s int (f_s'^2 + n_s^2 f_s^2 / r^2) r dr + 1/4 int (potential density) r dr,
/// with the gradient term taken edgewise, so that its gradient in the nodal
/// values is the weighted discrete residual.
inline double radial_energy(const Profile& p, double R) {
  const auto& g = p.grid;
  const std::size_t k = detail::node_at(g, R);
  const auto w = detail::truncated_weights(g, k);
  double e = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto f = p.f(c == 0 ? Component::plus : Component::minus);
    const double n2 = c == 0 ? double(p.degrees.n_plus) * p.degrees.n_plus : double(p.degrees.n_minus) * p.degrees.n_minus;
    for (std::size_t i = 0; i < k; ++i) {
      const double df = f[i + 1] - f[i];
      e += 0.5 * g.half(i) / g.spacing(i) * df * df;
    }
    if (n2 != 0.0)
      for (std::size_t i = 1; i <= k; ++i) e += 0.5 * w[i] * n2 * f[i] * f[i] / (g.r(i) * g.r(i));
  }
  for (std::size_t i = 0; i <= k; ++i) e += 0.25 * w[i] * detail::potential_density(p.params, p.f_plus[i], p.f_minus[i]);
  return e;
}

/// [R f_+'(R)]^2 + [R f_-'(R)]^2 + int_0^R (potential density) r dr - sum n^2 t^2.
inline double pohozaev_residual(const Profile& p, double R) {
  const std::size_t k = detail::node_at(p.grid, R);
  const double r = p.grid.r(k);
  const double dp = r * node_derivative(p.grid, p.f_plus, k);
  const double dm = r * node_derivative(p.grid, p.f_minus, k);
  return dp * dp + dm * dm + potential_integral(p, r) - quantization_target(p.params, p.degrees);
}

struct QuantizationResult {
  double lhs = 0.0;
  double rhs = 0.0;
  /// (lhs - rhs) / rhs, or lhs - rhs when rhs = 0.
  double gap = 0.0;
};

inline QuantizationResult quantization_check(const Profile& p) {
  QuantizationResult q;
  q.lhs = potential_integral(p, p.grid.r_max());
  q.rhs = quantization_target(p.params, p.degrees);
  q.gap = q.rhs != 0.0 ? (q.lhs - q.rhs) / q.rhs : q.lhs - q.rhs;
  return q;
}

/// Lambda^2 - max_i (f_+^2 + f_-^2).
inline double amplitude_bound_check(const Profile& p) {
  double peak = 0.0;
  for (std::size_t i = 0; i < p.f_plus.size(); ++i)
    peak = std::max(peak, p.f_plus[i] * p.f_plus[i] + p.f_minus[i] * p.f_minus[i]);
  return derived_bounds(p.params).Lambda_sq - peak;
}

/// Discrete second variation in the weighted geometry: the symmetric matrix
/// H = V J on the free (non-Dirichlet) unknowns, with mass diag(V).
struct Hessian {
  BandedMatrix matrix;
  std::vector<double> mass;
  std::vector<std::size_t> unknowns;  // interleaved index of each free unknown
};

inline Hessian assemble_hessian(const Profile& p) {
  const RadialSystem sys(p.grid, p.params, p.degrees, p.report.far_field);
  const std::size_t m = sys.nodes();
  std::vector<long> slot(2 * m, -1);
  Hessian h;
  for (std::size_t i = 0; i < m; ++i)
    for (int c = 0; c < 2; ++c)
      if (!sys.is_dirichlet(c == 0 ? Component::plus : Component::minus, i)) {
        slot[2 * i + c] = static_cast<long>(h.unknowns.size());
        h.unknowns.push_back(2 * i + c);
        h.mass.push_back(p.grid.weight(i));
      }
  h.matrix = BandedMatrix(h.unknowns.size(), 2, 2);
  const auto& P = p.params;
  for (std::size_t i = 0; i < m; ++i) {
    const double fp = p.f_plus[i], fm = p.f_minus[i];
    const double V = p.grid.weight(i);
    for (int c = 0; c < 2; ++c) {
      const long row = slot[2 * i + c];
      if (row < 0) continue;
      const Component s = c == 0 ? Component::plus : Component::minus;
      const Component o = other(s);
      const auto& L = sys.op(s);
      const double u = c == 0 ? fp : fm, v = c == 0 ? fm : fp;
      const auto r = static_cast<std::size_t>(row);
      h.matrix(r, r) = L.stiffness_diag(i) + V * (L.centrifugal(i) + P.A(s) * (3 * u * u - P.t(s) * P.t(s)) +
                                                 P.B * (v * v - P.t(o) * P.t(o)));
      if (i + 1 < m) {
        const long nb = slot[2 * (i + 1) + c];
        if (nb >= 0) {
          h.matrix(r, static_cast<std::size_t>(nb)) = L.stiffness_off(i);
          h.matrix(static_cast<std::size_t>(nb), r) = L.stiffness_off(i);
        }
      }
      const long partner = slot[2 * i + (1 - c)];
      if (partner >= 0) h.matrix(r, static_cast<std::size_t>(partner)) = V * 2.0 * P.B * fp * fm;
    }
  }
  return h;
}

/// Smallest eigenvalue of H x = lambda diag(mass) x, bracketed by inertia
/// bisection and refined by shifted inverse iteration.
inline double smallest_generalized_eigenvalue(const BandedMatrix& H, std::span<const double> mass) {
  const std::size_t n = H.size();
  if (n == 0) throw EigenFailure("empty matrix");
  // Gershgorin bound for the scaled matrix M^{-1/2} H M^{-1/2}
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    const std::size_t j0 = i > H.lower() ? i - H.lower() : 0;
    const std::size_t j1 = std::min(n - 1, i + H.upper());
    for (std::size_t j = j0; j <= j1; ++j)
      if (j != i) radius += std::abs(H(i, j)) / std::sqrt(mass[i] * mass[j]);
    const double d = H(i, i) / mass[i];
    lo = std::min(lo, d - radius);
    hi = std::max(hi, d + radius);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw EigenFailure("non-finite matrix entries");
  lo -= 1e-12 * std::max(1.0, std::abs(lo));
  hi += 1e-12 * std::max(1.0, std::abs(hi));
  if (count_eigenvalues_below(H, mass, lo) != 0 || count_eigenvalues_below(H, mass, hi) == 0)
    throw EigenFailure("inertia count inconsistent with the Gershgorin bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_eigenvalues_below(H, mass, mid) == 0 ? lo : hi) = mid;
  }

  // inverse iteration just below the bracket; H - sigma M is then definite
  const double sigma = lo - 1e-8 * std::max(1.0, std::abs(lo));
  BandedMatrix shifted = H;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= sigma * mass[i];
  const BandedLU lu(std::move(shifted));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(0.7 * double(i));
  double rayleigh = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> mx(n);
    for (std::size_t i = 0; i < n; ++i) mx[i] = mass[i] * x[i];
    auto y = lu.solve(mx);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += mass[i] * y[i] * y[i];
    norm = std::sqrt(norm);
    if (!(norm > 0) || !std::isfinite(norm)) throw EigenFailure("inverse iteration broke down");
    for (auto& v : y) v /= norm;
    const auto hy = H.multiply(y);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += y[i] * hy[i];
    const double prev = rayleigh;
    rayleigh = num;
    x.swap(y);
    if (it > 2 && std::abs(rayleigh - prev) <= 1e-14 * std::max(1.0, std::abs(rayleigh))) break;
  }
  // the Rayleigh quotient is an upper bound; keep it only if consistent with the bracket
  const double tol = 1e-9 * std::max(1.0, std::abs(hi));
  if (rayleigh < lo - tol || rayleigh > hi + tol)
    throw EigenFailure("inverse iteration disagrees with the inertia bracket");
  return std::clamp(rayleigh, lo, hi);
}

inline double second_variation_min_eig(const Profile& p) {
  const auto h = assemble_hessian(p);
  return smallest_generalized_eigenvalue(h.matrix, h.mass);
}

enum class MonotonicityClass { BothNondecreasing, PlusUpMinusDown, NonMonotonePlus, NonMonotoneMinus, Other };

inline const char* to_string(MonotonicityClass c) {
  switch (c) {
    case MonotonicityClass::BothNondecreasing: return "BothNondecreasing";
    case MonotonicityClass::PlusUpMinusDown: return "PlusUpMinusDown";
    case MonotonicityClass::NonMonotonePlus: return "NonMonotonePlus";
    case MonotonicityClass::NonMonotoneMinus: return "NonMonotoneMinus";
    case MonotonicityClass::Other: return "Other";
  }
  return "?";
}

struct Witness {
  std::size_t node = 0;
  double r = 0.0;
  double slope = 0.0;  // the offending extremal slope
};

struct ComponentTrend {
  double min_slope = 0.0;
  double max_slope = 0.0;
  bool nondecreasing = false;
  bool nonincreasing = false;
  Witness min_at, max_at;
};

struct MonotonicityResult {
  MonotonicityClass cls = MonotonicityClass::Other;
  std::optional<Witness> witness;
  ComponentTrend plus, minus;
};

inline ComponentTrend component_trend(const RadialGrid& grid, std::span<const double> f, double t, double slope_tol) {
  const auto d = derivative(grid, f);
  ComponentTrend c;
  c.min_slope = std::numeric_limits<double>::infinity();
  c.max_slope = -c.min_slope;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < c.min_slope) {
      c.min_slope = d[i];
      c.min_at = {i, grid.r(i), d[i]};
    }
    if (d[i] > c.max_slope) {
      c.max_slope = d[i];
      c.max_at = {i, grid.r(i), d[i]};
    }
  }
  const double band = slope_tol * t / grid.r_max();
  c.nondecreasing = c.min_slope >= -band;
  c.nonincreasing = c.max_slope <= band;
  return c;
}

inline MonotonicityResult monotonicity_classify(const Profile& p, double slope_tol = 1e-6) {
  MonotonicityResult out;
  out.plus = component_trend(p.grid, p.f_plus, p.params.t_plus, slope_tol);
  out.minus = component_trend(p.grid, p.f_minus, p.params.t_minus, slope_tol);
  const auto& P = out.plus;
  const auto& M = out.minus;
  auto monotone = [](const ComponentTrend& c) { return c.nondecreasing || c.nonincreasing; };
  if (P.nondecreasing && M.nondecreasing) {
    out.cls = MonotonicityClass::BothNondecreasing;
  } else if (P.nondecreasing && M.nonincreasing) {
    out.cls = MonotonicityClass::PlusUpMinusDown;
  } else if (!monotone(P)) {
    out.cls = MonotonicityClass::NonMonotonePlus;
    out.witness = P.min_at;
  } else if (!monotone(M)) {
    out.cls = MonotonicityClass::NonMonotoneMinus;
    out.witness = M.min_at;
  } else {
    out.cls = MonotonicityClass::Other;
  }
  return out;
}

/// Least-squares slope of log f against log r over nodes first..last.
inline double near_origin_exponent(const RadialGrid& grid, std::span<const double> f, std::size_t first = 1,
                                   std::size_t last = 10) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = first; i <= last && i < f.size(); ++i) {
    if (!(f[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(grid.r(i)), y = std::log(f[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

struct IdentityReport {
  double quantization_lhs = 0.0;
  double quantization_rhs = 0.0;
  std::vector<double> pohozaev_radii;
  std::vector<double> pohozaev_residual;
  double energy_value = 0.0;
  double bound_margin = 0.0;
  double hessian_min_eig = 0.0;
};

inline IdentityReport identity_report(const Profile& p, std::vector<double> radii = {}) {
  IdentityReport r;
  const auto q = quantization_check(p);
  r.quantization_lhs = q.lhs;
  r.quantization_rhs = q.rhs;
  if (radii.empty())
    for (double R : {5.0, 10.0, 20.0, 40.0, 80.0})
      if (R <= p.grid.r_max()) radii.push_back(R);
  for (double R : radii) {
    r.pohozaev_radii.push_back(R);
    r.pohozaev_residual.push_back(pohozaev_residual(p, R));
  }
  r.energy_value = radial_energy(p, p.grid.r_max());
  r.bound_margin = amplitude_bound_check(p);
  r.hessian_min_eig = second_variation_min_eig(p);
  return r;
}

}  // namespace vortex2c
