#pragma once

// Radial meshes on [0, R_max] with control-volume weights for the measure
// r dr, and the conservative finite-volume discretization of
//
//   -(1/r)(r u')' + (n^2/r^2) u
//
// Fluxes r u' live on half-nodes r_{i+1/2} = (r_i + r_{i+1})/2, so the
// stiffness matrix K is symmetric and L = V^{-1} K + n^2/r^2 is self-adjoint
// in the weighted inner product sum_i V_i u_i v_i.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace vortex2c {

enum class GridKind { uniform, geometric };

struct GridSpec {
  double R_max = 80.0;
  int N = 4000;
  GridKind kind = GridKind::uniform;
  double stretch = 1.0;  // ratio of consecutive spacings, geometric only

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class RadialGrid {
public:
  RadialGrid() = default;

  explicit RadialGrid(const GridSpec& spec) : spec_(spec) {
    if (!(spec.R_max > 0) || !std::isfinite(spec.R_max))
      throw BadGridSpec("R_max must be positive and finite");
    if (spec.N < 16) throw BadGridSpec("N must be at least 16");
    const auto n = static_cast<std::size_t>(spec.N);
    nodes_.resize(n + 1);
    if (spec.kind == GridKind::uniform) {
      const double h = spec.R_max / spec.N;
      for (std::size_t i = 0; i <= n; ++i) nodes_[i] = static_cast<double>(i) * h;
    } else {
      const double q = spec.stretch;
      if (!(q > 1.0 && q <= 1.1)) throw BadGridSpec("geometric stretch ratio must lie in (1, 1.1]");
      // h_1 (q^N - 1)/(q - 1) = R_max
      const double h1 = spec.R_max * (q - 1.0) / std::expm1(spec.N * std::log(q));
      if (!(h1 > 0)) throw BadGridSpec("geometric grid underflows: reduce N or stretch");
      double h = h1;
      nodes_[0] = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        nodes_[i] = nodes_[i - 1] + h;
        h *= q;
      }
      for (std::size_t i = 1; i < n; ++i)
        if (!(nodes_[i] > nodes_[i - 1])) throw BadGridSpec("geometric grid is not strictly increasing");
    }
    nodes_[n] = spec.R_max;

    half_.resize(n);
    for (std::size_t i = 0; i < n; ++i) half_[i] = 0.5 * (nodes_[i] + nodes_[i + 1]);

    weights_.resize(n + 1);
    weights_[0] = 0.5 * half_[0] * half_[0];
    for (std::size_t i = 1; i < n; ++i)
      weights_[i] = 0.5 * (half_[i] - half_[i - 1]) * (half_[i] + half_[i - 1]);
    weights_[n] = 0.5 * (spec.R_max - half_[n - 1]) * (spec.R_max + half_[n - 1]);
  }

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return nodes_.size(); }
  /// Index of the last node, r_N = R_max.
  std::size_t last() const { return nodes_.size() - 1; }
  double r_max() const { return spec_.R_max; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double r(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  /// r_{i+1/2}
  double half(std::size_t i) const { return half_[i]; }
  /// r_{i+1} - r_i
  double spacing(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }

  /// Index of the node closest to r.
  std::size_t nearest(double r) const {
    std::size_t lo = 0, hi = last();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (nodes_[mid] <= r) lo = mid; else hi = mid;
    }
    return (r - nodes_[lo] <= nodes_[hi] - r) ? lo : hi;
  }

private:
  GridSpec spec_;
  std::vector<double> nodes_;
  std::vector<double> half_;
  std::vector<double> weights_;
};

inline RadialGrid build_grid(double R_max, int N, GridKind kind = GridKind::uniform, double stretch = 1.0) {
  return RadialGrid(GridSpec{R_max, N, kind, stretch});
}

/// Approximates the integral of g(r) r dr over [0, R_max].
inline double quadrature(const RadialGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size())
    throw LengthMismatch("quadrature: expected " + std::to_string(grid.size()) + " samples, got " +
                         std::to_string(samples.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += grid.weight(i) * samples[i];
  return sum;
}

enum class ZeroBc { dirichlet, neumann };
enum class FarBcKind { dirichlet, robin };

/// Far-field row: either u(R_max) = value, or the asymptotic flux
/// u'(R_max) = -2 a / R_max^3 with a = value.
struct FarBc {
  FarBcKind kind = FarBcKind::robin;
  double value = 0.0;

  static FarBc dirichlet(double u) { return {FarBcKind::dirichlet, u}; }
  static FarBc robin(double a) { return {FarBcKind::robin, a}; }
};

/// Tridiagonal operator for one component.  Rows flagged Dirichlet are
/// u_i - value; every other row is (K u)_i / V_i + n^2/r_i^2 u_i - source_i.
class RadialOperator {
public:
  RadialOperator(const RadialGrid& grid, int n, ZeroBc zero, FarBc far)
      : n_(n), zero_(zero), far_(far) {
    if (n < 0) throw BadBoundarySpec("degree must be nonnegative");
    if (n == 0 && zero == ZeroBc::dirichlet)
      throw BadBoundarySpec("n = 0 requires the Neumann condition u'(0) = 0");
    if (n != 0 && zero == ZeroBc::neumann)
      throw BadBoundarySpec("n != 0 requires the Dirichlet condition u(0) = 0");

    const std::size_t m = grid.size();
    const std::size_t last = grid.last();
    stiff_diag_.assign(m, 0.0);
    stiff_off_.assign(m - 1, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double c = grid.half(i) / grid.spacing(i);
      stiff_diag_[i] += c;
      stiff_diag_[i + 1] += c;
      stiff_off_[i] = -c;
    }
    inv_weight_.resize(m);
    centrifugal_.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      inv_weight_[i] = 1.0 / grid.weight(i);
      if (i > 0) centrifugal_[i] = double(n) * n / (grid.r(i) * grid.r(i));
    }
    source_.assign(m, 0.0);
    dirichlet_.assign(m, 0);
    dirichlet_value_.assign(m, 0.0);
    if (zero == ZeroBc::dirichlet) dirichlet_[0] = 1;
    if (far.kind == FarBcKind::dirichlet) {
      dirichlet_[last] = 1;
      dirichlet_value_[last] = far.value;
    } else {
      const double R = grid.r_max();
      const double slope = -2.0 * far.value / (R * R * R);
      source_[last] = R * slope * inv_weight_[last];
    }
  }

  int degree() const { return n_; }
  ZeroBc zero_bc() const { return zero_; }
  FarBc far_bc() const { return far_; }
  std::size_t size() const { return stiff_diag_.size(); }

  bool is_dirichlet(std::size_t i) const { return dirichlet_[i] != 0; }
  double dirichlet_value(std::size_t i) const { return dirichlet_value_[i]; }

  /// Symmetric stiffness entries K_ii and K_{i,i+1}.
  double stiffness_diag(std::size_t i) const { return stiff_diag_[i]; }
  double stiffness_off(std::size_t i) const { return stiff_off_[i]; }
  double centrifugal(std::size_t i) const { return centrifugal_[i]; }
  double inverse_weight(std::size_t i) const { return inv_weight_[i]; }
  double source(std::size_t i) const { return source_[i]; }

  /// Linear part of row i applied to u (Dirichlet rows give u_i - value).
  double apply_row(std::span<const double> u, std::size_t i) const {
    if (dirichlet_[i]) return u[i] - dirichlet_value_[i];
    // flux differences, so constants give exactly zero
    double k = 0.0;
    if (i > 0) k -= stiff_off_[i - 1] * (u[i] - u[i - 1]);
    if (i + 1 < u.size()) k -= stiff_off_[i] * (u[i] - u[i + 1]);
    return k * inv_weight_[i] + centrifugal_[i] * u[i] - source_[i];
  }

  std::vector<double> apply(std::span<const double> u) const {
    if (u.size() != size()) throw LengthMismatch("RadialOperator::apply: size mismatch");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = apply_row(u, i);
    return out;
  }

  /// Row i of the matrix as (sub, diag, super); Dirichlet rows are (0, 1, 0).
  struct Row {
    double sub = 0.0, diag = 0.0, super = 0.0;
  };
  Row row(std::size_t i) const {
    if (dirichlet_[i]) return {0.0, 1.0, 0.0};
    Row r;
    r.diag = stiff_diag_[i] * inv_weight_[i] + centrifugal_[i];
    if (i > 0) r.sub = stiff_off_[i - 1] * inv_weight_[i];
    if (i + 1 < size()) r.super = stiff_off_[i] * inv_weight_[i];
    return r;
  }

private:
  int n_;
  ZeroBc zero_;
  FarBc far_;
  std::vector<double> stiff_diag_;
  std::vector<double> stiff_off_;
  std::vector<double> inv_weight_;
  std::vector<double> centrifugal_;
  std::vector<double> source_;
  std::vector<char> dirichlet_;
  std::vector<double> dirichlet_value_;
};

inline RadialOperator radial_operator(const RadialGrid& grid, int n, ZeroBc zero, FarBc far) {
  return RadialOperator(grid, n, zero, far);
}

/// Boundary condition at r = 0 implied by the degree.
inline ZeroBc natural_zero_bc(int n) { return n == 0 ? ZeroBc::neumann : ZeroBc::dirichlet; }

/// Central-difference derivative at node i; second-order one-sided at the ends.
inline double node_derivative(const RadialGrid& grid, std::span<const double> u, std::size_t i) {
  const std::size_t last = grid.last();
  auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, double x) {
    // derivative at x of the quadratic through (r_a,u_a), (r_b,u_b), (r_c,u_c)
    const double ra = grid.r(a), rb = grid.r(b), rc = grid.r(c);
    return u[a] * ((x - rb) + (x - rc)) / ((ra - rb) * (ra - rc)) +
           u[b] * ((x - ra) + (x - rc)) / ((rb - ra) * (rb - rc)) +
           u[c] * ((x - ra) + (x - rb)) / ((rc - ra) * (rc - rb));
  };
  if (i == 0) return three_point(0, 1, 2, grid.r(0));
  if (i == last) return three_point(last - 2, last - 1, last, grid.r(last));
  return three_point(i - 1, i, i + 1, grid.r(i));
}

inline std::vector<double> derivative(const RadialGrid& grid, std::span<const double> u) {
  if (u.size() != grid.size()) throw LengthMismatch("derivative: size mismatch");
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = node_derivative(grid, u, i);
  return d;
}

}  // namespace vortex2c
