#pragma once

// Damped Newton solver for the discretized radial system, with continuation
// in the coupling B.  Unknowns are interleaved per node, x[2i] = f_+(r_i) and
// x[2i+1] = f_-(r_i), so the Jacobian has two sub- and two super-diagonals.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "banded.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "tail_coefficients.hpp"

namespace vortex2c {

enum class FarField { dirichlet, robin };

inline const char* to_string(FarField f) { return f == FarField::robin ? "robin" : "dirichlet"; }

struct SolveOptions {
  double tolerance = 1e-10;  // sup-norm of the discrete residual
  int max_newton_iters = 50;
  double damping = 0.5;      // backtracking factor
  int continuation_steps = 8;
  FarField far_field = FarField::robin;
};

struct SolveReport {
  std::vector<int> iterations;  // Newton steps per continuation stage
  std::vector<double> residual_history;
  double residual_norm = std::numeric_limits<double>::infinity();
  double tolerance = 1e-10;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  FarField far_field = FarField::robin;
  std::vector<std::string> warnings;

  int total_iterations() const { return std::accumulate(iterations.begin(), iterations.end(), 0); }
};

struct Profile {
  RadialGrid grid;
  CouplingParams params;
  DegreePair degrees;
  std::vector<double> f_plus;
  std::vector<double> f_minus;
  SolveReport report;

  std::span<const double> f(Component c) const {
    return c == Component::plus ? std::span<const double>(f_plus) : std::span<const double>(f_minus);
  }
};

class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, Profile best, double failing_B)
      : Error(what), best_(std::move(best)), failing_B_(failing_B) {}
  const char* kind() const noexcept override { return "NoConvergence"; }

  /// Iterate with the smallest residual seen, with its report.
  const Profile& best_iterate() const { return best_; }
  const std::vector<double>& residual_history() const { return best_.report.residual_history; }
  double failing_B() const { return failing_B_; }

private:
  Profile best_;
  double failing_B_;
};

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// The discrete equations for fixed grid, coefficients, degrees and far-field
/// treatment.
class RadialSystem {
public:
  RadialSystem(RadialGrid grid, const CouplingParams& params, const DegreePair& degrees, FarField far)
      : grid_(std::move(grid)), params_(validate(params)), degrees_(degrees), far_(far),
        ops_{make_op(Component::plus), make_op(Component::minus)} {
    if (degrees.n_plus < 0 || degrees.n_minus < 0)
      throw BadBoundarySpec("degrees must be normalized to be nonnegative");
  }

  const RadialGrid& grid() const { return grid_; }
  const CouplingParams& params() const { return params_; }
  const DegreePair& degrees() const { return degrees_; }
  FarField far_field() const { return far_; }
  const RadialOperator& op(Component c) const { return ops_[static_cast<int>(c)]; }
  std::size_t nodes() const { return grid_.size(); }
  std::size_t unknowns() const { return 2 * grid_.size(); }

  static std::vector<double> interleave(std::span<const double> fp, std::span<const double> fm) {
    std::vector<double> x(2 * fp.size());
    for (std::size_t i = 0; i < fp.size(); ++i) {
      x[2 * i] = fp[i];
      x[2 * i + 1] = fm[i];
    }
    return x;
  }
  static void split(std::span<const double> x, std::vector<double>& fp, std::vector<double>& fm) {
    const std::size_t m = x.size() / 2;
    fp.resize(m);
    fm.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      fp[i] = x[2 * i];
      fm[i] = x[2 * i + 1];
    }
  }

  /// Coupling potential A_s (f_s^2 - t_s^2) + B (f_o^2 - t_o^2).
  double potential(Component s, double fs, double fo) const {
    const Component o = other(s);
    return params_.A(s) * (fs * fs - params_.t(s) * params_.t(s)) +
           params_.B * (fo * fo - params_.t(o) * params_.t(o));
  }

  bool is_dirichlet(Component c, std::size_t i) const { return op(c).is_dirichlet(i); }

  std::vector<double> residual(std::span<const double> x) const {
    if (x.size() != unknowns()) throw LengthMismatch("residual: size mismatch");
    std::vector<double> g(x.size());
    std::vector<double> fp, fm;
    split(x, fp, fm);
    for (int c = 0; c < 2; ++c) {
      const Component s = c == 0 ? Component::plus : Component::minus;
      const auto& u = c == 0 ? fp : fm;
      const auto& v = c == 0 ? fm : fp;
      const auto& L = ops_[c];
      for (std::size_t i = 0; i < u.size(); ++i) {
        double gi = L.apply_row(u, i);
        if (!L.is_dirichlet(i)) gi += potential(s, u[i], v[i]) * u[i];
        g[2 * i + c] = gi;
      }
    }
    return g;
  }

  /// Overwrites boundary unknowns with their prescribed values, so rounding in
  /// the linear solve cannot leave f(0) slightly off zero.
  void impose_dirichlet(std::span<double> x) const {
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < nodes(); ++i)
        if (ops_[c].is_dirichlet(i)) x[2 * i + c] = ops_[c].dirichlet_value(i);
  }

  /// Exact Jacobian of residual() at x.
  BandedMatrix jacobian(std::span<const double> x) const {
    const std::size_t m = nodes();
    BandedMatrix J(2 * m, 2, 2);
    for (int c = 0; c < 2; ++c) {
      const Component s = c == 0 ? Component::plus : Component::minus;
      const Component o = other(s);
      const auto& L = ops_[c];
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t row = 2 * i + c;
        const auto lr = L.row(i);
        J(row, row) = lr.diag;
        if (i > 0 && lr.sub != 0.0) J(row, row - 2) = lr.sub;
        if (i + 1 < m && lr.super != 0.0) J(row, row + 2) = lr.super;
        if (L.is_dirichlet(i)) continue;
        const double u = x[row];
        const double v = x[2 * i + (1 - c)];
        J(row, row) += params_.A(s) * (3.0 * u * u - params_.t(s) * params_.t(s)) +
                       params_.B * (v * v - params_.t(o) * params_.t(o));
        const std::size_t col = 2 * i + (1 - c);
        J(row, col) = 2.0 * params_.B * u * v;
      }
    }
    return J;
  }

private:
  RadialOperator make_op(Component c) const {
    const int n = degrees_.n(c);
    FarBc far = far_ == FarField::dirichlet
                    ? FarBc::dirichlet(params_.t(c))
                    : FarBc::robin(leading_coefficient(coefficients(params_), degrees_, c));
    return RadialOperator(grid_, n, natural_zero_bc(n), far);
  }

  RadialGrid grid_;
  CouplingParams params_;
  DegreePair degrees_;
  FarField far_;
  std::array<RadialOperator, 2> ops_;
};

struct InitialArrays {
  std::vector<double> f_plus;
  std::vector<double> f_minus;
};

/// t r^n / (r^2 + n^2 / (A t^2))^{n/2}: vanishes like r^n at 0, tends to t.
inline std::vector<double> ansatz_profile(const RadialGrid& grid, double A, double t, int n) {
  std::vector<double> f(grid.size(), t);
  if (n == 0) return f;
  const double core = double(n) * n / (A * t * t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    f[i] = t * std::pow(r / std::sqrt(r * r + core), n);
  }
  return f;
}

inline InitialArrays initial_guess(const RadialGrid& grid, const CouplingParams& p, const DegreePair& d) {
  return {ansatz_profile(grid, p.A_plus, p.t_plus, d.n_plus),
          ansatz_profile(grid, p.A_minus, p.t_minus, d.n_minus)};
}

namespace detail {

inline Profile make_profile(const RadialSystem& sys, std::span<const double> x, SolveReport report) {
  Profile p{sys.grid(), sys.params(), sys.degrees(), {}, {}, std::move(report)};
  RadialSystem::split(x, p.f_plus, p.f_minus);
  return p;
}

inline void far_field_warning(const RadialSystem& sys, const SolveOptions& opt, SolveReport& rep) {
  if (opt.far_field != FarField::dirichlet) return;
  const auto tail = leading_coeffs(coefficients(sys.params()), sys.degrees());
  const double R = sys.grid().r_max();
  const double err = std::max(std::abs(tail.a_plus), std::abs(tail.a_minus)) / (R * R);
  if (err > 1e-3)
    rep.warnings.push_back("dirichlet far field: |a|/R_max^2 = " + std::to_string(err) +
                           " exceeds 1e-3; profile is the finite-ball solution");
}

}  // namespace detail

/// Damped Newton from the given arrays.  Throws NoConvergence carrying the
/// best iterate, or SingularJacobian.
inline Profile newton_solve(const InitialArrays& init, const RadialGrid& grid, const CouplingParams& params,
                            const DegreePair& degrees, const SolveOptions& opt = {}) {
  if (!(opt.tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (!(opt.damping > 0 && opt.damping < 1)) throw ConfigError("damping must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();
  const RadialSystem sys(grid, params, degrees, opt.far_field);
  if (init.f_plus.size() != grid.size() || init.f_minus.size() != grid.size())
    throw LengthMismatch("newton_solve: initial arrays do not match the grid");

  SolveReport rep;
  rep.tolerance = opt.tolerance;
  rep.far_field = opt.far_field;
  detail::far_field_warning(sys, opt, rep);

  std::vector<double> x = RadialSystem::interleave(init.f_plus, init.f_minus);
  sys.impose_dirichlet(x);
  std::vector<double> g = sys.residual(x);
  double sup = sup_norm(g);
  double merit = l2_norm(g);
  rep.residual_history.push_back(sup);
  std::vector<double> best = x;
  double best_sup = sup;

  int iters = 0;
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  auto fail = [&](const std::string& why) {
    rep.iterations.push_back(iters);
    rep.residual_norm = best_sup;
    rep.converged = false;
    rep.wall_time = elapsed();
    throw NoConvergence("newton_solve: " + why, detail::make_profile(sys, best, rep), params.B);
  };

  while (!(sup <= opt.tolerance)) {
    if (!std::isfinite(sup)) fail("residual is not finite");
    if (iters >= opt.max_newton_iters)
      fail("no convergence after " + std::to_string(iters) + " iterations (residual " + std::to_string(best_sup) + ")");
    const BandedLU lu(sys.jacobian(x));
    std::vector<double> step = lu.solve(g);
    double alpha = 1.0;
    std::vector<double> trial(x.size()), gt;
    double trial_sup = 0.0, trial_merit = 0.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - alpha * step[i];
      sys.impose_dirichlet(trial);
      gt = sys.residual(trial);
      trial_sup = sup_norm(gt);
      trial_merit = l2_norm(gt);
      if (std::isfinite(trial_merit) && (trial_merit < merit || trial_sup <= opt.tolerance)) {
        accepted = true;
        break;
      }
      alpha *= opt.damping;
    }
    ++iters;
    if (!accepted) fail("line search failed to reduce the residual (residual " + std::to_string(sup) + ")");
    x.swap(trial);
    g.swap(gt);
    sup = trial_sup;
    merit = trial_merit;
    rep.residual_history.push_back(sup);
    if (sup < best_sup) {
      best_sup = sup;
      best = x;
    }
  }

  rep.iterations.push_back(iters);
  rep.residual_norm = sup;
  rep.converged = true;
  rep.wall_time = elapsed();
  return detail::make_profile(sys, x, rep);
}

/// Solves the decoupled problem at B = 0 from `init`, then walks B to its
/// target value, warm-starting each stage.  A failing stage is retried with
/// halved steps.
inline Profile continuation_from(const InitialArrays& init, const CouplingParams& params, const DegreePair& degrees,
                                 const RadialGrid& grid, const SolveOptions& opt = {}) {
  validate(params);
  if (opt.continuation_steps < 1) throw ConfigError("continuation_steps must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  Profile current = newton_solve(init, grid, params.with_B(0.0), degrees, opt);
  std::vector<int> iterations = current.report.iterations;
  std::vector<double> history = current.report.residual_history;

  if (params.B != 0.0) {
    const double target = params.B;
    const double base_step = target / opt.continuation_steps;
    double B = 0.0;
    double step = base_step;
    int halvings = 0;
    while (std::abs(target - B) > 0.0) {
      double next = B + step;
      if ((step > 0 && next > target) || (step < 0 && next < target) ||
          std::abs(target - next) < 1e-12 * std::abs(base_step))
        next = target;
      try {
        Profile p = newton_solve({current.f_plus, current.f_minus}, grid, params.with_B(next), degrees, opt);
        iterations.insert(iterations.end(), p.report.iterations.begin(), p.report.iterations.end());
        history.insert(history.end(), p.report.residual_history.begin(), p.report.residual_history.end());
        current = std::move(p);
        B = next;
        halvings = 0;
        step = base_step;
      } catch (const NoConvergence& e) {
        if (++halvings > 5)
          throw NoConvergence(std::string("continuation failed at B = ") + std::to_string(next) + ": " + e.what(),
                              e.best_iterate(), next);
        step *= 0.5;
      }
    }
  }
  current.params = params;
  current.report.iterations = std::move(iterations);
  current.report.residual_history = std::move(history);
  current.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return current;
}

inline Profile continuation_solve(const CouplingParams& params, const DegreePair& degrees, const RadialGrid& grid,
                                  const SolveOptions& opt = {}) {
  validate(params);
  return continuation_from(initial_guess(grid, params, degrees), params, degrees, grid, opt);
}

/// Ramp t min(r / r_c, 1) for n >= 1; for n = 0 a ramp from t/2 to t.
inline std::vector<double> ramp_profile(const RadialGrid& grid, double t, int n, double r_c = 4.0) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = std::min(grid.r(i) / r_c, 1.0);
    f[i] = n == 0 ? t * (0.5 + 0.5 * x) : t * x;
  }
  return f;
}

struct UniquenessResult {
  double max_distance = 0.0;
  int successes = 0;
  int failures = 0;
  std::vector<Profile> profiles;
};

/// Solves from distinct initializations (ansatz, ramp, then randomized
/// positive perturbations of the ansatz), falling back to continuation in B
/// from the same seed when a direct solve fails, and reports the largest pairwise
/// sup-norm distance among the converged profiles.
inline UniquenessResult uniqueness_probe(const CouplingParams& params, const DegreePair& degrees,
                                         const RadialGrid& grid, const SolveOptions& opt, int seed_count,
                                         std::uint32_t seed = 20240531u) {
  if (seed_count < 2) throw ConfigError("uniqueness_probe needs at least two seeds");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  UniquenessResult out;
  const auto ansatz = initial_guess(grid, params, degrees);
  for (int k = 0; k < seed_count; ++k) {
    InitialArrays init;
    if (k == 0) {
      init = ansatz;
    } else if (k == 1) {
      // ramp width follows each component's healing length 1/(t sqrt(A))
      auto width = [](double A, double t, int n) { return 2.0 * std::max(n, 1) / (t * std::sqrt(A)); };
      init = {ramp_profile(grid, params.t_plus, degrees.n_plus, width(params.A_plus, params.t_plus, degrees.n_plus)),
              ramp_profile(grid, params.t_minus, degrees.n_minus, width(params.A_minus, params.t_minus, degrees.n_minus))};
    } else {
      init = ansatz;
      for (auto& v : init.f_plus) v *= 1.0 + jitter(rng);
      for (auto& v : init.f_minus) v *= 1.0 + jitter(rng);
    }
    // a cold start can stall near the (H) boundary; continuing in B from the same seed keeps it distinct
    try {
      out.profiles.push_back(newton_solve(init, grid, params, degrees, opt));
      ++out.successes;
    } catch (const NoConvergence&) {
      try {
        out.profiles.push_back(continuation_from(init, params, degrees, grid, opt));
        ++out.successes;
      } catch (const NoConvergence&) {
        ++out.failures;
      }
    }
  }
  if (out.successes < 2) throw NoConvergence("uniqueness_probe: fewer than two seeds converged", {}, params.B);
  for (std::size_t i = 0; i < out.profiles.size(); ++i)
    for (std::size_t j = i + 1; j < out.profiles.size(); ++j) {
      const auto& a = out.profiles[i];
      const auto& b = out.profiles[j];
      for (std::size_t n = 0; n < a.f_plus.size(); ++n)
        out.max_distance = std::max({out.max_distance, std::abs(a.f_plus[n] - b.f_plus[n]),
                                     std::abs(a.f_minus[n] - b.f_minus[n])});
    }
  return out;
}

/// Discrete residual of a stored profile under its recorded far-field mode.
inline std::vector<double> residual(const Profile& p) {
  const RadialSystem sys(p.grid, p.params, p.degrees, p.report.far_field);
  return sys.residual(RadialSystem::interleave(p.f_plus, p.f_minus));
}

inline BandedMatrix jacobian(const Profile& p) {
  const RadialSystem sys(p.grid, p.params, p.degrees, p.report.far_field);
  return sys.jacobian(RadialSystem::interleave(p.f_plus, p.f_minus));
}

}  // namespace vortex2c
