#pragma once

// The named check suite run by `verify`.  Every check is a pure function of
// the stored profile; nothing is re-solved.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "diagnostics.hpp"
#include "io.hpp"

namespace vortex2c {

struct CheckResult {
  std::string check;
  double value = 0.0;
  std::optional<double> target;
  std::optional<double> tolerance;
  bool pass = false;
  std::string note;
};

inline json to_json(const CheckResult& c) {
  json j;
  j["check"] = c.check;
  j["value"] = c.value;
  j["target"] = c.target ? json(*c.target) : json(nullptr);
  j["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

namespace detail {

inline CheckResult relative_check(std::string name, double value, double target, double tol) {
  const bool pass = std::isfinite(value) && std::abs(value - target) <= tol * std::abs(target) + 1e-9;
  return {std::move(name), value, target, tol, pass, {}};
}

}  // namespace detail

inline std::vector<CheckResult> run_checks(const Profile& p, const VerifyTolerances& tol = {},
                                           std::optional<FitWindow> window = std::nullopt) {
  std::vector<CheckResult> out;
  const auto& P = p.params;
  const auto& D = p.degrees;

  {
    const double r = sup_norm(residual(p));
    out.push_back({"residual", r, 0.0, p.report.tolerance, r <= p.report.tolerance, {}});
  }
  {
    double m = 0.0;
    for (std::size_t i = 0; i < p.f_plus.size(); ++i) m = std::min({m, p.f_plus[i], p.f_minus[i]});
    out.push_back({"positivity", m, 0.0, tol.positivity, m >= -tol.positivity, {}});
  }
  {
    const double m = amplitude_bound_check(p);
    out.push_back({"amplitude_bound", m, 0.0, tol.amplitude_bound, m >= -tol.amplitude_bound, {}});
  }
  {
    const auto q = quantization_check(p);
    out.push_back({"quantization", q.lhs, q.rhs, tol.quantization,
                   std::abs(q.gap) <= tol.quantization, "gap " + std::to_string(q.gap)});
  }
  {
    const double r = pohozaev_residual(p, p.grid.r_max());
    const double scale = std::max(quantization_target(P, D), 1.0);
    out.push_back({"pohozaev", r, 0.0, tol.pohozaev, std::abs(r) <= tol.pohozaev * scale, {}});
  }
  for (int c = 0; c < 2; ++c) {
    const Component comp = c == 0 ? Component::plus : Component::minus;
    const double e = near_origin_exponent(p.grid, p.f(comp));
    const double n = D.n(comp);
    out.push_back({c == 0 ? "near_origin_order_plus" : "near_origin_order_minus", e, n, tol.near_origin,
                   std::isfinite(e) && std::abs(e - n) <= tol.near_origin, {}});
  }
  {
    CheckResult h{"hessian_min_eig", 0.0, 0.0, tol.hessian, false, {}};
    try {
      h.value = second_variation_min_eig(p);
      h.pass = h.value >= -tol.hessian;
    } catch (const EigenFailure& e) {
      h.value = std::nan("");
      h.note = e.what();
    }
    out.push_back(h);
  }

  const FitWindow w = window.value_or(default_fit_window(p.grid.r_max()));
  const auto tail = tail_expansion(P, D);
  try {
    const auto fit = tail_fit(p, w);
    out.push_back(detail::relative_check("tail_a_plus", fit.plus.a, tail.a_plus, tol.tail_a));
    out.push_back(detail::relative_check("tail_a_minus", fit.minus.a, tail.a_minus, tol.tail_a));
    out.push_back(detail::relative_check("tail_b_plus", fit.plus.b, tail.b_plus, tol.tail_b));
    out.push_back(detail::relative_check("tail_b_minus", fit.minus.b, tail.b_minus, tol.tail_b));
  } catch (const IllConditionedFit& e) {
    for (const char* name : {"tail_a_plus", "tail_a_minus", "tail_b_plus", "tail_b_minus"})
      out.push_back({name, std::nan(""), std::nullopt, std::nullopt, false, e.what()});
  }
  {
    const auto d = derivative_tail_check(p, w);
    out.push_back({"derivative_tail_C2", d.C2(), std::nullopt, std::nullopt, d.finite(), {}});
  }
  {
    CheckResult e{"envelope", std::nan(""), 0.0, 0.0, false, {}};
    try {
      const auto spec = select_envelope(P, D);
      if (spec.R > p.grid.r_max()) {
        e.note = "selected R exceeds R_max";
      } else {
        const auto chk = envelope_check(p, spec);
        e.value = chk.worst_margin;
        e.pass = chk.pass;
        e.note = "delta " + std::to_string(spec.delta) + ", R " + std::to_string(spec.R);
      }
    } catch (const SelectionFailed& ex) {
      e.note = ex.what();
    }
    out.push_back(e);
  }
  {
    // a component that starts at 0 and tends to t from above must overshoot
    const auto mono = monotonicity_classify(p, tol.slope_tol);
    int violations = 0;
    for (int c = 0; c < 2; ++c) {
      const Component comp = c == 0 ? Component::plus : Component::minus;
      const auto& tr = c == 0 ? mono.plus : mono.minus;
      if (D.n(comp) >= 1 && tail.a(comp) > 0 && (tr.nondecreasing || tr.nonincreasing)) ++violations;
    }
    out.push_back({"monotonicity_sign_rule", double(violations), 0.0, 0.0, violations == 0, to_string(mono.cls)});
  }
  return out;
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace vortex2c
