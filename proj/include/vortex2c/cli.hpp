#pragma once

// Command-line front end: solve, sweep, verify, asymptotics, export.
//
// Exit codes: 0 success, 1 configuration or parse error, 2 solver failure
// (NoConvergence or SingularJacobian), 3 a check or envelope selection failed.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asymptotics.hpp"
#include "diagnostics.hpp"
#include "io.hpp"
#include "solver.hpp"
#include "verify.hpp"

namespace vortex2c::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_no_convergence = 2, exit_check_failed = 3 };

struct Overrides {
  std::optional<int> grid_n;
  std::optional<double> r_max;
  std::optional<double> tol;
  std::optional<std::string> far_field;
};

inline RunConfig load_config(const std::string& path, const Overrides& o = {}) {
  RunConfig c = config_from_json(read_json_file(path));
  if (o.grid_n) c.grid.N = *o.grid_n;
  if (o.r_max) c.grid.R_max = *o.r_max;
  if (o.tol) {
    if (!(*o.tol > 0)) throw ConfigError("--tol must be positive");
    c.options.tolerance = *o.tol;
  }
  if (o.far_field) c.options.far_field = far_field_from_string(*o.far_field);
  return c;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json error_json(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

inline void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
  if (path) write_text_file(*path, text);
  else out << text;
}

// solve

inline json solve_summary(const Profile& p, const RunConfig& c, const std::string& path) {
  const auto q = quantization_check(p);
  const auto mono = monotonicity_classify(p, c.tolerances.slope_tol);
  json j = {{"status", "converged"},
            {"profile", path},
            {"params", to_json(p.params)},
            {"degrees", to_json(p.degrees)},
            {"conjugated", {{"plus", c.conjugated.plus}, {"minus", c.conjugated.minus}}},
            {"epsilon", c.epsilon},
            {"residual_norm", p.report.residual_norm},
            {"tolerance", p.report.tolerance},
            {"iterations", p.report.iterations},
            {"total_iterations", p.report.total_iterations()},
            {"quantization_lhs", q.lhs},
            {"quantization_rhs", q.rhs},
            {"quantization_gap", q.gap},
            {"monotonicity", to_string(mono.cls)},
            {"far_field", to_string(p.report.far_field)},
            {"wall_time", p.report.wall_time},
            {"warnings", p.report.warnings}};
  if (mono.witness) j["monotonicity_witness"] = {{"node", mono.witness->node}, {"r", mono.witness->r}, {"slope", mono.witness->slope}};
  return j;
}

inline int cmd_solve(const RunConfig& c, const std::optional<std::string>& out_path, std::ostream& out) {
  const RadialGrid grid(c.grid);
  const Profile p = continuation_solve(c.params, c.degrees, grid, c.options);
  const std::string path = out_path.value_or(c.output.value_or("profile.json"));
  save_profile(p, path);
  out << solve_summary(p, c, path).dump(2) << "\n";
  return exit_ok;
}

// sweep

struct SweepRecord {
  double B = 0.0;
  bool converged = false;
  std::optional<MonotonicityClass> cls;
  double a_plus = 0.0, a_minus = 0.0;
  std::optional<double> quantization_gap;
  std::optional<double> hessian_min_eig;
  std::string error;
};

struct SweepResult {
  CouplingParams base;
  DegreePair degrees;
  GridSpec grid;
  std::vector<SweepRecord> records;
  /// Largest B >= 0 such that every sweep point in [0, B] converged and is
  /// BothNondecreasing.
  std::optional<double> empirical_B0;
};

inline SweepResult run_sweep(const RunConfig& c) {
  if (!c.sweep) throw ConfigError("sweep: config has no \"sweep\" section");
  const RadialGrid grid(c.grid);
  SweepResult res{c.params, c.degrees, c.grid, {}, std::nullopt};
  std::optional<Profile> prev;
  for (double B : c.sweep->values()) {
    const CouplingParams p = c.params.with_B(B);
    SweepRecord rec;
    rec.B = B;
    const auto a = leading_coeffs(coefficients(p), c.degrees);
    rec.a_plus = a.a_plus;
    rec.a_minus = a.a_minus;
    std::optional<Profile> sol;
    try {
      if (prev) {
        try {
          sol = newton_solve({prev->f_plus, prev->f_minus}, grid, p, c.degrees, c.options);
        } catch (const NoConvergence&) {
          sol = continuation_solve(p, c.degrees, grid, c.options);
        } catch (const SingularJacobian&) {
          sol = continuation_solve(p, c.degrees, grid, c.options);
        }
      } else {
        sol = continuation_solve(p, c.degrees, grid, c.options);
      }
    } catch (const NoConvergence& e) {
      rec.error = e.what();
    } catch (const SingularJacobian& e) {
      rec.error = e.what();
    }
    if (sol) {
      rec.converged = true;
      rec.cls = monotonicity_classify(*sol, c.tolerances.slope_tol).cls;
      rec.quantization_gap = quantization_check(*sol).gap;
      try {
        rec.hessian_min_eig = second_variation_min_eig(*sol);
      } catch (const EigenFailure& e) {
        rec.error = e.what();
      }
      prev = std::move(sol);
    }
    res.records.push_back(std::move(rec));
  }
  for (const auto& r : res.records) {
    if (r.B < 0) continue;
    if (!r.converged || r.cls != MonotonicityClass::BothNondecreasing) break;
    res.empirical_B0 = r.B;
  }
  return res;
}

inline json to_json(const SweepResult& s) {
  json recs = json::array();
  for (const auto& r : s.records) {
    json j = {{"B", r.B}, {"converged", r.converged}, {"a_plus", r.a_plus}, {"a_minus", r.a_minus}};
    j["monotonicity"] = r.cls ? json(to_string(*r.cls)) : json(nullptr);
    j["quantization_gap"] = r.quantization_gap ? json(*r.quantization_gap) : json(nullptr);
    j["hessian_min_eig"] = r.hessian_min_eig ? json(*r.hessian_min_eig) : json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    recs.push_back(std::move(j));
  }
  json base = to_json(s.base);
  base.erase("B");
  return {{"fixed_params", base},
          {"degrees", to_json(s.degrees)},
          {"grid", to_json(s.grid)},
          {"records", recs},
          {"empirical_B0", s.empirical_B0 ? json(*s.empirical_B0) : json(nullptr)}};
}

inline std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "B,converged,monotonicity,a_plus,a_minus,quantization_gap,hessian_min_eig\n";
  for (const auto& r : s.records) {
    os << fmt17(r.B) << ',' << (r.converged ? 1 : 0) << ',' << (r.cls ? to_string(*r.cls) : "") << ','
       << fmt17(r.a_plus) << ',' << fmt17(r.a_minus) << ','
       << (r.quantization_gap ? fmt17(*r.quantization_gap) : "") << ','
       << (r.hessian_min_eig ? fmt17(*r.hessian_min_eig) : "") << '\n';
  }
  return os.str();
}

inline int cmd_sweep(const RunConfig& c, const std::optional<std::string>& out_path,
                     const std::optional<std::string>& csv_path, std::ostream& out) {
  const auto res = run_sweep(c);
  emit(to_json(res).dump(2) + "\n", out_path, out);
  if (csv_path) write_text_file(*csv_path, sweep_csv(res));
  const bool any = std::any_of(res.records.begin(), res.records.end(), [](const auto& r) { return r.converged; });
  return any ? exit_ok : exit_no_convergence;
}

// verify

inline json checks_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const auto& c : checks) arr.push_back(to_json(c));
  return {{"checks", arr}, {"all_pass", all_pass(checks)}};
}

inline int cmd_verify(const std::string& profile_path, const std::optional<RunConfig>& c,
                      const std::optional<std::string>& out_path, std::ostream& out) {
  const Profile p = load_profile(profile_path);
  const auto checks = run_checks(p, c ? c->tolerances : VerifyTolerances{}, c ? c->fit_window : std::nullopt);
  emit(checks_json(checks).dump(2) + "\n", out_path, out);
  return all_pass(checks) ? exit_ok : exit_check_failed;
}

// asymptotics

inline json asymptotics_report(const CouplingParams& p, const DegreePair& d, std::string* failure = nullptr) {
  const auto k = exact_coefficients(p);
  const auto exact = second_coeffs(k, d);
  const auto tail = tail_expansion(p, d);
  json j = {{"params", to_json(p)},
            {"degrees", to_json(d)},
            {"a_plus", tail.a_plus},
            {"a_minus", tail.a_minus},
            {"b_plus", tail.b_plus},
            {"b_minus", tail.b_minus},
            {"exact",
             {{"a_plus", fraction_string(exact.a_plus)},
              {"a_minus", fraction_string(exact.a_minus)},
              {"b_plus", fraction_string(exact.b_plus)},
              {"b_minus", fraction_string(exact.b_minus)}}}};
  if (p.B > 0) {
    const auto c = mixed_envelope_constants(coefficients(p));
    j["c_tilde_plus"] = c[0];
    j["c_tilde_minus"] = c[1];
  } else {
    const auto c = same_sign_envelope_constants(coefficients(p));
    j["c_hat_plus"] = c[0];
    j["c_hat_minus"] = c[1];
  }
  try {
    const auto spec = select_envelope(p, d);
    j["delta"] = spec.delta;
    j["R"] = spec.R;
    j["candidates_tried"] = spec.candidates_tried;
    json m = json::object();
    for (const auto& rec : spec.series) {
      json per = json::object();
      for (int c = 0; c < 2; ++c) {
        json coeffs = json::object();
        for (int i = 0; i < 9; ++i) coeffs["M" + std::to_string(2 * i + 2)] = fraction_string(rec.exact[c][i]);
        per[c == 0 ? "plus" : "minus"] = coeffs;
      }
      m[to_string(rec.branch)] = per;
    }
    j["M_coefficients"] = m;
  } catch (const SelectionFailed& e) {
    j["delta"] = nullptr;
    j["R"] = nullptr;
    j["M_coefficients"] = nullptr;
    j["error"] = e.what();
    if (failure) *failure = e.what();
  }
  return j;
}

inline int cmd_asymptotics(const RunConfig& c, const std::optional<std::string>& out_path, std::ostream& out) {
  std::string failure;
  const json j = asymptotics_report(c.params, c.degrees, &failure);
  emit(j.dump(2) + "\n", out_path, out);
  return failure.empty() ? exit_ok : exit_check_failed;
}

// export

inline std::string export_csv(const Profile& p, const std::string& what) {
  std::ostringstream os;
  const auto& g = p.grid;
  if (what == "profiles") {
    os << "r,f_plus,f_minus\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      os << fmt17(g.r(i)) << ',' << fmt17(p.f_plus[i]) << ',' << fmt17(p.f_minus[i]) << '\n';
  } else if (what == "slopes") {
    const auto dp = derivative(g, p.f_plus), dm = derivative(g, p.f_minus);
    os << "r,df_plus,df_minus\n";
    for (std::size_t i = 0; i < g.size(); ++i) os << fmt17(g.r(i)) << ',' << fmt17(dp[i]) << ',' << fmt17(dm[i]) << '\n';
  } else if (what == "tail") {
    // (f - t) r^2 tends to a; (f - t - a/r^2) r^4 tends to b
    const auto tail = tail_expansion(p.params, p.degrees);
    os << "r,plus_r2,plus_r4_residual,minus_r2,minus_r4_residual\n";
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double r = g.r(i), r2 = r * r;
      const double up = p.f_plus[i] - p.params.t_plus, um = p.f_minus[i] - p.params.t_minus;
      os << fmt17(r) << ',' << fmt17(up * r2) << ',' << fmt17((up - tail.a_plus / r2) * r2 * r2) << ','
         << fmt17(um * r2) << ',' << fmt17((um - tail.a_minus / r2) * r2 * r2) << '\n';
    }
  } else if (what == "envelope") {
    const auto spec = select_envelope(p.params, p.degrees);
    os << "r,w_lower_plus,f_plus,w_upper_plus,w_lower_minus,f_minus,w_upper_minus\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.r(i);
      if (r < spec.R) continue;
      os << fmt17(r) << ',' << fmt17(spec.envelope(Component::plus, r, false)) << ',' << fmt17(p.f_plus[i]) << ','
         << fmt17(spec.envelope(Component::plus, r, true)) << ',' << fmt17(spec.envelope(Component::minus, r, false))
         << ',' << fmt17(p.f_minus[i]) << ',' << fmt17(spec.envelope(Component::minus, r, true)) << '\n';
    }
  } else {
    throw ConfigError("export: unknown kind \"" + what + "\" (profiles, slopes, tail, envelope)");
  }
  return os.str();
}

inline int cmd_export(const std::string& profile_path, const std::string& what,
                      const std::optional<std::string>& out_path, std::ostream& out) {
  const Profile p = load_profile(profile_path);
  emit(export_csv(p, what), out_path, out);
  return exit_ok;
}

// entry point

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled Ginzburg-Landau vortex profile solver and checker", "vortex2c"};
  app.require_subcommand(1);

  std::string config_path, profile_path, what;
  std::optional<std::string> out_path, csv_path;
  Overrides ov;

  auto add_solver_flags = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "JSON run configuration")->required();
    sc->add_option("--out", out_path, "output path");
    sc->add_option("--grid-n", ov.grid_n, "number of grid intervals");
    sc->add_option("--r-max", ov.r_max, "outer radius");
    sc->add_option("--tol", ov.tol, "Newton residual tolerance (sup norm)");
    sc->add_option("--far-field", ov.far_field, "far-field row")->check(CLI::IsMember({"dirichlet", "robin"}));
  };

  auto* solve = app.add_subcommand("solve", "solve one configuration and write the profile JSON");
  add_solver_flags(solve);
  auto* sweep = app.add_subcommand("sweep", "continuation sweep in B with monotonicity classification");
  add_solver_flags(sweep);
  sweep->add_option("--csv", csv_path, "also write the sweep as CSV");
  auto* verify = app.add_subcommand("verify", "run the check suite on a stored profile");
  verify->add_option("profile", profile_path, "profile JSON")->required();
  verify->add_option("--config", config_path, "optional config with verify tolerances and fit_window");
  verify->add_option("--out", out_path, "output path");
  auto* asym = app.add_subcommand("asymptotics", "tail coefficients and certified envelope data");
  asym->add_option("--config", config_path, "JSON run configuration")->required();
  asym->add_option("--out", out_path, "output path");
  auto* exp = app.add_subcommand("export", "plot data as CSV");
  exp->add_option("profile", profile_path, "profile JSON")->required();
  exp->add_option("what", what, "profiles | slopes | tail | envelope")
      ->required()
      ->check(CLI::IsMember({"profiles", "slopes", "tail", "envelope"}));
  exp->add_option("--out", out_path, "output path");

  auto fail = [&](int code, const std::string& kind, const std::string& msg) {
    err << error_json(kind, msg).dump() << "\n";
    return code;
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    return fail(exit_config, "UsageError", e.what());
  }

  try {
    if (*solve) return cmd_solve(load_config(config_path, ov), out_path, out);
    if (*sweep) return cmd_sweep(load_config(config_path, ov), out_path, csv_path, out);
    if (*verify) {
      std::optional<RunConfig> c;
      if (!config_path.empty()) c = load_config(config_path);
      return cmd_verify(profile_path, c, out_path, out);
    }
    if (*asym) return cmd_asymptotics(load_config(config_path), out_path, out);
    if (*exp) return cmd_export(profile_path, what, out_path, out);
  } catch (const NoConvergence& e) {
    json j = error_json(e.kind(), e.what());
    j["failing_B"] = e.failing_B();
    j["best_residual"] = e.best_iterate().report.residual_norm;
    err << j.dump() << "\n";
    return exit_no_convergence;
  } catch (const SingularJacobian& e) {
    return fail(exit_no_convergence, e.kind(), e.what());
  } catch (const SelectionFailed& e) {
    return fail(exit_check_failed, e.kind(), e.what());
  } catch (const EigenFailure& e) {
    return fail(exit_check_failed, e.kind(), e.what());
  } catch (const Error& e) {
    return fail(exit_config, e.kind(), e.what());
  } catch (const json::exception& e) {
    return fail(exit_config, "ConfigError", e.what());
  } catch (const std::exception& e) {
    return fail(exit_config, "Error", e.what());
  }
  return fail(exit_config, "UsageError", "no subcommand");
}

}  // namespace vortex2c::cli
