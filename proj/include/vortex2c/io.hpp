#pragma once

// JSON persistence for parameters, grids, profiles and run configurations.
// Unknown keys are rejected everywhere so that typos in run files surface.

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotics.hpp"
#include "diagnostics.hpp"
#include "solver.hpp"

namespace vortex2c {

using json = nlohmann::ordered_json;

inline constexpr int config_version = 1;

namespace detail {

inline void require_keys(const json& j, std::initializer_list<const char*> allowed,
                         std::initializer_list<const char*> required, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
  }
  for (const char* k : required)
    if (!j.contains(k)) throw ConfigError(where + ": missing key \"" + std::string(k) + "\"");
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

}  // namespace detail

inline json to_json(const CouplingParams& p) {
  return {{"A_plus", p.A_plus}, {"A_minus", p.A_minus}, {"B", p.B}, {"t_plus", p.t_plus}, {"t_minus", p.t_minus}};
}

inline CouplingParams params_from_json(const json& j) {
  const std::string w = "params";
  detail::require_keys(j, {"A_plus", "A_minus", "B", "t_plus", "t_minus"},
                       {"A_plus", "A_minus", "B", "t_plus", "t_minus"}, w);
  return {detail::get<double>(j, "A_plus", w), detail::get<double>(j, "A_minus", w), detail::get<double>(j, "B", w),
          detail::get<double>(j, "t_plus", w), detail::get<double>(j, "t_minus", w)};
}

inline json to_json(const BecParams& b) {
  return {{"m1", b.m1}, {"m2", b.m2}, {"g1", b.g1}, {"g2", b.g2}, {"g12", b.g12},
          {"mu1", b.mu1}, {"mu2", b.mu2}, {"hbar", b.hbar}};
}

inline BecParams bec_from_json(const json& j) {
  const std::string w = "bec_params";
  detail::require_keys(j, {"m1", "m2", "g1", "g2", "g12", "mu1", "mu2", "hbar"},
                       {"m1", "m2", "g1", "g2", "g12", "mu1", "mu2", "hbar"}, w);
  BecParams b;
  b.m1 = detail::get<double>(j, "m1", w);
  b.m2 = detail::get<double>(j, "m2", w);
  b.g1 = detail::get<double>(j, "g1", w);
  b.g2 = detail::get<double>(j, "g2", w);
  b.g12 = detail::get<double>(j, "g12", w);
  b.mu1 = detail::get<double>(j, "mu1", w);
  b.mu2 = detail::get<double>(j, "mu2", w);
  b.hbar = detail::get<double>(j, "hbar", w);
  return b;
}

inline json to_json(const DegreePair& d) { return {{"n_plus", d.n_plus}, {"n_minus", d.n_minus}}; }

/// Accepts signed degrees; the returned pair is normalized.
inline NormalizedDegrees degrees_from_json(const json& j) {
  const std::string w = "degrees";
  detail::require_keys(j, {"n_plus", "n_minus"}, {"n_plus", "n_minus"}, w);
  return normalize_degrees(detail::get<int>(j, "n_plus", w), detail::get<int>(j, "n_minus", w));
}

inline const char* to_string(GridKind k) { return k == GridKind::uniform ? "uniform" : "geometric"; }

inline json to_json(const GridSpec& g) {
  return {{"R_max", g.R_max}, {"N", g.N}, {"kind", to_string(g.kind)}, {"stretch", g.stretch}};
}

inline GridSpec grid_from_json(const json& j) {
  const std::string w = "grid";
  detail::require_keys(j, {"R_max", "N", "kind", "stretch"}, {}, w);
  GridSpec g;
  g.R_max = detail::get_or(j, "R_max", g.R_max, w);
  g.N = detail::get_or(j, "N", g.N, w);
  const auto kind = detail::get_or<std::string>(j, "kind", "uniform", w);
  if (kind == "uniform") g.kind = GridKind::uniform;
  else if (kind == "geometric") g.kind = GridKind::geometric;
  else throw ConfigError("grid.kind: expected \"uniform\" or \"geometric\"");
  g.stretch = detail::get_or(j, "stretch", g.stretch, w);
  return g;
}

inline FarField far_field_from_string(const std::string& s) {
  if (s == "robin") return FarField::robin;
  if (s == "dirichlet") return FarField::dirichlet;
  throw ConfigError("far_field: expected \"robin\" or \"dirichlet\", got \"" + s + "\"");
}

inline json to_json(const SolveOptions& o) {
  return {{"tolerance", o.tolerance}, {"max_newton_iters", o.max_newton_iters}, {"damping", o.damping},
          {"continuation_steps", o.continuation_steps}, {"far_field", to_string(o.far_field)}};
}

inline SolveOptions options_from_json(const json& j) {
  const std::string w = "options";
  detail::require_keys(j, {"tolerance", "max_newton_iters", "damping", "continuation_steps", "far_field"}, {}, w);
  SolveOptions o;
  o.tolerance = detail::get_or(j, "tolerance", o.tolerance, w);
  o.max_newton_iters = detail::get_or(j, "max_newton_iters", o.max_newton_iters, w);
  o.damping = detail::get_or(j, "damping", o.damping, w);
  o.continuation_steps = detail::get_or(j, "continuation_steps", o.continuation_steps, w);
  if (j.contains("far_field")) o.far_field = far_field_from_string(detail::get<std::string>(j, "far_field", w));
  if (!(o.tolerance > 0)) throw ConfigError("options.tolerance must be positive");
  if (!(o.damping > 0 && o.damping < 1)) throw ConfigError("options.damping must lie in (0, 1)");
  if (o.max_newton_iters < 1) throw ConfigError("options.max_newton_iters must be >= 1");
  if (o.continuation_steps < 1) throw ConfigError("options.continuation_steps must be >= 1");
  return o;
}

inline json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"residual_norm", r.residual_norm},
          {"residual_history", r.residual_history},
          {"tolerance", r.tolerance},
          {"converged", r.converged},
          {"wall_time", r.wall_time},
          {"far_field", to_string(r.far_field)},
          {"warnings", r.warnings}};
}

inline SolveReport report_from_json(const json& j) {
  const std::string w = "report";
  detail::require_keys(j,
                       {"iterations", "residual_norm", "residual_history", "tolerance", "converged", "wall_time",
                        "far_field", "warnings"},
                       {"residual_norm", "tolerance", "converged", "far_field"}, w);
  SolveReport r;
  r.iterations = detail::get_or(j, "iterations", std::vector<int>{}, w);
  r.residual_norm = detail::get<double>(j, "residual_norm", w);
  r.residual_history = detail::get_or(j, "residual_history", std::vector<double>{}, w);
  r.tolerance = detail::get<double>(j, "tolerance", w);
  r.converged = detail::get<bool>(j, "converged", w);
  r.wall_time = detail::get_or(j, "wall_time", 0.0, w);
  r.far_field = far_field_from_string(detail::get<std::string>(j, "far_field", w));
  r.warnings = detail::get_or(j, "warnings", std::vector<std::string>{}, w);
  return r;
}

inline json to_json(const Profile& p) {
  return {{"params", to_json(p.params)}, {"degrees", to_json(p.degrees)}, {"grid", to_json(p.grid.spec())},
          {"f_plus", p.f_plus},          {"f_minus", p.f_minus},          {"report", to_json(p.report)}};
}

inline Profile profile_from_json(const json& j) {
  const std::string w = "profile";
  detail::require_keys(j, {"params", "degrees", "grid", "f_plus", "f_minus", "report"},
                       {"params", "degrees", "grid", "f_plus", "f_minus", "report"}, w);
  Profile p{RadialGrid(grid_from_json(j.at("grid"))), validate(params_from_json(j.at("params"))), {}, {}, {}, {}};
  const auto nd = degrees_from_json(j.at("degrees"));
  if (nd.conjugated.plus || nd.conjugated.minus) throw ConfigError("profile degrees must be nonnegative");
  p.degrees = nd.degrees;
  p.f_plus = detail::get<std::vector<double>>(j, "f_plus", w);
  p.f_minus = detail::get<std::vector<double>>(j, "f_minus", w);
  if (p.f_plus.size() != p.grid.size() || p.f_minus.size() != p.grid.size())
    throw LengthMismatch("profile arrays do not match the grid (" + std::to_string(p.grid.size()) + " nodes)");
  p.report = report_from_json(j.at("report"));
  return p;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

inline Profile load_profile(const std::string& path) { return profile_from_json(read_json_file(path)); }

inline void save_profile(const Profile& p, const std::string& path) { write_text_file(path, to_json(p).dump() + "\n"); }

struct SweepSpec {
  double B_min = 0.0;
  double B_max = 0.0;
  double B_step = 0.1;

  std::vector<double> values() const {
    if (!(B_step > 0)) throw ConfigError("sweep.B_step must be positive");
    if (!(B_max >= B_min)) throw ConfigError("sweep.B_max must be >= sweep.B_min");
    const auto count = static_cast<long>(std::floor((B_max - B_min) / B_step + 1e-9)) + 1;
    std::vector<double> out;
    for (long k = 0; k < count; ++k) {
      // snap to a multiple of 1e-12 so 0.1-steps print as the decimal the user wrote
      const double b = B_min + static_cast<double>(k) * B_step;
      out.push_back(std::round(b * 1e12) / 1e12);
    }
    return out;
  }
};

struct VerifyTolerances {
  double positivity = 1e-12;
  double amplitude_bound = 1e-8;
  double quantization = 1e-2;
  double pohozaev = 1e-2;
  double near_origin = 0.05;
  double hessian = 1e-8;
  double tail_a = 1e-2;
  double tail_b = 5e-2;
  double slope_tol = 1e-6;
};

inline VerifyTolerances verify_from_json(const json& j) {
  const std::string w = "verify";
  detail::require_keys(j,
                       {"positivity", "amplitude_bound", "quantization", "pohozaev", "near_origin", "hessian",
                        "tail_a", "tail_b", "slope_tol"},
                       {}, w);
  VerifyTolerances t;
  t.positivity = detail::get_or(j, "positivity", t.positivity, w);
  t.amplitude_bound = detail::get_or(j, "amplitude_bound", t.amplitude_bound, w);
  t.quantization = detail::get_or(j, "quantization", t.quantization, w);
  t.pohozaev = detail::get_or(j, "pohozaev", t.pohozaev, w);
  t.near_origin = detail::get_or(j, "near_origin", t.near_origin, w);
  t.hessian = detail::get_or(j, "hessian", t.hessian, w);
  t.tail_a = detail::get_or(j, "tail_a", t.tail_a, w);
  t.tail_b = detail::get_or(j, "tail_b", t.tail_b, w);
  t.slope_tol = detail::get_or(j, "slope_tol", t.slope_tol, w);
  return t;
}

struct RunConfig {
  CouplingParams params;
  std::optional<BecParams> bec;
  double epsilon = 1.0;  // length scale from the condensate mapping, 1 otherwise
  DegreePair degrees{1, 0};
  ConjugationFlags conjugated;
  GridSpec grid;
  SolveOptions options;
  std::optional<SweepSpec> sweep;
  std::optional<FitWindow> fit_window;
  VerifyTolerances tolerances;
  std::optional<std::string> output;
};

inline RunConfig config_from_json(const json& j) {
  const std::string w = "config";
  detail::require_keys(j,
                       {"version", "params", "bec_params", "degrees", "grid", "options", "sweep", "fit_window",
                        "verify", "output"},
                       {"version"}, w);
  const int version = detail::get<int>(j, "version", w);
  if (version != config_version) throw ConfigError("unsupported config version " + std::to_string(version));
  RunConfig c;
  const bool has_p = j.contains("params"), has_b = j.contains("bec_params");
  if (has_p == has_b) throw ConfigError("config: exactly one of \"params\" and \"bec_params\" is required");
  if (has_p) {
    c.params = validate(params_from_json(j.at("params")));
  } else {
    c.bec = bec_from_json(j.at("bec_params"));
    const auto gl = bec_to_gl(*c.bec);
    c.params = gl.params;
    c.epsilon = gl.epsilon;
  }
  if (j.contains("degrees")) {
    const auto nd = degrees_from_json(j.at("degrees"));
    c.degrees = nd.degrees;
    c.conjugated = nd.conjugated;
  }
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  if (j.contains("options")) c.options = options_from_json(j.at("options"));
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::require_keys(s, {"B_min", "B_max", "B_step"}, {"B_min", "B_max", "B_step"}, "sweep");
    c.sweep = SweepSpec{detail::get<double>(s, "B_min", "sweep"), detail::get<double>(s, "B_max", "sweep"),
                        detail::get<double>(s, "B_step", "sweep")};
    for (double b : c.sweep->values())
      if (!(b * b < c.params.A_plus * c.params.A_minus))
        throw HypothesisViolation("sweep value B = " + std::to_string(b) + " violates B^2 < A_plus * A_minus");
  }
  if (j.contains("fit_window")) {
    const auto v = detail::get<std::vector<double>>(j, "fit_window", w);
    if (v.size() != 2) throw ConfigError("fit_window: expected [r_lo, r_hi]");
    c.fit_window = FitWindow{v[0], v[1]};
  }
  if (j.contains("verify")) c.tolerances = verify_from_json(j.at("verify"));
  if (j.contains("output")) c.output = detail::get<std::string>(j, "output", w);
  return c;
}

}  // namespace vortex2c
