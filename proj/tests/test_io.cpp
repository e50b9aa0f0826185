#include <cstring>

#include <gtest/gtest.h>

#include <vortex2c/io.hpp>

using namespace vortex2c;

namespace {

std::string tmp(const std::string& name) { return std::string(VORTEX2C_TEST_TMP) + "/io_" + name; }

json base_config() {
  return json::parse(R"({"version": 1, "params": {"A_plus": 1, "A_minus": 1, "B": 0.5, "t_plus": 1, "t_minus": 1}})");
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(ProfileJson, RoundTripIsLossless) {
  const auto prof = continuation_solve({2, 1, 0.8, 1, 0.7}, {1, 1}, build_grid(30, 600));
  const std::string path = tmp("profile.json");
  save_profile(prof, path);
  const auto back = load_profile(path);
  EXPECT_EQ(back.grid.spec(), prof.grid.spec());
  EXPECT_EQ(back.params, prof.params);
  EXPECT_EQ(back.degrees, prof.degrees);
  ASSERT_EQ(back.f_plus.size(), prof.f_plus.size());
  for (std::size_t i = 0; i < prof.f_plus.size(); ++i) {
    EXPECT_TRUE(bitwise_equal(back.f_plus[i], prof.f_plus[i])) << i;
    EXPECT_TRUE(bitwise_equal(back.f_minus[i], prof.f_minus[i])) << i;
  }
  EXPECT_EQ(back.report.iterations, prof.report.iterations);
  EXPECT_EQ(back.report.residual_history, prof.report.residual_history);
  EXPECT_EQ(back.report.residual_norm, prof.report.residual_norm);
  EXPECT_EQ(back.report.converged, prof.report.converged);
  EXPECT_EQ(back.report.far_field, prof.report.far_field);
  EXPECT_EQ(to_json(back).dump(), to_json(prof).dump());
  const auto keys = to_json(prof);
  std::vector<std::string> order;
  for (auto it = keys.begin(); it != keys.end(); ++it) order.push_back(it.key());
  EXPECT_EQ(order, (std::vector<std::string>{"params", "degrees", "grid", "f_plus", "f_minus", "report"}));
}

TEST(ProfileJson, RejectsMalformedProfiles) {
  const auto prof = continuation_solve({1, 1, 0, 1, 1}, {1, 0}, build_grid(10, 100));
  auto j = to_json(prof);
  j["f_plus"].erase(j["f_plus"].size() - 1);
  EXPECT_THROW(profile_from_json(j), LengthMismatch);
  j = to_json(prof);
  j["extra"] = 1;
  EXPECT_THROW(profile_from_json(j), ConfigError);
  j = to_json(prof);
  j["params"]["B"] = 2.0;
  EXPECT_THROW(profile_from_json(j), HypothesisViolation);
  j = to_json(prof);
  j["degrees"]["n_minus"] = -1;
  EXPECT_THROW(profile_from_json(j), ConfigError);
  j = to_json(prof);
  j["report"].erase("converged");
  EXPECT_THROW(profile_from_json(j), ConfigError);
  j = to_json(prof);
  j["f_minus"][3] = "x";
  EXPECT_THROW(profile_from_json(j), ConfigError);
}

TEST(ParamsJson, StrictKeys) {
  EXPECT_EQ(params_from_json(to_json(CouplingParams{2, 1, 0.8, 1, 0.7})), (CouplingParams{2, 1, 0.8, 1, 0.7}));
  auto j = to_json(CouplingParams{});
  j["b"] = 0.1;
  EXPECT_THROW(params_from_json(j), ConfigError);
  j = to_json(CouplingParams{});
  j.erase("t_minus");
  EXPECT_THROW(params_from_json(j), ConfigError);
  const BecParams b{4, 1, 1, 1, 0, 1, 1, 1};
  const auto rb = bec_from_json(to_json(b));
  EXPECT_EQ(rb.m1, 4.0);
  EXPECT_EQ(rb.hbar, 1.0);
}

TEST(GridJson, DefaultsAndValidation) {
  auto g = grid_from_json(json::object());
  EXPECT_EQ(g, GridSpec{});
  g = grid_from_json(json::parse(R"({"R_max": 50, "N": 1000, "kind": "geometric", "stretch": 1.002})"));
  EXPECT_EQ(g.kind, GridKind::geometric);
  EXPECT_EQ(grid_from_json(to_json(g)), g);
  EXPECT_THROW(grid_from_json(json::parse(R"({"kind": "chebyshev"})")), ConfigError);
  EXPECT_THROW(grid_from_json(json::parse(R"({"Rmax": 10})")), ConfigError);
}

TEST(OptionsJson, Validation) {
  const auto o = options_from_json(json::parse(R"({"tolerance": 1e-9, "far_field": "dirichlet"})"));
  EXPECT_EQ(o.tolerance, 1e-9);
  EXPECT_EQ(o.far_field, FarField::dirichlet);
  EXPECT_EQ(o.max_newton_iters, 50);
  EXPECT_THROW(options_from_json(json::parse(R"({"tolerance": 0})")), ConfigError);
  EXPECT_THROW(options_from_json(json::parse(R"({"damping": 1.5})")), ConfigError);
  EXPECT_THROW(options_from_json(json::parse(R"({"far_field": "neumann"})")), ConfigError);
  EXPECT_THROW(options_from_json(json::parse(R"({"continuation_steps": 0})")), ConfigError);
}

TEST(RunConfigJson, Examples) {
  auto c = config_from_json(base_config());
  EXPECT_EQ(c.params.B, 0.5);
  EXPECT_EQ(c.degrees, (DegreePair{1, 0}));
  EXPECT_FALSE(c.sweep);

  auto j = base_config();
  j["degrees"] = {{"n_plus", -2}, {"n_minus", 1}};
  c = config_from_json(j);
  EXPECT_EQ(c.degrees, (DegreePair{2, 1}));
  EXPECT_TRUE(c.conjugated.plus);

  j = json::parse(R"({"version": 1, "bec_params": {"m1": 4, "m2": 1, "g1": 1, "g2": 1, "g12": 0, "mu1": 1, "mu2": 1, "hbar": 1}})");
  c = config_from_json(j);
  EXPECT_EQ(c.params.A_plus, 4.0);
  EXPECT_EQ(c.params.A_minus, 0.25);
  ASSERT_TRUE(c.bec);

  j = base_config();
  j["fit_window"] = {10, 30};
  j["verify"] = {{"quantization", 0.02}};
  j["output"] = "out.json";
  c = config_from_json(j);
  EXPECT_EQ(c.fit_window->r_lo, 10.0);
  EXPECT_EQ(c.tolerances.quantization, 0.02);
  EXPECT_EQ(c.tolerances.tail_b, 0.05);
  EXPECT_EQ(*c.output, "out.json");
}

TEST(RunConfigJson, Rejections) {
  auto j = base_config();
  j.erase("version");
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base_config();
  j["version"] = 2;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base_config();
  j["bec_params"] = to_json(BecParams{});
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base_config();
  j.erase("params");
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base_config();
  j["params"]["B"] = 1.0;
  EXPECT_THROW(config_from_json(j), HypothesisViolation);
  j = base_config();
  j["sweep"] = {{"B_min", -0.5}, {"B_max", 1.0}, {"B_step", 0.1}};
  EXPECT_THROW(config_from_json(j), HypothesisViolation);
  j = base_config();
  j["fit_window"] = {10};
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base_config();
  j["grids"] = json::object();
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = base_config();
  j["verify"] = {{"hesian", 1e-8}};
  EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(SweepSpec, Values) {
  const SweepSpec s{-0.9, 0.9, 0.1};
  const auto v = s.values();
  ASSERT_EQ(v.size(), 19u);
  EXPECT_EQ(v.front(), -0.9);
  EXPECT_EQ(v.back(), 0.9);
  EXPECT_EQ(v[9], 0.0);
  EXPECT_EQ(v[10], 0.1);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);
  EXPECT_THROW((SweepSpec{0, 1, 0}.values()), ConfigError);
  EXPECT_THROW((SweepSpec{1, 0, 0.1}.values()), ConfigError);
}

TEST(Files, Errors) {
  EXPECT_THROW(read_json_file(tmp("missing.json")), ConfigError);
  write_text_file(tmp("broken.json"), "{\"version\": 1,");
  EXPECT_THROW(read_json_file(tmp("broken.json")), ConfigError);
  EXPECT_THROW(write_text_file("/nonexistent_dir/x.json", "{}"), ConfigError);
}
