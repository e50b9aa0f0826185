#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <vortex2c/model.hpp>

using namespace vortex2c;

namespace {

double eigen_smallest(double a, double d, double b) {
  Eigen::Matrix2d m;
  m << a, b, b, d;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues()(0);
}

}  // namespace

TEST(Validate, AcceptsAndRejects) {
  EXPECT_NO_THROW(validate({1, 1, 0.5, 1, 1}));
  EXPECT_NO_THROW(validate({2, 2, -1.2, 1, 0.7}));
  try {
    validate({1, 1, 1.0, 1, 1});
    FAIL() << "equality must be rejected";
  } catch (const HypothesisViolation& e) {
    EXPECT_NE(std::string(e.what()).find("B^2 < A_plus * A_minus"), std::string::npos);
  }
  EXPECT_THROW(validate({0, 1, 0, 1, 1}), HypothesisViolation);
  EXPECT_THROW(validate({1, -1, 0, 1, 1}), HypothesisViolation);
  EXPECT_THROW(validate({1, 1, 0, 0, 1}), HypothesisViolation);
  EXPECT_THROW(validate({1, 1, 0, 1, -2}), HypothesisViolation);
  EXPECT_THROW(validate({1, 1, NAN, 1, 1}), HypothesisViolation);
  EXPECT_FALSE(is_valid({1, 1, -1.0, 1, 1}));
}

TEST(Validate, ReturnsParamsUnchanged) {
  const CouplingParams p{2, 1, 0.8, 1, 0.7};
  EXPECT_EQ(validate(p), p);
}

TEST(DerivedBounds, Examples) {
  auto d = derived_bounds({2, 2, 1, 1, 1});
  EXPECT_NEAR(d.lambda_s, 1.0, 1e-15);
  EXPECT_NEAR(d.M, 3.0, 1e-15);
  EXPECT_NEAR(d.Lambda_sq, 2.0, 1e-15);

  d = derived_bounds({1, 1, 0, 1, 1});
  EXPECT_DOUBLE_EQ(d.lambda_s, 1.0);
  EXPECT_DOUBLE_EQ(d.M, 1.0);
  EXPECT_DOUBLE_EQ(d.Lambda_sq, 2.0);

  d = derived_bounds({1, 4, -1, 1, 2});
  EXPECT_NEAR(d.lambda_s, (5 - std::sqrt(13.0)) / 2, 1e-14);
  EXPECT_NEAR(d.lambda_s, eigen_smallest(1, 4, -1), 1e-13);
  EXPECT_NEAR(d.lambda_s, 0.6972, 5e-5);
}

TEST(DerivedBounds, AgreesWithEigenSolverAndIsBounded) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pos(0.05, 5.0), unit(-0.999, 0.999);
  for (int k = 0; k < 500; ++k) {
    const double ap = pos(rng), am = pos(rng);
    const CouplingParams p{ap, am, unit(rng) * std::sqrt(ap * am), pos(rng), pos(rng)};
    const auto d = derived_bounds(p);
    EXPECT_GT(d.lambda_s, 0.0);
    EXPECT_LE(d.lambda_s, std::min(ap, am) * (1 + 1e-14));
    EXPECT_NEAR(d.lambda_s, eigen_smallest(p.A_plus, p.A_minus, p.B), 1e-12 * std::max(ap, am));
    EXPECT_LE(d.Lambda_sq, p.t_plus * p.t_plus + p.t_minus * p.t_minus);
  }
}

TEST(DerivedBounds, LipschitzInParameters) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pos(0.5, 3.0), unit(-0.9, 0.9), dir(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double ap = pos(rng), am = pos(rng);
    const CouplingParams p{ap, am, unit(rng) * std::sqrt(ap * am), 1, 1};
    const double delta = 1e-3;
    CouplingParams q = p;
    q.A_plus += delta * dir(rng);
    q.A_minus += delta * dir(rng);
    q.B += delta * dir(rng);
    EXPECT_LE(std::abs(derived_bounds(q).lambda_s - derived_bounds(p).lambda_s), 2 * delta);
  }
}

TEST(BecToGl, SymmetricCases) {
  auto gl = bec_to_gl({1, 1, 1, 1, 0, 1, 1, 1});
  EXPECT_DOUBLE_EQ(gl.params.A_plus, 1);
  EXPECT_DOUBLE_EQ(gl.params.A_minus, 1);
  EXPECT_DOUBLE_EQ(gl.params.B, 0);
  EXPECT_DOUBLE_EQ(gl.params.t_plus, 1);
  EXPECT_DOUBLE_EQ(gl.params.t_minus, 1);
  EXPECT_DOUBLE_EQ(gl.epsilon, 1);

  gl = bec_to_gl({1, 1, 2, 2, 1, 3, 3, 1});
  EXPECT_NEAR(gl.params.t_plus * gl.params.t_plus, 1.0, 1e-15);
  EXPECT_NEAR(gl.params.t_minus * gl.params.t_minus, 1.0, 1e-15);
}

TEST(BecToGl, UnequalMassesMatchHomogeneousDensities) {
  const BecParams bec{4, 1, 1, 1, 0, 1, 1, 1};
  const auto gl = bec_to_gl(bec);
  EXPECT_DOUBLE_EQ(gl.params.A_plus, 4);
  EXPECT_DOUBLE_EQ(gl.params.A_minus, 0.25);
  EXPECT_NEAR(gl.params.t_plus * gl.params.t_plus, 0.5, 1e-15);
  EXPECT_NEAR(gl.params.t_minus * gl.params.t_minus, 2.0, 1e-15);

  // homogeneous condensate densities solve g n = mu; t^2 is n rescaled by the mass ratio
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int k = 0; k < 50; ++k) {
    BecParams b{u(rng), u(rng), u(rng) + 1, u(rng) + 1, 0.3 * u(rng), u(rng) + 1, u(rng) + 1, u(rng)};
    Eigen::Matrix2d g;
    g << b.g1, b.g12, b.g12, b.g2;
    const Eigen::Vector2d n = g.fullPivLu().solve(Eigen::Vector2d(b.mu1, b.mu2));
    if (n(0) <= 0 || n(1) <= 0) continue;
    const auto r = bec_to_gl(b);
    EXPECT_NEAR(r.params.t_plus * r.params.t_plus, n(0) * std::sqrt(b.m2 / b.m1), 1e-12);
    EXPECT_NEAR(r.params.t_minus * r.params.t_minus, n(1) * std::sqrt(b.m1 / b.m2), 1e-12);
    EXPECT_NEAR(r.epsilon * r.epsilon * std::sqrt(b.m1 * b.m2), b.hbar * b.hbar, 1e-12);
    EXPECT_TRUE(is_valid(r.params));
  }
}

TEST(BecToGl, RejectsUnphysicalChemicalPotentials) {
  EXPECT_THROW(bec_to_gl({1, 1, 1, 1, 0.9, 1, 0.5, 1}), NonPositiveDensity);
  EXPECT_THROW(bec_to_gl({1, 1, 1, 1, 1.0, 1, 1, 1}), HypothesisViolation);
  EXPECT_THROW(bec_to_gl({0, 1, 1, 1, 0, 1, 1, 1}), NonPositiveDensity);
}

TEST(NormalizeDegrees, Examples) {
  auto n = normalize_degrees(1, -1);
  EXPECT_EQ(n.degrees, (DegreePair{1, 1}));
  EXPECT_FALSE(n.conjugated.plus);
  EXPECT_TRUE(n.conjugated.minus);

  n = normalize_degrees(0, 0);
  EXPECT_EQ(n.degrees, (DegreePair{0, 0}));
  EXPECT_EQ(n.conjugated, (ConjugationFlags{false, false}));

  n = normalize_degrees(-3, 2);
  EXPECT_EQ(n.degrees, (DegreePair{3, 2}));
  EXPECT_TRUE(n.conjugated.plus);
  EXPECT_FALSE(n.conjugated.minus);
}
