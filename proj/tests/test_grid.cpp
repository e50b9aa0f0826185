#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <vortex2c/grid.hpp>

using namespace vortex2c;

namespace {

std::vector<double> sample(const RadialGrid& g, auto&& fn) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g.r(i));
  return v;
}

// largest |row residual| over interior nodes with r in [r_lo, r_hi]
double interior_error(const RadialGrid& g, const RadialOperator& op, const std::vector<double>& u, auto&& exact,
                      double r_lo, double r_hi) {
  double e = 0.0;
  for (std::size_t i = 1; i < g.last(); ++i) {
    if (g.r(i) < r_lo || g.r(i) > r_hi) continue;
    e = std::max(e, std::abs(op.apply_row(u, i) - exact(g.r(i))));
  }
  return e;
}

}  // namespace

TEST(BuildGrid, UniformNodes) {
  const auto g = build_grid(10, 100);
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g.r(0), 0.0);
  for (std::size_t i = 0; i <= 100; ++i) EXPECT_NEAR(g.r(i), 0.1 * double(i), 1e-13);
  EXPECT_EQ(g.r(100), 10.0);
  EXPECT_EQ(g.nearest(3.04), 30u);
  EXPECT_EQ(g.nearest(3.06), 31u);
  EXPECT_EQ(g.nearest(-1), 0u);
  EXPECT_EQ(g.nearest(99), 100u);
}

TEST(BuildGrid, GeometricNodesIncreaseAndEndAtRmax) {
  const auto g = build_grid(80, 400, GridKind::geometric, 1.01);
  EXPECT_EQ(g.r(0), 0.0);
  EXPECT_EQ(g.r(g.last()), 80.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g.r(i), g.r(i - 1));
  EXPECT_LT(g.spacing(0), g.spacing(g.last() - 1));
  EXPECT_NEAR(g.spacing(11) / g.spacing(10), 1.01, 1e-10);
}

TEST(BuildGrid, RejectsBadSpecs) {
  EXPECT_THROW(build_grid(0, 100), BadGridSpec);
  EXPECT_THROW(build_grid(-1, 100), BadGridSpec);
  EXPECT_THROW(build_grid(INFINITY, 100), BadGridSpec);
  EXPECT_THROW(build_grid(10, 15), BadGridSpec);
  EXPECT_THROW(build_grid(10, 100, GridKind::geometric, 1.0), BadGridSpec);
  EXPECT_THROW(build_grid(10, 100, GridKind::geometric, 1.2), BadGridSpec);
}

TEST(Quadrature, WeightsSumExactly) {
  for (const auto& g : {build_grid(10, 100), build_grid(80, 4000), build_grid(37.5, 333),
                        build_grid(50, 500, GridKind::geometric, 1.005)}) {
    double s = 0.0;
    for (double w : g.weights()) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    const double R = g.r_max();
    EXPECT_NEAR(s, R * R / 2, 1e-12 * R * R / 2);
  }
  EXPECT_NEAR(quadrature(build_grid(10, 100), std::vector<double>(101, 1.0)), 50.0, 1e-12);
}

TEST(Quadrature, SecondOrderOnSmoothIntegrand) {
  // integral of r^2 * r over [0, 10] is 10^4 / 4
  double prev = 0.0;
  for (int N : {100, 200, 400, 800}) {
    const auto g = build_grid(10, N);
    const double err = std::abs(quadrature(g, sample(g, [](double r) { return r * r; })) - 2500.0);
    EXPECT_LT(err, 2500.0 * 0.02 * (100.0 / N) * (100.0 / N));
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
  // a Gaussian, integral of exp(-r^2) r dr = (1 - exp(-R^2)) / 2
  prev = 0.0;
  for (int N : {50, 100, 200, 400}) {
    const auto g = build_grid(4, N);
    const double err = std::abs(quadrature(g, sample(g, [](double r) { return std::exp(-r * r); })) -
                                0.5 * (1 - std::exp(-16.0)));
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.3);
    }
    prev = err;
  }
}

TEST(Quadrature, LinearAndPositive) {
  const auto g = build_grid(10, 128);
  const auto a = sample(g, [](double r) { return std::cos(r) + 2; });
  const auto b = sample(g, [](double r) { return r * std::exp(-r); });
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 3 * a[i] - 0.5 * b[i];
  EXPECT_NEAR(quadrature(g, c), 3 * quadrature(g, a) - 0.5 * quadrature(g, b), 1e-12);
  EXPECT_GT(quadrature(g, a), 0.0);
  EXPECT_GT(quadrature(g, b), 0.0);
}

TEST(Quadrature, LengthMismatch) {
  const auto g = build_grid(10, 100);
  EXPECT_THROW(quadrature(g, std::vector<double>(100, 1.0)), LengthMismatch);
}

TEST(RadialOperator, BoundaryConditionValidation) {
  const auto g = build_grid(10, 100);
  EXPECT_THROW(radial_operator(g, 0, ZeroBc::dirichlet, FarBc::robin(0)), BadBoundarySpec);
  EXPECT_THROW(radial_operator(g, 1, ZeroBc::neumann, FarBc::robin(0)), BadBoundarySpec);
  EXPECT_THROW(radial_operator(g, -1, ZeroBc::dirichlet, FarBc::robin(0)), BadBoundarySpec);
  EXPECT_EQ(natural_zero_bc(0), ZeroBc::neumann);
  EXPECT_EQ(natural_zero_bc(3), ZeroBc::dirichlet);
}

TEST(RadialOperator, ConstantsAreHarmonic) {
  const auto g = build_grid(10, 100);
  const auto op = radial_operator(g, 0, ZeroBc::neumann, FarBc::dirichlet(2.5));
  const std::vector<double> u(g.size(), 2.5);
  const auto out = op.apply(u);
  for (double v : out) EXPECT_EQ(v, 0.0);
}

TEST(RadialOperator, KernelPowersVanishToSecondOrder) {
  // pointwise truncation is O(h^2 / r): second order on r >= 1, first order in the first cells
  for (int n = 0; n <= 3; ++n) {
    double prev = 0.0, prev_near = 0.0;
    for (int N : {200, 400, 800}) {
      const auto g = build_grid(4, N);
      const auto op = radial_operator(g, n, natural_zero_bc(n), FarBc::dirichlet(std::pow(4.0, n)));
      const auto u = sample(g, [n](double r) { return std::pow(r, n); });
      double err = 0.0, near = 0.0;
      for (std::size_t i = 1; i < g.last(); ++i) {
        const double e = std::abs(op.apply_row(u, i)) / std::max(1.0, std::pow(g.r(i), n - 2));
        double& slot = g.r(i) >= 1.0 ? err : near;
        slot = std::max(slot, e);
      }
      const double h = 4.0 / N;
      EXPECT_LT(err, 5 * h * h) << "n=" << n << " N=" << N;
      EXPECT_LT(near, 5 * h) << "n=" << n << " N=" << N;
      if (n == 3 && prev > 0) {
        EXPECT_NEAR(prev / err, 4.0, 0.3);
        EXPECT_NEAR(prev_near / near, 2.0, 0.2);
      }
      prev = err;
      prev_near = near;
    }
  }
}

TEST(RadialOperator, SecondOrderOnManufacturedSolution) {
  // u = r exp(-r^2): -(1/r)(r u')' + u/r^2 = (8r - 4r^3) exp(-r^2)
  auto u_fn = [](double r) { return r * std::exp(-r * r); };
  auto lu = [](double r) { return (8 * r - 4 * r * r * r) * std::exp(-r * r); };
  double prev = 0.0;
  for (int N : {100, 200, 400, 800}) {
    const auto g = build_grid(5, N);
    const auto op = radial_operator(g, 1, ZeroBc::dirichlet, FarBc::dirichlet(u_fn(5)));
    const double err = interior_error(g, op, sample(g, u_fn), lu, 1.0, 5.0);
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.4) << N;
    }
    prev = err;
  }

  // n = 0: u = exp(-r^2), -(1/r)(r u')' = (4 - 4r^2) exp(-r^2); includes the r = 0 row
  auto v_fn = [](double r) { return std::exp(-r * r); };
  auto lv = [](double r) { return (4 - 4 * r * r) * std::exp(-r * r); };
  prev = 0.0;
  for (int N : {100, 200, 400, 800}) {
    const auto g = build_grid(5, N);
    const auto op = radial_operator(g, 0, ZeroBc::neumann, FarBc::dirichlet(v_fn(5)));
    const auto v = sample(g, v_fn);
    double err = std::abs(op.apply_row(v, 0) - lv(0));
    err = std::max(err, interior_error(g, op, v, lv, 0.0, 5.0));
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.4) << N;
    }
    prev = err;
  }
}

TEST(RadialOperator, SymmetricInWeightedInnerProduct) {
  for (const auto& g : {build_grid(10, 200), build_grid(20, 300, GridKind::geometric, 1.01)}) {
    const auto op = radial_operator(g, 2, ZeroBc::dirichlet, FarBc::robin(-2.0));
    for (std::size_t i = 1; i + 2 < g.size(); ++i) {
      const auto a = op.row(i), b = op.row(i + 1);
      EXPECT_NEAR(g.weight(i) * a.super, g.weight(i + 1) * b.sub, 1e-12 * std::abs(g.weight(i) * a.super));
    }
  }
}

TEST(RadialOperator, PositiveSemidefiniteWithDirichletRows) {
  const auto g = build_grid(6, 120);
  const auto op = radial_operator(g, 1, ZeroBc::dirichlet, FarBc::dirichlet(0.0));
  std::vector<double> u(g.size());
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(0.37 * (trial + 1) * double(i) + trial);
    u.front() = 0;
    u.back() = 0;
    const auto lu = op.apply(u);
    double form = 0.0;
    for (std::size_t i = 1; i < g.last(); ++i) form += g.weight(i) * u[i] * lu[i];
    EXPECT_GE(form, 0.0);
  }
}

TEST(RadialOperator, RobinRowMatchesTailDerivative) {
  // u = t + a/r^2 satisfies u'(R) = -2a/R^3 exactly
  const double t = 1.3, a = -0.7, R = 40;
  auto u_fn = [&](double r) { return r == 0 ? 0.0 : t + a / (r * r); };
  double prev = 0.0;
  for (int N : {400, 800, 1600}) {
    const auto g = build_grid(R, N);
    const auto op = radial_operator(g, 1, ZeroBc::dirichlet, FarBc::robin(a));
    const auto u = sample(g, u_fn);
    const std::size_t last = g.last();
    // the half cell at R_max: (flux_in - R u'(R)) / V = -(1/r)(r u')' + O(h)
    const double row = op.apply_row(u, last) - u[last] / (R * R);
    const double exact = -4 * a / (R * R * R * R);
    const double err = std::abs(row - exact);
    if (prev > 0) {
      EXPECT_LT(err, prev * 0.6);
    }
    prev = err;
  }
}

TEST(Derivative, SecondOrderEverywhere) {
  auto f = [](double r) { return std::sin(r) + r * r; };
  auto df = [](double r) { return std::cos(r) + 2 * r; };
  double prev = 0.0;
  for (int N : {50, 100, 200}) {
    const auto g = build_grid(3, N);
    const auto d = derivative(g, sample(g, f));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(d[i] - df(g.r(i))));
    if (prev > 0) {
      EXPECT_NEAR(prev / err, 4.0, 0.5);
    }
    prev = err;
  }
}
