#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dem/error.hpp"
#include "dem/inequalities.hpp"
#include "dem/ode.hpp"
#include "fixtures.hpp"

namespace {

using namespace dem;
using dem::testing::json;
using dem::testing::make_spec;

constexpr double kMargin1e3 = 0.0221671682967919507;   // 3 e^2 10^-3
constexpr double kSigma1e3 = 1.97783283170320805;      // 2 - 3 e^2 10^-3
constexpr double kSigma1e4 = 1.99778328317032080;      // 2 - 3 e^2 10^-4
constexpr double kPoisson1[6] = {0.367879441171442322, 0.367879441171442322,
                                 0.183939720585721161, 0.0613132401952403869,
                                 0.0153283100488100967, 0.00306566200976201935};

DriftFn decay() {
  return [](double, std::span<const double> y, std::span<double> out) { out[0] = -y[0]; };
}

double decay_error(std::int64_t steps) {
  const std::vector<double> y0{1.0};
  const auto path = rk4_integrate(decay(), y0, 0.0, 1.0, steps);
  return std::abs(path.back() - std::exp(-1.0));
}

TEST(ComputeRT, BallsInBinsBox) {
  const auto spec = make_spec(dem::testing::balls_doc(10000, 0.001));
  const DriftBound rt = compute_RT(spec);
  EXPECT_EQ(rt.T, 1.0);
  EXPECT_EQ(rt.resolution, kRGridResolution);
  EXPECT_NEAR(rt.grid_max, 1.1, 1e-15);
  EXPECT_NEAR(rt.mesh, 1.05 / 63.0, 1e-15);
  EXPECT_NEAR(rt.R, 1.1 + 1.05 / 63.0, 1e-14);
}

TEST(ComputeRT, ZeroDriftUsesFloor) {
  const auto spec = make_spec(dem::testing::zero_doc(100, 0.01, {0.5}, 1.0, {0.0}, {1.0}));
  EXPECT_EQ(compute_RT(spec).R, 1.0);
}

TEST(ComputeRT, DegreeProcessSingleClass) {
  json doc = dem::testing::degree_doc(1000, 0, 0.01);
  doc["L"] = 2.0;
  doc["domain"] = dem::testing::box(-0.05, 1.0, {-0.05}, {1.05});
  const DriftBound rt = compute_RT(make_spec(doc));
  EXPECT_EQ(rt.T, 1.0);
  EXPECT_NEAR(rt.grid_max, 2.1, 1e-14);
  EXPECT_NEAR(rt.R, 2.1 + 2.0 * 1.1 / 63.0, 1e-13);
}

TEST(ComputeRT, GridShrinksInHighDimension) {
  const DriftBound rt = compute_RT(make_spec(dem::testing::degree_doc(1000, 3, 0.01)));
  EXPECT_LT(rt.resolution, kRGridResolution);
  double points = 1.0;
  for (int d = 0; d < 5; ++d) points *= rt.resolution;
  EXPECT_LE(points, static_cast<double>(kMaxRGridPoints));
}

TEST(Rk4, ExponentialDecayAccuracy) { EXPECT_LT(decay_error(1000), 1e-10); }

TEST(Rk4, FourthOrderConvergence) {
  for (std::int64_t steps : {10, 20}) {
    const double ratio = decay_error(steps) / decay_error(2 * steps);
    EXPECT_GE(ratio, 14.0) << steps;
    EXPECT_LE(ratio, 18.0) << steps;
  }
}

TEST(SolveOde, ExponentialDecay) {
  const auto spec = make_spec(dem::testing::balls_doc(100000, 1e-4, 1.2, -0.1, 0.05, 1.1));
  const OdeSolution sol = solve_ode(spec);
  ASSERT_GE(sol.sigma(), 1.0);
  EXPECT_EQ(sol.value(0, 0), 1.0);
  EXPECT_NEAR(sol.at(1.0)[0], std::exp(-1.0), 1e-10);
}

TEST(SolveOde, ZeroDriftIsConstant) {
  const auto spec =
      make_spec(dem::testing::zero_doc(100, 1e-4, {0.3, 0.7}, 1.0, {0.0, 0.0}, {1.0, 1.0}));
  const OdeSolution sol = solve_ode(spec);
  for (std::size_t j = 0; j < sol.size(); ++j) {
    ASSERT_EQ(sol.value(j, 0), 0.3);
    ASSERT_EQ(sol.value(j, 1), 0.7);
  }
}

TEST(SolveOde, DegreeProcessPoissonProfile) {
  const auto spec = make_spec(dem::testing::degree_doc(10000, 5, 1e-4));
  const OdeSolution sol = solve_ode(spec);
  ASSERT_GE(sol.sigma(), 0.5);
  const auto y = sol.at(0.5);
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(y[k], kPoisson1[k], 1e-8) << k;
}

TEST(SolveOde, StepCountRule) {
  EXPECT_EQ(ode_step_count(1.0, 100), 2048);
  EXPECT_EQ(ode_step_count(2.0, 10000), 20000);
  EXPECT_EQ(ode_step_count(1.0, 100000000), std::int64_t{1} << 20);
}

TEST(Sigma, BallsInBinsTimeFaceBinds) {
  for (auto [lambda, expected] : {std::pair{1e-3, kSigma1e3}, std::pair{1e-4, kSigma1e4}}) {
    const auto spec = make_spec(dem::testing::balls_doc(10000, lambda, 2.0));
    const OdeSolution sol = solve_ode(spec);
    EXPECT_LE(std::abs(sol.sigma() - expected), sol.step() * (1 + 1e-9)) << lambda;
    EXPECT_LE(sol.sigma(), expected);
  }
  const auto spec = make_spec(dem::testing::balls_doc(10000, 1e-3, 2.0));
  EXPECT_NEAR(solve_ode(spec).constants().margin, kMargin1e3, 1e-16);
}

TEST(Sigma, HugeMarginGivesZero) {
  const auto spec = make_spec(dem::testing::balls_doc(10000, 0.01, 2.0));
  const OdeSolution sol = solve_ode(spec);
  EXPECT_EQ(sol.sigma(), 0.0);
  EXPECT_EQ(sol.size(), 1u);
}

TEST(Sigma, ConstantSolutionStopsAtTimeFace) {
  const auto spec =
      make_spec(dem::testing::zero_doc(10000, 1e-4, {0.5}, 1.0, {0.0}, {1.0}));
  const OdeSolution sol = solve_ode(spec);
  const double expected = 1.0 - 3.0 * 1e-4;
  EXPECT_LE(std::abs(sol.sigma() - expected), sol.step());
}

TEST(Sigma, ComputeSigmaOnHandGrid) {
  const Domain d(-1.0, 10.0, {0.0}, {1.0});
  const std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> values{0.5, 0.4, 0.05, 0.5};
  std::ptrdiff_t last = 0;
  EXPECT_EQ(compute_sigma(grid, values, 1, d, 0.1, &last), 1.0);
  EXPECT_EQ(last, 1);
  EXPECT_EQ(compute_sigma(grid, values, 1, d, 0.6, &last), 0.0);
  EXPECT_EQ(last, -1);
}

TEST(SolveOdeInvariant, MarginAndDriftBoundHold) {
  for (const json& doc : {dem::testing::balls_doc(10000, 1e-3, 2.0),
                          dem::testing::degree_doc(10000, 3, 5e-4),
                          dem::testing::greedy_doc(10000, 1e-3)}) {
    const auto spec = make_spec(doc);
    const DriftBound rt = compute_RT(spec);
    const OdeSolution sol = solve_ode(spec, rt.R, rt.T);
    const auto& c = sol.constants();
    EXPECT_LE(c.sigma, c.T);
    EXPECT_GE(c.R, 1.0);
    for (std::size_t j = 0; j < sol.size(); ++j) {
      ASSERT_GE(spec.domain().boundary_distance(sol.grid()[j], sol.row(j)), c.margin);
      if (j + 1 < sol.size()) {
        const double dt = sol.grid()[j + 1] - sol.grid()[j];
        ASSERT_GT(dt, 0.0);
        for (std::size_t k = 0; k < sol.dimension(); ++k) {
          ASSERT_LE(std::abs(sol.value(j + 1, k) - sol.value(j, k)), c.R * dt * (1 + 1e-12));
        }
      }
    }
    EXPECT_EQ(sol.grid().back(), c.sigma);
  }
}

TEST(SolveOde, InterpolationBetweenGridPoints) {
  const auto spec = make_spec(dem::testing::balls_doc(1000, 1e-3, 1.0));
  const OdeSolution sol = solve_ode(spec);
  const double t = 0.5 * (sol.grid()[10] + sol.grid()[11]);
  EXPECT_NEAR(sol.at(t)[0], 0.5 * (sol.value(10, 0) + sol.value(11, 0)), 1e-15);
  EXPECT_NEAR(sol.at(t)[0], std::exp(-t), sol.interpolation_error_bound());
  EXPECT_THROW(sol.at(sol.sigma() + 0.01), InstanceError);
  EXPECT_THROW(sol.at(-0.01), InstanceError);
}

TEST(Admissibility, Examples) {
  const auto spec = make_spec(dem::testing::balls_doc(10000, 0.001));
  const Admissibility ok = check_lambda_admissible(spec, 1.1, 1.0);
  EXPECT_TRUE(ok.admissible);
  EXPECT_NEAR(ok.threshold, 1.1e-4, 1e-18);

  const auto edge = spec.with_lambda(1.1 / 10000.0);
  EXPECT_TRUE(check_lambda_admissible(edge, 1.1, 1.0).admissible);
  EXPECT_FALSE(check_lambda_admissible(spec.with_lambda(1e-4), 1.1, 1.0).admissible);
}

TEST(Admissibility, DeltaUsesShorterOfTAndInverseL) {
  json doc = dem::testing::balls_doc(10000, 0.5);
  doc["delta"] = 0.1;
  doc["L"] = 4.0;
  const auto spec = make_spec(doc);
  EXPECT_NEAR(check_lambda_admissible(spec, 2.0, 1.0).threshold, 0.1 * 0.25 + 2.0 / 1e4, 1e-15);
  doc["L"] = 0.0;
  EXPECT_NEAR(check_lambda_admissible(make_spec(doc), 2.0, 3.0).threshold, 0.3 + 2.0 / 1e4,
              1e-15);
}

TEST(Admissibility, TruncatedThreshold) {
  json doc = dem::testing::balls_doc(10000, 0.5);
  doc["delta"] = 0.1;
  doc["L"] = 2.0;
  doc["extensions"] = {{"gamma", 0.01}, {"B", 3.0}, {"x", 2.0}};
  const auto spec = make_spec(doc);
  const double expected = (0.1 + 0.03) * 0.5 + (1.5 + 6.0) / 1e4;
  EXPECT_NEAR(check_lambda_admissible(spec, 1.5, 1.0, true).threshold, expected, 1e-15);
  EXPECT_THROW(check_lambda_admissible(make_spec(dem::testing::balls_doc(100, 0.5)), 1.5, 1.0,
                                       true),
               InstanceError);
}

TEST(RangeCheck, Examples) {
  const auto balls = make_spec(dem::testing::balls_doc(10000, 1e-3, 2.0));
  const OdeSolution sol = solve_ode(balls);
  const std::vector<Interval> unit{{0.0, 1.0}};
  EXPECT_TRUE(range_check(sol, unit, 1e-3));
  const std::vector<Interval> narrow{{0.5, 1.0}};
  EXPECT_FALSE(range_check(sol, narrow, 1e-3));
  EXPECT_THROW(range_check(sol, unit, 0.02), InstanceError);
  EXPECT_THROW(range_check(sol, unit, 0.0), InstanceError);

  const auto flat = make_spec(dem::testing::zero_doc(100, 1e-3, {0.4}, 1.0, {0.0}, {1.0}));
  const std::vector<Interval> around{{0.4, 0.4}};
  EXPECT_TRUE(range_check(solve_ode(flat), around, 1e-3));
}

TEST(LipschitzDiagnostic, LowerBoundsTrueConstant) {
  const auto spec = make_spec(dem::testing::degree_doc(1000, 3, 0.01));
  const double est = estimate_lipschitz_lower_bound(spec, 7);
  EXPECT_LE(est, 4.0 + 1e-9);
  EXPECT_GT(est, 1.0);
}

json linear_doc(const std::vector<std::vector<double>>& A, const std::vector<double>& c,
                const std::vector<double>& y_hat, double L) {
  const std::size_t a = y_hat.size();
  return {{"schema", 1},
          {"n", 4096},
          {"drift", {{"plugin", "linear"}, {"params", {{"A", A}, {"c", c}}}}},
          {"L", L},
          {"delta", 0.0},
          {"beta", 1.0},
          {"lambda", 1e-6},
          {"y_hat", y_hat},
          {"domain", dem::testing::box(-0.1, 1.0, std::vector<double>(a, -20.0),
                                       std::vector<double>(a, 20.0))}};
}

TEST(StabilityProperty, PerturbedLinearSystemsStayWithinBound) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t a = 1 + trial % 3;
    std::vector<std::vector<double>> A(a, std::vector<double>(a));
    std::vector<double> c(a), y(a), c2(a), y2(a);
    double L = 0.0;
    for (std::size_t k = 0; k < a; ++k) {
      double row = 0.0;
      for (auto& v : A[k]) {
        v = 0.5 * u(rng);
        row += std::abs(v);
      }
      L = std::max(L, row);
    }
    const double lambda = 0.05 * std::abs(u(rng));
    const double delta = 0.05 * std::abs(u(rng));
    for (std::size_t k = 0; k < a; ++k) {
      c[k] = u(rng);
      y[k] = u(rng);
      c2[k] = c[k] + (u(rng) > 0 ? delta : -delta);
      y2[k] = y[k] + lambda * u(rng);
    }
    const OdeSolution s1 = solve_ode(make_spec(linear_doc(A, c, y, L)));
    const OdeSolution s2 = solve_ode(make_spec(linear_doc(A, c2, y2, L)));
    const std::size_t rows = std::min(s1.size(), s2.size());
    ASSERT_GT(rows, 1000u);
    for (std::size_t j = 0; j < rows; ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < a; ++k) {
        dist = std::max(dist, std::abs(s1.value(j, k) - s2.value(j, k)));
      }
      ASSERT_LE(dist, stability_bound(lambda, delta, L, s1.grid()[j]) + 1e-9) << trial << ' ' << j;
    }
  }
}

TEST(UniquenessProxy, RestartReproducesTail) {
  for (const json& doc :
       {dem::testing::balls_doc(10000, 1e-3, 2.0), dem::testing::degree_doc(10000, 3, 5e-4)}) {
    const auto spec = make_spec(doc);
    const OdeSolution sol = solve_ode(spec);
    const std::size_t mid = sol.size() / 2;
    const std::size_t last = sol.size() - 1;
    const DriftFn f = [&](double t, std::span<const double> y, std::span<double> out) {
      spec.drift().evaluate(t, y, out);
    };
    const auto tail = rk4_integrate(f, sol.row(mid), sol.grid()[mid], sol.grid()[last],
                                    static_cast<std::int64_t>(last - mid));
    const std::size_t a = sol.dimension();
    for (std::size_t j = mid; j <= last; ++j) {
      for (std::size_t k = 0; k < a; ++k) {
        ASSERT_NEAR(tail[(j - mid) * a + k], sol.value(j, k), 1e-9);
      }
    }
  }
}

}  // namespace
