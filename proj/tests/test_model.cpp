#include <gtest/gtest.h>

#include <cmath>

#include "fraclab/errors.hpp"
#include "fraclab/model.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace fraclab;

namespace {

const GridSpec kGrid = GridSpec::interval(-1.0, 1.0, 128);

}  // namespace

TEST(Nonlinearity, PowerClosedForms) {
  const auto f = Nonlinearity::power(4.0, 2.0);
  const Point x{0.3, 0.0};
  for (double u : {-3.0, -0.5, 0.0, 0.25, 2.0}) {
    EXPECT_DOUBLE_EQ(f.f(x, u), 2.0 * u * u * u);
    EXPECT_DOUBLE_EQ(f.F(x, u), 0.5 * std::pow(u, 4));
    EXPECT_NEAR(f.df(x, u), 6.0 * u * u, 1e-12);
    // f(u) u - 2 F(u) = lambda u^4 / 2.
    EXPECT_NEAR(f.f(x, u) * u - 2.0 * f.F(x, u), std::pow(u, 4), 1e-12);
  }
  EXPECT_TRUE(f.is_single_power());
  EXPECT_DOUBLE_EQ(f.p(), 4.0);
}

TEST(Nonlinearity, PowerSumReportsLargestExponent) {
  const auto f = Nonlinearity::power_sum({{3.0, 1.0, {}}, {4.5, 0.5, {}}});
  EXPECT_DOUBLE_EQ(f.p(), 4.5);
  EXPECT_FALSE(f.is_single_power());
  EXPECT_THROW(Nonlinearity::power_sum({}), RangeError);
  EXPECT_THROW(Nonlinearity::power(1.5), RangeError);
}

TEST(Nonlinearity, CustomDerivativeFallsBackToDifferences) {
  const auto f = Nonlinearity::custom([](const Point&, double u) { return u * u * u + 0.1 * u * u * std::abs(u); },
                                      [](const Point&, double u) { return 0.25 * std::pow(u, 4) + 0.025 * std::pow(std::abs(u), 4); },
                                      4.0);
  const Point x{};
  for (double u : {-1.5, 0.7, 2.0}) {
    EXPECT_NEAR(f.df(x, u), 3.0 * u * u + 0.3 * u * std::abs(u), 1e-6 * (1.0 + u * u));
  }
}

TEST(FIntegral, ZeroAndUnitMeasureConstant) {
  const auto f = Nonlinearity::power(4.0);
  EXPECT_EQ(F_integral(Field(kGrid), f), 0.0);
  // Unit-measure box; the nodal rule misses one cell next to the boundary.
  const auto unit = GridSpec::interval(0.0, 1.0, 400);
  const Field one(unit, Eigen::VectorXd::Ones(unit.size()));
  EXPECT_NEAR(F_integral(one, f), 0.25, 0.25 * 2.0 * unit.h());
}

TEST(FIntegral, FirstOrderQuadratureConvergence) {
  const auto f = Nonlinearity::power(3.0);
  double prev_err = 0.0;
  for (int n : {99, 199, 399, 799}) {
    const auto grid = GridSpec::interval(0.0, 1.0, n);
    const Field one(grid, Eigen::VectorXd::Ones(grid.size()));
    const double err = std::abs(F_integral(one, f) - 1.0 / 3.0);
    if (prev_err > 0.0) EXPECT_NEAR(prev_err / err, 2.0, 0.05) << "n=" << n;
    prev_err = err;
  }
}

TEST(FIntegral, DirectionalDerivativeIsThePairing) {
  const auto f = Nonlinearity::power_sum({{3.0, 1.0, {}}, {4.0, 0.5, {}}});
  const auto uv = oracle::random_vector(static_cast<std::size_t>(kGrid.size()), 11);
  const auto vv = oracle::random_vector(static_cast<std::size_t>(kGrid.size()), 12);
  const Field u(kGrid, Eigen::Map<const Eigen::VectorXd>(uv.data(), kGrid.size()));
  const Field v(kGrid, Eigen::Map<const Eigen::VectorXd>(vv.data(), kGrid.size()));
  const double eps = 1e-5;
  const double fd = (F_integral(Field(kGrid, u.values() + eps * v.values()), f) -
                     F_integral(Field(kGrid, u.values() - eps * v.values()), f)) /
                    (2.0 * eps);
  const double exact = f_pairing(u, v, f);
  EXPECT_NEAR(fd, exact, 1e-6 * std::abs(exact));
}

TEST(Assumptions, DefaultModelPassesEverything) {
  const auto report = check_assumptions(Potential::constant(1.0), Nonlinearity::power(4.0), kGrid, {});
  EXPECT_TRUE(report.all_passed());
  for (const char* name : {"V", "F1", "F2", "F3", "F4", "growth_bound"}) {
    const auto* check = report.find(name);
    ASSERT_NE(check, nullptr) << name;
    EXPECT_TRUE(check->passed) << name << ": " << check->detail;
  }
  EXPECT_EQ(report.samples, 10000u);
}

TEST(Assumptions, GrowthConstantOfCubic) {
  // max over |u| <= 10 of |u|^3 / (1 + |u|^3) lies just below 1.
  const auto report = check_assumptions(Potential::constant(1.0), Nonlinearity::power(4.0), kGrid, {});
  EXPECT_GE(report.growth_constant, 0.9);
  EXPECT_LE(report.growth_constant, 1.1);
}

TEST(Assumptions, QuadraticPowerFailsStrictMonotonicityWithWitness) {
  const auto report = check_assumptions(Potential::constant(1.0), Nonlinearity::power(2.0), kGrid, {});
  const auto* f4 = report.find("F4");
  ASSERT_NE(f4, nullptr);
  EXPECT_FALSE(f4->passed);
  EXPECT_FALSE(f4->witnesses.empty());
  EXPECT_LE(f4->witnesses.size(), 5u);
  EXPECT_FALSE(report.all_passed());
}

TEST(Assumptions, NonpositivePotentialFails) {
  const auto report = check_assumptions(Potential::constant(0.0), Nonlinearity::power(4.0), kGrid, {});
  EXPECT_FALSE(report.find("V")->passed);
}

TEST(Assumptions, ExponentOutsideGrowthWindowFails) {
  CheckOptions options;
  options.dimension = 2;  // window (2, 4)
  const auto report = check_assumptions(Potential::constant(1.0), Nonlinearity::power(5.0), kGrid, options);
  EXPECT_FALSE(report.find("F1")->passed);
  EXPECT_DOUBLE_EQ(growth_window_upper(2), 4.0);
  EXPECT_DOUBLE_EQ(growth_window_upper(3), 3.0);
  EXPECT_TRUE(std::isinf(growth_window_upper(1)));
}

TEST(Assumptions, AmbrosettiRabinowitzConsequenceOnPassingModels) {
  const auto f = Nonlinearity::power_sum({{3.0, 1.0, {}}, {5.0, 2.0, {}}});
  const auto report = check_assumptions(Potential::constant(1.0), f, kGrid, {});
  ASSERT_TRUE(report.find("F4")->passed);
  const Point x{};
  for (double u = -10.0; u <= 10.0; u += 0.01) ASSERT_GE(f.f(x, u) * u - 2.0 * f.F(x, u), 0.0) << "u=" << u;
}

TEST(Assumptions, DeterministicGivenSeed) {
  CheckOptions options;
  options.seed = 42;
  const auto a = to_json(check_assumptions(Potential::constant(1.0), Nonlinearity::power(2.0), kGrid, options));
  const auto b = to_json(check_assumptions(Potential::constant(1.0), Nonlinearity::power(2.0), kGrid, options));
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  EXPECT_TRUE(j.contains("checks"));
}

TEST(Assumptions, RejectsTooFewSamples) {
  CheckOptions options;
  options.samples = 10;
  EXPECT_THROW(check_assumptions(Potential::constant(1.0), Nonlinearity::power(4.0), kGrid, options), RangeError);
}

TEST(Potential, QuadraticBoundsOverBox) {
  const auto grid = GridSpec::square(-1.0, 1.0, 8);
  const auto V = Potential::quadratic(0.5, 2.0, grid);
  EXPECT_DOUBLE_EQ(V.v_min(), 0.5);
  EXPECT_DOUBLE_EQ(V.v_max(), 0.5 + 2.0 * 2.0);
  EXPECT_DOUBLE_EQ(V(Point{0.0, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(V(Point{1.0, 1.0}), 4.5);
}
