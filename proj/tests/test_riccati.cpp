#include <gtest/gtest.h>

#include <cmath>

#include "longevity/riccati.h"

using namespace longevity;

namespace {

const CointegrationDrift kDrift{1e-4, 1e-4, 0.5, 0.6, 1.0, 0.6};
const KernelMatrix kKernels{{0.83, 1.0}, {0.5, 1.0}, 1.0};

double sup_diff_coarse(const GridFn& coarse, const GridFn& fine) {
  double m = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) m = std::max(m, std::abs(coarse[j] - fine[2 * j]));
  return m;
}

}  // namespace

TEST(Riccati, MarkovianLongevityExponent) {
  TimeGrid g(0.01, 1000);
  RiccatiProblem p{{-1.0, 0.0}, kDrift, {{0.5, 1.0}, {0.5, 1.0}, 1.0}, std::nullopt};
  RiccatiSolution s = solve_riccati(p, g);
  for (int n = 0; n <= g.n_steps; ++n) {
    double t = g.t(n);
    EXPECT_NEAR(s.psi1[n], (std::exp(-0.5 * t) - 1.0) / 0.5, 1e-6);
    EXPECT_EQ(s.psi2[n], 0.0);
  }
}

TEST(Riccati, MarkovianTimeSteppingConverges) {
  TimeGrid g(0.01, 500);
  RiccatiProblem p{{-1.0, 0.0}, kDrift, {{0.5, 1.0}, {0.5, 1.0}, 1.0}, std::nullopt};
  RiccatiSolution s = solve_riccati(p, g, {RiccatiScheme::time_stepping});
  for (int n = 0; n <= g.n_steps; ++n)
    EXPECT_NEAR(s.psi1[n], (std::exp(-0.5 * g.t(n)) - 1.0) / 0.5, 1e-5);
}

TEST(Riccati, ZeroForcingGivesZero) {
  TimeGrid g(0.01, 200);
  for (auto scheme : {RiccatiScheme::automatic, RiccatiScheme::time_stepping}) {
    RiccatiSolution s = solve_riccati({{0.0, 0.0}, kDrift, kKernels, Vec2{0.01, 0.02}}, g, {scheme});
    for (std::size_t j = 0; j < g.size(); ++j) {
      EXPECT_EQ(s.psi1[j], 0.0);
      EXPECT_EQ(s.psi2[j], 0.0);
    }
  }
}

TEST(Riccati, LinearSolutionIsForcingTimesETheta) {
  TimeGrid g(0.01, 1000);
  RiccatiProblem p{{0.0, -1.0}, kDrift, kKernels, std::nullopt};
  RiccatiSolution s = solve_riccati(p, g);
  ThetaResolvents closed = e_theta(kDrift, kKernels, g);
  ThetaResolvents numeric = e_theta(kDrift, kKernels, g, ResolventMethod::numeric);
  RiccatiSolution stepped = solve_riccati(p, g, {RiccatiScheme::time_stepping});
  double to_numeric = 0.0, to_stepped = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(s.psi1[j], -closed.e_int[j].a21, 1e-12);
    EXPECT_NEAR(s.psi2[j], -closed.e_int[j].a22, 1e-12);
    to_numeric = std::max({to_numeric, std::abs(s.psi1[j] + numeric.e_int[j].a21),
                           std::abs(s.psi2[j] + numeric.e_int[j].a22)});
    to_stepped = std::max({to_stepped, std::abs(s.psi1[j] - stepped.psi1[j]), std::abs(s.psi2[j] - stepped.psi2[j])});
  }
  EXPECT_LE(to_numeric, 1e-5);
  EXPECT_LE(to_stepped, 1e-4);
}

TEST(Riccati, LinearSolutionSatisfiesTheEquation) {
  // psi - (f - psi Theta) * K evaluated with the product trapezoid
  TimeGrid g(0.005, 2000);
  RiccatiProblem p{{0.0, -1.0}, kDrift, kKernels, std::nullopt};
  RiccatiSolution s = solve_riccati(p, g);
  GridFn g1(g), g2(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    g1[j] = -(s.psi1[j] * kDrift.theta1 + s.psi2[j] * kDrift.beta2);
    g2[j] = -1.0 - s.psi2[j] * kDrift.theta2;
  }
  auto rhs = convolve(std::array<GridFn, 2>{g1, g2}, kKernels);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(s.psi1[j], rhs[0][j], 1e-5);
    EXPECT_NEAR(s.psi2[j], rhs[1][j], 1e-5);
  }
}

TEST(Riccati, VanishingQuadraticTermIsLinear) {
  TimeGrid g(0.01, 300);
  RiccatiProblem lin{{-1.0, -1.0}, kDrift, kKernels, std::nullopt};
  RiccatiProblem quad = lin;
  quad.quad_coeffs = Vec2{0.0, 0.0};
  for (auto scheme : {RiccatiScheme::automatic, RiccatiScheme::time_stepping}) {
    RiccatiSolution a = solve_riccati(lin, g, {scheme}), b = solve_riccati(quad, g, {scheme});
    for (std::size_t j = 0; j < g.size(); ++j) {
      EXPECT_EQ(a.psi1[j], b.psi1[j]);
      EXPECT_EQ(a.psi2[j], b.psi2[j]);
    }
  }
}

TEST(Riccati, QuadraticRefinementIsFirstOrderOrBetter) {
  RiccatiProblem p{{-1.0, -1.0}, kDrift, kKernels, Vec2{0.04, 0.01}};
  RiccatiSolution a = solve_riccati(p, TimeGrid(0.02, 500));
  RiccatiSolution b = solve_riccati(p, TimeGrid(0.01, 1000));
  RiccatiSolution c = solve_riccati(p, TimeGrid(0.005, 2000));
  double d1 = std::max(sup_diff_coarse(a.psi1, b.psi1), sup_diff_coarse(a.psi2, b.psi2));
  double d2 = std::max(sup_diff_coarse(b.psi1, c.psi1), sup_diff_coarse(b.psi2, c.psi2));
  EXPECT_GT(d1 / d2, 1.8) << d1 << " " << d2;
}

TEST(Riccati, QuadraticMatchesMarkovianRiccatiOde) {
  // K = 1: psi' = -1 - theta psi + q/2 psi^2, solved in closed form
  const double theta = 0.5, q = 0.3;
  TimeGrid g(0.01, 1000);
  CointegrationDrift d{0, 0, theta, 0.6, 0.0, 0.0};
  RiccatiSolution s = solve_riccati({{-1.0, 0.0}, d, {{0.5, 1.0}, {0.5, 1.0}, 0.0}, Vec2{q, 0.0}}, g);
  const double gam = std::sqrt(theta * theta + 2.0 * q);
  for (int n = 0; n <= g.n_steps; n += 50) {
    double e = std::exp(gam * g.t(n)) - 1.0;
    double exact = -2.0 * e / ((gam + theta) * e + 2.0 * gam);
    EXPECT_NEAR(s.psi1[n], exact, 1e-5);
  }
}

TEST(Riccati, DiagonalComponentsAreNonPositiveAndMonotone) {
  TimeGrid g(0.01, 1000);
  for (auto quad : {std::optional<Vec2>{}, std::optional<Vec2>{Vec2{0.04, 0.01}}}) {
    RiccatiSolution a = solve_riccati({{-1.0, 0.0}, kDrift, kKernels, quad}, g);
    RiccatiSolution b = solve_riccati({{0.0, -1.0}, kDrift, kKernels, quad}, g);
    for (int n = 1; n <= g.n_steps; ++n) {
      EXPECT_LT(a.psi1[n], 0.0);
      EXPECT_LT(b.psi2[n], 0.0);
      EXPECT_LE(b.psi2[n], b.psi2[n - 1]);
      // the H1 = 0.83 resolvent changes sign near t = 4.8, after which psi1 turns back
      if (g.t(n) <= 4.5) EXPECT_LE(a.psi1[n], a.psi1[n - 1]);
    }
  }
}

TEST(Riccati, MarkovianSolutionIsMonotone) {
  TimeGrid g(0.01, 1000);
  KernelMatrix markov{{0.5, 1.0}, {0.5, 1.0}, 1.0};
  RiccatiSolution a = solve_riccati({{-1.0, -1.0}, kDrift, markov, Vec2{0.04, 0.01}}, g);
  for (int n = 1; n <= g.n_steps; ++n) {
    EXPECT_LE(a.psi2[n], a.psi2[n - 1]);
    EXPECT_LT(a.psi2[n], 0.0);
  }
}

TEST(Riccati, CrossComponentChangesSignUnderCointegration) {
  // psi1 = -int E21 and E21 turns negative once the beta2 feedback dominates
  TimeGrid g(0.01, 1000);
  RiccatiSolution s = solve_riccati({{0.0, -1.0}, kDrift, {{0.5, 1.0}, {0.5, 1.0}, 1.0}, std::nullopt}, g);
  EXPECT_LT(s.psi1[50], 0.0);
  EXPECT_GT(s.psi1[1000], 0.0);
}

TEST(Riccati, BlowUpIsReported) {
  TimeGrid g(0.01, 500);
  RiccatiProblem p{{1.0, 0.0}, {0, 0, 0.1, 0.6, 0, 0}, {{0.83, 1.0}, {0.5, 1.0}, 0.0}, Vec2{50.0, 0.0}};
  EXPECT_THROW(solve_riccati(p, g), std::runtime_error);
  EXPECT_THROW(solve_riccati({{-1, 0}, kDrift, kKernels, Vec2{-1.0, 0.0}}, g), std::invalid_argument);
}

TEST(Riccati, IntegralTablesMatchTrapezoid) {
  TimeGrid g(0.01, 500);
  RiccatiSolution s = solve_riccati({{-1.0, -1.0}, kDrift, kKernels, std::nullopt}, g);
  auto i1 = cumulative_trapezoid(s.psi1.values, g.step);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(s.int1[j], i1[j], 1e-5);
}
