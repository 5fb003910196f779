#include <gtest/gtest.h>

#include <cmath>

#include "longevity/simulation.h"

using namespace longevity;

namespace {

struct Moments {
  double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= x.size();
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, std::sqrt(s / (x.size() - 1) / x.size())};
}

RiccatiSolution psi_for(const MortalityParams& mp, const Vec2& f, const TimeGrid& g) {
  return solve_riccati({f, mp.drift, mp.kernels, mp.quad_coeffs()}, g);
}

// 10,000 paths at the default parameters on [0, 5]
const std::vector<PathBundle>& ensemble() {
  static const std::vector<PathBundle> paths =
      simulate_paths(MortalityParams{}, RateParams{}, TimeGrid(0.01, 500), 10000, 99);
  return paths;
}

double integral_mu(const PathBundle& p, const MortalityParams& mp, int i, int n) {
  return p.int_mu_hat[n][i] - mp.baseline.integral(0.0, p.grid.t(n));
}

// fourth-order Runge-Kutta on the CIR bond Riccati in time to maturity
RateCoefficients rk4_cir(const RateParams& rp, double tau, int steps) {
  const double h = tau / steps, a = rp.sigma * rp.sigma;
  auto f = [&](double d1) { return -1.0 - rp.theta_r * d1 + 0.5 * a * d1 * d1; };
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(d1), k2 = f(d1 + 0.5 * h * k1), k3 = f(d1 + 0.5 * h * k2), k4 = f(d1 + h * k3);
    const double l1 = rp.b_r * d1, l2 = rp.b_r * (d1 + 0.5 * h * k1), l3 = rp.b_r * (d1 + 0.5 * h * k2),
                 l4 = rp.b_r * (d1 + h * k3);
    d1 += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    d0 += h / 6.0 * (l1 + 2 * l2 + 2 * l3 + l4);
  }
  return {d0, d1};
}

}  // namespace

TEST(Laplace, TrivialCases) {
  MortalityParams mp;
  TimeGrid g(0.01, 500);
  EXPECT_DOUBLE_EQ(laplace_at_zero(mp, {0.0, 0.0}, g, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(laplace_at_zero(mp, {-1.0, 0.0}, g, 0.0), 1.0);
}

TEST(Laplace, AgreesWithFunctionalAtTimeZero) {
  MortalityParams mp;
  TimeGrid g(0.01, 500);
  for (Vec2 f : {Vec2{-1.0, 0.0}, Vec2{0.0, -1.0}}) {
    RiccatiSolution psi = psi_for(mp, f, g);
    ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
    ConditionalMean cm(mp, th);
    double y = functional_Y(mp, f, psi, cm, {mp.mu0}, 500);
    EXPECT_NEAR(std::exp(y), laplace_at_zero(mp, f, g, 5.0), 1e-10);
  }
}

TEST(FunctionalY, ZeroFunctional) {
  MortalityParams mp;
  TimeGrid g(0.01, 200);
  RiccatiSolution psi = psi_for(mp, {0.0, 0.0}, g);
  ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
  ConditionalMean cm(mp, th);
  EXPECT_EQ(functional_Y(mp, {0.0, 0.0}, psi, cm, {mp.mu0}, 200), 0.0);
}

TEST(FunctionalY, NoiselessMatchesFineDeterministicPath) {
  MortalityParams mp;
  mp.sigma = Mat2{0.0, 0.0, 0.0, 0.0};
  const Vec2 f{-1.0, -2.0};
  TimeGrid g(0.01, 500);
  RiccatiSolution psi = psi_for(mp, f, g);
  double y = laplace_exponent(mp, f, psi)[500];
  // the deterministic path on a 10x finer grid
  RateParams rp;
  PathBundle p = PathSimulator(mp, rp, TimeGrid(0.001, 5000)).simulate(1, 0);
  double oracle = f[0] * integral_mu(p, mp, 0, 5000) + f[1] * integral_mu(p, mp, 1, 5000);
  EXPECT_NEAR(y, oracle, 1e-3 * std::abs(oracle));
}

TEST(ConditionalMean, DriftlessReduction) {
  MortalityParams mp;
  mp.drift = {1e-3, 2e-3, 0.0, 0.0, 0.0, 0.0};
  mp.kernels = {{0.5, 1.0}, {0.5, 1.0}, 0.0};
  TimeGrid g(0.01, 100);
  ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
  ConditionalMean cm(mp, th);
  Vec2 w{0.0, 0.0};
  for (int n = 0; n < 40; ++n) {
    Vec2 eta{1e-4 * std::sin(n), -2e-4 * std::cos(3.0 * n)};
    cm.push(eta);
    w = w + eta;
  }
  for (int k = 40; k <= 100; ++k) {
    Vec2 expect = mp.mu0 + g.t(k) * mp.drift.b() + w;
    EXPECT_NEAR(cm.mean(k)[0], expect[0], 1e-12);
    EXPECT_NEAR(cm.mean(k)[1], expect[1], 1e-12);
  }
}

TEST(ConditionalMean, TimeZeroMatchesMonteCarlo) {
  MortalityParams mp;
  TimeGrid g(0.01, 500);
  ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
  ConditionalMean cm(mp, th);
  for (int k : {100, 250, 500}) {
    for (int i = 0; i < 2; ++i) {
      std::vector<double> x;
      for (const PathBundle& p : ensemble()) x.push_back(p.mu[k][i]);
      Moments m = moments(x);
      EXPECT_NEAR(cm.mean(k)[i], m.mean, 3.0 * m.se) << "node " << k << " component " << i;
    }
  }
}

TEST(ConditionalMean, TowerProperty) {
  MortalityParams mp;
  TimeGrid g(0.01, 500);
  ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
  ConditionalMean cm0(mp, th);
  const Vec2 target = cm0.mean(500);
  for (int now : {100, 250}) {
    std::vector<double> x1, x2;
    for (const PathBundle& p : ensemble()) {
      ConditionalMean cm(mp, th);
      for (int j = 0; j < now; ++j) cm.push(mp.vol(p.mu[j]) * Vec2{p.dW[j][0], p.dW[j][1]});
      x1.push_back(cm.mean(500)[0]);
      x2.push_back(cm.mean(500)[1]);
    }
    Moments m1 = moments(x1), m2 = moments(x2);
    EXPECT_NEAR(m1.mean, target[0], 3.0 * m1.se);
    EXPECT_NEAR(m2.mean, target[1], 3.0 * m2.se);
  }
}

TEST(FunctionalY, SurvivalTransformMatchesMonteCarlo) {
  MortalityParams mp;
  TimeGrid g(0.01, 500);
  std::vector<double> x;
  for (const PathBundle& p : ensemble()) x.push_back(std::exp(-integral_mu(p, mp, 1, 500)));
  Moments m = moments(x);
  EXPECT_NEAR(laplace_at_zero(mp, {0.0, -1.0}, g, 5.0), m.mean, 3.0 * m.se);
}

TEST(FunctionalY, MartingaleAlongPaths) {
  MortalityParams mp;
  const Vec2 f{-1.0, 0.0};
  TimeGrid g(0.01, 500);
  RiccatiSolution psi = psi_for(mp, f, g);
  ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
  std::vector<double> x;
  for (std::size_t i = 0; i < 2000; ++i) {
    const PathBundle& p = ensemble()[i];
    ConditionalMean cm(mp, th);
    for (int j = 0; j < 100; ++j) cm.push(mp.vol(p.mu[j]) * Vec2{p.dW[j][0], p.dW[j][1]});
    x.push_back(std::exp(functional_Y(mp, f, psi, cm, p.mu, 500)));
  }
  Moments m = moments(x);
  EXPECT_NEAR(m.mean, laplace_at_zero(mp, f, g, 5.0), 3.0 * m.se);
}

class LaplaceMonteCarlo : public ::testing::TestWithParam<std::tuple<double, double>> {};

TEST_P(LaplaceMonteCarlo, NationalTransform) {
  const auto [q, hurst] = GetParam();
  MortalityParams mp;
  mp.kernels.k1.hurst = hurst;
  TimeGrid g(0.02, 250);
  std::vector<PathBundle> paths = simulate_paths(mp, RateParams{}, g, 4000, 5);
  std::vector<double> x;
  for (const PathBundle& p : paths) x.push_back(std::exp(-q * integral_mu(p, mp, 0, 250)));
  Moments m = moments(x);
  EXPECT_NEAR(laplace_at_zero(mp, {-q, 0.0}, g, 5.0), m.mean, 3.0 * m.se);
}

INSTANTIATE_TEST_SUITE_P(Weights, LaplaceMonteCarlo,
                         ::testing::Combine(::testing::Values(1.0, 2.0), ::testing::Values(0.5, 0.83)));

TEST(RateOde, TerminalCondition) {
  RateCoefficients c = affine_rate_ode(RateParams{}, 0.0);
  EXPECT_EQ(c.d0, 0.0);
  EXPECT_EQ(c.d1, 0.0);
}

TEST(RateOde, VasicekSlope) {
  RateCoefficients c = affine_rate_ode(RateParams{}, 10.0);
  EXPECT_NEAR(c.d1, (std::exp(-6.0) - 1.0) / 0.6, 1e-14);
}

TEST(RateOde, SlopeNonPositiveAndIncreasingInTime) {
  for (VolModel v : {VolModel::vasicek, VolModel::cir}) {
    RateParams rp;
    rp.vol_model = v;
    if (v == VolModel::cir) rp.sigma = 0.1;
    double prev = -1e300;
    for (double tau = 10.0; tau >= 0.0; tau -= 0.25) {
      double d1 = affine_rate_ode(rp, tau).d1;
      EXPECT_LE(d1, 0.0);
      EXPECT_GE(d1, prev);
      prev = d1;
    }
  }
}

TEST(RateOde, CirMatchesRungeKutta) {
  RateParams rp;
  rp.vol_model = VolModel::cir;
  rp.sigma = 0.15;
  rp.b_r = 0.03;
  rp.theta_r = 0.4;
  for (double tau : {0.5, 3.0, 10.0}) {
    RateCoefficients c = affine_rate_ode(rp, tau);
    RateCoefficients o = rk4_cir(rp, tau, static_cast<int>(tau * 1000));
    EXPECT_NEAR(c.d1, o.d1, 1e-8);
    EXPECT_NEAR(c.d0, o.d0, 1e-8);
  }
}
