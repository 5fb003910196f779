#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>

#include "longevity/pricing.h"

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

// Left-point Volterra scheme written out from the kernel matrix (K1, 0; beta1 K1, K2).
std::vector<Vec2> deterministic_volterra(const MortalityParams& mp, const TimeGrid& g) {
  const double a1 = mp.kernels.k1.alpha(), a2 = mp.kernels.k2.alpha();
  auto cell = [&](double a, double scale, double lo, double hi) {
    return scale * (std::pow(hi, a) - std::pow(lo, a)) / std::tgamma(a + 1.0);
  };
  std::vector<Vec2> mu(g.size(), mp.mu0);
  std::vector<Vec2> drift(g.size());
  for (int n = 1; n <= g.n_steps; ++n) {
    const int j = n - 1;
    drift[j] = mp.drift.b() - mp.drift.theta() * mu[j];
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double lo = g.t(n - i - 1), hi = g.t(n - i);
      const double w1 = cell(a1, mp.kernels.k1.scale, lo, hi), w2 = cell(a2, mp.kernels.k2.scale, lo, hi);
      s1 += w1 * drift[i][0];
      s2 += w2 * drift[i][1];
    }
    mu[n] = {mp.mu0[0] + s1, mp.mu0[1] + mp.kernels.beta1 * s1 + s2};
  }
  return mu;
}

LiabilityParams no_liabilities() {
  LiabilityParams lp;
  lp.c1 = 0.0;
  lp.c2 = 0.0;
  return lp;
}

}  // namespace

TEST(Simulation, NoiselessMatchesFineVolterraSolution) {
  MortalityParams mp;
  mp.sigma = Mat2{0.0, 0.0, 0.0, 0.0};
  mp.mu0 = {1e-3, 5e-4};
  std::vector<Vec2> fine = deterministic_volterra(mp, TimeGrid(0.001, 5000));
  auto max_error = [&](double step) {
    const int n_steps = static_cast<int>(std::lround(5.0 / step)), stride = static_cast<int>(std::lround(step / 0.001));
    PathBundle p = PathSimulator(mp, RateParams{}, TimeGrid(step, n_steps)).simulate(3, 0);
    double e = 0.0;
    for (int n = 0; n <= n_steps; ++n)
      e = std::max({e, std::abs(p.mu[n][0] - fine[stride * n][0]), std::abs(p.mu[n][1] - fine[stride * n][1])});
    return e;
  };
  const double e1 = max_error(0.01), e2 = max_error(0.005);
  EXPECT_LT(e1, 1e-3);
  // first order in the step once the oracle's own error is accounted for
  EXPECT_GT(e1 / e2, 1.6);
  EXPECT_LT(e1 / e2, 3.0);
}

TEST(Simulation, MarkovianKernelsReduceToEuler) {
  MortalityParams mp;
  mp.kernels.k1.hurst = 0.5;
  mp.kernels.k2.hurst = 0.5;
  mp.sigma.a21 = 3e-4;
  PathBundle p = PathSimulator(mp, RateParams{}, TimeGrid(0.01, 500)).simulate(11, 0);
  const CointegrationDrift& d = mp.drift;
  const double h = 0.01;
  Vec2 mu = mp.mu0;
  for (int n = 0; n < 500; ++n) {
    const double dw1 = p.dW[n][0], dw2 = p.dW[n][1];
    const Vec2 next{mu[0] + (d.b1 - d.theta1 * mu[0]) * h + mp.sigma.a11 * dw1,
                    mu[1] + d.beta1 * ((d.b1 - d.theta1 * mu[0]) * h + mp.sigma.a11 * dw1) +
                        (d.b2 - d.beta2 * mu[0] - d.theta2 * mu[1]) * h + mp.sigma.a21 * dw1 + mp.sigma.a22 * dw2};
    mu = next;
    ASSERT_NEAR(p.mu[n + 1][0], mu[0], 1e-15);
    ASSERT_NEAR(p.mu[n + 1][1], mu[1], 1e-15);
  }
}

TEST(Simulation, TerminalMeanMatchesAnalyticMean) {
  MortalityParams mp;
  TimeGrid g(0.02, 250);
  std::vector<PathBundle> paths = simulate_paths(mp, RateParams{}, g, 10000, 17);
  ThetaResolvents th = e_theta(mp.drift, mp.kernels, g);
  ConditionalMean cm(mp, th);
  for (int i = 0; i < 2; ++i) {
    std::vector<double> x;
    for (const PathBundle& p : paths) x.push_back(p.mu[250][i]);
    Moments m = moments(x);
    EXPECT_NEAR(cm.mean(250)[i], m.mean, 3.0 * m.se);
  }
}

TEST(Simulation, WeakConvergenceUnderRefinement) {
  MortalityParams mp;
  std::vector<double> coarse, fine;
  for (const PathBundle& p : simulate_paths(mp, RateParams{}, TimeGrid(0.02, 250), 10000, 21))
    coarse.push_back(p.mu[250][0]);
  for (const PathBundle& p : simulate_paths(mp, RateParams{}, TimeGrid(0.01, 500), 10000, 22))
    fine.push_back(p.mu[500][0]);
  Moments a = moments(coarse), b = moments(fine);
  EXPECT_LT(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.se, b.se));
}

TEST(Simulation, SeedsReproduceBitIdenticalPaths) {
  PathSimulator sim(MortalityParams{}, RateParams{}, TimeGrid(0.01, 300));
  PathBundle a = sim.simulate(5, 7), b = sim.simulate(5, 7), c = sim.simulate(5, 8);
  a.claims = simulate_claims(LiabilityParams{}, a, 5);
  b.claims = simulate_claims(LiabilityParams{}, b, 5);
  for (int n = 0; n <= 300; ++n) {
    EXPECT_EQ(a.mu[n][0], b.mu[n][0]);
    EXPECT_EQ(a.mu[n][1], b.mu[n][1]);
    EXPECT_EQ(a.r[n], b.r[n]);
  }
  EXPECT_EQ(a.claims.events.size(), b.claims.events.size());
  EXPECT_NE(a.mu[300][0], c.mu[300][0]);
}

TEST(Simulation, IntegralsAreTrapezoids) {
  PathBundle p = PathSimulator(MortalityParams{}, RateParams{}, TimeGrid(0.01, 300)).simulate(8, 0);
  double ir = 0.0, im = 0.0;
  for (int n = 1; n <= 300; ++n) {
    ir += 0.005 * (p.r[n - 1] + p.r[n]);
    im += 0.005 * (p.mu_hat[n - 1][1] + p.mu_hat[n][1]);
    EXPECT_NEAR(p.int_r[n], ir, 1e-13);
    EXPECT_NEAR(p.int_mu_hat[n][1], im, 1e-13);
    EXPECT_NEAR(p.disc[n], std::exp(-ir), 1e-13);
    EXPECT_NEAR(p.mu_hat[n][1], p.mu[n][1] + MortalityParams{}.baseline(p.grid.t(n)), 1e-16);
  }
}

TEST(Simulation, ContinuationKeepsPrefix) {
  PathSimulator sim(MortalityParams{}, RateParams{}, TimeGrid(0.01, 300));
  PathBundle a = sim.simulate(5, 0);
  PathBundle b = sim.continue_from(a, 120, 9, 1);
  for (int n = 0; n <= 120; ++n) EXPECT_EQ(a.mu[n][1], b.mu[n][1]);
  EXPECT_NE(a.mu[121][1], b.mu[121][1]);
}

TEST(Simulation, InnovationsInvertTheScheme) {
  MortalityParams mp;
  PathBundle p = PathSimulator(mp, RateParams{}, TimeGrid(0.01, 400)).simulate(4, 0);
  std::vector<Vec2> xi = reconstruct_innovations(mp, p.mu, 0.01);
  for (int n = 0; n < 400; ++n) {
    Vec2 expect = mp.vol(p.mu[n]) * Vec2{p.dW[n][0], p.dW[n][1]};
    EXPECT_NEAR(xi[n][0], expect[0], 1e-12);
    EXPECT_NEAR(xi[n][1], expect[1], 1e-12);
  }
}

TEST(Claims, NoFrequencyNoClaims) {
  LiabilityParams lp;
  lp.c1 = 0.0;
  PathBundle p = PathSimulator(MortalityParams{}, RateParams{}, TimeGrid(0.01, 500)).simulate(1, 0);
  ClaimPath c = simulate_claims(lp, p, 1);
  EXPECT_TRUE(c.events.empty());
  EXPECT_EQ(c.compensator.back(), 0.0);
}

TEST(Claims, ConstantIntensityGivesPoissonCounts) {
  MortalityParams mp;
  mp.sigma = Mat2{0.0, 0.0, 0.0, 0.0};
  mp.mu0 = {0.0, 0.0};
  mp.drift.b1 = mp.drift.b2 = 0.0;
  mp.baseline = {0.05, 1.0, 25.0};  // m = 0.05
  LiabilityParams lp;
  PathSimulator sim(mp, RateParams{}, TimeGrid(0.01, 500));
  const double mean = lp.c1 * 0.05 * 5.0;
  const int bins = 8;  // 0..6 and 7+
  std::vector<double> observed(bins, 0.0);
  const int n_paths = 10000;
  for (int i = 0; i < n_paths; ++i) {
    PathBundle p = sim.simulate(2, i);
    int k = static_cast<int>(simulate_claims(lp, p, 2).events.size());
    observed[std::min(k, bins - 1)] += 1.0;
    for (const ClaimEvent& e : simulate_claims(lp, p, 2).events) {
      ASSERT_GE(e.time, 0.0);
      ASSERT_LE(e.time, 5.0);
    }
  }
  boost::math::poisson_distribution<> pois(mean);
  double chi2 = 0.0;
  for (int k = 0; k < bins; ++k) {
    double prob = k < bins - 1 ? boost::math::pdf(pois, k) : boost::math::cdf(boost::math::complement(pois, bins - 2));
    double e = prob * n_paths;
    chi2 += (observed[k] - e) * (observed[k] - e) / e;
  }
  double critical = boost::math::quantile(boost::math::chi_squared(bins - 1), 0.99);
  EXPECT_LT(chi2, critical);
}

TEST(Claims, CompensatedTotalHasMeanZero) {
  LiabilityParams lp;
  lp.law = ClaimLaw::exponential;
  lp.claim_mean = 2.0;
  std::vector<double> x;
  PathSimulator sim(MortalityParams{}, RateParams{}, TimeGrid(0.02, 250));
  for (int i = 0; i < 10000; ++i) {
    PathBundle p = sim.simulate(6, i);
    ClaimPath c = simulate_claims(lp, p, 6);
    double total = 0.0;
    for (const ClaimEvent& e : c.events) total += e.size;
    x.push_back(total - c.compensator.back());
  }
  Moments m = moments(x);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.se);
}

class WealthTest : public ::testing::Test {
 protected:
  void SetUp() override {
    sim_ = std::make_unique<PathSimulator>(MortalityParams{}, RateParams{}, TimeGrid(0.01, 500));
    path_ = sim_->simulate(31, 0);
    path_.claims = simulate_claims(lp_, path_, 31);
    BondMarket market(MortalityParams{}, RateParams{}, MarketPrices{}, 10.0, 0.01);
    loadings_ = market.loadings(path_, 500);
    for (int n = 0; n < 500; ++n) {
      u1_.push_back(-200.0 + 30.0 * std::sin(0.01 * n));
      u2_.push_back(150.0 + 0.1 * n);
    }
  }
  std::unique_ptr<PathSimulator> sim_;
  LiabilityParams lp_;
  PathBundle path_;
  MarketLoadings loadings_;
  std::vector<double> u1_, u2_;
};

TEST_F(WealthTest, IdleWithoutLiabilities) {
  std::vector<double> zero(500, 0.0);
  path_.claims = simulate_claims(no_liabilities(), path_, 31);
  std::vector<double> x = evolve_wealth(path_, no_liabilities(), loadings_, zero, zero, 100.0, 500);
  for (double v : x) EXPECT_EQ(v, 100.0);
}

TEST_F(WealthTest, DiscountingIdentity) {
  std::vector<double> x = evolve_wealth(path_, lp_, loadings_, u1_, u2_, 100.0, 500);
  std::vector<double> xbar = evolve_wealth_undiscounted(path_, lp_, loadings_, u1_, u2_, 100.0, 500);
  for (int n = 0; n <= 500; ++n) EXPECT_NEAR(x[n], path_.disc[n] * xbar[n], 1e-10 * std::abs(x[n]));
}

TEST_F(WealthTest, BudgetEquationMatchesStepByStepOracle) {
  std::vector<double> x = evolve_wealth(path_, lp_, loadings_, u1_, u2_, 100.0, 500);
  const double h = 0.01;
  double oracle = 100.0;
  for (int n = 0; n < 500; ++n) {
    const double e = path_.disc[n];
    const double pi = lp_.c2 * std::exp(-path_.int_mu2_pos[n]);
    const double nu_u = loadings_.nu_l[n] * u1_[n] + loadings_.nu_b[n] * u2_[n];
    // u^T sigma_S^T dW with sigma_S^T = (sigma_l1, 0, sigma_b; 0, 0, sigma_b)
    const double noise = u1_[n] * (loadings_.sigma_l1[n] * path_.dW[n][0] + loadings_.sigma_b[n] * path_.dW[n][2]) +
                         u2_[n] * loadings_.sigma_b[n] * path_.dW[n][2];
    double jumps = 0.0;
    for (const ClaimEvent& c : path_.claims.events)
      if (c.time >= path_.grid.t(n) && c.time < path_.grid.t(n + 1)) jumps += c.size;
    const double compensator = path_.claims.compensator[n + 1] - path_.claims.compensator[n];
    oracle += e * (nu_u - pi - lp_.ez() * lp_.c1 * path_.mu_hat[n][1]) * h + e * noise - e * (jumps - compensator);
    ASSERT_NEAR(x[n + 1], oracle, 1e-10 * std::abs(oracle)) << "node " << n + 1;
  }
}

TEST_F(WealthTest, LoadingsFollowBondPricing) {
  const double sb = loadings_.sigma_b[0];
  EXPECT_NEAR(sb, (std::exp(-0.6 * 10.0) - 1.0) / 0.6 * 0.01, 1e-14);
  for (int n = 0; n < 500; ++n) {
    EXPECT_NEAR(loadings_.nu_b[n], 0.1 * loadings_.sigma_b[n], 1e-16);
    EXPECT_NEAR(loadings_.nu_l[n], loadings_.nu_b[n] + 0.1 * loadings_.sigma_l1[n], 1e-16);
  }
}
