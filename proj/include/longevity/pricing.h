#pragma once

#include <vector>

#include "longevity/simulation.h"

namespace longevity {

struct BondQuote {
  double t = 0.0;
  double T = 0.0;
  double price = 1.0;
  double sigma_b = 0.0;
  Vec2 sigma_l{0.0, 0.0};  // second entry is always 0: the index only involves mu1
};

// exp(d0 + d1 r_t) with the rate drift taken under the measure of the given sign
BondQuote zero_coupon_bond(const RateParams& rp, const MarketPrices& prices, double t, double T, double r_t,
                           double sign = 1.0);

// Zero-coupon bond and longevity bond maturing at T, with the tables needed
// to quote them along simulated paths.
class BondMarket {
 public:
  BondMarket(const MortalityParams& mp, const RateParams& rp, const MarketPrices& prices, double T, double step,
             double sign = 1.0);

  double maturity() const { return T_; }
  const TimeGrid& grid() const { return grid_; }
  // psi for f = (-1, 0) under the pricing measure, indexed by time to maturity
  const RiccatiSolution& psi() const { return psi_; }
  const MortalityParams& pricing_mortality() const { return mp_q_; }
  const RateParams& pricing_rate() const { return rp_q_; }

  BondQuote bond(double t, double r_t) const;
  // both bonds at t = 0
  BondQuote longevity_initial() const;
  // longevity bond quotes at nodes 0..n_end of the path
  std::vector<BondQuote> longevity_along(const PathBundle& path, int n_end) const;
  // return and volatility loadings at nodes 0..n_end-1
  MarketLoadings loadings(const PathBundle& path, int n_end) const;
  // price of risk on W1 and W_r at a state
  Vec2 prices_of_risk(const Vec2& mu, double r) const;
  // sigma_l1 and sigma_b at node n of a path
  Vec2 volatilities(const PathBundle& path, int n) const;

 private:
  MortalityParams mp_;
  RateParams rp_;
  MarketPrices prices_;
  double T_;
  double sign_;
  TimeGrid grid_;
  MortalityParams mp_q_;
  RateParams rp_q_;
  RiccatiSolution psi_;
  ThetaResolvents th_;  // under the pricing measure
};

}  // namespace longevity
