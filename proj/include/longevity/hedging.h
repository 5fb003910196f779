#pragma once

#include <optional>
#include <vector>

#include "longevity/pricing.h"

namespace longevity {

struct HedgeConfig {
  MortalityParams mp;  // the market: drives bond loadings and wealth
  RateParams rp;
  MarketPrices prices;
  LiabilityParams lp;
  double lambda = 10.0;
  double T0 = 5.0;
  double T = 10.0;
  double x0 = 100.0;
  double step = 0.01;
  // measure signs: dW' = dW - sign * (price of risk) dt
  double pricing_sign = 1.0;
  double hedging_sign = -1.0;
  // model the insurer uses for its strategy; the market model when empty
  std::optional<MortalityParams> agent;

  const MortalityParams& agent_model() const { return agent ? *agent : mp; }
  TimeGrid hedge_grid() const;
  void validate() const;
};

// BSDE solution at one node, split as value = base + lambda * slope
struct GammaValues {
  double Gamma = 0.0, Gamma_slope = 0.0;
  double gamma1 = 0.0, gamma1_slope = 0.0;
  double gamma2 = 0.0, gamma2_slope = 0.0;
  double gamma3 = 0.0, gamma3_slope = 0.0;
};

// Everything a strategy needs along one path, independent of lambda.
struct HedgeComponents {
  TimeGrid grid;  // [0, T0]
  std::vector<GammaValues> gamma;
  std::vector<double> growth;  // exp(int_0^t r)
  MarketLoadings agent;        // loadings as the agent's model sees them
};

struct StrategySeries {
  TimeGrid grid;
  std::vector<double> u1, u2;
  std::vector<double> gamma1, gamma2, gamma3, Gamma;
};

class EquilibriumHedger {
 public:
  explicit EquilibriumHedger(const HedgeConfig& cfg);

  const HedgeConfig& config() const { return cfg_; }
  const BondMarket& market() const { return market_; }
  const BondMarket& agent_market() const { return agent_market_; }

  HedgeComponents components(const PathBundle& path) const;
  StrategySeries strategy(const HedgeComponents& c, double lambda) const;
  StrategySeries no_hedge(const HedgeComponents& c, double lambda) const;
  StrategySeries strategy(const PathBundle& path) const { return strategy(components(path), cfg_.lambda); }
  StrategySeries no_hedge(const PathBundle& path) const { return no_hedge(components(path), cfg_.lambda); }

  // Lambda(t;t) from the closed-form pieces, relative to the size of its terms
  double equilibrium_residual(const HedgeComponents& c, const StrategySeries& s, double lambda, int n) const;

 private:
  HedgeConfig cfg_;
  MortalityParams agent_;
  MortalityParams agent_bar_;
  RateParams rp_bar_;
  TimeGrid grid_;
  BondMarket market_;
  BondMarket agent_market_;
  ThetaResolvents th_bar_;
  RiccatiSolution psi_bar_;
  std::vector<RateCoefficients> d_bar_;
  std::vector<double> int_m2_, m2_;
  bool agent_is_market_;
};

GammaValues gamma_solution(const HedgeConfig& cfg, const PathBundle& path, double t);
StrategySeries equilibrium_strategy(const HedgeConfig& cfg, const PathBundle& path);
StrategySeries no_hedge_strategy(const HedgeConfig& cfg, const PathBundle& path);

struct SpikeResult {
  double change = 0.0;     // estimated [J(u + eta 1_[t,t+eps)) - J(u)] / eps
  double std_error = 0.0;
  int inner_paths = 0;
};

// Nested Monte Carlo of the spike variation at node n of `path`: inner
// continuations share the path up to t_n and common random numbers across
// the perturbations.
std::vector<SpikeResult> spike_variation(const EquilibriumHedger& hedger, const PathBundle& path, int n, double eps,
                                         const std::vector<Vec2>& etas, int inner, std::uint64_t seed);

}  // namespace longevity
