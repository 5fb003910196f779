#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "longevity/hedging.h"

namespace longevity {

// Flat key = value scenario. Defaults are the numerical-study set.
struct ScenarioConfig {
  MortalityParams mp;
  RateParams rp;
  MarketPrices prices;
  LiabilityParams lp;
  double lambda = 10.0;
  double T0 = 5.0;
  double T = 10.0;
  double x0 = 100.0;
  double step = 0.01;
  double pricing_sign = 1.0;
  double hedging_sign = -1.0;

  std::string experiment = "showcase";
  std::vector<double> lambdas{1.0, 10.0, 20.0, 40.0};
  std::vector<std::string> models{"model1", "model2", "model2prime", "markovian", "no_hedge"};
  std::string parameter = "c2";
  std::vector<double> values{2.0, 4.0, 6.0};
  int n_paths = 2000;
  std::uint64_t seed = 20240601;
  std::string output_dir = "out";
  int workers = 1;

  HedgeConfig hedge_config() const;
  TimeGrid path_grid() const;
  void validate() const;
};

// Throws std::invalid_argument naming the key on unknown keys or bad values.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);
// Lines of `key = value`; '#' starts a comment.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
// Every key with its current value, parseable by parse_scenario.
std::string dump_scenario(const ScenarioConfig& cfg);

}  // namespace longevity
