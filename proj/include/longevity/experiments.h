#pragma once

#include <functional>
#include <string>
#include <vector>

#include "longevity/config.h"
#include "longevity/estimation.h"

namespace longevity {

// Model labels: model1 (the market model), model2 (no cointegration, fitted),
// model2prime (correlated, fitted), markovian (H1 = H2 = 1/2), no_hedge.
struct FrontierPoint {
  std::string model;
  double lambda = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
  int n_paths = 0;
};

// The insurer's model for a label, with fits taken from `training`.
MortalityParams agent_model(const std::string& label, const MortalityParams& market, const PathBundle& training);
// Path that the misspecified models are fitted on; independent of the evaluation paths.
PathBundle training_path(const ScenarioConfig& cfg);

// Runs fn(i) for i in [0, n) on `workers` threads; results must be written by index.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

struct ShowcaseResult {
  PathBundle path;
  std::vector<std::string> labels;
  std::vector<StrategySeries> strategies;
  std::vector<std::vector<double>> wealth;
  std::vector<EstimationResult> fits;
};

ShowcaseResult showcase(const ScenarioConfig& cfg);
std::vector<FrontierPoint> frontier(const ScenarioConfig& cfg);

struct SensitivityResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<StrategySeries> strategies;  // model1, one per value
};
SensitivityResult sensitivity(const ScenarioConfig& cfg);

// Writers: CSV files, a plot script and a manifest in cfg.output_dir.
void run_showcase(const ScenarioConfig& cfg);
void run_frontier(const ScenarioConfig& cfg);
void run_sensitivity(const ScenarioConfig& cfg);

void write_manifest(const ScenarioConfig& cfg, const std::string& command, const std::vector<std::string>& files);

}  // namespace longevity
