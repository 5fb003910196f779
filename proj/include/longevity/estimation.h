#pragma once

#include <map>
#include <string>
#include <vector>

#include "longevity/affine.h"

namespace longevity {

enum class EstimatedModel { model1, model2, model2prime };

struct EstimationResult {
  EstimatedModel model = EstimatedModel::model1;
  std::map<std::string, double> params;  // beta1, beta2, b2, theta2, sigma2, rho
  double rss = 0.0;
  double lag1_autocorr = 0.0;
  int n_obs = 0;

  double at(const std::string& name) const;
};

struct ProfileGrid {
  double lo = 0.0;
  double hi = 2.0;
  double step = 0.01;
};

// Profile least squares over beta1: Z = mu2 - beta1 mu1 has increments
// (b2 - beta2 mu1 - theta2 mu2) dt + sigma2 dW2.
EstimationResult estimate_cointegrated(const std::vector<Vec2>& mu, double step, const ProfileGrid& grid = {});
// OU fit of mu2 alone.
EstimationResult estimate_markovian(const std::vector<double>& mu2, double step);
// OU fit of mu2 plus the correlation of its residuals with the mu1
// innovations implied by the national model.
EstimationResult estimate_correlated(const std::vector<Vec2>& mu, double step, const MortalityParams& national);

// Mortality model an insurer would hedge with after the fit; mu1 is taken from `national`.
// Throws std::domain_error when the fitted theta2 is not positive.
MortalityParams fitted_model(const MortalityParams& national, const EstimationResult& fit);

struct HolderEstimate {
  double slope = 0.0;
  double std_error = 0.0;
};

// Slope of log mean |x(t + l) - x(t)| against log l over the lags (in steps).
HolderEstimate holder_regularity(const std::vector<double>& x, const std::vector<int>& lags = {1, 2, 4, 8, 16});

}  // namespace longevity
