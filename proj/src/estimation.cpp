#include "longevity/estimation.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "longevity/simulation.h"

namespace longevity {

double EstimationResult::at(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw std::out_of_range("no estimated parameter named " + name);
  return it->second;
}

namespace {

struct Ols {
  Eigen::VectorXd coef;
  Eigen::VectorXd resid;
  double rss = 0.0;
};

Ols least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < x.cols()) throw std::runtime_error("regressors are collinear");
  Ols o;
  o.coef = qr.solve(y);
  o.resid = y - x * o.coef;
  o.rss = o.resid.squaredNorm();
  return o;
}

double lag1(const Eigen::VectorXd& e) {
  const double m = e.mean();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    den += (e[i] - m) * (e[i] - m);
    if (i > 0) num += (e[i] - m) * (e[i - 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

void check_path(std::size_t n) {
  if (n < 5) throw std::invalid_argument("estimation needs at least five observations");
}

// Increments of mu2 - beta1 mu1 against (1, mu1, mu2)
Ols cointegration_fit(const std::vector<Vec2>& mu, double beta1) {
  const Eigen::Index n = static_cast<Eigen::Index>(mu.size()) - 1;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = mu[i][0];
    x(i, 2) = mu[i][1];
    y[i] = (mu[i + 1][1] - mu[i][1]) - beta1 * (mu[i + 1][0] - mu[i][0]);
  }
  return least_squares(x, y);
}

Ols ou_fit(const std::vector<double>& v) {
  const Eigen::Index n = static_cast<Eigen::Index>(v.size()) - 1;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = v[i];
    y[i] = v[i + 1] - v[i];
  }
  return least_squares(x, y);
}

EstimationResult ou_result(const Ols& o, double step, EstimatedModel model) {
  EstimationResult r;
  r.model = model;
  const int n = static_cast<int>(o.resid.size());
  r.params = {{"beta1", 0.0}, {"beta2", 0.0}, {"b2", o.coef[0] / step}, {"theta2", -o.coef[1] / step},
              {"sigma2", std::sqrt(o.rss / (n - 2) / step)}};
  r.rss = o.rss;
  r.lag1_autocorr = lag1(o.resid);
  r.n_obs = n;
  return r;
}

}  // namespace

EstimationResult estimate_cointegrated(const std::vector<Vec2>& mu, double step, const ProfileGrid& grid) {
  check_path(mu.size());
  if (!(grid.step > 0.0) || grid.hi < grid.lo) throw std::invalid_argument("invalid beta1 profile grid");
  const int cells = static_cast<int>(std::lround((grid.hi - grid.lo) / grid.step));
  std::vector<double> rss(cells + 1);
  int best = 0;
  for (int i = 0; i <= cells; ++i) {
    rss[i] = cointegration_fit(mu, grid.lo + i * grid.step).rss;
    if (rss[i] < rss[best]) best = i;
  }
  // RSS is quadratic in beta1, so a parabola through the neighbours is exact
  double beta1 = grid.lo + best * grid.step;
  if (best > 0 && best < cells) {
    const double curv = rss[best - 1] - 2.0 * rss[best] + rss[best + 1];
    if (curv > 0.0) beta1 += 0.5 * grid.step * (rss[best - 1] - rss[best + 1]) / curv;
  }
  const Ols o = cointegration_fit(mu, beta1);
  const int n = static_cast<int>(o.resid.size());
  EstimationResult r;
  r.model = EstimatedModel::model1;
  r.params = {{"beta1", beta1},
              {"b2", o.coef[0] / step},
              {"beta2", -o.coef[1] / step},
              {"theta2", -o.coef[2] / step},
              {"sigma2", std::sqrt(o.rss / (n - 3) / step)}};
  r.rss = o.rss;
  r.lag1_autocorr = lag1(o.resid);
  r.n_obs = n;
  return r;
}

EstimationResult estimate_markovian(const std::vector<double>& mu2, double step) {
  check_path(mu2.size());
  return ou_result(ou_fit(mu2), step, EstimatedModel::model2);
}

EstimationResult estimate_correlated(const std::vector<Vec2>& mu, double step, const MortalityParams& national) {
  check_path(mu.size());
  std::vector<double> mu2(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu2[i] = mu[i][1];
  const Ols o = ou_fit(mu2);
  EstimationResult r = ou_result(o, step, EstimatedModel::model2prime);
  MortalityParams first = national;
  first.kernels.beta1 = first.drift.beta1 = 0.0;
  first.drift.beta2 = 0.0;
  const std::vector<Vec2> xi = reconstruct_innovations(first, mu, step);
  const Eigen::Index n = o.resid.size();
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = xi[i][0];
  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = o.resid.array() - o.resid.mean();
  const double den = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  r.params["rho"] = den > 0.0 ? ac.dot(bc) / den : 0.0;
  return r;
}

MortalityParams fitted_model(const MortalityParams& national, const EstimationResult& fit) {
  MortalityParams m = national;
  const double beta1 = fit.params.count("beta1") ? fit.at("beta1") : 0.0;
  m.drift.beta1 = m.kernels.beta1 = beta1;
  m.drift.beta2 = fit.params.count("beta2") ? fit.at("beta2") : 0.0;
  m.drift.b2 = fit.at("b2");
  m.drift.theta2 = fit.at("theta2");
  if (!(m.drift.theta2 > 0.0))
    throw std::domain_error("fitted theta2 = " + std::to_string(m.drift.theta2) +
                            " is not mean reverting; fit on a longer path");
  const double s2 = fit.at("sigma2");
  if (fit.model == EstimatedModel::model1) {
    m.sigma.a22 = s2;
  } else {
    // the fitted mu2 is Markovian
    m.kernels.k2 = {0.5, 1.0};
    const double rho = fit.params.count("rho") ? fit.at("rho") : 0.0;
    m.sigma.a21 = rho * s2;
    m.sigma.a22 = std::sqrt(1.0 - rho * rho) * s2;
  }
  return m;
}

HolderEstimate holder_regularity(const std::vector<double>& x, const std::vector<int>& lags) {
  if (x.size() < 1000) throw std::invalid_argument("holder_regularity needs at least 1000 nodes");
  if (lags.size() < 2) throw std::invalid_argument("holder_regularity needs at least two lags");
  const int n = static_cast<int>(lags.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const int l = lags[i];
    if (l < 1 || static_cast<std::size_t>(l) >= x.size()) throw std::invalid_argument("lag outside the path");
    double s = 0.0;
    for (std::size_t j = 0; j + l < x.size(); ++j) s += std::abs(x[j + l] - x[j]);
    s /= static_cast<double>(x.size() - l);
    a(i, 0) = 1.0;
    a(i, 1) = std::log(static_cast<double>(l));
    y[i] = std::log(s);
  }
  const Ols o = least_squares(a, y);
  HolderEstimate h;
  h.slope = o.coef[1];
  if (n > 2) {
    const double s2 = o.rss / (n - 2);
    const Eigen::MatrixXd cov = s2 * (a.transpose() * a).inverse();
    h.std_error = std::sqrt(cov(1, 1));
  }
  return h;
}

}  // namespace longevity
