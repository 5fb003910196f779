#include "longevity/affine.h"

#include <cmath>
#include <stdexcept>

namespace longevity {

double Baseline::operator()(double t) const { return a_m * std::pow(t + age_offset, g - 1.0); }

double Baseline::integral(double t0, double t1) const {
  return a_m / g * (std::pow(t1 + age_offset, g) - std::pow(t0 + age_offset, g));
}

Mat2 MortalityParams::vol(const Vec2& mu) const {
  if (vol_model == VolModel::vasicek) return sigma;
  return Mat2::diag(sigma.a11 * std::sqrt(std::max(mu[0], 0.0)), sigma.a22 * std::sqrt(std::max(mu[1], 0.0)));
}

Mat2 MortalityParams::diffusion(const Vec2& mu) const {
  Mat2 s = vol(mu);
  return s * s.transpose();
}

std::optional<Vec2> MortalityParams::quad_coeffs() const {
  if (vol_model == VolModel::vasicek) return std::nullopt;
  return Vec2{sigma.a11 * sigma.a11, sigma.a22 * sigma.a22};
}

void MortalityParams::validate() const {
  kernels.k1.validate();
  kernels.k2.validate();
  if (drift.beta1 != kernels.beta1) throw std::invalid_argument("drift beta1 and kernel beta1 differ");
  if (!(sigma.a11 >= 0.0 && sigma.a22 >= 0.0) || sigma.a12 != 0.0)
    throw std::invalid_argument("mortality volatility must be lower triangular with non-negative diagonal");
  if (vol_model == VolModel::cir) {
    if (sigma.a21 != 0.0) throw std::invalid_argument("CIR mortality volatility must be diagonal");
    if (mu0[0] < 0.0 || mu0[1] < 0.0) throw std::invalid_argument("CIR mortality needs non-negative initial state");
  }
}

double RateParams::vol(double r) const {
  return vol_model == VolModel::vasicek ? sigma : sigma * std::sqrt(std::max(r, 0.0));
}

void RateParams::validate() const {
  if (!(theta_r > 0.0)) throw std::invalid_argument("rate mean reversion must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("rate volatility must be non-negative");
  if (vol_model == VolModel::cir && r0 < 0.0) throw std::invalid_argument("CIR rate needs r0 >= 0");
}

MortalityParams shifted(const MortalityParams& mp, const MarketPrices& prices, double sign) {
  MortalityParams out = mp;
  if (mp.vol_model == VolModel::vasicek) {
    out.drift.b1 += sign * mp.sigma.a11 * prices.phi1;
    out.drift.b2 += sign * mp.sigma.a21 * prices.phi1;
  } else {
    out.drift.theta1 -= sign * prices.phi1 * mp.sigma.a11 * mp.sigma.a11;
  }
  return out;
}

RateParams shifted(const RateParams& rp, const MarketPrices& prices, double sign) {
  RateParams out = rp;
  if (rp.vol_model == VolModel::vasicek)
    out.b_r += sign * rp.sigma * prices.vartheta;
  else
    out.theta_r -= sign * prices.vartheta * rp.sigma * rp.sigma;
  return out;
}

Vec2 risk_drift(const MortalityParams& mp, const MarketPrices& prices, const Vec2& mu) {
  if (mp.vol_model == VolModel::vasicek) return {mp.sigma.a11 * prices.phi1, mp.sigma.a21 * prices.phi1};
  return {prices.phi1 * mp.sigma.a11 * mp.sigma.a11 * std::max(mu[0], 0.0), 0.0};
}

GridFn laplace_exponent(const MortalityParams& mp, const Vec2& f, const RiccatiSolution& psi) {
  const TimeGrid& g = psi.grid();
  const Vec2 slope = mp.drift.b() - mp.drift.theta() * mp.mu0;
  const Mat2 a0 = mp.diffusion(mp.mu0);
  const double fm = dot(f, mp.mu0);
  std::vector<double> quad(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    Vec2 p = psi.at(static_cast<int>(j));
    quad[j] = 0.5 * dot(row_times(p, a0), p);
  }
  std::vector<double> iq = cumulative_trapezoid(quad, g.step);
  GridFn y(g);
  for (std::size_t j = 0; j < g.size(); ++j)
    y[j] = fm * g.t(static_cast<int>(j)) + psi.int1[j] * slope[0] + psi.int2[j] * slope[1] + iq[j];
  return y;
}

double laplace_at_zero(const MortalityParams& mp, const Vec2& f, const TimeGrid& grid, double T) {
  if (T == 0.0) return 1.0;
  const int n = grid.index_of(T);
  TimeGrid g(grid.step, n);
  RiccatiSolution psi = solve_riccati({f, mp.drift, mp.kernels, mp.quad_coeffs()}, g);
  return std::exp(laplace_exponent(mp, f, psi)[n]);
}

ConditionalMean::ConditionalMean(const MortalityParams& mp, const ThetaResolvents& th)
    : th_(th), mu0_(mp.mu0), slope_(mp.drift.b() - mp.drift.theta() * mp.mu0) {
  const TimeGrid& g = th.grid();
  avg_.resize(g.n_steps);
  const double inv = 1.0 / g.step;
  for (int m = 0; m < g.n_steps; ++m) avg_[m] = inv * (th.e_int[m + 1] - th.e_int[m]);
  acc_.assign(g.size(), Vec2{0.0, 0.0});
}

void ConditionalMean::reset() {
  acc_.assign(acc_.size(), Vec2{0.0, 0.0});
  now_ = 0;
}

void ConditionalMean::push(const Vec2& eta) {
  const int n_steps = grid().n_steps;
  if (now_ >= n_steps) throw std::out_of_range("ConditionalMean: already at the horizon");
  for (int k = now_ + 1; k <= n_steps; ++k) acc_[k] += avg_[k - 1 - now_] * eta;
  ++now_;
}

Vec2 ConditionalMean::mean(int k) const {
  if (k < now_ || k > grid().n_steps) throw std::out_of_range("ConditionalMean: node outside [now, horizon]");
  return mu0_ + th_.e_int[k] * slope_ + acc_[k];
}

std::vector<Vec2> ConditionalMean::mean_integrals() const {
  const TimeGrid& g = grid();
  std::vector<Vec2> out(g.n_steps - now_ + 1, Vec2{0.0, 0.0});
  Vec2 noise{0.0, 0.0};
  const double h = 0.5 * g.step;
  for (int k = now_ + 1; k <= g.n_steps; ++k) {
    noise += h * (acc_[k - 1] + acc_[k]);
    const double dt = g.t(k) - g.t(now_);
    out[k - now_] = dt * mu0_ + (th_.e_int2[k] - th_.e_int2[now_]) * slope_ + noise;
  }
  return out;
}

double functional_Y(const MortalityParams& mp, const Vec2& f, const RiccatiSolution& psi, const ConditionalMean& cm,
                    const std::vector<Vec2>& mu_obs, int T_index) {
  const int now = cm.now();
  if (T_index < now || T_index > cm.grid().n_steps || T_index > psi.grid().n_steps)
    throw std::out_of_range("functional_Y: maturity outside the grid");
  if (static_cast<int>(mu_obs.size()) < now + 1) throw std::invalid_argument("functional_Y: observed path too short");
  const double h = cm.grid().step;
  double past = 0.0;
  for (int j = 1; j <= now; ++j) past += 0.5 * h * (dot(f, mu_obs[j - 1]) + dot(f, mu_obs[j]));
  const double future = dot(f, cm.mean_integrals()[T_index - now]);
  double quad = 0.0;
  for (int k = now; k <= T_index; ++k) {
    Vec2 p = psi.at(T_index - k);
    double v = 0.5 * dot(row_times(p, mp.diffusion(cm.mean(k))), p);
    quad += (k == now || k == T_index) ? 0.5 * h * v : h * v;
  }
  return past + future + quad;
}

std::vector<double> functional_Y_curve(const MortalityParams& mp, const Vec2& f, const RiccatiSolution& psi,
                                       const ConditionalMean& cm, double past, int s_end) {
  const int now = cm.now();
  if (s_end < now || s_end > cm.grid().n_steps || s_end - now > psi.grid().n_steps)
    throw std::out_of_range("functional_Y_curve: horizon outside the grid");
  const double h = cm.grid().step;
  const int len = s_end - now + 1;
  const std::vector<Vec2> mi = cm.mean_integrals();
  std::vector<double> y(len);
  if (mp.vol_model == VolModel::vasicek) {
    const Mat2 a = mp.diffusion(mp.mu0);
    std::vector<double> q(len);
    for (int j = 0; j < len; ++j) {
      Vec2 p = psi.at(j);
      q[j] = 0.5 * dot(row_times(p, a), p);
    }
    const std::vector<double> iq = cumulative_trapezoid(q, h);
    for (int j = 0; j < len; ++j) y[j] = past + dot(f, mi[j]) + iq[j];
    return y;
  }
  // a(mu) = diag(q1 mu1+, q2 mu2+), so the quadratic part is a convolution in s
  const Vec2 qc = *mp.quad_coeffs();
  std::vector<Vec2> m(len);
  for (int j = 0; j < len; ++j) {
    Vec2 v = cm.mean(now + j);
    m[j] = {qc[0] * std::max(v[0], 0.0), qc[1] * std::max(v[1], 0.0)};
  }
  std::vector<double> sq1(len), sq2(len);
  for (int j = 0; j < len; ++j) {
    sq1[j] = 0.5 * psi.psi1[j] * psi.psi1[j];
    sq2[j] = 0.5 * psi.psi2[j] * psi.psi2[j];
  }
  for (int j = 0; j < len; ++j) {
    double quad = 0.0;
    for (int k = 0; k <= j; ++k) {
      double v = sq1[j - k] * m[k][0] + sq2[j - k] * m[k][1];
      quad += (k == 0 || k == j) ? 0.5 * h * v : h * v;
    }
    y[j] = past + dot(f, mi[j]) + quad;
  }
  return y;
}

RateCoefficients affine_rate_ode(const RateParams& rp, double tau) {
  if (tau < 0.0) throw std::invalid_argument("affine_rate_ode needs t <= T");
  if (tau == 0.0) return {};
  const double th = rp.theta_r, b = rp.b_r;
  const double a1 = rp.vol_model == VolModel::cir ? rp.sigma * rp.sigma : 0.0;
  const double a0 = rp.vol_model == VolModel::vasicek ? rp.sigma * rp.sigma : 0.0;
  if (a1 == 0.0) {
    const double e1 = -std::expm1(-th * tau), e2 = -std::expm1(-2.0 * th * tau);
    const double d1 = -e1 / th;
    const double int_d1 = (e1 / th - tau) / th;
    const double int_d1sq = (e2 / (2.0 * th) - 2.0 * e1 / th + tau) / (th * th);
    return {b * int_d1 + 0.5 * a0 * int_d1sq, d1};
  }
  // d1' = -1 - th d1 + a1/2 d1^2 in tau, the CIR bond Riccati
  const double gam = std::sqrt(th * th + 2.0 * a1);
  const double em = std::expm1(gam * tau);
  const double den = (gam + th) * em + 2.0 * gam;
  const double d1 = -2.0 * em / den;
  const double d0 = 2.0 * b / a1 * (std::log(2.0 * gam / den) + 0.5 * (gam + th) * tau);
  return {d0, d1};
}

double rate_mean(const RateParams& rp, double r_t, double tau) {
  const double e = std::exp(-rp.theta_r * tau);
  return r_t * e + rp.b_r / rp.theta_r * (1.0 - e);
}

}  // namespace longevity
