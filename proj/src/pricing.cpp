#include "longevity/pricing.h"

#include <cmath>
#include <stdexcept>

namespace longevity {

BondQuote zero_coupon_bond(const RateParams& rp, const MarketPrices& prices, double t, double T, double r_t,
                           double sign) {
  if (t > T) throw std::invalid_argument("zero_coupon_bond needs t <= T");
  const RateCoefficients d = affine_rate_ode(shifted(rp, prices, sign), T - t);
  BondQuote q;
  q.t = t;
  q.T = T;
  q.price = std::exp(d.d0 + d.d1 * r_t);
  q.sigma_b = d.d1 * rp.vol(r_t);
  return q;
}

BondMarket::BondMarket(const MortalityParams& mp, const RateParams& rp, const MarketPrices& prices, double T,
                       double step, double sign)
    : mp_(mp),
      rp_(rp),
      prices_(prices),
      T_(T),
      sign_(sign),
      grid_(step, TimeGrid::covering(step, T).n_steps),
      mp_q_(shifted(mp, prices, sign)),
      rp_q_(shifted(rp, prices, sign)) {
  if (!(T > 0.0)) throw std::invalid_argument("bond maturity must be positive");
  grid_.index_of(T);
  mp_.validate();
  rp_.validate();
  psi_ = solve_riccati({{-1.0, 0.0}, mp_q_.drift, mp_q_.kernels, mp_q_.quad_coeffs()}, grid_);
  th_ = e_theta(mp_q_.drift, mp_q_.kernels, grid_);
}

BondQuote BondMarket::bond(double t, double r_t) const { return zero_coupon_bond(rp_, prices_, t, T_, r_t, sign_); }

BondQuote BondMarket::longevity_initial() const {
  const int n = grid_.n_steps;
  BondQuote q = bond(0.0, rp_.r0);
  const double y = laplace_exponent(mp_q_, {-1.0, 0.0}, psi_)[n];
  q.price *= std::exp(y - mp_.baseline.integral(0.0, T_));
  q.sigma_l = {psi_.psi1[n] * mp_.vol(mp_.mu0).a11, 0.0};
  return q;
}

Vec2 BondMarket::prices_of_risk(const Vec2& mu, double r) const {
  if (mp_.vol_model == VolModel::vasicek) return {prices_.phi1, prices_.vartheta};
  return {prices_.phi1 * mp_.vol(mu).a11, prices_.vartheta * rp_.vol(r)};
}

Vec2 BondMarket::volatilities(const PathBundle& path, int n) const {
  const int to_maturity = grid_.n_steps - n;
  if (to_maturity < 0) throw std::out_of_range("node beyond the bond maturity");
  const double d1 = affine_rate_ode(rp_q_, grid_.step * to_maturity).d1;
  return {psi_.psi1[to_maturity] * mp_.vol(path.mu[n]).a11, d1 * rp_.vol(path.r[n])};
}

std::vector<BondQuote> BondMarket::longevity_along(const PathBundle& path, int n_end) const {
  if (path.grid.step != grid_.step) throw std::invalid_argument("path step differs from the bond grid");
  if (n_end > path.grid.n_steps || n_end > grid_.n_steps) throw std::out_of_range("quote horizon beyond the path");
  ConditionalMean cm(mp_q_, th_);
  const int N = grid_.n_steps;
  const double h = grid_.step;
  std::vector<BondQuote> out;
  out.reserve(n_end + 1);
  for (int n = 0; n <= n_end; ++n) {
    const double t = grid_.t(n);
    const std::vector<double> y = functional_Y_curve(mp_q_, {-1.0, 0.0}, psi_, cm, 0.0, N);
    BondQuote q = bond(t, path.r[n]);
    q.price *= std::exp(y.back() - mp_.baseline.integral(t, T_));
    q.sigma_l = {psi_.psi1[N - n] * mp_.vol(path.mu[n]).a11, 0.0};
    out.push_back(q);
    if (n < n_end) {
      const Vec2& mu = path.mu[n];
      Vec2 eta = mp_.vol(mu) * Vec2{path.dW[n][0], path.dW[n][1]};
      eta = eta - (sign_ * h) * risk_drift(mp_, prices_, mu);
      cm.push(eta);
    }
  }
  return out;
}

MarketLoadings BondMarket::loadings(const PathBundle& path, int n_end) const {
  if (n_end > path.grid.n_steps || n_end > grid_.n_steps) throw std::out_of_range("loading horizon beyond the path");
  MarketLoadings m;
  m.sigma_l1.resize(n_end);
  m.sigma_b.resize(n_end);
  m.nu_l.resize(n_end);
  m.nu_b.resize(n_end);
  for (int n = 0; n < n_end; ++n) {
    const Vec2 v = volatilities(path, n);
    const Vec2 z = prices_of_risk(path.mu[n], path.r[n]);
    m.sigma_l1[n] = v[0];
    m.sigma_b[n] = v[1];
    m.nu_b[n] = z[1] * v[1];
    m.nu_l[n] = m.nu_b[n] + z[0] * v[0];
  }
  return m;
}

}  // namespace longevity
