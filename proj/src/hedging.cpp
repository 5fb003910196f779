#include "longevity/hedging.h"

#include <cmath>
#include <stdexcept>

namespace longevity {

TimeGrid HedgeConfig::hedge_grid() const {
  TimeGrid g(step, TimeGrid::covering(step, T0).n_steps);
  g.index_of(T0);
  return g;
}

void HedgeConfig::validate() const {
  if (!(T0 > 0.0) || !(T > T0)) throw std::invalid_argument("hedging needs T > T0 > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("risk aversion must be non-negative");
  if (agent_model().vol_model != mp.vol_model) throw std::invalid_argument("agent and market volatility models differ");
  if (mp.vol_model != rp.vol_model) throw std::invalid_argument("mortality and rate volatility models differ");
  mp.validate();
  agent_model().validate();
  rp.validate();
}

namespace {

double trapezoid_weight(int j, int last, double h) { return (j == 0 || j == last) ? 0.5 * h : h; }

}  // namespace

EquilibriumHedger::EquilibriumHedger(const HedgeConfig& cfg)
    : cfg_(cfg),
      agent_(cfg.agent_model()),
      agent_bar_(shifted(agent_, cfg.prices, cfg.hedging_sign)),
      rp_bar_(shifted(cfg.rp, cfg.prices, cfg.hedging_sign)),
      grid_(cfg.hedge_grid()),
      market_(cfg.mp, cfg.rp, cfg.prices, cfg.T, cfg.step, cfg.pricing_sign),
      agent_market_(agent_, cfg.rp, cfg.prices, cfg.T, cfg.step, cfg.pricing_sign),
      agent_is_market_(!cfg.agent) {
  cfg_.validate();
  th_bar_ = e_theta(agent_bar_.drift, agent_bar_.kernels, grid_);
  const RiccatiProblem prob{{0.0, -1.0}, agent_bar_.drift, agent_bar_.kernels, agent_bar_.quad_coeffs()};
  psi_bar_ = agent_bar_.vol_model == VolModel::vasicek ? linear_riccati({0.0, -1.0}, th_bar_)
                                                       : solve_riccati(prob, grid_);
  const int N = grid_.n_steps;
  d_bar_.resize(N + 1);
  int_m2_.resize(N + 1);
  m2_.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    d_bar_[j] = affine_rate_ode(rp_bar_, grid_.t(j));
    int_m2_[j] = agent_.baseline.integral(0.0, grid_.t(j));
    m2_[j] = agent_.baseline(grid_.t(j));
  }
}

HedgeComponents EquilibriumHedger::components(const PathBundle& path) const {
  const int N = grid_.n_steps;
  const double h = grid_.step;
  if (path.grid.step != h || path.grid.n_steps < N) throw std::invalid_argument("path grid does not cover the hedge grid");
  const LiabilityParams& lp = cfg_.lp;
  const MarketPrices& pr = cfg_.prices;
  const bool cir = agent_.vol_model == VolModel::cir;

  std::vector<Vec2> xi;
  if (agent_is_market_) {
    xi.resize(N);
    for (int n = 0; n < N; ++n) xi[n] = agent_.vol(path.mu[n]) * Vec2{path.dW[n][0], path.dW[n][1]};
  } else {
    xi = reconstruct_innovations(agent_, std::vector<Vec2>(path.mu.begin(), path.mu.begin() + N + 1), h);
  }

  HedgeComponents c;
  c.grid = grid_;
  c.gamma.resize(N + 1);
  c.growth.resize(N + 1);
  c.agent = agent_market_.loadings(path, N);
  ConditionalMean cm(agent_bar_, th_bar_);
  double past = 0.0;
  const double ez = lp.ez();
  for (int n = 0; n <= N; ++n) {
    c.growth[n] = 1.0 / path.disc[n];
    if (n > 0) past -= 0.5 * h * (path.mu[n - 1][1] + path.mu[n][1]);
    GammaValues& g = c.gamma[n];
    if (n < N) {
      const std::vector<double> y = functional_Y_curve(agent_bar_, {0.0, -1.0}, psi_bar_, cm, past, N);
      const double r = path.r[n];
      const Vec2& mu = path.mu[n];
      const Mat2 sig = agent_.vol(mu);
      const double sig_r = cfg_.rp.vol(r);
      const int last = N - n;
      for (int j = 0; j <= last; ++j) {
        const int k = n + j;
        const double w = trapezoid_weight(j, last, h);
        const double disc = path.disc[n] * std::exp(d_bar_[j].d0 + d_bar_[j].d1 * r);
        const double survival = lp.c2 * std::exp(-int_m2_[k] + y[j]);
        const Vec2 mean = cm.mean(k);
        const double outflow = survival + ez * lp.c1 * (m2_[k] + mean[1]);
        const Vec2 dpsi = row_times(psi_bar_.at(j), sig);  // (sigma^T psi^T)^T
        const Mat2& e = th_bar_.e[j];
        const Vec2 de = row_times(Vec2{e.a21, e.a22}, sig);
        g.Gamma -= w * disc * outflow;
        g.gamma1 -= w * disc * (survival * dpsi[0] + ez * lp.c1 * de[0]);
        g.gamma2 -= w * disc * (survival * dpsi[1] + ez * lp.c1 * de[1]);
        g.gamma3 -= w * disc * d_bar_[j].d1 * sig_r * outflow;
        if (!cir) {
          g.Gamma_slope += w * (pr.phi1 * pr.phi1 + pr.vartheta * pr.vartheta);
        } else {
          const double q1 = pr.phi1 * pr.phi1 * agent_.sigma.a11 * agent_.sigma.a11;
          const double qr = pr.vartheta * pr.vartheta * cfg_.rp.sigma * cfg_.rp.sigma;
          g.Gamma_slope += w * (q1 * mean[0] + qr * rate_mean(rp_bar_, r, grid_.t(j)));
          g.gamma1_slope += w * q1 * e.a11 * sig.a11;
          g.gamma3_slope += w * qr * std::exp(-rp_bar_.theta_r * grid_.t(j)) * sig_r;
        }
      }
      cm.push(xi[n] - (cfg_.hedging_sign * h) * risk_drift(agent_, pr, mu));
    }
  }
  return c;
}

namespace {

// u = growth (S^T S)^{-1} (lambda nu - S^T gamma) with S^T = [[sl, 0, sb], [0, 0, sb]]
Vec2 general_control(double growth, double sl, double sb, double nu_l, double nu_b, double lambda, double g1,
                     double g3) {
  const Mat2 m{sl * sl + sb * sb, sb * sb, sb * sb, sb * sb};
  const Vec2 rhs{lambda * nu_l - (sl * g1 + sb * g3), lambda * nu_b - sb * g3};
  return growth * (m.inverse() * rhs);
}

double at_lambda(double base, double slope, double lambda) { return base + lambda * slope; }

StrategySeries empty_series(const HedgeComponents& c) {
  StrategySeries s;
  s.grid = c.grid;
  const std::size_t n = c.grid.size();
  s.u1.assign(n, 0.0);
  s.u2.assign(n, 0.0);
  s.gamma1.resize(n);
  s.gamma2.resize(n);
  s.gamma3.resize(n);
  s.Gamma.resize(n);
  return s;
}

void fill_gammas(const HedgeComponents& c, double lambda, StrategySeries& s) {
  for (std::size_t n = 0; n < c.gamma.size(); ++n) {
    const GammaValues& g = c.gamma[n];
    s.gamma1[n] = at_lambda(g.gamma1, g.gamma1_slope, lambda);
    s.gamma2[n] = at_lambda(g.gamma2, g.gamma2_slope, lambda);
    s.gamma3[n] = at_lambda(g.gamma3, g.gamma3_slope, lambda);
    s.Gamma[n] = at_lambda(g.Gamma, g.Gamma_slope, lambda);
  }
}

}  // namespace

StrategySeries EquilibriumHedger::strategy(const HedgeComponents& c, double lambda) const {
  StrategySeries s = empty_series(c);
  fill_gammas(c, lambda, s);
  const MarketLoadings& m = c.agent;
  for (int n = 0; n < c.grid.n_steps; ++n) {
    if (std::abs(m.sigma_l1[n]) < 1e-300 || std::abs(m.sigma_b[n]) < 1e-300)
      throw std::domain_error("bond volatility vanishes; the strategy is undefined");
    const Vec2 u = general_control(c.growth[n], m.sigma_l1[n], m.sigma_b[n], m.nu_l[n], m.nu_b[n], lambda,
                                   s.gamma1[n], s.gamma3[n]);
    s.u1[n] = u[0];
    s.u2[n] = u[1];
  }
  return s;
}

StrategySeries EquilibriumHedger::no_hedge(const HedgeComponents& c, double lambda) const {
  StrategySeries s = empty_series(c);
  fill_gammas(c, lambda, s);
  const MarketLoadings& m = c.agent;
  for (int n = 0; n < c.grid.n_steps; ++n) {
    if (std::abs(m.sigma_b[n]) < 1e-300) throw std::domain_error("bond volatility vanishes; the strategy is undefined");
    const double sb = m.sigma_b[n];
    s.u2[n] = c.growth[n] * (lambda * m.nu_b[n] - sb * s.gamma3[n]) / (sb * sb);
  }
  return s;
}

double EquilibriumHedger::equilibrium_residual(const HedgeComponents& c, const StrategySeries& s, double lambda,
                                               int n) const {
  const MarketLoadings& m = c.agent;
  const double disc = 1.0 / c.growth[n];
  const double sl = m.sigma_l1[n], sb = m.sigma_b[n];
  // k1 = disc sigma_S u + gamma, p(t;t) = -lambda
  const double k1 = disc * sl * s.u1[n] + s.gamma1[n];
  const double k3 = disc * sb * (s.u1[n] + s.u2[n]) + s.gamma3[n];
  const Vec2 lam{disc * (-lambda * m.nu_l[n] + sl * k1 + sb * k3), disc * (-lambda * m.nu_b[n] + sb * k3)};
  const double scale = disc * (lambda * (std::abs(m.nu_l[n]) + std::abs(m.nu_b[n])) +
                               std::abs(sl * s.gamma1[n]) + 2.0 * std::abs(sb * s.gamma3[n]));
  const double num = std::hypot(lam[0], lam[1]);
  return scale > 0.0 ? num / scale : num;
}

GammaValues gamma_solution(const HedgeConfig& cfg, const PathBundle& path, double t) {
  EquilibriumHedger h(cfg);
  HedgeComponents c = h.components(path);
  const GammaValues& g = c.gamma[c.grid.index_of(t)];
  return {at_lambda(g.Gamma, g.Gamma_slope, cfg.lambda), g.Gamma_slope,
          at_lambda(g.gamma1, g.gamma1_slope, cfg.lambda), g.gamma1_slope,
          at_lambda(g.gamma2, g.gamma2_slope, cfg.lambda), g.gamma2_slope,
          at_lambda(g.gamma3, g.gamma3_slope, cfg.lambda), g.gamma3_slope};
}

StrategySeries equilibrium_strategy(const HedgeConfig& cfg, const PathBundle& path) {
  return EquilibriumHedger(cfg).strategy(path);
}

StrategySeries no_hedge_strategy(const HedgeConfig& cfg, const PathBundle& path) {
  return EquilibriumHedger(cfg).no_hedge(path);
}

std::vector<SpikeResult> spike_variation(const EquilibriumHedger& hedger, const PathBundle& path, int n, double eps,
                                         const std::vector<Vec2>& etas, int inner, std::uint64_t seed) {
  const HedgeConfig& cfg = hedger.config();
  const TimeGrid grid = cfg.hedge_grid();
  const int N = grid.n_steps;
  const int width = static_cast<int>(std::lround(eps / grid.step));
  if (n < 0 || n >= N || width < 1 || n + width > N) throw std::invalid_argument("spike window outside [0, T0]");
  if (inner < 2) throw std::invalid_argument("spike variation needs at least two inner paths");
  const double h = grid.step;
  PathSimulator sim(cfg.mp, cfg.rp, path.grid);

  const std::size_t k = etas.size();
  std::vector<double> x(inner);
  std::vector<std::vector<double>> d(k, std::vector<double>(inner));
  for (int i = 0; i < inner; ++i) {
    PathBundle q = sim.continue_from(path, n, seed, static_cast<std::uint64_t>(i));
    q.claims = simulate_claims(cfg.lp, q, seed);
    const StrategySeries s = hedger.strategy(hedger.components(q), cfg.lambda);
    const MarketLoadings m = hedger.market().loadings(q, N);
    // only increments after t matter once F_t is fixed
    x[i] = evolve_wealth(q, cfg.lp, m, s.u1, s.u2, 0.0, N, n).back();
    for (std::size_t e = 0; e < k; ++e) {
      double acc = 0.0;
      for (int j = n; j < n + width; ++j) {
        const Vec2& eta = etas[e];
        acc += q.disc[j] * ((m.nu_l[j] * eta[0] + m.nu_b[j] * eta[1]) * h + eta[0] * m.sigma_l1[j] * q.dW[j][0] +
                            (eta[0] + eta[1]) * m.sigma_b[j] * q.dW[j][2]);
      }
      d[e][i] = acc;
    }
  }
  double xm = 0.0;
  for (double v : x) xm += v;
  xm /= inner;
  std::vector<SpikeResult> out(k);
  for (std::size_t e = 0; e < k; ++e) {
    double dm = 0.0;
    for (double v : d[e]) dm += v;
    dm /= inner;
    // J difference = Cov(X, D) + Var(D)/2 - lambda E[D], one term per inner path
    std::vector<double> term(inner);
    double mean = 0.0;
    for (int i = 0; i < inner; ++i) {
      const double dd = d[e][i] - dm;
      term[i] = (x[i] - xm) * dd * inner / (inner - 1.0) + 0.5 * dd * dd * inner / (inner - 1.0) -
                cfg.lambda * d[e][i];
      mean += term[i];
    }
    mean /= inner;
    double var = 0.0;
    for (double v : term) var += (v - mean) * (v - mean);
    var /= (inner - 1.0);
    const double width_t = width * h;
    out[e] = {mean / width_t, std::sqrt(var / inner) / width_t, inner};
  }
  return out;
}

}  // namespace longevity
