#include "longevity/simulation.h"

#include <cmath>
#include <stdexcept>

namespace longevity {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kPathStream = 1;
constexpr std::uint64_t kClaimStream = 2;

std::vector<double> scaled_weights(const KernelSpec& k, const TimeGrid& g) {
  std::vector<double> w = kernel_cell_weights(k, g);
  for (double& x : w) x /= g.step;
  return w;
}

}  // namespace

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix(seed)), static_cast<std::uint32_t>(splitmix(seed) >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(splitmix(index)),
                    static_cast<std::uint32_t>(splitmix(index) >> 32)};
  return std::mt19937_64(seq);
}

PathSimulator::PathSimulator(const MortalityParams& mp, const RateParams& rp, const TimeGrid& grid)
    : mp_(mp), rp_(rp), grid_(grid) {
  mp_.validate();
  rp_.validate();
  w1_ = scaled_weights(mp.kernels.k1, grid);
  w2_ = scaled_weights(mp.kernels.k2, grid);
  markov1_ = mp.kernels.k1.alpha() == 1.0;
  markov2_ = mp.kernels.k2.alpha() == 1.0;
}

PathBundle PathSimulator::simulate(std::uint64_t seed, std::uint64_t index) const {
  std::mt19937_64 eng = make_engine(seed, kPathStream, index);
  std::normal_distribution<double> z;
  const double sq = std::sqrt(grid_.step);
  std::vector<std::array<double, 3>> dW(grid_.n_steps);
  for (auto& d : dW)
    for (double& x : d) x = sq * z(eng);
  PathBundle p = from_increments(std::move(dW));
  p.seed = seed;
  p.index = index;
  return p;
}

PathBundle PathSimulator::continue_from(const PathBundle& prefix, int n, std::uint64_t seed,
                                        std::uint64_t index) const {
  if (!(prefix.grid == grid_)) throw std::invalid_argument("continue_from: grid mismatch");
  std::mt19937_64 eng = make_engine(seed, kPathStream, index);
  std::normal_distribution<double> z;
  const double sq = std::sqrt(grid_.step);
  std::vector<std::array<double, 3>> dW(grid_.n_steps);
  for (int j = 0; j < grid_.n_steps; ++j) {
    if (j < n) {
      dW[j] = prefix.dW[j];
    } else {
      for (double& x : dW[j]) x = sq * z(eng);
    }
  }
  PathBundle p = from_increments(std::move(dW));
  p.seed = seed;
  p.index = index;
  return p;
}

PathBundle PathSimulator::from_increments(std::vector<std::array<double, 3>> dW) const {
  if (static_cast<int>(dW.size()) != grid_.n_steps) throw std::invalid_argument("increment count must equal n_steps");
  const int n_steps = grid_.n_steps;
  const double h = grid_.step;
  const CointegrationDrift& d = mp_.drift;
  const double beta1 = mp_.kernels.beta1;
  PathBundle p;
  p.grid = grid_;
  p.dW = std::move(dW);
  p.mu.resize(n_steps + 1);
  p.mu_hat.resize(n_steps + 1);
  p.r.resize(n_steps + 1);
  p.int_mu_hat.resize(n_steps + 1);
  p.int_mu2_pos.resize(n_steps + 1);
  p.int_r.resize(n_steps + 1);
  p.disc.resize(n_steps + 1);

  // g_j = (b - Theta mu_j) dt + sigma(mu_j) dW_j; S_i(t_n) = sum_j w_i(n-1-j)/dt g_ij
  std::vector<double> g1(n_steps), g2(n_steps);
  double s1 = 0.0, s2 = 0.0;
  p.mu[0] = mp_.mu0;
  p.r[0] = rp_.r0;
  for (int n = 0; n < n_steps; ++n) {
    const Vec2& m = p.mu[n];
    Vec2 noise = mp_.vol(m) * Vec2{p.dW[n][0], p.dW[n][1]};
    g1[n] = (d.b1 - d.theta1 * m[0]) * h + noise[0];
    g2[n] = (d.b2 - d.beta2 * m[0] - d.theta2 * m[1]) * h + noise[1];
    if (markov1_) {
      s1 += w1_[0] * g1[n];
    } else {
      s1 = 0.0;
      for (int j = 0; j <= n; ++j) s1 += w1_[n - j] * g1[j];
    }
    if (markov2_) {
      s2 += w2_[0] * g2[n];
    } else {
      s2 = 0.0;
      for (int j = 0; j <= n; ++j) s2 += w2_[n - j] * g2[j];
    }
    p.mu[n + 1] = {mp_.mu0[0] + s1, mp_.mu0[1] + beta1 * s1 + s2};

    const double r = p.r[n];
    if (rp_.vol_model == VolModel::vasicek) {
      p.r[n + 1] = r + (rp_.b_r - rp_.theta_r * r) * h + rp_.sigma * p.dW[n][2];
    } else {
      const double rp = std::max(r, 0.0);
      p.r[n + 1] = r + (rp_.b_r - rp_.theta_r * rp) * h + rp_.sigma * std::sqrt(rp) * p.dW[n][2];
    }
  }
  p.int_mu_hat[0] = {0.0, 0.0};
  p.int_mu2_pos[0] = 0.0;
  p.int_r[0] = 0.0;
  p.disc[0] = 1.0;
  for (int n = 0; n <= n_steps; ++n) {
    const double t = grid_.t(n);
    const double m = mp_.baseline(t);
    p.mu_hat[n] = {m + p.mu[n][0], m + p.mu[n][1]};
    if (n > 0) {
      p.int_mu_hat[n] = p.int_mu_hat[n - 1] + 0.5 * h * (p.mu_hat[n - 1] + p.mu_hat[n]);
      p.int_mu2_pos[n] =
          p.int_mu2_pos[n - 1] + 0.5 * h * (std::max(p.mu_hat[n - 1][1], 0.0) + std::max(p.mu_hat[n][1], 0.0));
      p.int_r[n] = p.int_r[n - 1] + 0.5 * h * (p.r[n - 1] + p.r[n]);
      p.disc[n] = std::exp(-p.int_r[n]);
    }
  }
  return p;
}

std::vector<PathBundle> simulate_paths(const MortalityParams& mp, const RateParams& rp, const TimeGrid& grid, int n,
                                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_paths needs n >= 1");
  PathSimulator sim(mp, rp, grid);
  std::vector<PathBundle> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(sim.simulate(seed, static_cast<std::uint64_t>(i)));
  return out;
}

ClaimPath simulate_claims(const LiabilityParams& lp, const PathBundle& path, std::uint64_t seed) {
  const TimeGrid& g = path.grid;
  ClaimPath c;
  c.cell_total.assign(g.n_steps, 0.0);
  c.compensator.assign(g.size(), 0.0);
  std::mt19937_64 eng = make_engine(seed, kClaimStream, path.index);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> size_draw(1.0 / lp.claim_mean);
  for (int j = 0; j < g.n_steps; ++j) {
    const double l0 = lp.c1 * std::max(path.mu_hat[j][1], 0.0);
    const double l1 = lp.c1 * std::max(path.mu_hat[j + 1][1], 0.0);
    c.compensator[j + 1] = c.compensator[j] + 0.5 * g.step * (l0 + l1) * lp.ez();
    const double lmax = std::max(l0, l1);
    if (lmax <= 0.0) continue;
    std::poisson_distribution<int> cand(lmax * g.step);
    const int k = cand(eng);
    for (int i = 0; i < k; ++i) {
      const double u = unif(eng);
      const double accept = unif(eng);
      const double lam = l0 + (l1 - l0) * u;
      if (accept * lmax > lam) continue;
      const double size = lp.law == ClaimLaw::deterministic ? lp.claim_mean : size_draw(eng);
      c.events.push_back({g.t(j) + u * g.step, size});
      c.cell_total[j] += size;
    }
  }
  return c;
}

double annuity_outflow(const PathBundle& path, const LiabilityParams& lp, int n) {
  return lp.c2 * std::exp(-path.int_mu2_pos[n]);
}

namespace {

void check_wealth_inputs(const PathBundle& path, const MarketLoadings& m, const std::vector<double>& u1,
                         const std::vector<double>& u2, int n_end) {
  if (n_end < 0 || n_end > path.grid.n_steps) throw std::invalid_argument("wealth horizon outside the path grid");
  const std::size_t need = static_cast<std::size_t>(n_end);
  if (u1.size() < need || u2.size() < need || m.sigma_l1.size() < need || m.sigma_b.size() < need ||
      m.nu_l.size() < need || m.nu_b.size() < need)
    throw std::invalid_argument("strategy or loadings shorter than the wealth horizon");
  if (path.claims.cell_total.size() < need) throw std::invalid_argument("claims not simulated on this path");
}

// undiscounted increment over [t_n, t_{n+1}) apart from interest on wealth
double budget_increment(const PathBundle& path, const LiabilityParams& lp, const MarketLoadings& m, double u1,
                        double u2, int n) {
  const double h = path.grid.step;
  const double mu2 = path.mu_hat[n][1];
  const double drift = m.nu_l[n] * u1 + m.nu_b[n] * u2 - annuity_outflow(path, lp, n) - lp.ez() * lp.c1 * mu2;
  const double diffusion = u1 * m.sigma_l1[n] * path.dW[n][0] + (u1 + u2) * m.sigma_b[n] * path.dW[n][2];
  const double comp = path.claims.compensator[n + 1] - path.claims.compensator[n];
  return drift * h + diffusion - (path.claims.cell_total[n] - comp);
}

}  // namespace

std::vector<double> evolve_wealth(const PathBundle& path, const LiabilityParams& lp, const MarketLoadings& m,
                                  const std::vector<double>& u1, const std::vector<double>& u2, double x0, int n_end,
                                  int n_start) {
  check_wealth_inputs(path, m, u1, u2, n_end);
  if (n_start < 0 || n_start > n_end) throw std::invalid_argument("wealth start after the horizon");
  std::vector<double> x(n_end + 1, x0);
  for (int n = n_start; n < n_end; ++n) x[n + 1] = x[n] + path.disc[n] * budget_increment(path, lp, m, u1[n], u2[n], n);
  return x;
}

std::vector<double> evolve_wealth_undiscounted(const PathBundle& path, const LiabilityParams& lp,
                                               const MarketLoadings& m, const std::vector<double>& u1,
                                               const std::vector<double>& u2, double x0, int n_end) {
  check_wealth_inputs(path, m, u1, u2, n_end);
  std::vector<double> x(n_end + 1);
  x[0] = x0;
  for (int n = 0; n < n_end; ++n) {
    const double growth = path.disc[n] / path.disc[n + 1];
    x[n + 1] = growth * (x[n] + budget_increment(path, lp, m, u1[n], u2[n], n));
  }
  return x;
}

std::vector<Vec2> reconstruct_innovations(const MortalityParams& mp, const std::vector<Vec2>& mu, double step) {
  if (mu.size() < 2) throw std::invalid_argument("reconstruct_innovations needs at least two nodes");
  const int n_steps = static_cast<int>(mu.size()) - 1;
  const TimeGrid grid(step, n_steps);
  const std::vector<double> w1 = scaled_weights(mp.kernels.k1, grid);
  const std::vector<double> w2 = scaled_weights(mp.kernels.k2, grid);
  const bool markov1 = mp.kernels.k1.alpha() == 1.0, markov2 = mp.kernels.k2.alpha() == 1.0;
  const CointegrationDrift& d = mp.drift;
  std::vector<double> g1(n_steps), g2(n_steps);
  std::vector<Vec2> xi(n_steps);
  for (int n = 0; n < n_steps; ++n) {
    // S(t_{n+1}) = sum_{j<=n} w(n-j) g_j, solved for g_n
    const double s1 = mu[n + 1][0] - mp.mu0[0];
    const double s2 = mu[n + 1][1] - mp.mu0[1] - mp.kernels.beta1 * s1;
    double h1 = 0.0, h2 = 0.0;
    if (markov1) {
      h1 = mu[n][0] - mp.mu0[0];
    } else {
      for (int j = 0; j < n; ++j) h1 += w1[n - j] * g1[j];
    }
    if (markov2) {
      h2 = mu[n][1] - mp.mu0[1] - mp.kernels.beta1 * (mu[n][0] - mp.mu0[0]);
    } else {
      for (int j = 0; j < n; ++j) h2 += w2[n - j] * g2[j];
    }
    g1[n] = (s1 - h1) / w1[0];
    g2[n] = (s2 - h2) / w2[0];
    const Vec2& m = mu[n];
    xi[n] = {g1[n] - (d.b1 - d.theta1 * m[0]) * step, g2[n] - (d.b2 - d.beta2 * m[0] - d.theta2 * m[1]) * step};
  }
  return xi;
}

}  // namespace longevity
