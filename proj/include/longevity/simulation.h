#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "longevity/affine.h"

namespace longevity {

enum class ClaimLaw { deterministic, exponential };

struct LiabilityParams {
  double c1 = 8.0;
  double c2 = 4.0;
  ClaimLaw law = ClaimLaw::deterministic;
  double claim_mean = 1.0;

  double ez() const { return claim_mean; }
  double ez2() const { return law == ClaimLaw::deterministic ? claim_mean * claim_mean : 2.0 * claim_mean * claim_mean; }
};

struct ClaimEvent {
  double time = 0.0;
  double size = 0.0;
};

struct ClaimPath {
  std::vector<ClaimEvent> events;
  std::vector<double> cell_total;   // sum of sizes falling in [t_j, t_{j+1})
  std::vector<double> compensator;  // int_0^t c1 max(mu2_hat, 0) E[z] ds at the nodes
};

struct PathBundle {
  TimeGrid grid;
  std::vector<std::array<double, 3>> dW;  // (W1, W2, W_r) increments over [t_j, t_{j+1})
  std::vector<Vec2> mu;
  std::vector<Vec2> mu_hat;
  std::vector<double> r;
  std::vector<Vec2> int_mu_hat;  // trapezoid int_0^t mu_hat
  std::vector<double> int_mu2_pos;  // trapezoid int_0^t max(mu2_hat, 0)
  std::vector<double> int_r;     // trapezoid int_0^t r
  std::vector<double> disc;      // exp(-int_r)
  ClaimPath claims;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

// Deterministic per-(seed, stream, index) engine.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

class PathSimulator {
 public:
  PathSimulator(const MortalityParams& mp, const RateParams& rp, const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }
  const MortalityParams& mortality() const { return mp_; }
  const RateParams& rate() const { return rp_; }

  PathBundle simulate(std::uint64_t seed, std::uint64_t index) const;
  // Keeps the increments of `prefix` before node n and draws fresh ones afterwards.
  PathBundle continue_from(const PathBundle& prefix, int n, std::uint64_t seed, std::uint64_t index) const;
  // Path driven by the given increments.
  PathBundle from_increments(std::vector<std::array<double, 3>> dW) const;

 private:
  MortalityParams mp_;
  RateParams rp_;
  TimeGrid grid_;
  std::vector<double> w1_, w2_;  // kernel cell weights divided by the step
  bool markov1_, markov2_;
};

std::vector<PathBundle> simulate_paths(const MortalityParams& mp, const RateParams& rp, const TimeGrid& grid, int n,
                                       std::uint64_t seed);

// Thinning on each cell with the piecewise-linear intensity c1 max(mu2_hat, 0).
ClaimPath simulate_claims(const LiabilityParams& lp, const PathBundle& path, std::uint64_t seed);

// Per-node return and volatility loadings of the two bonds over the hedge horizon.
struct MarketLoadings {
  std::vector<double> sigma_l1;
  std::vector<double> sigma_b;
  std::vector<double> nu_l;
  std::vector<double> nu_b;
};

// Discounted wealth X at nodes 0..n_end under amounts u1 (longevity bond), u2 (bond),
// started from x0 at node n_start (earlier entries hold x0).
std::vector<double> evolve_wealth(const PathBundle& path, const LiabilityParams& lp, const MarketLoadings& m,
                                  const std::vector<double>& u1, const std::vector<double>& u2, double x0, int n_end,
                                  int n_start = 0);
// The same budget equation without discounting; X = disc * Xbar.
std::vector<double> evolve_wealth_undiscounted(const PathBundle& path, const LiabilityParams& lp,
                                               const MarketLoadings& m, const std::vector<double>& u1,
                                               const std::vector<double>& u2, double x0, int n_end);

// Annuity outflow c2 exp(-int_0^t max(mu2_hat, 0)) at node n.
double annuity_outflow(const PathBundle& path, const LiabilityParams& lp, int n);

// sigma(mu_j) dW_j implied by an observed path under the scheme of `mp`,
// i.e. the innovations an agent holding that model would read off the data.
std::vector<Vec2> reconstruct_innovations(const MortalityParams& mp, const std::vector<Vec2>& mu, double step);

}  // namespace longevity
