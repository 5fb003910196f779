#pragma once

#include <vector>

#include "longevity/riccati.h"

namespace longevity {

enum class VolModel { vasicek, cir };

// m(t) = a_m (t + age_offset)^(g - 1)
struct Baseline {
  double a_m = 4.212e-6;
  double g = 3.68;
  double age_offset = 25.0;

  double operator()(double t) const;
  double integral(double t0, double t1) const;
};

struct MortalityParams {
  CointegrationDrift drift{1e-4, 1e-4, 0.5, 0.6, 1.0, 0.6};
  KernelMatrix kernels{{0.83, 1.0}, {0.5, 1.0}, 1.0};
  VolModel vol_model = VolModel::vasicek;
  // Vasicek: constant lower-triangular loading. CIR: diag(sigma1~, sigma2~),
  // scaled by sqrt(mu_i) at evaluation.
  Mat2 sigma{2e-3, 0.0, 0.0, 1e-3};
  Vec2 mu0{8e-5, 8e-5};
  Baseline baseline;

  Mat2 vol(const Vec2& mu) const;
  // a(mu) = sigma(mu) sigma(mu)^T
  Mat2 diffusion(const Vec2& mu) const;
  // coefficients of the quadratic Riccati term, absent for Vasicek
  std::optional<Vec2> quad_coeffs() const;
  void validate() const;
};

struct RateParams {
  double b_r = 0.02;
  double theta_r = 0.6;
  double sigma = 0.01;  // sigma_r, or sigma_r~ for CIR
  double r0 = 0.04;
  VolModel vol_model = VolModel::vasicek;

  double vol(double r) const;
  void validate() const;
};

// Constant market prices of risk: (phi1, vartheta) for Vasicek, (phi1~, vartheta~) for CIR.
struct MarketPrices {
  double phi1 = 0.1;
  double vartheta = 0.1;
};

// Parameters under the measure with dW' = dW - sign * zeta dt, zeta the
// market price of risk. sign = +1 gives the bond-pricing convention,
// sign = -1 the measure used for the hedging BSDE.
MortalityParams shifted(const MortalityParams& mp, const MarketPrices& prices, double sign);
RateParams shifted(const RateParams& rp, const MarketPrices& prices, double sign);
// sigma(mu) times the price-of-risk vector (phi(mu), 0): the drift added per unit sign
Vec2 risk_drift(const MortalityParams& mp, const MarketPrices& prices, const Vec2& mu);

// Y_0(t_n) = int_0^t [f mu0 + psi (b - Theta mu0) + 1/2 psi a(mu0) psi^T] for every node
GridFn laplace_exponent(const MortalityParams& mp, const Vec2& f, const RiccatiSolution& psi);
// E[exp(int_0^T f mu)] for T on the grid
double laplace_at_zero(const MortalityParams& mp, const Vec2& f, const TimeGrid& grid, double T);

// Conditional mean E_t[mu(s)] on a grid, updated one innovation at a time.
// Innovations are eta_j = sigma(mu_j) dW_j in whichever measure the drift
// parameters describe.
class ConditionalMean {
 public:
  ConditionalMean(const MortalityParams& mp, const ThetaResolvents& th);

  const TimeGrid& grid() const { return th_.grid(); }
  int now() const { return now_; }
  void reset();
  // moves the current time from t_now to t_{now+1}
  void push(const Vec2& eta);
  // E_{t_now}[mu(t_k)] for k >= now
  Vec2 mean(int k) const;
  // int_{t_now}^{t_k} E_{t_now}[mu(s)] ds for k = now..n_steps, stored at k - now
  std::vector<Vec2> mean_integrals() const;
  // the stochastic part M(t_now, t_k)
  const Vec2& noise(int k) const { return acc_[k]; }

 private:
  const ThetaResolvents& th_;
  Vec2 mu0_;
  Vec2 slope_;             // b - Theta mu0
  std::vector<Mat2> avg_;  // cell averages of E_Theta
  std::vector<Vec2> acc_;
  int now_ = 0;
};

// Y_t(T) = int_0^T f E_t[mu] + 1/2 int_t^T psi(T-s) a(E_t[mu_s]) psi(T-s)^T ds;
// mu_obs holds the observed path up to the current node.
double functional_Y(const MortalityParams& mp, const Vec2& f, const RiccatiSolution& psi, const ConditionalMean& cm,
                    const std::vector<Vec2>& mu_obs, int T_index);

// Y_t(s) for s = t_now..s_end, stored at s - now; `past` is int_0^t f mu
// along the observed path. Same quadrature as functional_Y.
std::vector<double> functional_Y_curve(const MortalityParams& mp, const Vec2& f, const RiccatiSolution& psi,
                                       const ConditionalMean& cm, double past, int s_end);

// E[exp(-int_t^T r) | r_t] = exp(d0 + d1 r_t) as a function of tau = T - t.
struct RateCoefficients {
  double d0 = 0.0;
  double d1 = 0.0;
};
RateCoefficients affine_rate_ode(const RateParams& rp, double tau);
// conditional mean of r(t + tau) given r(t)
double rate_mean(const RateParams& rp, double r_t, double tau);

}  // namespace longevity
