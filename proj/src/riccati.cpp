#include "longevity/riccati.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace longevity {

RiccatiSolution linear_riccati(const Vec2& f, const ThetaResolvents& th) {
  const TimeGrid& g = th.grid();
  RiccatiSolution s{GridFn(g), GridFn(g), GridFn(g), GridFn(g)};
  for (std::size_t j = 0; j < g.size(); ++j) {
    Vec2 p = row_times(f, th.e_int[j]);
    Vec2 q = row_times(f, th.e_int2[j]);
    s.psi1[j] = p[0];
    s.psi2[j] = p[1];
    s.int1[j] = q[0];
    s.int2[j] = q[1];
  }
  return s;
}

namespace {

bool is_linear(const RiccatiProblem& p) {
  return !p.quad_coeffs || ((*p.quad_coeffs)[0] == 0.0 && (*p.quad_coeffs)[1] == 0.0);
}

// Fractional Adams predictor (left-point cell weights) followed by one
// product-trapezoid corrector sweep at each node.
RiccatiSolution step_riccati(const RiccatiProblem& p, const TimeGrid& grid, double bound) {
  const CointegrationDrift& d = p.drift;
  const double b1 = p.kernels.beta1;
  const Vec2 q = p.quad_coeffs.value_or(Vec2{0.0, 0.0});
  ConvolutionWeights w1(p.kernels.k1, grid), w2(p.kernels.k2, grid);
  const int n_steps = grid.n_steps;
  std::vector<double> h1(grid.size()), h2(grid.size());
  RiccatiSolution s{GridFn(grid), GridFn(grid), GridFn(grid), GridFn(grid)};

  // psi1 = (g1 + beta1 g2) * K1, psi2 = g2 * K2
  auto drive = [&](double x1, double x2, double& out1, double& out2) {
    double g1 = p.f[0] - (x1 * d.theta1 + x2 * d.beta2) + 0.5 * q[0] * x1 * x1;
    double g2 = p.f[1] - x2 * d.theta2 + 0.5 * q[1] * x2 * x2;
    out1 = g1 + b1 * g2;
    out2 = g2;
  };
  drive(0.0, 0.0, h1[0], h2[0]);
  for (int n = 1; n <= n_steps; ++n) {
    double pred1 = w1.apply(h1.data(), n, Quadrature::left_point);
    double pred2 = w2.apply(h2.data(), n, Quadrature::left_point);
    drive(pred1, pred2, h1[n], h2[n]);
    double x1 = w1.apply(h1.data(), n, Quadrature::product_trapezoid);
    double x2 = w2.apply(h2.data(), n, Quadrature::product_trapezoid);
    if (!(std::abs(x1) <= bound && std::abs(x2) <= bound))
      throw std::runtime_error("Volterra-Riccati solution exceeded the blow-up bound at t=" +
                               std::to_string(grid.t(n)));
    s.psi1[n] = x1;
    s.psi2[n] = x2;
    drive(x1, x2, h1[n], h2[n]);
  }
  s.int1.values = cumulative_trapezoid(s.psi1.values, grid.step);
  s.int2.values = cumulative_trapezoid(s.psi2.values, grid.step);
  return s;
}

}  // namespace

RiccatiSolution solve_riccati(const RiccatiProblem& p, const TimeGrid& grid, const RiccatiOptions& opt) {
  if (p.quad_coeffs && ((*p.quad_coeffs)[0] < 0.0 || (*p.quad_coeffs)[1] < 0.0))
    throw std::invalid_argument("quadratic Riccati coefficients must be non-negative");
  if (p.drift.beta1 != p.kernels.beta1) throw std::invalid_argument("solve_riccati: drift and kernel beta1 differ");
  if (opt.scheme == RiccatiScheme::automatic && is_linear(p))
    return linear_riccati(p.f, e_theta(p.drift, p.kernels, grid));
  return step_riccati(p, grid, opt.blowup_bound);
}

}  // namespace longevity
