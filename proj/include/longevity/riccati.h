#pragma once

#include <optional>

#include "longevity/conv_core.h"

namespace longevity {

// psi = (f - psi Theta + 1/2 A(psi)) * K with A(u) = (q1 u1^2, q2 u2^2)
struct RiccatiProblem {
  Vec2 f{0.0, 0.0};
  CointegrationDrift drift;
  KernelMatrix kernels;
  std::optional<Vec2> quad_coeffs;  // (sigma1~^2, sigma2~^2); absent for the linear case
};

struct RiccatiSolution {
  GridFn psi1, psi2;
  GridFn int1, int2;  // running integrals of psi1, psi2

  const TimeGrid& grid() const { return psi1.grid; }
  Vec2 at(int n) const { return {psi1[n], psi2[n]}; }
};

enum class RiccatiScheme {
  automatic,     // closed form through E_Theta when the problem is linear
  time_stepping  // predictor-corrector for every problem
};

struct RiccatiOptions {
  RiccatiScheme scheme = RiccatiScheme::automatic;
  double blowup_bound = 1e6;
};

// Throws std::runtime_error when |psi| exceeds the blow-up bound.
RiccatiSolution solve_riccati(const RiccatiProblem& p, const TimeGrid& grid, const RiccatiOptions& opt = {});

// psi = f * E_Theta for a given table
RiccatiSolution linear_riccati(const Vec2& f, const ThetaResolvents& th);

}  // namespace longevity
