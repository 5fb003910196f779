#pragma once

#include <array>
#include <vector>

#include "longevity/types.h"

namespace longevity {

// K(t) = scale * t^(H-1/2) / Gamma(H+1/2)
struct KernelSpec {
  double hurst = 0.5;
  double scale = 1.0;

  double alpha() const { return hurst + 0.5; }
  double operator()(double t) const;
  void validate() const;
};

// (K1, 0; beta1*K1, K2)
struct KernelMatrix {
  KernelSpec k1;
  KernelSpec k2;
  double beta1 = 0.0;

  Mat2 operator()(double t) const;
};

struct CointegrationDrift {
  double b1 = 0, b2 = 0;
  double theta1 = 1, theta2 = 1;
  double beta1 = 0, beta2 = 0;

  Mat2 theta() const { return {theta1, 0.0, beta2, theta2}; }
  Vec2 b() const { return {b1, b2}; }
};

enum class Quadrature {
  product_trapezoid,  // piecewise-linear smooth factor, exact kernel moments
  left_point          // left-endpoint samples against exact cell integrals
};

// w_j = integral of K over [t_j, t_{j+1}]
std::vector<double> kernel_cell_weights(const KernelSpec& k, const TimeGrid& grid);

// Weight tables for convolving grid samples with a power kernel.
class ConvolutionWeights {
 public:
  ConvolutionWeights(const KernelSpec& k, const TimeGrid& grid);

  const KernelSpec& kernel() const { return kernel_; }
  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& cells() const { return cells_; }
  // product-trapezoid weight on f_0 at node n (n >= 1)
  double endpoint(int n) const { return endpoint_[n]; }
  // product-trapezoid weight on f_{n-m} at node n, for 0 <= m < n
  double interior(int m) const { return interior_[m]; }

  // (F*K)(t_n) from samples f[0..n]; f[n] is ignored by left_point.
  double apply(const double* f, int n, Quadrature q) const;

 private:
  KernelSpec kernel_;
  TimeGrid grid_;
  std::vector<double> cells_;
  std::vector<double> interior_;
  std::vector<double> endpoint_;
};

GridFn convolve(const GridFn& f, const KernelSpec& k, Quadrature q = Quadrature::product_trapezoid);
// row vector f = (f1, f2) against the kernel matrix
std::array<GridFn, 2> convolve(const std::array<GridFn, 2>& f, const KernelMatrix& k,
                               Quadrature q = Quadrature::product_trapezoid);
GridMat convolve(const GridMat& f, const KernelMatrix& k, Quadrature q = Quadrature::product_trapezoid);
// trapezoid rule for the convolution of two sampled functions
GridFn convolve_sampled(const GridFn& a, const GridFn& b);

struct MittagLefflerResult {
  double value = 0.0;
  bool converged = false;
};

// E_{alpha,beta}(z) = sum z^n / Gamma(alpha n + beta)
MittagLefflerResult mittag_leffler(double alpha, double beta, double z, double tol = 1e-10);
// Throws std::runtime_error when the tolerance cannot be met.
double mittag_leffler_value(double alpha, double beta, double z, double tol = 1e-10);

// sum_{n,m>=0} (-y1)^n (-y2)^m / Gamma(a1 (n+1) + a2 (m+1) + shift)
MittagLefflerResult double_ml_series(double a1, double a2, double y1, double y2, double shift,
                                     double tol = 1e-12);

enum class ResolventMethod { closed_form, numeric };

// Resolvent of the second kind of k (k.scale plays the role of c).
GridFn resolvent(const KernelSpec& k, const TimeGrid& grid, ResolventMethod method = ResolventMethod::closed_form);

// E_Theta = K - R_Theta * K together with R_Theta = E_Theta Theta and the
// first and second antiderivatives of E_Theta.
struct ThetaResolvents {
  GridMat e;
  GridMat r;
  GridMat e_int;
  GridMat e_int2;

  const TimeGrid& grid() const { return e.grid; }
};

// max over nodes of |K*R + R - K|. K*R is evaluated as K*K - K*(K - R)
// with K*K exact, so only the smooth remainder K - R goes through quadrature.
double resolvent_identity_residual(const KernelSpec& k, const GridFn& r);

ThetaResolvents e_theta(const CointegrationDrift& drift, const KernelMatrix& kernels, const TimeGrid& grid,
                        ResolventMethod method = ResolventMethod::closed_form);

}  // namespace longevity
