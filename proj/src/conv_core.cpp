#include "longevity/conv_core.h"

#include <cmath>
#include <stdexcept>

namespace longevity {

double KernelSpec::operator()(double t) const {
  if (t < 0.0) return 0.0;
  const double a = alpha();
  if (a == 1.0) return scale;
  if (t == 0.0) return a > 1.0 ? 0.0 : INFINITY;
  return scale * std::pow(t, a - 1.0) / std::tgamma(a);
}

void KernelSpec::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("hurst must lie in (0,1)");
  if (!(scale > 0.0)) throw std::invalid_argument("kernel scale must be positive");
}

Mat2 KernelMatrix::operator()(double t) const {
  double v1 = k1(t);
  return {v1, 0.0, beta1 * v1, k2(t)};
}

std::vector<double> kernel_cell_weights(const KernelSpec& k, const TimeGrid& grid) {
  k.validate();
  const double a = k.alpha();
  const double c = k.scale / std::tgamma(a + 1.0);
  std::vector<double> w(grid.n_steps);
  if (a == 1.0) {
    for (auto& x : w) x = k.scale * grid.step;
    return w;
  }
  double lo = 0.0;
  for (int j = 0; j < grid.n_steps; ++j) {
    double hi = std::pow(grid.t(j + 1), a);
    w[j] = c * (hi - lo);
    lo = hi;
  }
  return w;
}

ConvolutionWeights::ConvolutionWeights(const KernelSpec& k, const TimeGrid& grid)
    : kernel_(k), grid_(grid), cells_(kernel_cell_weights(k, grid)) {
  const double a = k.alpha();
  const int n = grid.n_steps;
  const double common = k.scale * std::pow(grid.step, a) / std::tgamma(a + 2.0);
  interior_.assign(n + 1, 0.0);
  endpoint_.assign(n + 1, 0.0);
  auto p = [a](double m) { return std::pow(m, a + 1.0); };
  interior_[0] = common;
  for (int m = 1; m <= n; ++m) interior_[m] = common * (p(m + 1.0) - 2.0 * p(m) + p(m - 1.0));
  for (int j = 1; j <= n; ++j) endpoint_[j] = common * (p(j - 1.0) - (j - 1.0 - a) * std::pow(double(j), a));
}

double ConvolutionWeights::apply(const double* f, int n, Quadrature q) const {
  if (n <= 0) return 0.0;
  double s = 0.0;
  if (q == Quadrature::left_point) {
    for (int j = 0; j < n; ++j) s += f[j] * cells_[n - 1 - j];
    return s;
  }
  s = endpoint_[n] * f[0];
  for (int j = 1; j <= n; ++j) s += interior_[n - j] * f[j];
  return s;
}

GridFn convolve(const GridFn& f, const KernelSpec& k, Quadrature q) {
  ConvolutionWeights w(k, f.grid);
  GridFn out(f.grid);
  for (int n = 1; n <= f.grid.n_steps; ++n) out[n] = w.apply(f.values.data(), n, q);
  return out;
}

std::array<GridFn, 2> convolve(const std::array<GridFn, 2>& f, const KernelMatrix& k, Quadrature q) {
  if (!(f[0].grid == f[1].grid)) throw std::invalid_argument("convolve: component grids differ");
  const TimeGrid& g = f[0].grid;
  // (f1, f2) * (K1, 0; b K1, K2) = ((f1 + b f2) * K1, f2 * K2)
  GridFn mixed(g);
  for (std::size_t j = 0; j < g.size(); ++j) mixed[j] = f[0][j] + k.beta1 * f[1][j];
  return {convolve(mixed, k.k1, q), convolve(f[1], k.k2, q)};
}

GridMat convolve(const GridMat& f, const KernelMatrix& k, Quadrature q) {
  GridMat out(f.grid);
  for (int i = 0; i < 2; ++i) {
    std::array<GridFn, 2> row{f.entry(i, 0), f.entry(i, 1)};
    auto r = convolve(row, k, q);
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (i == 0) {
        out[j].a11 = r[0][j];
        out[j].a12 = r[1][j];
      } else {
        out[j].a21 = r[0][j];
        out[j].a22 = r[1][j];
      }
    }
  }
  return out;
}

GridFn convolve_sampled(const GridFn& a, const GridFn& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("convolve_sampled: grid mismatch");
  GridFn out(a.grid);
  const double h = a.grid.step;
  for (int n = 1; n <= a.grid.n_steps; ++n) {
    double s = 0.5 * (a[0] * b[n] + a[n] * b[0]);
    for (int j = 1; j < n; ++j) s += a[j] * b[n - j];
    out[n] = h * s;
  }
  return out;
}

namespace {

// s * t^(a-1+shift) * E_{a, a+shift}(-c t^a), the closed-form resolvent
// family divided by the drift: shift 0 is the value, 1 and 2 its
// first and second antiderivatives.
double scaled_ml(double s, double a, double c, double t, int shift) {
  const double beta = a + shift;
  if (t == 0.0) {
    if (a - 1.0 + shift > 0.0) return 0.0;
    if (a - 1.0 + shift == 0.0) return s / std::tgamma(beta);
    return INFINITY;
  }
  double z = -c * std::pow(t, a);
  return s * std::pow(t, a - 1.0 + shift) * mittag_leffler_value(a, beta, z);
}

// s1 s2 t^(a1+a2-1+shift) sum (-y1)^n (-y2)^m / Gamma(a1(n+1)+a2(m+1)+shift)
double cross_term(double s1, double a1, double c1, double s2, double a2, double c2, double t, int shift) {
  const double p = a1 + a2 - 1.0 + shift;
  if (t == 0.0) return p > 0.0 ? 0.0 : s1 * s2 / std::tgamma(a1 + a2 + shift);
  double y1 = c1 * std::pow(t, a1), y2 = c2 * std::pow(t, a2);
  MittagLefflerResult r = double_ml_series(a1, a2, y1, y2, shift, 1e-10);
  if (!r.converged) throw std::runtime_error("double Mittag-Leffler series did not converge");
  return s1 * s2 * std::pow(t, p) * r.value;
}

// s1 K_{a1} * s2 K_{a2} = s1 s2 t^(a1+a2-1)/Gamma(a1+a2), shifted by repeated integration
double power_conv(double s1, double a1, double s2, double a2, double t, int shift = 0) {
  const double p = a1 + a2 - 1.0 + shift;
  if (t == 0.0) return p > 0.0 ? 0.0 : (p == 0.0 ? s1 * s2 / std::tgamma(a1 + a2 + shift) : INFINITY);
  return s1 * s2 * std::pow(t, p) / std::tgamma(a1 + a2 + shift);
}

double power_int(const KernelSpec& k, double t, int shift) {
  if (t == 0.0) return 0.0;
  return k.scale * std::pow(t, k.alpha() - 1.0 + shift) / std::tgamma(k.alpha() + shift);
}

// product-trapezoid sum over j < n
double history(const ConvolutionWeights& w, const std::vector<double>& f, int n) {
  double s = w.endpoint(n) * f[0];
  for (int j = 1; j < n; ++j) s += w.interior(n - j) * f[j];
  return s;
}

// R = K - G where G = K*R is smoother than R near the origin and solves
// G = K*K - K*G; the quadrature only ever touches G.
GridFn resolvent_numeric(const KernelSpec& k, const TimeGrid& grid) {
  if (k.alpha() < 1.0) throw std::domain_error("numeric resolvent needs hurst >= 1/2");
  ConvolutionWeights w(k, grid);
  const double a = k.alpha(), c = k.scale;
  std::vector<double> g(grid.size(), 0.0);
  g[0] = power_conv(c, a, c, a, 0.0);
  const double diag = 1.0 + w.interior(0);
  for (int n = 1; n <= grid.n_steps; ++n) g[n] = (power_conv(c, a, c, a, grid.t(n)) - history(w, g, n)) / diag;
  GridFn r(grid);
  for (int n = 0; n <= grid.n_steps; ++n) r[n] = k(grid.t(n)) - g[n];
  return r;
}

}  // namespace

GridFn resolvent(const KernelSpec& k, const TimeGrid& grid, ResolventMethod method) {
  k.validate();
  if (method == ResolventMethod::numeric) return resolvent_numeric(k, grid);
  GridFn r(grid);
  const double a = k.alpha(), c = k.scale;
  for (std::size_t j = 0; j < grid.size(); ++j) r[j] = c * scaled_ml(1.0, a, c, grid.t(j), 0);
  return r;
}

namespace {

void fill_r_from_e(ThetaResolvents& out, const CointegrationDrift& d) {
  const Mat2 th = d.theta();
  out.r = GridMat(out.e.grid);
  for (std::size_t j = 0; j < out.e.size(); ++j) out.r[j] = out.e[j] * th;
}

ThetaResolvents e_theta_closed(const CointegrationDrift& d, const KernelMatrix& km, const TimeGrid& grid) {
  ThetaResolvents out{GridMat(grid), GridMat(grid), GridMat(grid), GridMat(grid)};
  const double a1 = km.k1.alpha(), a2 = km.k2.alpha();
  const double s1 = km.k1.scale, s2 = km.k2.scale;
  const double c1 = d.theta1 * s1, c2 = d.theta2 * s2;
  // E21 = beta1 e11 - (beta1 theta2 + beta2) e11 * e22 (with K carrying its own beta1)
  const double b1 = km.beta1;
  const double mix = b1 * d.theta2 + d.beta2;
  GridMat* tables[3] = {&out.e, &out.e_int, &out.e_int2};
  for (int shift = 0; shift < 3; ++shift) {
    GridMat& m = *tables[shift];
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double t = grid.t(static_cast<int>(j));
      double e11 = scaled_ml(s1, a1, c1, t, shift);
      double e22 = scaled_ml(s2, a2, c2, t, shift);
      double cross = mix == 0.0 ? 0.0 : cross_term(s1, a1, c1, s2, a2, c2, t, shift);
      m[j] = {e11, 0.0, b1 * e11 - mix * cross, e22};
    }
  }
  fill_r_from_e(out, d);
  return out;
}

// E = K - G with G = (K Theta)*E = (K Theta)*K - (K Theta)*G, solved for
// the smoother G as in the scalar resolvent.
ThetaResolvents e_theta_numeric(const CointegrationDrift& d, const KernelMatrix& km, const TimeGrid& grid) {
  if (km.k1.alpha() < 1.0 || km.k2.alpha() < 1.0) throw std::domain_error("numeric E_Theta needs hurst >= 1/2");
  ConvolutionWeights w1(km.k1, grid), w2(km.k2, grid);
  const double a1 = km.k1.alpha(), a2 = km.k2.alpha(), s1 = km.k1.scale, s2 = km.k2.scale;
  const double b1 = km.beta1;
  std::vector<double> g11(grid.size()), g21(grid.size()), g22(grid.size());
  auto kk11 = [&](double t) { return d.theta1 * power_conv(s1, a1, s1, a1, t); };
  auto kk22 = [&](double t) { return d.theta2 * power_conv(s2, a2, s2, a2, t); };
  auto kk21 = [&](double t) {
    return b1 * d.theta1 * power_conv(s1, a1, s1, a1, t) + (d.beta2 + b1 * d.theta2) * power_conv(s2, a2, s1, a1, t);
  };
  g11[0] = kk11(0.0);
  g22[0] = kk22(0.0);
  g21[0] = kk21(0.0);
  const double d1 = 1.0 + d.theta1 * w1.interior(0);
  const double d2 = 1.0 + d.theta2 * w2.interior(0);
  for (int n = 1; n <= grid.n_steps; ++n) {
    const double t = grid.t(n);
    g11[n] = (kk11(t) - d.theta1 * history(w1, g11, n)) / d1;
    g22[n] = (kk22(t) - d.theta2 * history(w2, g22, n)) / d2;
    double k1g = history(w1, g11, n) + w1.interior(0) * g11[n];
    double k2g = history(w2, g11, n) + w2.interior(0) * g11[n];
    g21[n] = (kk21(t) - b1 * d.theta1 * k1g - d.beta2 * k2g - d.theta2 * history(w2, g21, n)) / d2;
  }
  ThetaResolvents out{GridMat(grid), GridMat(grid), GridMat(grid), GridMat(grid)};
  const double h = grid.step;
  auto i11 = cumulative_trapezoid(g11, h), i21 = cumulative_trapezoid(g21, h), i22 = cumulative_trapezoid(g22, h);
  auto j11 = cumulative_trapezoid(i11, h), j21 = cumulative_trapezoid(i21, h), j22 = cumulative_trapezoid(i22, h);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.t(static_cast<int>(j));
    const double k1 = km.k1(t), k2 = km.k2(t);
    const double ik1 = power_int(km.k1, t, 1), ik2 = power_int(km.k2, t, 1);
    const double jk1 = power_int(km.k1, t, 2), jk2 = power_int(km.k2, t, 2);
    out.e[j] = {k1 - g11[j], 0.0, b1 * k1 - g21[j], k2 - g22[j]};
    out.e_int[j] = {ik1 - i11[j], 0.0, b1 * ik1 - i21[j], ik2 - i22[j]};
    out.e_int2[j] = {jk1 - j11[j], 0.0, b1 * jk1 - j21[j], jk2 - j22[j]};
  }
  fill_r_from_e(out, d);
  return out;
}

}  // namespace

double resolvent_identity_residual(const KernelSpec& k, const GridFn& r) {
  const double a = k.alpha(), c = k.scale;
  GridFn rem(r.grid);
  for (std::size_t j = 0; j < r.size(); ++j) rem[j] = k(r.grid.t(static_cast<int>(j))) - r[j];
  if (a < 1.0) rem[0] = 0.0;  // K and R share the same singular value at the origin
  GridFn k_rem = convolve(rem, k);
  double m = 0.0;
  for (int n = 1; n <= r.grid.n_steps; ++n) {
    double kr = power_conv(c, a, c, a, r.grid.t(n)) - k_rem[n];
    m = std::max(m, std::abs(kr + r[n] - k(r.grid.t(n))));
  }
  return m;
}

ThetaResolvents e_theta(const CointegrationDrift& drift, const KernelMatrix& kernels, const TimeGrid& grid,
                        ResolventMethod method) {
  kernels.k1.validate();
  kernels.k2.validate();
  if (drift.theta1 < 0.0 || drift.theta2 < 0.0) throw std::invalid_argument("e_theta needs theta >= 0");
  if (drift.beta1 != kernels.beta1) throw std::invalid_argument("e_theta: drift and kernel beta1 differ");
  if (method == ResolventMethod::numeric) return e_theta_numeric(drift, kernels, grid);
  return e_theta_closed(drift, kernels, grid);
}

}  // namespace longevity
