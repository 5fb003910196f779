#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "longevity/conv_core.h"

namespace longevity {

namespace {

using mp_float = boost::multiprecision::cpp_bin_float_50;

constexpr long double kEpsLd = std::numeric_limits<long double>::epsilon();
constexpr int kMaxTerms = 4000;

struct SeriesSum {
  long double sum = 0;
  long double max_term = 0;
  long double err = 0;
  bool finished = false;
};

// Kahan-compensated series in long double. Terms come from lgamma, whose
// rounding grows with its argument, so the error bound tracks that too.
SeriesSum ml_series_ld(double alpha, double beta, double z) {
  SeriesSum s;
  long double c = 0;
  const long double logz = std::log(std::fabs(static_cast<long double>(z)));
  long double worst_lg = 0;
  long double prev = std::numeric_limits<long double>::infinity();
  for (int n = 0; n < kMaxTerms; ++n) {
    long double arg = static_cast<long double>(alpha) * n + beta;
    long double lg = std::lgamma(arg);
    long double mag = std::exp(n * logz - lg);
    long double term = (z < 0 && (n & 1)) ? -mag : mag;
    if (mag > s.max_term) {
      s.max_term = mag;
      worst_lg = std::fabs(lg) + std::fabs(n * logz);
    }
    long double y = term - c;
    long double t = s.sum + y;
    c = (t - s.sum) - y;
    s.sum = t;
    if (n > 2 && mag < prev && mag <= kEpsLd * 1e-3L * std::fabs(s.sum)) {
      s.finished = true;
      break;
    }
    if (n > 2 && mag == 0) {
      s.finished = true;
      break;
    }
    prev = mag;
  }
  s.err = s.max_term * kEpsLd * (8 + worst_lg);
  return s;
}

struct MpSum {
  mp_float sum = 0;
  mp_float max_term = 0;
  bool finished = false;
};

MpSum ml_series_mp(double alpha, double beta, double z) {
  MpSum s;
  const mp_float zz = z;
  const mp_float a = alpha, b = beta;
  mp_float zpow = 1;
  const mp_float tiny = std::numeric_limits<mp_float>::epsilon() * mp_float(1e-3);
  mp_float prev = std::numeric_limits<mp_float>::max();
  for (int n = 0; n < kMaxTerms; ++n) {
    mp_float term = zpow / boost::multiprecision::tgamma(a * n + b);
    mp_float mag = boost::multiprecision::abs(term);
    if (mag > s.max_term) s.max_term = mag;
    s.sum += term;
    if (n > 2 && mag < prev && mag <= tiny * boost::multiprecision::abs(s.sum)) {
      s.finished = true;
      break;
    }
    prev = mag;
    zpow *= zz;
  }
  return s;
}

// 1/Gamma(y), zero at the poles.
long double rgamma(long double y) {
  if (y > 0) return std::exp(-std::lgamma(y));
  long double r = std::round(y);
  if (r == y) return 0.0L;
  const long double pi = 3.141592653589793238462643383279502884L;
  long double s = std::sin(pi * y);
  return s * std::exp(std::lgamma(1 - y)) / pi;
}

// |1/Gamma(y)| without the oscillating sine factor; used to decide where
// the asymptotic series stops shrinking.
long double rgamma_envelope(long double y) {
  if (y > 0) return std::exp(-std::lgamma(y));
  const long double pi = 3.141592653589793238462643383279502884L;
  return std::exp(std::lgamma(1 - y)) / pi;
}

// E_{alpha,beta}(-x) for large x; value and an error estimate.
std::pair<long double, long double> ml_asymptotic_negative(double alpha, double beta, double x) {
  long double sum = 0;
  long double best = std::numeric_limits<long double>::infinity();
  long double err = 0;
  const long double lx = std::log(static_cast<long double>(x));
  for (int k = 1; k < 2000; ++k) {
    long double y = static_cast<long double>(beta) - static_cast<long double>(alpha) * k;
    long double env = std::exp(-k * lx) * rgamma_envelope(y);
    if (env > best) break;
    best = env;
    long double sign = (k & 1) ? 1.0L : -1.0L;  // -(-x)^{-k}
    sum += sign * std::exp(-k * lx) * rgamma(y);
    err = env;
  }
  if (alpha > 1.0 && alpha < 2.0) {
    const long double pi = 3.141592653589793238462643383279502884L;
    std::complex<long double> zeta = std::polar(std::pow(static_cast<long double>(x), 1.0L / alpha), pi / alpha);
    std::complex<long double> ex = std::pow(zeta, 1.0L - beta) * std::exp(zeta);
    sum += 2.0L / alpha * ex.real();
  }
  err += std::fabs(sum) * kEpsLd * 16;
  return {sum, err};
}

}  // namespace

MittagLefflerResult mittag_leffler(double alpha, double beta, double z, double tol) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("mittag_leffler needs alpha, beta > 0");
  if (z == 0.0) return {1.0 / std::tgamma(beta), true};
  if (alpha == 1.0 && beta == 1.0) return {std::exp(z), true};
  if (alpha == 1.0 && beta == 2.0) return {std::expm1(z) / z, true};

  SeriesSum s = ml_series_ld(alpha, beta, z);
  if (s.finished && s.err <= tol * std::fabs(s.sum)) return {static_cast<double>(s.sum), true};

  MittagLefflerResult fallback{static_cast<double>(s.sum), false};
  if (z < 0 && alpha < 2.0) {
    auto [v, err] = ml_asymptotic_negative(alpha, beta, -z);
    if (err <= tol * std::fabs(v)) return {static_cast<double>(v), true};
  }
  // Cancellation in the series costs roughly max_term/|sum| digits; 50
  // digits cover |z| up to a few hundred at the alphas used here.
  MpSum m = ml_series_mp(alpha, beta, z);
  mp_float err = m.max_term * mp_float(1e-47);
  double v = static_cast<double>(m.sum);
  if (m.finished && err <= tol * boost::multiprecision::abs(m.sum)) return {v, true};
  if (std::isfinite(v)) fallback.value = v;
  return fallback;
}

double mittag_leffler_value(double alpha, double beta, double z, double tol) {
  MittagLefflerResult r = mittag_leffler(alpha, beta, z, tol);
  if (!r.converged)
    throw std::runtime_error("Mittag-Leffler evaluation did not converge at z=" + std::to_string(z));
  return r.value;
}

namespace {

template <class Real, class LogGamma>
void double_series_core(double a1, double a2, double y1, double y2, double shift, Real& sum, Real& max_term,
                        bool& finished, LogGamma lgam) {
  using std::abs;
  using std::exp;
  using std::log;
  // y = 0 kills every term beyond the first of that index
  const Real ly1 = y1 > 0 ? Real(log(Real(y1))) : Real(0);
  const Real ly2 = y2 > 0 ? Real(log(Real(y2))) : Real(0);
  const Real eps = std::numeric_limits<Real>::epsilon() * Real(1e-3);
  finished = false;
  Real prev_row = std::numeric_limits<Real>::max();
  for (int n = 0; n < kMaxTerms; ++n) {
    if (n > 0 && y1 == 0) {
      finished = true;
      break;
    }
    Real row = 0, row_mag = 0, prev = std::numeric_limits<Real>::max();
    bool row_done = false;
    for (int m = 0; m < kMaxTerms; ++m) {
      if (m > 0 && y2 == 0) {
        row_done = true;
        break;
      }
      Real arg = Real(a1) * (n + 1) + Real(a2) * (m + 1) + Real(shift);
      Real lmag = Real(n) * ly1 + Real(m) * ly2 - lgam(arg);
      Real mag = exp(lmag);
      Real term = ((n + m) & 1) ? -mag : mag;
      row += term;
      row_mag += mag;
      if (mag > max_term) max_term = mag;
      if (m > 2 && mag < prev && mag <= eps * (abs(sum) + abs(row) + max_term * eps)) {
        row_done = true;
        break;
      }
      prev = mag;
    }
    if (!row_done) return;
    sum += row;
    if (n > 2 && row_mag < prev_row && row_mag <= eps * (abs(sum) + max_term * eps)) {
      finished = true;
      break;
    }
    prev_row = row_mag;
  }
}

}  // namespace

MittagLefflerResult double_ml_series(double a1, double a2, double y1, double y2, double shift, double tol) {
  if (!(a1 > 0) || !(a2 > 0) || y1 < 0 || y2 < 0)
    throw std::invalid_argument("double_ml_series needs positive orders and non-negative arguments");
  {
    long double sum = 0, max_term = 0;
    bool finished = false;
    double_series_core<long double>(a1, a2, y1, y2, shift, sum, max_term, finished,
                                    [](long double x) { return std::lgamma(x); });
    long double err = max_term * kEpsLd * 256;
    if (finished && err <= tol * std::fabs(sum)) return {static_cast<double>(sum), true};
    if (finished && sum == 0 && max_term == 0) return {0.0, true};
  }
  mp_float sum = 0, max_term = 0;
  bool finished = false;
  double_series_core<mp_float>(a1, a2, y1, y2, shift, sum, max_term, finished,
                               [](const mp_float& x) { return boost::multiprecision::lgamma(x); });
  mp_float err = max_term * mp_float(1e-46);
  return {static_cast<double>(sum), finished && err <= tol * abs(sum)};
}

}  // namespace longevity
