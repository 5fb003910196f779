#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace longevity {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline Vec2& operator+=(Vec2& a, const Vec2& b) {
  a[0] += b[0];
  a[1] += b[1];
  return a;
}
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  static Mat2 identity() { return {1, 0, 0, 1}; }
  static Mat2 diag(double d1, double d2) { return {d1, 0, 0, d2}; }

  Vec2 operator*(const Vec2& v) const { return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]}; }
  Mat2 operator*(const Mat2& m) const {
    return {a11 * m.a11 + a12 * m.a21, a11 * m.a12 + a12 * m.a22,
            a21 * m.a11 + a22 * m.a21, a21 * m.a12 + a22 * m.a22};
  }
  Mat2 operator+(const Mat2& m) const { return {a11 + m.a11, a12 + m.a12, a21 + m.a21, a22 + m.a22}; }
  Mat2 operator-(const Mat2& m) const { return {a11 - m.a11, a12 - m.a12, a21 - m.a21, a22 - m.a22}; }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 inverse() const {
    double d = det();
    if (d == 0.0) throw std::domain_error("singular 2x2 matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  Vec2 row(int i) const { return i == 0 ? Vec2{a11, a12} : Vec2{a21, a22}; }
};

inline Mat2 operator*(double s, const Mat2& m) { return {s * m.a11, s * m.a12, s * m.a21, s * m.a22}; }

// row vector times matrix
inline Vec2 row_times(const Vec2& r, const Mat2& m) {
  return {r[0] * m.a11 + r[1] * m.a21, r[0] * m.a12 + r[1] * m.a22};
}

struct TimeGrid {
  double step = 0.01;
  int n_steps = 0;

  TimeGrid() = default;
  TimeGrid(double dt, int n) : step(dt), n_steps(n) {
    if (!(dt > 0.0) || n <= 0) throw std::invalid_argument("TimeGrid needs step > 0 and n_steps > 0");
  }
  // Grid of the given step that reaches at least `horizon`.
  static TimeGrid covering(double dt, double horizon) {
    return TimeGrid(dt, static_cast<int>(std::ceil(horizon / dt - 1e-9)));
  }

  double horizon() const { return step * n_steps; }
  double t(int j) const { return step * j; }
  std::size_t size() const { return static_cast<std::size_t>(n_steps) + 1; }
  // Node index of a time that must sit on the grid.
  int index_of(double time) const {
    double x = time / step;
    int j = static_cast<int>(std::lround(x));
    if (std::abs(x - j) > 1e-6 || j < 0 || j > n_steps)
      throw std::out_of_range("time is not a node of the grid");
    return j;
  }
  bool operator==(const TimeGrid& o) const { return step == o.step && n_steps == o.n_steps; }
};

struct GridFn {
  TimeGrid grid;
  std::vector<double> values;

  GridFn() = default;
  explicit GridFn(const TimeGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  GridFn(const TimeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("GridFn length mismatch");
  }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

struct GridMat {
  TimeGrid grid;
  std::vector<Mat2> values;

  GridMat() = default;
  explicit GridMat(const TimeGrid& g) : grid(g), values(g.size()) {}
  Mat2& operator[](std::size_t i) { return values[i]; }
  const Mat2& operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
  GridFn entry(int i, int j) const;
};

inline GridFn GridMat::entry(int i, int j) const {
  GridFn out(grid);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Mat2& m = values[k];
    out[k] = i == 0 ? (j == 0 ? m.a11 : m.a12) : (j == 0 ? m.a21 : m.a22);
  }
  return out;
}

// Cumulative trapezoid integral of nodal values.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t j = 1; j < f.size(); ++j) out[j] = out[j - 1] + 0.5 * dt * (f[j - 1] + f[j]);
  return out;
}

}  // namespace longevity
