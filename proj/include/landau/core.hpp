// Small shared pieces: 2-vectors, 2x2 matrices, the error type used for all
// gate violations, the Japanese bracket <s> = sqrt(1+s^2), and a chunked
// parallel_for. Every diagnostic weight in the library uses this bracket
// convention; changing it would silently rescale all reported constants.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace landau {

using cplx = std::complex<double>;

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};
inline Vec2 operator*(double a, const Vec2& v) { return v * a; }

// Row-major 2x2, used for flow Jacobians.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
  Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
  Mat2 operator*(double s) const { return {s * a11, s * a12, s * a21, s * a22}; }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  Vec2 operator*(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  Mat2& operator+=(const Mat2& o) { a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22; return *this; }
  double det() const { return a11 * a22 - a12 * a21; }
  double max_abs() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)), std::max(std::abs(a21), std::abs(a22)));
  }
};
inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// <s> = sqrt(1+s^2).  All time weights <s>^k in norms and diagnostics use this.
inline double bracket(double s) { return std::sqrt(1.0 + s * s); }

// Error with a stable machine-readable code ("quadrature-failure", ...) plus a
// human message.  Gates that represent legitimate physical outcomes (Penrose
// violation, bootstrap breach) are statuses on results, not exceptions.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Global worker count for parallel_for; 0 = hardware_concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Deterministic chunked parallel map: body(i) for i in [0,n).  Chunks are
// assigned by fixed arithmetic, so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
// Range flavor: body(begin, end) per chunk; cheaper when body has per-chunk state.
void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace landau
