#ifndef OPALG_INTERVAL_HPP
#define OPALG_INTERVAL_HPP

// Closed real intervals with outward rounding. Each primitive is computed in
// round-to-nearest; an error-free transformation (TwoSum, fma remainder)
// tells whether and in which direction the result was rounded, and the
// endpoint is stepped to the next representable value when needed. exp is
// widened by two ulps unconditionally (except exp(0) = 1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "opalg/errors.hpp"

namespace opalg {

namespace rounded {

inline double step(double r, int dir) {
  return std::nextafter(r, dir < 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity());
}

/// r is the round-to-nearest result and err the sign of (exact - r)
inline double directed(double r, double err, int dir) {
  if (err == 0.0) return r;
  if ((err > 0.0) == (dir > 0)) return step(r, dir);
  return r;
}

// below this magnitude the fma remainders may themselves be inexact
inline constexpr double tiny = 1e-290;

inline double add(double a, double b, int dir) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return directed(s, e, dir);
}

inline double mul(double a, double b, int dir) {
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  if (p != 0.0 && std::abs(p) < tiny) return step(p, dir);
  if (p == 0.0) return (a == 0.0 || b == 0.0) ? 0.0 : step(p, dir);
  return directed(p, std::fma(a, b, -p), dir);
}

inline double div(double a, double b, int dir) {
  const double q = a / b;
  if (!std::isfinite(q)) return q;
  if (q == 0.0) return a == 0.0 ? 0.0 : step(q, dir);
  if (std::abs(q) < tiny || std::abs(a) < tiny) return step(q, dir);
  const double r = std::fma(-q, b, a);  // exact - q = r / b
  return directed(q, b > 0.0 ? r : -r, dir);
}

inline double sqrt(double a, int dir) {
  const double s = std::sqrt(a);
  if (s == 0.0 || !std::isfinite(s)) return a == 0.0 ? 0.0 : step(s, dir);
  if (a < tiny) return step(s, dir);
  return directed(s, std::fma(-s, s, a), dir);
}

}  // namespace rounded

class Interval {
public:
  Interval() = default;
  Interval(double x) : lo_(x), hi_(x) { check(); }  // NOLINT: implicit from exact doubles
  Interval(double lo, double hi) : lo_(lo), hi_(hi) { check(); }

  /// Encloses the decimal number closest to x, i.e. [prev(x), next(x)].
  static Interval around(double x) { return {down(x), up(x)}; }
  static Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_)};
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double mid() const noexcept { return 0.5 * (lo_ + hi_); }
  double radius() const noexcept { return 0.5 * (hi_ - lo_); }
  bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const noexcept { return lo_ <= o.lo_ && o.hi_ <= hi_; }

  /// Same midpoint, radius multiplied by `factor` (rounded outward).
  Interval inflated(double factor) const {
    const double m = mid();
    const double r = up(radius() * factor);
    return {down(m - r), up(m + r)};
  }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return {rounded::add(a.lo_, b.lo_, -1), rounded::add(a.hi_, b.hi_, +1)};
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return {rounded::add(a.lo_, -b.hi_, -1), rounded::add(a.hi_, -b.lo_, +1)};
  }
  friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const double xs[2] = {a.lo_, a.hi_};
    const double ys[2] = {b.lo_, b.hi_};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double x : xs)
      for (double y : ys) {
        lo = std::min(lo, rounded::mul(x, y, -1));
        hi = std::max(hi, rounded::mul(x, y, +1));
      }
    return {lo, hi};
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.lo_ <= 0.0 && b.hi_ >= 0.0) throw ArgumentError("Interval: division by an interval containing 0");
    const double xs[2] = {a.lo_, a.hi_};
    const double ys[2] = {b.lo_, b.hi_};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double x : xs)
      for (double y : ys) {
        lo = std::min(lo, rounded::div(x, y, -1));
        hi = std::max(hi, rounded::div(x, y, +1));
      }
    return {lo, hi};
  }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval sqrt(const Interval& a) {
    if (a.hi_ < 0.0) throw ArgumentError("Interval: sqrt of a negative interval");
    // a lower end below 0 can only come from rounding of a nonnegative quantity
    const double lo = a.lo_ <= 0.0 ? 0.0 : rounded::sqrt(a.lo_, -1);
    return {lo, rounded::sqrt(a.hi_, +1)};
  }
  friend Interval exp(const Interval& a) {
    const double lo = a.lo_ == 0.0 ? 1.0 : std::max(0.0, down(down(std::exp(a.lo_))));
    const double hi = a.hi_ == 0.0 ? 1.0 : up(up(std::exp(a.hi_)));
    return {lo, hi};
  }
  friend Interval max(const Interval& a, const Interval& b) {
    return {std::max(a.lo_, b.lo_), std::max(a.hi_, b.hi_)};
  }
  friend Interval min(const Interval& a, const Interval& b) {
    return {std::min(a.lo_, b.lo_), std::min(a.hi_, b.hi_)};
  }
  friend Interval square(const Interval& a) {
    if (a.lo_ >= 0.0) return {rounded::mul(a.lo_, a.lo_, -1), rounded::mul(a.hi_, a.hi_, +1)};
    if (a.hi_ <= 0.0) return {rounded::mul(a.hi_, a.hi_, -1), rounded::mul(a.lo_, a.lo_, +1)};
    return {0.0, std::max(rounded::mul(a.lo_, a.lo_, +1), rounded::mul(a.hi_, a.hi_, +1))};
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& a) {
    return os << '[' << a.lo_ << ", " << a.hi_ << ']';
  }

  static double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
  static double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

private:
  void check() const {
    if (std::isnan(lo_) || std::isnan(hi_) || lo_ > hi_) throw ArgumentError("Interval: invalid bounds");
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval pow(const Interval& a, int n) {
  if (n < 0) return Interval(1.0) / pow(a, -n);
  Interval r(1.0);
  for (int i = 0; i < n; ++i) r *= a;
  return r;
}

}  // namespace opalg

#endif  // OPALG_INTERVAL_HPP
