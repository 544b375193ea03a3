#pragma once

// Closed intervals of doubles with outward rounding.
//
// Basic operations are rounded to nearest and then corrected by one ulp when
// the error-free transformation (TwoSum / fma residual) shows the rounded
// value lies on the wrong side.  No rounding-mode switching is involved, so
// the code is safe under any FP environment as long as contraction is off.
//
// Transcendentals (exp, log, acos, asin) call libm and widen by kLibmUlps ulps
// on each side.  This assumes the libm error is below one ulp, which glibc
// documents for these functions on x86_64.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>

#include "mbc/errors.hpp"

namespace mbc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMaxDouble = std::numeric_limits<double>::max();
inline constexpr int kLibmUlps = 2;

namespace rnd {

inline double up(double x) {
  if (x == 0) return std::numeric_limits<double>::denorm_min();
  if (std::isnan(x) || x == kInf) return x;
  auto bits = std::bit_cast<std::uint64_t>(x);
  return std::bit_cast<double>(x > 0 ? bits + 1 : bits - 1);
}
inline double down(double x) { return -up(-x); }

inline double down(double x, int n) {
  for (int i = 0; i < n; ++i) x = down(x);
  return x;
}
inline double up(double x, int n) {
  for (int i = 0; i < n; ++i) x = up(x);
  return x;
}

// below this magnitude product/quotient residuals may not be representable
inline constexpr double kTiny = 0x1p-960;

inline double two_sum_err(double a, double b, double s) {
  double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline double add_dn(double a, double b) {
  double s = a + b;
  if (std::isnan(s)) return -kInf;
  if (std::isinf(s)) {
    if (std::isinf(a) || std::isinf(b) || s < 0) return s;
    return kMaxDouble;
  }
  return two_sum_err(a, b, s) < 0 ? down(s) : s;
}

inline double add_up(double a, double b) {
  double s = a + b;
  if (std::isnan(s)) return kInf;
  if (std::isinf(s)) {
    if (std::isinf(a) || std::isinf(b) || s > 0) return s;
    return -kMaxDouble;
  }
  return two_sum_err(a, b, s) > 0 ? up(s) : s;
}

inline double sub_dn(double a, double b) { return add_dn(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_dn(double a, double b) {
  if (a == 0 || b == 0) return 0;
  double p = a * b;
  if (std::isinf(p)) {
    if (std::isinf(a) || std::isinf(b) || p < 0) return p;
    return kMaxDouble;
  }
  if (std::fabs(p) < kTiny) return down(p);
  return std::fma(a, b, -p) < 0 ? down(p) : p;
}

inline double mul_up(double a, double b) {
  if (a == 0 || b == 0) return 0;
  double p = a * b;
  if (std::isinf(p)) {
    if (std::isinf(a) || std::isinf(b) || p > 0) return p;
    return -kMaxDouble;
  }
  if (std::fabs(p) < kTiny) return up(p);
  return std::fma(a, b, -p) > 0 ? up(p) : p;
}

// b != 0
inline double div_dn(double a, double b) {
  if (a == 0) return 0;
  double q = a / b;
  if (std::isnan(q)) return -kInf;
  if (std::isinf(b)) return q;  // exact zero
  if (std::isinf(q)) {
    if (std::isinf(a) || q < 0) return q;
    return kMaxDouble;
  }
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return down(q);
  double r = std::fma(-q, b, a);
  if (r == 0) return q;
  return ((r < 0) != (b < 0)) ? down(q) : q;
}

inline double div_up(double a, double b) {
  if (a == 0) return 0;
  double q = a / b;
  if (std::isnan(q)) return kInf;
  if (std::isinf(b)) return q;
  if (std::isinf(q)) {
    if (std::isinf(a) || q > 0) return q;
    return -kMaxDouble;
  }
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return up(q);
  double r = std::fma(-q, b, a);
  if (r == 0) return q;
  return ((r > 0) != (b < 0)) ? up(q) : q;
}

// x >= 0
inline double sqrt_dn(double x) {
  double s = std::sqrt(x);
  if (x == 0 || std::isinf(x)) return s;
  if (x < kTiny) return std::max(0.0, down(s));
  return std::fma(-s, s, x) < 0 ? down(s) : s;
}

inline double sqrt_up(double x) {
  double s = std::sqrt(x);
  if (x == 0 || std::isinf(x)) return s;
  if (x < kTiny) return up(s);
  return std::fma(-s, s, x) > 0 ? up(s) : s;
}

}  // namespace rnd

class Interval {
 public:
  constexpr Interval() : lo_(0), hi_(0) {}
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: implicit on purpose
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw EmptyDomain("Interval: lo > hi or NaN endpoint");
  }

  static Interval entire() { return Interval(-kInf, kInf); }
  static Interval unit() { return Interval(0.0, 1.0); }
  static Interval hull(double a, double b) { return Interval(std::min(a, b), std::max(a, b)); }
  // Tight enclosure of a decimal literal such as "0.013" or "-1e-4".
  static Interval from_decimal(const std::string& text);

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double mid() const {
    if (lo_ == -kInf && hi_ == kInf) return 0;
    if (lo_ == -kInf) return -kMaxDouble;
    if (hi_ == kInf) return kMaxDouble;
    return lo_ + 0.5 * (hi_ - lo_);
  }
  double width() const { return rnd::sub_up(hi_, lo_); }
  double rad() const { return rnd::mul_up(0.5, width()); }
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  double mig() const {
    if (lo_ <= 0 && hi_ >= 0) return 0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
  }
  bool is_point() const { return lo_ == hi_; }
  bool is_finite() const { return std::isfinite(lo_) && std::isfinite(hi_); }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0 && 0 <= hi_; }
  bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }
  bool interior_of(const Interval& o) const { return o.lo_ < lo_ && hi_ < o.hi_; }
  bool overlaps(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }

  Interval operator-() const { return Interval(-hi_, -lo_); }
  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_, hi_;
};

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval(rnd::add_dn(a.lo(), b.lo()), rnd::add_up(a.hi(), b.hi()));
}

inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval(rnd::sub_dn(a.lo(), b.hi()), rnd::sub_up(a.hi(), b.lo()));
}

inline Interval operator*(const Interval& a, const Interval& b) {
  double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  if (al >= 0 && bl >= 0) return Interval(rnd::mul_dn(al, bl), rnd::mul_up(ah, bh));
  double lo = std::min(std::min(rnd::mul_dn(al, bl), rnd::mul_dn(al, bh)),
                       std::min(rnd::mul_dn(ah, bl), rnd::mul_dn(ah, bh)));
  double hi = std::max(std::max(rnd::mul_up(al, bl), rnd::mul_up(al, bh)),
                       std::max(rnd::mul_up(ah, bl), rnd::mul_up(ah, bh)));
  return Interval(lo, hi);
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) return Interval::entire();
  double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
  double lo = std::min(std::min(rnd::div_dn(al, bl), rnd::div_dn(al, bh)),
                       std::min(rnd::div_dn(ah, bl), rnd::div_dn(ah, bh)));
  double hi = std::max(std::max(rnd::div_up(al, bl), rnd::div_up(al, bh)),
                       std::max(rnd::div_up(ah, bl), rnd::div_up(ah, bh)));
  return Interval(lo, hi);
}

inline Interval& Interval::operator+=(const Interval& o) { return *this = *this + o; }
inline Interval& Interval::operator-=(const Interval& o) { return *this = *this - o; }
inline Interval& Interval::operator*=(const Interval& o) { return *this = *this * o; }
inline Interval& Interval::operator/=(const Interval& o) { return *this = *this / o; }

inline Interval sqr(const Interval& x) {
  double m = x.mig(), M = x.mag();
  return Interval(rnd::mul_dn(m, m), rnd::mul_up(M, M));
}

inline Interval abs(const Interval& x) { return Interval(x.mig(), x.mag()); }

inline Interval sqrt(const Interval& x) {
  if (x.hi() < 0) throw EmptyDomain("sqrt of negative interval");
  return Interval(rnd::sqrt_dn(std::max(0.0, x.lo())), rnd::sqrt_up(x.hi()));
}

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

// throws EmptyDomain when disjoint
inline Interval intersect(const Interval& a, const Interval& b) {
  double lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw EmptyDomain("empty intersection");
  return Interval(lo, hi);
}

// intersection that tolerates disjointness from round-off by collapsing to the
// nearer endpoint of b (used for clamping to trivial bounds)
inline Interval clamp_to(const Interval& a, const Interval& b) {
  double lo = std::clamp(a.lo(), b.lo(), b.hi());
  double hi = std::clamp(a.hi(), b.lo(), b.hi());
  return Interval(lo, hi);
}

inline Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}
inline Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline bool certainly_lt(const Interval& a, const Interval& b) { return a.hi() < b.lo(); }
inline bool certainly_gt(const Interval& a, const Interval& b) { return a.lo() > b.hi(); }
inline bool certainly_pos(const Interval& a) { return a.lo() > 0; }
inline bool certainly_neg(const Interval& a) { return a.hi() < 0; }

Interval exp(const Interval& x);
Interval log(const Interval& x);
Interval acos(const Interval& x);
Interval asin(const Interval& x);

// pi, sqrt(2), sqrt(2 pi), 1/sqrt(2 pi)
const Interval& pi();
const Interval& sqrt2();
const Interval& sqrt_2pi();
const Interval& inv_sqrt_2pi();

std::ostream& operator<<(std::ostream& os, const Interval& x);
std::string to_string(const Interval& x);

}  // namespace mbc
