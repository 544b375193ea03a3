#include "mbc/interval.hpp"

#include <cfenv>
#include <cstdlib>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace mbc {

namespace {

struct RoundingGuard {
  int saved;
  explicit RoundingGuard(int mode) : saved(std::fegetround()) { std::fesetround(mode); }
  ~RoundingGuard() { std::fesetround(saved); }
};

double parse_rounded(const std::string& text, int mode) {
  RoundingGuard g(mode);
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw FormatError("not a decimal literal: " + text);
  return v;
}

Interval from_libm(double lo, double hi) {
  return Interval(rnd::down(lo, kLibmUlps), rnd::up(hi, kLibmUlps));
}

}  // namespace

Interval Interval::from_decimal(const std::string& text) {
  // glibc strtod honours the current rounding mode
  double lo = parse_rounded(text, FE_DOWNWARD);
  double hi = parse_rounded(text, FE_UPWARD);
  return Interval(lo, hi);
}

Interval exp(const Interval& x) {
  double lo = x.lo() == -kInf ? 0.0 : std::max(0.0, rnd::down(std::exp(x.lo()), kLibmUlps));
  double hi = x.hi() == kInf ? kInf : rnd::up(std::exp(x.hi()), kLibmUlps);
  if (x.hi() == -kInf) hi = 0;
  return Interval(lo, hi);
}

Interval log(const Interval& x) {
  if (x.hi() <= 0) throw EmptyDomain("log of nonpositive interval");
  double lo = x.lo() <= 0 ? -kInf : rnd::down(std::log(x.lo()), kLibmUlps);
  double hi = x.hi() == kInf ? kInf : rnd::up(std::log(x.hi()), kLibmUlps);
  return Interval(lo, hi);
}

Interval acos(const Interval& x) {
  if (x.lo() > 1 || x.hi() < -1) throw EmptyDomain("acos outside [-1,1]");
  double a = std::max(-1.0, x.lo()), b = std::min(1.0, x.hi());
  Interval r = from_libm(std::acos(b), std::acos(a));
  return Interval(std::max(0.0, r.lo()), std::min(pi().hi(), r.hi()));
}

Interval asin(const Interval& x) {
  if (x.lo() > 1 || x.hi() < -1) throw EmptyDomain("asin outside [-1,1]");
  double a = std::max(-1.0, x.lo()), b = std::min(1.0, x.hi());
  if (a == 0 && b == 0) return Interval(0.0);
  return from_libm(std::asin(a), std::asin(b));
}

const Interval& pi() {
  static const Interval v(rnd::down(std::numbers::pi), rnd::up(std::numbers::pi));
  return v;
}

const Interval& sqrt2() {
  static const Interval v = sqrt(Interval(2.0));
  return v;
}

const Interval& sqrt_2pi() {
  static const Interval v = sqrt(Interval(2.0) * pi());
  return v;
}

const Interval& inv_sqrt_2pi() {
  static const Interval v = Interval(1.0) / sqrt_2pi();
  return v;
}

std::string to_string(const Interval& x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", x.lo(), x.hi());
  return buf;
}

std::ostream& operator<<(std::ostream& os, const Interval& x) { return os << to_string(x); }

}  // namespace mbc
