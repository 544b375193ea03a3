#pragma once

// Exact linear expressions c0 + c1*b_GW + c2*nu1 + c3*nu2 with rational
// coefficients.  Biases of a blueprint are such expressions; "b" abbreviates
// 1 + b_GW.

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "mbc/interval.hpp"
#include "mbc/rigor.hpp"

namespace mbc {

using Rational = boost::multiprecision::cpp_rational;

Rational rational_from_decimal(const std::string& text);
Rational rational_from_double(double x);  // exact
Interval to_interval(const Rational& r);

class LinearExpr {
 public:
  enum Sym { kOne = 0, kBgw = 1, kNu1 = 2, kNu2 = 3 };

  LinearExpr() = default;
  static LinearExpr constant(const Rational& r);
  static LinearExpr symbol(Sym s);
  static LinearExpr parse(const std::string& text);  // FormatError

  const Rational& coef(Sym s) const { return c_[s]; }
  bool is_zero() const;
  bool is_constant() const;
  Interval eval(const Constants& k) const;
  std::string str() const;

  LinearExpr operator+(const LinearExpr& o) const;
  LinearExpr operator-(const LinearExpr& o) const;
  LinearExpr operator-() const;
  LinearExpr scaled(const Rational& r) const;
  friend bool operator==(const LinearExpr& a, const LinearExpr& b) { return a.c_ == b.c_; }

 private:
  std::array<Rational, 4> c_{};
};

}  // namespace mbc
