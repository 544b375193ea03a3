#include "mbc/expr.hpp"

#include <cctype>
#include <sstream>

namespace mbc {

using boost::multiprecision::cpp_int;

Rational rational_from_decimal(const std::string& text) {
  std::size_t i = 0, n = text.size();
  bool neg = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
  cpp_int mant = 0;
  long exp10 = 0;
  bool digits = false;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mant = mant * 10 + (text[i++] - '0');
    digits = true;
  }
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mant = mant * 10 + (text[i++] - '0');
      --exp10;
      digits = true;
    }
  }
  if (!digits) throw FormatError("bad number: " + text);
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(text.substr(i), &used);
    } catch (const std::exception&) {
      throw FormatError("bad exponent: " + text);
    }
    exp10 += e;
    i += used;
  }
  Rational r(mant);
  if (i < n && text[i] == '/') {
    ++i;
    cpp_int den = 0;
    bool dd = false;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      den = den * 10 + (text[i++] - '0');
      dd = true;
    }
    if (!dd || den == 0) throw FormatError("bad denominator: " + text);
    r /= Rational(den);
  }
  if (i != n) throw FormatError("trailing characters in number: " + text);
  if (exp10 > 400 || exp10 < -400) throw FormatError("exponent out of range: " + text);
  cpp_int p = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(exp10 < 0 ? -exp10 : exp10));
  if (exp10 < 0) r /= Rational(p);
  else r *= Rational(p);
  return neg ? Rational(-r) : r;
}

Rational rational_from_double(double x) { return Rational(x); }

Interval to_interval(const Rational& r) {
  double x = r.convert_to<double>();
  double lo = x, hi = x;
  while (Rational(lo) > r) lo = rnd::down(lo);
  while (Rational(hi) < r) hi = rnd::up(hi);
  return Interval(lo, hi);
}

namespace {

// exact decimal text when the denominator has only factors 2 and 5
std::string number_text(const Rational& r) {
  cpp_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  int k = 0;
  cpp_int scale = 1;
  while (scale % den != 0 && k < 1100) {
    scale *= 10;
    ++k;
  }
  if (scale % den != 0) return num.str() + "/" + den.str();
  cpp_int v = num * (scale / den);
  bool neg = v < 0;
  if (neg) v = -v;
  std::string digits = v.str();
  if (k > 0) {
    if (static_cast<int>(digits.size()) <= k) digits = std::string(k - digits.size() + 1, '0') + digits;
    digits.insert(digits.size() - k, ".");
  }
  return (neg ? "-" : "") + digits;
}

const char* kSymName[4] = {"", "b_GW", "nu1", "nu2"};

}  // namespace

LinearExpr LinearExpr::constant(const Rational& r) {
  LinearExpr e;
  e.c_[kOne] = r;
  return e;
}

LinearExpr LinearExpr::symbol(Sym s) {
  LinearExpr e;
  e.c_[s] = 1;
  return e;
}

bool LinearExpr::is_zero() const {
  for (const auto& c : c_)
    if (c != 0) return false;
  return true;
}

bool LinearExpr::is_constant() const { return c_[kBgw] == 0 && c_[kNu1] == 0 && c_[kNu2] == 0; }

LinearExpr LinearExpr::operator+(const LinearExpr& o) const {
  LinearExpr r;
  for (int i = 0; i < 4; ++i) r.c_[i] = c_[i] + o.c_[i];
  return r;
}

LinearExpr LinearExpr::operator-(const LinearExpr& o) const {
  LinearExpr r;
  for (int i = 0; i < 4; ++i) r.c_[i] = c_[i] - o.c_[i];
  return r;
}

LinearExpr LinearExpr::operator-() const { return scaled(Rational(-1)); }

LinearExpr LinearExpr::scaled(const Rational& s) const {
  LinearExpr r;
  for (int i = 0; i < 4; ++i) r.c_[i] = c_[i] * s;
  return r;
}

Interval LinearExpr::eval(const Constants& k) const {
  Interval v = to_interval(c_[kOne]);
  if (c_[kBgw] != 0) v += to_interval(c_[kBgw]) * k.b_gw;
  if (c_[kNu1] != 0) v += to_interval(c_[kNu1]) * k.nu1;
  if (c_[kNu2] != 0) v += to_interval(c_[kNu2]) * k.nu2;
  return v;
}

std::string LinearExpr::str() const {
  struct Term {
    Rational c;
    std::string sym;
  };
  std::vector<Term> terms;
  Rational c0 = c_[kOne];
  if (c_[kBgw] != 0 && c_[kBgw] == c_[kOne]) {
    terms.push_back({c_[kBgw], "b"});
    c0 = 0;
  } else if (c_[kBgw] != 0) {
    terms.push_back({c_[kBgw], kSymName[kBgw]});
  }
  if (c_[kNu1] != 0) terms.push_back({c_[kNu1], kSymName[kNu1]});
  if (c_[kNu2] != 0) terms.push_back({c_[kNu2], kSymName[kNu2]});
  if (c0 != 0) terms.push_back({c0, ""});
  if (terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Rational c = terms[i].c;
    bool neg = c < 0;
    if (neg) c = -c;
    if (i == 0) out += neg ? "-" : "";
    else out += neg ? " - " : " + ";
    if (terms[i].sym.empty()) out += number_text(c);
    else if (c == 1) out += terms[i].sym;
    else out += number_text(c) + "*" + terms[i].sym;
  }
  return out;
}

namespace {

bool symbol_of(const std::string& s, LinearExpr& out) {
  if (s == "b_GW" || s == "bgw" || s == "b_gw") out = LinearExpr::symbol(LinearExpr::kBgw);
  else if (s == "b") out = LinearExpr::constant(1) + LinearExpr::symbol(LinearExpr::kBgw);
  else if (s == "nu1" || s == "ν1" || s == "ν₁") out = LinearExpr::symbol(LinearExpr::kNu1);
  else if (s == "nu2" || s == "ν2" || s == "ν₂") out = LinearExpr::symbol(LinearExpr::kNu2);
  else return false;
  return true;
}

bool is_number_start(char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.'; }

}  // namespace

// expr := ['+'|'-'] term (('+'|'-') term)*
// term := number | symbol | number '*' symbol
LinearExpr LinearExpr::parse(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw FormatError("empty expression");
  LinearExpr result;
  std::size_t i = 0;
  bool first = true;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw FormatError("expected + or - in expression: " + text);
    }
    first = false;
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') {
      // keep exponent signs inside numbers
      if ((s[j] == 'e' || s[j] == 'E') && j > i && is_number_start(s[i]) && j + 1 < s.size() &&
          (s[j + 1] == '+' || s[j + 1] == '-')) {
        j += 2;
        continue;
      }
      ++j;
    }
    std::string term = s.substr(i, j - i);
    if (term.empty()) throw FormatError("empty term in expression: " + text);
    LinearExpr t;
    auto star = term.find('*');
    if (star != std::string::npos) {
      LinearExpr sym;
      if (!symbol_of(term.substr(star + 1), sym)) throw FormatError("unknown symbol in: " + term);
      t = sym.scaled(rational_from_decimal(term.substr(0, star)));
    } else if (symbol_of(term, t)) {
    } else if (is_number_start(term[0])) {
      t = constant(rational_from_decimal(term));
    } else {
      throw FormatError("unknown symbol: " + term);
    }
    result = sign > 0 ? result + t : result - t;
    i = j;
  }
  return result;
}

}  // namespace mbc
