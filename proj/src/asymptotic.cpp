#include "mbc/asymptotic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "mbc/errors.hpp"
#include "mbc/rigor.hpp"

namespace mbc {

namespace {

constexpr int kDeg = 4;
constexpr int kVars = 5;  // b1, b2, c1, c2, and an integration variable x
enum { B1, B2, C1, C2, X };
constexpr double kPi = std::numbers::pi;

using Exps = std::array<int, kVars>;

const std::vector<Exps>& monomials() {
  static const std::vector<Exps> m = [] {
    std::vector<Exps> out;
    for (int d = 0; d <= kDeg; ++d)
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b)
          for (int c = d - a - b; c >= 0; --c)
            for (int e = d - a - b - c; e >= 0; --e) {
              int x = d - a - b - c - e;
              out.push_back({a, b, c, e, x});
            }
    return out;
  }();
  return m;
}

int index_of(const Exps& e) {
  static const std::vector<int> table = [] {
    std::vector<int> t(5 * 5 * 5 * 5 * 5, -1);
    const auto& m = monomials();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& e = m[i];
      t[(((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]) * 5 + e[4]] = static_cast<int>(i);
    }
    return t;
  }();
  int deg = e[0] + e[1] + e[2] + e[3] + e[4];
  if (deg > kDeg) return -1;
  return table[(((e[0] * 5 + e[1]) * 5 + e[2]) * 5 + e[3]) * 5 + e[4]];
}

// truncated multivariate series
struct Series {
  std::vector<double> c = std::vector<double>(monomials().size(), 0.0);

  static Series constant(double v) {
    Series s;
    s.c[0] = v;
    return s;
  }
  static Series var(int k) {
    Series s;
    Exps e{};
    e[k] = 1;
    s.c[index_of(e)] = 1;
    return s;
  }
  Series operator+(const Series& o) const {
    Series r = *this;
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] += o.c[i];
    return r;
  }
  Series operator-(const Series& o) const {
    Series r = *this;
    for (std::size_t i = 0; i < c.size(); ++i) r.c[i] -= o.c[i];
    return r;
  }
  Series operator*(double k) const {
    Series r = *this;
    for (auto& v : r.c) v *= k;
    return r;
  }
  Series operator*(const Series& o) const {
    const auto& m = monomials();
    Series r;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (o.c[j] == 0) continue;
        Exps e;
        for (int k = 0; k < kVars; ++k) e[k] = m[i][k] + m[j][k];
        int t = index_of(e);
        if (t >= 0) r.c[t] += c[i] * o.c[j];
      }
    }
    return r;
  }
};

// f(u) from the Taylor coefficients of f at u(0)
Series compose(const std::vector<double>& f, const Series& u) {
  Series d = u;
  d.c[0] = 0;
  Series out = Series::constant(f[0]);
  Series p = Series::constant(1);
  for (int k = 1; k <= kDeg && k < static_cast<int>(f.size()); ++k) {
    p = p * d;
    out = out + p * f[k];
  }
  return out;
}

// univariate Taylor coefficients, degree kDeg + 1
using Uni = std::vector<double>;

Uni uni_mul(const Uni& a, const Uni& b) {
  Uni r(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// (a0 + d)^p
Uni pow_coeffs(double a0, double p) {
  Uni r(kDeg + 2);
  double binom = 1;
  for (int k = 0; k < static_cast<int>(r.size()); ++k) {
    r[k] = binom * std::pow(a0, p - k);
    binom *= (p - k) / (k + 1);
  }
  return r;
}

// g(q(t)) for univariate q, g given by coefficients at q(0)
Uni uni_compose(const Uni& g, const Uni& q) {
  Uni d = q;
  d[0] = 0;
  Uni out(q.size(), 0.0), p(q.size(), 0.0);
  p[0] = 1;
  out[0] = g[0];
  for (std::size_t k = 1; k < g.size(); ++k) {
    p = uni_mul(p, d);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[k] * p[i];
  }
  return out;
}

// acos(x0 + t): integrate -(1 - (x0 + t)^2)^(-1/2)
Uni acos_coeffs(double x0) {
  Uni q(kDeg + 2, 0.0);
  q[0] = 1 - x0 * x0;
  q[1] = -2 * x0;
  q[2] = -1;
  Uni g = uni_compose(pow_coeffs(q[0], -0.5), q);
  Uni r(kDeg + 2, 0.0);
  r[0] = std::acos(x0);
  for (int k = 0; k + 1 < static_cast<int>(r.size()); ++k) r[k + 1] = -g[k] / (k + 1);
  return r;
}

// exp(-u^2/2)/sqrt(2 pi) at 0 and its antiderivative 1/2 + ...
Uni pdf_coeffs() {
  Uni r(kDeg + 2, 0.0);
  double f = 1;
  for (int j = 0; 2 * j < static_cast<int>(r.size()); ++j) {
    r[2 * j] = f / std::sqrt(2 * kPi);
    f *= -0.5 / (j + 1);
  }
  return r;
}

Uni cdf_coeffs() {
  Uni p = pdf_coeffs();
  Uni r(kDeg + 2, 0.0);
  r[0] = 0.5;
  for (int k = 0; k + 1 < static_cast<int>(r.size()); ++k) r[k + 1] = p[k] / (k + 1);
  return r;
}

// int_0^{target} s dx : x^k -> target^(k+1)/(k+1)
Series integrate_x(const Series& s, int target) {
  const auto& m = monomials();
  Series r;
  for (std::size_t i = 0; i < s.c.size(); ++i) {
    if (s.c[i] == 0) continue;
    Exps e = m[i];
    int k = e[X];
    e[X] = 0;
    e[target] += k + 1;
    int t = index_of(e);
    if (t >= 0) r.c[t] += s.c[i] / (k + 1);
  }
  return r;
}

// Pr[X <= c1, Y <= c2] with correlation given as a series
Series phi_rho_series(const Series& rho) {
  const Uni cdf = cdf_coeffs(), pdf = pdf_coeffs();
  Series one = Series::constant(1);
  Series inv_s = compose(pow_coeffs(1 - rho.c[0] * rho.c[0], -0.5), one - rho * rho);
  Series x = Series::var(X), c2 = Series::var(C2);
  Series base = Series::constant(0.5) - compose(acos_coeffs(rho.c[0]), rho) * (1 / (2 * kPi));
  Series phi_x = compose(pdf, x);
  Series i2 = integrate_x(phi_x * compose(cdf, Series() - rho * x * inv_s), C2);
  Series i1 = integrate_x(phi_x * compose(cdf, (c2 - rho * x) * inv_s), C1);
  return base + i2 + i1;
}

Expansion to_expansion(const Series& s, bool even) {
  const auto& m = monomials();
  Expansion e;
  for (std::size_t i = 0; i < s.c.size(); ++i) {
    if (m[i][X] != 0 || s.c[i] == 0) continue;
    int deg = m[i][0] + m[i][1] + m[i][2] + m[i][3];
    if (even && deg % 2 == 1) {
      e.dropped_odd = std::max(e.dropped_odd, std::fabs(s.c[i]));
      continue;
    }
    e.terms.push_back({{m[i][0], m[i][1], m[i][2], m[i][3]}, s.c[i]});
  }
  return e;
}

double ipow(double x, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

double Expansion::eval(double b1, double b2, double c1, double c2) const {
  double s = 0;
  for (const auto& [e, v] : terms) s += v * ipow(b1, e[0]) * ipow(b2, e[1]) * ipow(c1, e[2]) * ipow(c2, e[3]);
  return s;
}

double Expansion::coef(int a, int b, int c, int d) const {
  for (const auto& [e, v] : terms)
    if (e == std::array<int, 4>{a, b, c, d}) return v;
  return 0;
}

double taylor_phi(double c) {
  if (c < 0) return 1 - taylor_phi(-c);
  const double k = 1 / std::sqrt(2 * kPi);
  return 0.5 + c * k - c * c * c * k / 6;
}

Expansion phi_rho_expansion(double rho) { return to_expansion(phi_rho_series(Series::constant(rho)), false); }

double taylor_phi_rho(double c1, double c2, double rho) {
  Expansion e = phi_rho_expansion(rho);
  // symmetric by construction; averaging the two orders makes it exact in floating point
  return 0.5 * (e.eval(0, 0, c1, c2) + e.eval(0, 0, c2, c1));
}

Expansion soundness_expansion(double b12) {
  Series one = Series::constant(1);
  Series b1 = Series::var(B1), b2 = Series::var(B2);
  const Uni isq = pow_coeffs(1.0, -0.5);
  Series rho = (Series::constant(b12) - b1 * b2) * compose(isq, one - b1 * b1) * compose(isq, one - b2 * b2);
  const Uni cdf = cdf_coeffs();
  Series s = compose(cdf, Series::var(C1)) + compose(cdf, Series::var(C2)) - phi_rho_series(rho) * 2.0;
  return to_expansion(s, true);
}

double soundness_expansion_at_bgw(double b1, double b2, double c1, double c2) {
  static const Expansion e = soundness_expansion(constants().b_gw.mid());
  return e.eval(b1, b2, c1, c2);
}

double exact_pair_soundness(double b1, double b2, double b12, double c1, double c2) {
  Interval B1(b1), B2(b2), one(1.0);
  Interval rho = (Interval(b12) - B1 * B2) / sqrt((one - sqr(B1)) * (one - sqr(B2)));
  Interval q1 = phi_cdf(Interval(c1)), q2 = phi_cdf(Interval(c2));
  Interval g = gamma(clamp_to(rho, Interval(-1.0, 1.0)), q1, q2);
  return (q1 + q2 - Interval(2.0) * g).mid();
}

double hyperplane_expansion_average(double b1, double b2) {
  // three-point Gauss-Hermite rule, exact for polynomials of degree 5 in g
  const double nodes[3] = {-std::sqrt(3.0), 0.0, std::sqrt(3.0)};
  const double weights[3] = {1.0 / 6, 2.0 / 3, 1.0 / 6};
  const double k1 = b1 / std::sqrt(1 - b1 * b1), k2 = b2 / std::sqrt(1 - b2 * b2);
  double s = 0;
  for (int i = 0; i < 3; ++i) s += weights[i] * soundness_expansion_at_bgw(b1, b2, nodes[i] * k1, nodes[i] * k2);
  return s;
}

FamilyTable family_coefficients(double b_gw) {
  Expansion e = soundness_expansion(b_gw);
  FamilyTable t;
  for (int k = 0; k < 3; ++k) {
    const double k1 = kFamily[k][0], k2 = kFamily[k][1];
    // collect into powers of (b, c)
    double m[kDeg + 1][kDeg + 1] = {};
    for (const auto& [x, v] : e.terms)
      m[x[0] + x[1]][x[2] + x[3]] += v * ipow(k1, x[0]) * ipow(k2, x[1]) * ipow(k1, x[2]) * ipow(k2, x[3]);
    t.rows[k] = {m[2][0], m[4][0] / 3, m[2][2]};
    t.c2[k] = m[0][2];
    t.c4[k] = m[0][4];
    t.constant = m[0][0];
  }
  return t;
}

FamilyWeights solve_family_weights(const FamilyTable& t) {
  Eigen::Matrix3d A;
  for (int k = 0; k < 3; ++k) {
    A(0, k) = t.rows[k][0];
    A(1, k) = t.rows[k][1];
    A(2, k) = 1;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  lu.setThreshold(1e-12);
  if (lu.rank() < 3) throw SingularSystem("solve_family_weights: coefficient matrix is singular");
  Eigen::Vector3d w = lu.solve(Eigen::Vector3d(0, 0, 1));
  FamilyWeights out{w[0], w[1], w[2], 0};
  for (int k = 0; k < 3; ++k) out.residual += w[k] * t.rows[k][2];
  return out;
}

FamilyWeights solve_family_weights() { return solve_family_weights(family_coefficients(constants().b_gw.mid())); }

FamilyWeights modified_family_weights(const FamilyWeights& w, const FamilyTable& t, double b, double gap) {
  double shift = gap * b * b / std::fabs(t.rows[2][0]);
  FamilyWeights m = w;
  m.w1 -= shift;
  m.w3 -= shift;
  // weights are a distribution
  double sum = m.w1 + m.w2 + m.w3;
  m.w1 /= sum;
  m.w2 /= sum;
  m.w3 /= sum;
  return m;
}

double family_exact_performance(const FamilyWeights& w, double b, double b_gw) {
  const double ws[3] = {w.w1, w.w2, w.w3};
  double s = 0;
  for (int k = 0; k < 3; ++k) {
    double b1 = kFamily[k][0] * b, b2 = kFamily[k][1] * b;
    double c1 = b1 / std::sqrt(1 - b1 * b1), c2 = b2 / std::sqrt(1 - b2 * b2);
    s += ws[k] * exact_pair_soundness(b1, b2, b_gw, c1, c2);
  }
  return s;
}

}  // namespace mbc
