#include "mbc/rigor.hpp"

#include <cmath>

#include "mbc/jet.hpp"
#include "mbc/point.hpp"

namespace mbc {

const RigorConfig& default_config() {
  static const RigorConfig cfg;
  return cfg;
}

namespace {

// phi(x) = exp(-x^2/2)/sqrt(2 pi)
Interval pdf(const Interval& x) { return exp(-(sqr(x) / Interval(2.0))) * inv_sqrt_2pi(); }

// Upper-tail mass 1 - Phi(x) for x > 0 via the Mills ratio bounds
// phi(x) x/(x^2+1) <= 1 - Phi(x) <= phi(x)/x.
Interval upper_tail(double x) {
  Interval X(x), p = pdf(X);
  Interval lo = p * X / (sqr(X) + Interval(1.0));
  Interval hi = p / X;
  return Interval(lo.lo(), hi.hi());
}

// erf(z) for z >= 0 by the positive series
// erf(z) = 2/sqrt(pi) e^{-z^2} sum_n 2^n z^{2n+1} / (1*3*...*(2n+1)).
Interval erf_series(const Interval& z) {
  Interval z2x2 = Interval(2.0) * sqr(z);
  Interval term = z, sum = z;
  for (int n = 0; n < 400; ++n) {
    term = term * z2x2 / Interval(2.0 * n + 3);
    sum += term;
    // ratio of the next term to the current one; later ratios are smaller
    Interval r = z2x2 / Interval(2.0 * n + 5);
    if (r.hi() < 0.5 && term.hi() <= 0x1p-60 * sum.lo()) {
      Interval tail = term * r / (Interval(1.0) - r);
      sum += Interval(0.0, tail.hi());
      break;
    }
  }
  static const Interval two_over_sqrtpi = Interval(2.0) / sqrt(pi());
  return two_over_sqrtpi * exp(-sqr(z)) * sum;
}

Interval phi_point(double x, const RigorConfig& cfg) {
  if (std::isnan(x)) throw EmptyDomain("phi_cdf: NaN");
  double c = cfg.clamp_magnitude;
  if (x > c) return Interval(rnd::sub_dn(1.0, upper_tail(c).hi()), 1.0);
  if (x < -c) return Interval(0.0, upper_tail(c).hi());
  if (x > cfg.crossover) return clamp_to(Interval(1.0) - upper_tail(x), Interval::unit());
  if (x < -cfg.crossover) return clamp_to(upper_tail(-x), Interval::unit());
  if (x == 0) return Interval(0.5);
  Interval z = Interval(std::fabs(x)) / sqrt2();
  Interval e = erf_series(z);
  Interval half(0.5);
  Interval r = x > 0 ? half + half * e : half - half * e;
  return clamp_to(r, Interval::unit());
}

// Enclosure of Phi^{-1}(q) for a point q in (0,1); endpoints may be infinite
// when q lies beyond Phi(+-clamp).
Interval phi_inv_point(double q, const RigorConfig& cfg) {
  if (q <= 0) return Interval(-kInf);
  if (q >= 1) return Interval(kInf);
  double c = cfg.clamp_magnitude;
  double x0 = std::clamp(point::phi_inv(q), -c, c);

  auto lower_ok = [&](double x) { return phi_point(x, cfg).hi() <= q; };
  auto upper_ok = [&](double x) { return phi_point(x, cfg).lo() >= q; };

  double L, R;
  if (!lower_ok(-c)) {
    L = -kInf;
  } else {
    double d = 4e-16 * std::max(1.0, std::fabs(x0));
    L = x0 - d;
    while (L > -c && !lower_ok(L)) {
      d *= 8;
      L = x0 - d;
    }
    if (L <= -c) L = -c;
  }
  if (!upper_ok(c)) {
    R = kInf;
  } else {
    double d = 4e-16 * std::max(1.0, std::fabs(x0));
    R = x0 + d;
    while (R < c && !upper_ok(R)) {
      d *= 8;
      R = x0 + d;
    }
    if (R >= c) R = c;
  }
  // tighten by bisection against the Phi enclosure
  if (std::isfinite(L) && std::isfinite(R)) {
    for (int it = 0; it < 64; ++it) {
      double m = L + 0.5 * (R - L);
      if (m <= L || m >= R) break;
      Interval pm = phi_point(m, cfg);
      if (pm.hi() <= q) {
        L = m;
      } else if (pm.lo() >= q) {
        R = m;
      } else {
        break;
      }
    }
  }
  return Interval(L, R);
}

template <std::size_t N>
Jet<Interval, N> integrand(const Interval& r0, const Interval& s, const Interval& p) {
  using J = Jet<Interval, N>;
  J r = J::variable(r0);
  J om = J::constant(Interval(1.0)) - r * r;
  J num = J::constant(s) - p * r;
  J e = num / (Interval(2.0) * om);
  static const Interval two_pi = Interval(2.0) * pi();
  return exp(-e) / (two_pi * sqrt(om));
}

// int_0^rho0 of d Gamma_r / dr, for thresholds a in A, b in B (finite).
Interval integral_to(double rho0, const Interval& A, const Interval& B, const RigorConfig& cfg) {
  if (rho0 == 0) return Interval(0.0);
  const Interval s = sqr(A) + sqr(B);
  const Interval p = Interval(2.0) * A * B;
  const int n = std::max(1, cfg.quadrature_cells);
  const double lo_end = std::min(0.0, rho0), hi_end = std::max(0.0, rho0);
  Interval total(0.0);
  double x0 = lo_end;
  for (int k = 1; k <= n; ++k) {
    double x1 = k == n ? hi_end : lo_end + (hi_end - lo_end) * (static_cast<double>(k) / n);
    double c = x0 + 0.5 * (x1 - x0);
    Interval hl = Interval(c) - Interval(x0);
    Interval hr = Interval(x1) - Interval(c);
    auto fc = integrand<4>(Interval(c), s, p);
    auto fcell = integrand<5>(Interval(x0, x1), s, p);
    // int_{-hl}^{hr} u^k du
    Interval pr = hr, pl = -hl;
    Interval cell(0.0);
    for (int j = 0; j < 4; ++j) {
      Interval m = (pr - pl) / Interval(j + 1.0);
      cell += fc[j] * m;
      pr = pr * hr;
      pl = pl * (-hl);
    }
    // remainder f4(xi) u^4 with u^4 >= 0
    Interval m4 = (pr - pl) / Interval(5.0);
    cell += fcell[4] * m4;
    total += cell;
    x0 = x1;
  }
  return rho0 < 0 ? -total : total;
}

Interval frechet(const Interval& q1, const Interval& q2) {
  double lo = std::max(0.0, rnd::sub_dn(rnd::add_dn(q1.lo(), q2.lo()), 1.0));
  double hi = std::min(q1.hi(), q2.hi());
  return Interval(lo, hi);
}

Interval gamma_core(const Interval& rho, const Interval& q1, const Interval& q2, const RigorConfig& cfg) {
  Interval F = frechet(q1, q2);
  if (F.lo() == F.hi()) return F;
  if (rho.lo() <= -1 && rho.hi() >= 1) return F;
  if (rho.hi() <= -1) return Interval(F.lo(), std::max(F.lo(), rnd::sub_up(rnd::add_up(q1.hi(), q2.hi()), 1.0)));
  if (rho.lo() >= 1) return Interval(F.hi());
  Interval A = phi_inv_unbounded(q1, cfg);
  Interval B = phi_inv_unbounded(q2, cfg);
  if (!A.is_finite() || !B.is_finite()) return F;
  double r0 = std::max(rho.lo(), -1.0);
  if (r0 <= -1) r0 = rnd::up(-1.0);
  Interval I = integral_to(r0, A, B, cfg);
  double r1 = std::min(rho.hi(), 1.0);
  if (r1 > r0) {
    // integrand <= 1/(2 pi sqrt(1 - r^2)) on the extra piece [r0, r1]
    double rm = std::max(std::fabs(r0), std::fabs(r1));
    Interval bound = rm >= 1 ? Interval(kInf)
                             : Interval(1.0) / (Interval(2.0) * pi() * sqrt(Interval(1.0) - sqr(Interval(rm))));
    Interval extra = (Interval(r1) - Interval(r0)) * bound;
    I += Interval(0.0, extra.hi());
  }
  Interval g = q1 * q2 + I;
  return intersect(g, F);
}

Interval clip_q(const Interval& q) { return intersect(q, Interval::unit()); }

}  // namespace

Interval phi_cdf(const Interval& x, const RigorConfig& cfg) {
  Interval lo = phi_point(x.lo(), cfg);
  Interval hi = x.is_point() ? lo : phi_point(x.hi(), cfg);
  return Interval(lo.lo(), hi.hi());
}

Interval phi_inv_unbounded(const Interval& q, const RigorConfig& cfg) {
  Interval qq = clip_q(q);
  Interval lo = phi_inv_point(qq.lo(), cfg);
  Interval hi = qq.is_point() ? lo : phi_inv_point(qq.hi(), cfg);
  return Interval(lo.lo(), hi.hi());
}

PhiInv phi_inv(const Interval& q, const RigorConfig& cfg) {
  Interval v = phi_inv_unbounded(q, cfg);
  double c = cfg.clamp_magnitude;
  PhiInv r;
  double lo = v.lo(), hi = v.hi();
  if (lo < -c) {
    lo = -c;
    r.degenerate = true;
  }
  if (hi > c) {
    hi = c;
    r.degenerate = true;
  }
  if (hi < -c) {
    hi = -c;
    r.degenerate = true;
  }
  if (lo > c) {
    lo = c;
    r.degenerate = true;
  }
  r.value = Interval(lo, hi);
  return r;
}

Interval gamma(const Interval& rho, const Interval& q1, const Interval& q2, const RigorConfig& cfg) {
  Interval Q1 = clip_q(q1), Q2 = clip_q(q2);
  Interval R = intersect(rho, Interval(-1.0, 1.0));
  constexpr double kThin = 1e-9;
  if (Q1.width() <= kThin && Q2.width() <= kThin && R.width() <= kThin) return gamma_core(R, Q1, Q2, cfg);
  // monotone in every argument: two corner evaluations
  Interval lo = gamma_core(Interval(R.lo()), Interval(Q1.lo()), Interval(Q2.lo()), cfg);
  Interval hi = gamma_core(Interval(R.hi()), Interval(Q1.hi()), Interval(Q2.hi()), cfg);
  return Interval(lo.lo(), hi.hi());
}

GammaPartials gamma_partials(const Interval& rho, const Interval& q1, const Interval& q2, const RigorConfig& cfg) {
  if (q1.lo() <= 0 || q1.hi() >= 1 || q2.lo() <= 0 || q2.hi() >= 1)
    throw DegenerateInput("gamma_partials: q must lie in (0,1)");
  if (rho.lo() <= -1 || rho.hi() >= 1) throw DegenerateInput("gamma_partials: rho must lie in (-1,1)");
  Interval A = phi_inv_unbounded(q1, cfg), B = phi_inv_unbounded(q2, cfg);
  Interval om = Interval(1.0) - sqr(rho);
  Interval s = sqrt(om);
  GammaPartials g;
  g.dq1 = phi_cdf((B - rho * A) / s, cfg);
  g.dq2 = phi_cdf((A - rho * B) / s, cfg);
  Interval e = (sqr(A) - Interval(2.0) * rho * A * B + sqr(B)) / (Interval(2.0) * om);
  g.drho = exp(-e) / (Interval(2.0) * pi() * s);
  g.drho = Interval(std::max(0.0, g.drho.lo()), std::max(0.0, g.drho.hi()));
  return g;
}

namespace {
// sign of the stationarity condition of b -> acos(b)/(1-b); increasing on (-1,0)
Interval bgw_condition(const Interval& b) {
  return acos(b) - sqrt((Interval(1.0) - b) / (Interval(1.0) + b));
}
}  // namespace

Interval compute_bgw(int precision_bits) {
  if (precision_bits < 16) throw DegenerateInput("compute_bgw: precision_bits < 16");
  double L = -0.9, R = -0.1;
  if (!certainly_neg(bgw_condition(Interval(L))) || !certainly_pos(bgw_condition(Interval(R))))
    throw Error("compute_bgw: initial bracket not verified");
  const double target = std::ldexp(1.0, -precision_bits);
  while (R - L > target) {
    double m = L + 0.5 * (R - L);
    if (m <= L || m >= R) break;
    Interval g = bgw_condition(Interval(m));
    if (certainly_neg(g)) {
      L = m;
    } else if (certainly_pos(g)) {
      R = m;
    } else {
      break;
    }
  }
  return Interval(L, R);
}

Constants make_constants(const RigorConfig& cfg) {
  Constants k;
  k.b_gw = compute_bgw(cfg.precision_bits);
  Interval one(1.0), two(2.0);
  k.c_gw = (one - k.b_gw) / two;
  k.alpha_gw = acos(k.b_gw) / pi() * two / (one - k.b_gw);
  k.b = one + k.b_gw;
  k.nu1 = Interval::from_decimal("0.004");
  k.nu2 = Interval::from_decimal("0.013");
  return k;
}

const Constants& constants() {
  static const Constants k = make_constants(default_config());
  return k;
}

}  // namespace mbc
