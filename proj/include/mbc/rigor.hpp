#pragma once

// Certified enclosures of Phi, Phi^{-1}, the bivariate normal orthant
// probability Gamma_rho(q1, q2) and its partials, and the constants b_GW,
// c_GW, alpha_GW.

#include "mbc/interval.hpp"

namespace mbc {

struct RigorConfig {
  int precision_bits = 53;      // target width 2^-bits for b_GW bisection
  int quadrature_cells = 256;   // Taylor-model cells for the Gamma integral over [0, rho]
  double clamp_magnitude = 8.0; // Phi saturates beyond this
  double crossover = 6.0;       // erf series below, Gaussian tail bounds above
};

const RigorConfig& default_config();

Interval phi_cdf(const Interval& x, const RigorConfig& cfg = default_config());

struct PhiInv {
  Interval value;
  bool degenerate = false;  // q touched 0/1 or fell outside the clamp window
};

// Saturates at +-clamp_magnitude and flags it.  EmptyDomain if q misses [0,1].
PhiInv phi_inv(const Interval& q, const RigorConfig& cfg = default_config());

// Same enclosure but with infinite endpoints instead of saturation.
Interval phi_inv_unbounded(const Interval& q, const RigorConfig& cfg = default_config());

Interval gamma(const Interval& rho, const Interval& q1, const Interval& q2,
               const RigorConfig& cfg = default_config());

struct GammaPartials {
  Interval dq1, dq2, drho;
};

// DegenerateInput when an argument touches the boundary of its open domain.
GammaPartials gamma_partials(const Interval& rho, const Interval& q1, const Interval& q2,
                             const RigorConfig& cfg = default_config());

Interval compute_bgw(int precision_bits);

struct Constants {
  Interval alpha_gw, b_gw, c_gw, b;
  Interval nu1, nu2;
};

Constants make_constants(const RigorConfig& cfg = default_config());
// constants at the default configuration, computed once
const Constants& constants();

}  // namespace mbc
