#pragma once

// Plain double-precision counterparts of the rigor routines.  Not rigorous;
// used for contours, initial guesses and as test oracles.

namespace mbc::point {

double phi(double x);
double phi_pdf(double x);
double phi_inv(double q);  // +-inf at 0 / 1

double gamma(double rho, double q1, double q2);
double gamma_drho(double rho, double q1, double q2);
double gamma_dq1(double rho, double q1, double q2);

// q_i + q_j - 2 Gamma with q = (1 - t)/2
double pair_value(double rho, double ti, double tj);
// d pair / d ti
double pair_dti(double rho, double ti, double tj);

}  // namespace mbc::point
