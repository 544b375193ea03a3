#include "mbc/point.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace mbc::point {

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double phi_pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double phi_inv(double q) {
  if (q <= 0) return -std::numeric_limits<double>::infinity();
  if (q >= 1) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2 * q);
}

// Gamma = q1 q2 + (1/2pi) int_0^{asin rho} exp(-(a^2 + b^2 - 2ab sin th)/(2 cos^2 th)) dth
double gamma(double rho, double q1, double q2) {
  if (q1 <= 0 || q2 <= 0) return 0;
  if (q1 >= 1) return std::min(q2, 1.0);
  if (q2 >= 1) return q1;
  if (rho >= 1) return std::min(q1, q2);
  if (rho <= -1) return std::max(0.0, q1 + q2 - 1);
  double a = phi_inv(q1), b = phi_inv(q2);
  double s = a * a + b * b, p = 2 * a * b;
  auto f = [&](double th) {
    double c = std::cos(th);
    if (c <= 0) return 0.0;
    return std::exp(-(s - p * std::sin(th)) / (2 * c * c));
  };
  double top = std::asin(rho);
  double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, top, 8, 1e-13);
  double g = q1 * q2 + integral / (2 * std::numbers::pi);
  return std::clamp(g, std::max(0.0, q1 + q2 - 1), std::min(q1, q2));
}

double gamma_drho(double rho, double q1, double q2) {
  double a = phi_inv(q1), b = phi_inv(q2);
  double om = 1 - rho * rho;
  return std::exp(-(a * a - 2 * rho * a * b + b * b) / (2 * om)) / (2 * std::numbers::pi * std::sqrt(om));
}

double gamma_dq1(double rho, double q1, double q2) {
  double a = phi_inv(q1), b = phi_inv(q2);
  if (std::isinf(a) || std::isinf(b)) {
    if (b == -std::numeric_limits<double>::infinity()) return 0;
    if (b == std::numeric_limits<double>::infinity()) return 1;
    if (rho == 0) return phi(b);
    return (a > 0) == (rho > 0) ? 0.0 : 1.0;
  }
  return phi((b - rho * a) / std::sqrt(1 - rho * rho));
}

double pair_value(double rho, double ti, double tj) {
  double qi = 0.5 * (1 - ti), qj = 0.5 * (1 - tj);
  return qi + qj - 2 * gamma(rho, qi, qj);
}

double pair_dti(double rho, double ti, double tj) {
  return -0.5 + gamma_dq1(rho, 0.5 * (1 - ti), 0.5 * (1 - tj));
}

}  // namespace mbc::point
