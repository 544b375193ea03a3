#pragma once

// Small-bias Taylor machinery: degree-4 expansions of Phi and of the
// bivariate normal CDF, the soundness expansion at fixed b12 = b_GW, and the
// three-configuration family for odd rounding schemes.

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace mbc {

// Polynomial in (b1, b2, c1, c2) truncated at total degree `order`.
struct Expansion {
  std::vector<std::pair<std::array<int, 4>, double>> terms;
  int order = 4;
  double dropped_odd = 0;  // largest roundoff coefficient removed by the evenness argument

  double eval(double b1, double b2, double c1, double c2) const;
  double coef(int e_b1, int e_b2, int e_c1, int e_c2) const;
};

double taylor_phi(double c);
// expansion of Pr[X <= c1, Y <= c2] for a rho-correlated normal pair
Expansion phi_rho_expansion(double rho);
double taylor_phi_rho(double c1, double c2, double rho);

// Phi(c1) + Phi(c2) - 2 Phi_rho(c1, c2) with rho = (b12 - b1 b2)/sqrt((1-b1^2)(1-b2^2))
Expansion soundness_expansion(double b12);
double soundness_expansion_at_bgw(double b1, double b2, double c1, double c2);

// exact counterpart through the rigorous Gamma (interval midpoint)
double exact_pair_soundness(double b1, double b2, double b12, double c1, double c2);

// expected expansion value under hyperplane thresholds c_i = g b_i / sqrt(1 - b_i^2), g ~ N(0,1)
double hyperplane_expansion_average(double b1, double b2);

// configurations (b,0), (2b,-b), (2b,-2b) with thresholds linked the same way
constexpr std::array<std::array<int, 2>, 3> kFamily = {{{1, 0}, {2, -1}, {2, -2}}};

struct FamilyTable {
  // rows[k] = coefficients of (b^2 - c^2), (3b^4 - c^4), b^2 c^2 for configuration k
  std::array<std::array<double, 3>, 3> rows{};
  // raw coefficients of c^2 and c^4, for the consistency report
  std::array<double, 3> c2{}, c4{};
  double constant = 0;
};

FamilyTable family_coefficients(double b_gw);

struct FamilyWeights {
  double w1 = 0, w2 = 0, w3 = 0;
  double residual = 0;  // aggregate b^2 c^2 coefficient
};

FamilyWeights solve_family_weights(const FamilyTable& t);  // SingularSystem
FamilyWeights solve_family_weights();

// w1 and w3 shifted by -gap b^2 / |(b^2 - c^2) coefficient of configuration 3|,
// then renormalized to sum to 1
FamilyWeights modified_family_weights(const FamilyWeights& w, const FamilyTable& t, double b, double gap = 0.01);
// sum_k w_k * exact soundness of configuration k at bias scale b, hyperplane-linked thresholds (g = 1)
double family_exact_performance(const FamilyWeights& w, double b, double b_gw);

}  // namespace mbc
