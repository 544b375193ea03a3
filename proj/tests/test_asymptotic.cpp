#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mbc/asymptotic.hpp"
#include "mbc/rigor.hpp"

using namespace mbc;

namespace {

double bgw() { return constants().b_gw.mid(); }

// |exact - expansion| along a fixed direction, at scales s, s/2, s/4, s/8
template <typename F>
std::array<double, 4> errors(F err, double s) {
  std::array<double, 4> e{};
  for (int i = 0; i < 4; ++i) e[i] = err(s / (1 << i));
  return e;
}

}  // namespace

TEST_SUITE("asymptotic") {

TEST_CASE("taylor_phi") {
  CHECK(taylor_phi(0.0) == 0.5);
  CHECK(std::fabs(taylor_phi(0.1) - phi_cdf(Interval(0.1)).mid()) <= 1e-6);
  for (double c : {0.01, 0.1, 0.2, 0.3}) CHECK(taylor_phi(c) + taylor_phi(-c) == 1.0);
  auto e = errors([](double c) { return std::fabs(taylor_phi(c) - phi_cdf(Interval(c)).mid()); }, 0.2);
  for (int i = 0; i < 3; ++i) CHECK(e[i] / e[i + 1] >= 32 - 1.0);
}

TEST_CASE("taylor_phi_rho") {
  for (double rho : {-0.9, bgw(), 0.0, 0.5})
    CHECK(taylor_phi_rho(0, 0, rho) == doctest::Approx(0.5 - std::acos(rho) / (2 * std::numbers::pi)).epsilon(1e-15));
  const double rho = bgw();
  double via_gamma = gamma(Interval(rho), phi_cdf(Interval(0.05)), phi_cdf(Interval(-0.05))).mid();
  CHECK(std::fabs(taylor_phi_rho(0.05, -0.05, rho) - via_gamma) <= 5e-6);
  CHECK(taylor_phi_rho(0.1, -0.2, rho) == taylor_phi_rho(-0.2, 0.1, rho));
  CHECK(taylor_phi_rho(0.27, 0.03, 0.4) == taylor_phi_rho(0.03, 0.27, 0.4));
  auto e = errors(
      [&](double s) {
        double c1 = 0.9 * s, c2 = -0.4 * s;
        return std::fabs(taylor_phi_rho(c1, c2, rho) -
                         gamma(Interval(rho), phi_cdf(Interval(c1)), phi_cdf(Interval(c2))).mid());
      },
      0.2);
  for (int i = 0; i < 3; ++i) CHECK(e[i] / e[i + 1] >= 32 - 1.0);
}

TEST_CASE("soundness expansion") {
  const double base = std::acos(bgw()) / std::numbers::pi;
  CHECK(soundness_expansion_at_bgw(0, 0, 0, 0) == doctest::Approx(base).epsilon(1e-15));
  CHECK(std::fabs(hyperplane_expansion_average(0.05, 0.05) - base) <= 1e-5);
  CHECK(std::fabs(hyperplane_expansion_average(0.1, -0.2) - base) <= 1e-5);
  CHECK(soundness_expansion(bgw()).dropped_odd == 0.0);
  for (auto [b1, b2, c1, c2] : {std::array<double, 4>{0.1, -0.2, 0.05, 0.3}, {0.3, 0.01, -0.2, 0.1}})
    CHECK(soundness_expansion_at_bgw(b1, b2, c1, c2) == soundness_expansion_at_bgw(-b1, -b2, -c1, -c2));
  // order check across three halvings; degree 4 kept, odd terms vanish, error is degree 6
  double C = 0;
  auto e = errors(
      [&](double s) {
        double b1 = s, b2 = -0.7 * s, c1 = 0.8 * s, c2 = -0.5 * s;
        double err = std::fabs(exact_pair_soundness(b1, b2, bgw(), c1, c2) - soundness_expansion_at_bgw(b1, b2, c1, c2));
        C = std::max(C, err / std::pow(s, 6));
        return err;
      },
      0.2);
  MESSAGE("fitted constant C = " << C << ", errors " << e[0] << " " << e[1] << " " << e[2] << " " << e[3]);
  for (int i = 0; i < 3; ++i) CHECK(e[i] / e[i + 1] >= 32 - 1.0);
  CHECK(std::fabs(exact_pair_soundness(0.1, -0.2, bgw(), 0.05, 0.3) - soundness_expansion_at_bgw(0.1, -0.2, 0.05, 0.3)) <=
        1e-4);
}

TEST_CASE("family coefficients match the closed forms") {
  const double g = bgw(), r = std::sqrt(1 - g * g), D = 24 * std::numbers::pi * r * r * r, q = 2 * std::numbers::pi * r;
  const double want[3][3] = {
      {-g / q, -(3 * g - 2 * g * g * g) / D, 6 * g / D},
      {-(5 * g + 4) / q, -(40 + 75 * g - 34 * g * g * g) / D, (120 + 246 * g + 120 * g * g) / D},
      {-(8 * g + 8) / q, -(128 + 192 * g - 64 * g * g * g) / D, (384 + 768 * g + 384 * g * g) / D}};
  FamilyTable t = family_coefficients(g);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) CHECK(t.rows[k][j] == doctest::Approx(want[k][j]).epsilon(1e-9));
    CHECK(t.c2[k] == doctest::Approx(-t.rows[k][0]).epsilon(1e-12));
    CHECK(t.c4[k] == doctest::Approx(t.rows[k][1]).epsilon(1e-12));
  }
  CHECK(t.constant == doctest::Approx(std::acos(g) / std::numbers::pi).epsilon(1e-14));
  CHECK(std::fabs(t.rows[0][0] - 0.151368) <= 1e-4);
  CHECK(std::fabs(t.rows[1][0] + 0.121728) <= 1e-4);
  CHECK(std::fabs(t.rows[2][0] + 0.546192) <= 1e-4);
}

TEST_CASE("family weights") {
  FamilyTable t = family_coefficients(bgw());
  FamilyWeights w = solve_family_weights(t);
  CHECK(std::fabs(w.w1 - 0.53777) <= 1e-4);
  CHECK(std::fabs(w.w2 - 0.40301) <= 1e-4);
  CHECK(std::fabs(w.w3 - 0.05922) <= 1e-4);
  CHECK(w.w1 + w.w2 + w.w3 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.w1 >= 0);
  CHECK(w.w3 >= 0);
  for (int j = 0; j < 2; ++j)
    CHECK(std::fabs(w.w1 * t.rows[0][j] + w.w2 * t.rows[1][j] + w.w3 * t.rows[2][j]) <= 1e-6);
  double resid = w.w1 * t.rows[0][2] + w.w2 * t.rows[1][2] + w.w3 * t.rows[2][2];
  CHECK(w.residual == doctest::Approx(resid).epsilon(1e-12));
  FamilyTable flat = t;
  flat.rows[1] = flat.rows[0];
  CHECK_THROWS_AS(solve_family_weights(flat), SingularSystem);
}

TEST_CASE("modified family weights") {
  FamilyTable t = family_coefficients(bgw());
  FamilyWeights w = solve_family_weights(t);
  const double b = 0.05, base = std::acos(bgw()) / std::numbers::pi;
  FamilyWeights m = modified_family_weights(w, t, b);
  CHECK(m.w1 + m.w2 + m.w3 == doctest::Approx(1.0).epsilon(1e-14));
  double perf = family_exact_performance(m, b, bgw());
  MESSAGE("performance " << perf << " predicted " << base - 0.01 * std::pow(b, 4));
  CHECK(std::fabs(perf - (base - 0.01 * std::pow(b, 4))) <= 2e-6);
}

}
