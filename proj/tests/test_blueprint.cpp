#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "mbc/blueprint.hpp"

using namespace mbc;

namespace {

const char* kSingleAnti = R"(blueprint anti
biases
  z = 0
mu
  z = 1
configs
  z z -1 1
)";

const char* kHalfHalf = R"(blueprint halves
biases
  z = 0
mu
  z = 1
configs
  z z 0 0.5
  z z -1 0.5
)";

RigorConfig coarse() {
  RigorConfig c;
  c.quadrature_cells = 32;
  return c;
}

ThresholdFunction tf(std::vector<double> v) {
  ThresholdFunction t;
  for (double x : v) t.t.emplace_back(x);
  return t;
}

}  // namespace

TEST_SUITE("blueprint") {

TEST_CASE("relative bias") {
  const Interval bgw = constants().b_gw;
  CHECK(relative_bias({Interval(0.0), Interval(0.0), bgw}).overlaps(bgw));
  CHECK(relative_bias({Interval(0.3), Interval(0.3), Interval(0.3) * Interval(0.3)}).contains(0.0));
  CHECK(relative_bias({Interval(1.0), Interval(0.2), Interval(0.2)}) == Interval(0.0));
  Blueprint d = builtin_dstar();
  Configuration c = d.configuration(0);
  // oracle: the defining formula in double precision on the enclosure midpoints
  double bi = c.bi.mid(), bj = c.bj.mid(), bij = c.bij.mid();
  double rho = (bij - bi * bj) / std::sqrt((1 - bi * bi) * (1 - bj * bj));
  Interval r = relative_bias(c);
  CHECK(std::fabs(r.mid() - rho) <= 1e-12);
  CHECK(std::fabs(r.mid() - -0.6559427) <= 1e-6);
  CHECK(r.width() <= 1e-12);
}

TEST_CASE("triangle inequalities") {
  Blueprint d = builtin_dstar();
  for (int k = 0; k < 5; ++k) CHECK(satisfies_triangle(d.triangle_status(k)));
  auto bad = triangle_status({Interval(0.9), Interval(-0.9), Interval(0.5)});
  CHECK_FALSE(satisfies_triangle(bad));
  CHECK_THROWS_AS(parse_blueprint("blueprint x\nbiases\n  p = 0.9\n  m = -0.9\nmu\n  p = 0.5\n  m = 0.5\n"
                                  "configs\n  p m 0.5 1\n"),
                  InfeasibleBlueprint);
}

TEST_CASE("completeness") {
  Blueprint d = builtin_dstar();
  Interval c = completeness(d);
  CHECK(c.overlaps(constants().c_gw));
  CHECK(c.width() <= 1e-10);
  CHECK(completeness(parse_blueprint(kSingleAnti)).contains(1.0));
  CHECK(completeness(parse_blueprint(kHalfHalf)).contains(0.75));
}

TEST_CASE("pair value") {
  const Interval bgw = constants().b_gw;
  Configuration th{Interval(0.0), Interval(0.0), bgw};
  Interval v = pair_value(th, Interval(0.0), Interval(0.0));
  CHECK(v.overlaps(acos(bgw) / pi()));
  CHECK(v.overlaps(constants().alpha_gw * constants().c_gw));
  Configuration ind{Interval(0.3), Interval(0.3), Interval(0.3) * Interval(0.3)};
  CHECK(pair_value(ind, Interval(0.0), Interval(0.0)).contains(0.5));
  CHECK(pair_value(th, Interval(1.0), Interval(-1.0)).contains(1.0));
  CHECK(pair_value(th, Interval(1.0), Interval(-1.0)).subset_of(Interval(0.0, 1.0)));
}

TEST_CASE("soundness at zero thresholds") {
  Blueprint d = builtin_dstar();
  Interval s = soundness_at(d, ThresholdFunction::constant(d, 0.0));
  // per-configuration quadrant identity, weighted
  Interval want(0.0);
  for (int k : d.canonical_order())
    want += d.configs()[k].weight.value * acos(relative_bias(d.configuration(k))) / pi();
  CHECK(s.overlaps(want));
  for (int k = 0; k < 5; ++k) {
    Interval rho = relative_bias(d.configuration(k));
    CHECK(rho.hi() <= 0);
    CHECK(pair_value(d.configuration(k), Interval(0.0), Interval(0.0)).overlaps(acos(rho) / pi()));
  }
}

TEST_CASE("balance residual") {
  Blueprint d = builtin_dstar();
  CHECK(balance_residual(d, ThresholdFunction::constant(d, 0.0)) == Interval(0.0));
  CHECK(balance_residual(d, ThresholdFunction::constant(d, 1.0)).contains(1.0));
  ThresholdFunction t = ThresholdFunction::constant(d, 0.3);
  t.t[0] = Interval(1.0);
  t.t[3] = -(d.mu()[0].value / d.mu()[3].value);
  CHECK(balance_residual(d, t).contains(0.0));
  CHECK(almost_balanced(d, t, 1e-12));
  CHECK_FALSE(almost_balanced(d, ThresholdFunction::constant(d, 0.5), 0.1));
}

TEST_CASE("builtin dstar") {
  Blueprint d = builtin_dstar();
  CHECK(d.biases().size() == 5);
  // oracle: the defining expressions on the double value of b_GW
  const double b = 1 + constants().b_gw.mid();
  CHECK(std::fabs(d.biases()[0].value.mid() - (-2 * b - 0.013)) <= 1e-14);
  CHECK(std::fabs(d.biases()[4].value.mid() - (2 * b + 0.004)) <= 1e-14);
  CHECK(d.biases()[0].value.width() <= 1e-12);
  CHECK(constants().b.overlaps(Interval(0.310842263355 - 5e-13, 0.310842263355 + 5e-13)));
  CHECK(d.mu_balance().overlaps(Interval(-2.2e-11, 2.2e-11)));
  CHECK(d.mu_sum().contains(1.0));
  Interval w(0.0);
  for (const auto& c : d.configs()) w += c.weight.value;
  CHECK(w.contains(1.0));
  CHECK(parse_blueprint(dstar_text()).name() == "dstar");
  CHECK(blueprint_hash(parse_blueprint(write_blueprint(d))) == blueprint_hash(d));
  CHECK(write_blueprint(parse_blueprint(write_blueprint(d))) == write_blueprint(d));
  CHECK(load_blueprint("dstar").name() == "dstar");
}

TEST_CASE("tight triangles") {
  Blueprint d = builtin_dstar();
  int tight = 0;
  for (int k = 0; k < 5; ++k)
    for (Slack s : d.triangle_status(k)) tight += s == Slack::tight;
  CHECK(tight == 3);
  Blueprint p = perturb_pairwise(d, 1e-4);
  for (int k = 0; k < 5; ++k) CHECK(strict_triangle(p.triangle_status(k)));
  Interval drop = completeness(d) - completeness(p);
  CHECK(drop.contains(0.5e-4));
  CHECK(blueprint_hash(perturb_pairwise(d, 0.0)) == blueprint_hash(d));
  CHECK_THROWS_AS(perturb_pairwise(d, 0.5), InfeasiblePerturbation);
}

TEST_CASE("perturb_mu invariants") {
  Blueprint d = builtin_dstar();
  CHECK(blueprint_hash(perturb_mu(d, 0.0)) == blueprint_hash(d));
  Blueprint p = perturb_mu(d, 1e-3);
  for (const auto& m : p.mu()) CHECK(m.value.lo() >= 1e-3);
  CHECK(p.mu_sum().contains(1.0));
  CHECK(std::fabs(p.mu_balance().mid()) <= 2.2e-11);
  CHECK(completeness(p) == completeness(d));
  Interval ds = soundness_at(p, ThresholdFunction::constant(p, 0.0)) - soundness_at(d, ThresholdFunction::constant(d, 0.0));
  CHECK(ds.mag() <= 2 * 1e-3 * 5);
  CHECK_THROWS_AS(perturb_mu(d, 0.5), InfeasiblePerturbation);
  CHECK_THROWS_AS(perturb_mu(parse_blueprint(kSingleAnti), 1e-3), InfeasiblePerturbation);
}

TEST_CASE("Lipschitz in thresholds") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1), D(-0.05, 0.05);
  Blueprint d = builtin_dstar();
  Blueprint p = perturb_pairwise(perturb_mu(d, 1e-3), 1e-2);
  RigorConfig cfg = coarse();
  for (int i = 0; i < 200; ++i) {
    const Blueprint& bp = i % 2 ? p : d;
    std::vector<double> a(5), b(5);
    double l1 = 0;
    for (int k = 0; k < 5; ++k) {
      a[k] = U(rng);
      b[k] = std::clamp(a[k] + (i % 3 ? D(rng) : U(rng)), -1.0, 1.0);
      l1 += std::fabs(a[k] - b[k]);
    }
    Interval sa = soundness_at(bp, tf(a), cfg), sb = soundness_at(bp, tf(b), cfg);
    CHECK(std::fabs(sa.mid() - sb.mid()) <= l1 + sa.width() + sb.width());
  }
}

TEST_CASE("canonical summation order") {
  Blueprint d = builtin_dstar();
  std::string text = write_blueprint(d);
  // reverse the configuration lines
  auto pos = text.find("configs\n");
  std::string head = text.substr(0, pos + 8), body = text.substr(pos + 8);
  std::vector<std::string> lines;
  for (std::size_t s = 0, e; (e = body.find('\n', s)) != std::string::npos; s = e + 1) lines.push_back(body.substr(s, e - s + 1));
  std::string rev = head;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) rev += *it;
  Blueprint r = parse_blueprint(rev);
  ThresholdFunction t = tf({0.1, -0.2, 0.3, 0.05, -0.4});
  CHECK(soundness_at(d, t) == soundness_at(r, t));
  CHECK(completeness(d) == completeness(r));
}

TEST_CASE("blueprint format errors") {
  CHECK_THROWS_AS(parse_blueprint("blueprint x\nbiases\n  a = 1 +* b\n"), FormatError);
  CHECK_THROWS_AS(parse_blueprint("nonsense\n"), FormatError);
  CHECK_THROWS_AS(parse_blueprint(std::string(kSingleAnti) + "  z q b_GW 0.1\n"), Error);
  Blueprint h = parse_blueprint(kHalfHalf);
  CHECK(parse_blueprint(write_blueprint(h)).configs().size() == 2);
}

}

TEST_SUITE("claims") {

// Quoted decimals for the extreme biases; -2b - nu2 from the quoted b ends in ...526710.
TEST_CASE("printed bias decimals") {
  Blueprint d = builtin_dstar();
  char buf[96];
  std::snprintf(buf, sizeof buf, "b1 = %.15f, b5 = %.15f", d.biases()[0].value.mid(), d.biases()[4].value.mid());
  MESSAGE(buf);
  CHECK(d.biases()[0].value.overlaps(Interval(-0.634684524710 - 5e-13, -0.634684524710 + 5e-13)));
  CHECK(d.biases()[4].value.overlaps(Interval(0.625684524710 - 5e-13, 0.625684524710 + 5e-13)));
}

}
