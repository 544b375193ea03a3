#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mbc/mixture.hpp"

using namespace mbc;

namespace {

Blueprint single(const std::string& bij) {
  return parse_blueprint("blueprint one\nbiases\n  z = 0\nmu\n  z = 1\nconfigs\n  z z " + bij + " 1\n");
}

const Blueprint& perturbed() {
  static const Blueprint p = perturb_pairwise(perturb_mu(builtin_dstar(), 1e-3), 1e-2);
  return p;
}

MixtureInstance manual(const std::vector<std::vector<double>>& perp, const std::vector<double>& w) {
  MixtureInstance m;
  m.dim = static_cast<int>(perp[0].size());
  for (std::size_t i = 0; i < perp.size(); ++i) {
    m.vertices.push_back({0, static_cast<int>(i), 0.0, w[i]});
    std::vector<double> v{0.0};
    v.insert(v.end(), perp[i].begin(), perp[i].end());
    m.vectors.push_back(v);
  }
  return m;
}

}  // namespace

TEST_SUITE("mixture") {

TEST_CASE("correlated sampler") {
  auto [x, y] = sample_pair({1.0, 5, 9}, 3);
  CHECK(x == y);
  auto [x2, y2] = sample_pair({0.3, 5, 9}, 3);
  auto [x3, y3] = sample_pair({0.3, 5, 9}, 3);
  CHECK(x2 == x3);
  CHECK(y2 == y3);
  CHECK(sample_pair({0.3, 5, 9}, 4).first != x2);
  CHECK_THROWS_AS(sample_pair({1.5, 2, 1}, 0), DegenerateInput);
  const std::size_t n = 1000000;
  for (double rho : {0.0, -0.6891577}) {
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [a, b] = sample_pair({rho, 1, 21}, i);
      sxy += a[0] * b[0];
      sxx += a[0] * a[0];
      syy += b[0] * b[0];
    }
    double cov = sxy / n, se = std::sqrt((1 + rho * rho) / n);
    CHECK(std::fabs(cov - rho) <= 3 * se);
    CHECK(std::fabs(sxx / n - 1) <= 3 * std::sqrt(2.0 / n));
    CHECK(std::fabs(syy / n - 1) <= 3 * std::sqrt(2.0 / n));
    if (rho == 0) CHECK(std::fabs(sxy / std::sqrt(sxx * syy)) <= 3e-3);
  }
  CHECK(substream_seed(1, 2) != substream_seed(1, 3));
  CHECK(substream_seed(1, 2) != substream_seed(2, 2));
}

TEST_CASE("estimators on trivial blueprints") {
  CHECK(estimate_mixture_completeness(single("1"), 20, 20000, 1).mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(estimate_mixture_completeness(single("-1"), 20, 20000, 1).mean == doctest::Approx(1.0).epsilon(1e-12));
  Blueprint ind = single("0");
  Estimate s = estimate_mixture_soundness(ind, ThresholdFunction::constant(ind, 0.0), 50, 200000, 4);
  CHECK(std::fabs(s.mean - 0.5) <= 4 * s.stderr_);
  CHECK_THROWS_AS(estimate_mixture_completeness(ind, 1, 10, 1), DegenerateInput);
}

TEST_CASE("estimators are seed deterministic and thread invariant") {
  Blueprint d = builtin_dstar();
  Estimate a = estimate_mixture_completeness(d, 40, 30000, 8, 1);
  Estimate b = estimate_mixture_completeness(d, 40, 30000, 8, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
  Estimate c = estimate_mixture_soundness(d, ThresholdFunction::constant(d, 0.1), 40, 30000, 8, 1);
  Estimate e = estimate_mixture_soundness(d, ThresholdFunction::constant(d, 0.1), 40, 30000, 8, 2);
  CHECK(c.mean == e.mean);
}

TEST_CASE("soundness estimator consistency") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  Blueprint d = builtin_dstar();
  int outside = 0;
  for (int i = 0; i < 20; ++i) {
    const Blueprint& bp = i % 2 ? perturbed() : d;
    ThresholdFunction t;
    for (int k = 0; k < 5; ++k) t.t.emplace_back(U(rng));
    Interval exact = soundness_at(bp, t);
    Estimate e = estimate_mixture_soundness(bp, t, 400, 20000, 100 + i);
    double gap = std::max({0.0, exact.lo() - e.mean, e.mean - exact.hi()});
    if (gap > 4 * e.stderr_) ++outside;
  }
  CHECK(outside == 0);
}

TEST_CASE("sphere partitions") {
  SpherePartition q = partition_sphere(2, std::numbers::pi / 2);
  CHECK(q.cells.size() >= 4);
  for (const auto& c : q.cells) CHECK(c.diameter <= std::numbers::pi / 2 + 1e-15);
  SpherePartition p = partition_sphere(3, 0.5);
  double a0 = p.cells[0].area, total = 0;
  for (const auto& c : p.cells) {
    CHECK(c.diameter <= 0.5);
    CHECK(std::fabs(c.area - a0) <= 1e-9 * a0);
    CHECK(std::fabs(std::sqrt(c.rep[0] * c.rep[0] + c.rep[1] * c.rep[1] + c.rep[2] * c.rep[2]) - 1) <= 1e-15);
    total += c.area;
  }
  CHECK(std::fabs(total - 4 * std::numbers::pi) <= 1e-9);
  // every point lands in a cell whose representative is within the diameter bound
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> x{N(rng), N(rng), N(rng)};
    double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    int k = p.locate(x);
    REQUIRE(k >= 0);
    REQUIRE(k < static_cast<int>(p.cells.size()));
    const auto& c = p.cells[k];
    double cosang = (x[0] * c.rep[0] + x[1] * c.rep[1] + x[2] * c.rep[2]) / r;
    CHECK(std::acos(std::clamp(cosang, -1.0, 1.0)) <= c.diameter + 1e-12);
  }
  CHECK(zonal_partition(2).cells.size() == 2);
  CHECK_THROWS_AS(partition_sphere(4, 0.5), DegenerateInput);
}

TEST_CASE("instance construction and audit") {
  MixtureInstance inst = build_instance(perturbed(), 3, 0.4, 100000, 5);
  InstanceAudit a = audit(inst);
  CHECK(a.triangle_failures == 0);
  CHECK(std::fabs(a.balance) <= 1e-9);
  CHECK(std::fabs(a.edge_weight_sum - 1) <= 1e-12);
  CHECK(a.max_norm_error <= 1e-12);
  CHECK(a.max_ortho_error <= 1e-12);
  for (const auto& v : inst.vertices) CHECK(v.weight > 0);
  for (const auto& e : inst.edges) CHECK(e.weight > 0);
  CHECK(a.sdp_value >= completeness(perturbed()).lo() - 0.05 - a.aux_mass);
  CHECK(inst.eps_bad + inst.triangle_bad <= inst.samples);
  MixtureInstance again = build_instance(perturbed(), 3, 0.4, 100000, 5, 2);
  CHECK(write_instance(again) == write_instance(inst));
  std::string text = write_instance(inst);
  CHECK(write_instance(parse_instance(text)) == text);
  CHECK_THROWS_AS(parse_instance("mbcert-instance 1\nbroken"), FormatError);
  CHECK_THROWS_AS(build_instance(builtin_dstar(), 3, 0.4, 1000, 1), InfeasibleBlueprint);
  CHECK_THROWS_AS(build_instance(perturb_mu(builtin_dstar(), 1e-3), 3, 0.4, 1000, 1), InfeasibleBlueprint);
}

TEST_CASE("uncorrelatedness") {
  MixtureInstance o = manual({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1, 2, 3});
  CHECK(uncorrelatedness(o) == doctest::Approx(14.0 / 36.0).epsilon(1e-15));
  MixtureInstance anti = manual({{1, 0, 0}, {-1, 0, 0}}, {0.5, 0.5});
  CHECK(uncorrelatedness(anti) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("balanced cut enumeration") {
  MixtureInstance c = manual({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {1, 1, 1, 1});
  c.edges = {{0, 1, 0.4}, {1, 2, 0.1}, {2, 3, 0.4}, {3, 0, 0.1}};
  CHECK(best_balanced_cut_small(c, 0.0) == doctest::Approx(1.0));
  MixtureInstance star = manual({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {1, 1, 1, 1});
  star.edges = {{0, 1, 1.0 / 3}, {0, 2, 1.0 / 3}, {0, 3, 1.0 / 3}};
  double bal = best_balanced_cut_small(star, 0.0), free = best_balanced_cut_small(star, 2.0);
  CHECK(bal == doctest::Approx(2.0 / 3));
  CHECK(free == doctest::Approx(1.0));
  CHECK(free >= bal);
  std::vector<std::vector<double>> many(25, {1.0, 0.0});
  CHECK_THROWS_AS(best_balanced_cut_small(manual(many, std::vector<double>(25, 1.0)), 0.0), TooLarge);
}

TEST_CASE("coarse soundness audit on a small instance") {
  MixtureInstance inst = build_instance(perturbed(), 2, 1.6, 200000, 3);
  int real = 0;
  for (const auto& v : inst.vertices) real += v.bias >= 0;
  REQUIRE(real <= 24);
  const double slack = 0.05;
  double cut = best_balanced_cut_small(inst, slack);
  double bound = soundness_at(builtin_dstar(), ThresholdFunction::constant(builtin_dstar(), 0.0)).hi();
  // the O(eps) term has no instantiated constant; report the one this instance needs
  double c_eps = std::max(0.0, (cut - 0.87853 * constants().c_gw.hi() - slack) / inst.eps);
  MESSAGE("vertices " << real << " balanced cut " << cut << " zero-threshold soundness " << bound
                      << " implied eps constant " << c_eps);
  CHECK(cut <= 1.0 + 1e-12);
  CHECK(cut >= best_balanced_cut_small(inst, 0.0));
  CHECK(best_balanced_cut_small(inst, 2.0) >= cut);
}

}

TEST_SUITE("claims") {

// Tail claims stated for d = 400, eps = 0.05.
TEST_CASE("inner product tail at d = 400") {
  double f = inner_product_tail(-0.6891577, 400, 0.05, 10000, 1);
  MESSAGE("Pr[|x.y/d - rho| >= 0.05] = " << f);
  CHECK(f < 0.01);
}

TEST_CASE("eps-good filter at d = 400") {
  double f = eps_bad_fraction(-0.6891577, 400, 0.05, 10000, 1);
  MESSAGE("fraction routed to the auxiliary edge = " << f);
  CHECK(f < 0.02);
}

}
