// Acceptance checks.  Usage: acceptance c1 ... c8
// Prints one PASS/FAIL line per check; exit status 0 iff all checks of the criterion pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "mbc/asymptotic.hpp"
#include "mbc/certifier.hpp"
#include "mbc/cli.hpp"
#include "mbc/mixture.hpp"
#include "mbc/point.hpp"

using namespace mbc;

namespace {

int failures = 0;
std::string tag;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s %s: %s\n", tag.c_str(), ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string without_wall_time(const std::string& text) {
  auto a = text.find("\nwall_time ");
  if (a == std::string::npos) return text;
  auto b = text.find('\n', a + 1);
  return text.substr(0, a) + (b == std::string::npos ? "" : text.substr(b));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// printed value read as correctly rounded to the given number of places
bool holds_printed(const Interval& x, double printed, int places) {
  double h = 0.5 * std::pow(10.0, -places);
  return x.overlaps(Interval(printed - h, printed + h));
}

// ---------------------------------------------------------------- C1

struct Run {
  Certificate cert;
  double seconds;
};

Run timed_certify(const CertifySettings& s) {
  auto t0 = std::chrono::steady_clock::now();
  Certificate c = certify(builtin_dstar(), s);
  return {c, seconds_since(t0)};
}

void check_run(const std::string& name, const Run& r, double limit) {
  report(r.cert.status == CertStatus::verified, name + " verified",
         fmt("status %s, %zu records, max ratio %.9f", to_string(r.cert.status), r.cert.records.size(),
             r.cert.max_ratio));
  report(r.seconds <= limit, name + " time", fmt("%.1f s with %d threads, limit %.0f s", r.seconds, threads(), limit));
  auto t0 = std::chrono::steady_clock::now();
  ReplayResult rep = replay(parse_certificate(write_certificate(r.cert)), threads());
  report(rep.ok, name + " replay", fmt("%s (%.1f s)", rep.message.c_str(), seconds_since(t0)));
}

void c1() {
  CertifySettings s;
  s.threads = threads();

  s.bound = 0.8790;
  check_run("bound 0.8790", timed_certify(s), 60);

  // staged run with checkpoints, resumed from the last one written
  s.bound = 0.8786;
  s.checkpoint_path = "acceptance_c1.ckpt";
  s.checkpoint_seconds = 5;
  Run mid = timed_certify(s);
  check_run("bound 0.8786", mid, 1800);
  std::string ck_text = slurp(s.checkpoint_path);
  bool resumed_same = false;
  std::string detail = "no checkpoint written";
  if (!ck_text.empty()) {
    Certificate ck = parse_certificate(ck_text);
    CertifySettings plain = s;
    plain.checkpoint_path.clear();
    Certificate res = resume(ck, plain);
    resumed_same = without_wall_time(write_certificate(res)) == without_wall_time(write_certificate(mid.cert));
    detail = fmt("checkpoint with %zu records, resumed certificate %s", ck.records.size(),
                 resumed_same ? "identical" : "differs");
  }
  std::remove(s.checkpoint_path.c_str());
  report(resumed_same, "bound 0.8786 resume", detail);

  s.checkpoint_path.clear();
  s.bound = 0.87853;
  Run full = timed_certify(s);
  check_run("bound 0.87853", full, 6 * 3600);
  std::ofstream("acceptance_087853.cert") << write_certificate(full.cert);

  s.bound = 0.8785;
  Run control = timed_certify(s);
  report(control.cert.status != CertStatus::verified, "control 0.8785 not verified",
         fmt("status %s", to_string(control.cert.status)));
}

// ---------------------------------------------------------------- C2

void c2() {
  ContourGrid g = contour_grid(builtin_dstar(), 200, threads());
  int i = g.argmax / g.n, j = g.argmax % g.n;
  report(std::fabs(g.max - 0.8785231) <= 1e-5, "grid maximum",
         fmt("max %.9f at (t1, t2) = (%.3f, %.3f)", g.max, g.t[i], g.t[j]));
  int comps = superlevel_components(g, 0.8784);
  report(comps == 1, "single peak", fmt("%d component(s) above 0.8784", comps));
}

// ---------------------------------------------------------------- C3

void c3() {
  const Constants& k = constants();
  report(holds_printed(k.alpha_gw, 0.8785672, 7) && k.alpha_gw.width() <= 1e-8, "alpha_GW",
         fmt("[%.12f, %.12f] vs 0.8785672", k.alpha_gw.lo(), k.alpha_gw.hi()));
  report(holds_printed(k.b_gw, -0.6891577, 7) && k.b_gw.width() <= 1e-8, "b_GW",
         fmt("[%.12f, %.12f] vs -0.6891577", k.b_gw.lo(), k.b_gw.hi()));
  report(holds_printed(k.c_gw, 0.844578, 6) && k.c_gw.width() <= 1e-8, "c_GW",
         fmt("[%.12f, %.12f] vs 0.844578", k.c_gw.lo(), k.c_gw.hi()));
  Interval c = completeness(builtin_dstar());
  report(c.overlaps(k.c_gw) && c.width() <= 1e-10, "completeness of dstar",
         fmt("[%.14f, %.14f], width %.2e", c.lo(), c.hi(), c.width()));
}

// ---------------------------------------------------------------- C4

void c4() {
  std::mt19937_64 pick(2024);
  std::uniform_real_distribution<double> U(0, 1);
  const std::size_t n = 10000000;
  int outside = 0;
  double worst = 0;
  auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 1000; ++k) {
    double rho = -0.99 + 1.98 * U(pick), q1 = 0.01 + 0.98 * U(pick), q2 = 0.01 + 0.98 * U(pick);
    Interval g = gamma(Interval(rho), Interval(q1), Interval(q2));
    double a = point::phi_inv(q1), b = point::phi_inv(q2), s = std::sqrt(1 - rho * rho);
    std::mt19937_64 gen(substream_seed(77, k));
    boost::random::normal_distribution<double> N;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double x = N(gen);
      if (x >= a) continue;
      if (rho * x + s * N(gen) < b) ++hits;
    }
    double p = static_cast<double>(hits) / n, se = std::sqrt(std::max(p * (1 - p), 1.0 / n) / n);
    double gap = std::max({0.0, g.lo() - p, p - g.hi()});
    worst = std::max(worst, gap / se);
    if (gap > 4 * se) ++outside;
  }
  report(outside == 0, "Monte Carlo containment",
         fmt("%d of 1000 triples beyond 4 se, worst %.2f se, %.0f s", outside, worst, seconds_since(t0)));

  int bad = 0;
  double widest = 0;
  for (int k = 0; k < 100; ++k) {
    Interval rho(-0.99 + 1.98 * (k + 0.5) / 100);
    Interval g = gamma(rho, Interval(0.5), Interval(0.5));
    Interval want = Interval(0.25) + asin(rho) / (Interval(2.0) * pi());
    widest = std::max(widest, g.width());
    if (!g.overlaps(want)) ++bad;
  }
  report(bad == 0, "quadrant identity", fmt("%d of 100 disjoint, widest enclosure %.2e", bad, widest));

  const double h = 1e-4;
  double err = 0;
  auto G = [](double r, double x, double y) { return gamma(Interval(r), Interval(x), Interval(y)).mid(); };
  for (int k = 0; k < 20; ++k) {
    double r = -0.9 + 1.8 * U(pick), x = 0.05 + 0.9 * U(pick), y = 0.05 + 0.9 * U(pick);
    GammaPartials p = gamma_partials(Interval(r), Interval(x), Interval(y));
    err = std::max(err, std::fabs(p.dq1.mid() - (G(r, x + h, y) - G(r, x - h, y)) / (2 * h)));
    err = std::max(err, std::fabs(p.dq2.mid() - (G(r, x, y + h) - G(r, x, y - h)) / (2 * h)));
    err = std::max(err, std::fabs(p.drho.mid() - (G(r + h, x, y) - G(r - h, x, y)) / (2 * h)));
  }
  report(err <= 1e-6, "partials vs finite differences", fmt("max deviation %.2e over 20 points", err));
}

// ---------------------------------------------------------------- C5

void c5() {
  Blueprint d = builtin_dstar();
  Blueprint p = perturb_pairwise(perturb_mu(d, 1e-3), 1e-2);
  RigorConfig cfg = default_config();
  cfg.quadrature_cells = 32;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1, 1), D(-0.05, 0.05);
  int bad = 0;
  double tightest = 0;
  for (int i = 0; i < 1000; ++i) {
    const Blueprint& bp = i % 2 ? p : d;
    ThresholdFunction a, b;
    double l1 = 0;
    for (int k = 0; k < 5; ++k) {
      double x = U(rng), y = std::clamp(x + (i % 3 ? D(rng) : U(rng)), -1.0, 1.0);
      a.t.emplace_back(x);
      b.t.emplace_back(y);
      l1 += std::fabs(x - y);
    }
    Interval sa = soundness_at(bp, a, cfg), sb = soundness_at(bp, b, cfg);
    double diff = std::max({0.0, sa.lo() - sb.hi(), sb.lo() - sa.hi()});
    if (diff > l1) ++bad;
    if (l1 > 0) tightest = std::max(tightest, diff / l1);
  }
  report(bad == 0, "Lipschitz in thresholds", fmt("%d of 1000 violate, max ratio %.3f", bad, tightest));

  Blueprint m = perturb_mu(d, 1e-3);
  bool support = std::all_of(m.mu().begin(), m.mu().end(), [](const auto& w) { return w.value.lo() > 0; });
  double bal = m.mu_balance().mag();
  bool same = completeness(m) == completeness(d);
  report(support && m.mu_sum().contains(1.0) && bal <= 2.2e-11 && same, "mu perturbation invariants",
         fmt("full support %s, |mean| <= %.2e, completeness %s", support ? "yes" : "no", bal,
             same ? "unchanged" : "changed"));

  int tight = 0, strict_after = 0;
  Blueprint q = perturb_pairwise(d, 1e-4);
  for (int k = 0; k < 5; ++k) {
    for (Slack s : d.triangle_status(k)) tight += s == Slack::tight;
    strict_after += strict_triangle(q.triangle_status(k));
  }
  report(tight == 3 && strict_after == 5, "strictness flags",
         fmt("%d tight triangles before, %d of 5 configurations strict after", tight, strict_after));

  ReducedProblem P(d);
  int missed = 0;
  for (int i = 0; i < 100; ++i) {
    double a = U(rng), b = U(rng);
    if (!P.root_t3(Interval(a), Interval(b), 1e-8).contains(P.point_root_t3(a, b))) ++missed;
    if (!P.root_t5(Interval(a), Interval(b), 1e-8).contains(P.point_root_t5(a, b))) ++missed;
  }
  report(missed == 0, "root containment", fmt("%d of 200 point roots outside", missed));
}

// ---------------------------------------------------------------- C6

void c6() {
  Blueprint d = builtin_dstar();
  auto t0 = std::chrono::steady_clock::now();
  Estimate c = estimate_mixture_completeness(d, 400, 1000000, 1, threads());
  ThresholdFunction zero = ThresholdFunction::constant(d, 0.0);
  Estimate s = estimate_mixture_soundness(d, zero, 400, 1000000, 2, threads());
  double secs = seconds_since(t0);
  double cg = constants().c_gw.mid();
  report(std::fabs(c.mean - cg) <= 0.01, "completeness estimate",
         fmt("%.6f +- %.6f vs c_GW %.6f", c.mean, c.stderr_, cg));
  Interval exact = soundness_at(d, zero);
  double gap = std::max({0.0, exact.lo() - s.mean, s.mean - exact.hi()});
  report(gap <= 4 * s.stderr_, "soundness estimate",
         fmt("%.6f +- %.6f vs [%.9f, %.9f]", s.mean, s.stderr_, exact.lo(), exact.hi()));
  report(secs <= 300, "runtime", fmt("%.1f s", secs));
}

// ---------------------------------------------------------------- C7

void c7() {
  Blueprint p = perturb_pairwise(perturb_mu(builtin_dstar(), 1e-3), 1e-2);
  double prev = 2;
  bool decreasing = true;
  std::string trail;
  for (double eps : {0.4, 0.3, 0.2}) {
    MixtureInstance inst = build_instance(p, 3, eps, 1000000, 1, threads());
    InstanceAudit a = audit(inst);
    trail += fmt(" %.1f:%.5f", eps, a.uncorrelatedness);
    decreasing = decreasing && a.uncorrelatedness < prev;
    prev = a.uncorrelatedness;
    if (eps != 0.2) continue;
    report(a.triangle_failures == 0 && a.min_slack > 0, "strict triangle inequalities",
           fmt("%zu edges, %zu failures, min slack %.3e", a.edges, a.triangle_failures, a.min_slack));
    report(std::fabs(a.balance) <= 1e-9, "weighted balance", fmt("%.3e", a.balance));
    double need = constants().c_gw.lo() - 0.05 - a.aux_mass;
    report(a.sdp_value >= need, "SDP value", fmt("%.6f >= %.6f (aux mass %.4f)", a.sdp_value, need, a.aux_mass));
  }
  report(decreasing, "uncorrelatedness decreasing", "eps:value" + trail);
}

// ---------------------------------------------------------------- C8

void c8() {
  const double printed[3][3] = {
      {0.151368, 0.005672, -0.016600}, {-0.121728, 0.002241, -0.029948}, {-0.546192, -0.066760, -0.148955}};
  const double bgw = constants().b_gw.mid();
  FamilyTable t = family_coefficients(bgw);
  for (int j = 0; j < 3; ++j) {
    double worst = 0;
    std::string vals;
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, std::fabs(t.rows[k][j] - printed[k][j]));
      vals += fmt(" %.6f", t.rows[k][j]);
    }
    report(worst <= 1e-4, fmt("table column %d", j + 1), fmt("recomputed%s, max deviation %.2e", vals.c_str(), worst));
  }
  FamilyWeights w = solve_family_weights(t);
  double dw = std::max({std::fabs(w.w1 - 0.53777), std::fabs(w.w2 - 0.40301), std::fabs(w.w3 - 0.05922)});
  report(dw <= 1e-4, "weights", fmt("%.5f %.5f %.5f", w.w1, w.w2, w.w3));
  report(std::fabs(w.residual + 0.02982) <= 1e-3, "residual coefficient", fmt("%.5f vs -0.02982", w.residual));

  // order checks: error ratio >= 2^5 - 1 across three halvings
  auto order = [](const std::function<double(double)>& err, double s0) {
    double worst = 1e300;
    double prev = err(s0);
    for (int i = 1; i <= 3; ++i) {
      double e = err(s0 / (1 << i));
      worst = std::min(worst, prev / e);
      prev = e;
    }
    return worst;
  };
  double r1 = order([](double c) { return std::fabs(taylor_phi(c) - phi_cdf(Interval(c)).mid()); }, 0.2);
  double r2 = order(
      [&](double s) {
        return std::fabs(taylor_phi_rho(0.9 * s, -0.4 * s, bgw) -
                         gamma(Interval(bgw), phi_cdf(Interval(0.9 * s)), phi_cdf(Interval(-0.4 * s))).mid());
      },
      0.2);
  double r3 = order(
      [&](double s) {
        return std::fabs(exact_pair_soundness(s, -0.7 * s, bgw, 0.8 * s, -0.5 * s) -
                         soundness_expansion_at_bgw(s, -0.7 * s, 0.8 * s, -0.5 * s));
      },
      0.2);
  report(std::min({r1, r2, r3}) >= 31, "expansion order", fmt("min error ratios %.1f %.1f %.1f", r1, r2, r3));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance c1..c8\n");
    return 1;
  }
  std::string c = argv[1];
  const std::pair<const char*, void (*)()> table[] = {{"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4},
                                                       {"c5", c5}, {"c6", c6}, {"c7", c7}, {"c8", c8}};
  for (auto [name, fn] : table) {
    if (c != name) continue;
    tag = "C" + c.substr(1);
    try {
      fn();
    } catch (const std::exception& e) {
      report(false, "exception", e.what());
    }
    return failures == 0 ? 0 : 1;
  }
  std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
  return 1;
}
