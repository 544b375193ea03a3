#include "mbc/certifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mbc/point.hpp"

namespace mbc {

namespace {

// role pairs of the five configurations
constexpr std::array<std::array<int, 2>, 6> kPairs = {{{0, 0}, {2, 4}, {3, 4}, {2, 3}, {2, 5}, {1, 5}}};

Interval A_of(const Interval& t, const RigorConfig& cfg) {
  Interval q = clamp_to((Interval(1.0) - t) * Interval(0.5), Interval::unit());
  return phi_inv_unbounded(q, cfg);
}

// d pair / d t_own = -1/2 + Phi((A_other - rho A_own)/sqrt(1 - rho^2))
Interval dpair(const Interval& rho, const Interval& a_own, const Interval& a_other, const RigorConfig& cfg) {
  Interval s = sqrt(Interval(1.0) - sqr(rho));
  Interval num = a_other - rho * a_own;
  if (std::isnan(num.lo()) || std::isnan(num.hi())) return Interval(-0.5, 0.5);
  return phi_cdf(num / s, cfg) - Interval(0.5);
}

Interval unit_sym() { return Interval(-1.0, 1.0); }

}  // namespace

DStarShape DStarShape::from(const Blueprint& bp) {
  const auto& B = bp.biases();
  std::vector<int> support;
  for (std::size_t k = 0; k < B.size(); ++k)
    if (bp.mu()[k].value.hi() > 0) support.push_back(static_cast<int>(k));
  if (support.size() != 2) throw UnsupportedMeasure("certifier: mu must be supported on exactly two biases");
  int neg = -1, pos = -1;
  for (int k : support) {
    if (B[k].value.hi() < 0) neg = k;
    if (B[k].value.lo() > 0) pos = k;
  }
  if (neg < 0 || pos < 0) throw UnsupportedMeasure("certifier: mu support must be one negative and one positive bias");
  if (B.size() != 5 || bp.configs().size() != 5)
    throw InfeasibleBlueprint("certifier: blueprint must have five biases and five configurations");
  std::vector<int> rest;
  for (int k = 0; k < 5; ++k)
    if (k != neg && k != pos) rest.push_back(k);
  std::sort(rest.begin(), rest.end());
  do {
    DStarShape sh;
    sh.bias = {-1, neg, rest[0], rest[1], pos, rest[2]};
    bool ok = true;
    std::array<bool, 5> used{};
    for (int c = 1; c <= 5 && ok; ++c) {
      int a = sh.bias[kPairs[c][0]], b = sh.bias[kPairs[c][1]];
      int found = -1;
      for (int k = 0; k < 5; ++k) {
        const auto& e = bp.configs()[k];
        if (!used[k] && ((e.i == a && e.j == b) || (e.i == b && e.j == a))) {
          found = k;
          break;
        }
      }
      if (found < 0) ok = false;
      else {
        used[found] = true;
        sh.config[c] = found;
      }
    }
    if (ok) {
      for (int c = 1; c <= 5; ++c) {
        sh.w[c] = bp.configs()[sh.config[c]].weight.value;
        sh.rho[c] = relative_bias(bp.configuration(sh.config[c]));
      }
      sh.ratio = bp.mu()[neg].value / bp.mu()[pos].value;
      return sh;
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  throw InfeasibleBlueprint("certifier: configuration structure differs from D*");
}

Interval root_find(const std::function<Interval(double)>& df, double eps) {
  // each side stops below eps/2 so the join stays within eps
  const double step = 0.5 * eps;
  auto lower = [&]() {
    double L = -1, R = 1;
    while (R - L >= step) {
      double M = L + 0.5 * (R - L);
      if (M <= L || M >= R) break;
      if (df(M).lo() > 0) L = M;
      else R = M;
    }
    return Interval(L, R);
  };
  auto upper = [&]() {
    double L = -1, R = 1;
    while (R - L >= step) {
      double M = L + 0.5 * (R - L);
      if (M <= L || M >= R) break;
      if (df(M).hi() < 0) R = M;
      else L = M;
    }
    return Interval(L, R);
  };
  return hull(lower(), upper());
}

ReducedProblem::ReducedProblem(const Blueprint& bp, const RigorConfig& cfg)
    : bp_(bp), sh_(DStarShape::from(bp)), cfg_(cfg) {}

Interval ReducedProblem::t4(const Interval& t1) const {
  return clamp_to(-(sh_.ratio * t1), unit_sym());
}

Interval ReducedProblem::dpartial_t3(const Interval& t2, const Interval& t3, const Interval& t4) const {
  Interval a2 = A_of(t2, cfg_), a3 = A_of(t3, cfg_), a4 = A_of(t4, cfg_);
  return sh_.w[2] * dpair(sh_.rho[2], a3, a4, cfg_) + sh_.w[3] * dpair(sh_.rho[3], a3, a2, cfg_);
}

Interval ReducedProblem::dpartial_t5(const Interval& t1, const Interval& t2, const Interval& t5) const {
  Interval a1 = A_of(t1, cfg_), a2 = A_of(t2, cfg_), a5 = A_of(t5, cfg_);
  return sh_.w[4] * dpair(sh_.rho[4], a5, a2, cfg_) + sh_.w[5] * dpair(sh_.rho[5], a5, a1, cfg_);
}

Interval ReducedProblem::root_t3(const Interval& t1, const Interval& t2, double eps) const {
  Interval a2 = A_of(t2, cfg_), a4 = A_of(t4(t1), cfg_);
  return root_find(
      [&](double m) {
        Interval a3 = A_of(Interval(m), cfg_);
        return sh_.w[2] * dpair(sh_.rho[2], a3, a4, cfg_) + sh_.w[3] * dpair(sh_.rho[3], a3, a2, cfg_);
      },
      eps);
}

Interval ReducedProblem::root_t5(const Interval& t1, const Interval& t2, double eps) const {
  Interval a1 = A_of(t1, cfg_), a2 = A_of(t2, cfg_);
  return root_find(
      [&](double m) {
        Interval a5 = A_of(Interval(m), cfg_);
        return sh_.w[4] * dpair(sh_.rho[4], a5, a2, cfg_) + sh_.w[5] * dpair(sh_.rho[5], a5, a1, cfg_);
      },
      eps);
}

Interval ReducedProblem::soundness_roles(const std::array<Interval, 6>& t) const {
  ThresholdFunction tf{std::vector<Interval>(5)};
  for (int r = 1; r <= 5; ++r) tf.t[sh_.bias[r]] = t[r];
  return soundness_at(bp_, tf, cfg_);
}

Interval ReducedProblem::soundness(const Interval& t1, const Interval& t2, const Interval& t3, const Interval& t4,
                                   const Interval& t5) const {
  return soundness_roles({Interval(0.0), t1, t2, t3, t4, t5});
}

// partials of s(t1,t2,t3,t5) = S(t1,t2,t3,t4(t1),t5); entry 4 unused
std::array<Interval, 6> ReducedProblem::gradient(const std::array<Interval, 6>& t) const {
  std::array<Interval, 6> a;
  for (int r = 1; r <= 5; ++r) a[r] = A_of(t[r], cfg_);
  const auto& w = sh_.w;
  const auto& rho = sh_.rho;
  std::array<Interval, 6> g;
  g[2] = w[1] * dpair(rho[1], a[2], a[4], cfg_) + w[3] * dpair(rho[3], a[2], a[3], cfg_) +
         w[4] * dpair(rho[4], a[2], a[5], cfg_);
  g[3] = w[2] * dpair(rho[2], a[3], a[4], cfg_) + w[3] * dpair(rho[3], a[3], a[2], cfg_);
  g[5] = w[4] * dpair(rho[4], a[5], a[2], cfg_) + w[5] * dpair(rho[5], a[5], a[1], cfg_);
  Interval d4 = w[1] * dpair(rho[1], a[4], a[2], cfg_) + w[2] * dpair(rho[2], a[4], a[3], cfg_);
  g[1] = w[5] * dpair(rho[5], a[1], a[5], cfg_) - sh_.ratio * d4;
  return g;
}

Interval ReducedProblem::reduced_soundness(const Interval& t1, const Interval& t2, double eps) const {
  Interval t3 = root_t3(t1, t2, eps), t5 = root_t5(t1, t2, eps);
  return soundness(t1, t2, t3, t4(t1), t5);
}

RegionBound ReducedProblem::region_bound(const Region& r, double eps_floor, double target) const {
  double eps = std::max(eps_floor, 0.5 * (r.t1.width() + r.t2.width()));
  RegionBound out;
  out.t4 = t4(r.t1);
  out.t3 = root_t3(r.t1, r.t2, eps);
  out.t5 = root_t5(r.t1, r.t2, eps);

  const double c1 = r.t1.mid(), c2 = r.t2.mid(), c3 = out.t3.mid(), c5 = out.t5.mid();
  out.s_center = soundness(Interval(c1), Interval(c2), Interval(c3), t4(Interval(c1)), Interval(c5));
  auto g = gradient({Interval(0.0), r.t1, r.t2, out.t3, out.t4, out.t5});
  Interval centered = out.s_center + g[1] * (r.t1 - Interval(c1)) + g[2] * (r.t2 - Interval(c2)) +
                      g[3] * (out.t3 - Interval(c3)) + g[5] * (out.t5 - Interval(c5));
  if (centered.hi() < target) {
    out.s_upper = centered;
    return out;
  }
  Interval naive = soundness(r.t1, r.t2, out.t3, out.t4, out.t5);
  out.s_upper = intersect(centered, naive);
  return out;
}

namespace {
double point_root(const std::function<double(double)>& f) {
  if (f(-1.0) <= 0) return -1.0;
  if (f(1.0) >= 0) return 1.0;
  double L = -1, R = 1;
  for (int it = 0; it < 200; ++it) {
    double M = L + 0.5 * (R - L);
    if (M <= L || M >= R) break;
    if (f(M) > 0) L = M;
    else R = M;
  }
  return L + 0.5 * (R - L);
}
}  // namespace

double ReducedProblem::point_root_t3(double t1, double t2) const {
  double t4v = -sh_.ratio.mid() * t1;
  return point_root([&](double t3) {
    return sh_.w[2].mid() * point::pair_dti(sh_.rho[2].mid(), t3, t4v) +
           sh_.w[3].mid() * point::pair_dti(sh_.rho[3].mid(), t3, t2);
  });
}

double ReducedProblem::point_root_t5(double t1, double t2) const {
  return point_root([&](double t5) {
    return sh_.w[4].mid() * point::pair_dti(sh_.rho[4].mid(), t5, t2) +
           sh_.w[5].mid() * point::pair_dti(sh_.rho[5].mid(), t5, t1);
  });
}

double ReducedProblem::point_s(double t1, double t2) const {
  std::vector<double> t(5);
  t[sh_.bias[1]] = t1;
  t[sh_.bias[2]] = t2;
  t[sh_.bias[3]] = point_root_t3(t1, t2);
  t[sh_.bias[4]] = -sh_.ratio.mid() * t1;
  t[sh_.bias[5]] = point_root_t5(t1, t2);
  return soundness_point(bp_, t);
}

Interval t4_from_balance(const Blueprint& bp, const Interval& t1) {
  auto sh = DStarShape::from(bp);
  return clamp_to(-(sh.ratio * t1), unit_sym());
}

Interval dpartial_t3(const Blueprint& bp, const Interval& t2, const Interval& t3, const Interval& t4,
                     const RigorConfig& cfg) {
  return ReducedProblem(bp, cfg).dpartial_t3(t2, t3, t4);
}

Interval dpartial_t5(const Blueprint& bp, const Interval& t1, const Interval& t2, const Interval& t5,
                     const RigorConfig& cfg) {
  return ReducedProblem(bp, cfg).dpartial_t5(t1, t2, t5);
}

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::verified: return "verified";
    case CertStatus::refuted_region: return "refuted-region";
    case CertStatus::inconclusive: return "inconclusive";
    case CertStatus::in_progress: return "in-progress";
  }
  return "?";
}

CertStatus cert_status_from(const std::string& s) {
  if (s == "verified") return CertStatus::verified;
  if (s == "refuted-region") return CertStatus::refuted_region;
  if (s == "inconclusive") return CertStatus::inconclusive;
  if (s == "in-progress") return CertStatus::in_progress;
  throw FormatError("unknown certificate status " + s);
}

namespace detail {

struct Outcome {
  RegionBound rb;
  char tag;  // V verified, R refuted, S split
};

Outcome evaluate(const ReducedProblem& P, const Region& r, const CertifySettings& st, const Interval& cgw) {
  double target_abs = rnd::mul_dn(st.bound, cgw.lo());
  Outcome o{P.region_bound(r, st.eps_floor, target_abs), 'S'};
  if (rnd::div_up(o.rb.s_upper.hi(), cgw.lo()) < st.bound) o.tag = 'V';
  else if (rnd::div_dn(o.rb.s_center.lo(), cgw.hi()) > st.bound) o.tag = 'R';
  return o;
}

template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  int nt = static_cast<int>(std::min<std::size_t>(threads, n));
  for (int k = 0; k < nt; ++k)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
    });
  for (auto& th : pool) th.join();
}

bool record_less(const CertRecord& a, const CertRecord& b) {
  auto key = [](const CertRecord& r) {
    return std::array<double, 4>{r.region.t1.lo(), r.region.t2.lo(), r.region.t1.hi(), r.region.t2.hi()};
  };
  return key(a) < key(b);
}

std::pair<Region, Region> split(const Region& r) {
  Region a = r, b = r;
  a.depth = b.depth = r.depth + 1;
  if (r.t1.width() >= r.t2.width()) {
    double m = r.t1.lo() + 0.5 * (r.t1.hi() - r.t1.lo());
    a.t1 = Interval(r.t1.lo(), m);
    b.t1 = Interval(m, r.t1.hi());
  } else {
    double m = r.t2.lo() + 0.5 * (r.t2.hi() - r.t2.lo());
    a.t2 = Interval(r.t2.lo(), m);
    b.t2 = Interval(m, r.t2.hi());
  }
  return {a, b};
}

Certificate run(const Blueprint& bp_in, const CertifySettings& st, std::vector<CertRecord> done,
                std::deque<Region> pending, std::size_t evaluated, double prior_seconds) {
  auto t0 = std::chrono::steady_clock::now();
  // work from the serialized form so replay sees exactly the same inputs
  const Blueprint bp = parse_blueprint(write_blueprint(bp_in));
  ReducedProblem P(bp, st.rigor);
  Constants k = make_constants(st.rigor);
  Certificate cert;
  cert.blueprint_text = write_blueprint(bp);
  cert.blueprint_id = blueprint_hash(bp);
  cert.bound = st.bound;
  cert.normalizer = k.c_gw;
  cert.settings = st;
  cert.status = CertStatus::verified;
  auto last_ckpt = t0;
  const std::size_t wave_size = std::max<std::size_t>(64, 8 * static_cast<std::size_t>(std::max(1, st.threads)));
  bool refuted = false, unresolved = false;

  auto snapshot = [&](CertStatus status) {
    Certificate c = cert;
    c.records = done;
    for (const auto& r : pending) c.records.push_back({r, Interval::entire(), 'P'});
    std::sort(c.records.begin(), c.records.end(), record_less);
    c.status = status;
    c.evaluated = evaluated;
    c.wall_seconds = prior_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
  };

  while (!pending.empty() && !refuted) {
    std::vector<Region> wave;
    while (!pending.empty() && wave.size() < wave_size) {
      wave.push_back(pending.front());
      pending.pop_front();
    }
    std::vector<Outcome> out(wave.size());
    parallel_for(wave.size(), st.threads, [&](std::size_t i) { out[i] = evaluate(P, wave[i], st, k.c_gw); });
    evaluated += wave.size();
    for (std::size_t i = 0; i < wave.size(); ++i) {
      if (out[i].tag == 'V') {
        done.push_back({wave[i], out[i].rb.s_upper, 'V'});
      } else if (out[i].tag == 'R') {
        done.push_back({wave[i], out[i].rb.s_upper, 'R'});
        refuted = true;
      } else if (wave[i].depth >= st.max_depth) {
        done.push_back({wave[i], out[i].rb.s_upper, 'U'});
        unresolved = true;
      } else {
        auto [a, b] = split(wave[i]);
        pending.push_back(a);
        pending.push_back(b);
      }
    }
    if (!st.checkpoint_path.empty() && !pending.empty() && !refuted) {
      auto now = std::chrono::steady_clock::now();
      if (std::chrono::duration<double>(now - last_ckpt).count() >= st.checkpoint_seconds) {
        std::ofstream f(st.checkpoint_path);
        f << write_certificate(snapshot(CertStatus::in_progress));
        last_ckpt = now;
      }
    }
  }
  CertStatus status = refuted ? CertStatus::refuted_region : unresolved ? CertStatus::inconclusive : CertStatus::verified;
  Certificate c = snapshot(status);
  if (refuted) {
    // unprocessed regions are not part of the record
    c.records.erase(std::remove_if(c.records.begin(), c.records.end(), [](const CertRecord& r) { return r.tag == 'P'; }),
                    c.records.end());
  }
  for (const auto& r : c.records)
    if (r.tag == 'V') c.max_ratio = std::max(c.max_ratio, rnd::div_up(r.s_upper.hi(), k.c_gw.lo()));
  return c;
}

}  // namespace detail

using detail::run;

Certificate certify(const Blueprint& bp, const CertifySettings& settings) {
  if (!(settings.bound > 0)) throw DegenerateInput("certify: bound must be positive");
  std::deque<Region> pending{Region{unit_sym(), unit_sym(), 0}};
  return run(bp, settings, {}, pending, 0, 0);
}

Certificate resume(const Certificate& ck, const CertifySettings& settings) {
  Blueprint bp = parse_blueprint(ck.blueprint_text);
  if (blueprint_hash(bp) != ck.blueprint_id) throw FormatError("checkpoint blueprint hash mismatch");
  std::vector<CertRecord> done;
  std::deque<Region> pending;
  for (const auto& r : ck.records) {
    if (r.tag == 'P') pending.push_back(r.region);
    else done.push_back(r);
  }
  // pending regions resume in breadth-first order
  std::stable_sort(pending.begin(), pending.end(), [](const Region& a, const Region& b) { return a.depth < b.depth; });
  return run(bp, settings, done, pending, ck.evaluated, ck.wall_seconds);
}

}  // namespace mbc

namespace mbc {

using detail::parallel_for;
using detail::split;

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw FormatError("certificate: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string write_certificate(const Certificate& c) {
  std::ostringstream out;
  const auto& s = c.settings;
  out << "mbcert-certificate 1\n";
  out << "blueprint_id " << c.blueprint_id << "\n";
  std::istringstream bp(c.blueprint_text);
  for (std::string line; std::getline(bp, line);) out << "bp " << line << "\n";
  out << "bound " << fmt(c.bound) << "\n";
  out << "normalizer " << fmt(c.normalizer.lo()) << " " << fmt(c.normalizer.hi()) << "\n";
  out << "setting precision_bits " << s.rigor.precision_bits << "\n";
  out << "setting quadrature_cells " << s.rigor.quadrature_cells << "\n";
  out << "setting clamp_magnitude " << fmt(s.rigor.clamp_magnitude) << "\n";
  out << "setting crossover " << fmt(s.rigor.crossover) << "\n";
  out << "setting max_depth " << s.max_depth << "\n";
  out << "setting eps_floor " << fmt(s.eps_floor) << "\n";
  out << "regions " << c.records.size() << "\n";
  for (const auto& r : c.records)
    out << fmt(r.region.t1.lo()) << " " << fmt(r.region.t1.hi()) << " " << fmt(r.region.t2.lo()) << " "
        << fmt(r.region.t2.hi()) << " " << r.region.depth << " " << fmt(r.s_upper.lo()) << " "
        << fmt(r.s_upper.hi()) << " " << r.tag << "\n";
  out << "status " << to_string(c.status) << "\n";
  out << "evaluated " << c.evaluated << "\n";
  out << "max_ratio " << fmt(c.max_ratio) << "\n";
  out << "wall_time " << fmt(c.wall_seconds) << "\n";
  out << "end\n";
  return out.str();
}

Certificate parse_certificate(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Certificate c;
  auto words = [](const std::string& l) {
    std::istringstream ls(l);
    std::vector<std::string> w;
    for (std::string t; ls >> t;) w.push_back(t);
    return w;
  };
  if (!std::getline(in, line) || line != "mbcert-certificate 1") throw FormatError("certificate: bad header");
  bool ended = false;
  std::size_t expected = 0;
  bool have_regions = false, have_status = false;
  while (std::getline(in, line)) {
    if (line.rfind("bp ", 0) == 0 || line == "bp") {
      c.blueprint_text += (line.size() > 3 ? line.substr(3) : "") + "\n";
      continue;
    }
    auto w = words(line);
    if (w.empty()) continue;
    const std::string& key = w[0];
    auto need = [&](std::size_t n) {
      if (w.size() != n) throw FormatError("certificate: malformed line '" + line + "'");
    };
    if (key == "end") {
      ended = true;
      break;
    } else if (key == "blueprint_id") {
      need(2);
      c.blueprint_id = w[1];
    } else if (key == "bound") {
      need(2);
      c.bound = parse_double(w[1]);
    } else if (key == "normalizer") {
      need(3);
      c.normalizer = Interval(parse_double(w[1]), parse_double(w[2]));
    } else if (key == "setting") {
      need(3);
      double v = parse_double(w[2]);
      if (w[1] == "precision_bits") c.settings.rigor.precision_bits = static_cast<int>(v);
      else if (w[1] == "quadrature_cells") c.settings.rigor.quadrature_cells = static_cast<int>(v);
      else if (w[1] == "clamp_magnitude") c.settings.rigor.clamp_magnitude = v;
      else if (w[1] == "crossover") c.settings.rigor.crossover = v;
      else if (w[1] == "max_depth") c.settings.max_depth = static_cast<int>(v);
      else if (w[1] == "eps_floor") c.settings.eps_floor = v;
      else throw FormatError("certificate: unknown setting " + w[1]);
    } else if (key == "regions") {
      need(2);
      expected = static_cast<std::size_t>(parse_double(w[1]));
      have_regions = true;
      for (std::size_t k = 0; k < expected; ++k) {
        if (!std::getline(in, line)) throw FormatError("certificate: truncated region list");
        auto r = words(line);
        if (r.size() != 8 || r[7].size() != 1 || std::string("VURP").find(r[7][0]) == std::string::npos)
          throw FormatError("certificate: malformed region '" + line + "'");
        CertRecord rec;
        rec.region.t1 = Interval(parse_double(r[0]), parse_double(r[1]));
        rec.region.t2 = Interval(parse_double(r[2]), parse_double(r[3]));
        rec.region.depth = static_cast<int>(parse_double(r[4]));
        rec.s_upper = Interval(parse_double(r[5]), parse_double(r[6]));
        rec.tag = r[7][0];
        c.records.push_back(rec);
      }
    } else if (key == "status") {
      need(2);
      c.status = cert_status_from(w[1]);
      have_status = true;
    } else if (key == "evaluated") {
      need(2);
      c.evaluated = static_cast<std::size_t>(parse_double(w[1]));
    } else if (key == "max_ratio") {
      need(2);
      c.max_ratio = parse_double(w[1]);
    } else if (key == "wall_time") {
      need(2);
      c.wall_seconds = parse_double(w[1]);
    } else {
      throw FormatError("certificate: unknown line '" + line + "'");
    }
  }
  if (!ended || !have_regions || !have_status || c.blueprint_text.empty())
    throw FormatError("certificate: incomplete");
  c.settings.bound = c.bound;
  return c;
}

ReplayResult replay(const Certificate& c, int threads) {
  ReplayResult res;
  auto fail = [&](const std::string& m, long idx) {
    res.ok = false;
    res.message = m;
    res.first_bad = idx;
    return res;
  };
  if (c.status != CertStatus::verified) return fail(std::string("status is ") + to_string(c.status), -1);
  Blueprint bp = parse_blueprint(c.blueprint_text);
  if (blueprint_hash(bp) != c.blueprint_id) return fail("blueprint hash mismatch", -1);
  Constants k = make_constants(c.settings.rigor);
  if (!(k.c_gw.lo() == c.normalizer.lo() && k.c_gw.hi() == c.normalizer.hi()))
    return fail("normalizer does not match recomputation", -1);

  for (std::size_t i = 0; i < c.records.size(); ++i)
    if (c.records[i].tag != 'V') return fail("record is not verified", static_cast<long>(i));

  // tiling: rebuild the split tree from the root and match every leaf once
  std::map<std::array<double, 4>, std::size_t> index;
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    const auto& r = c.records[i].region;
    if (!index.emplace(std::array<double, 4>{r.t1.lo(), r.t1.hi(), r.t2.lo(), r.t2.hi()}, i).second)
      return fail("duplicate region", static_cast<long>(i));
  }
  std::vector<char> used(c.records.size(), 0);
  std::vector<Region> stack{Region{Interval(-1.0, 1.0), Interval(-1.0, 1.0), 0}};
  while (!stack.empty()) {
    Region r = stack.back();
    stack.pop_back();
    auto it = index.find({r.t1.lo(), r.t1.hi(), r.t2.lo(), r.t2.hi()});
    if (it != index.end()) {
      if (c.records[it->second].region.depth != r.depth) return fail("region depth mismatch", it->second);
      used[it->second] = 1;
      continue;
    }
    if (r.depth >= c.settings.max_depth) return fail("regions do not tile the domain", -1);
    auto [a, b] = split(r);
    stack.push_back(b);
    stack.push_back(a);
  }
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) return fail("region outside the split tree", static_cast<long>(i));

  ReducedProblem P(bp, c.settings.rigor);
  double target_abs = rnd::mul_dn(c.bound, k.c_gw.lo());
  std::vector<char> good(c.records.size(), 0);
  parallel_for(c.records.size(), threads, [&](std::size_t i) {
    const auto& rec = c.records[i];
    Interval s = P.region_bound(rec.region, c.settings.eps_floor, target_abs).s_upper;
    good[i] = s.subset_of(rec.s_upper) && rnd::div_up(rec.s_upper.hi(), k.c_gw.lo()) < c.bound;
  });
  for (std::size_t i = 0; i < good.size(); ++i)
    if (!good[i]) return fail("recomputed bound does not support the record", static_cast<long>(i));
  res.ok = true;
  res.message = "replayed " + std::to_string(c.records.size()) + " regions";
  return res;
}

}  // namespace mbc
