#include "mbc/mixture.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "mbc/point.hpp"

namespace mbc {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
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

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void fill_normal(std::mt19937_64& g, std::vector<double>& v) {
  std::normal_distribution<double> n01;
  for (auto& x : v) x = n01(g);
}

void correlated(std::mt19937_64& g, double rho, std::vector<double>& x, std::vector<double>& y) {
  fill_normal(g, x);
  fill_normal(g, y);
  if (rho == 1) {
    y = x;
    return;
  }
  if (rho == -1) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = -x[i];
    return;
  }
  double s = std::sqrt(1 - rho * rho);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = rho * x[i] + s * y[i];
}

struct Moments {
  double sum = 0, sum2 = 0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum2 += o.sum2;
    n += o.n;
  }
  double mean() const { return n ? sum / n : 0; }
  double var() const {
    if (n < 2) return 0;
    double m = mean();
    return std::max(0.0, (sum2 - n * m * m) / (n - 1));
  }
};

constexpr std::size_t kChunk = 4096;

// per-configuration stratified estimator; value(k, rng) returns one draw
template <typename V>
Estimate stratified(const Blueprint& bp, std::size_t n, std::uint64_t seed, int threads, V&& value) {
  const auto& cs = bp.configs();
  std::vector<std::size_t> alloc(cs.size());
  std::size_t used = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    alloc[k] = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(cs[k].weight.value.mid() * n)));
    used += alloc[k];
  }
  Estimate out;
  out.samples = used;
  double var = 0;
  std::uint64_t base = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    std::size_t nk = alloc[k];
    std::size_t chunks = (nk + kChunk - 1) / kChunk;
    std::vector<Moments> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
      std::size_t end = std::min(nk, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        std::mt19937_64 g(substream_seed(seed, base + i));
        parts[c].add(value(k, g));
      }
    });
    Moments m;
    for (const auto& p : parts) m.merge(p);
    double w = cs[k].weight.value.mid();
    out.mean += w * m.mean();
    var += w * w * m.var() / m.n;
    base += nk;
  }
  out.stderr_ = std::sqrt(var);
  return out;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

std::pair<std::vector<double>, std::vector<double>> sample_pair(const CorrelatedSampler& s, std::uint64_t draw) {
  if (!(std::fabs(s.rho) <= 1)) throw DegenerateInput("sample_pair: |rho| > 1");
  std::mt19937_64 g(substream_seed(s.seed, draw));
  std::vector<double> x(s.dim), y(s.dim);
  correlated(g, s.rho, x, y);
  return {x, y};
}

Estimate estimate_mixture_completeness(const Blueprint& bp, int d, std::size_t n, std::uint64_t seed, int threads) {
  if (d < 2) throw DegenerateInput("estimate_mixture_completeness: d must be at least 2");
  std::vector<double> rho, bi, bj;
  for (std::size_t k = 0; k < bp.configs().size(); ++k) {
    auto th = bp.configuration(static_cast<int>(k));
    rho.push_back(relative_bias(th).mid());
    bi.push_back(th.bi.mid());
    bj.push_back(th.bj.mid());
  }
  return stratified(bp, n, seed, threads, [&](std::size_t k, std::mt19937_64& g) {
    std::vector<double> x(d), y(d);
    correlated(g, rho[k], x, y);
    double c = dot(x, y) / std::sqrt(dot(x, x) * dot(y, y));
    double vv = bi[k] * bj[k] + std::sqrt((1 - bi[k] * bi[k]) * (1 - bj[k] * bj[k])) * c;
    return (1 - vv) / 2;
  });
}

Estimate estimate_mixture_soundness(const Blueprint& bp, const ThresholdFunction& t, int d, std::size_t n,
                                    std::uint64_t seed, int threads) {
  if (d < 2) throw DegenerateInput("estimate_mixture_soundness: d must be at least 2");
  if (t.t.size() != bp.biases().size()) throw DegenerateInput("threshold function does not cover B");
  std::vector<double> rho, qi, qj;
  for (std::size_t k = 0; k < bp.configs().size(); ++k) {
    const auto& c = bp.configs()[k];
    rho.push_back(relative_bias(bp.configuration(static_cast<int>(k))).mid());
    qi.push_back((1 - t.t[c.i].mid()) / 2);
    qj.push_back((1 - t.t[c.j].mid()) / 2);
  }
  return stratified(bp, n, seed, threads, [&](std::size_t k, std::mt19937_64& g) {
    std::vector<double> x(d), y(d), r(d);
    correlated(g, rho[k], x, y);
    fill_normal(g, r);
    double zi = dot(x, r) / std::sqrt(dot(x, x));
    double zj = dot(y, r) / std::sqrt(dot(y, y));
    bool si = point::phi(zi) > qi[k];
    bool sj = point::phi(zj) > qj[k];
    return si != sj ? 1.0 : 0.0;
  });
}

double inner_product_tail(double rho, int d, double eps, std::size_t trials, std::uint64_t seed) {
  CorrelatedSampler s{rho, d, seed};
  std::size_t bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    auto [x, y] = sample_pair(s, i);
    if (std::fabs(dot(x, y) / d - rho) >= eps) ++bad;
  }
  return static_cast<double>(bad) / trials;
}

namespace {
bool eps_good(const std::vector<double>& x, const std::vector<double>& y, double rho, double eps) {
  double d = static_cast<double>(x.size());
  return std::fabs(dot(x, x) / d - 1) < eps && std::fabs(dot(y, y) / d - 1) < eps &&
         std::fabs(dot(x, y) / d - rho) < eps;
}
}  // namespace

double eps_bad_fraction(double rho, int d, double eps, std::size_t trials, std::uint64_t seed) {
  CorrelatedSampler s{rho, d, seed};
  std::size_t bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    auto [x, y] = sample_pair(s, i);
    if (!eps_good(x, y, rho, eps)) ++bad;
  }
  return static_cast<double>(bad) / trials;
}

// ---- sphere partitions ----

namespace {

std::vector<double> polar(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// geodesic distance between (ta, 0) and (tb, dphi)
double geodesic(double ta, double tb, double dphi) {
  double c = std::cos(ta) * std::cos(tb) + std::sin(ta) * std::sin(tb) * std::cos(dphi);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// diameter bound of {theta in [t1,t2], phi in an interval of width dphi <= pi}:
// for fixed colatitudes the distance grows with the longitude gap, so the
// maximum is over pairs at full gap; sampled colatitudes plus the Lipschitz
// slack (distance is 1-Lipschitz in each colatitude) bound it from above
double collar_cell_diameter(double t1, double t2, double dphi) {
  constexpr int m = 64;
  double h = (t2 - t1) / m;
  double best = 0;
  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b) best = std::max(best, geodesic(t1 + a * h, t1 + b * h, dphi));
  return best + h + 1e-12;
}

double cap_area(double theta) { return 2 * kPi * (1 - std::cos(theta)); }

}  // namespace

SpherePartition zonal_partition(int n) {
  if (n < 1) throw DegenerateInput("zonal_partition: n must be positive");
  SpherePartition p;
  p.dim = 3;
  const double a = 4 * kPi / n;
  if (n == 1) {
    p.theta = {0, kPi};
    p.per_collar = {1};
  } else {
    double tc = std::acos(1 - a / (2 * kPi));
    std::vector<int> counts{1};
    if (n > 2) {
      double ideal = std::sqrt(a);
      int collars = std::max(1, static_cast<int>(std::lround((kPi - 2 * tc) / ideal)));
      double fit = (kPi - 2 * tc) / collars;
      double carry = 0;
      for (int i = 1; i <= collars; ++i) {
        double r = (cap_area(tc + i * fit) - cap_area(tc + (i - 1) * fit)) / a;
        int ai = static_cast<int>(std::lround(r + carry));
        carry += r - ai;
        counts.push_back(ai);
      }
    }
    counts.push_back(1);
    int total = 0;
    for (int c : counts) total += c;
    counts[counts.size() - 2] += n - total;  // absorb rounding drift
    p.theta = {0};
    int cum = 0;
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
      cum += counts[i];
      p.theta.push_back(std::acos(std::clamp(1 - cum * a / (2 * kPi), -1.0, 1.0)));
    }
    p.theta.push_back(kPi);
    p.per_collar = counts;
  }
  for (std::size_t z = 0; z < p.per_collar.size(); ++z) {
    double t1 = p.theta[z], t2 = p.theta[z + 1];
    int m = p.per_collar[z];
    double dphi = 2 * kPi / m;
    double diam;
    if (m == 1) diam = t1 == 0 && t2 == kPi ? kPi : t1 == 0 ? 2 * t2 : t2 == kPi ? 2 * (kPi - t1) : kPi;
    else diam = dphi <= kPi ? collar_cell_diameter(t1, t2, dphi) : kPi;
    double area = (std::cos(t1) - std::cos(t2)) * dphi;
    double tm = std::acos((std::cos(t1) + std::cos(t2)) / 2);
    for (int j = 0; j < m; ++j) {
      SphereCell c;
      c.rep = m == 1 && t1 == 0 ? std::vector<double>{0, 0, 1}
              : m == 1 && t2 == kPi ? std::vector<double>{0, 0, -1}
                                    : polar(tm, (j + 0.5) * dphi);
      c.diameter = std::min(diam, kPi);
      c.area = area;
      p.cells.push_back(c);
    }
  }
  return p;
}

SpherePartition partition_sphere(int dim, double eps) {
  if (!(eps > 0 && eps < 1) && !(dim == 2 && eps > 0)) throw DegenerateInput("partition_sphere: eps out of range");
  if (dim == 2) {
    int n = std::max(1, static_cast<int>(std::ceil(2 * kPi / eps - 1e-12)));
    while (2 * kPi / n > eps) ++n;
    SpherePartition p;
    p.dim = 2;
    p.eps = eps;
    for (int j = 0; j < n; ++j) {
      double phi = (j + 0.5) * 2 * kPi / n;
      p.cells.push_back({{std::cos(phi), std::sin(phi)}, std::min(2 * kPi / n, kPi), 2 * kPi / n});
    }
    return p;
  }
  if (dim != 3) throw DegenerateInput("partition_sphere: only dim 2 and 3 are supported");
  // a cell of geodesic diameter eps has area at most that of a cap of radius eps/2
  int n = std::max(2, static_cast<int>(std::floor(4 * kPi / cap_area(eps / 2))));
  for (;; ++n) {
    SpherePartition p = zonal_partition(n);
    double worst = 0;
    for (const auto& c : p.cells) worst = std::max(worst, c.diameter);
    if (worst <= eps) {
      p.eps = eps;
      return p;
    }
  }
}

int SpherePartition::locate(const std::vector<double>& x) const {
  if (dim == 2) {
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0) phi += 2 * kPi;
    int n = static_cast<int>(cells.size());
    int j = static_cast<int>(phi / (2 * kPi / n));
    return std::clamp(j, 0, n - 1);
  }
  double r = std::sqrt(dot(x, x));
  double th = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
  int z = static_cast<int>(std::upper_bound(theta.begin() + 1, theta.end() - 1, th) - (theta.begin() + 1));
  int base = 0;
  for (int k = 0; k < z; ++k) base += per_collar[k];
  int m = per_collar[z];
  if (m == 1) return base;
  double phi = std::atan2(x[1], x[0]);
  if (phi < 0) phi += 2 * kPi;
  int j = std::clamp(static_cast<int>(phi / (2 * kPi / m)), 0, m - 1);
  return base + j;
}

// ---- instances ----

double MixtureInstance::aux_mass() const {
  int a = static_cast<int>(vertices.size()) - 2, b = a + 1;
  double s = 0;
  for (const auto& e : edges)
    if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) s += e.weight;
  return s;
}

namespace {

bool strict_triangle_numeric(double bi, double bj, double bij, double margin) {
  return bij + 1 - bi - bj > margin && bij + 1 + bi + bj > margin && 1 - bi + bj - bij > margin &&
         1 + bi - bj - bij > margin;
}

constexpr double kTriangleMargin = 1e-12;

}  // namespace

MixtureInstance build_instance(const Blueprint& bp, int dim, double eps, std::size_t n, std::uint64_t seed,
                               int threads) {
  const auto& B = bp.biases();
  for (std::size_t k = 0; k < B.size(); ++k)
    if (!(bp.mu()[k].value.lo() > 0)) throw InfeasibleBlueprint("build_instance: mu must have full support");
  for (int k = 0; k < static_cast<int>(bp.configs().size()); ++k)
    if (!strict_triangle(bp.triangle_status(k)))
      throw InfeasibleBlueprint("build_instance: triangle inequalities must be strict");

  SpherePartition part = partition_sphere(dim, eps);
  const int nc = static_cast<int>(part.cells.size());
  const int nb = static_cast<int>(B.size());
  MixtureInstance inst;
  inst.blueprint_id = blueprint_hash(bp);
  inst.dim = dim;
  inst.eps = eps;
  inst.seed = seed;
  inst.samples = n;

  // vertex (b, C) has id C * nb + b; weights are mu(b)/|C| so they sum to 1
  for (int c = 0; c < nc; ++c)
    for (int b = 0; b < nb; ++b) {
      InstanceVertex v{b, c, B[b].value.mid(), bp.mu()[b].value.mid() / nc};
      inst.vertices.push_back(v);
      std::vector<double> vec(dim + 1);
      vec[0] = v.b;
      double s = std::sqrt(1 - v.b * v.b);
      for (int i = 0; i < dim; ++i) vec[i + 1] = s * part.cells[c].rep[i];
      inst.vectors.push_back(vec);
    }
  const int aux0 = nc * nb, aux1 = aux0 + 1;
  inst.vertices.push_back({-1, -1, 1.0, 1.0 / nc});
  inst.vertices.push_back({-1, -1, -1.0, 1.0 / nc});
  std::vector<double> up(dim + 1, 0.0), down(dim + 1, 0.0);
  up[0] = 1;
  down[0] = -1;
  inst.vectors.push_back(up);
  inst.vectors.push_back(down);

  const auto& cs = bp.configs();
  std::vector<double> cum;
  double acc = 0;
  for (const auto& c : cs) cum.push_back(acc += c.weight.value.mid());
  std::vector<double> rho;
  for (std::size_t k = 0; k < cs.size(); ++k) rho.push_back(relative_bias(bp.configuration(static_cast<int>(k))).mid());

  // outcome per draw: edge key, or -1 (not eps-good), -2 (triangle)
  std::vector<std::int64_t> outcome(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<double> x(dim), y(dim);
    std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      std::mt19937_64 g(substream_seed(seed, i));
      double u = std::uniform_real_distribution<double>(0, acc)(g);
      std::size_t k = std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(), cs.size() - 1);
      correlated(g, rho[k], x, y);
      if (!eps_good(x, y, rho[k], eps)) {
        outcome[i] = -1;
        continue;
      }
      int cx = part.locate(x), cy = part.locate(y);
      int u_id = cx * nb + cs[k].i, v_id = cy * nb + cs[k].j;
      double bij = dot(inst.vectors[u_id], inst.vectors[v_id]);
      if (!strict_triangle_numeric(inst.vertices[u_id].b, inst.vertices[v_id].b, bij, kTriangleMargin)) {
        outcome[i] = -2;
        continue;
      }
      if (u_id > v_id) std::swap(u_id, v_id);
      outcome[i] = static_cast<std::int64_t>(u_id) * (aux1 + 1) + v_id;
    }
  });
  std::map<std::int64_t, std::size_t> counts;
  std::size_t aux = 0;
  for (auto o : outcome) {
    if (o == -1) ++inst.eps_bad, ++aux;
    else if (o == -2) ++inst.triangle_bad, ++aux;
    else ++counts[o];
  }
  for (auto [key, cnt] : counts)
    inst.edges.push_back({static_cast<int>(key / (aux1 + 1)), static_cast<int>(key % (aux1 + 1)),
                          static_cast<double>(cnt) / n});
  if (aux) inst.edges.push_back({aux0, aux1, static_cast<double>(aux) / n});
  return inst;
}

namespace {
std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

std::string write_instance(const MixtureInstance& inst) {
  std::ostringstream out;
  out << "mbcert-instance 1\n";
  out << "blueprint_id " << inst.blueprint_id << "\n";
  out << "dim " << inst.dim << "\n";
  out << "eps " << fmt(inst.eps) << "\n";
  out << "seed " << inst.seed << "\n";
  out << "samples " << inst.samples << "\n";
  out << "eps_bad " << inst.eps_bad << "\n";
  out << "triangle_bad " << inst.triangle_bad << "\n";
  out << "vertices " << inst.vertices.size() << "\n";
  for (std::size_t i = 0; i < inst.vertices.size(); ++i) {
    const auto& v = inst.vertices[i];
    out << i << " " << v.bias << " " << v.cell << " " << fmt(v.b) << " " << fmt(v.weight);
    for (double c : inst.vectors[i]) out << " " << fmt(c);
    out << "\n";
  }
  out << "edges " << inst.edges.size() << "\n";
  for (const auto& e : inst.edges) out << e.u << " " << e.v << " " << fmt(e.weight) << "\n";
  out << "end\n";
  return out.str();
}

MixtureInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  MixtureInstance inst;
  std::string key;
  auto expect = [&](const char* k) {
    if (!(in >> key) || key != k) throw FormatError(std::string("instance: expected ") + k);
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mbcert-instance" || version != 1)
    throw FormatError("instance: bad header");
  expect("blueprint_id");
  in >> inst.blueprint_id;
  expect("dim");
  in >> inst.dim;
  expect("eps");
  in >> inst.eps;
  expect("seed");
  in >> inst.seed;
  expect("samples");
  in >> inst.samples;
  expect("eps_bad");
  in >> inst.eps_bad;
  expect("triangle_bad");
  in >> inst.triangle_bad;
  expect("vertices");
  std::size_t nv = 0;
  in >> nv;
  if (!in || inst.dim < 1) throw FormatError("instance: malformed header");
  for (std::size_t i = 0; i < nv; ++i) {
    std::size_t id;
    InstanceVertex v;
    in >> id >> v.bias >> v.cell >> v.b >> v.weight;
    std::vector<double> vec(inst.dim + 1);
    for (auto& c : vec) in >> c;
    if (!in || id != i) throw FormatError("instance: malformed vertex line");
    inst.vertices.push_back(v);
    inst.vectors.push_back(vec);
  }
  expect("edges");
  std::size_t ne = 0;
  in >> ne;
  for (std::size_t i = 0; i < ne; ++i) {
    InstanceEdge e;
    in >> e.u >> e.v >> e.weight;
    if (!in || e.u < 0 || e.v < 0 || e.u >= static_cast<int>(nv) || e.v >= static_cast<int>(nv))
      throw FormatError("instance: malformed edge line");
    inst.edges.push_back(e);
  }
  expect("end");
  return inst;
}

double uncorrelatedness(const MixtureInstance& inst) {
  // perpendicular parts, non-auxiliary vertices only
  std::vector<std::vector<double>> perp;
  std::vector<double> w;
  for (std::size_t i = 0; i < inst.vertices.size(); ++i) {
    if (inst.vertices[i].bias < 0) continue;
    std::vector<double> p(inst.vectors[i].begin() + 1, inst.vectors[i].end());
    double r = std::sqrt(dot(p, p));
    if (r > 0)
      for (auto& c : p) c /= r;
    perp.push_back(p);
    w.push_back(inst.vertices[i].weight);
  }
  double num = 0, tot = 0;
  for (std::size_t i = 0; i < perp.size(); ++i) {
    tot += w[i];
    for (std::size_t j = 0; j < perp.size(); ++j) num += w[i] * w[j] * std::fabs(dot(perp[i], perp[j]));
  }
  return tot > 0 ? num / (tot * tot) : 0;
}

InstanceAudit audit(const MixtureInstance& inst) {
  InstanceAudit a;
  a.edges = inst.edges.size();
  a.min_slack = kInf;
  for (const auto& e : inst.edges) {
    const auto& u = inst.vertices[e.u];
    const auto& v = inst.vertices[e.v];
    double vv = dot(inst.vectors[e.u], inst.vectors[e.v]);
    a.edge_weight_sum += e.weight;
    a.sdp_value += e.weight * (1 - vv) / 2;
    if (u.bias < 0 || v.bias < 0) continue;
    double bi = inst.vectors[e.u][0], bj = inst.vectors[e.v][0];
    double s = std::min({vv + 1 - bi - bj, vv + 1 + bi + bj, 1 - bi + bj - vv, 1 + bi - bj - vv});
    a.min_slack = std::min(a.min_slack, s);
    if (!(s > 0)) ++a.triangle_failures;
  }
  a.aux_mass = inst.aux_mass();
  for (std::size_t i = 0; i < inst.vertices.size(); ++i) {
    const auto& vec = inst.vectors[i];
    a.balance += inst.vertices[i].weight * vec[0];
    a.max_norm_error = std::max(a.max_norm_error, std::fabs(std::sqrt(dot(vec, vec)) - 1));
    // v_perp = v - (v . v0) v0 has no v0 component by construction; check it numerically
    std::vector<double> p = vec;
    p[0] -= vec[0];
    a.max_ortho_error = std::max(a.max_ortho_error, std::fabs(p[0]));
  }
  a.uncorrelatedness = uncorrelatedness(inst);
  return a;
}

double best_balanced_cut_small(const MixtureInstance& inst, double slack) {
  const int n = static_cast<int>(inst.vertices.size());
  int real = 0;
  for (const auto& v : inst.vertices)
    if (v.bias >= 0) ++real;
  if (real > 24) throw TooLarge("best_balanced_cut_small: more than 24 non-auxiliary vertices");
  if (n > 30) throw TooLarge("best_balanced_cut_small: too many vertices");
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : inst.edges) {
    if (e.u == e.v) continue;
    adj[e.u].push_back({e.v, e.weight});
    adj[e.v].push_back({e.u, e.weight});
  }
  double total = 0;
  for (const auto& v : inst.vertices) total += v.weight;
  const double limit = slack * total;
  // vertex 0 stays on side 0; Gray code over the rest
  std::vector<char> side(n, 0);
  double cut = 0, wa = total, best = -1;  // wa = weight on side 0
  auto consider = [&] {
    double imbalance = std::fabs(wa - (total - wa));
    if (imbalance <= limit + 1e-12 * total) best = std::max(best, cut);
  };
  consider();
  const std::uint64_t steps = n > 1 ? (std::uint64_t{1} << (n - 1)) : 1;
  for (std::uint64_t g = 1; g < steps; ++g) {
    int k = std::countr_zero(g) + 1;
    double delta = 0;
    for (auto [j, w] : adj[k]) delta += side[j] == side[k] ? w : -w;
    cut += delta;
    wa += side[k] ? inst.vertices[k].weight : -inst.vertices[k].weight;
    side[k] ^= 1;
    consider();
  }
  return best < 0 ? 0 : best;
}

}  // namespace mbc
