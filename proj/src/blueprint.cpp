#include "mbc/blueprint.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>

#include "mbc/point.hpp"

namespace mbc {

std::array<Interval, 4> triangle_slacks(const Configuration& t) {
  Interval one(1.0);
  return {t.bij + one - t.bi - t.bj, t.bij + one + t.bi + t.bj, one - t.bi + t.bj - t.bij,
          one + t.bi - t.bj - t.bij};
}

const char* to_string(Slack s) {
  switch (s) {
    case Slack::strict: return "strict";
    case Slack::tight: return "tight";
    case Slack::violated: return "violated";
    case Slack::undecided: return "undecided";
  }
  return "?";
}

namespace {
Slack classify(const Interval& s) {
  if (s.lo() > 0) return Slack::strict;
  if (s.hi() < 0) return Slack::violated;
  return Slack::undecided;
}
}  // namespace

std::array<Slack, 4> triangle_status(const Configuration& theta) {
  auto s = triangle_slacks(theta);
  return {classify(s[0]), classify(s[1]), classify(s[2]), classify(s[3])};
}

bool satisfies_triangle(const std::array<Slack, 4>& s) {
  return std::all_of(s.begin(), s.end(), [](Slack x) { return x == Slack::strict || x == Slack::tight; });
}

bool strict_triangle(const std::array<Slack, 4>& s) {
  return std::all_of(s.begin(), s.end(), [](Slack x) { return x == Slack::strict; });
}

Interval relative_bias(const Configuration& t) {
  Interval one(1.0);
  Interval den = (one - sqr(t.bi)) * (one - sqr(t.bj));
  if (den.hi() <= 0) return Interval(0.0);
  Interval num = t.bij - t.bi * t.bj;
  Interval rho = num / sqrt(den);
  return clamp_to(rho, Interval(-1.0, 1.0));
}

Interval pair_value_rho(const Interval& rho, const Interval& ti, const Interval& tj, const RigorConfig& cfg) {
  Interval one(1.0), half(0.5);
  Interval qi = clamp_to((one - ti) * half, Interval::unit());
  Interval qj = clamp_to((one - tj) * half, Interval::unit());
  Interval g = gamma(rho, qi, qj, cfg);
  return clamp_to(qi + qj - Interval(2.0) * g, Interval::unit());
}

Interval pair_value(const Configuration& theta, const Interval& ti, const Interval& tj, const RigorConfig& cfg) {
  return pair_value_rho(relative_bias(theta), ti, tj, cfg);
}

Number Number::parse(const std::string& text) {
  Number n;
  n.text = text;
  n.value = to_interval(rational_from_decimal(text));
  return n;
}

Number Number::from_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return Number::parse(buf);
}

Blueprint::Blueprint(std::string name, std::vector<Bias> biases, std::vector<Number> mu,
                     std::vector<ConfigEntry> configs, const BlueprintTolerances& tol)
    : name_(std::move(name)), biases_(std::move(biases)), mu_(std::move(mu)), configs_(std::move(configs)) {
  const int nb = static_cast<int>(biases_.size());
  if (nb == 0) throw InfeasibleBlueprint("blueprint has no biases");
  if (static_cast<int>(mu_.size()) != nb) throw InfeasibleBlueprint("mu must list every bias");
  for (int a = 0; a < nb; ++a) {
    for (int b = a + 1; b < nb; ++b)
      if (biases_[a].name == biases_[b].name) throw InfeasibleBlueprint("duplicate bias " + biases_[a].name);
    if (biases_[a].value.lo() < -1 || biases_[a].value.hi() > 1)
      throw InfeasibleBlueprint("bias " + biases_[a].name + " outside [-1,1]");
    if (mu_[a].value.hi() < 0) throw InfeasibleBlueprint("negative mu for " + biases_[a].name);
  }
  if (configs_.empty()) throw InfeasibleBlueprint("blueprint has no configurations");
  Interval wsum(0.0);
  for (std::size_t k = 0; k < configs_.size(); ++k) {
    const auto& c = configs_[k];
    if (c.i < 0 || c.i >= nb || c.j < 0 || c.j >= nb) throw InfeasibleBlueprint("configuration bias out of range");
    if (c.weight.value.hi() < 0) throw InfeasibleBlueprint("negative configuration weight");
    if (c.bij.lo() < -1 || c.bij.hi() > 1) throw InfeasibleBlueprint("pairwise bias outside [-1,1]");
    for (Slack s : triangle_status(static_cast<int>(k)))
      if (s == Slack::violated) throw InfeasibleBlueprint("triangle inequality violated in configuration " +
                                                           biases_[c.i].name + "," + biases_[c.j].name);
    wsum += c.weight.value;
  }
  auto near = [](const Interval& x, double v, double tol) {
    return x.lo() - tol <= v && v <= x.hi() + tol;
  };
  if (!near(wsum, 1.0, tol.sum)) throw InfeasibleBlueprint("configuration weights do not sum to 1");
  if (!near(mu_sum(), 1.0, tol.sum)) throw InfeasibleBlueprint("mu does not sum to 1");
  if (!near(mu_balance(), 0.0, tol.balance)) throw InfeasibleBlueprint("mu is not balanced");

  order_.resize(configs_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
    const auto& A = configs_[a];
    const auto& B = configs_[b];
    auto key = [&](const ConfigEntry& e) {
      return std::array<double, 4>{biases_[e.i].value.mid(), biases_[e.j].value.mid(), e.bij.mid(),
                                   e.weight.value.mid()};
    };
    return key(A) < key(B);
  });
}

int Blueprint::bias_index(const std::string& name) const {
  for (std::size_t k = 0; k < biases_.size(); ++k)
    if (biases_[k].name == name) return static_cast<int>(k);
  return -1;
}

Configuration Blueprint::configuration(int k) const {
  const auto& c = configs_.at(k);
  return {biases_[c.i].value, biases_[c.j].value, c.bij};
}

std::array<Slack, 4> Blueprint::triangle_status(int k, const Constants& cst) const {
  const auto& c = configs_.at(k);
  const LinearExpr& bi = biases_[c.i].expr;
  const LinearExpr& bj = biases_[c.j].expr;
  const LinearExpr one = LinearExpr::constant(1);
  std::array<LinearExpr, 4> e = {c.bij_expr + one - bi - bj, c.bij_expr + one + bi + bj, one - bi + bj - c.bij_expr,
                                 one + bi - bj - c.bij_expr};
  std::array<Slack, 4> out;
  for (int m = 0; m < 4; ++m) out[m] = e[m].is_zero() ? Slack::tight : classify(e[m].eval(cst));
  return out;
}

Interval Blueprint::mu_sum() const {
  Interval s(0.0);
  for (const auto& m : mu_) s += m.value;
  return s;
}

Interval Blueprint::mu_balance() const {
  Interval s(0.0);
  for (std::size_t k = 0; k < mu_.size(); ++k) s += mu_[k].value * biases_[k].value;
  return s;
}

ThresholdFunction ThresholdFunction::constant(const Blueprint& bp, double v) {
  return ThresholdFunction{std::vector<Interval>(bp.biases().size(), Interval(v))};
}

Interval completeness(const Blueprint& bp) {
  Interval s(0.0), one(1.0), half(0.5);
  for (int k : bp.canonical_order()) {
    const auto& c = bp.configs()[k];
    s += c.weight.value * (one - c.bij) * half;
  }
  return s;
}

Interval soundness_at(const Blueprint& bp, const ThresholdFunction& t, const RigorConfig& cfg) {
  if (t.t.size() != bp.biases().size()) throw DegenerateInput("threshold function does not cover B");
  Interval s(0.0);
  for (int k : bp.canonical_order()) {
    const auto& c = bp.configs()[k];
    s += c.weight.value * pair_value(bp.configuration(k), t.t[c.i], t.t[c.j], cfg);
  }
  return s;
}

Interval balance_residual(const Blueprint& bp, const ThresholdFunction& t) {
  if (t.t.size() != bp.biases().size()) throw DegenerateInput("threshold function does not cover B");
  Interval s(0.0);
  for (std::size_t k = 0; k < t.t.size(); ++k) s += bp.mu()[k].value * t.t[k];
  return s;
}

bool almost_balanced(const Blueprint& bp, const ThresholdFunction& t, double eps) {
  return balance_residual(bp, t).mag() <= eps;
}

double soundness_point(const Blueprint& bp, const std::vector<double>& t) {
  double s = 0;
  for (int k : bp.canonical_order()) {
    const auto& c = bp.configs()[k];
    double rho = relative_bias(bp.configuration(k)).mid();
    s += c.weight.value.mid() * point::pair_value(rho, t[c.i], t[c.j]);
  }
  return s;
}

Blueprint perturb_mu(const Blueprint& bp, double eps) {
  if (eps == 0) return bp;
  if (!(eps > 0)) throw InfeasiblePerturbation("perturb_mu: eps must be positive");
  const auto& B = bp.biases();
  const int n = static_cast<int>(B.size());
  int most_neg = -1, most_pos = -1;
  for (int k = 0; k < n; ++k) {
    if (B[k].value.hi() < 0 && (most_neg < 0 || B[k].value.mid() < B[most_neg].value.mid())) most_neg = k;
    if (B[k].value.lo() > 0 && (most_pos < 0 || B[k].value.mid() > B[most_pos].value.mid())) most_pos = k;
  }
  if (most_neg < 0 || most_pos < 0) throw InfeasiblePerturbation("perturb_mu: B needs positive and negative biases");
  // m(b) = (1/|B|) sum_{b'} mu_{b'}(b), with mu_{b'} a zero-mean two-point law
  std::vector<Interval> m(n, Interval(0.0));
  for (int k = 0; k < n; ++k) {
    const Interval& b = B[k].value;
    if (B[k].expr.is_zero()) {
      m[k] += Interval(1.0);
      continue;
    }
    int other;
    if (b.lo() > 0) other = most_neg;
    else if (b.hi() < 0) other = most_pos;
    else throw InfeasiblePerturbation("perturb_mu: sign of bias " + B[k].name + " undecided");
    const Interval& o = B[other].value;
    Interval span = abs(b) + abs(o);
    m[k] += abs(o) / span;
    m[other] += abs(b) / span;
  }
  Interval nB(static_cast<double>(n));
  double mmin = kInf;
  for (auto& x : m) {
    x = x / nB;
    mmin = std::min(mmin, x.lo());
  }
  double e = rnd::div_up(eps, mmin);
  if (!(e < 1)) throw InfeasiblePerturbation("perturb_mu: eps exceeds the feasible budget");
  Interval E(e), one(1.0);
  std::vector<Number> mu;
  for (int k = 0; k < n; ++k) {
    Interval v = (one - E) * bp.mu()[k].value + E * m[k];
    Number num = Number::from_double(v.mid());
    num.value = v;
    mu.push_back(num);
  }
  return Blueprint(bp.name() + "+mu", B, mu, bp.configs(), BlueprintTolerances{});
}

Blueprint perturb_pairwise(const Blueprint& bp, double delta) {
  if (delta == 0) return bp;
  if (!(delta > 0)) throw InfeasiblePerturbation("perturb_pairwise: delta must be positive");
  const Constants& k = constants();
  std::vector<ConfigEntry> cs = bp.configs();
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, delta);
  LinearExpr d = LinearExpr::constant(rational_from_decimal(std::string(buf, res.ptr)));
  for (auto& c : cs) {
    c.bij_expr = c.bij_expr + d;
    c.bij = c.bij_expr.eval(k);
  }
  try {
    Blueprint out(bp.name() + "+pairwise", bp.biases(), bp.mu(), cs, BlueprintTolerances{});
    for (int i = 0; i < static_cast<int>(cs.size()); ++i)
      if (!strict_triangle(out.triangle_status(i)))
        throw InfeasiblePerturbation("perturb_pairwise: triangle inequalities not strict after perturbation");
    return out;
  } catch (const InfeasibleBlueprint& e) {
    throw InfeasiblePerturbation(std::string("perturb_pairwise: ") + e.what());
  }
}

}  // namespace mbc
