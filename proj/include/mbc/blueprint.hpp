#pragma once

// Configurations, blueprints and threshold functions, with the completeness
// and soundness functionals and the two perturbations.

#include <array>
#include <string>
#include <vector>

#include "mbc/expr.hpp"
#include "mbc/interval.hpp"
#include "mbc/rigor.hpp"

namespace mbc {

struct Configuration {
  Interval bi, bj, bij;
};

// The four triangle slacks, in this order:
//   b_ij + 1 - b_i - b_j,  b_ij + 1 + b_i + b_j,  1 - b_i + b_j - b_ij,  1 + b_i - b_j - b_ij
std::array<Interval, 4> triangle_slacks(const Configuration& theta);

enum class Slack { strict, tight, violated, undecided };
const char* to_string(Slack s);

// interval-only status (never reports tight)
std::array<Slack, 4> triangle_status(const Configuration& theta);
bool satisfies_triangle(const std::array<Slack, 4>& s);
bool strict_triangle(const std::array<Slack, 4>& s);

Interval relative_bias(const Configuration& theta);

// q_i + q_j - 2 Gamma_rho(q_i, q_j), q = (1 - t)/2, clipped to [0,1]
Interval pair_value(const Configuration& theta, const Interval& ti, const Interval& tj,
                    const RigorConfig& cfg = default_config());
Interval pair_value_rho(const Interval& rho, const Interval& ti, const Interval& tj,
                        const RigorConfig& cfg = default_config());

// A value carrying both its enclosure and the literal it was read from.
struct Number {
  Interval value;
  std::string text;
  static Number parse(const std::string& text);
  static Number from_double(double x);
};

struct Bias {
  std::string name;
  LinearExpr expr;
  Interval value;
};

struct ConfigEntry {
  int i = 0, j = 0;  // indices into biases
  LinearExpr bij_expr;
  Interval bij;
  Number weight;
};

struct BlueprintTolerances {
  double sum = 1e-9;      // config weights and mu must sum to 1
  double balance = 1e-9;  // |sum mu(b) b|
};

class Blueprint {
 public:
  // validates; InfeasibleBlueprint on violation
  Blueprint(std::string name, std::vector<Bias> biases, std::vector<Number> mu, std::vector<ConfigEntry> configs,
            const BlueprintTolerances& tol = {});

  const std::string& name() const { return name_; }
  const std::vector<Bias>& biases() const { return biases_; }
  const std::vector<Number>& mu() const { return mu_; }
  const std::vector<ConfigEntry>& configs() const { return configs_; }
  // configuration indices sorted by (b_i, b_j, b_ij)
  const std::vector<int>& canonical_order() const { return order_; }

  int bias_index(const std::string& name) const;  // -1 if absent
  Configuration configuration(int k) const;
  // exact when the expressions decide the sign
  std::array<Slack, 4> triangle_status(int k, const Constants& c = constants()) const;
  Interval mu_sum() const;
  Interval mu_balance() const;

 private:
  std::string name_;
  std::vector<Bias> biases_;
  std::vector<Number> mu_;
  std::vector<ConfigEntry> configs_;
  std::vector<int> order_;
};

struct ThresholdFunction {
  std::vector<Interval> t;  // indexed like Blueprint::biases
  static ThresholdFunction constant(const Blueprint& bp, double v);
};

Interval completeness(const Blueprint& bp);
Interval soundness_at(const Blueprint& bp, const ThresholdFunction& t, const RigorConfig& cfg = default_config());
Interval balance_residual(const Blueprint& bp, const ThresholdFunction& t);
bool almost_balanced(const Blueprint& bp, const ThresholdFunction& t, double eps);

// non-rigorous counterpart in doubles
double soundness_point(const Blueprint& bp, const std::vector<double>& t);

Blueprint perturb_mu(const Blueprint& bp, double eps);
Blueprint perturb_pairwise(const Blueprint& bp, double delta);

Blueprint builtin_dstar();
const std::string& dstar_text();

// text format
Blueprint parse_blueprint(const std::string& text);
std::string write_blueprint(const Blueprint& bp);
Blueprint load_blueprint(const std::string& path_or_builtin);
std::string blueprint_hash(const Blueprint& bp);

}  // namespace mbc
