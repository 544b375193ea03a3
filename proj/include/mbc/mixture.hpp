#pragma once

// Monte Carlo realization of the Gaussian mixture graph and the eps-net
// discretization into finite weighted instances.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mbc/blueprint.hpp"

namespace mbc {

// Draw i of a sampler is generated from its own engine seeded by
// splitmix64(seed, i), so results do not depend on thread count or order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

struct CorrelatedSampler {
  double rho = 0;
  int dim = 1;
  std::uint64_t seed = 0;
};

// y = rho x + sqrt(1 - rho^2) g, coordinates standard normal
std::pair<std::vector<double>, std::vector<double>> sample_pair(const CorrelatedSampler& s, std::uint64_t draw);

struct Estimate {
  double mean = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
};

// Samples are allocated to configurations in proportion to their weights.
Estimate estimate_mixture_completeness(const Blueprint& bp, int d, std::size_t n, std::uint64_t seed,
                                       int threads = 1);
Estimate estimate_mixture_soundness(const Blueprint& bp, const ThresholdFunction& t, int d, std::size_t n,
                                    std::uint64_t seed, int threads = 1);

// fraction of draws with |x.y/d - rho| >= eps
double inner_product_tail(double rho, int d, double eps, std::size_t trials, std::uint64_t seed);
// fraction of draws that are not eps-good (x, y scaled by 1/sqrt(d))
double eps_bad_fraction(double rho, int d, double eps, std::size_t trials, std::uint64_t seed);

struct SphereCell {
  std::vector<double> rep;  // unit representative
  double diameter = 0;      // upper bound on the geodesic diameter
  double area = 0;
};

struct SpherePartition {
  int dim = 0;
  double eps = 0;
  std::vector<SphereCell> cells;
  // dim 3 zonal layout: collar boundaries (colatitudes) and cells per collar
  std::vector<double> theta;
  std::vector<int> per_collar;
  int locate(const std::vector<double>& x) const;  // cell id of a nonzero vector
};

SpherePartition partition_sphere(int dim, double eps);
// equal-area zonal partition of S^2 into n cells
SpherePartition zonal_partition(int n);

struct InstanceVertex {
  int bias = -1;  // index into the blueprint biases; -1 for auxiliary vertices
  int cell = -1;
  double b = 0;
  double weight = 0;
};

struct InstanceEdge {
  int u = 0, v = 0;
  double weight = 0;
};

struct MixtureInstance {
  std::string blueprint_id;
  int dim = 0;
  double eps = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t eps_bad = 0;       // samples routed to the auxiliary edge as not eps-good
  std::size_t triangle_bad = 0;  // eps-good samples whose cell vectors break a strict triangle inequality
  std::vector<InstanceVertex> vertices;  // the last two are the auxiliary pair
  std::vector<InstanceEdge> edges;
  std::vector<std::vector<double>> vectors;  // dimension dim + 1; coordinate 0 is v0

  double aux_mass() const;
};

MixtureInstance build_instance(const Blueprint& bp, int dim, double eps, std::size_t n, std::uint64_t seed,
                               int threads = 1);

std::string write_instance(const MixtureInstance& inst);
MixtureInstance parse_instance(const std::string& text);  // FormatError

struct InstanceAudit {
  std::size_t edges = 0;
  std::size_t triangle_failures = 0;  // non-auxiliary edges without strict triangle inequalities
  double min_slack = 0;
  double balance = 0;        // sum w_V (v0 . v_i)
  double edge_weight_sum = 0;
  double sdp_value = 0;      // sum w_E (1 - v_i . v_j)/2
  double aux_mass = 0;
  double max_norm_error = 0;
  double max_ortho_error = 0;  // |v_perp . v0| after normalizing the perpendicular part
  double uncorrelatedness = 0;
};

InstanceAudit audit(const MixtureInstance& inst);
double uncorrelatedness(const MixtureInstance& inst);

// Maximum cut weight over vertex subsets whose weighted imbalance is at most
// slack * total weight.  Exhaustive; TooLarge beyond 24 non-auxiliary vertices.
double best_balanced_cut_small(const MixtureInstance& inst, double slack);

}  // namespace mbc
