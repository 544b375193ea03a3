#pragma once

// Branch-and-bound certification of max over balanced t of Soundness(D*, t),
// reduced to the two free variables (t1, t2).

#include <functional>
#include <string>
#include <vector>

#include "mbc/blueprint.hpp"

namespace mbc {

// Role assignment for a blueprint with the shape of D*: mu supported on
// {b1 (negative), b4 (positive)}, configurations (b2,b4) (b3,b4) (b2,b3)
// (b2,b5) (b1,b5).  UnsupportedMeasure / InfeasibleBlueprint otherwise.
struct DStarShape {
  std::array<int, 6> bias{};         // bias[r] = index into biases for role r = 1..5
  std::array<int, 6> config{};       // config index for 1:(2,4) 2:(3,4) 3:(2,3) 4:(2,5) 5:(1,5)
  std::array<Interval, 6> w{}, rho{};
  Interval ratio;                    // mu(b1)/mu(b4)

  static DStarShape from(const Blueprint& bp);
};

Interval t4_from_balance(const Blueprint& bp, const Interval& t1);
Interval dpartial_t3(const Blueprint& bp, const Interval& t2, const Interval& t3, const Interval& t4,
                     const RigorConfig& cfg = default_config());
Interval dpartial_t5(const Blueprint& bp, const Interval& t1, const Interval& t2, const Interval& t5,
                     const RigorConfig& cfg = default_config());

// Interval binary search for the root of a function that is
// decreasing in its argument on [-1,1].
Interval root_find(const std::function<Interval(double)>& df, double eps);

struct Region {
  Interval t1, t2;
  int depth = 0;
};

struct RegionBound {
  Interval s_upper;     // encloses sup of s over the region (upper end is what counts)
  Interval s_center;    // rigorous enclosure of a lower witness value at the center
  Interval t3, t4, t5;  // root enclosures used
};

class ReducedProblem {
 public:
  explicit ReducedProblem(const Blueprint& bp, const RigorConfig& cfg = default_config());

  const Blueprint& blueprint() const { return bp_; }
  const DStarShape& shape() const { return sh_; }
  const RigorConfig& config() const { return cfg_; }

  Interval t4(const Interval& t1) const;
  Interval dpartial_t3(const Interval& t2, const Interval& t3, const Interval& t4) const;
  Interval dpartial_t5(const Interval& t1, const Interval& t2, const Interval& t5) const;
  Interval root_t3(const Interval& t1, const Interval& t2, double eps) const;
  Interval root_t5(const Interval& t1, const Interval& t2, double eps) const;

  // soundness with the assembled interval threshold function (t1..t5)
  Interval soundness(const Interval& t1, const Interval& t2, const Interval& t3, const Interval& t4,
                     const Interval& t5) const;
  // naive reduced soundness: roots, then interval soundness on the full box
  Interval reduced_soundness(const Interval& t1, const Interval& t2, double eps) const;
  // tighter region bound: naive enclosure intersected with a mean-value form
  RegionBound region_bound(const Region& r, double eps_floor, double target) const;

  // non-rigorous counterparts
  double point_root_t3(double t1, double t2) const;
  double point_root_t5(double t1, double t2) const;
  double point_s(double t1, double t2) const;  // max over t3, t5 by point root finding

 private:
  Blueprint bp_;
  DStarShape sh_;
  RigorConfig cfg_;
  // thresholds indexed by role
  Interval soundness_roles(const std::array<Interval, 6>& t) const;
  std::array<Interval, 6> gradient(const std::array<Interval, 6>& t) const;
};

enum class CertStatus { verified, refuted_region, inconclusive, in_progress };
const char* to_string(CertStatus s);
CertStatus cert_status_from(const std::string& s);

struct CertRecord {
  Region region;
  Interval s_upper;
  char tag = 'V';  // V verified, U unresolved, R refuted, P pending (checkpoint only)
};

struct CertifySettings {
  double bound = 0.87853;
  int max_depth = 40;
  double eps_floor = 0x1p-30;
  int threads = 1;
  RigorConfig rigor{53, 32, 8.0, 6.0};  // coarser quadrature than the library default
  std::string checkpoint_path;        // empty: no checkpoints
  double checkpoint_seconds = 60;
};

struct Certificate {
  std::string blueprint_id;
  std::string blueprint_text;
  double bound = 0;
  Interval normalizer;  // c_GW
  CertifySettings settings;
  std::vector<CertRecord> records;  // sorted canonically
  CertStatus status = CertStatus::inconclusive;
  double wall_seconds = 0;
  std::size_t evaluated = 0;
  double max_ratio = 0;  // max s_upper.hi / c_GW.lo over verified records
};

Certificate certify(const Blueprint& bp, const CertifySettings& settings);
// continue from a checkpoint (status in_progress)
Certificate resume(const Certificate& checkpoint, const CertifySettings& settings);

std::string write_certificate(const Certificate& c);
Certificate parse_certificate(const std::string& text);  // FormatError

struct ReplayResult {
  bool ok = false;
  std::string message;
  long first_bad = -1;  // record index
};
ReplayResult replay(const Certificate& c, int threads = 1);

}  // namespace mbc
