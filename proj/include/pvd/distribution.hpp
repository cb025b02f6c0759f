#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "pvd/dense.hpp"

namespace pvd {

// Distinguished abort outcome. Transcript keys always carry a "name=" prefix,
// so no valid transcript can collide with it.
inline const std::string kBottom = "bot";

enum class DistMode { exact, empirical };

// Finite distribution over outcome transcripts.
//
// Weights are stored as raw masses plus one divisor (`total`): exact mode
// accumulates per-draw branch masses and divides by the draw count, empirical
// mode accumulates counts and divides by the sample count. Keeping the
// division out of the accumulation means two runs that accumulate identical
// raw masses compare equal bit for bit, which the exact-mode equality
// assertions rely on.
//
// Circuit adversaries may attach a residual block per transcript: a
// subnormalized density matrix with trace equal to the raw mass. Distances
// then use the trace norm on blocks and |.| on plain weights.
class OutcomeDistribution {
 public:
  static OutcomeDistribution exact(std::string alphabet);
  static OutcomeDistribution empirical(std::string alphabet);

  void add(const std::string& key, double mass);
  void add_block(const std::string& key, double mass, const Mat& block);
  void set_total(double total);

  DistMode mode() const { return mode_; }
  const std::string& alphabet() const { return alphabet_; }
  double total() const { return total_; }
  std::uint64_t samples() const;  // empirical only

  const std::map<std::string, double>& raw() const { return w_; }
  const std::map<std::string, Mat>& blocks() const { return blocks_; }

  double prob(const std::string& key) const;  // 0 when absent
  double bottom_prob() const { return prob(kBottom); }
  double valid_raw_mass() const;  // everything except kBottom

  // Weights nonnegative and summing to 1 within 1e-9; block traces matching
  // their weights. Throws std::logic_error on violation.
  void check() const;

 private:
  explicit OutcomeDistribution(DistMode mode, std::string alphabet)
      : mode_(mode), alphabet_(std::move(alphabet)) {}

  DistMode mode_;
  std::string alphabet_;
  std::map<std::string, double> w_;
  std::map<std::string, Mat> blocks_;
  double total_ = 0.0;
};

// (1/2) sum_k |p_k - q_k|, with the trace norm on residual blocks. Requires
// matching alphabets; throws std::invalid_argument otherwise.
double tv_distance(const OutcomeDistribution& p, const OutcomeDistribution& q);

// Raw masses, totals and blocks all compare equal. This is the literal
// equality used by exact-mode assertions, not a tolerance check.
bool exactly_equal(const OutcomeDistribution& p, const OutcomeDistribution& q);

// Deviation bound for a TV estimate at confidence 1 - alpha: a DKW-style
// sqrt(ln(2/alpha) / (2N)) term per empirical input, 0 for exact inputs.
double tv_ci_bound(const OutcomeDistribution& p, const OutcomeDistribution& q,
                   double alpha);

// TV between the distributions renormalized to the non-bot outcomes.
// Returns 0 when either side has no valid mass at all.
double conditional_valid_tv(const OutcomeDistribution& p,
                            const OutcomeDistribution& q);

// mix = weight * bottom + (1 - weight) * base, as raw-mass arithmetic so the
// result is comparable with exactly_equal. Exact mode only.
OutcomeDistribution bottom_mixture(double bottom_weight,
                                   const OutcomeDistribution& base);

struct BinomialCi {
  double lo = 0.0, hi = 1.0;
};

// Wilson score interval at confidence 1 - alpha.
BinomialCi wilson_interval(std::uint64_t successes, std::uint64_t trials,
                           double alpha);

// Upper tail probability of the chi-square distribution: P(X >= stat).
double chi_square_pvalue(double stat, double dof);

}  // namespace pvd
