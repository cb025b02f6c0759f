#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "pvd/bitstring.hpp"
#include "pvd/dense.hpp"
#include "pvd/rng.hpp"

namespace pvd {

enum class Basis { computational, hadamard };

// (|x0> + (-1)^phase |x1>) / sqrt(2) over two distinct n-bit strings.
//
// Canonical form: x0 < x1 lexicographically. Swapping the branch order only
// changes a global phase, so the constructor reorders without touching the
// relative phase. Instances are immutable values; measurement routines take
// the state by const reference and return outcomes.
class TwoBranchState {
 public:
  TwoBranchState(BitString a, BitString b, int phase);

  const BitString& x0() const { return x0_; }
  const BitString& x1() const { return x1_; }
  int phase() const { return phase_; }
  std::size_t n() const { return x0_.size(); }
  BitString delta() const { return x0_ ^ x1_; }

  friend bool operator==(const TwoBranchState&, const TwoBranchState&) = default;

 private:
  BitString x0_, x1_;
  int phase_;
};

// Uniform sample from the affine class { w : delta . w = parity }. Consumes
// exactly n bits of the stream. delta must be nonzero.
BitString sample_parity_class(const BitString& delta, int parity, SplitRng& rng);

// Hadamard-basis measurement of all n qubits. The outcome w is uniform over
// the 2^(n-1) strings with (x0 ^ x1) . w = phase, never anything else.
BitString hadamard_measure(const TwoBranchState& s, SplitRng& rng);

// Computational-basis measurement: x0 or x1, each with probability 1/2.
BitString computational_measure(const TwoBranchState& s, SplitRng& rng);

// b = z . w, the decoding identity used after a Hadamard measurement.
int decrypt_bit(const BitString& z, const BitString& w);

// Exhaustive outcome lists with exact dyadic probabilities. The Hadamard list
// has 2^(n-1) entries and is guarded by a branch cap of n <= 20.
std::vector<std::pair<double, BitString>> computational_branches(
    const TwoBranchState& s);
std::vector<std::pair<double, BitString>> hadamard_branches(
    const TwoBranchState& s);

// Dense replay on n qubits for oracle comparisons; requires n <= kDenseCap.
DenseState to_dense(const TwoBranchState& s);

// Joint state of a challenger-held control qubit C and the n-qubit register A
// handed to the adversary, supporting the purification
//
//   (|+>_C |x0>_A + |->_C |x1>_A) / sqrt(2)
//     = (1/2) sum_c |c>_C (|x0> + (-1)^c |x1>)_A.
//
// Amplitudes are kept unnormalized: a measurement reports conditional
// probabilities as ratios of squared masses and leaves the post-state at
// whatever scale falls out. In the experiment flows every mass that gets
// divided by is a power of two, so double arithmetic on these states is exact
// and exact-mode distribution equalities hold literally, not to tolerance.
//
// At most one A measurement is supported (in either basis); further C
// measurements in either basis remain available afterwards. That covers every
// adversary and challenger action in the hybrid experiments.
class PurifiedJointState {
 public:
  struct ABranch;  // defined after the class: it carries a post state

  const BitString& x0() const { return x0_; }
  const BitString& x1() const { return x1_; }
  std::size_t n() const { return x0_.size(); }

  bool entangled() const { return !product_; }
  bool a_measured() const { return a_measured_; }
  Basis a_basis() const;                // throws unless a_measured()
  const BitString& a_outcome() const;   // throws unless a_measured()

  std::array<double, 2> c_probs(Basis basis) const;
  PurifiedJointState c_collapse(Basis basis, int outcome) const;
  std::pair<int, PurifiedJointState> c_measure(Basis basis, SplitRng& rng) const;

  std::vector<ABranch> a_branches(Basis basis) const;
  std::pair<BitString, PurifiedJointState> a_measure(Basis basis,
                                                     SplitRng& rng) const;

  // The A register as a plain two-branch state. Valid only after a C
  // measurement and before any A measurement, and only when the span
  // amplitudes still have equal magnitude and a real +-1 ratio.
  TwoBranchState a_as_two_branch() const;

  Mat reduced_c_density() const;  // normalized 2x2

  // Squared norm of the stored (unnormalized) amplitudes; > 0 always.
  double mass() const;

  // Normalized dense replay on 1 + n qubits (C first); n + 1 <= kDenseCap.
  DenseState to_dense_joint() const;

  friend PurifiedJointState purify(const BitString& x0, const BitString& x1);

 private:
  PurifiedJointState() = default;
  double mass_of_a_part() const;

  BitString x0_, x1_;
  bool product_ = false;     // false: amp_ holds C x A jointly
  bool a_measured_ = false;  // product only: record_ replaces span_
  Basis a_basis_ = Basis::computational;
  std::array<std::array<Cx, 2>, 2> amp_{};  // amp_[c][j] on |c>_C |x_j>_A
  std::array<Cx, 2> c_amp_{};               // product: C amplitudes
  std::array<Cx, 2> span_{};                // product: A over {|x0>, |x1>}
  BitString record_;                        // product, measured: A outcome
};

struct PurifiedJointState::ABranch {
  double prob;        // conditional on the current state
  BitString outcome;  // x_j (computational) or w (hadamard)
  PurifiedJointState post;
};

// Fresh purified state; reduced C density is maximally mixed, reduced A
// density is (|x0><x0| + |x1><x1|) / 2. Requires x0 != x1 of equal length.
PurifiedJointState purify(const BitString& x0, const BitString& x1);

}  // namespace pvd
