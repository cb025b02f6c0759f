#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvd/compiler.hpp"
#include "pvd/distribution.hpp"
#include "pvd/trials.hpp"

namespace pvd {

// --- adversary strategies ------------------------------------------------------

struct CircuitGate {
  enum class Op { h, x, y, z, s, t, cx, cz, ry, rz };
  Op op = Op::h;
  int q = 0;
  int q2 = -1;         // cx, cz
  double angle = 0.0;  // ry, rz
};

// Fixed small circuits for configs: "identity" (no gates), "hadamard_all",
// "scramble" (seeded-looking but fixed rotation/entangling pattern).
std::vector<CircuitGate> circuit_preset(const std::string& name, int qubits);

// The closed strategy set of the security experiments. Every strategy
// declares its residual alphabet up front; exact-mode enumeration needs the
// outcome set to be known before any branch is walked.
struct AdversaryStrategy {
  enum class Kind { honest_deleter, classical_inverter, hadamard_retainer, circuit };
  enum class RetainerCert { zero, guess_w };

  Kind kind = Kind::honest_deleter;
  int invert_target = 0;  // inverter: which published image to invert
  RetainerCert retainer_cert = RetainerCert::zero;
  std::vector<CircuitGate> gates;  // circuit
  int workspace_qubits = 0;        // circuit

  static AdversaryStrategy honest();
  static AdversaryStrategy inverter(int target);
  static AdversaryStrategy retainer(RetainerCert cert);
  static AdversaryStrategy circuit(std::vector<CircuitGate> gates, int workspace);

  std::string name() const;
  std::string residual_alphabet() const;
  bool enumerable() const { return kind != Kind::circuit; }
};

// --- experiment configuration -----------------------------------------------------

struct SchemeConfig {
  enum class Variant { owf, owsg };

  Variant variant = Variant::owf;
  OwfPtr owf;    // owf variant
  OwsgPtr owsg;  // owsg variant
  PkePtr pke;    // EvPKE always; hybrids when wrapper == pke
  WrapperKind wrapper = WrapperKind::pke;
  int t = 1;            // owsg verification copies
  bool zero_z = false;  // wrap 0^n instead of x0 ^ x1
  ExecMode exec = ExecMode::parallel;
  int threads = 0;

  std::size_t n() const;  // branch length
  void validate(const AdversaryStrategy& adv) const;
};

// --- experiment runners -------------------------------------------------------------

// EvPKE(b): keys, real encryption of b, adversary, certificate verification;
// outcome is the residual transcript or bot.
OutcomeDistribution run_evpke(int b, const SchemeConfig& sc,
                              const AdversaryStrategy& adv, DistMode mode,
                              std::uint64_t trials, std::uint64_t seed);

// The hybrid chain. index 0 is the real wrapper distribution; 1 adds the
// purified register C, measured computationally at the end, aborting on
// 1 - b; 2 additionally identifies c' from the certificate and measures C in
// the Hadamard basis first, aborting on 1 - c'. Abort checks run in the
// order: image membership, Hadamard abort, computational abort.
OutcomeDistribution run_hyb(int index, int b, const SchemeConfig& sc,
                            const AdversaryStrategy& adv, DistMode mode,
                            std::uint64_t trials, std::uint64_t seed);

// Hyb2 with the C Hadamard measurement commuted before the adversary runs;
// the outcome distribution provably matches run_hyb(2, ...).
OutcomeDistribution run_hyb2_commuted(int b, const SchemeConfig& sc,
                                      const AdversaryStrategy& adv,
                                      DistMode mode, std::uint64_t trials,
                                      std::uint64_t seed);

struct ProbabilityEstimate {
  double value = 0.0;
  bool exact = false;
  std::uint64_t successes = 0, trials = 0;  // sampled estimates only
  BinomialCi ci;                            // collapses to value when exact
};

// Sampled frequency of the Hyb2 Hadamard abort event (outcome 1 - c'),
// with a Wilson interval. Trials that never reach the Hadamard check
// (invalid certificate) do not count as aborts.
ProbabilityEstimate abort_probability(const SchemeConfig& sc,
                                      const AdversaryStrategy& adv,
                                      std::uint64_t trials, std::uint64_t seed,
                                      double alpha);

// --- other-preimage reduction game ----------------------------------------------------

enum class GameAdversary { echo, brute_other, random_guess, xor_z };

struct GameResult {
  std::uint64_t successes = 0, trials = 0;
  double frequency = 0.0;
  BinomialCi ci;
};

// Per trial: draw x0 != x1, a uniform side c, and hand the adversary
// (z or 0^n, y0, y1, x_c); success means F(output) equals the other image.
GameResult other_preimage_game(const OwfPtr& owf, GameAdversary adv,
                               bool give_real_z, std::uint64_t trials,
                               std::uint64_t seed, ExecMode exec, int threads,
                               double alpha);

// --- chain report -----------------------------------------------------------------------

struct InequalityCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool satisfied = false;
};

struct ChainReport {
  double advt_hyb0 = 0.0, advt_hyb1 = 0.0, advt_hyb2 = 0.0;
  double advt_hyb0_valid_only = 0.0;  // conditioned on non-bot outcomes
  ProbabilityEstimate abort;
  std::vector<InequalityCheck> inequalities;
  DistMode mode = DistMode::exact;
  std::uint64_t trials = 0, seed = 0;
  double alpha = 0.0;     // CI confidence parameter
  double tv_slack = 0.0;  // per-distance deviation bound (0 in exact mode)

  bool all_satisfied() const;
};

// Runs all three hybrids for both b, estimates the abort probability, and
// checks: Advt(Hyb0) <= 2 Advt(Hyb1); |Advt(Hyb1) - Advt(Hyb2)| <=
// 2 * 2 sqrt(delta) (one gentle-measurement disturbance per side); and
// Advt(Hyb2) = 0. Exact mode checks with 1e-12 arithmetic headroom,
// empirical mode widens by the CI slack.
ChainReport hybrid_chain_report(const SchemeConfig& sc,
                                const AdversaryStrategy& adv, DistMode mode,
                                std::uint64_t trials, std::uint64_t seed,
                                double alpha);

}  // namespace pvd
