#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "pvd/rng.hpp"

namespace pvd {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Largest register the dense simulator will allocate. Experiment configs can
// lower this; nothing may raise it.
inline constexpr int kDenseCap = 12;

// Full statevector on a small register. Qubit 0 is the most significant bit
// of the amplitude index, matching BitString order: basis state |b_0...b_{q-1}>
// sits at index sum b_i * 2^(q-1-i).
//
// This is the reference ("oracle") representation: every sparse-path routine
// in qstate.hpp has a test that replays it here amplitude by amplitude.
class DenseState {
 public:
  static DenseState zero(int qubits);
  static DenseState basis(int qubits, std::uint64_t index);
  static DenseState from_amplitudes(Vec amps);  // norm checked to 1e-9

  int qubits() const { return qubits_; }
  const Vec& amplitudes() const { return a_; }
  double norm() const { return a_.norm(); }
  Cx inner(const DenseState& other) const;
  Mat density() const;  // |psi><psi|

  void apply_h(int q);
  void apply_x(int q);
  void apply_y(int q);
  void apply_z(int q);
  void apply_s(int q);
  void apply_t(int q);
  void apply_ry(int q, double theta);
  void apply_rz(int q, double theta);
  void apply_cx(int control, int target);
  void apply_cz(int a, int b);

  // Computational-basis measurement of the contiguous qubit range
  // [first, first + count). Outcomes are big-endian over the range.
  std::vector<double> range_probs(int first, int count) const;
  double prob_of(int first, int count, std::uint64_t outcome) const;
  std::uint64_t sample_range(int first, int count, SplitRng& rng) const;
  void collapse_range(int first, int count, std::uint64_t outcome);
  std::uint64_t measure_range(int first, int count, SplitRng& rng);

  // Hadamard-basis measurement of one qubit; outcome 0 is |+>, 1 is |->.
  // The register keeps the qubit, collapsed to the measured eigenstate.
  int measure_hadamard(int q, SplitRng& rng);

  // Drops a collapsed range, returning the state on the remaining qubits.
  // The range must already be collapsed to `outcome`.
  DenseState factor_out(int first, int count, std::uint64_t outcome) const;

 private:
  DenseState(int qubits, Vec a) : qubits_(qubits), a_(std::move(a)) {}
  void apply_1q(int q, Cx u00, Cx u01, Cx u10, Cx u11);
  void check_qubit(int q) const;
  void check_range(int first, int count) const;

  int qubits_ = 0;
  Vec a_;
};

// --- density-operator utilities -------------------------------------------

// Validates that rho is a density operator: square, Hermitian, unit trace,
// positive semidefinite (all to 1e-9). Throws std::invalid_argument.
void check_density(const Mat& rho);

// Validates an orthogonal projector: Hermitian with P*P = P to 1e-9.
void check_projector(const Mat& p);

// (1/2) * trace norm of a Hermitian matrix.
double half_trace_norm(const Mat& h);

// TD(rho, sigma) = (1/2) ||rho - sigma||_1. Both inputs are validated.
double trace_distance(const Mat& rho, const Mat& sigma);

// Reduced state on the qubits listed in `keep` (ascending, big-endian
// convention as above). `qubits` is the register size of rho.
Mat partial_trace(const Mat& rho, int qubits, const std::vector<int>& keep);

// --- imported inequalities as numeric checks --------------------------------

struct GentleCheck {
  double delta;      // 1 - tr(P rho): probability the test rejects
  double td;         // TD(rho, P rho P / tr(P rho))
  double bound;      // 2 sqrt(delta) + slack
  bool satisfied;    // td <= bound
};

// Measuring a near-certain projector disturbs the state only a little:
// TD(rho, rho') <= 2 sqrt(delta), checked with 1e-9 slack. Throws if the
// projector annihilates rho.
GentleCheck check_gentle_measurement(const Mat& rho, const Mat& projector);

struct MappingCheck {
  double lhs;        // ||P1 D P0 psi||^2 + ||P0 D P1 psi||^2
  double rhs;        // (1/2) (||D psi||^2 - ||D P0 psi||^2 - ||D P1 psi||^2)^2
  bool satisfied;    // lhs + slack >= rhs
};

// An operator that treats a state differently from its two projections must
// move weight across the projection cut. P0 + P1 = I is validated; psi must
// be a unit vector.
MappingCheck check_distinguish_implies_map(const Mat& d, const Mat& p0,
                                           const Mat& p1, const Vec& psi);

// --- random instances for the check suites ----------------------------------

Mat random_density(int dim, SplitRng& rng);
Mat random_projector(int dim, int rank, SplitRng& rng);
Mat random_contraction(int dim, SplitRng& rng);  // largest singular value <= 1
Vec random_pure(int dim, SplitRng& rng);
double gaussian(SplitRng& rng);

}  // namespace pvd
