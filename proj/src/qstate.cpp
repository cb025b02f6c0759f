#include "pvd/qstate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pvd {

namespace {

constexpr std::size_t kBranchCapBits = 20;

int first_set_bit(const BitString& b) {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.bit(i)) return static_cast<int>(i);
  return -1;
}

}  // namespace

TwoBranchState::TwoBranchState(BitString a, BitString b, int phase)
    : x0_(std::move(a)), x1_(std::move(b)), phase_(phase) {
  if (x0_.empty() || x0_.size() != x1_.size())
    throw std::invalid_argument("TwoBranchState: branch length mismatch");
  if (x0_ == x1_)
    throw std::invalid_argument("TwoBranchState: branches must be distinct");
  if (phase_ != 0 && phase_ != 1)
    throw std::invalid_argument("TwoBranchState: phase must be 0 or 1");
  // |a> + (-1)^b |c> = (-1)^b (|c> + (-1)^b |a>): reordering keeps the phase.
  if (x1_ < x0_) std::swap(x0_, x1_);
}

BitString sample_parity_class(const BitString& delta, int parity,
                              SplitRng& rng) {
  const int pivot = first_set_bit(delta);
  if (pivot < 0) throw std::invalid_argument("sample_parity_class: delta is zero");
  BitString w = rng.bits(delta.size());
  w.set_bit(pivot, 0);
  w.set_bit(pivot, parity ^ delta.dot(w));
  return w;
}

BitString hadamard_measure(const TwoBranchState& s, SplitRng& rng) {
  return sample_parity_class(s.delta(), s.phase(), rng);
}

BitString computational_measure(const TwoBranchState& s, SplitRng& rng) {
  return rng.bit() ? s.x1() : s.x0();
}

int decrypt_bit(const BitString& z, const BitString& w) { return z.dot(w); }

std::vector<std::pair<double, BitString>> computational_branches(
    const TwoBranchState& s) {
  return {{0.5, s.x0()}, {0.5, s.x1()}};
}

std::vector<std::pair<double, BitString>> hadamard_branches(
    const TwoBranchState& s) {
  const std::size_t n = s.n();
  if (n > kBranchCapBits)
    throw std::invalid_argument("hadamard_branches: register too wide to enumerate");
  const BitString delta = s.delta();
  const double p = std::ldexp(1.0, 1 - static_cast<int>(n));  // 2^(1-n)
  std::vector<std::pair<double, BitString>> out;
  out.reserve(std::size_t{1} << (n - 1));
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    BitString w = BitString::from_index(v, n);
    if (delta.dot(w) == s.phase()) out.emplace_back(p, std::move(w));
  }
  return out;
}

DenseState to_dense(const TwoBranchState& s) {
  const std::size_t n = s.n();
  if (n > kDenseCap) throw std::invalid_argument("to_dense: register too wide");
  Vec a = Vec::Zero(Eigen::Index{1} << n);
  const double r = std::numbers::sqrt2 / 2.0;
  a(static_cast<Eigen::Index>(s.x0().index())) = r;
  a(static_cast<Eigen::Index>(s.x1().index())) = s.phase() ? -r : r;
  return DenseState::from_amplitudes(std::move(a));
}

// --- PurifiedJointState ------------------------------------------------------

PurifiedJointState purify(const BitString& x0, const BitString& x1) {
  if (x0.empty() || x0.size() != x1.size())
    throw std::invalid_argument("purify: branch length mismatch");
  if (x0 == x1) throw std::invalid_argument("purify: branches must be distinct");
  PurifiedJointState s;
  s.x0_ = x0;
  s.x1_ = x1;
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 2; ++j) s.amp_[c][j] = (c == 1 && j == 1) ? -0.5 : 0.5;
  return s;
}

Basis PurifiedJointState::a_basis() const {
  if (!a_measured_) throw std::logic_error("a_basis: A not measured");
  return a_basis_;
}

const BitString& PurifiedJointState::a_outcome() const {
  if (!a_measured_) throw std::logic_error("a_outcome: A not measured");
  return record_;
}

std::array<double, 2> PurifiedJointState::c_probs(Basis basis) const {
  double m0, m1;
  if (!product_) {
    if (basis == Basis::computational) {
      m0 = std::norm(amp_[0][0]) + std::norm(amp_[0][1]);
      m1 = std::norm(amp_[1][0]) + std::norm(amp_[1][1]);
    } else {
      m0 = (std::norm(amp_[0][0] + amp_[1][0]) +
            std::norm(amp_[0][1] + amp_[1][1])) / 2.0;
      m1 = (std::norm(amp_[0][0] - amp_[1][0]) +
            std::norm(amp_[0][1] - amp_[1][1])) / 2.0;
    }
  } else {
    if (basis == Basis::computational) {
      m0 = std::norm(c_amp_[0]);
      m1 = std::norm(c_amp_[1]);
    } else {
      m0 = std::norm(c_amp_[0] + c_amp_[1]) / 2.0;
      m1 = std::norm(c_amp_[0] - c_amp_[1]) / 2.0;
    }
  }
  const double total = m0 + m1;
  return {m0 / total, m1 / total};
}

PurifiedJointState PurifiedJointState::c_collapse(Basis basis,
                                                  int outcome) const {
  if (outcome != 0 && outcome != 1)
    throw std::invalid_argument("c_collapse: outcome must be 0 or 1");
  PurifiedJointState s = *this;
  const double sign = outcome ? -1.0 : 1.0;
  if (!product_) {
    s.product_ = true;
    if (basis == Basis::computational) {
      s.c_amp_ = {outcome == 0 ? 1.0 : 0.0, outcome == 1 ? 1.0 : 0.0};
      s.span_ = {amp_[outcome][0], amp_[outcome][1]};
    } else {
      s.c_amp_ = {1.0, sign};
      s.span_ = {amp_[0][0] + sign * amp_[1][0], amp_[0][1] + sign * amp_[1][1]};
    }
    if (std::norm(s.span_[0]) + std::norm(s.span_[1]) <= 0.0)
      throw std::invalid_argument("c_collapse: zero-probability outcome");
  } else {
    if (basis == Basis::computational) {
      if (std::norm(c_amp_[outcome]) <= 0.0)
        throw std::invalid_argument("c_collapse: zero-probability outcome");
      s.c_amp_ = {outcome == 0 ? 1.0 : 0.0, outcome == 1 ? 1.0 : 0.0};
    } else {
      if (std::norm(c_amp_[0] + sign * c_amp_[1]) <= 0.0)
        throw std::invalid_argument("c_collapse: zero-probability outcome");
      s.c_amp_ = {1.0, sign};
    }
  }
  return s;
}

std::pair<int, PurifiedJointState> PurifiedJointState::c_measure(
    Basis basis, SplitRng& rng) const {
  const auto probs = c_probs(basis);
  const int outcome = rng.uniform() < probs[0] ? 0 : 1;
  return {outcome, c_collapse(basis, outcome)};
}

std::vector<PurifiedJointState::ABranch> PurifiedJointState::a_branches(
    Basis basis) const {
  if (a_measured_) {
    if (basis != a_basis_)
      throw std::logic_error("a_branches: A already measured in the other basis");
    return {{1.0, record_, *this}};
  }
  std::vector<ABranch> out;
  if (basis == Basis::computational) {
    double m[2];
    if (!product_) {
      m[0] = std::norm(amp_[0][0]) + std::norm(amp_[1][0]);
      m[1] = std::norm(amp_[0][1]) + std::norm(amp_[1][1]);
    } else {
      m[0] = std::norm(span_[0]);
      m[1] = std::norm(span_[1]);
    }
    const double total = m[0] + m[1];
    for (int j = 0; j < 2; ++j) {
      if (m[j] <= 0.0) continue;
      PurifiedJointState s = *this;
      s.product_ = true;
      s.a_measured_ = true;
      s.a_basis_ = Basis::computational;
      s.record_ = j ? x1_ : x0_;
      if (!product_) s.c_amp_ = {amp_[0][j], amp_[1][j]};
      s.span_ = {};
      out.push_back({m[j] / total, s.record_, std::move(s)});
    }
    return out;
  }
  // Hadamard: 2^n outcomes, coefficient depends on w only through the signs
  // (-1)^(x_j . w); the common 2^(-n/2) scale cancels out of the ratios.
  const std::size_t n = this->n();
  if (n > kBranchCapBits)
    throw std::invalid_argument("a_branches: register too wide to enumerate");
  const double total = std::ldexp(mass_of_a_part(), static_cast<int>(n));
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    BitString w = BitString::from_index(v, n);
    const double s0 = w.dot(x0_) ? -1.0 : 1.0;
    const double s1 = w.dot(x1_) ? -1.0 : 1.0;
    PurifiedJointState s = *this;
    s.product_ = true;
    s.a_measured_ = true;
    s.a_basis_ = Basis::hadamard;
    s.record_ = w;
    s.span_ = {};
    double m;
    if (!product_) {
      s.c_amp_ = {amp_[0][0] * s0 + amp_[0][1] * s1,
                  amp_[1][0] * s0 + amp_[1][1] * s1};
      m = std::norm(s.c_amp_[0]) + std::norm(s.c_amp_[1]);
    } else {
      m = std::norm(span_[0] * s0 + span_[1] * s1);
    }
    if (m <= 0.0) continue;
    out.push_back({m / total, std::move(w), std::move(s)});
  }
  return out;
}

std::pair<BitString, PurifiedJointState> PurifiedJointState::a_measure(
    Basis basis, SplitRng& rng) const {
  if (a_measured_) {
    if (basis != a_basis_)
      throw std::logic_error("a_measure: A already measured in the other basis");
    return {record_, *this};
  }
  if (basis == Basis::computational) {
    double m0;
    if (!product_)
      m0 = std::norm(amp_[0][0]) + std::norm(amp_[1][0]);
    else
      m0 = std::norm(span_[0]);
    double m1;
    if (!product_)
      m1 = std::norm(amp_[0][1]) + std::norm(amp_[1][1]);
    else
      m1 = std::norm(span_[1]);
    const int j = rng.uniform() < m0 / (m0 + m1) ? 0 : 1;
    PurifiedJointState s = *this;
    s.product_ = true;
    s.a_measured_ = true;
    s.a_basis_ = Basis::computational;
    s.record_ = j ? x1_ : x0_;
    if (!product_) s.c_amp_ = {amp_[0][j], amp_[1][j]};
    s.span_ = {};
    return {s.record_, std::move(s)};
  }
  // Sample the parity class t = delta . w first; within a class every w has
  // the same coefficient magnitude, so w is then uniform over the class.
  double mt[2];
  for (int t = 0; t < 2; ++t) {
    const double sign = t ? -1.0 : 1.0;
    if (!product_)
      mt[t] = std::norm(amp_[0][0] + sign * amp_[0][1]) +
              std::norm(amp_[1][0] + sign * amp_[1][1]);
    else
      mt[t] = std::norm(span_[0] + sign * span_[1]);
  }
  const int t = rng.uniform() < mt[0] / (mt[0] + mt[1]) ? 0 : 1;
  const BitString w = sample_parity_class(x0_ ^ x1_, t, rng);
  PurifiedJointState s = *this;
  s.product_ = true;
  s.a_measured_ = true;
  s.a_basis_ = Basis::hadamard;
  s.record_ = w;
  s.span_ = {};
  if (!product_) {
    const double sign = t ? -1.0 : 1.0;
    // Global factor (-1)^(x0 . w) dropped; only the c ratio matters.
    s.c_amp_ = {amp_[0][0] + sign * amp_[0][1], amp_[1][0] + sign * amp_[1][1]};
  }
  return {w, std::move(s)};
}

TwoBranchState PurifiedJointState::a_as_two_branch() const {
  if (!product_ || a_measured_)
    throw std::logic_error("a_as_two_branch: A register not in span form");
  const double n0 = std::abs(span_[0]), n1 = std::abs(span_[1]);
  if (n0 <= 0.0 || n1 <= 0.0 || std::abs(n0 - n1) > 1e-12 * std::max(n0, n1))
    throw std::logic_error("a_as_two_branch: branches not equal magnitude");
  const Cx ratio = span_[1] / span_[0];
  if (std::abs(ratio.imag()) > 1e-12)
    throw std::logic_error("a_as_two_branch: relative phase not +-1");
  return TwoBranchState(x0_, x1_, ratio.real() < 0.0 ? 1 : 0);
}

Mat PurifiedJointState::reduced_c_density() const {
  Mat rho(2, 2);
  if (!product_) {
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d)
        rho(c, d) = amp_[c][0] * std::conj(amp_[d][0]) +
                    amp_[c][1] * std::conj(amp_[d][1]);
  } else {
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) rho(c, d) = c_amp_[c] * std::conj(c_amp_[d]);
  }
  return rho / rho.trace().real();
}

double PurifiedJointState::mass_of_a_part() const {
  if (!product_) {
    double m = 0;
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 2; ++j) m += std::norm(amp_[c][j]);
    return m;
  }
  if (a_measured_) return 1.0;
  return std::norm(span_[0]) + std::norm(span_[1]);
}

double PurifiedJointState::mass() const {
  if (!product_) return mass_of_a_part();
  const double cm = std::norm(c_amp_[0]) + std::norm(c_amp_[1]);
  return cm * mass_of_a_part();
}

DenseState PurifiedJointState::to_dense_joint() const {
  const std::size_t n = this->n();
  if (n + 1 > kDenseCap)
    throw std::invalid_argument("to_dense_joint: register too wide");
  Vec a = Vec::Zero(Eigen::Index{1} << (n + 1));
  const std::uint64_t i0 = x0_.index(), i1 = x1_.index();
  if (!product_) {
    for (int c = 0; c < 2; ++c) {
      a(static_cast<Eigen::Index>((std::uint64_t(c) << n) | i0)) += amp_[c][0];
      a(static_cast<Eigen::Index>((std::uint64_t(c) << n) | i1)) += amp_[c][1];
    }
  } else if (!a_measured_) {
    for (int c = 0; c < 2; ++c) {
      a(static_cast<Eigen::Index>((std::uint64_t(c) << n) | i0)) +=
          c_amp_[c] * span_[0];
      a(static_cast<Eigen::Index>((std::uint64_t(c) << n) | i1)) +=
          c_amp_[c] * span_[1];
    }
  } else {
    const std::uint64_t r = record_.index();
    for (int c = 0; c < 2; ++c)
      a(static_cast<Eigen::Index>((std::uint64_t(c) << n) | r)) += c_amp_[c];
  }
  a /= a.norm();
  DenseState s = DenseState::from_amplitudes(std::move(a));
  if (product_ && a_measured_ && a_basis_ == Basis::hadamard)
    for (std::size_t q = 1; q <= n; ++q) s.apply_h(static_cast<int>(q));
  return s;
}

}  // namespace pvd
