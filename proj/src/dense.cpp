#include "pvd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pvd {

namespace {

constexpr int kHardCap = 24;  // allocation guard, independent of config caps
constexpr double kTol = 1e-9;

void check_dim(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("matrix not square");
}

}  // namespace

DenseState DenseState::zero(int qubits) { return basis(qubits, 0); }

DenseState DenseState::basis(int qubits, std::uint64_t index) {
  if (qubits < 1 || qubits > kHardCap)
    throw std::invalid_argument("DenseState: qubit count out of range");
  const std::uint64_t dim = std::uint64_t{1} << qubits;
  if (index >= dim) throw std::invalid_argument("DenseState: index out of range");
  Vec a = Vec::Zero(static_cast<Eigen::Index>(dim));
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return DenseState(qubits, std::move(a));
}

DenseState DenseState::from_amplitudes(Vec amps) {
  const auto dim = amps.size();
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("from_amplitudes: dimension not a power of two");
  int q = 0;
  while ((Eigen::Index{1} << q) < dim) ++q;
  if (q > kHardCap) throw std::invalid_argument("from_amplitudes: too large");
  if (std::abs(amps.norm() - 1.0) > kTol)
    throw std::invalid_argument("from_amplitudes: not normalized");
  return DenseState(q, std::move(amps));
}

Cx DenseState::inner(const DenseState& other) const {
  if (qubits_ != other.qubits_)
    throw std::invalid_argument("inner: register size mismatch");
  return a_.dot(other.a_);
}

Mat DenseState::density() const { return a_ * a_.adjoint(); }

void DenseState::check_qubit(int q) const {
  if (q < 0 || q >= qubits_) throw std::out_of_range("qubit index out of range");
}

void DenseState::check_range(int first, int count) const {
  if (count < 1 || first < 0 || first + count > qubits_)
    throw std::out_of_range("qubit range out of range");
}

void DenseState::apply_1q(int q, Cx u00, Cx u01, Cx u10, Cx u11) {
  check_qubit(q);
  const std::uint64_t dim = std::uint64_t{1} << qubits_;
  const std::uint64_t stride = std::uint64_t{1} << (qubits_ - 1 - q);
  for (std::uint64_t base = 0; base < dim; base += 2 * stride)
    for (std::uint64_t off = 0; off < stride; ++off) {
      const auto i0 = static_cast<Eigen::Index>(base + off);
      const auto i1 = static_cast<Eigen::Index>(base + off + stride);
      const Cx a0 = a_(i0), a1 = a_(i1);
      a_(i0) = u00 * a0 + u01 * a1;
      a_(i1) = u10 * a0 + u11 * a1;
    }
}

void DenseState::apply_h(int q) {
  const double s = std::numbers::sqrt2 / 2.0;
  apply_1q(q, s, s, s, -s);
}

void DenseState::apply_x(int q) { apply_1q(q, 0, 1, 1, 0); }

void DenseState::apply_y(int q) { apply_1q(q, 0, Cx(0, -1), Cx(0, 1), 0); }

void DenseState::apply_z(int q) { apply_1q(q, 1, 0, 0, -1); }

void DenseState::apply_s(int q) { apply_1q(q, 1, 0, 0, Cx(0, 1)); }

void DenseState::apply_t(int q) {
  const double s = std::numbers::sqrt2 / 2.0;
  apply_1q(q, 1, 0, 0, Cx(s, s));
}

void DenseState::apply_ry(int q, double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  apply_1q(q, c, -s, s, c);
}

void DenseState::apply_rz(int q, double theta) {
  apply_1q(q, std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2));
}

void DenseState::apply_cx(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw std::invalid_argument("cx: equal qubits");
  const std::uint64_t dim = std::uint64_t{1} << qubits_;
  const std::uint64_t cbit = std::uint64_t{1} << (qubits_ - 1 - control);
  const std::uint64_t tbit = std::uint64_t{1} << (qubits_ - 1 - target);
  for (std::uint64_t i = 0; i < dim; ++i)
    if ((i & cbit) && !(i & tbit))
      std::swap(a_(static_cast<Eigen::Index>(i)),
                a_(static_cast<Eigen::Index>(i | tbit)));
}

void DenseState::apply_cz(int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw std::invalid_argument("cz: equal qubits");
  const std::uint64_t dim = std::uint64_t{1} << qubits_;
  const std::uint64_t abit = std::uint64_t{1} << (qubits_ - 1 - a);
  const std::uint64_t bbit = std::uint64_t{1} << (qubits_ - 1 - b);
  for (std::uint64_t i = 0; i < dim; ++i)
    if ((i & abit) && (i & bbit)) a_(static_cast<Eigen::Index>(i)) *= -1.0;
}

std::vector<double> DenseState::range_probs(int first, int count) const {
  check_range(first, count);
  const std::uint64_t dim = std::uint64_t{1} << qubits_;
  const int drop = qubits_ - first - count;
  const std::uint64_t mask = (std::uint64_t{1} << count) - 1;
  std::vector<double> probs(std::size_t{1} << count, 0.0);
  for (std::uint64_t i = 0; i < dim; ++i)
    probs[(i >> drop) & mask] += std::norm(a_(static_cast<Eigen::Index>(i)));
  return probs;
}

double DenseState::prob_of(int first, int count, std::uint64_t outcome) const {
  auto probs = range_probs(first, count);
  if (outcome >= probs.size()) throw std::invalid_argument("prob_of: bad outcome");
  return probs[outcome];
}

std::uint64_t DenseState::sample_range(int first, int count,
                                       SplitRng& rng) const {
  auto probs = range_probs(first, count);
  double total = 0.0;
  for (double p : probs) total += p;
  double r = rng.uniform() * total;
  std::uint64_t last = 0;
  for (std::uint64_t o = 0; o < probs.size(); ++o) {
    if (probs[o] <= 0.0) continue;
    last = o;
    if (r < probs[o]) return o;
    r -= probs[o];
  }
  return last;  // guard against accumulated rounding
}

void DenseState::collapse_range(int first, int count, std::uint64_t outcome) {
  check_range(first, count);
  const double p = prob_of(first, count, outcome);
  if (p <= 0.0) throw std::invalid_argument("collapse_range: zero-probability outcome");
  const std::uint64_t dim = std::uint64_t{1} << qubits_;
  const int drop = qubits_ - first - count;
  const std::uint64_t mask = (std::uint64_t{1} << count) - 1;
  const double scale = 1.0 / std::sqrt(p);
  for (std::uint64_t i = 0; i < dim; ++i) {
    auto& amp = a_(static_cast<Eigen::Index>(i));
    if (((i >> drop) & mask) == outcome)
      amp *= scale;
    else
      amp = 0.0;
  }
}

std::uint64_t DenseState::measure_range(int first, int count, SplitRng& rng) {
  const std::uint64_t o = sample_range(first, count, rng);
  collapse_range(first, count, o);
  return o;
}

int DenseState::measure_hadamard(int q, SplitRng& rng) {
  apply_h(q);
  const int o = static_cast<int>(measure_range(q, 1, rng));
  apply_h(q);
  return o;
}

DenseState DenseState::factor_out(int first, int count,
                                  std::uint64_t outcome) const {
  check_range(first, count);
  if (count == qubits_)
    throw std::invalid_argument("factor_out: cannot drop every qubit");
  if (std::abs(prob_of(first, count, outcome) - 1.0) > kTol)
    throw std::logic_error("factor_out: range not collapsed to outcome");
  const int rest = qubits_ - count;
  const int drop = qubits_ - first - count;
  Vec out = Vec::Zero(Eigen::Index{1} << rest);
  const std::uint64_t dim = std::uint64_t{1} << qubits_;
  const std::uint64_t mask = (std::uint64_t{1} << count) - 1;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (((i >> drop) & mask) != outcome) continue;
    const std::uint64_t head = i >> (drop + count);
    const std::uint64_t tail = i & ((std::uint64_t{1} << drop) - 1);
    out(static_cast<Eigen::Index>((head << drop) | tail)) +=
        a_(static_cast<Eigen::Index>(i));
  }
  const double n = out.norm();
  out /= n;
  return DenseState(rest, std::move(out));
}

// --- density-operator utilities -------------------------------------------

void check_density(const Mat& rho) {
  check_dim(rho);
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTol)
    throw std::invalid_argument("density: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > kTol ||
      std::abs(rho.trace().imag()) > kTol)
    throw std::invalid_argument("density: trace != 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kTol)
    throw std::invalid_argument("density: negative eigenvalue");
}

void check_projector(const Mat& p) {
  check_dim(p);
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kTol)
    throw std::invalid_argument("projector: not Hermitian");
  if ((p * p - p).cwiseAbs().maxCoeff() > kTol)
    throw std::invalid_argument("projector: not idempotent");
}

double half_trace_norm(const Mat& h) {
  check_dim(h);
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("half_trace_norm: not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  check_density(rho);
  check_density(sigma);
  if (rho.rows() != sigma.rows())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  return half_trace_norm(rho - sigma);
}

Mat partial_trace(const Mat& rho, int qubits, const std::vector<int>& keep) {
  check_dim(rho);
  if (rho.rows() != (Eigen::Index{1} << qubits))
    throw std::invalid_argument("partial_trace: size mismatch");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= qubits)
      throw std::invalid_argument("partial_trace: bad qubit");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep list not ascending");
  }
  std::vector<int> drop;
  for (int q = 0; q < qubits; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) drop.push_back(q);

  auto weave = [&](std::uint64_t ik, std::uint64_t id) {
    std::uint64_t full = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if ((ik >> (keep.size() - 1 - i)) & 1)
        full |= std::uint64_t{1} << (qubits - 1 - keep[i]);
    for (std::size_t i = 0; i < drop.size(); ++i)
      if ((id >> (drop.size() - 1 - i)) & 1)
        full |= std::uint64_t{1} << (qubits - 1 - drop[i]);
    return full;
  };

  const std::uint64_t dk = std::uint64_t{1} << keep.size();
  const std::uint64_t dd = std::uint64_t{1} << drop.size();
  Mat out = Mat::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::uint64_t i = 0; i < dk; ++i)
    for (std::uint64_t j = 0; j < dk; ++j)
      for (std::uint64_t d = 0; d < dd; ++d)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            rho(static_cast<Eigen::Index>(weave(i, d)),
                static_cast<Eigen::Index>(weave(j, d)));
  return out;
}

// --- imported inequalities as numeric checks --------------------------------

GentleCheck check_gentle_measurement(const Mat& rho, const Mat& projector) {
  check_density(rho);
  check_projector(projector);
  if (rho.rows() != projector.rows())
    throw std::invalid_argument("gentle: dimension mismatch");
  const double p = (projector * rho).trace().real();
  if (p < 1e-12)
    throw std::invalid_argument("gentle: projector annihilates the state");
  const double delta = std::max(0.0, 1.0 - p);
  const Mat post = (projector * rho * projector) / p;
  GentleCheck out;
  out.delta = delta;
  out.td = half_trace_norm(rho - post);
  out.bound = 2.0 * std::sqrt(delta) + kTol;
  out.satisfied = out.td <= out.bound;
  return out;
}

MappingCheck check_distinguish_implies_map(const Mat& d, const Mat& p0,
                                           const Mat& p1, const Vec& psi) {
  check_projector(p0);
  check_projector(p1);
  check_dim(d);
  const auto n = d.rows();
  if (p0.rows() != n || p1.rows() != n || psi.size() != n)
    throw std::invalid_argument("mapping: dimension mismatch");
  if ((p0 + p1 - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kTol)
    throw std::invalid_argument("mapping: projectors do not sum to identity");
  if (std::abs(psi.norm() - 1.0) > kTol)
    throw std::invalid_argument("mapping: state not normalized");
  const Vec s0 = p0 * psi, s1 = p1 * psi;
  MappingCheck out;
  out.lhs = (p1 * (d * s0)).squaredNorm() + (p0 * (d * s1)).squaredNorm();
  const double gap =
      (d * psi).squaredNorm() - (d * s0).squaredNorm() - (d * s1).squaredNorm();
  out.rhs = 0.5 * gap * gap;
  out.satisfied = out.lhs + kTol >= out.rhs;
  return out;
}

// --- random instances --------------------------------------------------------

double gaussian(SplitRng& rng) {
  const double u1 = rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

Mat ginibre(int rows, int cols, SplitRng& rng) {
  Mat g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = Cx(gaussian(rng), gaussian(rng));
  return g;
}

}  // namespace

Mat random_density(int dim, SplitRng& rng) {
  const Mat g = ginibre(dim, dim, rng);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Mat random_projector(int dim, int rank, SplitRng& rng) {
  if (rank < 0 || rank > dim) throw std::invalid_argument("random_projector: rank");
  if (rank == 0) return Mat::Zero(dim, dim);
  const Mat g = ginibre(dim, rank, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  const Mat q = qr.householderQ() * Mat::Identity(dim, rank);
  return q * q.adjoint();
}

Mat random_contraction(int dim, SplitRng& rng) {
  const Mat g = ginibre(dim, dim, rng);
  Eigen::JacobiSVD<Mat> svd(g);
  return g / (svd.singularValues()(0) * (1.0 + 1e-12));
}

Vec random_pure(int dim, SplitRng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Cx(gaussian(rng), gaussian(rng));
  return v / v.norm();
}

}  // namespace pvd
