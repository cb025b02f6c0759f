#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "pvd/distribution.hpp"
#include "pvd/qstate.hpp"

using namespace pvd;
using doctest::Approx;

namespace {

TwoBranchState instance(const char* a, const char* b, int phase) {
  return TwoBranchState(BitString::from_string(a), BitString::from_string(b),
                        phase);
}

// Dense-oracle probabilities of an all-qubit Hadamard measurement.
std::vector<double> dense_hadamard_probs(const TwoBranchState& s) {
  DenseState d = to_dense(s);
  for (int q = 0; q < d.qubits(); ++q) d.apply_h(q);
  return d.range_probs(0, d.qubits());
}

TwoBranchState random_instance(std::size_t n, int phase, SplitRng& rng) {
  const BitString x0 = rng.bits(n);
  BitString x1 = rng.bits(n);
  while (x1 == x0) x1 = rng.bits(n);
  return TwoBranchState(x0, x1, phase);
}

}  // namespace

TEST_SUITE("qstate") {

TEST_CASE("two-branch state canonicalizes branch order") {
  const TwoBranchState s = instance("110", "001", 1);
  CHECK(s.x0().str() == "001");
  CHECK(s.x1().str() == "110");
  CHECK(s.phase() == 1);
  CHECK(s.n() == 3);
  CHECK(s.delta().str() == "111");
  CHECK(s == instance("001", "110", 1));

  CHECK_THROWS_AS(instance("01", "01", 0), std::invalid_argument);
  CHECK_THROWS_AS(instance("01", "011", 0), std::invalid_argument);
  CHECK_THROWS_AS(instance("01", "10", 2), std::invalid_argument);
}

TEST_CASE("parity-class sampler output always satisfies the constraint") {
  SplitRng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(10);
    BitString delta = rng.bits(n);
    if (!delta.any()) delta.set_bit(0, 1);
    const int parity = static_cast<int>(rng.bit());
    const BitString w = sample_parity_class(delta, parity, rng);
    CHECK(delta.dot(w) == parity);
  }
  CHECK_THROWS_AS(sample_parity_class(BitString::zeros(3), 0, rng),
                  std::invalid_argument);
}

TEST_CASE("parity-class sampler consumes exactly n stream bits") {
  SplitRng a(31), b(31);
  (void)sample_parity_class(BitString::from_string("0110"), 1, a);
  (void)b.bits(4);
  for (int i = 0; i < 4; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("hadamard sampler matches the dense oracle support") {
  SplitRng rng(5);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const TwoBranchState s = random_instance(n, static_cast<int>(rng.bit()), rng);
      const auto dense = dense_hadamard_probs(s);

      std::set<std::uint64_t> support;
      for (std::uint64_t v = 0; v < dense.size(); ++v)
        if (dense[v] > 1e-12) support.insert(v);

      // Dense support is the affine class, every point at 2^(1-n).
      const double expect = std::ldexp(1.0, 1 - static_cast<int>(n));
      for (std::uint64_t v = 0; v < dense.size(); ++v) {
        const BitString w = BitString::from_index(v, n);
        if (s.delta().dot(w) == s.phase())
          CHECK(dense[v] == Approx(expect));
        else
          CHECK(dense[v] == Approx(0.0));
      }

      for (int draw = 0; draw < 200; ++draw)
        CHECK(support.count(hadamard_measure(s, rng).index()) == 1);
    }
  }
}

TEST_CASE("hadamard sampler is uniform on its class") {
  SplitRng rng(71);
  const TwoBranchState s = instance("1011", "0101", 1);
  const auto branches = hadamard_branches(s);
  CHECK(branches.size() == 8);

  std::map<std::uint64_t, std::uint64_t> counts;
  const int samples = 40000;
  for (int i = 0; i < samples; ++i) ++counts[hadamard_measure(s, rng).index()];

  double stat = 0.0;
  for (const auto& [p, w] : branches) {
    const double expect = p * samples;
    const double diff = static_cast<double>(counts[w.index()]) - expect;
    stat += diff * diff / expect;
  }
  CHECK(chi_square_pvalue(stat, static_cast<double>(branches.size() - 1)) >
        1e-4);
}

TEST_CASE("computational measurement matches the dense oracle") {
  SplitRng rng(8);
  const TwoBranchState s = instance("110", "010", 0);
  const DenseState d = to_dense(s);
  CHECK(d.prob_of(0, 3, s.x0().index()) == Approx(0.5));
  CHECK(d.prob_of(0, 3, s.x1().index()) == Approx(0.5));
  CHECK(d.prob_of(0, 3, 0) == Approx(0.0));

  std::uint64_t hits0 = 0;
  const int samples = 20000;
  for (int i = 0; i < samples; ++i) {
    const BitString x = computational_measure(s, rng);
    CHECK((x == s.x0() || x == s.x1()));
    if (x == s.x0()) ++hits0;
  }
  const BinomialCi ci = wilson_interval(hits0, samples, 1e-3);
  CHECK(ci.lo < 0.5);
  CHECK(ci.hi > 0.5);
}

TEST_CASE("branch enumerations match the dense amplitudes entrywise") {
  SplitRng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + rng.below(6);
    const TwoBranchState s = random_instance(n, static_cast<int>(rng.bit()), rng);

    const auto comp = computational_branches(s);
    CHECK(comp.size() == 2);
    const DenseState d = to_dense(s);
    for (const auto& [p, x] : comp)
      CHECK(d.prob_of(0, static_cast<int>(n), x.index()) == Approx(p));

    const auto had = hadamard_branches(s);
    const auto dense = dense_hadamard_probs(s);
    CHECK(had.size() == (std::size_t{1} << (n - 1)));
    double total = 0.0;
    for (const auto& [p, w] : had) {
      CHECK(dense[w.index()] == Approx(p));
      total += p;
    }
    CHECK(total == Approx(1.0));
  }
}

TEST_CASE("decrypt identity: z dot w equals the phase") {
  SplitRng rng(23);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng.below(12);
    const int b = static_cast<int>(rng.bit());
    const TwoBranchState s = random_instance(n, b, rng);
    const BitString w = hadamard_measure(s, rng);
    CHECK(decrypt_bit(s.delta(), w) == b);
  }
}

TEST_CASE("purified state marginals") {
  const BitString x0 = BitString::from_string("010");
  const BitString x1 = BitString::from_string("110");
  const PurifiedJointState j = purify(x0, x1);
  CHECK(j.n() == 3);
  CHECK(j.entangled());
  CHECK_FALSE(j.a_measured());
  CHECK(j.mass() == Approx(1.0));

  const auto cp = j.c_probs(Basis::computational);
  CHECK(cp[0] == Approx(0.5));
  CHECK(cp[1] == Approx(0.5));
  const auto hp = j.c_probs(Basis::hadamard);
  CHECK(hp[0] == Approx(0.5));
  CHECK(hp[1] == Approx(0.5));

  const Mat half = Mat::Identity(2, 2) * 0.5;
  CHECK((j.reduced_c_density() - half).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(purify(x0, x0), std::invalid_argument);
  CHECK_THROWS_AS(j.a_basis(), std::logic_error);
  CHECK_THROWS_AS(j.a_outcome(), std::logic_error);
  CHECK_THROWS_AS(j.a_as_two_branch(), std::logic_error);
}

TEST_CASE("collapsing c recovers the plain two-branch state") {
  const BitString x0 = BitString::from_string("0101");
  const BitString x1 = BitString::from_string("1100");
  const PurifiedJointState j = purify(x0, x1);
  for (int c = 0; c < 2; ++c) {
    const PurifiedJointState jc = j.c_collapse(Basis::computational, c);
    CHECK_FALSE(jc.entangled());
    CHECK(jc.a_as_two_branch() == TwoBranchState(x0, x1, c));
  }
}

TEST_CASE("purified a measurement identifies c through the parity") {
  SplitRng rng(40);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng.below(4);
    const BitString x0 = rng.bits(n);
    BitString x1 = rng.bits(n);
    while (x1 == x0) x1 = rng.bits(n);
    const PurifiedJointState j = purify(x0, x1);
    const BitString delta = x0 ^ x1;

    double total = 0.0;
    for (const auto& br : j.a_branches(Basis::hadamard)) {
      total += br.prob;
      // Seeing w pins the control computationally at c = delta . w; the
      // conjugate basis stays balanced.
      const int cprime = delta.dot(br.outcome);
      const auto cp = br.post.c_probs(Basis::computational);
      CHECK(cp[cprime] == Approx(1.0));
      CHECK(cp[1 - cprime] == Approx(0.0));
      const auto hp = br.post.c_probs(Basis::hadamard);
      CHECK(hp[0] == Approx(0.5));
      CHECK(hp[1] == Approx(0.5));
    }
    CHECK(total == Approx(1.0));

    for (const auto& br : j.a_branches(Basis::computational)) {
      CHECK((br.outcome == x0 || br.outcome == x1));
      CHECK(br.prob == Approx(0.5));
      // Seeing x_j leaves C in the Hadamard eigenstate of index j:
      // computationally balanced, pinned under a Hadamard measurement.
      const auto cp = br.post.c_probs(Basis::computational);
      CHECK(cp[0] == Approx(0.5));
      CHECK(cp[1] == Approx(0.5));
      const auto hp = br.post.c_probs(Basis::hadamard);
      CHECK(hp[br.outcome == x0 ? 0 : 1] == Approx(1.0));
    }
  }
}

TEST_CASE("purified branches match the dense joint replay") {
  SplitRng rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + rng.below(5);
    const BitString x0 = rng.bits(n);
    BitString x1 = rng.bits(n);
    while (x1 == x0) x1 = rng.bits(n);
    const PurifiedJointState j = purify(x0, x1);
    const DenseState d = j.to_dense_joint();
    CHECK(d.qubits() == static_cast<int>(n) + 1);

    // C marginals, both bases.
    CHECK(d.prob_of(0, 1, 0) == Approx(j.c_probs(Basis::computational)[0]));
    DenseState dh = d;
    dh.apply_h(0);
    CHECK(dh.prob_of(0, 1, 0) == Approx(j.c_probs(Basis::hadamard)[0]));

    // A marginals, both bases.
    for (const auto& br : j.a_branches(Basis::computational))
      CHECK(d.prob_of(1, static_cast<int>(n), br.outcome.index()) ==
            Approx(br.prob));
    DenseState da = d;
    for (int q = 1; q <= static_cast<int>(n); ++q) da.apply_h(q);
    for (const auto& br : j.a_branches(Basis::hadamard))
      CHECK(da.prob_of(1, static_cast<int>(n), br.outcome.index()) ==
            Approx(br.prob));
  }
}

TEST_CASE("purified sampling follows the branch weights") {
  SplitRng rng(55);
  const BitString x0 = BitString::from_string("011");
  const BitString x1 = BitString::from_string("101");
  const PurifiedJointState j = purify(x0, x1);

  std::map<std::uint64_t, std::uint64_t> counts;
  const int samples = 20000;
  for (int i = 0; i < samples; ++i) {
    auto [w, post] = j.a_measure(Basis::hadamard, rng);
    ++counts[w.index()];
    CHECK(post.a_measured());
    CHECK(post.a_basis() == Basis::hadamard);
    CHECK(post.a_outcome() == w);
  }
  double stat = 0.0;
  int dof = -1;
  for (const auto& br : j.a_branches(Basis::hadamard)) {
    const double expect = br.prob * samples;
    const double diff = static_cast<double>(counts[br.outcome.index()]) - expect;
    stat += diff * diff / expect;
    ++dof;
  }
  CHECK(chi_square_pvalue(stat, static_cast<double>(dof)) > 1e-4);
}

TEST_CASE("one a measurement only") {
  const PurifiedJointState j = purify(BitString::from_string("01"),
                                      BitString::from_string("10"));
  SplitRng rng(1);
  auto [w, post] = j.a_measure(Basis::hadamard, rng);
  (void)w;
  CHECK_THROWS_AS(post.a_measure(Basis::computational, rng), std::logic_error);
  CHECK_THROWS_AS(post.a_branches(Basis::computational), std::logic_error);
  CHECK_THROWS_AS(post.a_as_two_branch(), std::logic_error);

  // C measurements in either basis stay available afterwards.
  CHECK_NOTHROW(post.c_probs(Basis::computational));
  auto [c, done] = post.c_measure(Basis::computational, rng);
  CHECK((c == 0 || c == 1));
  (void)done;
}

TEST_CASE("c collapse validates inputs") {
  const PurifiedJointState j = purify(BitString::from_string("01"),
                                      BitString::from_string("10"));
  CHECK_THROWS_AS(j.c_collapse(Basis::computational, 2), std::invalid_argument);

  // Collapse C to hadamard 0 twice: the second outcome is certain, so the
  // other branch has zero probability.
  const PurifiedJointState h0 = j.c_collapse(Basis::hadamard, 0);
  CHECK(h0.c_probs(Basis::hadamard)[0] == Approx(1.0));
  CHECK_THROWS_AS(h0.c_collapse(Basis::hadamard, 1), std::invalid_argument);
}

}  // TEST_SUITE
