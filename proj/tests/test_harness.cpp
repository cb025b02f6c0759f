#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "pvd/harness.hpp"

using namespace pvd;
using doctest::Approx;

namespace {

SchemeConfig toy_scheme(std::size_t n, std::size_t m,
                        WrapperKind wrapper = WrapperKind::transparent) {
  SchemeConfig sc;
  sc.variant = SchemeConfig::Variant::owf;
  sc.owf = owf_toy(n, m, 7);
  sc.wrapper = wrapper;
  if (wrapper == WrapperKind::pke) sc.pke = pke_group(GroupParams::preset("tiny64"));
  return sc;
}

SchemeConfig owsg_scheme(std::size_t n, int m, int t) {
  SchemeConfig sc;
  sc.variant = SchemeConfig::Variant::owsg;
  sc.owsg = owsg_toy(n, m, 1);
  sc.wrapper = WrapperKind::transparent;
  sc.t = t;
  return sc;
}

const std::vector<AdversaryStrategy>& enumerable_strategies() {
  static const std::vector<AdversaryStrategy> all = {
      AdversaryStrategy::honest(),
      AdversaryStrategy::inverter(0),
      AdversaryStrategy::inverter(1),
      AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::zero),
      AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w),
  };
  return all;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("circuit presets") {
  CHECK(circuit_preset("identity", 4).empty());

  const auto had = circuit_preset("hadamard_all", 3);
  REQUIRE(had.size() == 3);
  for (int q = 0; q < 3; ++q) {
    CHECK(had[q].op == CircuitGate::Op::h);
    CHECK(had[q].q == q);
  }

  const auto scr = circuit_preset("scramble", 3);
  CHECK(!scr.empty());
  for (const CircuitGate& g : scr) {
    CHECK(g.q >= 0);
    CHECK(g.q < 3);
    if (g.op == CircuitGate::Op::cx || g.op == CircuitGate::Op::cz) {
      CHECK(g.q2 >= 0);
      CHECK(g.q2 < 3);
    }
  }

  CHECK_THROWS_AS(circuit_preset("nope", 3), std::invalid_argument);
  CHECK_THROWS_AS(circuit_preset("identity", 0), std::invalid_argument);
}

TEST_CASE("strategy names and residual alphabets are stable") {
  CHECK(AdversaryStrategy::honest().name() == "honest_deleter");
  CHECK(AdversaryStrategy::honest().residual_alphabet() == "pi");
  CHECK(AdversaryStrategy::inverter(1).name() == "classical_inverter[y1]");
  CHECK(AdversaryStrategy::inverter(0).residual_alphabet() == "pi");

  const auto rz = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::zero);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  CHECK(rz.name() == "hadamard_retainer[zero]");
  CHECK(rw.name() == "hadamard_retainer[guess_w]");
  CHECK(rw.residual_alphabet() == "w");

  const auto c0 = AdversaryStrategy::circuit(circuit_preset("hadamard_all", 3), 0);
  CHECK(c0.name() == "circuit[3 gates, ws=0]");
  CHECK(c0.residual_alphabet() == "x");
  const auto c2 = AdversaryStrategy::circuit({}, 2);
  CHECK(c2.residual_alphabet() == "x+dense2");

  CHECK(AdversaryStrategy::honest().enumerable());
  CHECK_FALSE(c0.enumerable());
}

TEST_CASE("config validation") {
  SchemeConfig ok = toy_scheme(4, 8);
  CHECK_NOTHROW(ok.validate(AdversaryStrategy::honest()));
  CHECK(ok.n() == 4);

  SchemeConfig bad_t = toy_scheme(4, 8);
  bad_t.t = 0;
  CHECK_THROWS_AS(bad_t.validate(AdversaryStrategy::honest()), std::invalid_argument);

  SchemeConfig no_owf = toy_scheme(4, 8);
  no_owf.owf.reset();
  CHECK_THROWS_AS(no_owf.n(), std::invalid_argument);

  // The inverter needs a preimage table, so a hash-built function is out.
  SchemeConfig hashed = toy_scheme(4, 8);
  hashed.owf = owf_hash(8, 16);
  CHECK_THROWS_AS(hashed.validate(AdversaryStrategy::inverter(0)), std::invalid_argument);
  CHECK_THROWS_AS(ok.validate(AdversaryStrategy::inverter(2)), std::invalid_argument);

  CHECK_THROWS_AS(ok.validate(AdversaryStrategy::circuit({}, -1)), std::invalid_argument);
  SchemeConfig wide = toy_scheme(16, 16);
  CHECK_THROWS_AS(wide.validate(AdversaryStrategy::circuit({}, 8)), std::invalid_argument);
  CHECK_THROWS_AS(
      ok.validate(AdversaryStrategy::circuit({{CircuitGate::Op::h, 4, -1, 0.0}}, 0)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ok.validate(AdversaryStrategy::circuit({{CircuitGate::Op::cx, 0, 9, 0.0}}, 1)),
      std::invalid_argument);
}

TEST_CASE("single-bit retainer distributions by hand") {
  // One-bit branch pair is forced to {0, 1}, so every mass below is dyadic
  // and the comparisons are literal.
  const SchemeConfig sc = toy_scheme(1, 8);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);

  for (int b : {0, 1}) {
    const std::string wb = "w=" + std::to_string(b);
    const std::string wo = "w=" + std::to_string(1 - b);

    const auto h0 = run_hyb(0, b, sc, rw, DistMode::exact, 4, 5);
    CHECK(h0.prob(wb) == 1.0);
    CHECK(h0.bottom_prob() == 0.0);

    const auto h1 = run_hyb(1, b, sc, rw, DistMode::exact, 4, 5);
    CHECK(h1.prob(wb) == 0.5);
    CHECK(h1.bottom_prob() == 0.5);

    const auto h2 = run_hyb(2, b, sc, rw, DistMode::exact, 4, 5);
    CHECK(h2.bottom_prob() == 0.75);
    CHECK(h2.prob(wb) == 0.125);
    CHECK(h2.prob(wo) == 0.125);
  }
  CHECK(exactly_equal(run_hyb(2, 0, sc, rw, DistMode::exact, 4, 5),
                      run_hyb(2, 1, sc, rw, DistMode::exact, 4, 5)));
}

TEST_CASE("single-bit honest distributions by hand") {
  const SchemeConfig sc = toy_scheme(1, 8);
  // Distinct images make side identification exact for honest certificates.
  REQUIRE(sc.owf->eval(BitString::from_string("0")) !=
          sc.owf->eval(BitString::from_string("1")));
  const auto honest = AdversaryStrategy::honest();

  for (int b : {0, 1}) {
    const auto h0 = run_hyb(0, b, sc, honest, DistMode::exact, 4, 5);
    CHECK(h0.prob("pi=0") == 0.5);
    CHECK(h0.prob("pi=1") == 0.5);
    CHECK(h0.bottom_prob() == 0.0);

    const auto h1 = run_hyb(1, b, sc, honest, DistMode::exact, 4, 5);
    const auto h2 = run_hyb(2, b, sc, honest, DistMode::exact, 4, 5);
    CHECK(exactly_equal(h1, h2));  // honest never trips the Hadamard abort
    CHECK(h1.bottom_prob() == 0.5);
    CHECK(h1.prob("pi=0") == 0.25);
    CHECK(h1.prob("pi=1") == 0.25);
  }
}

TEST_CASE("hybrid one is the half-bottom mixture of hybrid zero") {
  const SchemeConfig sc = toy_scheme(4, 8);
  for (const auto& adv : enumerable_strategies()) {
    CAPTURE(adv.name());
    for (int b : {0, 1}) {
      const auto h0 = run_hyb(0, b, sc, adv, DistMode::exact, 3, 17);
      const auto h1 = run_hyb(1, b, sc, adv, DistMode::exact, 3, 17);
      CHECK(exactly_equal(bottom_mixture(0.5, h0), h1));
    }
  }

  // Same identity through the wrapped path and with the zeroed payload.
  for (const SchemeConfig& cfg :
       {toy_scheme(4, 8, WrapperKind::pke), [] {
          SchemeConfig z = toy_scheme(4, 8);
          z.zero_z = true;
          return z;
        }()}) {
    const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
    const auto h0 = run_hyb(0, 0, cfg, rw, DistMode::exact, 2, 23);
    const auto h1 = run_hyb(1, 0, cfg, rw, DistMode::exact, 2, 23);
    CHECK(exactly_equal(bottom_mixture(0.5, h0), h1));
  }

  // Dense adversaries accumulate through a different branch walk, so the
  // comparison is a distance check rather than a bitwise one.
  for (int ws : {0, 1}) {
    const auto circ =
        AdversaryStrategy::circuit(circuit_preset("scramble", 3 + ws), ws);
    const SchemeConfig c3 = toy_scheme(3, 4);
    for (int b : {0, 1}) {
      const auto h0 = run_hyb(0, b, c3, circ, DistMode::exact, 2, 17);
      const auto h1 = run_hyb(1, b, c3, circ, DistMode::exact, 2, 17);
      CHECK(tv_distance(bottom_mixture(0.5, h0), h1) <= 1e-12);
    }
  }
}

TEST_CASE("hybrid two does not depend on the challenge bit") {
  const SchemeConfig sc = toy_scheme(4, 8);
  for (const auto& adv : enumerable_strategies()) {
    CAPTURE(adv.name());
    const auto a = run_hyb(2, 0, sc, adv, DistMode::exact, 3, 29);
    const auto b = run_hyb(2, 1, sc, adv, DistMode::exact, 3, 29);
    CHECK(tv_distance(a, b) == 0.0);
  }

  const SchemeConfig c3 = toy_scheme(3, 4);
  for (const std::string& preset : {"identity", "hadamard_all", "scramble"}) {
    const auto circ = AdversaryStrategy::circuit(circuit_preset(preset, 3), 0);
    const auto a = run_hyb(2, 0, c3, circ, DistMode::exact, 2, 29);
    const auto b = run_hyb(2, 1, c3, circ, DistMode::exact, 2, 29);
    CHECK(tv_distance(a, b) == 0.0);
  }

  const SchemeConfig os = owsg_scheme(2, 2, 2);
  const auto honest = AdversaryStrategy::honest();
  CHECK(tv_distance(run_hyb(2, 0, os, honest, DistMode::exact, 2, 29),
                    run_hyb(2, 1, os, honest, DistMode::exact, 2, 29)) <= 1e-12);
}

TEST_CASE("advantage drops by at most a factor of two") {
  const SchemeConfig sc = toy_scheme(4, 8);
  for (const auto& adv : enumerable_strategies()) {
    CAPTURE(adv.name());
    const double a0 = tv_distance(run_hyb(0, 0, sc, adv, DistMode::exact, 3, 31),
                                  run_hyb(0, 1, sc, adv, DistMode::exact, 3, 31));
    const double a1 = tv_distance(run_hyb(1, 0, sc, adv, DistMode::exact, 3, 31),
                                  run_hyb(1, 1, sc, adv, DistMode::exact, 3, 31));
    CHECK(a0 <= 2.0 * a1 + 1e-12);
  }
}

TEST_CASE("commuting the register measurement forward changes nothing") {
  const SchemeConfig sc = toy_scheme(4, 8);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  const auto honest = AdversaryStrategy::honest();
  for (int b : {0, 1}) {
    CHECK(tv_distance(run_hyb(2, b, sc, rw, DistMode::exact, 3, 37),
                      run_hyb2_commuted(b, sc, rw, DistMode::exact, 3, 37)) == 0.0);
    CHECK(tv_distance(run_hyb(2, b, sc, honest, DistMode::exact, 3, 37),
                      run_hyb2_commuted(b, sc, honest, DistMode::exact, 3, 37)) == 0.0);
  }

  const SchemeConfig c3 = toy_scheme(3, 4);
  const auto circ = AdversaryStrategy::circuit(circuit_preset("scramble", 3), 0);
  CHECK(tv_distance(run_hyb(2, 0, c3, circ, DistMode::exact, 2, 37),
                    run_hyb2_commuted(0, c3, circ, DistMode::exact, 2, 37)) <= 1e-12);
}

TEST_CASE("zeroing the wrapped payload leaves every hybrid unchanged") {
  // None of the modeled adversaries read the classical payload, so wrapping
  // 0^n in place of the real string is invisible at the distribution level.
  SchemeConfig real = toy_scheme(4, 8, WrapperKind::pke);
  SchemeConfig zero = real;
  zero.zero_z = true;
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  const auto honest = AdversaryStrategy::honest();
  for (int idx : {0, 1, 2}) {
    for (int b : {0, 1}) {
      CHECK(exactly_equal(run_hyb(idx, b, real, rw, DistMode::exact, 2, 41),
                          run_hyb(idx, b, zero, rw, DistMode::exact, 2, 41)));
      CHECK(exactly_equal(run_hyb(idx, b, real, honest, DistMode::exact, 2, 41),
                          run_hyb(idx, b, zero, honest, DistMode::exact, 2, 41)));
    }
  }
}

TEST_CASE("dense circuit route reproduces the sparse route") {
  // Same physics, two disjoint code paths: the enumerable strategies walk
  // the sparse two-branch representation, the circuit runner simulates the
  // full register. Transcript prefixes differ by construction.
  const SchemeConfig sc = toy_scheme(3, 4);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  const auto honest = AdversaryStrategy::honest();
  const auto had = AdversaryStrategy::circuit(circuit_preset("hadamard_all", 3), 0);
  const auto idc = AdversaryStrategy::circuit(circuit_preset("identity", 3), 0);

  for (int idx : {0, 1, 2}) {
    for (int b : {0, 1}) {
      const auto sparse = run_hyb(idx, b, sc, rw, DistMode::exact, 2, 43);
      const auto dense = run_hyb(idx, b, sc, had, DistMode::exact, 2, 43);
      CHECK(dense.bottom_prob() == Approx(sparse.bottom_prob()).epsilon(1e-12));
      for (std::uint64_t i = 0; i < 8; ++i) {
        const std::string s = BitString::from_index(i, 3).str();
        CHECK(dense.prob("x=" + s) == Approx(sparse.prob("w=" + s)).epsilon(1e-12));
      }

      const auto hsp = run_hyb(idx, b, sc, honest, DistMode::exact, 2, 43);
      const auto hdn = run_hyb(idx, b, sc, idc, DistMode::exact, 2, 43);
      CHECK(hdn.bottom_prob() == Approx(hsp.bottom_prob()).epsilon(1e-12));
      for (std::uint64_t i = 0; i < 8; ++i) {
        const std::string s = BitString::from_index(i, 3).str();
        CHECK(hdn.prob("x=" + s) == Approx(hsp.prob("pi=" + s)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("sampled runs agree with exact runs") {
  // One-bit scheme so the exact run is the true sampling marginal.
  const SchemeConfig sc = toy_scheme(1, 8);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  const auto ex = run_hyb(1, 0, sc, rw, DistMode::exact, 1, 47);
  const auto em = run_hyb(1, 0, sc, rw, DistMode::empirical, 20000, 48);
  CHECK(em.samples() == 20000);
  CHECK(tv_distance(ex, em) <= tv_ci_bound(ex, em, 1e-6));

  const auto had = AdversaryStrategy::circuit(circuit_preset("hadamard_all", 1), 0);
  const auto cex = run_hyb(2, 1, sc, had, DistMode::exact, 1, 47);
  const auto cem = run_hyb(2, 1, sc, had, DistMode::empirical, 20000, 49);
  CHECK(tv_distance(cex, cem) <= tv_ci_bound(cex, cem, 1e-6));
}

TEST_CASE("evpke runs and execution modes") {
  SchemeConfig sc = toy_scheme(4, 8, WrapperKind::pke);
  const auto honest = AdversaryStrategy::honest();

  sc.exec = ExecMode::serial;
  const auto serial = run_evpke(0, sc, honest, DistMode::empirical, 4000, 51);
  sc.exec = ExecMode::parallel;
  sc.threads = 3;
  const auto parallel = run_evpke(0, sc, honest, DistMode::empirical, 4000, 51);
  CHECK(exactly_equal(serial, parallel));  // trial rngs are forked per index
  CHECK(serial.bottom_prob() == 0.0);      // honest certificates always verify

  CHECK_THROWS_AS(run_hyb(3, 0, sc, honest, DistMode::exact, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_hyb(0, 2, sc, honest, DistMode::exact, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_hyb(0, 0, sc, honest, DistMode::exact, 0, 1), std::invalid_argument);
}

TEST_CASE("abort probability by strategy") {
  const SchemeConfig sc = toy_scheme(8, 16);
  REQUIRE(sc.owf->enumerable());

  const auto honest = abort_probability(sc, AdversaryStrategy::honest(), 2000, 53, 0.001);
  CHECK(honest.successes == 0);
  CHECK(honest.value == 0.0);
  CHECK_FALSE(honest.exact);

  // The inverter leaves the branch register untouched, so the purifying
  // register is maximally mixed and the Hadamard check is a coin flip.
  const auto inv = abort_probability(sc, AdversaryStrategy::inverter(0), 20000, 54, 1e-6);
  CHECK(inv.trials == 20000);
  CHECK(inv.ci.lo < 0.5);
  CHECK(inv.ci.hi > 0.5);
  CHECK(inv.value == Approx(0.5).epsilon(0.08));

  CHECK_THROWS_AS(abort_probability(sc, AdversaryStrategy::honest(), 0, 1, 0.05),
                  std::invalid_argument);
}

TEST_CASE("other-preimage game adversaries") {
  const OwfPtr toy = owf_toy(8, 16, 7);

  const auto brute = other_preimage_game(toy, GameAdversary::brute_other, false,
                                         2000, 57, ExecMode::parallel, 0, 0.05);
  CHECK(brute.successes == 2000);
  CHECK(brute.frequency == 1.0);

  // echo hands back the preimage it was given; with an injective table that
  // never matches the other image.
  const auto echo = other_preimage_game(toy, GameAdversary::echo, true, 2000, 57,
                                        ExecMode::parallel, 0, 0.05);
  CHECK(echo.successes == 0);

  const auto xz = other_preimage_game(toy, GameAdversary::xor_z, true, 2000, 57,
                                      ExecMode::parallel, 0, 0.05);
  CHECK(xz.frequency == 1.0);  // x_c ^ z is exactly the other preimage
  const auto xz0 = other_preimage_game(toy, GameAdversary::xor_z, false, 2000, 57,
                                       ExecMode::parallel, 0, 0.05);
  CHECK(xz0.successes == 0);  // without the payload the mask is useless

  const auto rnd = other_preimage_game(owf_hash(32, 64), GameAdversary::random_guess,
                                       false, 2000, 57, ExecMode::parallel, 0, 0.05);
  CHECK(rnd.successes == 0);

  CHECK_THROWS_AS(other_preimage_game(owf_hash(8, 16), GameAdversary::brute_other,
                                      false, 10, 1, ExecMode::serial, 0, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(other_preimage_game(nullptr, GameAdversary::echo, false, 10, 1,
                                      ExecMode::serial, 0, 0.05),
                  std::invalid_argument);
}

TEST_CASE("chain report, exact mode") {
  const SchemeConfig sc = toy_scheme(4, 8);
  for (const auto& adv : enumerable_strategies()) {
    CAPTURE(adv.name());
    const ChainReport rep = hybrid_chain_report(sc, adv, DistMode::exact, 3, 59, 0.01);
    CHECK(rep.all_satisfied());
    CHECK(rep.abort.exact);
    CHECK(rep.tv_slack == 0.0);
    CHECK(rep.mode == DistMode::exact);
    CHECK(rep.trials == 3);
    CHECK(rep.seed == 59);
    REQUIRE(rep.inequalities.size() == 3);
    CHECK(rep.inequalities[0].name == "advt_hyb0 <= 2*advt_hyb1");
    CHECK(rep.inequalities[1].name == "|advt_hyb1 - advt_hyb2| <= 4*sqrt(abort)");
    CHECK(rep.inequalities[2].name == "advt_hyb2 == 0");
  }

  // Frozen values for the one-bit retainer: full advantage in the real game,
  // exactly half after the purifying measurement, none at the end.
  const SchemeConfig s1 = toy_scheme(1, 8);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  const ChainReport r1 = hybrid_chain_report(s1, rw, DistMode::exact, 4, 59, 0.01);
  CHECK(r1.all_satisfied());
  CHECK(r1.advt_hyb0 == 1.0);
  CHECK(r1.advt_hyb1 == 0.5);
  CHECK(r1.advt_hyb2 == 0.0);
  CHECK(r1.abort.value == 0.5);
  CHECK(r1.abort.ci.lo == 0.5);
  CHECK(r1.abort.ci.hi == 0.5);

  const ChainReport rh = hybrid_chain_report(s1, AdversaryStrategy::honest(),
                                             DistMode::exact, 4, 59, 0.01);
  CHECK(rh.all_satisfied());
  CHECK(rh.advt_hyb0 == 0.0);
  CHECK(rh.abort.value == 0.0);
  CHECK(rh.advt_hyb0_valid_only == 0.0);

  const SchemeConfig c3 = toy_scheme(3, 4);
  for (int ws : {0, 1}) {
    const auto circ =
        AdversaryStrategy::circuit(circuit_preset("scramble", 3 + ws), ws);
    const ChainReport rc = hybrid_chain_report(c3, circ, DistMode::exact, 2, 59, 0.01);
    CHECK(rc.all_satisfied());
    CHECK(rc.abort.exact);
  }
}

TEST_CASE("chain report, owsg variant") {
  const SchemeConfig os = owsg_scheme(2, 2, 2);
  const ChainReport rep = hybrid_chain_report(os, AdversaryStrategy::honest(),
                                              DistMode::exact, 2, 61, 0.01);
  // States are non-orthogonal, so side identification is noisy and the
  // distances pick up measurement rounding; the chain bounds still hold.
  CHECK(rep.inequalities[0].satisfied);
  CHECK(rep.inequalities[1].satisfied);
  CHECK(rep.advt_hyb2 <= 1e-12);
  CHECK(rep.abort.exact);
}

TEST_CASE("chain report, sampled mode") {
  const SchemeConfig s1 = toy_scheme(1, 8);
  const auto rw = AdversaryStrategy::retainer(AdversaryStrategy::RetainerCert::guess_w);
  const ChainReport rep = hybrid_chain_report(s1, rw, DistMode::empirical, 20000, 63, 0.01);
  CHECK(rep.all_satisfied());
  CHECK_FALSE(rep.abort.exact);
  CHECK(rep.abort.trials == 20000);
  CHECK(rep.tv_slack > 0.0);
  CHECK(rep.advt_hyb0 == Approx(1.0).epsilon(0.05));
  CHECK(rep.advt_hyb1 == Approx(0.5).epsilon(0.1));
  CHECK(rep.abort.value == Approx(0.5).epsilon(0.1));
}

}  // TEST_SUITE
