#include "pvd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace pvd {

// --- adversary strategies ------------------------------------------------------

AdversaryStrategy AdversaryStrategy::honest() { return {}; }

AdversaryStrategy AdversaryStrategy::inverter(int target) {
  AdversaryStrategy a;
  a.kind = Kind::classical_inverter;
  a.invert_target = target;
  return a;
}

AdversaryStrategy AdversaryStrategy::retainer(RetainerCert cert) {
  AdversaryStrategy a;
  a.kind = Kind::hadamard_retainer;
  a.retainer_cert = cert;
  return a;
}

AdversaryStrategy AdversaryStrategy::circuit(std::vector<CircuitGate> gates,
                                             int workspace) {
  AdversaryStrategy a;
  a.kind = Kind::circuit;
  a.gates = std::move(gates);
  a.workspace_qubits = workspace;
  return a;
}

std::string AdversaryStrategy::name() const {
  switch (kind) {
    case Kind::honest_deleter:
      return "honest_deleter";
    case Kind::classical_inverter:
      return "classical_inverter[y" + std::to_string(invert_target) + "]";
    case Kind::hadamard_retainer:
      return retainer_cert == RetainerCert::zero ? "hadamard_retainer[zero]"
                                                 : "hadamard_retainer[guess_w]";
    case Kind::circuit:
      return "circuit[" + std::to_string(gates.size()) + " gates, ws=" +
             std::to_string(workspace_qubits) + "]";
  }
  return "?";
}

std::string AdversaryStrategy::residual_alphabet() const {
  switch (kind) {
    case Kind::honest_deleter:
    case Kind::classical_inverter:
      return "pi";
    case Kind::hadamard_retainer:
      return "w";
    case Kind::circuit:
      return workspace_qubits > 0
                 ? "x+dense" + std::to_string(workspace_qubits)
                 : "x";
  }
  return "?";
}

std::vector<CircuitGate> circuit_preset(const std::string& name, int qubits) {
  if (qubits < 1) throw std::invalid_argument("circuit_preset: no qubits");
  std::vector<CircuitGate> g;
  if (name == "identity") return g;
  if (name == "hadamard_all") {
    for (int q = 0; q < qubits; ++q)
      g.push_back({CircuitGate::Op::h, q, -1, 0.0});
    return g;
  }
  if (name == "scramble") {
    // Fixed rotation angles from the golden ratio; nothing magic, just a
    // pattern with no symmetry to accidentally preserve.
    constexpr double kPhi = 0.6180339887498949;
    auto angle = [](double x) {
      return 2.0 * std::numbers::pi * (x - std::floor(x));
    };
    for (int q = 0; q < qubits; ++q)
      g.push_back({CircuitGate::Op::ry, q, -1, angle(kPhi * (q + 1))});
    for (int q = 0; q + 1 < qubits; ++q)
      g.push_back({CircuitGate::Op::cx, q, q + 1, 0.0});
    for (int q = 0; q < qubits; ++q)
      g.push_back({CircuitGate::Op::rz, q, -1, angle(kPhi * kPhi * (q + 3))});
    for (int q = 0; q + 1 < qubits; ++q)
      g.push_back({CircuitGate::Op::cz, q, q + 1, 0.0});
    return g;
  }
  throw std::invalid_argument("unknown circuit preset '" + name +
                              "' (identity, hadamard_all, scramble)");
}

// --- scheme configuration --------------------------------------------------------

std::size_t SchemeConfig::n() const {
  if (variant == Variant::owf) {
    if (!owf) throw std::invalid_argument("config: owf variant without owf");
    return owf->input_bits();
  }
  if (!owsg) throw std::invalid_argument("config: owsg variant without owsg");
  return owsg->key_bits();
}

void SchemeConfig::validate(const AdversaryStrategy& adv) const {
  const std::size_t nn = n();  // also checks the primitive pointers
  if (t < 1) throw std::invalid_argument("config: t must be >= 1");
  if (adv.kind == AdversaryStrategy::Kind::classical_inverter) {
    if (variant != Variant::owf || !owf->enumerable())
      throw std::invalid_argument(
          "config: classical_inverter needs an enumerable owf");
    if (adv.invert_target != 0 && adv.invert_target != 1)
      throw std::invalid_argument("config: invert_target must be 0 or 1");
  }
  if (adv.kind == AdversaryStrategy::Kind::circuit) {
    if (adv.workspace_qubits < 0)
      throw std::invalid_argument("config: negative workspace");
    const int total = static_cast<int>(nn) + adv.workspace_qubits;
    if (total + 1 > kDenseCap)
      throw std::invalid_argument(
          "config: circuit register exceeds the dense cap");
    for (const CircuitGate& gate : adv.gates) {
      const bool two = gate.op == CircuitGate::Op::cx ||
                       gate.op == CircuitGate::Op::cz;
      if (gate.q < 0 || gate.q >= total || (two && (gate.q2 < 0 || gate.q2 >= total)))
        throw std::invalid_argument("config: circuit gate off the register");
    }
  }
  if (variant == Variant::owsg && adv.kind != AdversaryStrategy::Kind::circuit &&
      static_cast<std::size_t>(owsg->state_qubits()) > kDenseCap)
    throw std::invalid_argument("config: owsg register exceeds the dense cap");
}

// --- per-trial instance ------------------------------------------------------------

namespace {

struct Instance {
  BitString x0, x1;
  BitString y0, y1;  // owf variant
  std::optional<DenseState> phi0, phi1;  // owsg variant
  WrappedInstance wrapped;
};

Instance make_instance(const SchemeConfig& sc, int b, bool evpke_keys,
                       SplitRng& rng) {
  SemanticWrapper sw;
  PkeKeyPair kp;
  if (evpke_keys || sc.wrapper == WrapperKind::pke) {
    if (!sc.pke) throw std::invalid_argument("config: pke required");
    kp = sc.pke->keygen(rng);
    sw = SemanticWrapper::with_pke(*sc.pke, kp.pk);
  } else if (sc.wrapper == WrapperKind::transparent) {
    sw = SemanticWrapper::transparent();
  } else {
    sw = SemanticWrapper::committing();
  }

  const std::size_t n = sc.n();
  auto [x0, x1] = sample_branch_pair(n, rng);
  const BitString shown = sc.zero_z ? BitString::zeros(n) : x0 ^ x1;
  BitString y0, y1;
  std::optional<DenseState> phi0, phi1;
  Bytes aux0, aux1;
  if (sc.variant == SchemeConfig::Variant::owf) {
    y0 = sc.owf->eval(x0);
    y1 = sc.owf->eval(x1);
    ByteWriter w0, w1;
    w0.bits(y0);
    w1.bits(y1);
    aux0 = w0.take();
    aux1 = w1.take();
  } else {
    phi0 = sc.owsg->stategen(x0);
    phi1 = sc.owsg->stategen(x1);
  }
  WrappedInstance wrapped =
      wrap(sw, shown, aux0, aux1, TwoBranchState(x0, x1, b), rng);
  return Instance{std::move(x0),   std::move(x1),   std::move(y0),
                  std::move(y1),   std::move(phi0), std::move(phi1),
                  std::move(wrapped)};
}

// Certificate verification, branch form: (probability, side index) with
// nullopt marking rejection. The owf check is deterministic (probability 1,
// side or nullopt); the owsg check tests side 0 then side 1 projectively.
using VerifyBranch = std::pair<double, std::optional<int>>;

std::vector<VerifyBranch> verify_branches(const SchemeConfig& sc,
                                          const Instance& inst,
                                          const BitString& cert) {
  if (sc.variant == SchemeConfig::Variant::owf) {
    const BitString y = sc.owf->eval(cert);
    if (y == inst.y0) return {{1.0, 0}};
    if (y == inst.y1) return {{1.0, 1}};
    return {{1.0, std::nullopt}};
  }
  const double f0 = sc.owsg->accept_probability(cert, *inst.phi0);
  const double f1 = sc.owsg->accept_probability(cert, *inst.phi1);
  std::vector<VerifyBranch> out;
  if (f0 > 0.0) out.push_back({f0, 0});
  if ((1.0 - f0) * f1 > 0.0) out.push_back({(1.0 - f0) * f1, 1});
  if ((1.0 - f0) * (1.0 - f1) > 0.0)
    out.push_back({(1.0 - f0) * (1.0 - f1), std::nullopt});
  return out;
}

std::optional<int> sample_verify(const SchemeConfig& sc, const Instance& inst,
                                 const BitString& cert, SplitRng& rng) {
  if (sc.variant == SchemeConfig::Variant::owf) {
    const BitString y = sc.owf->eval(cert);
    if (y == inst.y0) return 0;
    if (y == inst.y1) return 1;
    return std::nullopt;
  }
  if (rng.uniform() < sc.owsg->accept_probability(cert, *inst.phi0)) return 0;
  if (rng.uniform() < sc.owsg->accept_probability(cert, *inst.phi1)) return 1;
  return std::nullopt;
}

BitString inverter_cert(const SchemeConfig& sc, const Instance& inst, int target) {
  const BitString& y = target == 0 ? inst.y0 : inst.y1;
  return sc.owf->preimages(y).front();  // nonempty: y is an image
}

BitString retainer_cert_value(const AdversaryStrategy& adv, std::size_t n,
                              const BitString& w) {
  return adv.retainer_cert == AdversaryStrategy::RetainerCert::zero
             ? BitString::zeros(n)
             : w;
}

std::string key_pi(const BitString& v) { return "pi=" + v.str(); }
std::string key_w(const BitString& v) { return "w=" + v.str(); }
std::string key_x(const BitString& v) { return "x=" + v.str(); }

// --- enumerable adversary branches ---------------------------------------------------

struct PlainBranch {
  double prob;
  BitString cert;
  std::string key;
};

std::vector<PlainBranch> plain_branches(const AdversaryStrategy& adv,
                                        const SchemeConfig& sc,
                                        const Instance& inst,
                                        const TwoBranchState& state) {
  std::vector<PlainBranch> out;
  switch (adv.kind) {
    case AdversaryStrategy::Kind::honest_deleter:
      for (const auto& [p, x] : computational_branches(state))
        out.push_back({p, x, key_pi(x)});
      break;
    case AdversaryStrategy::Kind::classical_inverter: {
      const BitString cert = inverter_cert(sc, inst, adv.invert_target);
      out.push_back({1.0, cert, key_pi(cert)});
      break;
    }
    case AdversaryStrategy::Kind::hadamard_retainer:
      for (const auto& [p, w] : hadamard_branches(state))
        out.push_back({p, retainer_cert_value(adv, state.n(), w), key_w(w)});
      break;
    case AdversaryStrategy::Kind::circuit:
      throw std::logic_error("plain_branches: circuit is not enumerable");
  }
  return out;
}

std::pair<BitString, std::string> plain_sample(const AdversaryStrategy& adv,
                                               const SchemeConfig& sc,
                                               const Instance& inst,
                                               const TwoBranchState& state,
                                               SplitRng& rng) {
  switch (adv.kind) {
    case AdversaryStrategy::Kind::honest_deleter: {
      const BitString x = computational_measure(state, rng);
      return {x, key_pi(x)};
    }
    case AdversaryStrategy::Kind::classical_inverter: {
      const BitString cert = inverter_cert(sc, inst, adv.invert_target);
      return {cert, key_pi(cert)};
    }
    case AdversaryStrategy::Kind::hadamard_retainer: {
      const BitString w = hadamard_measure(state, rng);
      return {retainer_cert_value(adv, state.n(), w), key_w(w)};
    }
    case AdversaryStrategy::Kind::circuit:
      break;
  }
  throw std::logic_error("plain_sample: circuit handled elsewhere");
}

struct JointBranch {
  double prob;
  BitString cert;
  std::string key;
  PurifiedJointState post;
};

std::vector<JointBranch> joint_branches(const AdversaryStrategy& adv,
                                        const SchemeConfig& sc,
                                        const Instance& inst,
                                        const PurifiedJointState& joint) {
  std::vector<JointBranch> out;
  switch (adv.kind) {
    case AdversaryStrategy::Kind::honest_deleter:
      for (auto& br : joint.a_branches(Basis::computational))
        out.push_back({br.prob, br.outcome, key_pi(br.outcome), br.post});
      break;
    case AdversaryStrategy::Kind::classical_inverter: {
      const BitString cert = inverter_cert(sc, inst, adv.invert_target);
      out.push_back({1.0, cert, key_pi(cert), joint});
      break;
    }
    case AdversaryStrategy::Kind::hadamard_retainer:
      for (auto& br : joint.a_branches(Basis::hadamard))
        out.push_back({br.prob, retainer_cert_value(adv, joint.n(), br.outcome),
                       key_w(br.outcome), br.post});
      break;
    case AdversaryStrategy::Kind::circuit:
      throw std::logic_error("joint_branches: circuit is not enumerable");
  }
  return out;
}

JointBranch joint_sample(const AdversaryStrategy& adv, const SchemeConfig& sc,
                         const Instance& inst, const PurifiedJointState& joint,
                         SplitRng& rng) {
  switch (adv.kind) {
    case AdversaryStrategy::Kind::honest_deleter: {
      auto [x, post] = joint.a_measure(Basis::computational, rng);
      return {1.0, x, key_pi(x), std::move(post)};
    }
    case AdversaryStrategy::Kind::classical_inverter: {
      const BitString cert = inverter_cert(sc, inst, adv.invert_target);
      return {1.0, cert, key_pi(cert), joint};
    }
    case AdversaryStrategy::Kind::hadamard_retainer: {
      auto [w, post] = joint.a_measure(Basis::hadamard, rng);
      return {1.0, retainer_cert_value(adv, joint.n(), w), key_w(w),
              std::move(post)};
    }
    case AdversaryStrategy::Kind::circuit:
      break;
  }
  throw std::logic_error("joint_sample: circuit handled elsewhere");
}

// --- dense circuit engine --------------------------------------------------------------

void apply_gates(DenseState& s, const std::vector<CircuitGate>& gates,
                 int offset) {
  for (const CircuitGate& g : gates) {
    const int q = g.q + offset, q2 = g.q2 + offset;
    switch (g.op) {
      case CircuitGate::Op::h: s.apply_h(q); break;
      case CircuitGate::Op::x: s.apply_x(q); break;
      case CircuitGate::Op::y: s.apply_y(q); break;
      case CircuitGate::Op::z: s.apply_z(q); break;
      case CircuitGate::Op::s: s.apply_s(q); break;
      case CircuitGate::Op::t: s.apply_t(q); break;
      case CircuitGate::Op::cx: s.apply_cx(q, q2); break;
      case CircuitGate::Op::cz: s.apply_cz(q, q2); break;
      case CircuitGate::Op::ry: s.apply_ry(q, g.angle); break;
      case CircuitGate::Op::rz: s.apply_rz(q, g.angle); break;
    }
  }
}

// [A | W] register holding the plain two-branch state.
DenseState circuit_initial_plain(const Instance& inst, int b, int ws) {
  const int n = static_cast<int>(inst.x0.size());
  Vec a = Vec::Zero(Eigen::Index{1} << (n + ws));
  const double r = std::numbers::sqrt2 / 2.0;
  a(static_cast<Eigen::Index>(inst.x0.index() << ws)) = r;
  a(static_cast<Eigen::Index>(inst.x1.index() << ws)) = b ? -r : r;
  return DenseState::from_amplitudes(std::move(a));
}

// [C | A | W] register holding the purified state.
DenseState circuit_initial_joint(const Instance& inst, int ws) {
  const int n = static_cast<int>(inst.x0.size());
  Vec a = Vec::Zero(Eigen::Index{1} << (1 + n + ws));
  const std::uint64_t ix[2] = {inst.x0.index(), inst.x1.index()};
  for (std::uint64_t c = 0; c < 2; ++c)
    for (int j = 0; j < 2; ++j)
      a(static_cast<Eigen::Index>(((c << n) | ix[j]) << ws)) =
          (c == 1 && j == 1) ? -0.5 : 0.5;
  return DenseState::from_amplitudes(std::move(a));
}

// Residual state on W after all other registers have been measured off.
DenseState circuit_residual(const DenseState& collapsed, int measured_qubits,
                            std::uint64_t outcome) {
  return collapsed.factor_out(0, measured_qubits, outcome);
}

}  // namespace

// --- exact runners --------------------------------------------------------------------

namespace {

enum class Flow { evpke, hyb0, hyb1, hyb2, hyb2c };

bool purified(Flow f) {
  return f == Flow::hyb1 || f == Flow::hyb2 || f == Flow::hyb2c;
}

// One exact draw for the enumerable strategies; adds per-draw masses
// (summing to 1) into dist.
void exact_draw_enumerable(Flow flow, int b, const SchemeConfig& sc,
                           const AdversaryStrategy& adv, const Instance& inst,
                           OutcomeDistribution& dist) {
  if (!purified(flow)) {
    const TwoBranchState& state = inst.wrapped.quantum;
    for (const PlainBranch& br : plain_branches(adv, sc, inst, state)) {
      double valid = 0.0;
      for (const VerifyBranch& vb : verify_branches(sc, inst, br.cert))
        if (vb.second) valid += vb.first;
      valid = std::min(valid, 1.0);  // float sum of sub-check probabilities
      dist.add(br.key, br.prob * valid);
      dist.add(kBottom, br.prob * (1.0 - valid));
    }
    return;
  }

  const PurifiedJointState joint = purify(inst.x0, inst.x1);

  if (flow == Flow::hyb2c) {
    // C measured in the Hadamard basis up front; the adversary then runs on
    // the collapsed branch.
    const auto hp = joint.c_probs(Basis::hadamard);
    for (int h = 0; h < 2; ++h) {
      if (hp[h] <= 0.0) continue;
      const PurifiedJointState joint_h = joint.c_collapse(Basis::hadamard, h);
      for (const JointBranch& br : joint_branches(adv, sc, inst, joint_h)) {
        const double base = hp[h] * br.prob;
        for (const VerifyBranch& vb : verify_branches(sc, inst, br.cert)) {
          if (!vb.second || *vb.second != h) {
            dist.add(kBottom, base * vb.first);
            continue;
          }
          const auto cp = br.post.c_probs(Basis::computational);
          dist.add(br.key, base * vb.first * cp[b]);
          dist.add(kBottom, base * vb.first * cp[1 - b]);
        }
      }
    }
    return;
  }

  for (const JointBranch& br : joint_branches(adv, sc, inst, joint)) {
    for (const VerifyBranch& vb : verify_branches(sc, inst, br.cert)) {
      const double base = br.prob * vb.first;
      if (!vb.second) {
        dist.add(kBottom, base);
        continue;
      }
      if (flow == Flow::hyb1) {
        const auto cp = br.post.c_probs(Basis::computational);
        dist.add(br.key, base * cp[b]);
        dist.add(kBottom, base * cp[1 - b]);
        continue;
      }
      // hyb2: Hadamard abort on 1 - c', then the computational b-abort.
      const int cprime = *vb.second;
      const auto hp = br.post.c_probs(Basis::hadamard);
      dist.add(kBottom, base * hp[1 - cprime]);
      if (hp[cprime] <= 0.0) continue;
      const PurifiedJointState kept = br.post.c_collapse(Basis::hadamard, cprime);
      const auto cp = kept.c_probs(Basis::computational);
      dist.add(br.key, base * hp[cprime] * cp[b]);
      dist.add(kBottom, base * hp[cprime] * cp[1 - b]);
    }
  }
}

void exact_draw_circuit(Flow flow, int b, const SchemeConfig& sc,
                        const AdversaryStrategy& adv, const Instance& inst,
                        OutcomeDistribution& dist) {
  const int n = static_cast<int>(sc.n());
  const int ws = adv.workspace_qubits;

  auto emit = [&](const std::string& key, double mass, const DenseState* w) {
    if (mass <= 0.0) return;
    if (w)
      dist.add_block(key, mass, mass * w->density());
    else
      dist.add(key, mass);
  };

  if (!purified(flow)) {
    DenseState s = circuit_initial_plain(inst, b, ws);
    apply_gates(s, adv.gates, 0);
    const auto probs = s.range_probs(0, n);
    for (std::uint64_t xi = 0; xi < probs.size(); ++xi) {
      if (probs[xi] <= 0.0) continue;
      const BitString cert = BitString::from_index(xi, n);
      double valid = 0.0;
      for (const VerifyBranch& vb : verify_branches(sc, inst, cert))
        if (vb.second) valid += vb.first;
      valid = std::min(valid, 1.0);
      std::optional<DenseState> resid;
      if (ws > 0 && valid > 0.0) {
        DenseState c = s;
        c.collapse_range(0, n, xi);
        resid = circuit_residual(c, n, xi);
      }
      emit(key_x(cert), probs[xi] * valid, resid ? &*resid : nullptr);
      dist.add(kBottom, probs[xi] * (1.0 - valid));
    }
    return;
  }

  DenseState s0 = circuit_initial_joint(inst, ws);

  if (flow == Flow::hyb2c) {
    s0.apply_h(0);
    for (std::uint64_t h = 0; h < 2; ++h) {
      const double ph = s0.prob_of(0, 1, h);
      if (ph <= 0.0) continue;
      DenseState sh = s0;
      sh.collapse_range(0, 1, h);
      sh.apply_h(0);
      apply_gates(sh, adv.gates, 1);
      const auto probs = sh.range_probs(1, n);
      for (std::uint64_t xi = 0; xi < probs.size(); ++xi) {
        if (probs[xi] <= 0.0) continue;
        const BitString cert = BitString::from_index(xi, n);
        DenseState sx = sh;
        sx.collapse_range(1, n, xi);
        for (const VerifyBranch& vb : verify_branches(sc, inst, cert)) {
          const double base = ph * probs[xi] * vb.first;
          if (!vb.second || static_cast<std::uint64_t>(*vb.second) != h) {
            dist.add(kBottom, base);
            continue;
          }
          for (std::uint64_t c = 0; c < 2; ++c) {
            const double pc = sx.prob_of(0, 1, c);
            if (pc <= 0.0) continue;
            if (static_cast<int>(c) != b) {
              dist.add(kBottom, base * pc);
              continue;
            }
            std::optional<DenseState> resid;
            if (ws > 0) {
              DenseState sc2 = sx;
              sc2.collapse_range(0, 1, c);
              resid = circuit_residual(sc2, 1 + n, (c << n) | xi);
            }
            emit(key_x(cert), base * pc, resid ? &*resid : nullptr);
          }
        }
      }
    }
    return;
  }

  apply_gates(s0, adv.gates, 1);
  const auto probs = s0.range_probs(1, n);
  for (std::uint64_t xi = 0; xi < probs.size(); ++xi) {
    if (probs[xi] <= 0.0) continue;
    const BitString cert = BitString::from_index(xi, n);
    DenseState sx = s0;
    sx.collapse_range(1, n, xi);
    for (const VerifyBranch& vb : verify_branches(sc, inst, cert)) {
      const double base = probs[xi] * vb.first;
      if (!vb.second) {
        dist.add(kBottom, base);
        continue;
      }
      DenseState sv = sx;
      if (flow == Flow::hyb2) {
        const int cprime = *vb.second;
        sv.apply_h(0);
        const double pa = sv.prob_of(0, 1, std::uint64_t(1 - cprime));
        dist.add(kBottom, base * pa);
        const double pk = sv.prob_of(0, 1, std::uint64_t(cprime));
        if (pk <= 0.0) continue;
        sv.collapse_range(0, 1, std::uint64_t(cprime));
        sv.apply_h(0);
        for (std::uint64_t c = 0; c < 2; ++c) {
          const double pc = sv.prob_of(0, 1, c);
          if (pc <= 0.0) continue;
          if (static_cast<int>(c) != b) {
            dist.add(kBottom, base * pk * pc);
            continue;
          }
          std::optional<DenseState> resid;
          if (ws > 0) {
            DenseState sc2 = sv;
            sc2.collapse_range(0, 1, c);
            resid = circuit_residual(sc2, 1 + n, (c << n) | xi);
          }
          emit(key_x(cert), base * pk * pc, resid ? &*resid : nullptr);
        }
        continue;
      }
      // hyb1
      for (std::uint64_t c = 0; c < 2; ++c) {
        const double pc = sv.prob_of(0, 1, c);
        if (pc <= 0.0) continue;
        if (static_cast<int>(c) != b) {
          dist.add(kBottom, base * pc);
          continue;
        }
        std::optional<DenseState> resid;
        if (ws > 0) {
          DenseState sc2 = sv;
          sc2.collapse_range(0, 1, c);
          resid = circuit_residual(sc2, 1 + n, (c << n) | xi);
        }
        emit(key_x(cert), base * pc, resid ? &*resid : nullptr);
      }
    }
  }
}

// --- sampled runners ---------------------------------------------------------------

std::string sample_draw_enumerable(Flow flow, int b, const SchemeConfig& sc,
                                   const AdversaryStrategy& adv,
                                   const Instance& inst, SplitRng& rng) {
  if (!purified(flow)) {
    auto [cert, key] = plain_sample(adv, sc, inst, inst.wrapped.quantum, rng);
    return sample_verify(sc, inst, cert, rng) ? key : kBottom;
  }
  PurifiedJointState joint = purify(inst.x0, inst.x1);
  std::optional<int> h_pre;
  if (flow == Flow::hyb2c) {
    auto [h, collapsed] = joint.c_measure(Basis::hadamard, rng);
    h_pre = h;
    joint = std::move(collapsed);
  }
  JointBranch br = joint_sample(adv, sc, inst, joint, rng);
  const std::optional<int> side = sample_verify(sc, inst, br.cert, rng);
  if (!side) return kBottom;
  PurifiedJointState post = br.post;
  if (flow == Flow::hyb2c) {
    if (*side != *h_pre) return kBottom;
  } else if (flow == Flow::hyb2) {
    auto [h, kept] = post.c_measure(Basis::hadamard, rng);
    if (h != *side) return kBottom;  // Hadamard abort on 1 - c'
    post = std::move(kept);
  }
  const auto [c, final_state] = post.c_measure(Basis::computational, rng);
  (void)final_state;
  return c == b ? br.key : kBottom;
}

std::string sample_draw_circuit(Flow flow, int b, const SchemeConfig& sc,
                                const AdversaryStrategy& adv,
                                const Instance& inst, SplitRng& rng) {
  const int n = static_cast<int>(sc.n());
  const int ws = adv.workspace_qubits;
  if (!purified(flow)) {
    DenseState s = circuit_initial_plain(inst, b, ws);
    apply_gates(s, adv.gates, 0);
    const BitString cert = BitString::from_index(s.measure_range(0, n, rng), n);
    return sample_verify(sc, inst, cert, rng) ? key_x(cert) : kBottom;
  }
  DenseState s = circuit_initial_joint(inst, ws);
  std::optional<int> h_pre;
  if (flow == Flow::hyb2c) {
    h_pre = s.measure_hadamard(0, rng);
  }
  apply_gates(s, adv.gates, 1);
  const BitString cert = BitString::from_index(s.measure_range(1, n, rng), n);
  const std::optional<int> side = sample_verify(sc, inst, cert, rng);
  if (!side) return kBottom;
  if (flow == Flow::hyb2c) {
    if (*side != *h_pre) return kBottom;
  } else if (flow == Flow::hyb2) {
    if (s.measure_hadamard(0, rng) != *side) return kBottom;
  }
  const auto c = s.measure_range(0, 1, rng);
  return static_cast<int>(c) == b ? key_x(cert) : kBottom;
}

OutcomeDistribution run_flow(Flow flow, int b, const SchemeConfig& sc,
                             const AdversaryStrategy& adv, DistMode mode,
                             std::uint64_t trials, std::uint64_t seed) {
  if (b != 0 && b != 1) throw std::invalid_argument("run: b must be 0 or 1");
  if (trials == 0) throw std::invalid_argument("run: zero trials");
  sc.validate(adv);
  const bool evpke_keys = flow == Flow::evpke;
  const bool circuit = adv.kind == AdversaryStrategy::Kind::circuit;

  if (mode == DistMode::exact) {
    // Exact accumulation is kept serial: branch masses are floating sums and
    // the accumulation order must not depend on the thread count.
    OutcomeDistribution dist =
        OutcomeDistribution::exact(adv.residual_alphabet());
    const SplitRng base(seed);
    for (std::uint64_t i = 0; i < trials; ++i) {
      SplitRng rng = base.fork(i);
      const Instance inst = make_instance(sc, b, evpke_keys, rng);
      if (circuit)
        exact_draw_circuit(flow, b, sc, adv, inst, dist);
      else
        exact_draw_enumerable(flow, b, sc, adv, inst, dist);
    }
    dist.set_total(static_cast<double>(trials));
    dist.check();
    return dist;
  }

  const TrialTally tally = tally_trials(
      trials, SplitRng(seed), sc.exec, sc.threads,
      [&](std::uint64_t, SplitRng& rng) {
        const Instance inst = make_instance(sc, b, evpke_keys, rng);
        return circuit ? sample_draw_circuit(flow, b, sc, adv, inst, rng)
                       : sample_draw_enumerable(flow, b, sc, adv, inst, rng);
      });
  OutcomeDistribution dist =
      OutcomeDistribution::empirical(adv.residual_alphabet());
  for (const auto& [key, count] : tally.counts)
    dist.add(key, static_cast<double>(count));
  dist.set_total(static_cast<double>(trials));
  dist.check();
  return dist;
}

}  // namespace

OutcomeDistribution run_evpke(int b, const SchemeConfig& sc,
                              const AdversaryStrategy& adv, DistMode mode,
                              std::uint64_t trials, std::uint64_t seed) {
  return run_flow(Flow::evpke, b, sc, adv, mode, trials, seed);
}

OutcomeDistribution run_hyb(int index, int b, const SchemeConfig& sc,
                            const AdversaryStrategy& adv, DistMode mode,
                            std::uint64_t trials, std::uint64_t seed) {
  switch (index) {
    case 0: return run_flow(Flow::hyb0, b, sc, adv, mode, trials, seed);
    case 1: return run_flow(Flow::hyb1, b, sc, adv, mode, trials, seed);
    case 2: return run_flow(Flow::hyb2, b, sc, adv, mode, trials, seed);
    default: throw std::invalid_argument("run_hyb: index must be 0, 1 or 2");
  }
}

OutcomeDistribution run_hyb2_commuted(int b, const SchemeConfig& sc,
                                      const AdversaryStrategy& adv,
                                      DistMode mode, std::uint64_t trials,
                                      std::uint64_t seed) {
  return run_flow(Flow::hyb2c, b, sc, adv, mode, trials, seed);
}

// --- abort probability ------------------------------------------------------------

namespace {

// One sampled Hyb2 pass; true iff the Hadamard measurement of C lands on
// 1 - c'. Trials rejected at the image check never reach that measurement.
bool sample_abort_event(const SchemeConfig& sc, const AdversaryStrategy& adv,
                        SplitRng& rng) {
  const Instance inst = make_instance(sc, /*b=*/0, /*evpke_keys=*/false, rng);
  if (adv.kind == AdversaryStrategy::Kind::circuit) {
    DenseState s = circuit_initial_joint(inst, adv.workspace_qubits);
    apply_gates(s, adv.gates, 1);
    const int n = static_cast<int>(sc.n());
    const BitString cert = BitString::from_index(s.measure_range(1, n, rng), n);
    const std::optional<int> side = sample_verify(sc, inst, cert, rng);
    if (!side) return false;
    return s.measure_hadamard(0, rng) != *side;
  }
  const PurifiedJointState joint = purify(inst.x0, inst.x1);
  const JointBranch br = joint_sample(adv, sc, inst, joint, rng);
  const std::optional<int> side = sample_verify(sc, inst, br.cert, rng);
  if (!side) return false;
  auto [h, kept] = br.post.c_measure(Basis::hadamard, rng);
  (void)kept;
  return h != *side;
}

// Exact Hadamard-abort mass, averaged over `trials` classical draws.
double exact_abort_mass(const SchemeConfig& sc, const AdversaryStrategy& adv,
                        std::uint64_t trials, std::uint64_t seed) {
  double total = 0.0;
  const SplitRng base(seed);
  for (std::uint64_t i = 0; i < trials; ++i) {
    SplitRng rng = base.fork(i);
    const Instance inst = make_instance(sc, 0, false, rng);
    if (adv.kind == AdversaryStrategy::Kind::circuit) {
      DenseState s0 = circuit_initial_joint(inst, adv.workspace_qubits);
      apply_gates(s0, adv.gates, 1);
      const int n = static_cast<int>(sc.n());
      const auto probs = s0.range_probs(1, n);
      for (std::uint64_t xi = 0; xi < probs.size(); ++xi) {
        if (probs[xi] <= 0.0) continue;
        const BitString cert = BitString::from_index(xi, n);
        DenseState sx = s0;
        sx.collapse_range(1, n, xi);
        sx.apply_h(0);
        for (const VerifyBranch& vb : verify_branches(sc, inst, cert))
          if (vb.second)
            total += probs[xi] * vb.first *
                     sx.prob_of(0, 1, std::uint64_t(1 - *vb.second));
      }
      continue;
    }
    const PurifiedJointState joint = purify(inst.x0, inst.x1);
    for (const JointBranch& br : joint_branches(adv, sc, inst, joint)) {
      const auto hp = br.post.c_probs(Basis::hadamard);
      for (const VerifyBranch& vb : verify_branches(sc, inst, br.cert))
        if (vb.second) total += br.prob * vb.first * hp[1 - *vb.second];
    }
  }
  return total / static_cast<double>(trials);
}

}  // namespace

ProbabilityEstimate abort_probability(const SchemeConfig& sc,
                                      const AdversaryStrategy& adv,
                                      std::uint64_t trials, std::uint64_t seed,
                                      double alpha) {
  sc.validate(adv);
  if (trials == 0) throw std::invalid_argument("abort_probability: zero trials");
  const std::uint64_t hits = count_successes(
      trials, SplitRng(seed), sc.exec, sc.threads,
      [&](std::uint64_t, SplitRng& rng) { return sample_abort_event(sc, adv, rng); });
  ProbabilityEstimate out;
  out.value = static_cast<double>(hits) / static_cast<double>(trials);
  out.exact = false;
  out.successes = hits;
  out.trials = trials;
  out.ci = wilson_interval(hits, trials, alpha);
  return out;
}

// --- other-preimage game -----------------------------------------------------------

GameResult other_preimage_game(const OwfPtr& owf, GameAdversary adv,
                               bool give_real_z, std::uint64_t trials,
                               std::uint64_t seed, ExecMode exec, int threads,
                               double alpha) {
  if (!owf) throw std::invalid_argument("game: null owf");
  if (adv == GameAdversary::brute_other && !owf->enumerable())
    throw std::invalid_argument("game: brute_other needs an enumerable owf");
  const std::size_t n = owf->input_bits();

  const std::uint64_t hits = count_successes(
      trials, SplitRng(seed), exec, threads,
      [&](std::uint64_t, SplitRng& rng) {
        const auto [x0, x1] = sample_branch_pair(n, rng);
        const int side = rng.bit();
        const BitString& given = side == 0 ? x0 : x1;
        const BitString z =
            give_real_z ? (x0 ^ x1) : BitString::zeros(n);
        const BitString y0 = owf->eval(x0), y1 = owf->eval(x1);
        BitString out;
        switch (adv) {
          case GameAdversary::echo:
            out = given;
            break;
          case GameAdversary::brute_other: {
            const int t = owf->eval(given) == y0 ? 0 : 1;
            out = owf->preimages(t == 0 ? y1 : y0).front();
            break;
          }
          case GameAdversary::random_guess:
            out = rng.bits(n);
            break;
          case GameAdversary::xor_z:
            out = given ^ z;
            break;
        }
        return owf->eval(out) == (side == 0 ? y1 : y0);
      });

  GameResult out;
  out.successes = hits;
  out.trials = trials;
  out.frequency = static_cast<double>(hits) / static_cast<double>(trials);
  out.ci = wilson_interval(hits, trials, alpha);
  return out;
}

// --- chain report --------------------------------------------------------------------

bool ChainReport::all_satisfied() const {
  for (const InequalityCheck& c : inequalities)
    if (!c.satisfied) return false;
  return true;
}

ChainReport hybrid_chain_report(const SchemeConfig& sc,
                                const AdversaryStrategy& adv, DistMode mode,
                                std::uint64_t trials, std::uint64_t seed,
                                double alpha) {
  ChainReport rep;
  rep.mode = mode;
  rep.trials = trials;
  rep.seed = seed;
  rep.alpha = alpha;

  OutcomeDistribution h0[2] = {run_hyb(0, 0, sc, adv, mode, trials, seed),
                               run_hyb(0, 1, sc, adv, mode, trials, seed)};
  OutcomeDistribution h1[2] = {run_hyb(1, 0, sc, adv, mode, trials, seed),
                               run_hyb(1, 1, sc, adv, mode, trials, seed)};
  OutcomeDistribution h2[2] = {run_hyb(2, 0, sc, adv, mode, trials, seed),
                               run_hyb(2, 1, sc, adv, mode, trials, seed)};

  rep.advt_hyb0 = tv_distance(h0[0], h0[1]);
  rep.advt_hyb1 = tv_distance(h1[0], h1[1]);
  rep.advt_hyb2 = tv_distance(h2[0], h2[1]);
  rep.advt_hyb0_valid_only = conditional_valid_tv(h0[0], h0[1]);
  rep.tv_slack = tv_ci_bound(h0[0], h0[1], alpha);

  if (mode == DistMode::exact) {
    const double mass = exact_abort_mass(sc, adv, trials, seed);
    rep.abort.value = mass;
    rep.abort.exact = true;
    rep.abort.ci = {mass, mass};
  } else {
    rep.abort = abort_probability(sc, adv, trials, seed, alpha);
  }

  const double eps = mode == DistMode::exact ? 1e-12 : rep.tv_slack;
  const double delta_hi = rep.abort.exact ? rep.abort.value : rep.abort.ci.hi;

  rep.inequalities.push_back(
      {"advt_hyb0 <= 2*advt_hyb1", rep.advt_hyb0, 2.0 * rep.advt_hyb1,
       rep.advt_hyb0 <= 2.0 * rep.advt_hyb1 + 3.0 * eps});
  const double gap = std::abs(rep.advt_hyb1 - rep.advt_hyb2);
  rep.inequalities.push_back(
      {"|advt_hyb1 - advt_hyb2| <= 4*sqrt(abort)", gap,
       4.0 * std::sqrt(delta_hi), gap <= 4.0 * std::sqrt(delta_hi) + 2.0 * eps});
  rep.inequalities.push_back(
      {"advt_hyb2 == 0", rep.advt_hyb2, 0.0,
       mode == DistMode::exact ? rep.advt_hyb2 == 0.0 : rep.advt_hyb2 <= eps});
  return rep;
}

}  // namespace pvd
