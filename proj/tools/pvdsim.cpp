#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pvd/compiler.hpp"
#include "pvd/config.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pvd::ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// RunConfig flags shared by the demo and experiment subcommands. Flags
// override config-file values field by field; untouched fields keep the
// file's (or the default) value.
struct ConfigFlags {
  std::string config_path;
  pvd::RunConfig v;
  std::vector<std::pair<CLI::Option*,
                        std::function<void(pvd::RunConfig&, const pvd::RunConfig&)>>>
      overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    auto opt = [&](const char* flag, auto member, const char* help) {
      CLI::Option* o = app->add_option(flag, v.*member, help);
      overrides.emplace_back(
          o, [member](pvd::RunConfig& dst, const pvd::RunConfig& src) {
            dst.*member = src.*member;
          });
    };
    opt("--scheme", &pvd::RunConfig::scheme, "owf | owsg");
    opt("--n", &pvd::RunConfig::n, "branch bits");
    opt("--m", &pvd::RunConfig::m, "owf output bits / owsg qubits");
    opt("--owf", &pvd::RunConfig::owf, "hash | toy");
    opt("--toy-seed", &pvd::RunConfig::toy_seed, "toy primitive family seed");
    opt("--pke", &pvd::RunConfig::pke, "group | transparent");
    opt("--group", &pvd::RunConfig::group, "tiny64 | small256 | modp2048");
    opt("--adversary", &pvd::RunConfig::adversary,
        "honest | inverter | retainer | circuit (games: echo | brute | random | xor_z)");
    opt("--invert-target", &pvd::RunConfig::invert_target, "inverter image index");
    opt("--retainer-cert", &pvd::RunConfig::retainer_cert, "zero | guess_w");
    opt("--circuit", &pvd::RunConfig::circuit,
        "identity | hadamard_all | scramble");
    opt("--workspace", &pvd::RunConfig::workspace, "circuit workspace qubits");
    opt("--trials", &pvd::RunConfig::trials, "trial count");
    opt("--seed", &pvd::RunConfig::seed, "experiment seed");
    opt("--mode", &pvd::RunConfig::mode, "exact | empirical");
    opt("--t", &pvd::RunConfig::t, "owsg verification copies");
    opt("--exec", &pvd::RunConfig::exec, "serial | parallel");
    opt("--threads", &pvd::RunConfig::threads, "worker threads (0: default)");
    opt("--alpha", &pvd::RunConfig::alpha, "CI confidence parameter");
    CLI::Option* zflag = app->add_flag(
        "--give-real-z", v.give_real_z,
        "other-preimage game: hand the adversary the real z");
    overrides.emplace_back(
        zflag, [](pvd::RunConfig& dst, const pvd::RunConfig& src) {
          dst.give_real_z = src.give_real_z;
        });
  }

  pvd::RunConfig resolve() const {
    pvd::RunConfig rc;
    if (!config_path.empty())
      rc = pvd::RunConfig::from_json_text(read_file(config_path));
    for (const auto& [o, apply] : overrides)
      if (o->count() > 0) apply(rc, v);
    rc.validate();
    return rc;
  }
};

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void write_report(const ordered_json& rep, const std::string& out_path) {
  const std::string text = pvd::report_dump(rep);
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pvd::ConfigError("cannot write report to '" + out_path + "'");
  out << text;
}

// --- demo -------------------------------------------------------------------

int cmd_demo(const pvd::RunConfig& rc, int b) {
  if (b != 0 && b != 1) throw pvd::ConfigError("demo: --b must be 0 or 1");
  const pvd::SchemeConfig sc = pvd::build_scheme(rc);
  pvd::SplitRng rng(rc.seed);

  std::cout << "scheme   " << rc.scheme << " (n=" << rc.n << ", m=" << rc.m
            << ")\npke      " << sc.pke->name() << "\nseed     " << rc.seed
            << "\nbit      " << b << "\n";

  const pvd::PvdKeyPair kp = pvd::pv_gen(*sc.pke, rng);
  std::cout << "pk       " << pvd::to_hex(kp.pk).substr(0, 48) << "... ("
            << kp.pk.size() << " bytes)\n";

  bool dec_ok = false, vrfy_ok = false;
  if (sc.variant == pvd::SchemeConfig::Variant::owf) {
    auto [vk, ct] = pvd::pv_enc(*sc.pke, kp.pk, *sc.owf, b, rng);
    std::cout << "vk.y0    " << vk.classical->first.str() << "\nvk.y1    "
              << vk.classical->second.str() << "\nct       "
              << ct.classical_part.size() << " classical bytes + two-branch state\n";
    const int z = pvd::pv_dec(*sc.pke, kp.sk, ct, rng);
    std::cout << "dec      " << z << (z == b ? "  (matches)" : "  (MISMATCH)")
              << "\n";
    dec_ok = z == b;

    auto [vk2, ct2] = pvd::pv_enc(*sc.pke, kp.pk, *sc.owf, b, rng);
    const pvd::DeletionCertificate cert = pvd::pv_del(ct2, rng);
    vrfy_ok = pvd::pv_vrfy(*sc.owf, vk2, cert);
    std::cout << "cert     " << cert.pi.str() << "\nvrfy     "
              << (vrfy_ok ? "accept" : "REJECT") << "\n";
  } else {
    auto [vk, ct] = pvd::pv_enc_owsg(*sc.pke, kp.pk, *sc.owsg, b, rc.t, rng);
    std::cout << "vk       " << vk.quantum->copies0.size()
              << " state copies per side, " << sc.owsg->state_qubits()
              << " qubits each\nct       " << ct.classical_part.size()
              << " classical bytes + two-branch state\n";
    const int z = pvd::pv_dec(*sc.pke, kp.sk, ct, rng);
    std::cout << "dec      " << z << (z == b ? "  (matches)" : "  (MISMATCH)")
              << "\n";
    dec_ok = z == b;

    auto [vk2, ct2] = pvd::pv_enc_owsg(*sc.pke, kp.pk, *sc.owsg, b, rc.t, rng);
    const pvd::DeletionCertificate cert = pvd::pv_del(ct2, rng);
    vrfy_ok = pvd::pv_vrfy_owsg(*sc.owsg, vk2, cert, rng);
    std::cout << "cert     " << cert.pi.str() << "\nvrfy     "
              << (vrfy_ok ? "accept" : "REJECT") << "\n";
  }
  std::cout << (dec_ok && vrfy_ok ? "ok\n" : "FAILED\n");
  return dec_ok && vrfy_ok ? 0 : 1;
}

// --- experiment --------------------------------------------------------------

pvd::GameAdversary game_adversary(const std::string& name) {
  if (name == "echo") return pvd::GameAdversary::echo;
  if (name == "brute") return pvd::GameAdversary::brute_other;
  if (name == "random") return pvd::GameAdversary::random_guess;
  if (name == "xor_z") return pvd::GameAdversary::xor_z;
  throw pvd::ConfigError(
      "config field 'adversary': '" + name +
      "' is not a game adversary (echo, brute, random, xor_z)");
}

struct Selection {
  bool evpke = false;
  int hybrid = -1;
  bool commuted = false;
  std::string game;
};

int cmd_experiment(const pvd::RunConfig& rc, const Selection& sel,
                   const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const pvd::DistMode mode = rc.dist_mode();
  ordered_json rep;
  bool ok = true;

  if (!sel.game.empty()) {
    if (sel.game != "other-preimage")
      throw pvd::ConfigError("experiment: unknown game '" + sel.game + "'");
    if (rc.scheme != "owf")
      throw pvd::ConfigError("experiment: the game needs the owf scheme");
    const pvd::SchemeConfig sc = pvd::build_scheme(rc);
    const pvd::GameResult r = pvd::other_preimage_game(
        sc.owf, game_adversary(rc.adversary), rc.give_real_z, rc.trials,
        rc.seed, sc.exec, sc.threads, rc.alpha);
    rep = pvd::report_skeleton("other-preimage", rc);
    rep["advantages"]["success_frequency"] = r.frequency;
    rep["ci"]["lo"] = r.ci.lo;
    rep["ci"]["hi"] = r.ci.hi;
  } else if (sel.evpke) {
    const pvd::SchemeConfig sc = pvd::build_scheme(rc);
    const pvd::AdversaryStrategy adv = pvd::build_adversary(rc);
    const auto d0 = pvd::run_evpke(0, sc, adv, mode, rc.trials, rc.seed);
    const auto d1 = pvd::run_evpke(1, sc, adv, mode, rc.trials, rc.seed);
    rep = pvd::report_skeleton("evpke", rc);
    rep["advantages"]["evpke"] = pvd::tv_distance(d0, d1);
    rep["ci"]["tv_slack"] = pvd::tv_ci_bound(d0, d1, rc.alpha);
  } else if (sel.hybrid >= 0) {
    const pvd::SchemeConfig sc = pvd::build_scheme(rc);
    const pvd::AdversaryStrategy adv = pvd::build_adversary(rc);
    const auto d0 = pvd::run_hyb(sel.hybrid, 0, sc, adv, mode, rc.trials, rc.seed);
    const auto d1 = pvd::run_hyb(sel.hybrid, 1, sc, adv, mode, rc.trials, rc.seed);
    rep = pvd::report_skeleton("hyb" + std::to_string(sel.hybrid), rc);
    rep["advantages"]["hyb" + std::to_string(sel.hybrid)] =
        pvd::tv_distance(d0, d1);
    rep["ci"]["tv_slack"] = pvd::tv_ci_bound(d0, d1, rc.alpha);
  } else if (sel.commuted) {
    const pvd::SchemeConfig sc = pvd::build_scheme(rc);
    const pvd::AdversaryStrategy adv = pvd::build_adversary(rc);
    rep = pvd::report_skeleton("hyb2_commuted", rc);
    double slack = 0.0;
    for (int b = 0; b < 2; ++b) {
      const auto plain = pvd::run_hyb(2, b, sc, adv, mode, rc.trials, rc.seed);
      const auto comm =
          pvd::run_hyb2_commuted(b, sc, adv, mode, rc.trials, rc.seed);
      const double tv = pvd::tv_distance(plain, comm);
      slack = pvd::tv_ci_bound(plain, comm, rc.alpha);
      // Enumerable strategies commute exactly; the dense circuit path only
      // up to float rounding.
      const double tol = mode == pvd::DistMode::exact
                             ? (adv.enumerable() ? 0.0 : 1e-12)
                             : slack;
      pvd::InequalityCheck c{"TV(hyb2_commuted(" + std::to_string(b) +
                                 "), hyb2(" + std::to_string(b) + ")) == 0",
                             tv, tol, tv <= tol};
      ok = ok && c.satisfied;
      rep["inequalities"].push_back(pvd::inequality_json(c));
      rep["advantages"]["commuted_tv_b" + std::to_string(b)] = tv;
    }
    rep["ci"]["tv_slack"] = slack;
  } else {
    const pvd::SchemeConfig sc = pvd::build_scheme(rc);
    const pvd::AdversaryStrategy adv = pvd::build_adversary(rc);
    const pvd::ChainReport chain =
        pvd::hybrid_chain_report(sc, adv, mode, rc.trials, rc.seed, rc.alpha);
    rep = pvd::chain_report_json(rc, chain);
    ok = chain.all_satisfied();
  }

  rep["wall_time_ms"] = elapsed_ms(t0);
  write_report(rep, out_path);
  return ok ? 0 : 1;
}

// --- check -------------------------------------------------------------------

int check_gentle(std::uint64_t instances, std::uint64_t seed) {
  const pvd::SplitRng base(seed);
  std::uint64_t passed = 0;
  for (std::uint64_t i = 0; i < instances; ++i) {
    pvd::SplitRng rng = base.fork(i);
    const int dim = 2 + static_cast<int>(rng.below(15));
    const pvd::Mat rho = pvd::random_density(dim, rng);
    pvd::Mat p;
    do {
      p = pvd::random_projector(dim, 1 + static_cast<int>(rng.below(dim)), rng);
    } while ((p * rho * p).trace().real() <= 1e-9);
    if (pvd::check_gentle_measurement(rho, p).satisfied) ++passed;
  }
  std::cout << "gentle: " << passed << "/" << instances << " satisfied\n";
  return passed == instances ? 0 : 1;
}

int check_dim(std::uint64_t instances, std::uint64_t seed) {
  const pvd::SplitRng base(seed);
  std::uint64_t passed = 0;
  for (std::uint64_t i = 0; i < instances; ++i) {
    pvd::SplitRng rng = base.fork(i);
    const int dim = 2 + static_cast<int>(rng.below(15));
    const pvd::Mat d = pvd::random_contraction(dim, rng);
    const pvd::Mat p0 =
        pvd::random_projector(dim, 1 + static_cast<int>(rng.below(dim - 1)), rng);
    const pvd::Mat p1 = pvd::Mat::Identity(dim, dim) - p0;
    const pvd::Vec psi = pvd::random_pure(dim, rng);
    if (pvd::check_distinguish_implies_map(d, p0, p1, psi).satisfied) ++passed;
  }
  std::cout << "dim: " << passed << "/" << instances << " satisfied\n";
  return passed == instances ? 0 : 1;
}

// Sparse Hadamard sampler vs the dense oracle: support equality, then a
// chi-square uniformity test over the sampled support.
int check_measurement(std::uint64_t per_n, std::uint64_t samples,
                      std::uint64_t seed) {
  const pvd::SplitRng base(seed);
  std::uint64_t checked = 0, passed = 0;
  for (int n = 1; n <= 8; ++n) {
    for (std::uint64_t inst = 0; inst < per_n; ++inst) {
      pvd::SplitRng rng = base.fork(std::uint64_t(n) << 32 | inst);
      const auto [x0, x1] = pvd::sample_branch_pair(std::size_t(n), rng);
      const pvd::TwoBranchState s(x0, x1, rng.bit());

      // Dense-oracle support: Hadamard-transform the dense state and read
      // the nonzero computational amplitudes.
      pvd::DenseState dense = pvd::to_dense(s);
      for (int q = 0; q < n; ++q) dense.apply_h(q);
      const auto probs = dense.range_probs(0, n);

      std::vector<std::uint64_t> counts(probs.size(), 0);
      for (std::uint64_t k = 0; k < samples; ++k)
        ++counts[pvd::hadamard_measure(s, rng).index()];

      bool ok = true;
      std::uint64_t support = 0;
      for (std::size_t w = 0; w < probs.size(); ++w) {
        const bool in_support = probs[w] > 1e-12;
        support += in_support;
        if (in_support != (s.delta().dot(pvd::BitString::from_index(w, std::size_t(n))) ==
                           s.phase()))
          ok = false;  // sparse support description disagrees with the oracle
        if (!in_support && counts[w] > 0) ok = false;
      }
      if (support == 1) {
        // single-outcome support: every sample must hit it
        for (std::size_t w = 0; w < probs.size(); ++w)
          if (probs[w] > 1e-12 && counts[w] != samples) ok = false;
      } else {
        const double expected = double(samples) / double(support);
        double stat = 0.0;
        for (std::size_t w = 0; w < probs.size(); ++w)
          if (probs[w] > 1e-12) {
            const double d = double(counts[w]) - expected;
            stat += d * d / expected;
          }
        if (pvd::chi_square_pvalue(stat, double(support - 1)) <= 0.001)
          ok = false;
      }
      ++checked;
      if (ok) ++passed;
    }
  }
  std::cout << "measurement: " << passed << "/" << checked << " instances ok\n";
  return passed == checked ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"publicly verifiable deletion: simulation and experiments"};
  app.require_subcommand(1);

  CLI::App* demo = app.add_subcommand("demo", "end-to-end scheme walkthrough");
  ConfigFlags demo_flags;
  demo_flags.attach(demo);
  int demo_b = 1;
  demo->add_option("--b", demo_b, "plaintext bit");

  CLI::App* exp = app.add_subcommand("experiment", "security experiments, JSON report");
  ConfigFlags exp_flags;
  exp_flags.attach(exp);
  Selection sel;
  std::string out_path;
  CLI::Option* o_evpke = exp->add_flag("--evpke", sel.evpke, "run EvPKE(0) vs EvPKE(1)");
  CLI::Option* o_hyb = exp->add_option("--hybrid", sel.hybrid, "run one hybrid (0, 1 or 2)")
                           ->check(CLI::Range(0, 2));
  CLI::Option* o_comm = exp->add_flag("--commuted", sel.commuted,
                                      "compare hyb2 against its commuted form");
  CLI::Option* o_game = exp->add_option("--game", sel.game, "other-preimage");
  o_evpke->excludes(o_hyb)->excludes(o_comm)->excludes(o_game);
  o_hyb->excludes(o_comm)->excludes(o_game);
  o_comm->excludes(o_game);
  exp->add_option("--out", out_path, "report path (default: stdout)");

  CLI::App* check = app.add_subcommand("check", "numeric property suites");
  std::string suite;
  std::uint64_t instances = 1000, check_seed = 1, samples = 100000;
  check->add_option("--suite", suite, "gentle | dim | measurement")->required();
  check->add_option("--instances", instances, "instances (per n for measurement)");
  check->add_option("--samples", samples, "samples per measurement instance");
  check->add_option("--seed", check_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*demo) return cmd_demo(demo_flags.resolve(), demo_b);
    if (*exp) return cmd_experiment(exp_flags.resolve(), sel, out_path);
    if (suite == "gentle") return check_gentle(instances, check_seed);
    if (suite == "dim") return check_dim(instances, check_seed);
    if (suite == "measurement")
      return check_measurement(std::min<std::uint64_t>(instances, 20), samples,
                               check_seed);
    throw pvd::ConfigError("check: unknown suite '" + suite +
                           "' (gentle, dim, measurement)");
  } catch (const pvd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
