// Serial reference vs OpenMP tally paths on the empirical experiment
// kernels. The two paths must produce identical counts (fork-per-trial rng,
// commutative integer merge); this binary times them and verifies that.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pvd/config.hpp"

namespace {

struct Timing {
  double serial_ms = 0.0;
  double parallel_ms = 0.0;
  bool match = false;
};

template <typename F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

Timing bench_distribution(pvd::SchemeConfig sc, const pvd::AdversaryStrategy& adv,
                          std::uint64_t trials, std::uint64_t seed) {
  Timing t;
  pvd::OutcomeDistribution serial = pvd::OutcomeDistribution::empirical("");
  pvd::OutcomeDistribution parallel = pvd::OutcomeDistribution::empirical("");
  sc.exec = pvd::ExecMode::serial;
  t.serial_ms = time_ms([&] {
    serial = pvd::run_hyb(2, 0, sc, adv, pvd::DistMode::empirical, trials, seed);
  });
  sc.exec = pvd::ExecMode::parallel;
  t.parallel_ms = time_ms([&] {
    parallel = pvd::run_hyb(2, 0, sc, adv, pvd::DistMode::empirical, trials, seed);
  });
  t.match = pvd::exactly_equal(serial, parallel);
  return t;
}

Timing bench_game(const pvd::OwfPtr& owf, std::uint64_t trials,
                  std::uint64_t seed) {
  Timing t;
  pvd::GameResult serial, parallel;
  t.serial_ms = time_ms([&] {
    serial = pvd::other_preimage_game(owf, pvd::GameAdversary::brute_other, true,
                                      trials, seed, pvd::ExecMode::serial, 0,
                                      0.001);
  });
  t.parallel_ms = time_ms([&] {
    parallel = pvd::other_preimage_game(owf, pvd::GameAdversary::brute_other,
                                        true, trials, seed,
                                        pvd::ExecMode::parallel, 0, 0.001);
  });
  t.match = serial.successes == parallel.successes;
  return t;
}

void report(const std::string& name, const Timing& t, bool& all_match) {
  std::cout << name << ": serial " << t.serial_ms << " ms, parallel "
            << t.parallel_ms << " ms, speedup "
            << (t.parallel_ms > 0 ? t.serial_ms / t.parallel_ms : 0.0)
            << ", tallies " << (t.match ? "identical" : "DIFFER") << "\n";
  all_match = all_match && t.match;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel comparison"};
  std::uint64_t trials = 200000, seed = 42;
  app.add_option("--trials", trials, "trials per workload");
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  bool all_match = true;

  {
    pvd::RunConfig rc;
    rc.scheme = "owf";
    rc.owf = "hash";
    rc.n = 8;
    rc.m = 16;
    rc.pke = "transparent";
    pvd::SchemeConfig sc = pvd::build_scheme(rc);
    report("hyb2/honest/owf-hash",
           bench_distribution(sc, pvd::AdversaryStrategy::honest(), trials, seed),
           all_match);
    report("hyb2/retainer/owf-hash",
           bench_distribution(
               sc,
               pvd::AdversaryStrategy::retainer(
                   pvd::AdversaryStrategy::RetainerCert::guess_w),
               trials, seed),
           all_match);
  }
  {
    pvd::RunConfig rc;
    rc.scheme = "owsg";
    rc.n = 6;
    rc.m = 4;
    rc.pke = "transparent";
    pvd::SchemeConfig sc = pvd::build_scheme(rc);
    report("hyb2/honest/owsg",
           bench_distribution(sc, pvd::AdversaryStrategy::honest(), trials / 10,
                              seed),
           all_match);
  }
  report("game/brute/owf-toy",
         bench_game(pvd::owf_toy(8, 16, 7), trials / 10, seed), all_match);

  std::cout << (all_match ? "all tallies identical\n"
                          : "MISMATCH between serial and parallel paths\n");
  return all_match ? 0 : 1;
}
