#include "pvd/trials.hpp"

#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pvd {

TrialTally tally_trials(std::uint64_t trials, const SplitRng& base,
                        ExecMode mode, int threads,
                        const std::function<std::string(std::uint64_t, SplitRng&)>& worker) {
  if (trials == 0) throw std::invalid_argument("tally_trials: zero trials");
  TrialTally out;
  out.trials = trials;
#ifdef _OPENMP
  if (mode == ExecMode::parallel) {
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
    std::vector<TrialTally> locals(nthreads);
#pragma omp parallel num_threads(nthreads)
    {
      TrialTally& local = locals[omp_get_thread_num()];
#pragma omp for schedule(static)
      for (long long i = 0; i < static_cast<long long>(trials); ++i) {
        SplitRng rng = base.fork(static_cast<std::uint64_t>(i));
        ++local.counts[worker(static_cast<std::uint64_t>(i), rng)];
      }
    }
    for (const TrialTally& local : locals)
      for (const auto& [k, c] : local.counts) out.counts[k] += c;
    return out;
  }
#else
  (void)mode;
  (void)threads;
#endif
  for (std::uint64_t i = 0; i < trials; ++i) {
    SplitRng rng = base.fork(i);
    ++out.counts[worker(i, rng)];
  }
  return out;
}

std::uint64_t count_successes(std::uint64_t trials, const SplitRng& base,
                              ExecMode mode, int threads,
                              const std::function<bool(std::uint64_t, SplitRng&)>& worker) {
  if (trials == 0) throw std::invalid_argument("count_successes: zero trials");
#ifdef _OPENMP
  if (mode == ExecMode::parallel) {
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
    std::uint64_t hits = 0;
#pragma omp parallel num_threads(nthreads) reduction(+ : hits)
    {
#pragma omp for schedule(static)
      for (long long i = 0; i < static_cast<long long>(trials); ++i) {
        SplitRng rng = base.fork(static_cast<std::uint64_t>(i));
        if (worker(static_cast<std::uint64_t>(i), rng)) ++hits;
      }
    }
    return hits;
  }
#else
  (void)mode;
  (void)threads;
#endif
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    SplitRng rng = base.fork(i);
    if (worker(i, rng)) ++hits;
  }
  return hits;
}

}  // namespace pvd
