#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "pvd/rng.hpp"

namespace pvd {

enum class ExecMode { serial, parallel };

// Integer outcome counters. Merging adds counts, so any merge order gives the
// same tally; that, plus per-trial forked rng streams, is what makes the
// parallel path bit-identical to the serial one.
struct TrialTally {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t trials = 0;

  void merge(const TrialTally& o) {
    for (const auto& [k, c] : o.counts) counts[k] += c;
    trials += o.trials;
  }
};

// Runs `trials` independent trials; trial i draws from base.fork(i) only.
// threads <= 0 means the OpenMP default. Without OpenMP the parallel mode
// silently runs serially.
TrialTally tally_trials(std::uint64_t trials, const SplitRng& base,
                        ExecMode mode, int threads,
                        const std::function<std::string(std::uint64_t, SplitRng&)>& worker);

std::uint64_t count_successes(std::uint64_t trials, const SplitRng& base,
                              ExecMode mode, int threads,
                              const std::function<bool(std::uint64_t, SplitRng&)>& worker);

}  // namespace pvd
