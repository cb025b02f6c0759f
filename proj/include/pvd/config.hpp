#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pvd/harness.hpp"

namespace pvd {

// Configuration or usage problem; the CLI maps this to exit code 2. The
// message always names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat experiment configuration, shared by the config file and the CLI
// flags. Parsing is strict: unknown fields and fields that do not apply to
// the selected scheme or adversary are rejected by name.
struct RunConfig {
  std::string scheme = "owf";  // owf | owsg
  int n = 8;                   // branch bits (owf input / owsg key bits)
  int m = 16;                  // owf output bits / owsg state qubits
  std::string owf = "toy";     // hash | toy (owf scheme only)
  std::uint64_t toy_seed = 7;  // seed of the toy owf / toy owsg family
  std::string pke = "transparent";  // group | transparent
  std::string group = "tiny64";     // group pke preset
  std::string adversary = "honest";
  int invert_target = 0;              // inverter
  std::string retainer_cert = "zero";  // retainer: zero | guess_w
  std::string circuit = "scramble";    // circuit preset name
  int workspace = 0;                   // circuit workspace qubits
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string mode = "exact";  // exact | empirical
  int t = 1;                   // owsg verification copies
  std::string exec = "parallel";  // serial | parallel (empirical mode)
  int threads = 0;                // 0: library default
  double alpha = 0.001;           // CI confidence parameter
  bool give_real_z = false;       // other-preimage game: hand over the real z

  // Parses a JSON object, rejecting unknown fields. Throws ConfigError with
  // the field name on any violation.
  static RunConfig from_json_text(const std::string& text);

  // Full canonical echo (defaults filled in); embedded in every report.
  nlohmann::ordered_json to_json() const;

  // Cross-field validation; from_json_text runs this, flag-built configs
  // call it explicitly.
  void validate() const;

  DistMode dist_mode() const;
};

// Instantiates the primitives named by the config. The returned SchemeConfig
// owns them through its shared_ptr members.
SchemeConfig build_scheme(const RunConfig& rc);

AdversaryStrategy build_adversary(const RunConfig& rc);

// Report shell with the versioned schema and the field order fixed:
// schema, experiment, config, mode, advantages, abort_probability,
// inequalities, ci, seed, trials, wall_time_ms. Callers fill the middle.
nlohmann::ordered_json report_skeleton(const std::string& experiment,
                                       const RunConfig& rc);

nlohmann::ordered_json inequality_json(const InequalityCheck& c);
nlohmann::ordered_json estimate_json(const ProbabilityEstimate& e);

// Everything hybrid_chain_report produced, as a finished report body.
nlohmann::ordered_json chain_report_json(const RunConfig& rc,
                                         const ChainReport& rep);

// Byte-stable dump used for report output and determinism comparisons.
std::string report_dump(const nlohmann::ordered_json& report);

// Equality modulo the wall_time_ms field.
bool reports_equal_ignoring_wall_time(const std::string& a,
                                      const std::string& b);

}  // namespace pvd
