#include "pvd/config.hpp"

#include <set>
#include <vector>

namespace pvd {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void expect_one_of(const std::string& field, const std::string& value,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) {
    if (!list.empty()) list += ", ";
    list += a;
  }
  bad_field(field, "must be one of {" + list + "}, got '" + value + "'");
}

std::string take_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad_field(field, "expected a string");
  return j.get<std::string>();
}

std::int64_t take_int(const json& j, const std::string& field, std::int64_t lo,
                      std::int64_t hi) {
  if (!j.is_number_integer()) bad_field(field, "expected an integer");
  const std::int64_t v = j.get<std::int64_t>();
  if (v < lo || v > hi)
    bad_field(field, "must be in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  return v;
}

std::uint64_t take_u64(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    bad_field(field, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

double take_prob(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  const double v = j.get<double>();
  if (!(v > 0.0 && v < 1.0)) bad_field(field, "must lie in (0, 1)");
  return v;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig rc;
  for (const auto& [key, value] : j.items()) {
    if (key == "scheme") rc.scheme = take_string(value, key);
    else if (key == "n") rc.n = static_cast<int>(take_int(value, key, 1, 64));
    else if (key == "m") rc.m = static_cast<int>(take_int(value, key, 1, 4096));
    else if (key == "owf") rc.owf = take_string(value, key);
    else if (key == "toy_seed") rc.toy_seed = take_u64(value, key);
    else if (key == "pke") rc.pke = take_string(value, key);
    else if (key == "group") rc.group = take_string(value, key);
    else if (key == "adversary") rc.adversary = take_string(value, key);
    else if (key == "invert_target")
      rc.invert_target = static_cast<int>(take_int(value, key, 0, 1));
    else if (key == "retainer_cert") rc.retainer_cert = take_string(value, key);
    else if (key == "circuit") rc.circuit = take_string(value, key);
    else if (key == "workspace")
      rc.workspace = static_cast<int>(take_int(value, key, 0, kDenseCap));
    else if (key == "trials") rc.trials = take_u64(value, key);
    else if (key == "seed") rc.seed = take_u64(value, key);
    else if (key == "mode") rc.mode = take_string(value, key);
    else if (key == "t") rc.t = static_cast<int>(take_int(value, key, 1, 64));
    else if (key == "exec") rc.exec = take_string(value, key);
    else if (key == "threads")
      rc.threads = static_cast<int>(take_int(value, key, 0, 4096));
    else if (key == "alpha") rc.alpha = take_prob(value, key);
    else if (key == "give_real_z") {
      if (!value.is_boolean()) bad_field(key, "expected a boolean");
      rc.give_real_z = value.get<bool>();
    } else throw ConfigError("config: unknown field '" + key + "'");
  }
  rc.validate();
  return rc;
}

void RunConfig::validate() const {
  expect_one_of("scheme", scheme, {"owf", "owsg"});
  expect_one_of("owf", owf, {"hash", "toy"});
  expect_one_of("pke", pke, {"group", "transparent"});
  expect_one_of("group", group, {"tiny64", "small256", "modp2048"});
  expect_one_of("adversary", adversary,
                {"honest", "inverter", "retainer", "circuit",  // strategies
                 "echo", "brute", "random", "xor_z"});         // game only
  expect_one_of("retainer_cert", retainer_cert, {"zero", "guess_w"});
  expect_one_of("mode", mode, {"exact", "empirical"});
  expect_one_of("exec", exec, {"serial", "parallel"});
  if (trials == 0) bad_field("trials", "must be positive");
  if (scheme == "owf" && owf == "toy" && n > 16)
    bad_field("n", "toy owf supports n <= 16");
  if (scheme == "owsg" && m > kDenseCap)
    bad_field("m", "owsg state register exceeds the dense cap");
  if (adversary == "circuit" && n + workspace + 1 > kDenseCap)
    bad_field("workspace", "circuit register exceeds the dense cap");
  if (adversary == "inverter" && !(scheme == "owf" && owf == "toy"))
    bad_field("adversary", "inverter needs the enumerable toy owf");
}

DistMode RunConfig::dist_mode() const {
  return mode == "exact" ? DistMode::exact : DistMode::empirical;
}

SchemeConfig build_scheme(const RunConfig& rc) {
  rc.validate();
  SchemeConfig sc;
  if (rc.scheme == "owf") {
    sc.variant = SchemeConfig::Variant::owf;
    sc.owf = rc.owf == "hash"
                 ? owf_hash(static_cast<std::size_t>(rc.n),
                            static_cast<std::size_t>(rc.m))
                 : owf_toy(static_cast<std::size_t>(rc.n),
                           static_cast<std::size_t>(rc.m), rc.toy_seed);
  } else {
    sc.variant = SchemeConfig::Variant::owsg;
    sc.owsg = owsg_toy(static_cast<std::size_t>(rc.n), rc.m, rc.toy_seed);
  }
  sc.pke = rc.pke == "group" ? pke_group(GroupParams::preset(rc.group))
                             : pke_transparent();
  sc.wrapper = WrapperKind::pke;
  sc.t = rc.t;
  sc.exec = rc.exec == "serial" ? ExecMode::serial : ExecMode::parallel;
  sc.threads = rc.threads;
  return sc;
}

AdversaryStrategy build_adversary(const RunConfig& rc) {
  rc.validate();
  if (rc.adversary == "echo" || rc.adversary == "brute" ||
      rc.adversary == "random" || rc.adversary == "xor_z")
    throw ConfigError("config field 'adversary': '" + rc.adversary +
                      "' only plays the other-preimage game");
  if (rc.adversary == "honest") return AdversaryStrategy::honest();
  if (rc.adversary == "inverter")
    return AdversaryStrategy::inverter(rc.invert_target);
  if (rc.adversary == "retainer")
    return AdversaryStrategy::retainer(
        rc.retainer_cert == "zero" ? AdversaryStrategy::RetainerCert::zero
                                   : AdversaryStrategy::RetainerCert::guess_w);
  std::vector<CircuitGate> gates;
  try {
    gates = circuit_preset(rc.circuit, rc.n + rc.workspace);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field 'circuit': ") + e.what());
  }
  return AdversaryStrategy::circuit(std::move(gates), rc.workspace);
}

nlohmann::ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["scheme"] = scheme;
  j["n"] = n;
  j["m"] = m;
  j["owf"] = owf;
  j["toy_seed"] = toy_seed;
  j["pke"] = pke;
  j["group"] = group;
  j["adversary"] = adversary;
  j["invert_target"] = invert_target;
  j["retainer_cert"] = retainer_cert;
  j["circuit"] = circuit;
  j["workspace"] = workspace;
  j["trials"] = trials;
  j["seed"] = seed;
  j["mode"] = mode;
  j["t"] = t;
  j["exec"] = exec;
  j["threads"] = threads;
  j["alpha"] = alpha;
  j["give_real_z"] = give_real_z;
  return j;
}

nlohmann::ordered_json report_skeleton(const std::string& experiment,
                                       const RunConfig& rc) {
  ordered_json j;
  j["schema"] = 1;
  j["experiment"] = experiment;
  j["config"] = rc.to_json();
  j["mode"] = rc.mode;
  j["advantages"] = ordered_json::object();
  j["abort_probability"] = nullptr;
  j["inequalities"] = ordered_json::array();
  j["ci"] = ordered_json::object({{"alpha", rc.alpha}});
  j["seed"] = rc.seed;
  j["trials"] = rc.trials;
  j["wall_time_ms"] = 0;
  return j;
}

nlohmann::ordered_json inequality_json(const InequalityCheck& c) {
  ordered_json j;
  j["name"] = c.name;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["satisfied"] = c.satisfied;
  return j;
}

nlohmann::ordered_json estimate_json(const ProbabilityEstimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["exact"] = e.exact;
  if (!e.exact) {
    j["successes"] = e.successes;
    j["trials"] = e.trials;
  }
  j["ci"] = ordered_json::object({{"lo", e.ci.lo}, {"hi", e.ci.hi}});
  return j;
}

nlohmann::ordered_json chain_report_json(const RunConfig& rc,
                                         const ChainReport& rep) {
  ordered_json j = report_skeleton("chain", rc);
  j["advantages"]["hyb0"] = rep.advt_hyb0;
  j["advantages"]["hyb1"] = rep.advt_hyb1;
  j["advantages"]["hyb2"] = rep.advt_hyb2;
  j["advantages"]["hyb0_valid_only"] = rep.advt_hyb0_valid_only;
  j["abort_probability"] = estimate_json(rep.abort);
  for (const InequalityCheck& c : rep.inequalities)
    j["inequalities"].push_back(inequality_json(c));
  j["ci"]["tv_slack"] = rep.tv_slack;
  return j;
}

std::string report_dump(const nlohmann::ordered_json& report) {
  return report.dump(2) + "\n";
}

bool reports_equal_ignoring_wall_time(const std::string& a,
                                      const std::string& b) {
  ordered_json ja = ordered_json::parse(a);
  ordered_json jb = ordered_json::parse(b);
  ja.erase("wall_time_ms");
  jb.erase("wall_time_ms");
  return report_dump(ja) == report_dump(jb);
}

}  // namespace pvd
