#include "depcap/schema.hpp"

#include <set>

#include "depcap/common.hpp"
#include "json.hpp"

namespace depcap {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw validation_error("output schema violation at " + path + ": " + what);
}

const json& need(const json& obj, const std::string& path,
                 const std::string& key) {
  if (!obj.contains(key)) fail(path, "missing key '" + key + "'");
  return obj.at(key);
}

void need_string(const json& obj, const std::string& path,
                 const std::string& key) {
  if (!need(obj, path, key).is_string())
    fail(path + "." + key, "expected a string");
}

void need_number(const json& obj, const std::string& path,
                 const std::string& key) {
  if (!need(obj, path, key).is_number())
    fail(path + "." + key, "expected a number");
}

void need_integer(const json& obj, const std::string& path,
                  const std::string& key) {
  if (!need(obj, path, key).is_number_integer())
    fail(path + "." + key, "expected an integer");
}

void check_manifest(const json& m) {
  if (!m.is_object()) fail("manifest", "expected an object");
  need_string(m, "manifest", "subcommand");
  need_string(m, "manifest", "version");
  need_number(m, "manifest", "wall_time_ms");
  const json& flags = need(m, "manifest", "flags");
  if (!flags.is_object()) fail("manifest.flags", "expected an object");
  for (const auto& [key, value] : flags.items())
    if (!value.is_string()) fail("manifest.flags." + key, "expected a string");
  const json& seed = need(m, "manifest", "seed");
  if (!seed.is_null() && !seed.is_number_integer())
    fail("manifest.seed", "expected an integer or null");
  const json& digest = need(m, "manifest", "input_digest");
  if (!digest.is_null() && !digest.is_string())
    fail("manifest.input_digest", "expected a hex string or null");
}

void check_warnings(const json& doc, const std::string& path) {
  const json& w = need(doc, path, "warnings");
  if (!w.is_array()) fail(path + ".warnings", "expected an array");
  for (const auto& item : w)
    if (!item.is_string()) fail(path + ".warnings[]", "expected strings");
}

void check_diagnostics(const json& doc, const std::string& path) {
  const json& d = need(doc, path, "diagnostics");
  if (!d.is_object()) fail(path + ".diagnostics", "expected an object");
  for (const auto& [key, value] : d.items())
    if (!value.is_number())
      fail(path + ".diagnostics." + key, "expected a number");
}

void check_keys(const json& doc, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : doc.items())
    if (!allowed.count(key)) fail(path, "unexpected key '" + key + "'");
}

void check_estimate(const json& doc) {
  check_keys(doc, "$",
             {"manifest", "method", "value_nats", "value_bits", "k", "n",
              "warnings", "diagnostics"});
  need_string(doc, "$", "method");
  need_number(doc, "$", "value_nats");
  if (doc.contains("value_bits") && !doc.at("value_bits").is_number())
    fail("$.value_bits", "expected a number");
  need_integer(doc, "$", "k");
  need_integer(doc, "$", "n");
  check_warnings(doc, "$");
  check_diagnostics(doc, "$");
}

void check_capacity(const json& doc) {
  check_keys(doc, "$",
             {"manifest", "capacity_nats", "capacity_bits", "order", "prior",
              "iterations", "grid_resolution", "warnings"});
  need_number(doc, "$", "capacity_nats");
  if (doc.contains("capacity_bits") && !doc.at("capacity_bits").is_number())
    fail("$.capacity_bits", "expected a number");
  const json& order = need(doc, "$", "order");
  if (!order.is_string() && !order.is_number())
    fail("$.order", "expected 'shannon' or a number");
  if (doc.contains("prior")) {
    const json& prior = doc.at("prior");
    if (!prior.is_null()) {
      if (!prior.is_array()) fail("$.prior", "expected an array or null");
      for (const auto& p : prior)
        if (!p.is_number()) fail("$.prior[]", "expected numbers");
    }
  }
  if (doc.contains("warnings")) check_warnings(doc, "$");
}

void check_axioms(const json& doc) {
  check_keys(doc, "$", {"manifest", "measure", "checks", "all_pass"});
  need_string(doc, "$", "measure");
  const json& all_pass = need(doc, "$", "all_pass");
  if (!all_pass.is_boolean()) fail("$.all_pass", "expected a boolean");
  const json& checks = need(doc, "$", "checks");
  if (!checks.is_array() || checks.empty())
    fail("$.checks", "expected a nonempty array");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string path = "$.checks[" + std::to_string(i) + "]";
    const json& c = checks.at(i);
    if (!c.is_object()) fail(path, "expected an object");
    check_keys(c, path, {"name", "trials", "max_violation", "tolerance",
                         "pass"});
    need_string(c, path, "name");
    need_integer(c, path, "trials");
    need_number(c, path, "max_violation");
    need_number(c, path, "tolerance");
    if (!need(c, path, "pass").is_boolean())
      fail(path + ".pass", "expected a boolean");
  }
}

}  // namespace

void validate_output_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("output is not valid JSON: ") +
                           e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");
  check_manifest(need(doc, "$", "manifest"));
  if (doc.contains("value_nats")) {
    check_estimate(doc);
  } else if (doc.contains("capacity_nats")) {
    check_capacity(doc);
  } else if (doc.contains("checks")) {
    check_axioms(doc);
  } else {
    fail("$", "document matches no known payload shape");
  }
}

}  // namespace depcap
