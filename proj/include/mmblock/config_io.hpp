#pragma once

// Flat `key = value` scenario files. `#` starts a comment, keys mirror the
// field names of ScenarioConfig, list values are comma separated and unknown
// keys are rejected.

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "mmblock/config.hpp"
#include "mmblock/format.hpp"

namespace mmblock {

namespace detail {

using ScalarSetter = std::function<void(ScenarioConfig&, double)>;
using ListSetter = std::function<void(ScenarioConfig&, std::vector<double>)>;

inline const std::map<std::string, ScalarSetter, std::less<>>&
scalar_fields() {
  static const std::map<std::string, ScalarSetter, std::less<>> fields{
      {"t_difs", [](ScenarioConfig& c, double x) { c.timing.t_difs = x; }},
      {"t_sifs", [](ScenarioConfig& c, double x) { c.timing.t_sifs = x; }},
      {"t_ack", [](ScenarioConfig& c, double x) { c.timing.t_ack = x; }},
      {"t_slot_mac",
       [](ScenarioConfig& c, double x) { c.timing.t_slot_mac = x; }},
      {"t_sweep", [](ScenarioConfig& c, double x) { c.timing.t_sweep = x; }},
      {"slot", [](ScenarioConfig& c, double x) { c.timing.slot = x; }},
      {"mu", [](ScenarioConfig& c, double x) { c.blockage.mu = x; }},
      {"sigma", [](ScenarioConfig& c, double x) { c.blockage.sigma = x; }},
      {"alpha", [](ScenarioConfig& c, double x) { c.blockage.alpha = x; }},
      {"d", [](ScenarioConfig& c, double x) { c.blockage.d = x; }},
      {"v", [](ScenarioConfig& c, double x) { c.blockage.v = x; }},
      {"q", [](ScenarioConfig& c, double x) { c.queue.q = x; }},
      {"a_max", [](ScenarioConfig& c, double x) { c.queue.a_max = x; }},
      {"a_factor", [](ScenarioConfig& c, double x) { c.queue.a_factor = x; }},
      {"ssi", [](ScenarioConfig& c, double x) { c.sweep.ssi = x; }},
  };
  return fields;
}

inline const std::map<std::string, ListSetter, std::less<>>& list_fields() {
  static const std::map<std::string, ListSetter, std::less<>> fields{
      {"mcs_levels",
       [](ScenarioConfig& c, std::vector<double> v) {
         c.rates.mcs_levels = std::move(v);
       }},
      {"p_recover",
       [](ScenarioConfig& c, std::vector<double> v) {
         c.rates.p_recover = std::move(v);
       }},
  };
  return fields;
}

}  // namespace detail

/// Parses a scenario file on top of the built-in defaults. Syntax problems
/// are collected and thrown together as a ConfigError; semantic checks are
/// left to validate().
inline ScenarioConfig parse_config(std::istream& in,
                                   ScenarioConfig base = ScenarioConfig{}) {
  std::vector<ConfigIssue> issues;
  std::set<std::string, std::less<>> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({where, "expected `key = value`"});
      continue;
    }
    auto key = trim(view.substr(0, eq));
    auto value = trim(view.substr(eq + 1));
    std::string key_str(key);
    if (!seen.insert(key_str).second) {
      issues.push_back({key_str, "duplicate key (" + where + ")"});
      continue;
    }

    if (key == "cw_min") {
      auto v = parse_number(value);
      if (!v || *v != std::floor(*v) || !std::isfinite(*v)) {
        issues.push_back({key_str, "expected an integer (" + where + ")"});
      } else {
        base.timing.cw_min = static_cast<int>(*v);
      }
    } else if (auto it = detail::scalar_fields().find(key);
               it != detail::scalar_fields().end()) {
      auto v = parse_number(value);
      if (!v) {
        issues.push_back({key_str, "expected a number (" + where + ")"});
      } else {
        it->second(base, *v);
      }
    } else if (auto lit = detail::list_fields().find(key);
               lit != detail::list_fields().end()) {
      auto v = parse_number_list(value);
      if (!v) {
        issues.push_back(
            {key_str, "expected a comma separated list (" + where + ")"});
      } else {
        lit->second(base, std::move(*v));
      }
    } else {
      issues.push_back({key_str, "unknown key (" + where + ")"});
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return base;
}

inline ScenarioConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_config(in);
}

inline std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_number(xs[i]);
  }
  return out;
}

inline void write_config(std::ostream& out, const ScenarioConfig& c) {
  auto kv = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  kv("t_difs", format_number(c.timing.t_difs));
  kv("t_sifs", format_number(c.timing.t_sifs));
  kv("t_ack", format_number(c.timing.t_ack));
  kv("t_slot_mac", format_number(c.timing.t_slot_mac));
  kv("cw_min", std::to_string(c.timing.cw_min));
  kv("t_sweep", format_number(c.timing.t_sweep));
  kv("slot", format_number(c.timing.slot));
  kv("mu", format_number(c.blockage.mu));
  kv("sigma", format_number(c.blockage.sigma));
  kv("alpha", format_number(c.blockage.alpha));
  kv("d", format_number(c.blockage.d));
  kv("v", format_number(c.blockage.v));
  kv("mcs_levels", join_numbers(c.rates.mcs_levels));
  kv("p_recover", join_numbers(c.rates.p_recover));
  kv("q", format_number(c.queue.q));
  kv("a_max", format_number(c.queue.a_max));
  kv("a_factor", format_number(c.queue.a_factor));
  kv("ssi", format_number(c.sweep.ssi));
}

}  // namespace mmblock
