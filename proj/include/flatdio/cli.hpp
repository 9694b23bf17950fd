#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatdio/errors.hpp"
#include "flatdio/surface.hpp"
#include "json.hpp"

namespace flatdio {

// Flat key/value configuration; keys mirror the command-line flags.
struct ExperimentConfig {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  bool timing = false;

  bool has(const std::string& key) const;
  // Throw ConfigError when the key is missing or has the wrong type.
  double number(const std::string& key) const;
  std::string text(const std::string& key) const;
  double number_or(const std::string& key, double def) const;
  std::string text_or(const std::string& key, const std::string& def) const;
  bool flag(const std::string& key) const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Values in `overrides` replace those of `base`; command and seed too when set.
ExperimentConfig merge_config(const ExperimentConfig& base, const ExperimentConfig& overrides);
ExperimentConfig load_config(const std::string& path);

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct ExperimentReport {
  ExperimentConfig config;
  nlohmann::json results = nlohmann::json::object();
  double wall_clock = -1.0;  // seconds; negative when not recorded
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
};

// The surface named by "builtin", "surface" (presentation JSON) or "polygon"
// (vertex list JSON, unfolded).
TranslationSurface surface_from_config(const ExperimentConfig& c);

// Dispatches scan, verify, dimension, geodesic and billiard. Throws Error.
ExperimentReport run(const ExperimentConfig& c);

// Human-readable twin of a report (CSV for scan and billiard rows).
std::string human_output(const ExperimentReport& r);

// 0 ok, 2 config, 3 budget, 4 hypothesis not met, 1 anything else.
int exit_code(ErrorKind k);
nlohmann::json error_json(const Error& e);

// kind: sys-vs-t, loglog-recurrence, interval-levels, count-vs-L or trajectory. Throws
// MissingSeries when the report lacks the series or it is empty.
std::string plot(const ExperimentReport& r, const std::string& kind);

}  // namespace flatdio
