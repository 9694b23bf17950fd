#include <cstdio>
#include <fstream>

#include "flatdio/cli.hpp"

namespace flatdio {

using nlohmann::json;

bool ExperimentConfig::has(const std::string& key) const { return params.contains(key) && !params[key].is_null(); }

double ExperimentConfig::number(const std::string& key) const {
  if (!has(key)) throw Error(ErrorKind::ConfigError, command + ": missing --" + key);
  const auto& v = params.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t pos = 0;
      double x = std::stod(v.get<std::string>(), &pos);
      if (pos == v.get<std::string>().size()) return x;
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorKind::ConfigError, command + ": --" + key + " must be a number");
}

std::string ExperimentConfig::text(const std::string& key) const {
  if (!has(key)) throw Error(ErrorKind::ConfigError, command + ": missing --" + key);
  const auto& v = params.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

double ExperimentConfig::number_or(const std::string& key, double def) const { return has(key) ? number(key) : def; }

std::string ExperimentConfig::text_or(const std::string& key, const std::string& def) const {
  return has(key) ? text(key) : def;
}

bool ExperimentConfig::flag(const std::string& key) const {
  if (!has(key)) return false;
  const auto& v = params.at(key);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  if (v.is_string()) return v.get<std::string>() == "true" || v.get<std::string>() == "1";
  throw Error(ErrorKind::ConfigError, command + ": --" + key + " must be a boolean");
}

json ExperimentConfig::to_json() const {
  json j;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["timing"] = timing;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  ExperimentConfig c;
  // Either the nested form written by to_json or flat keys.
  if (j.contains("params")) {
    c.command = j.value("command", "");
    c.params = j.at("params");
    c.seed = j.value("seed", std::uint64_t{0});
    c.timing = j.value("timing", false);
    return c;
  }
  for (const auto& [k, v] : j.items()) {
    if (k == "command") c.command = v.get<std::string>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "timing") c.timing = v.get<bool>();
    else c.params[k] = v;
  }
  return c;
}

ExperimentConfig merge_config(const ExperimentConfig& base, const ExperimentConfig& overrides) {
  ExperimentConfig c = base;
  if (!overrides.command.empty()) c.command = overrides.command;
  for (const auto& [k, v] : overrides.params.items()) c.params[k] = v;
  c.seed = overrides.seed != 0 ? overrides.seed : base.seed;
  c.timing = base.timing || overrides.timing;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
  try {
    return ExperimentConfig::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, "bad config " + path + ": " + e.what());
  }
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : c.to_json().dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TranslationSurface surface_from_config(const ExperimentConfig& c) {
  if (c.has("builtin")) return builtin(c.text("builtin"));
  if (c.has("surface")) return load_surface(c.text("surface"));
  if (c.has("polygon")) {
    std::ifstream in(c.text("polygon"));
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open polygon " + c.text("polygon"));
    std::vector<Vec2> verts;
    try {
      json j = json::parse(in);
      const json& list = j.is_object() ? j.at("vertices") : j;
      for (const auto& v : list) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ConfigError, std::string("bad polygon file: ") + e.what());
    }
    return unfold_rational_polygon(make_rational_polygon(verts)).surface;
  }
  throw Error(ErrorKind::ConfigError, c.command + ": one of --builtin, --surface or --polygon is required");
}

}  // namespace flatdio
