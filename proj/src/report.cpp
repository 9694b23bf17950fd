#include <cmath>
#include <sstream>

#include "flatdio/cli.hpp"

namespace flatdio {

using nlohmann::json;

json ExperimentReport::to_json() const {
  json j;
  j["config"] = config.to_json();
  j["config_hash"] = config_hash(config);
  j["results"] = results;
  j["warnings"] = warnings;
  if (wall_clock >= 0.0) j["wall_clock"] = wall_clock;
  return j;
}

ExperimentReport ExperimentReport::from_json(const json& j) {
  ExperimentReport r;
  try {
    r.config = ExperimentConfig::from_json(j.at("config"));
    r.results = j.at("results");
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.wall_clock = j.value("wall_clock", -1.0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed report: ") + e.what());
  }
  return r;
}

namespace {

void csv_rows(std::ostringstream& out, const json& header, const json& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i].get<std::string>();
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      if (row[i].is_string()) out << row[i].get<std::string>();
      else if (!row[i].is_null()) out << row[i].dump();
    }
    out << "\n";
  }
}

void key_values(std::ostringstream& out, const json& obj, const std::string& prefix) {
  for (const auto& [k, v] : obj.items()) {
    if (v.is_object()) key_values(out, v, prefix + k + ".");
    else if (!v.is_array()) out << prefix << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

}  // namespace

std::string human_output(const ExperimentReport& r) {
  std::ostringstream out;
  out.precision(17);
  if (r.results.contains("csv")) {
    const auto& csv = r.results.at("csv");
    csv_rows(out, csv.at("header"), csv.at("rows"));
  } else {
    key_values(out, r.results, "");
  }
  for (const auto& w : r.warnings) out << "# warning: " << w << "\n";
  return out.str();
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
      return 2;
    case ErrorKind::BudgetExceeded:
      return 3;
    case ErrorKind::HypothesisNotMet:
      return 4;
    default:
      return 1;
  }
}

json error_json(const Error& e) {
  json j;
  j["error"] = error_kind_name(e.kind());
  j["message"] = e.what();
  if (!std::isnan(e.value())) j["value"] = e.value();
  j["exit_code"] = exit_code(e.kind());
  return j;
}

}  // namespace flatdio
