#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "doctest.h"
#include "flatdio/cli.hpp"
#include "flatdio/scan.hpp"
#include "support.hpp"

using namespace flatdio;
using nlohmann::json;

namespace {

ExperimentConfig cfg(const std::string& command, json params, std::uint64_t seed = 0) {
  ExperimentConfig c;
  c.command = command;
  c.params = std::move(params);
  c.seed = seed;
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exit status of the CLI binary, or -1 when FLATDIO_BIN is unset.
int run_bin(const std::string& args) {
  const char* bin = std::getenv("FLATDIO_BIN");
  if (!bin) return -1;
  int st = std::system((std::string(bin) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -2;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config merge") {
  auto base = cfg("verify", {{"builtin", "torus"}, {"eps", 0.1}, {"max-length", 50}}, 3);
  auto over = cfg("", {{"eps", 0.2}, {"property", "qg"}});
  auto m = merge_config(base, over);
  CHECK(m.command == "verify");
  CHECK(m.seed == 3);
  CHECK(m.number("eps") == 0.2);
  CHECK(m.number("max-length") == 50);
  CHECK(m.text("property") == "qg");
  CHECK(kind_of([&] { m.number("missing"); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { m.number("property"); }) == ErrorKind::ConfigError);
  CHECK(m.number_or("samples", 7) == 7);

  const std::string path = "cli_test_config.json";
  std::ofstream(path) << m.to_json().dump();
  auto back = load_config(path);
  CHECK(back.to_json() == m.to_json());
  CHECK(config_hash(back) == config_hash(m));
  CHECK(config_hash(back).size() == 16);
  CHECK(config_hash(base) != config_hash(m));
  std::remove(path.c_str());
}

TEST_CASE("report round trip") {
  auto r = run(cfg("scan", {{"builtin", "torus"}, {"max-length", 5}}));
  auto j = r.to_json();
  auto back = ExperimentReport::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.results["count"] == r.results["count"]);
  CHECK_FALSE(j.contains("wall_clock"));
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::ConfigError) == 2);
  CHECK(exit_code(ErrorKind::BudgetExceeded) == 3);
  CHECK(exit_code(ErrorKind::HypothesisNotMet) == 4);
  CHECK(exit_code(ErrorKind::UnknownSurface) == 1);
  auto missing_eps = cfg("verify", {{"builtin", "torus"}, {"property", "qg"}, {"max-length", 20}});
  try {
    run(missing_eps);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(exit_code(e.kind()) == 2);
    auto j = error_json(e);
    CHECK(j.dump().find("ConfigError") != std::string::npos);
  }
}

TEST_CASE("same config and seed give identical reports") {
  auto c = cfg("verify", {{"builtin", "torus"}, {"property", "iqg"}, {"eps", 0.1}, {"max-length", 30}, {"samples", 20}},
               42);
  CHECK(run(c).to_json().dump() == run(c).to_json().dump());
  auto g = cfg("geodesic", {{"builtin", "torus"}, {"random", 3}, {"horizon", 4}}, 9);
  CHECK(run(g).to_json().dump() == run(g).to_json().dump());
  auto g2 = g;
  g2.seed = 10;
  CHECK(run(g).to_json().dump() != run(g2).to_json().dump());
}

TEST_CASE("scan rows match the lattice oracle") {
  auto r = run(cfg("scan", {{"builtin", "torus"}, {"max-length", 10}}));
  const auto& rows = r.results["csv"]["rows"];
  CHECK(rows.size() == torus_oracle(10).size());
  CHECK(r.results["count"].get<std::size_t>() == rows.size());
  for (const auto& row : rows) {
    double re = row[2], im = row[3];
    CHECK(std::abs(re - std::round(re)) < 1e-9);
    CHECK(std::abs(im - std::round(im)) < 1e-9);
    CHECK(std::hypot(re, im) <= 10 + 1e-9);
  }
  auto text = human_output(r);
  CHECK(text.rfind("kind,theta,re,im,length,width,area", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rows.size()) + 1);
}

TEST_CASE("plots") {
  auto scan = run(cfg("scan", {{"builtin", "torus"}, {"max-length", 10}}));
  CHECK(plot(scan, "count-vs-L").find("<svg") != std::string::npos);
  CHECK(kind_of([&] { plot(scan, "sys-vs-t"); }) == ErrorKind::MissingSeries);
  CHECK(kind_of([&] { plot(scan, "pie"); }) == ErrorKind::ConfigError);

  auto bil = run(cfg("billiard", {{"builtin", "torus"}, {"theta", 0.5535743588970452}, {"point", "0.3,0.2"}}));
  auto svg = plot(bil, "loglog-recurrence");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("omega = ([-0-9.eE+]+)")));
  CHECK(std::stod(m[1].str()) == doctest::Approx(bil.results["omega"].get<double>()).epsilon(1e-9));

  auto geo = run(cfg("geodesic", {{"builtin", "torus"}, {"theta", 0.3}, {"horizon", 5}}));
  const auto& dir = geo.results["directions"][0];
  CHECK(geo.results["series"]["sys_vs_t"].size() == dir["events"].get<std::size_t>());
  auto s = plot(geo, "sys-vs-t");
  CHECK(s.find(config_hash(geo.config)) != std::string::npos);
}

TEST_CASE("command-line binary") {
  if (!std::getenv("FLATDIO_BIN")) {
    MESSAGE("FLATDIO_BIN unset; binary checks skipped");
    return;
  }
  CHECK(run_bin("scan --builtin torus --max-length 5") == 0);
  CHECK(run_bin("verify --builtin torus --property qg --max-length 20") == 2);
  CHECK(run_bin("scan --builtin sphere --max-length 5") == 1);
  CHECK(run_bin("frobnicate") == 2);

  const std::string a = "cli_bin_a.json", b = "cli_bin_b.json", conf = "cli_bin_conf.json";
  std::ofstream(conf) << R"({"command": "verify", "builtin": "torus", "property": "qg", "eps": 0.1, "max-length": 40})";
  CHECK(run_bin("verify --config " + conf + " --seed 5 --out " + a) == 0);
  CHECK(run_bin("verify --config " + conf + " --seed 5 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  // Flags override the config file.
  CHECK(run_bin("verify --config " + conf + " --max-length 30 --out " + b) == 0);
  auto jb = json::parse(slurp(b));
  CHECK(jb["config"]["params"]["max-length"] == 30);
  CHECK(jb["config"]["params"]["eps"] == 0.1);
  CHECK(run_bin("scan --config " + conf) == 2);
  for (const auto& p : {a, b, conf}) std::remove(p.c_str());
}

}  // TEST_SUITE
