#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "flatdio/cli.hpp"

using flatdio::Error;
using flatdio::ErrorKind;
using nlohmann::json;

namespace {

struct Common {
  std::string config, out, csv, svg;
  bool json_stdout = false;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

// Numbers are stored as numbers so the config echo and its hash do not
// depend on how a value was spelled.
json value_of(const std::string& s) {
  try {
    std::size_t pos = 0;
    double x = std::stod(s, &pos);
    if (pos == s.size()) return x;
  } catch (const std::exception&) {
  }
  return s;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  f << text;
}

const char* default_plot(const std::string& command) {
  if (command == "scan") return "count-vs-L";
  if (command == "geodesic") return "sys-vs-t";
  if (command == "billiard") return "loglog-recurrence";
  if (command == "dimension") return "interval-levels";
  return "count-vs-L";
}

struct Sub {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::vector<std::string> flags;
  std::map<std::string, bool> flag_values;
};

void add_surface_options(Sub& s) {
  s.app->add_option("--builtin", s.values["builtin"], "builtin surface name");
  s.app->add_option("--surface", s.values["surface"], "surface JSON file");
  s.app->add_option("--polygon", s.values["polygon"], "rational polygon vertex JSON file (unfolded)");
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file with flat keys");
  app->add_option("--out", c.out, "write the JSON report here");
  app->add_option("--csv", c.csv, "write the human-readable output here");
  app->add_option("--svg", c.svg, "write the default plot here");
  app->add_flag("--json", c.json_stdout, "print the JSON report instead of the human output");
  app->add_option("--seed", c.seed, "random seed (default 0)");
  app->add_flag("--timing", c.timing, "record wall-clock time in the report");
}

int run_command(const std::string& name, const Sub& sub, const Common& common) {
  flatdio::ExperimentConfig flags;
  flags.command = name;
  for (const auto& [k, v] : sub.values)
    if (!v.empty()) flags.params[k] = value_of(v);
  for (const auto& [k, v] : sub.flag_values)
    if (v) flags.params[k] = true;
  flags.timing = common.timing;

  flatdio::ExperimentConfig cfg;
  if (!common.config.empty()) {
    cfg = flatdio::load_config(common.config);
    if (!cfg.command.empty() && cfg.command != name) {
      throw Error(ErrorKind::ConfigError, "config is for '" + cfg.command + "', not '" + name + "'");
    }
  }
  cfg = flatdio::merge_config(cfg, flags);
  if (common.seed) cfg.seed = *common.seed;

  flatdio::ExperimentReport rep = flatdio::run(cfg);
  const std::string js = rep.to_json().dump(2) + "\n";
  if (!common.out.empty()) write_file(common.out, js);
  if (!common.csv.empty()) write_file(common.csv, flatdio::human_output(rep));
  if (!common.svg.empty()) write_file(common.svg, flatdio::plot(rep, default_plot(name)));
  std::cout << (common.json_stdout ? js : flatdio::human_output(rep));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatdio: Diophantine experiments on translation surfaces"};
  app.require_subcommand(1);
  Common common;
  std::map<std::string, Sub> subs;

  auto make = [&](const std::string& name, const std::string& help) -> Sub& {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    add_common(s.app, common);
    return s;
  };
  auto opt = [](Sub& s, const std::string& key, const std::string& help) {
    s.app->add_option("--" + key, s.values[key], help);
  };
  auto flag = [](Sub& s, const std::string& key, const std::string& help) {
    s.app->add_flag("--" + key, s.flag_values[key], help);
  };

  Sub& scan = make("scan", "enumerate saddle connections or cylinders");
  add_surface_options(scan);
  opt(scan, "max-length", "length bound L");
  flag(scan, "cylinders", "list cylinders instead of saddle connections");

  Sub& verify = make("verify", "check a resonant-set property");
  add_surface_options(verify);
  opt(verify, "property", "qg | iqg | ubiquity | dirichlet | decaying");
  opt(verify, "eps", "epsilon");
  opt(verify, "max-length", "length bound L");
  opt(verify, "mode", "theorem | empirical");
  opt(verify, "set", "sc | cyl");
  opt(verify, "samples", "number of sampled intervals");
  opt(verify, "bound", "explicit growth constant");
  opt(verify, "K", "ubiquity base");
  opt(verify, "depth", "decaying: largest n");
  opt(verify, "r0", "decaying: radius r0");

  Sub& dim = make("dimension", "estimate the dimension of bad(eps)");
  add_surface_options(dim);
  opt(dim, "set", "sc | cyl");
  opt(dim, "eps", "epsilon");
  opt(dim, "method", "upper | lower | box");
  opt(dim, "depth", "levels");
  opt(dim, "max-length", "box method: length bound");
  opt(dim, "L0", "box method: lengths up to L0 are ignored");

  Sub& geo = make("geodesic", "systole along a Teichmueller geodesic");
  add_surface_options(geo);
  opt(geo, "theta", "direction");
  opt(geo, "random", "number of random directions");
  opt(geo, "horizon", "time horizon T");
  opt(geo, "alpha", "log-law exponent alpha");

  Sub& bil = make("billiard", "recurrence rate of a directional flow");
  add_surface_options(bil);
  opt(bil, "theta", "direction");
  opt(bil, "point", "start point x,y in polygon 0");
  opt(bil, "radii", "r0,k for radii r0 2^-j, j < k");
  opt(bil, "budget", "time budget per return");

  CLI::App* plot_app = app.add_subcommand("plot", "render a report series as SVG");
  std::string report_path, kind, plot_out;
  plot_app->add_option("--report", report_path, "JSON report")->required();
  plot_app->add_option("--kind", kind, "sys-vs-t | loglog-recurrence | interval-levels | count-vs-L | trajectory")
      ->required();
  plot_app->add_option("--out", plot_out, "output SVG (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    if (rc == 0) return 0;
    std::cerr << flatdio::error_json(Error(ErrorKind::ConfigError, e.what())).dump() << "\n";
    return flatdio::exit_code(ErrorKind::ConfigError);
  }

  try {
    if (plot_app->parsed()) {
      std::ifstream in(report_path);
      if (!in) throw Error(ErrorKind::ConfigError, "cannot open report " + report_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("bad report: ") + e.what());
      }
      std::string svg = flatdio::plot(flatdio::ExperimentReport::from_json(j), kind);
      if (plot_out.empty()) std::cout << svg;
      else write_file(plot_out, svg);
      return 0;
    }
    for (auto& [name, sub] : subs)
      if (sub.app->parsed()) return run_command(name, sub, common);
  } catch (const Error& e) {
    std::cout << flatdio::error_json(e).dump() << "\n";
    return flatdio::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cout << json{{"error", "Internal"}, {"message", e.what()}, {"exit_code", 1}}.dump() << "\n";
    return 1;
  }
  return 1;
}
