#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "flatdio/cli.hpp"

namespace flatdio {

using nlohmann::json;

namespace {

constexpr double kW = 640, kH = 420, kMargin = 60;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kW - 2 * kMargin); }
  double py(double y) const { return kH - kMargin - (y - y0) / (y1 - y0) * (kH - 2 * kMargin); }
};

Frame frame_for(const std::vector<std::pair<double, double>>& pts) {
  Frame f{pts[0].first, pts[0].first, pts[0].second, pts[0].second};
  for (auto [x, y] : pts) {
    f.x0 = std::min(f.x0, x);
    f.x1 = std::max(f.x1, x);
    f.y0 = std::min(f.y0, y);
    f.y1 = std::max(f.y1, y);
  }
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
  return f;
}

void axes(std::ostringstream& o, const Frame& f, const std::string& xl, const std::string& yl) {
  o << "<line x1='" << kMargin << "' y1='" << kH - kMargin << "' x2='" << kW - kMargin << "' y2='" << kH - kMargin
    << "' stroke='black'/>\n";
  o << "<line x1='" << kMargin << "' y1='" << kMargin << "' x2='" << kMargin << "' y2='" << kH - kMargin
    << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    double x = f.x0 + (f.x1 - f.x0) * i / 4.0, y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    o << "<text x='" << f.px(x) << "' y='" << kH - kMargin + 16 << "' font-size='10' text-anchor='middle'>"
      << fmt("%.3g", x) << "</text>\n";
    o << "<text x='" << kMargin - 6 << "' y='" << f.py(y) + 3 << "' font-size='10' text-anchor='end'>"
      << fmt("%.3g", y) << "</text>\n";
  }
  o << "<text x='" << kW / 2 << "' y='" << kH - 15 << "' font-size='12' text-anchor='middle'>" << xl << "</text>\n";
  o << "<text x='15' y='" << kH / 2 << "' font-size='12' transform='rotate(-90 15 " << kH / 2
    << ")' text-anchor='middle'>" << yl << "</text>\n";
}

std::vector<std::pair<double, double>> xy_series(const json& s) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : s) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return pts;
}

void polyline(std::ostringstream& o, const Frame& f, const std::vector<std::pair<double, double>>& pts, bool step) {
  o << "<polyline fill='none' stroke='steelblue' points='";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (step && i > 0) o << f.px(pts[i].first) << "," << f.py(pts[i - 1].second) << " ";
    o << f.px(pts[i].first) << "," << f.py(pts[i].second) << " ";
  }
  o << "'/>\n";
}

}  // namespace

std::string plot(const ExperimentReport& r, const std::string& kind) {
  std::string key;
  if (kind == "sys-vs-t") key = "sys_vs_t";
  else if (kind == "loglog-recurrence") key = "loglog_recurrence";
  else if (kind == "interval-levels") key = "interval_levels";
  else if (kind == "count-vs-L") key = "count_vs_L";
  else if (kind == "trajectory") key = "trajectory";
  else throw Error(ErrorKind::ConfigError, "unknown plot kind '" + kind + "'");
  const json* series = nullptr;
  if (r.results.contains("series") && r.results["series"].contains(key)) series = &r.results["series"][key];
  if (!series || series->empty()) throw Error(ErrorKind::MissingSeries, "report has no " + key + " series");

  std::ostringstream o;
  o << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH << "'>\n";
  o << "<rect width='100%' height='100%' fill='white'/>\n";
  o << "<text x='" << kMargin << "' y='20' font-size='12'>" << kind << "  config " << config_hash(r.config)
    << "</text>\n";

  if (key == "interval_levels") {
    const json& levels = *series;
    double lo = 1e300, hi = -1e300;
    for (const auto& lv : levels)
      for (const auto& I : lv) {
        lo = std::min(lo, I.at(0).get<double>());
        hi = std::max(hi, I.at(1).get<double>());
      }
    if (!(hi > lo)) throw Error(ErrorKind::MissingSeries, "interval_levels series holds no intervals");
    Frame f{lo, hi, 0.0, static_cast<double>(levels.size())};
    axes(o, f, "theta", "level");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      double y = f.py(static_cast<double>(levels.size() - k) - 0.5);
      for (const auto& I : levels[k]) {
        double a = f.px(I.at(0).get<double>()), b = f.px(I.at(1).get<double>());
        o << "<line x1='" << a << "' y1='" << y << "' x2='" << std::max(b, a + 0.5) << "' y2='" << y
          << "' stroke='steelblue' stroke-width='6'/>\n";
      }
    }
  } else {
    auto pts = xy_series(*series);
    Frame f = frame_for(pts);
    if (key == "sys_vs_t") {
      for (auto& [t, y] : pts) y = -std::log(y);
      f = frame_for(pts);
      axes(o, f, "t", "-log sys");
      polyline(o, f, pts, false);
    } else if (key == "trajectory") {
      axes(o, f, "x", "y");
      for (auto [x, y] : pts) o << "<circle cx='" << f.px(x) << "' cy='" << f.py(y) << "' r='1' fill='steelblue'/>\n";
    } else if (key == "count_vs_L") {
      axes(o, f, "L", "count");
      polyline(o, f, pts, true);
    } else {
      axes(o, f, "-log r", "log R(r)");
      for (auto [x, y] : pts) o << "<circle cx='" << f.px(x) << "' cy='" << f.py(y) << "' r='3' fill='steelblue'/>\n";
      double omega = std::nan("");
      if (r.results.contains("omega") && r.results["omega"].is_number()) omega = r.results["omega"].get<double>();
      o << "<text x='" << kW - kMargin << "' y='" << kMargin << "' font-size='12' text-anchor='end'>omega = "
        << fmt("%.17g", omega) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace flatdio
