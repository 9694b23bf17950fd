#include "flatdio/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include "flatdio/errors.hpp"

namespace flatdio {

std::vector<Triangle> triangulate_presentation(const PolygonPresentation& pres,
                                               const std::vector<std::vector<int>>& vsing,
                                               const std::vector<std::vector<EdgeRef>>& partner,
                                               const std::vector<std::vector<Vec2>>& shift,
                                               double tol);

int Singularity::order() const {
  return static_cast<int>(std::lround(cone_angle / (2.0 * kPi))) - 1;
}

double polygon_signed_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    s += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * s;
}

std::vector<int> TranslationSurface::stratum() const {
  std::vector<int> out;
  for (const auto& s : sings_) out.push_back(s.order());
  std::sort(out.rbegin(), out.rend());
  return out;
}

double TranslationSurface::S0() const {
  return std::sqrt(2.0) / std::sqrt(m() * std::sqrt(3.0));
}

double TranslationSurface::beta() const { return 1.0 / (3.0 * m() - 1.0); }

double TranslationSurface::log2_T0() const { return std::ldexp(1.0, 4 * m()); }

double TranslationSurface::T0() const { return std::exp2(log2_T0()); }

Vec2 TranslationSurface::edge_vector(int polygon, int edge) const {
  const auto& poly = pres_.polygons[polygon];
  return poly[(edge + 1) % poly.size()] - poly[edge];
}

namespace {

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  auto orient = [&](Vec2 p, Vec2 q, Vec2 r) {
    double v = cross(q - p, r - p);
    if (std::abs(v) <= tol) return 0;
    return v > 0 ? 1 : -1;
  };
  auto on_segment = [&](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) - tol <= r.x && r.x <= std::max(p.x, q.x) + tol &&
           std::min(p.y, q.y) - tol <= r.y && r.y <= std::max(p.y, q.y) + tol;
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 && o1 != 0 && o2 != 0 && o3 != 0 &&
      o4 != 0) {
    return true;
  }
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

void check_simple(const std::vector<Vec2>& poly, int index, double scale) {
  const std::size_t n = poly.size();
  if (n < 3) {
    throw Error(ErrorKind::NonSimplePolygon, "polygon " + std::to_string(index) + " has fewer than 3 vertices");
  }
  double tol = 1e-12 * scale * scale;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    if ((b - a).norm() <= 1e-12 * scale) {
      throw Error(ErrorKind::NonSimplePolygon, "polygon " + std::to_string(index) + " has a zero-length edge");
    }
    // Adjacent edges may only meet at their shared vertex.
    Vec2 c = poly[(i + 2) % n];
    if (std::abs(cross(b - a, c - b)) <= tol && dot(b - a, c - b) < 0) {
      throw Error(ErrorKind::NonSimplePolygon, "polygon " + std::to_string(index) + " folds back on itself");
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n], tol)) {
        throw Error(ErrorKind::NonSimplePolygon,
                    "polygon " + std::to_string(index) + " edges " + std::to_string(i) + " and " +
                        std::to_string(j) + " intersect");
      }
    }
  }
}

double interior_angle(const std::vector<Vec2>& poly, std::size_t i) {
  const std::size_t n = poly.size();
  Vec2 out = poly[(i + 1) % n] - poly[i];
  Vec2 in = poly[(i + n - 1) % n] - poly[i];
  double ang = std::atan2(cross(out, in), dot(out, in));
  if (ang <= 0) ang += 2.0 * kPi;
  return ang;
}

}  // namespace

TranslationSurface build_surface(PolygonPresentation p) {
  TranslationSurface X;
  const int np = static_cast<int>(p.polygons.size());
  if (np == 0) throw Error(ErrorKind::NonSimplePolygon, "no polygons");

  double diameter = 0.0;
  for (const auto& poly : p.polygons) {
    for (const auto& a : poly)
      for (const auto& b : poly) diameter = std::max(diameter, (a - b).norm());
  }
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw Error(ErrorKind::NonSimplePolygon, "degenerate coordinates");
  }

  double area = 0.0;
  for (int i = 0; i < np; ++i) {
    check_simple(p.polygons[i], i, diameter);
    double a = polygon_signed_area(p.polygons[i]);
    if (a <= 0.0) {
      throw Error(ErrorKind::InconsistentOrientation, "polygon " + std::to_string(i) + " is not counterclockwise");
    }
    area += a;
  }

  X.partner_.resize(np);
  X.shift_.resize(np);
  for (int i = 0; i < np; ++i) {
    X.partner_[i].assign(p.polygons[i].size(), EdgeRef{});
    X.shift_[i].assign(p.polygons[i].size(), Vec2{});
  }
  const double tol = 1e-9 * diameter;
  auto edge_vec = [&](int poly, int e) {
    const auto& P = p.polygons[poly];
    return P[(e + 1) % P.size()] - P[e];
  };
  for (const auto& pr : p.pairings) {
    if (pr.p < 0 || pr.p >= np || pr.q < 0 || pr.q >= np || pr.e < 0 ||
        pr.e >= static_cast<int>(p.polygons[pr.p].size()) || pr.f < 0 ||
        pr.f >= static_cast<int>(p.polygons[pr.q].size())) {
      throw Error(ErrorKind::InvalidPairing, "pairing references a missing edge");
    }
    if (pr.p == pr.q && pr.e == pr.f) throw Error(ErrorKind::InvalidPairing, "edge paired with itself");
    if (X.partner_[pr.p][pr.e].polygon >= 0 || X.partner_[pr.q][pr.f].polygon >= 0) {
      throw Error(ErrorKind::InvalidPairing, "edge appears in more than one pairing");
    }
    Vec2 u = edge_vec(pr.p, pr.e), w = edge_vec(pr.q, pr.f);
    if ((u + w).norm() > tol) {
      std::ostringstream os;
      os << "edges (" << pr.p << "," << pr.e << ") and (" << pr.q << "," << pr.f
         << ") are not translates of each other";
      throw Error(ErrorKind::InvalidPairing, os.str());
    }
    X.partner_[pr.p][pr.e] = {pr.q, pr.f};
    X.partner_[pr.q][pr.f] = {pr.p, pr.e};
    const auto& P = p.polygons[pr.p];
    const auto& Q = p.polygons[pr.q];
    Vec2 s = Q[(pr.f + 1) % Q.size()] - P[pr.e];
    X.shift_[pr.p][pr.e] = s;
    X.shift_[pr.q][pr.f] = -s;
  }
  for (int i = 0; i < np; ++i) {
    for (std::size_t e = 0; e < p.polygons[i].size(); ++e) {
      if (X.partner_[i][e].polygon < 0) {
        throw Error(ErrorKind::InvalidPairing,
                    "edge (" + std::to_string(i) + "," + std::to_string(e) + ") is unpaired");
      }
    }
  }

  // Corner-cycle walk: leaving corner (p, i) across its outgoing edge i lands
  // at the corner at the end of the glued edge.
  X.vsing_.resize(np);
  for (int i = 0; i < np; ++i) X.vsing_[i].assign(p.polygons[i].size(), -1);
  for (int i = 0; i < np; ++i) {
    for (std::size_t v = 0; v < p.polygons[i].size(); ++v) {
      if (X.vsing_[i][v] >= 0) continue;
      Singularity s;
      s.id = static_cast<int>(X.sings_.size());
      Corner c{i, static_cast<int>(v)};
      while (X.vsing_[c.polygon][c.vertex] < 0) {
        X.vsing_[c.polygon][c.vertex] = s.id;
        s.corners.push_back(c);
        s.cone_angle += interior_angle(p.polygons[c.polygon], c.vertex);
        EdgeRef nb = X.partner_[c.polygon][c.vertex];
        c = {nb.polygon, static_cast<int>((nb.edge + 1) % p.polygons[nb.polygon].size())};
      }
      double turns = s.cone_angle / (2.0 * kPi);
      if (std::abs(turns - std::round(turns)) > 1e-6 || std::round(turns) < 1) {
        throw Error(ErrorKind::InvalidPairing, "cone angle is not a positive multiple of 2pi");
      }
      X.sings_.push_back(std::move(s));
    }
  }

  int V = static_cast<int>(X.sings_.size());
  int E = static_cast<int>(p.pairings.size());
  int F = np;
  int chi = V - E + F;
  if (chi % 2 != 0 || chi > 2) throw Error(ErrorKind::InvalidPairing, "odd Euler characteristic");
  X.genus_ = (2 - chi) / 2;
  X.area_ = area;
  X.diameter_ = diameter;
  X.tris_ = triangulate_presentation(p, X.vsing_, X.partner_, X.shift_, diameter);
  X.pres_ = std::move(p);
  return X;
}

TranslationSurface apply_matrix(const Mat2& G, const TranslationSurface& X) {
  if (!(G.det() > 0.0)) throw Error(ErrorKind::InconsistentOrientation, "matrix must have positive determinant");
  PolygonPresentation p = X.presentation();
  for (auto& poly : p.polygons)
    for (auto& v : poly) v = G * v;
  return build_surface(std::move(p));
}

TranslationSurface normalize_area(const TranslationSurface& X) {
  double s = 1.0 / std::sqrt(X.area());
  return apply_matrix(Mat2{s, 0.0, 0.0, s}, X);
}

namespace {

PolygonPresentation torus_presentation() {
  PolygonPresentation p;
  p.name = "torus";
  p.polygons = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  p.pairings = {{0, 0, 0, 2}, {0, 1, 0, 3}};
  return p;
}

std::vector<Vec2> regular_polygon(int n, double side, double phase) {
  double R = side / (2.0 * std::sin(kPi / n));
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) {
    double a = phase + 2.0 * kPi * k / n;
    out.push_back({R * std::cos(a), R * std::sin(a)});
  }
  return out;
}

PolygonPresentation octagon_presentation() {
  PolygonPresentation p;
  p.name = "octagon";
  // Bottom edge horizontal.
  p.polygons = {regular_polygon(8, 1.0, -kPi / 2.0 - kPi / 8.0)};
  for (int e = 0; e < 4; ++e) p.pairings.push_back({0, e, 0, e + 4});
  return p;
}

PolygonPresentation double_pentagon_presentation() {
  PolygonPresentation p;
  p.name = "double-pentagon";
  auto a = regular_polygon(5, 1.0, -kPi / 2.0 - kPi / 5.0);
  std::vector<Vec2> b;
  double shift = 3.0;
  for (auto v : a) b.push_back({-v.x + shift, -v.y});
  p.polygons = {a, b};
  for (int e = 0; e < 5; ++e) p.pairings.push_back({0, e, 1, e});
  return p;
}

PolygonPresentation l_presentation(double a, double b) {
  PolygonPresentation p;
  std::ostringstream os;
  os << "L(" << a << "," << b << ")";
  p.name = os.str();
  p.polygons = {{{0, 0}, {1, 0}, {a, 0}, {a, 1}, {1, 1}, {1, b}, {0, b}, {0, 1}}};
  p.pairings = {{0, 0, 0, 5}, {0, 1, 0, 3}, {0, 2, 0, 7}, {0, 4, 0, 6}};
  return p;
}

}  // namespace

TranslationSurface builtin(const std::string& name) {
  if (name == "torus") return build_surface(torus_presentation());
  if (name == "octagon") return build_surface(octagon_presentation());
  if (name == "double-pentagon" || name == "double_pentagon") {
    return build_surface(double_pentagon_presentation());
  }
  if (name == "square-billiard") {
    RationalPolygon Q = make_rational_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    UnfoldResult u = unfold_rational_polygon(Q);
    PolygonPresentation p = u.surface.presentation();
    p.name = "square-billiard";
    return build_surface(std::move(p));
  }
  static const std::regex l_re(R"(^L\(\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*\)$)");
  std::smatch m;
  if (std::regex_match(name, m, l_re)) {
    double a = 0, b = 0;
    try {
      a = std::stod(m[1].str());
      b = std::stod(m[2].str());
    } catch (const std::exception&) {
      throw Error(ErrorKind::UnknownSurface, "cannot parse " + name);
    }
    if (!(a > 1.0 + 1e-12) || !(b > 1.0 + 1e-12)) {
      throw Error(ErrorKind::UnknownSurface, name + " is degenerate (need a > 1 and b > 1)");
    }
    return build_surface(l_presentation(a, b));
  }
  throw Error(ErrorKind::UnknownSurface, "unknown builtin surface '" + name + "'");
}

bool builtin_is_veech(const std::string& name) {
  return name == "torus" || name == "octagon" || name == "double-pentagon" ||
         name == "double_pentagon" || name == "square-billiard";
}

PolygonPresentation presentation_from_json(const nlohmann::json& j) {
  PolygonPresentation p;
  try {
    for (const auto& poly : j.at("polygons")) {
      std::vector<Vec2> loop;
      for (const auto& v : poly) loop.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      p.polygons.push_back(std::move(loop));
    }
    for (const auto& pr : j.at("pairings")) {
      p.pairings.push_back({pr.at(0).get<int>(), pr.at(1).get<int>(), pr.at(2).get<int>(), pr.at(3).get<int>()});
    }
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed surface document: ") + e.what());
  }
  return p;
}

nlohmann::json presentation_to_json(const PolygonPresentation& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["polygons"] = nlohmann::json::array();
  for (const auto& poly : p.polygons) {
    nlohmann::json loop = nlohmann::json::array();
    for (auto v : poly) loop.push_back({v.x, v.y});
    j["polygons"].push_back(loop);
  }
  j["pairings"] = nlohmann::json::array();
  for (const auto& pr : p.pairings) j["pairings"].push_back({pr.p, pr.e, pr.q, pr.f});
  return j;
}

TranslationSurface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open surface file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, "surface file " + path + ": " + e.what());
  }
  auto p = presentation_from_json(j);
  if (p.name.empty()) p.name = path;
  return build_surface(std::move(p));
}

void save_surface(const TranslationSurface& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  out << presentation_to_json(X.presentation()).dump(2) << "\n";
}

}  // namespace flatdio
