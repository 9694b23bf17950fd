#pragma once

#include <array>
#include <string>
#include <vector>

#include "flatdio/geom.hpp"
#include "json.hpp"

namespace flatdio {

// Edge e of polygon p runs from vertex e to vertex e+1 (mod n). Polygons are
// listed counterclockwise, so the two sides of a glued pair traverse opposite
// vectors: edge (p,e) is glued to edge (q,f) when v(p,e) = -v(q,f).
struct Pairing {
  int p = 0, e = 0, q = 0, f = 0;
};

struct PolygonPresentation {
  std::vector<std::vector<Vec2>> polygons;
  std::vector<Pairing> pairings;
  std::string name;
};

struct EdgeRef {
  int polygon = -1;
  int edge = -1;
};

struct Corner {
  int polygon = 0;
  int vertex = 0;
};

struct Singularity {
  int id = 0;
  std::vector<Corner> corners;  // in cyclic (counterclockwise) order
  double cone_angle = 0.0;      // radians, a multiple of 2 pi
  int order() const;            // k with cone angle 2 pi (k + 1)
};

// Triangles of the derived triangulation, in the chart of their polygon.
// Edge k runs from v[k] to v[k+1]. A point x near edge k, expressed in the
// neighbour's chart, is x + shift[k].
struct Triangle {
  std::array<Vec2, 3> v;
  std::array<int, 3> sing{};
  std::array<int, 3> nb_tri{};
  std::array<int, 3> nb_edge{};
  std::array<Vec2, 3> shift;
  int polygon = 0;
};

class TranslationSurface {
 public:
  const PolygonPresentation& presentation() const { return pres_; }
  const std::string& name() const { return pres_.name; }
  const std::vector<Singularity>& singularities() const { return sings_; }
  const std::vector<Triangle>& triangles() const { return tris_; }

  double area() const { return area_; }
  int genus() const { return genus_; }
  // Total multiplicity 2g - 2 + #singularities (marked points included).
  int m() const { return 2 * genus_ - 2 + static_cast<int>(sings_.size()); }
  std::vector<int> stratum() const;
  // Largest polygon diameter; the scale for geometric tolerances.
  double diameter() const { return diameter_; }

  // sqrt(2) / sqrt(m sqrt 3).
  double S0() const;
  // 1 / (3m - 1).
  double beta() const;
  // log2 of T0 = 2^(2^(4m)); T0 itself overflows a double for m >= 3.
  double log2_T0() const;
  double T0() const;

  EdgeRef partner(int polygon, int edge) const { return partner_[polygon][edge]; }
  // Translation taking points of edge (polygon, edge) to the glued edge.
  Vec2 edge_shift(int polygon, int edge) const { return shift_[polygon][edge]; }
  // Singularity id of a polygon vertex.
  int vertex_singularity(int polygon, int vertex) const { return vsing_[polygon][vertex]; }
  Vec2 edge_vector(int polygon, int edge) const;

 private:
  friend TranslationSurface build_surface(PolygonPresentation p);

  PolygonPresentation pres_;
  std::vector<Singularity> sings_;
  std::vector<Triangle> tris_;
  std::vector<std::vector<EdgeRef>> partner_;
  std::vector<std::vector<Vec2>> shift_;
  std::vector<std::vector<int>> vsing_;
  double area_ = 0.0;
  double diameter_ = 0.0;
  int genus_ = 0;
};

// Validates the presentation, groups corners into singularities and derives
// genus, stratum and a triangulation. Throws InvalidPairing, NonSimplePolygon
// or InconsistentOrientation.
TranslationSurface build_surface(PolygonPresentation p);

// Affine image G.X: vertices mapped by G, pairings unchanged. det G must be
// positive (InconsistentOrientation otherwise).
TranslationSurface apply_matrix(const Mat2& G, const TranslationSurface& X);

// Scale coordinates by 1/sqrt(area).
TranslationSurface normalize_area(const TranslationSurface& X);

// "torus", "octagon", "double-pentagon", "L(a,b)" (a, b > 1) and
// "square-billiard" (the unfolded unit square). Throws UnknownSurface.
TranslationSurface builtin(const std::string& name);

// Builtin surfaces whose affine group is a lattice.
bool builtin_is_veech(const std::string& name);

PolygonPresentation presentation_from_json(const nlohmann::json& j);
nlohmann::json presentation_to_json(const PolygonPresentation& p);
TranslationSurface load_surface(const std::string& path);
void save_surface(const TranslationSurface& X, const std::string& path);

// Signed shoelace area of a vertex loop.
double polygon_signed_area(const std::vector<Vec2>& poly);

// ---- rational billiards -------------------------------------------------

struct RationalAngle {
  long p = 0;
  long q = 1;  // angle = p/q * pi
};

struct RationalPolygon {
  std::vector<Vec2> vertices;  // counterclockwise
  std::vector<RationalAngle> angles;
};

// Computes interior angles and their rational multiples of pi (denominators up
// to max_denominator). Throws IrrationalAngle, NonSimplePolygon or
// InconsistentOrientation.
RationalPolygon make_rational_polygon(const std::vector<Vec2>& vertices, long max_denominator = 1000);

struct UnfoldResult {
  TranslationSurface surface;
  std::vector<Mat2> group;  // linear parts of the copies, copy i = group[i](Q)
};

// Glues |D| reflected copies of Q, D the dihedral group generated by the
// reflections in the sides. Throws GroupTooLarge when |D| exceeds max_group
// (0 selects the default cap 2 * lcm(denominators) * 2).
UnfoldResult unfold_rational_polygon(const RationalPolygon& Q, long max_group = 0);

}  // namespace flatdio
