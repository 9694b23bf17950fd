#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flatdio/geom.hpp"
#include "flatdio/surface.hpp"

namespace flatdio {

struct SaddleConnection {
  Vec2 holonomy;
  int start_sing = -1;
  int end_sing = -1;
  // Triangle corner the connection leaves from; chart_path() starts here.
  int start_tri = -1;
  int start_corner = -1;

  double length() const { return holonomy.norm(); }
};

// Search region around each source singularity. The disk of radius
// max_length is always applied. The optional box is |Re(box_theta, v)| <= box_re,
// |Im(box_theta, v)| <= box_im. The optional sector keeps directions whose
// canonical value lies in [sector_lo, sector_hi] (mod pi, may wrap).
struct ScanRegion {
  double max_length = 0.0;
  bool use_box = false;
  double box_theta = 0.0;
  double box_re = 0.0;
  double box_im = 0.0;
  bool use_sector = false;
  double sector_lo = 0.0;
  double sector_hi = 0.0;
  // Node cap for the chart development; 0 reads FLATDIO_BUDGET or uses the default.
  std::uint64_t budget = 0;
  int threads = 0;  // 0 = hardware concurrency
};

std::uint64_t default_scan_budget();

// Every oriented saddle connection with |hol| <= L, sorted by (length, angle).
// Throws BudgetExceeded.
std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& X, double L);
std::vector<SaddleConnection> enumerate_in_region(const TranslationSurface& X, const ScanRegion& region);

// The straight segment of a saddle connection, split at triangle crossings.
struct ChartSegment {
  int triangle = -1;
  Vec2 from;  // in the triangle's chart
  Vec2 to;
};
std::vector<ChartSegment> chart_path(const TranslationSurface& X, const SaddleConnection& sc);

double systole(const TranslationSurface& X);

struct Cylinder {
  Vec2 core;  // hol(sigma)
  double circumference = 0.0;
  double width = 0.0;
  double area = 0.0;
  double theta = 0.0;
  std::vector<Vec2> boundary;  // holonomies of boundary saddle connections
};

// Maximal cylinders in the direction of `dir` with circumference <= max_circ.
std::vector<Cylinder> cylinders_in_direction(const TranslationSurface& X, Vec2 dir, double max_circ);
// All maximal cylinders with circumference <= L, sorted by (circumference, angle).
std::vector<Cylinder> enumerate_cylinders(const TranslationSurface& X, double L);

enum class ResonantKind { sc, cyl };
const char* resonant_kind_name(ResonantKind k);

struct ResonantRecord {
  double theta = 0.0;
  double l = 0.0;
  Vec2 rep;  // a shortest representative in direction theta
  // Cylinder witness data, zero for sc records.
  double width = 0.0;
  double area = 0.0;
};

struct ResonantSet {
  std::vector<ResonantRecord> records;  // sorted by theta, one per direction
  double length_bound = 0.0;
  ResonantKind kind = ResonantKind::sc;
  std::string surface;
  int m = 1;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

// Deduplicate holonomies by direction, keeping the shortest, sorted by theta.
ResonantSet resonant_from_vectors(const std::vector<Vec2>& vs, double L, ResonantKind kind);

ResonantSet resonant_sc(const TranslationSurface& X, double L);
// Restricted to the region; records are exact for directions inside it.
ResonantSet resonant_sc_region(const TranslationSurface& X, const ScanRegion& region);
// Records with l <= L and |theta - center| <= halfwidth (mod pi).
ResonantSet resonant_sc_window(const TranslationSurface& X, double center, double halfwidth, double L);
// Requires area 1 (NotUnitArea). Keeps cylinders with area > 1/m.
ResonantSet resonant_cyl(const TranslationSurface& X, double L);

double cyl_shortest(const TranslationSurface& X);

// Primitive integer vectors with norm <= L (both orientations). L <= 1e4.
std::vector<Vec2> torus_oracle(double L);

// Square torus only: its saddle connections are the primitive vectors, so the
// records of a sector come from a lattice walk in O(L + count).
std::vector<ResonantRecord> torus_sector_records(double center, double halfwidth, double L);

void write_saddle_csv(std::ostream& out, const std::vector<SaddleConnection>& scs);
void write_cylinder_csv(std::ostream& out, const std::vector<Cylinder>& cyls);

}  // namespace flatdio
