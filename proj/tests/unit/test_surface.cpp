#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "flatdio/scan.hpp"
#include "flatdio/surface.hpp"
#include "support.hpp"

using namespace flatdio;

namespace {

const char* kBuiltins[] = {"torus", "octagon", "double-pentagon", "square-billiard", "L(2,3)", "L(1.5,2.5)"};

double gauss_bonnet_sum(const TranslationSurface& X) {
  double s = 0;
  for (const auto& z : X.singularities()) s += z.cone_angle / (2 * kPi) - 1;
  return s;
}

Mat2 random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  return rotation_matrix(3 * U(rng)) * geodesic_matrix(0.5 * U(rng)) * horocycle_matrix(U(rng));
}

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("square torus") {
  auto X = builtin("torus");
  CHECK(X.genus() == 1);
  CHECK(X.m() == 1);
  CHECK(X.area() == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(X.singularities().size() == 1);
  CHECK(X.singularities()[0].cone_angle == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(X.stratum() == std::vector<int>{0});
  CHECK(X.S0() == doctest::Approx(std::sqrt(2.0) / std::pow(3.0, 0.25)).epsilon(1e-15));
  CHECK(X.beta() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("regular octagon") {
  auto X = builtin("octagon");
  CHECK(X.genus() == 2);
  CHECK(X.m() == 3);
  REQUIRE(X.singularities().size() == 1);
  CHECK(X.singularities()[0].cone_angle == doctest::Approx(6 * kPi).epsilon(1e-12));
  CHECK(X.stratum() == std::vector<int>{2});
  // Shoelace oracle for the regular octagon with unit circumradius scaled to unit area.
  CHECK(normalize_area(X).area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("invariants on every builtin") {
  for (const char* name : kBuiltins) {
    CAPTURE(name);
    auto X = builtin(name);
    CHECK(gauss_bonnet_sum(X) == doctest::Approx(2.0 * X.genus() - 2).epsilon(1e-12));
    CHECK(X.m() >= 1);
    CHECK(X.beta() > 0.0);
    CHECK(X.beta() <= 1.0);
    int sum_k = 0;
    for (int k : X.stratum()) sum_k += k;
    CHECK(sum_k == 2 * X.genus() - 2);
    // Triangles tile the polygons.
    double tri_area = 0;
    for (const auto& t : X.triangles()) tri_area += cross(t.v[1] - t.v[0], t.v[2] - t.v[0]) / 2;
    CHECK(tri_area == doctest::Approx(X.area()).epsilon(1e-12));
  }
}

TEST_CASE("systole is at most S0 after normalization") {
  for (const char* name : kBuiltins) {
    CAPTURE(name);
    auto X = normalize_area(builtin(name));
    CHECK(systole(X) <= X.S0() + 1e-12);
  }
}

TEST_CASE("invalid presentations") {
  PolygonPresentation p;
  p.polygons = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  p.pairings = {{0, 0, 0, 2}, {0, 1, 0, 3}};
  CHECK_NOTHROW(build_surface(p));
  auto bad = p;
  bad.polygons = {{{0, 0}, {2, 0}, {1, 1}, {0, 1}}};
  CHECK(kind_of([&] { build_surface(bad); }) == ErrorKind::InvalidPairing);
  bad = p;
  bad.polygons = {{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
  CHECK(kind_of([&] { build_surface(bad); }) == ErrorKind::InconsistentOrientation);
  bad = p;
  bad.polygons = {{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
  CHECK(kind_of([&] { build_surface(bad); }) == ErrorKind::NonSimplePolygon);
  CHECK(kind_of([] { builtin("sphere"); }) == ErrorKind::UnknownSurface);
  CHECK(kind_of([] { builtin("L(1,1)"); }) == ErrorKind::UnknownSurface);
}

TEST_CASE("apply_matrix") {
  auto X = builtin("octagon");
  auto Y = apply_matrix(Mat2{}, X);
  for (std::size_t i = 0; i < X.presentation().polygons[0].size(); ++i)
    CHECK(Y.presentation().polygons[0][i] == X.presentation().polygons[0][i]);
  auto R = apply_matrix(geodesic_matrix(std::log(3.0)), builtin("torus"));
  const auto& sq = R.presentation().polygons[0];
  double w = 0, h = 0;
  for (auto v : sq) {
    w = std::max(w, v.x);
    h = std::max(h, v.y);
  }
  CHECK(w == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(h == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  std::mt19937_64 rng(0);
  for (int i = 0; i < 100; ++i) {
    Mat2 G1 = random_sl2(rng), G2 = random_sl2(rng);
    CHECK(apply_matrix(G1, X).area() == doctest::Approx(X.area()).epsilon(1e-10));
    auto A = apply_matrix(G2, apply_matrix(G1, X));
    auto B = apply_matrix(G2 * G1, X);
    for (std::size_t k = 0; k < A.presentation().polygons[0].size(); ++k) {
      CHECK((A.presentation().polygons[0][k] - B.presentation().polygons[0][k]).norm() < 1e-10);
    }
  }
}

TEST_CASE("normalize_area") {
  PolygonPresentation p;
  p.polygons = {{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  p.pairings = {{0, 0, 0, 2}, {0, 1, 0, 3}};
  auto X = normalize_area(build_surface(p));
  CHECK(X.area() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(X.presentation().polygons[0][2].x == doctest::Approx(1.0).epsilon(1e-12));
  auto T = builtin("torus");
  CHECK(normalize_area(T).presentation().polygons[0][2] == T.presentation().polygons[0][2]);
}

TEST_CASE("unfolding rational polygons") {
  auto sq = unfold_rational_polygon(make_rational_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK(sq.group.size() == 4);
  CHECK(sq.surface.genus() == 1);
  CHECK(sq.surface.area() == doctest::Approx(4.0).epsilon(1e-12));

  auto iso = unfold_rational_polygon(make_rational_polygon({{0, 0}, {1, 0}, {0, 1}}));
  CHECK(iso.group.size() == 8);
  CHECK(iso.surface.genus() == 1);
  CHECK(iso.surface.area() == doctest::Approx(8 * 0.5).epsilon(1e-12));

  // Angles pi/2, pi/5, 3pi/10.
  const double a = kPi / 5;
  auto tri = unfold_rational_polygon(make_rational_polygon({{0, 0}, {std::cos(a), 0}, {0, std::sin(a)}}));
  CHECK(tri.group.size() == 20);
  CHECK(tri.surface.genus() == 2);
  CHECK(tri.surface.area() == doctest::Approx(20 * std::cos(a) * std::sin(a) / 2).epsilon(1e-12));

  CHECK(kind_of([] { make_rational_polygon({{0, 0}, {1, 0}, {0.3, std::sqrt(2.0)}}, 50); }) ==
        ErrorKind::IrrationalAngle);
  CHECK(kind_of([&] { unfold_rational_polygon(make_rational_polygon({{0, 0}, {std::cos(a), 0}, {0, std::sin(a)}}), 10); }) ==
        ErrorKind::GroupTooLarge);
}

TEST_CASE("surface JSON round trip") {
  auto X = builtin("double-pentagon");
  auto j = presentation_to_json(X.presentation());
  auto Y = build_surface(presentation_from_json(j));
  CHECK(Y.area() == doctest::Approx(X.area()).epsilon(1e-15));
  CHECK(Y.genus() == X.genus());
  CHECK(presentation_to_json(Y.presentation()) == j);
  const std::string path = "surface_roundtrip_test.json";
  save_surface(X, path);
  auto Z = load_surface(path);
  CHECK(Z.stratum() == X.stratum());
  std::remove(path.c_str());
}

}  // TEST_SUITE
