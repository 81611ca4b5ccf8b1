#include <cmath>
#include <numbers>
#include <set>

#include "blockgen/skeleton.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace blockgen;
using namespace blockgen::testing;

namespace {

Polygon l_block() { return Polygon({{0, 0}, {100, 0}, {100, 30}, {30, 30}, {30, 80}, {0, 80}}); }

Polygon u_block() {
  return Polygon({{0, 0}, {120, 0}, {120, 90}, {90, 90}, {90, 30}, {30, 30}, {30, 90}, {0, 90}});
}

// Block wrapped around a dead-end road: a rectangle with a slot and turning circle cut in.
Polygon cul_de_sac_block() {
  std::vector<Point2> ring = {{0, 0}, {140, 0}, {140, 60}, {74, 60}, {74, 48}};
  const Point2 c{70, 36};
  const double r = 12.0;
  const double a0 = std::atan2(48 - 36, 74 - 70), a1 = std::atan2(48 - 36, 66 - 70);
  for (int k = 1; k < 24; ++k) {
    const double a = a0 - k * (2 * std::numbers::pi - (a1 - a0)) / 24;
    ring.push_back(c + Point2{r * std::cos(a), r * std::sin(a)});
  }
  ring.insert(ring.end(), {{66, 48}, {66, 60}, {0, 60}});
  return Polygon(ring);
}

// Wedge: width grows linearly from 10 m to 40 m over 150 m.
Polygon wedge_block() { return Polygon({{0, -5}, {150, -20}, {150, 20}, {0, 5}}); }

BinaryMask disk_mask() {
  std::vector<Point2> ring;
  for (int k = 0; k < 64; ++k) {
    const double a = 2 * std::numbers::pi * k / 64;
    ring.push_back({30 * std::cos(a), 30 * std::sin(a)});
  }
  return rasterize(Polygon(ring));
}

double boundary_distance(const Polygon& p, Point2 q) {
  double d = 1e300;
  const auto& r = p.ring();
  for (std::size_t i = 0; i < r.size(); ++i) d = std::min(d, point_segment_distance(q, r[i], r[(i + 1) % r.size()]));
  return d;
}

// True when q lies on a foreground pixel or one of its 8 neighbours.
bool inside_dilated(const BinaryMask& m, Point2 q) {
  const int c = static_cast<int>(std::floor(q.x)), r = static_cast<int>(std::floor(q.y));
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      if (m.at(c + dc, r + dr)) return true;
  return false;
}

// Independent perpendicular ray cast against the polygon edges.
double ray_oracle(const Polygon& poly, Point2 o, Point2 d) {
  double best = -1;
  const auto& r = poly.ring();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 a = r[i], b = r[(i + 1) % r.size()];
    const Point2 e = b - a;
    const double den = d.x * (-e.y) - d.y * (-e.x);
    if (std::abs(den) < 1e-15) continue;
    const Point2 w = a - o;
    const double t = (w.x * (-e.y) - w.y * (-e.x)) / den;
    const double s = (d.x * w.y - d.y * w.x) / den;
    if (t > 1e-9 && s >= -1e-12 && s <= 1 + 1e-12 && (best < 0 || t < best)) best = t;
  }
  return best;
}

int bend_count(const std::vector<Point2>& pl, double min_turn) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < pl.size(); ++i) {
    const Point2 a = pl[i] - pl[i - 1], b = pl[i + 1] - pl[i];
    if (std::abs(std::atan2(cross(a, b), dot(a, b))) > min_turn) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("thin_mask") {
  SUBCASE("2:1 rectangle gives a midline run") {
    const BinaryMask m = rasterize(rect(0, 0, 100, 50));
    const Skeleton s = thin_mask(m);
    REQUIRE_FALSE(s.empty());
    int rmin = 64, rmax = 0;
    for (const auto& p : s) {
      rmin = std::min(rmin, p.row);
      rmax = std::max(rmax, p.row);
    }
    CHECK(rmax - rmin <= 2);
    // foreground rows are centred on the mask
    const double mid = 32.0;
    std::set<int> cols;
    for (const auto& p : s)
      if (std::abs(p.row + 0.5 - mid) <= 1.0) cols.insert(p.col);
    CHECK(cols.size() >= 62 - 31 - 2);
    CHECK(count_components(m) == 1);
  }
  SUBCASE("disk collapses to a central cluster") {
    const BinaryMask m = disk_mask();
    const Skeleton s = thin_mask(m);
    REQUIRE_FALSE(s.empty());
    int c0 = 64, c1 = 0, r0 = 64, r1 = 0;
    for (const auto& p : s) {
      c0 = std::min(c0, p.col);
      c1 = std::max(c1, p.col);
      r0 = std::min(r0, p.row);
      r1 = std::max(r1, p.row);
    }
    CHECK(c1 - c0 < 3);
    CHECK(r1 - r0 < 3);
    CHECK(std::abs((c0 + c1) / 2.0 + 0.5 - 32) <= 1.5);
  }
  SUBCASE("right-angled L thins to a single bent path") {
    // the convex-corner diagonal erodes away under this thinning
    const Skeleton s = thin_mask(rasterize(l_block()));
    CHECK(count_branch_points(s) == 0);
    int ends = 0;
    const std::set<Pixel> set(s.begin(), s.end());
    for (const auto& p : s) {
      int n = 0;
      for (int dc = -1; dc <= 1; ++dc)
        for (int dr = -1; dr <= 1; ++dr)
          if ((dc || dr) && set.count({p.col + dc, p.row + dr})) ++n;
      if (n == 1) ++ends;
    }
    CHECK(ends == 2);
  }
  SUBCASE("T shape has one branch point") {
    const Polygon t({{0, 0}, {120, 0}, {120, 24}, {72, 24}, {72, 90}, {48, 90}, {48, 24}, {0, 24}});
    CHECK(count_branch_points(thin_mask(rasterize(t))) == 1);
  }
  SUBCASE("skeleton is a single 8-connected component") {
    const BinaryMask m = rasterize(u_block());
    const Skeleton s = thin_mask(m);
    BinaryMask sm;
    for (const auto& p : s) sm.set(p.col, p.row, true);
    CHECK(count_components(sm) == 1);
  }
  SUBCASE("errors") {
    BinaryMask empty;
    CHECK_THROWS_AS(thin_mask(empty), GeometryError);
    BinaryMask two;
    for (int c = 2; c < 10; ++c)
      for (int r = 2; r < 10; ++r) {
        two.set(c, r, true);
        two.set(c + 30, r + 30, true);
      }
    CHECK(count_components(two) == 2);
    CHECK_THROWS_AS(thin_mask(two), GeometryError);
  }
}

TEST_CASE("trace_main_axis") {
  SUBCASE("rectangle spans the full mask width") {
    const BinaryMask m = rasterize(rect(0, 0, 100, 50));
    const auto line = trace_main_axis(thin_mask(m), m);
    REQUIRE(line.size() == 2);
    CHECK(line[0].x == doctest::Approx(1.0).epsilon(0.02));
    CHECK(line[1].x == doctest::Approx(63.0).epsilon(0.02));
    CHECK(std::abs(line[0].y - line[1].y) <= 1.0);
    CHECK(line[0].x < line[1].x);
  }
  SUBCASE("U block follows the U with two bends") {
    const BinaryMask m = rasterize(u_block());
    const auto line = trace_main_axis(thin_mask(m), m);
    CHECK(bend_count(line, std::numbers::pi / 6) == 2);
    for (const auto& p : line) CHECK(inside_dilated(m, p));
  }
  SUBCASE("single pixel skeleton uses the longest chord") {
    const BinaryMask m = disk_mask();
    const auto line = trace_main_axis(Skeleton{{31, 31}}, m);
    REQUIRE(line.size() == 2);
    CHECK(distance(line[0], line[1]) > 55.0);
  }
}

TEST_CASE("douglas_peucker") {
  std::vector<Point2> pts;
  for (int i = 0; i <= 20; ++i) pts.push_back({static_cast<double>(i), (i % 2) * 0.4});
  const auto out = douglas_peucker(pts, 1.0);
  CHECK(out.size() == 2);
  const std::vector<Point2> corner = {{0, 0}, {5, 0}, {10, 0}, {10, 5}, {10, 10}};
  CHECK(douglas_peucker(corner, 1.0).size() == 3);
}

TEST_CASE("extract_main_axis") {
  SUBCASE("rectangle") {
    const Polygon block = rect(0, 0, 100, 20);
    const MainAxis axis = extract_main_axis(block);
    CHECK(axis.polyline().size() == 2);
    CHECK(axis.polyline_length() == doctest::Approx(100).epsilon(1e-6));
    CHECK(local_half_width(axis, 0.5) == doctest::Approx(10).epsilon(1e-6));
    CHECK(local_half_width(axis, 0.0) == doctest::Approx(10).epsilon(1e-6));
    CHECK(local_half_width(axis, 1.0) == doctest::Approx(10).epsilon(1e-6));
    CHECK_THROWS_AS(local_half_width(axis, -0.01), GeometryError);
    CHECK_THROWS_AS(local_half_width(axis, 1.01), GeometryError);
  }
  SUBCASE("cul-de-sac block keeps one path with endpoints on the boundary") {
    const Polygon block = cul_de_sac_block();
    const MainAxis axis = extract_main_axis(block);
    const auto& pl = axis.polyline();
    CHECK(boundary_distance(block, pl.front()) < 1e-6);
    CHECK(boundary_distance(block, pl.back()) < 1e-6);
    for (std::size_t i = 1; i + 1 < pl.size(); ++i) CHECK(point_in_polygon(pl[i], block));
  }
  SUBCASE("wedge half-width is monotone and matches a ray cast") {
    const Polygon block = wedge_block();
    const MainAxis axis = extract_main_axis(block);
    double prev = -1;
    bool increasing = axis.polyline().front().x < axis.polyline().back().x;
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      const double hw = local_half_width(axis, t);
      const Point2 o = axis.point_at(t);
      const double th = axis.tangent_angle(t);
      const Point2 n{-std::sin(th), std::cos(th)};
      const double up = ray_oracle(block, o, n), dn = ray_oracle(block, o, n * -1.0);
      if (up > 0 && dn > 0) CHECK(hw == doctest::Approx((up + dn) / 2).epsilon(1e-6));
      if (prev >= 0) CHECK((increasing ? hw >= prev - 1e-9 : hw <= prev + 1e-9));
      prev = hw;
    }
  }
  SUBCASE("L and U blocks: strictly increasing arc length, endpoints on boundary") {
    for (const Polygon& block : {l_block(), u_block(), cul_de_sac_block()}) {
      const MainAxis axis = extract_main_axis(block);
      const auto& cl = axis.cumulative_length();
      for (std::size_t i = 1; i < cl.size(); ++i) CHECK(cl[i] > cl[i - 1]);
      CHECK(boundary_distance(block, axis.polyline().front()) < 1e-6);
      CHECK(boundary_distance(block, axis.polyline().back()) < 1e-6);
      CHECK(axis.length() >= axis.polyline_length());
    }
  }
}

TEST_CASE("axis frame is invertible") {
  for (const Polygon& block : {rect(0, 0, 100, 20), l_block(), u_block(), wedge_block()}) {
    const MainAxis axis = extract_main_axis(block);
    Rng rng(21);
    int tested = 0;
    while (tested < 300) {
      const OrientedBox box = min_area_oriented_box(block);
      const Point2 p = box.to_world({rng.uniform(-box.width / 2, box.width / 2),
                                     rng.uniform(-box.height / 2, box.height / 2)});
      if (!point_in_polygon(p, block)) continue;
      ++tested;
      const AxisCoord c = axis.project(p);
      CHECK(c.fraction >= 0.0);
      CHECK(c.fraction <= 1.0);
      CHECK(distance(axis.locate(c.fraction, c.offset), p) < 1e-6);
    }
  }
}

TEST_CASE("straight axis coordinates survive a round trip") {
  const MainAxis axis = extract_main_axis(wedge_block());
  REQUIRE(axis.polyline().size() == 2);
  for (int k = 0; k <= 20; ++k) {
    const double t = k / 20.0;
    const AxisCoord c = axis.project(axis.locate(t, 0.3));
    CHECK(c.fraction == doctest::Approx(t).epsilon(1e-9));
    CHECK(c.offset == doctest::Approx(0.3).epsilon(1e-9));
  }
}

TEST_CASE("main axis properties") {
  SUBCASE("reflection reflects the axis") {
    for (const Polygon& block : {l_block(), u_block(), wedge_block()}) {
      CAPTURE(block.size());
      std::vector<Point2> mirrored;
      for (const auto& p : block.ring()) mirrored.push_back({-p.x, p.y});
      const Polygon refl(mirrored);
      const auto a = extract_main_axis(block).polyline();
      const auto b = extract_main_axis(refl).polyline();
      const double px = min_area_oriented_box(block).width / 62.0;
      // compare as point sets of the reflected polyline, either direction
      for (const auto& p : b) {
        const Point2 q{-p.x, p.y};
        double d = 1e300;
        for (std::size_t i = 0; i + 1 < a.size(); ++i) d = std::min(d, point_segment_distance(q, a[i], a[i + 1]));
        CHECK(d <= 1.5 * px);
      }
    }
  }
  SUBCASE("convex masks: axis at least as long as the box width minus 2 px") {
    Rng rng(31);
    for (int i = 0; i < 10; ++i) {
      const double w = rng.uniform(40, 200), h = rng.uniform(15, 40);
      const Polygon block = rect(0, 0, w, h).rotated(rng.uniform(0, 3));
      const BinaryMask m = rasterize(block);
      const auto line = trace_main_axis(thin_mask(m), m);
      double len = 0;
      for (std::size_t k = 1; k < line.size(); ++k) len += distance(line[k - 1], line[k]);
      CHECK(len >= 62 - 2);
      for (const auto& p : line) CHECK(inside_dilated(m, p));
    }
  }
}
