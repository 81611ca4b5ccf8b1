#include "blockgen/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blockgen/shapefit.hpp"

namespace blockgen {

namespace {

Polygon rectangle_block(Rng& rng) {
  const double l = rng.uniform(90, 200), h = rng.uniform(30, 70);
  return Polygon({{-l / 2, -h / 2}, {l / 2, -h / 2}, {l / 2, h / 2}, {-l / 2, h / 2}});
}

Polygon wedge_block(Rng& rng) {
  const double l = rng.uniform(110, 200), a = rng.uniform(28, 40), b = rng.uniform(50, 80);
  return Polygon({{-l / 2, -a / 2}, {l / 2, -b / 2}, {l / 2, b / 2}, {-l / 2, a / 2}});
}

Polygon l_block(Rng& rng) {
  const double w = rng.uniform(110, 180), h = rng.uniform(90, 150);
  const double arm_h = rng.uniform(32, 45), arm_v = rng.uniform(32, 45);
  return Polygon({{0, 0}, {w, 0}, {w, arm_h}, {arm_v, arm_h}, {arm_v, h}, {0, h}}).translated({-w / 2, -h / 2});
}

Polygon cul_de_sac_block(Rng& rng) {
  const double l = rng.uniform(130, 200), h = rng.uniform(55, 75);
  const double cx = rng.uniform(-0.15, 0.15) * l;
  const double slot = rng.uniform(7, 9), r = rng.uniform(10, 13);
  const double depth = rng.uniform(0.35, 0.5) * h;  // from the top edge to the circle center
  const double top = h / 2, cy = top - depth;
  const double half = slot / 2;
  const double dy = std::sqrt(r * r - half * half);
  std::vector<Point2> ring = {{-l / 2, -h / 2}, {l / 2, -h / 2}, {l / 2, top}, {cx + half, top}, {cx + half, cy + dy}};
  const double a0 = std::atan2(dy, half), a1 = std::atan2(dy, -half);
  const int steps = 20;
  const double sweep = 2 * std::numbers::pi - (a1 - a0);
  for (int k = 1; k < steps; ++k) {
    const double a = a0 - k * sweep / steps;
    ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  ring.push_back({cx - half, cy + dy});
  ring.push_back({cx - half, top});
  ring.push_back({-l / 2, top});
  return Polygon(ring);
}

ShapeParams random_params(Rng& rng) {
  ShapeParams p;
  const double u = rng.uniform();
  p.tag = u < 0.55 ? ShapeType::Rect : u < 0.75 ? ShapeType::L : u < 0.9 ? ShapeType::U : ShapeType::X;
  switch (p.tag) {
    case ShapeType::Rect: break;
    case ShapeType::L:
      p.orientation = rng.uniform_int(0, 3);
      p.fractions = {rng.uniform(0.3, 0.55), rng.uniform(0.3, 0.55), 0, 0};
      break;
    case ShapeType::U:
      p.orientation = rng.uniform_int(0, 1);
      p.fractions = {rng.uniform(0.3, 0.45), rng.uniform(0.35, 0.55), rng.uniform(0.4, 0.6), 0};
      break;
    case ShapeType::X:
      p.fractions = {rng.uniform(0.35, 0.5), rng.uniform(0.4, 0.6), rng.uniform(0.35, 0.5), rng.uniform(0.4, 0.6)};
      break;
  }
  return p;
}

bool inside(const Polygon& block, const Polygon& b) {
  for (const auto& v : b.ring()) {
    if (!point_in_polygon(v, block)) return false;
  }
  return difference_area(b, block) <= 1e-6 * polygon_area(b);
}

}  // namespace

Polygon synthetic_block(BlockKind kind, Rng& rng, Point2 center) {
  Polygon p = [&] {
    switch (kind) {
      case BlockKind::Wedge: return wedge_block(rng);
      case BlockKind::LBlock: return l_block(rng);
      case BlockKind::CulDeSac: return cul_de_sac_block(rng);
      case BlockKind::Rectangle: break;
    }
    return rectangle_block(rng);
  }();
  return p.rotated(rng.uniform(0, 2 * std::numbers::pi)).translated(center);
}

std::vector<Polygon> populate_block(const Polygon& block, const MainAxis& axis, Rng& rng,
                                    const PopulateOptions& options) {
  // narrowest chord decides how many rows fit
  double narrow = 1e300;
  for (int k = 1; k < 20; ++k) narrow = std::min(narrow, 2.0 * axis.half_width(k / 20.0));
  const int fit_rows = std::clamp(static_cast<int>(narrow / 17.0), 1, options.max_rows);
  const int rows = rng.uniform_int(std::max(1, fit_rows - 1), fit_rows);

  std::vector<Polygon> out;
  for (int r = 0; r < rows; ++r) {
    const double lane = 2.0 / rows;               // share of the normalized width
    const double y = -1.0 + lane * (r + 0.5);     // lane centre in y'
    double s = rng.uniform(2.0, 6.0);             // blended arc length cursor
    const double depth_scale = rng.uniform(0.5, 0.75);
    while (s < axis.length()) {
      double w = rng.uniform(options.min_width, options.max_width);
      double t = std::min(1.0, (s + w / 2) / axis.length());
      // frontage is never shorter than depth, so the box's long side follows the axis
      const double depth = std::clamp(depth_scale * lane * axis.half_width(t), 6.0, 22.0);
      if (depth > w) {
        w = depth;
        t = std::min(1.0, (s + w / 2) / axis.length());
      }
      s += w + options.gap;
      if (rng.uniform() > options.fill_probability) continue;
      const Point2 c = axis.locate(t, y);
      const double theta = axis.tangent_angle(t);
      const OrientedBox box = make_box(c, w, depth, theta);
      const Polygon b = shape_template(random_params(rng), box);
      if (!inside(block, b)) continue;
      bool clash = false;
      for (const auto& o : out) {
        if (intersection_area(o, b) > 1e-9) {
          clash = true;
          break;
        }
      }
      if (!clash) out.push_back(b);
    }
  }
  return out;
}

SyntheticScene synthetic_scene(BlockKind kind, Rng& rng, Point2 center, const PopulateOptions& options) {
  Polygon block = synthetic_block(kind, rng, center);
  const MainAxis axis = extract_main_axis(block);
  auto buildings = populate_block(block, axis, rng, options);
  return {std::move(block), std::move(buildings)};
}

}  // namespace blockgen
