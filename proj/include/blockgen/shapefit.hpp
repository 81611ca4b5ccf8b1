#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "blockgen/geometry.hpp"

namespace blockgen {

enum class ShapeType : int { Rect = 0, L = 1, U = 2, X = 3 };
inline constexpr int kShapeTypeCount = 4;

std::string_view shape_name(ShapeType t);
int parameter_count(ShapeType t);

// Notch fractions relative to the box, all in (0.05, 0.95).
//   L: {notch width, notch height} cut from one corner; orientation picks the
//      corner (0: +u+v, 1: -u+v, 2: -u-v, 3: +u-v).
//   U: {notch width, notch depth, offset} cut into one side; orientation picks
//      the side (0: +v, 1: -v, 2: +u, 3: -u). Offset slides the notch along
//      the side between its end margins.
//   X: {vertical bar width, its offset, horizontal bar height, its offset};
//      the two bars form a cross and orientation is unused.
struct ShapeParams {
  static constexpr double kMinFraction = 0.05;
  static constexpr double kMaxFraction = 0.95;

  ShapeType tag = ShapeType::Rect;
  int orientation = 0;
  std::array<double, 4> fractions{};

  bool valid() const;
};

// Axis-aligned rectangle in box-local coordinates.
struct LocalRect {
  double x0, y0, x1, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Disjoint rectangles whose union is the template, in box-local coordinates.
std::vector<LocalRect> template_rects(const ShapeParams& params, double width, double height);
// Template area divided by box area.
double template_occupancy(const ShapeParams& params);

// Throws GeometryError for invalid params.
Polygon shape_template(const ShapeParams& params, const OrientedBox& box);

struct FitResult {
  ShapeType shape = ShapeType::Rect;
  double occupancy = 1.0;
  double iou = 1.0;
  double hausdorff = 0.0;
  ShapeParams params;
  OrientedBox frame;  // box the template was fitted in
};

struct FitOptions {
  int restarts = 3;
  double tolerance = 1e-4;
  int max_iterations = 200;
  double tie_margin = 1e-3;
  std::uint64_t seed = 0x5eed;
};

FitResult fit_building(const Polygon& footprint, const FitOptions& options = {});

// Ratio of footprint area to its minimum-area oriented box.
double occupancy(const Polygon& footprint);

}  // namespace blockgen
