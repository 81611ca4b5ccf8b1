#pragma once

#include <vector>

#include "blockgen/geometry.hpp"

namespace blockgen {

struct Pixel {
  int col = 0;
  int row = 0;
  bool operator==(const Pixel&) const = default;
  auto operator<=>(const Pixel&) const = default;
};

// One-pixel-wide skeleton pixels, sorted by (col, row).
using Skeleton = std::vector<Pixel>;

int count_components(const BinaryMask& mask);

// Zhang-Suen thinning. Throws GeometryError for an empty or disconnected mask.
Skeleton thin_mask(const BinaryMask& mask);

// Number of junction clusters (8-connected groups of skeleton pixels that
// have more than two skeleton neighbours).
int count_branch_points(const Skeleton& skel);

// Main-axis polyline in mask coordinates: longest geodesic path through the
// spur-pruned skeleton, Douglas-Peucker simplified at one pixel, endpoints
// pushed along their end tangents onto the mask boundary. Ordered so the
// first point has the smaller u.
std::vector<Point2> trace_main_axis(const Skeleton& skel, const BinaryMask& mask);

std::vector<Point2> douglas_peucker(const std::vector<Point2>& pts, double tolerance);

// Position on the axis in blended arc length. Each interior vertex owns a
// joint of length half_width * |turn| that parameterizes the outer wedge of
// the bend, which keeps the axis-relative frame invertible around corners.
struct AxisCoord {
  double fraction = 0.0;  // blended arc length / total, in [0, 1]
  double offset = 0.0;    // signed distance, positive on the left
};

class MainAxis {
 public:
  // Takes the polyline as-is (world meters) and the boundary used for
  // half-width ray casts.
  static MainAxis from_polyline(std::vector<Point2> polyline, Polygon boundary);

  // Re-centres vertices between the boundary walls and extends both ends
  // along their tangents onto the boundary.
  static MainAxis fit(const std::vector<Point2>& rough, const Polygon& boundary);

  const std::vector<Point2>& polyline() const { return polyline_; }
  const std::vector<double>& cumulative_length() const { return cumulative_; }
  const std::vector<double>& vertex_half_widths() const { return vertex_half_widths_; }
  const Polygon& boundary() const { return boundary_; }

  double polyline_length() const { return cumulative_.back(); }
  // Total blended length (polyline plus joints); the normalizer for x' and w'.
  double length() const { return param_length_; }

  AxisCoord project(Point2 p) const;
  Point2 locate(double fraction, double offset) const;
  Point2 point_at(double fraction) const { return locate(fraction, 0.0); }
  // Direction of the axis at a fraction, as an angle in radians.
  double tangent_angle(double fraction) const;
  double half_width(double fraction) const;

 private:
  MainAxis(std::vector<Point2> polyline, Polygon boundary);

  struct Piece {
    double start = 0.0;   // blended arc-length start
    double length = 0.0;
    int index = 0;        // segment index, or vertex index for joints
    bool joint = false;
  };
  const Piece& piece_at(double s) const;
  Point2 normal_at(const Piece& piece, double s) const;
  Point2 base_at(const Piece& piece, double s) const;
  double turn_at(int vertex) const;
  double raw_half_width(Point2 origin, Point2 normal) const;

  std::vector<Point2> polyline_;
  std::vector<double> cumulative_;
  std::vector<double> vertex_half_widths_;
  std::vector<Piece> pieces_;
  double param_length_ = 0.0;
  double min_half_width_ = 0.0;
  Polygon boundary_;
};

// Full extraction: rasterize, thin, trace, map to world, fit to the block.
MainAxis extract_main_axis(const Polygon& block);

// Half-width at an arc-length fraction; throws for t outside [0, 1].
double local_half_width(const MainAxis& axis, double t);

}  // namespace blockgen
