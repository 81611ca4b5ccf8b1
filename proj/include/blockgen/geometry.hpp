#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockgen {

// Coincidence tolerance for coordinates, in meters.
inline constexpr double kCoordEps = 1e-9;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2 operator/(double s) const { return {x / s, y / s}; }
  Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 rotate(Point2 p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}
// Left-hand normal of a direction.
inline Point2 perp(Point2 d) { return {-d.y, d.x}; }

double point_segment_distance(Point2 p, Point2 a, Point2 b);

// Simple polygon with a counter-clockwise ring; closure is implicit.
//
// The constructor drops a repeated closing vertex and consecutive duplicates,
// reverses clockwise input, and rejects rings that are too short, non-finite,
// self-intersecting or of zero area.
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> ring);

  // Skips the simplicity test; for rings built by construction (templates,
  // rectangles). Orientation is still normalized and area must be positive.
  static Polygon trusted(std::vector<Point2> ring);

  const std::vector<Point2>& ring() const { return ring_; }
  std::size_t size() const { return ring_.size(); }
  const Point2& operator[](std::size_t i) const { return ring_[i]; }

  Polygon translated(Point2 d) const;
  Polygon rotated(double angle, Point2 about = {}) const;
  Polygon scaled(double s, Point2 about = {}) const;

 private:
  Polygon() = default;
  std::vector<Point2> ring_;
};

struct OrientedBox {
  Point2 center;
  double width = 0.0;   // along the angle direction, >= height
  double height = 0.0;
  double angle = 0.0;   // radians in [0, pi)

  double area() const { return width * height; }
  Point2 axis_u() const { return {std::cos(angle), std::sin(angle)}; }
  Point2 axis_v() const { return perp(axis_u()); }
  std::array<Point2, 4> corners() const;
  Polygon to_polygon() const;
  // Local (u, v) coordinates of a world point, u along the width.
  Point2 to_local(Point2 p) const;
  Point2 to_world(Point2 local) const;
};

// Builds a box with width >= height, swapping axes if needed.
OrientedBox make_box(Point2 center, double extent_u, double extent_v, double angle);

// Maps between world meters and mask pixel coordinates. Mask coordinates have
// u to the right and v up; pixel (col, row) covers [col, col+1) x [row, row+1).
struct MaskFrame {
  Point2 center;               // world point mapped to the mask center
  double angle = 0.0;          // world direction that becomes +u
  double pixels_per_meter = 1.0;
  int resolution = 64;

  Point2 to_mask(Point2 world) const;
  Point2 to_world(Point2 mask) const;
};

struct BinaryMask {
  static constexpr int kResolution = 64;

  std::vector<std::uint8_t> bits = std::vector<std::uint8_t>(kResolution * kResolution, 0);
  double scale = 1.0;  // meters per mask width
  MaskFrame frame;

  bool at(int col, int row) const {
    if (col < 0 || row < 0 || col >= kResolution || row >= kResolution) return false;
    return bits[static_cast<std::size_t>(row) * kResolution + col] != 0;
  }
  void set(int col, int row, bool v) {
    bits[static_cast<std::size_t>(row) * kResolution + col] = v ? 1 : 0;
  }
  // True when the mask-space point falls on a foreground pixel.
  bool contains(Point2 mask_point) const {
    return at(static_cast<int>(std::floor(mask_point.x)), static_cast<int>(std::floor(mask_point.y)));
  }
  int count() const;
  double pixel_size() const { return scale / kResolution; }
};

double signed_area(std::span<const Point2> ring);
double polygon_area(const Polygon& p);
Point2 centroid(const Polygon& p);
double perimeter(const Polygon& p);

// Even-odd crossing test; boundary points may land on either side.
bool point_in_polygon(Point2 pt, const Polygon& p);
bool point_in_ring(Point2 pt, std::span<const Point2> ring);

std::vector<Point2> convex_hull(std::vector<Point2> pts);

OrientedBox min_area_oriented_box(const Polygon& p);
OrientedBox min_area_oriented_box(std::span<const Point2> pts);

// Clips a ring (any orientation, possibly concave) against the convex region
// to the left of each directed edge of `clip`, which must be CCW and convex.
// The output can contain zero-width bridges, but its signed area is exact.
std::vector<Point2> clip_to_convex(std::span<const Point2> subject, std::span<const Point2> clip);
// Same against an axis-aligned rectangle [x0,x1] x [y0,y1].
std::vector<Point2> clip_to_rect(std::span<const Point2> subject, double x0, double y0, double x1,
                                 double y1);

double intersection_area(const Polygon& a, const Polygon& b);
double difference_area(const Polygon& a, const Polygon& b);
double iou(const Polygon& a, const Polygon& b);

// Boolean intersection returning polygon pieces (largest first).
std::vector<Polygon> intersection(const Polygon& a, const Polygon& b);

std::vector<Point2> densify_boundary(const Polygon& p, double max_step);
double hausdorff_distance(const Polygon& a, const Polygon& b, double step = 0.1);

// First boundary crossing along a ray, or a negative value if none.
double ray_hit_distance(const Polygon& p, Point2 origin, Point2 direction);

BinaryMask rasterize(const Polygon& p, int resolution = BinaryMask::kResolution);

}  // namespace blockgen
