#include "blockgen/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

// Plain double arithmetic in overlays; the default integer rescaling moves
// clipped vertices by up to ~1e-5 m.
#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace blockgen {

namespace {

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) {
    const double v = cross(q - p, r - p);
    if (std::abs(v) <= kCoordEps * kCoordEps) return 0;
    return v > 0 ? 1 : -1;
  };
  auto on_segment = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) - kCoordEps <= r.x && r.x <= std::max(p.x, q.x) + kCoordEps &&
           std::min(p.y, q.y) - kCoordEps <= r.y && r.y <= std::max(p.y, q.y) + kCoordEps;
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

std::vector<Point2> clean_ring(std::vector<Point2> ring) {
  for (const auto& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite polygon coordinate");
  }
  std::vector<Point2> out;
  out.reserve(ring.size());
  for (const auto& p : ring) {
    if (!out.empty() && distance(out.back(), p) <= kCoordEps) continue;
    out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= kCoordEps) out.pop_back();
  if (out.size() < 3) throw GeometryError("polygon needs at least 3 distinct vertices");
  const double a = signed_area(out);
  if (std::abs(a) <= kCoordEps * kCoordEps) throw GeometryError("degenerate polygon (zero area)");
  if (a < 0) std::reverse(out.begin(), out.end());
  return out;
}

bool is_simple(const std::vector<Point2>& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = r[i], b = r[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, r[j], r[(j + 1) % n])) return false;
    }
  }
  return true;
}

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, false>;  // CCW, open

BgPolygon to_bg(const Polygon& p) {
  BgPolygon out;
  for (const auto& v : p.ring()) out.outer().emplace_back(v.x, v.y);
  return out;
}

}  // namespace

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + d * t);
}

Polygon::Polygon(std::vector<Point2> ring) : ring_(clean_ring(std::move(ring))) {
  if (!is_simple(ring_)) throw GeometryError("polygon ring self-intersects");
}

Polygon Polygon::trusted(std::vector<Point2> ring) {
  Polygon p;
  p.ring_ = clean_ring(std::move(ring));
  return p;
}

Polygon Polygon::translated(Point2 d) const {
  Polygon p = *this;
  for (auto& v : p.ring_) v += d;
  return p;
}

Polygon Polygon::rotated(double angle, Point2 about) const {
  Polygon p = *this;
  for (auto& v : p.ring_) v = about + rotate(v - about, angle);
  return p;
}

Polygon Polygon::scaled(double s, Point2 about) const {
  if (!(s > 0.0)) throw GeometryError("scale factor must be positive");
  Polygon p = *this;
  for (auto& v : p.ring_) v = about + (v - about) * s;
  return p;
}

std::array<Point2, 4> OrientedBox::corners() const {
  const Point2 u = axis_u() * (width / 2), v = axis_v() * (height / 2);
  return {center - u - v, center + u - v, center + u + v, center - u + v};
}

Polygon OrientedBox::to_polygon() const {
  const auto c = corners();
  return Polygon::trusted({c.begin(), c.end()});
}

Point2 OrientedBox::to_local(Point2 p) const {
  const Point2 d = p - center;
  return {dot(d, axis_u()), dot(d, axis_v())};
}

Point2 OrientedBox::to_world(Point2 local) const {
  return center + axis_u() * local.x + axis_v() * local.y;
}

OrientedBox make_box(Point2 center, double extent_u, double extent_v, double angle) {
  if (extent_v > extent_u) {
    std::swap(extent_u, extent_v);
    angle += std::numbers::pi / 2;
  }
  angle = std::fmod(angle, std::numbers::pi);
  if (angle < 0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle -= std::numbers::pi;
  return OrientedBox{center, extent_u, extent_v, angle};
}

Point2 MaskFrame::to_mask(Point2 world) const {
  const Point2 r = rotate(world - center, -angle) * pixels_per_meter;
  return {r.x + resolution / 2.0, r.y + resolution / 2.0};
}

Point2 MaskFrame::to_world(Point2 mask) const {
  const Point2 r{(mask.x - resolution / 2.0) / pixels_per_meter, (mask.y - resolution / 2.0) / pixels_per_meter};
  return center + rotate(r, angle);
}

int BinaryMask::count() const {
  return static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double signed_area(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += cross(ring[i], ring[(i + 1) % n]);
  return s / 2.0;
}

double polygon_area(const Polygon& p) { return signed_area(p.ring()); }

Point2 centroid(const Polygon& p) {
  const auto& r = p.ring();
  const std::size_t n = r.size();
  // shift for numerical stability far from the origin
  const Point2 o = r[0];
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p0 = r[i] - o, p1 = r[(i + 1) % n] - o;
    const double c = cross(p0, p1);
    a += c;
    cx += (p0.x + p1.x) * c;
    cy += (p0.y + p1.y) * c;
  }
  return o + Point2{cx / (3.0 * a), cy / (3.0 * a)};
}

double perimeter(const Polygon& p) {
  double s = 0.0;
  const auto& r = p.ring();
  for (std::size_t i = 0; i < r.size(); ++i) s += distance(r[i], r[(i + 1) % r.size()]);
  return s;
}

bool point_in_ring(Point2 pt, std::span<const Point2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = ring[i], b = ring[j];
    if ((a.y > pt.y) != (b.y > pt.y)) {
      const double x = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (pt.x < x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(Point2 pt, const Polygon& p) { return point_in_ring(pt, p.ring()); }

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

OrientedBox min_area_oriented_box(std::span<const Point2> pts) {
  const auto hull = convex_hull({pts.begin(), pts.end()});
  if (hull.size() < 3) throw GeometryError("oriented box of degenerate point set");
  OrientedBox best;
  double best_area = std::numeric_limits<double>::infinity();
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = hull[(i + 1) % n] - hull[i];
    const double len = norm(e);
    if (len <= kCoordEps) continue;
    const Point2 u = e / len, v = perp(u);
    double u0 = std::numeric_limits<double>::infinity(), u1 = -u0, v0 = u0, v1 = -u0;
    for (const auto& p : hull) {
      const double a = dot(p, u), b = dot(p, v);
      u0 = std::min(u0, a);
      u1 = std::max(u1, a);
      v0 = std::min(v0, b);
      v1 = std::max(v1, b);
    }
    const double area = (u1 - u0) * (v1 - v0);
    // relative tolerance keeps the first of equal-area candidates
    if (area < best_area * (1.0 - 1e-12)) {
      best_area = area;
      const Point2 c = u * ((u0 + u1) / 2) + v * ((v0 + v1) / 2);
      best = make_box(c, u1 - u0, v1 - v0, std::atan2(u.y, u.x));
    }
  }
  if (!(best.height > 0.0)) throw GeometryError("oriented box has zero height");
  return best;
}

OrientedBox min_area_oriented_box(const Polygon& p) { return min_area_oriented_box(p.ring()); }

std::vector<Point2> clip_to_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
  std::vector<Point2> cur(subject.begin(), subject.end()), next;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !cur.empty(); ++e) {
    const Point2 a = clip[e], b = clip[(e + 1) % m];
    const Point2 d = b - a;
    next.clear();
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = cur[i], q = cur[(i + 1) % n];
      const double sp = cross(d, p - a), sq = cross(d, q - a);
      if (sp >= 0) next.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        const double t = sp / (sp - sq);
        next.push_back(p + (q - p) * t);
      }
    }
    std::swap(cur, next);
  }
  return cur;
}

std::vector<Point2> clip_to_rect(std::span<const Point2> subject, double x0, double y0, double x1,
                                 double y1) {
  std::vector<Point2> cur(subject.begin(), subject.end()), next;
  // Each pass keeps points with sign * (coord - bound) >= 0.
  auto pass = [&](int axis, double bound, double sign) {
    next.clear();
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = cur[i], q = cur[(i + 1) % n];
      const double sp = sign * ((axis == 0 ? p.x : p.y) - bound);
      const double sq = sign * ((axis == 0 ? q.x : q.y) - bound);
      if (sp >= 0) next.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        const double t = sp / (sp - sq);
        Point2 r = p + (q - p) * t;
        (axis == 0 ? r.x : r.y) = bound;
        next.push_back(r);
      }
    }
    std::swap(cur, next);
  };
  pass(0, x0, 1.0);
  if (!cur.empty()) pass(0, x1, -1.0);
  if (!cur.empty()) pass(1, y0, 1.0);
  if (!cur.empty()) pass(1, y1, -1.0);
  return cur;
}

// Signed fan decomposition: with both rings fanned from a common origin,
// area(A & B) = sum_ij sign_i sign_j area(T_i & T_j), each term a convex clip.
// Exact for any pair of simple polygons, concave or not.
double intersection_area(const Polygon& a, const Polygon& b) {
  const auto& ra = a.ring();
  const auto& rb = b.ring();
  const Point2 o = ra[0];
  double total = 0.0;
  std::array<Point2, 3> ta{}, tb{};
  for (std::size_t i = 0; i < ra.size(); ++i) {
    Point2 p = ra[i] - o, q = ra[(i + 1) % ra.size()] - o;
    const double ca = cross(p, q);
    if (std::abs(ca) <= 0.0) continue;
    const double sa = ca > 0 ? 1.0 : -1.0;
    if (sa < 0) std::swap(p, q);
    ta = {Point2{}, p, q};
    for (std::size_t j = 0; j < rb.size(); ++j) {
      Point2 r = rb[j] - o, s = rb[(j + 1) % rb.size()] - o;
      const double cb = cross(r, s);
      if (std::abs(cb) <= 0.0) continue;
      const double sb = cb > 0 ? 1.0 : -1.0;
      if (sb < 0) std::swap(r, s);
      tb = {Point2{}, r, s};
      const auto piece = clip_to_convex(tb, ta);
      total += sa * sb * signed_area(piece);
    }
  }
  const double cap = std::min(polygon_area(a), polygon_area(b));
  return std::clamp(total, 0.0, cap);
}

double difference_area(const Polygon& a, const Polygon& b) {
  return std::max(0.0, polygon_area(a) - intersection_area(a, b));
}

double iou(const Polygon& a, const Polygon& b) {
  const double aa = polygon_area(a), ab = polygon_area(b);
  if (aa <= 0.0 && ab <= 0.0) throw GeometryError("iou of two zero-area polygons");
  const double inter = intersection_area(a, b);
  const double uni = aa + ab - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Polygon> intersection(const Polygon& a, const Polygon& b) {
  std::vector<BgPolygon> out;
  bg::intersection(to_bg(a), to_bg(b), out);
  std::vector<Polygon> pieces;
  for (const auto& piece : out) {
    std::vector<Point2> ring;
    for (const auto& v : piece.outer()) ring.push_back({v.x(), v.y()});
    try {
      pieces.push_back(Polygon::trusted(std::move(ring)));
    } catch (const GeometryError&) {
      // slivers collapse to nothing
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Polygon& x, const Polygon& y) { return polygon_area(x) > polygon_area(y); });
  return pieces;
}

std::vector<Point2> densify_boundary(const Polygon& p, double max_step) {
  if (!(max_step > 0.0)) throw GeometryError("densify step must be positive");
  std::vector<Point2> out;
  const auto& r = p.ring();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 a = r[i], b = r[(i + 1) % r.size()];
    const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / max_step)));
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / n));
  }
  return out;
}

namespace {

double directed_hausdorff(const std::vector<Point2>& from, const Polygon& to) {
  const auto& r = to.ring();
  double worst = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size() && best > worst; ++i) {
      best = std::min(best, point_segment_distance(p, r[i], r[(i + 1) % r.size()]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff_distance(const Polygon& a, const Polygon& b, double step) {
  return std::max(directed_hausdorff(densify_boundary(a, step), b),
                  directed_hausdorff(densify_boundary(b, step), a));
}

double ray_hit_distance(const Polygon& p, Point2 origin, Point2 direction) {
  const double dl = norm(direction);
  if (dl <= 0.0) return -1.0;
  const Point2 d = direction / dl;
  double best = std::numeric_limits<double>::infinity();
  const auto& r = p.ring();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 a = r[i], e = r[(i + 1) % r.size()] - a;
    const double den = cross(d, e);
    if (std::abs(den) <= 1e-15 * norm(e)) continue;
    const Point2 w = a - origin;
    const double t = cross(w, e) / den;   // along the ray
    const double s = cross(w, d) / den;   // along the edge
    if (s < -1e-12 || s > 1.0 + 1e-12) continue;
    if (t > 1e-9 && t < best) best = t;
  }
  return std::isfinite(best) ? best : -1.0;
}

BinaryMask rasterize(const Polygon& p, int resolution) {
  if (resolution != BinaryMask::kResolution) throw GeometryError("mask resolution is fixed at 64");
  const OrientedBox box = min_area_oriented_box(p);
  BinaryMask mask;
  const double fit = resolution - 2.0;  // one-pixel margin on each side
  mask.frame = MaskFrame{box.center, box.angle, fit / box.width, resolution};
  mask.scale = resolution / mask.frame.pixels_per_meter;
  std::vector<Point2> local;
  local.reserve(p.size());
  for (const auto& v : p.ring()) local.push_back(mask.frame.to_mask(v));
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      if (point_in_ring({col + 0.5, row + 0.5}, local)) mask.set(col, row, true);
    }
  }
  return mask;
}

}  // namespace blockgen
