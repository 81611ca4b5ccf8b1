#include "blockgen/shapefit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blockgen/powell.hpp"
#include "blockgen/random.hpp"

namespace blockgen {

namespace {

// Maps a point built in the orientation-0 frame to the requested orientation.
Point2 orient_point(ShapeType tag, int orientation, Point2 p) {
  switch (tag) {
    case ShapeType::L: {
      const double sx = (orientation == 1 || orientation == 2) ? -1.0 : 1.0;
      const double sy = (orientation == 2 || orientation == 3) ? -1.0 : 1.0;
      return {sx * p.x, sy * p.y};
    }
    case ShapeType::U:
      switch (orientation) {
        case 1: return {p.x, -p.y};
        case 2: return {p.y, p.x};
        case 3: return {-p.y, -p.x};
        default: return p;
      }
    default:
      return p;
  }
}

// Dimensions of the orientation-0 build frame.
std::pair<double, double> build_dims(const ShapeParams& p, double w, double h) {
  if (p.tag == ShapeType::U && (p.orientation == 2 || p.orientation == 3)) return {h, w};
  return {w, h};
}

std::vector<Point2> outline_local(const ShapeParams& p, double width, double height) {
  const auto [w, h] = build_dims(p, width, height);
  const double hw = w / 2, hh = h / 2;
  const auto& f = p.fractions;
  std::vector<Point2> pts;
  switch (p.tag) {
    case ShapeType::Rect:
      pts = {{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}};
      break;
    case ShapeType::L: {
      const double nw = f[0] * w, nh = f[1] * h;
      pts = {{-hw, -hh}, {hw, -hh}, {hw, hh - nh}, {hw - nw, hh - nh}, {hw - nw, hh}, {-hw, hh}};
      break;
    }
    case ShapeType::U: {
      const double nw = f[0] * w, nd = f[1] * h;
      const double c = -hw + nw / 2 + f[2] * (w - nw);
      const double n0 = c - nw / 2, n1 = c + nw / 2;
      pts = {{-hw, -hh}, {hw, -hh}, {hw, hh}, {n1, hh}, {n1, hh - nd}, {n0, hh - nd}, {n0, hh}, {-hw, hh}};
      break;
    }
    case ShapeType::X: {
      const double bw = f[0] * w, bh = f[2] * h;
      const double cx = -hw + bw / 2 + f[1] * (w - bw), cy = -hh + bh / 2 + f[3] * (h - bh);
      const double v0 = cx - bw / 2, v1 = cx + bw / 2, h0 = cy - bh / 2, h1 = cy + bh / 2;
      pts = {{v0, -hh}, {v1, -hh}, {v1, h0}, {hw, h0}, {hw, h1}, {v1, h1},
             {v1, hh},  {v0, hh},  {v0, h1}, {-hw, h1}, {-hw, h0}, {v0, h0}};
      break;
    }
  }
  for (auto& q : pts) q = orient_point(p.tag, p.orientation, q);
  return pts;
}

std::vector<std::pair<double, double>> fraction_bounds(int n) {
  return std::vector<std::pair<double, double>>(
      n, {ShapeParams::kMinFraction + 1e-6, ShapeParams::kMaxFraction - 1e-6});
}

int orientation_count(ShapeType t) {
  return (t == ShapeType::L || t == ShapeType::U) ? 4 : 1;
}

struct LocalFit {
  ShapeParams params;
  double iou = 0.0;
};

// IoU of a template against the footprint already expressed in the frame.
double local_iou(const ShapeParams& params, const std::vector<Point2>& local, double footprint_area,
                 double width, double height) {
  const auto rects = template_rects(params, width, height);
  double inter = 0.0, tarea = 0.0;
  for (const auto& r : rects) {
    tarea += r.area();
    inter += std::abs(signed_area(clip_to_rect(local, r.x0, r.y0, r.x1, r.y1)));
  }
  const double uni = tarea + footprint_area - inter;
  return uni > 0 ? inter / uni : 0.0;
}

LocalFit fit_in_frame(const std::vector<Point2>& local, double area, const OrientedBox& frame,
                      ShapeType tag, const FitOptions& options) {
  LocalFit best;
  best.params.tag = tag;
  if (tag == ShapeType::Rect) {
    best.iou = local_iou(best.params, local, area, frame.width, frame.height);
    return best;
  }
  const int n = parameter_count(tag);
  const auto bounds = fraction_bounds(n);
  best.iou = -1.0;
  for (int orient = 0; orient < orientation_count(tag); ++orient) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(tag) * 16 + orient));
    ShapeParams trial;
    trial.tag = tag;
    trial.orientation = orient;
    auto objective = [&](std::span<const double> x) {
      for (int i = 0; i < n; ++i) trial.fractions[i] = x[i];
      return -local_iou(trial, local, area, frame.width, frame.height);
    };
    for (int r = 0; r < options.restarts; ++r) {
      std::vector<double> x0(n, 0.5);
      if (r > 0) {
        for (auto& v : x0) v = rng.uniform(0.15, 0.85);
      }
      const PowellResult res =
          powell_minimize(objective, x0, bounds, {options.tolerance, options.max_iterations});
      if (-res.value > best.iou) {
        best.iou = -res.value;
        best.params.orientation = orient;
        best.params.fractions = {};
        for (int i = 0; i < n; ++i) best.params.fractions[i] = res.x[i];
      }
    }
  }
  return best;
}

// Candidate frames: the minimum-area box, plus the bounding box aligned with
// the longest footprint edge when that differs (cross shapes tilt their
// minimum-area box towards the diagonal).
std::vector<OrientedBox> candidate_frames(const Polygon& footprint) {
  std::vector<OrientedBox> frames = {min_area_oriented_box(footprint)};
  const auto& r = footprint.ring();
  double longest = -1.0;
  double angle = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 e = r[(i + 1) % r.size()] - r[i];
    if (norm(e) > longest) {
      longest = norm(e);
      angle = std::atan2(e.y, e.x);
    }
  }
  const double quarter = std::numbers::pi / 2;
  double diff = std::fmod(std::abs(angle - frames[0].angle), quarter);
  diff = std::min(diff, quarter - diff);
  if (diff > std::numbers::pi / 180.0) {
    const Point2 u{std::cos(angle), std::sin(angle)}, v = perp(u);
    double u0 = 1e300, u1 = -1e300, v0 = 1e300, v1 = -1e300;
    for (const auto& p : r) {
      u0 = std::min(u0, dot(p, u));
      u1 = std::max(u1, dot(p, u));
      v0 = std::min(v0, dot(p, v));
      v1 = std::max(v1, dot(p, v));
    }
    frames.push_back(make_box(u * ((u0 + u1) / 2) + v * ((v0 + v1) / 2), u1 - u0, v1 - v0, angle));
  }
  return frames;
}

}  // namespace

std::string_view shape_name(ShapeType t) {
  switch (t) {
    case ShapeType::Rect: return "rect";
    case ShapeType::L: return "L";
    case ShapeType::U: return "U";
    case ShapeType::X: return "X";
  }
  return "?";
}

int parameter_count(ShapeType t) {
  switch (t) {
    case ShapeType::Rect: return 0;
    case ShapeType::L: return 2;
    case ShapeType::U: return 3;
    case ShapeType::X: return 4;
  }
  return 0;
}

bool ShapeParams::valid() const {
  const int n = parameter_count(tag);
  if (orientation < 0 || orientation >= orientation_count(tag)) return false;
  for (int i = 0; i < n; ++i) {
    if (!(fractions[i] > kMinFraction && fractions[i] < kMaxFraction)) return false;
  }
  return true;
}

std::vector<LocalRect> template_rects(const ShapeParams& p, double width, double height) {
  const auto [w, h] = build_dims(p, width, height);
  const double hw = w / 2, hh = h / 2;
  const auto& f = p.fractions;
  std::vector<LocalRect> rects;
  switch (p.tag) {
    case ShapeType::Rect:
      rects = {{-hw, -hh, hw, hh}};
      break;
    case ShapeType::L: {
      const double nw = f[0] * w, nh = f[1] * h;
      rects = {{-hw, -hh, hw, hh - nh}, {-hw, hh - nh, hw - nw, hh}};
      break;
    }
    case ShapeType::U: {
      const double nw = f[0] * w, nd = f[1] * h;
      const double c = -hw + nw / 2 + f[2] * (w - nw);
      rects = {{-hw, -hh, hw, hh - nd}, {-hw, hh - nd, c - nw / 2, hh}, {c + nw / 2, hh - nd, hw, hh}};
      break;
    }
    case ShapeType::X: {
      const double bw = f[0] * w, bh = f[2] * h;
      const double cx = -hw + bw / 2 + f[1] * (w - bw), cy = -hh + bh / 2 + f[3] * (h - bh);
      const double v0 = cx - bw / 2, v1 = cx + bw / 2, h0 = cy - bh / 2, h1 = cy + bh / 2;
      rects = {{v0, -hh, v1, hh}, {-hw, h0, v0, h1}, {v1, h0, hw, h1}};
      break;
    }
  }
  for (auto& r : rects) {
    const Point2 a = orient_point(p.tag, p.orientation, {r.x0, r.y0});
    const Point2 b = orient_point(p.tag, p.orientation, {r.x1, r.y1});
    r = {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
  }
  return rects;
}

double template_occupancy(const ShapeParams& p) {
  const auto& f = p.fractions;
  switch (p.tag) {
    case ShapeType::Rect: return 1.0;
    case ShapeType::L: return 1.0 - f[0] * f[1];
    case ShapeType::U: return 1.0 - f[0] * f[1];
    case ShapeType::X: return f[0] + f[2] - f[0] * f[2];
  }
  return 1.0;
}

Polygon shape_template(const ShapeParams& params, const OrientedBox& box) {
  if (!params.valid()) throw GeometryError("shape parameters outside (0.05, 0.95)");
  if (!(box.width > 0 && box.height > 0)) throw GeometryError("template box must have positive size");
  auto pts = outline_local(params, box.width, box.height);
  for (auto& p : pts) p = box.to_world(p);
  return Polygon::trusted(std::move(pts));
}

double occupancy(const Polygon& footprint) {
  return std::min(1.0, polygon_area(footprint) / min_area_oriented_box(footprint).area());
}

FitResult fit_building(const Polygon& footprint, const FitOptions& options) {
  const double area = polygon_area(footprint);
  const auto frames = candidate_frames(footprint);

  std::array<LocalFit, kShapeTypeCount> per_tag{};
  std::array<OrientedBox, kShapeTypeCount> per_tag_frame{};
  for (auto& f : per_tag) f.iou = -1.0;
  for (const auto& frame : frames) {
    std::vector<Point2> local;
    local.reserve(footprint.size());
    for (const auto& v : footprint.ring()) local.push_back(frame.to_local(v));
    for (int t = 0; t < kShapeTypeCount; ++t) {
      const LocalFit lf = fit_in_frame(local, area, frame, static_cast<ShapeType>(t), options);
      if (lf.iou > per_tag[t].iou + 1e-12) {
        per_tag[t] = lf;
        per_tag_frame[t] = frame;
      }
    }
  }
  double best = -1.0;
  for (const auto& f : per_tag) best = std::max(best, f.iou);
  int chosen = 0;
  for (int t = 0; t < kShapeTypeCount; ++t) {
    if (per_tag[t].iou >= best - options.tie_margin) {
      chosen = t;
      break;
    }
  }
  FitResult out;
  out.shape = static_cast<ShapeType>(chosen);
  out.params = per_tag[chosen].params;
  out.frame = per_tag_frame[chosen];
  const Polygon tmpl = shape_template(out.params, out.frame);
  out.iou = iou(tmpl, footprint);
  out.hausdorff = hausdorff_distance(tmpl, footprint);
  out.occupancy = occupancy(footprint);
  return out;
}

}  // namespace blockgen
