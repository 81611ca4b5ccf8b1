#include "blockgen/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "blockgen/random.hpp"

namespace blockgen {

namespace {

ShapeParams random_params(ShapeType s, Rng& rng) {
  ShapeParams p;
  p.tag = s;
  p.orientation = (s == ShapeType::L || s == ShapeType::U) ? rng.uniform_int(0, 3) : 0;
  for (int i = 0; i < parameter_count(s); ++i)
    p.fractions[i] = rng.uniform(ShapeParams::kMinFraction + 1e-6, ShapeParams::kMaxFraction - 1e-6);
  return p;
}

}  // namespace

Footprint synthesize_footprint(ShapeType s, double a, const OrientedBox& box, std::uint64_t seed, int max_iter) {
  if (!(a > 0.0 && a <= 1.0)) throw GeometryError("occupancy must lie in (0, 1]");
  if (!(box.width > 0.0 && box.height > 0.0)) throw GeometryError("degenerate box");

  if (s == ShapeType::Rect) {
    ShapeParams p;
    if (a >= 0.98) return {box.to_polygon(), p, 1.0, false};
    OrientedBox inner = box;
    inner.width *= std::sqrt(a);
    inner.height *= std::sqrt(a);
    return {inner.to_polygon(), p, a, false};
  }

  Rng rng(seed);
  ShapeParams best;
  double best_err = 1e300, best_occ = 0.0;
  // first half explores uniformly, second half perturbs the best so far with a shrinking step
  const int iters = std::max(1, max_iter), explore = std::max(1, iters / 2);
  for (int i = 0; i < iters; ++i) {
    ShapeParams p = random_params(s, rng);
    if (i >= explore) {
      const double step = 0.25 * (iters - i) / (iters - explore);
      p.orientation = best.orientation;
      for (int k = 0; k < parameter_count(s); ++k)
        p.fractions[k] = std::clamp(best.fractions[k] + step * (2.0 * p.fractions[k] - 1.0),
                                    ShapeParams::kMinFraction + 1e-6, ShapeParams::kMaxFraction - 1e-6);
    }
    const double occ = template_occupancy(p);
    const double err = std::abs(occ - a);
    if (err < best_err) {
      best_err = err;
      best_occ = occ;
      best = p;
    }
  }
  return {shape_template(best, box), best, best_occ, best_err > kOccupancyTolerance};
}

std::vector<Polygon> RealizedBlock::footprints() const {
  std::vector<Polygon> out;
  for (const auto& b : buildings) out.push_back(b.footprint);
  return out;
}

std::vector<Polygon> RealizedBlock::unclipped() const {
  std::vector<Polygon> out;
  for (const auto& b : buildings) out.push_back(b.unclipped);
  return out;
}

RealizedBlock realize_block(const CanonicalGraph& predicted, const BlockShapeFeature& shape, const MainAxis& axis,
                            std::uint64_t seed) {
  RealizedBlock out;
  const InverseTransform inv = from_canonical(predicted, shape, axis);
  out.clamped = inv.clamped;
  const Polygon& block = axis.boundary();

  for (std::size_t i = 0; i < inv.graph.nodes.size(); ++i) {
    const NodeFeatures& n = inv.graph.nodes[i];
    if (!n.exists) continue;
    if (!(n.w > 0.0 && n.h > 0.0)) continue;
    const double t = std::clamp(predicted.nodes[i].x, 0.0, 1.0);
    const OrientedBox box = make_box({n.x, n.y}, n.w, n.h, axis.tangent_angle(t));
    const double a = std::clamp(n.occupancy, 1e-3, 1.0);
    Footprint fp = synthesize_footprint(n.shape, a, box, mix_seed(seed, i));

    const double area = polygon_area(fp.polygon);
    out.pre_clip_out_area += difference_area(fp.polygon, block);
    const auto pieces = intersection(fp.polygon, block);
    if (pieces.empty() || polygon_area(pieces.front()) < 0.5 * area) {
      ++out.dropped;
      spdlog::debug("node {} dropped: mostly outside the block", i);
      continue;
    }
    if (fp.warning) ++out.occupancy_warnings;
    out.buildings.push_back({pieces.front(), fp.polygon, static_cast<int>(i), a, fp.occupancy, fp.warning});
  }
  if (out.dropped > 0) spdlog::warn("{} footprints dropped by clipping", out.dropped);
  return out;
}

}  // namespace blockgen
