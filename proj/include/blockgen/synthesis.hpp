#pragma once

#include <cstdint>
#include <vector>

#include "blockgen/canonical.hpp"

namespace blockgen {

struct Footprint {
  Polygon polygon;
  ShapeParams params;
  double occupancy = 1.0;  // polygon area / box area
  bool warning = false;    // best candidate missed the target by more than the tolerance
};

inline constexpr double kOccupancyTolerance = 0.1;

// Random search over template parameters for the candidate whose occupancy is
// closest to `a`. Rect is closed form: the box itself for a >= 0.98, otherwise
// a centred copy scaled by sqrt(a).
Footprint synthesize_footprint(ShapeType s, double a, const OrientedBox& box, std::uint64_t seed,
                               int max_iter = 100);

struct RealizedBuilding {
  Polygon footprint;      // clipped to the block
  Polygon unclipped;
  int node = -1;          // grid slot
  double target_occupancy = 0.0;
  double occupancy = 0.0;
  bool occupancy_warning = false;
};

struct RealizedBlock {
  std::vector<RealizedBuilding> buildings;
  int dropped = 0;             // lost more than half their area to clipping
  int occupancy_warnings = 0;
  int clamped = 0;             // nodes with x' outside [0, 1]
  double pre_clip_out_area = 0.0;  // summed footprint area outside the block before clipping

  std::vector<Polygon> footprints() const;
  std::vector<Polygon> unclipped() const;
};

RealizedBlock realize_block(const CanonicalGraph& predicted, const BlockShapeFeature& shape, const MainAxis& axis,
                            std::uint64_t seed);

}  // namespace blockgen
