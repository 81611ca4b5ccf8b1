#pragma once

#include <vector>

#include "blockgen/canonical.hpp"
#include "blockgen/procedural.hpp"

namespace blockgen::testing {

struct ToyBlock {
  Polygon block;
  std::vector<Polygon> buildings;
  BlockGraph graph;
  CanonicalGraph canonical;
  BlockShapeFeature shape;
};

// Populated synthetic blocks cycling through every block kind.
inline std::vector<ToyBlock> toy_blocks(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ToyBlock> out;
  for (int i = 0; i < n; ++i) {
    SyntheticScene sc = synthetic_scene(static_cast<BlockKind>(i % kBlockKindCount), rng);
    std::vector<BuildingRecord> recs;
    for (const auto& b : sc.buildings) recs.push_back(make_building_record(b, FitOptions{1}));
    BlockGraph g = build_block_graph(sc.block, recs);
    CanonicalGraph cg = to_canonical(g);
    BlockShapeFeature f = block_shape_feature(sc.block);
    out.push_back({std::move(sc.block), std::move(sc.buildings), std::move(g), std::move(cg), std::move(f)});
  }
  return out;
}

}  // namespace blockgen::testing
