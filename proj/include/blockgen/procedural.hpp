#pragma once

#include <vector>

#include "blockgen/geometry.hpp"
#include "blockgen/random.hpp"
#include "blockgen/skeleton.hpp"

namespace blockgen {

// Synthetic blocks and row-structured layouts used for fixtures and toy training.

enum class BlockKind { Rectangle = 0, Wedge = 1, LBlock = 2, CulDeSac = 3 };
inline constexpr int kBlockKindCount = 4;

// Random block of the given kind, randomly rotated about `center`.
Polygon synthetic_block(BlockKind kind, Rng& rng, Point2 center = {});

struct PopulateOptions {
  int max_rows = 3;
  double min_width = 8.0;
  double max_width = 20.0;
  double gap = 3.0;            // meters between neighbours in a row
  double fill_probability = 0.9;
};

// Buildings placed in parallel rows along the block's main axis; every
// footprint is inside the block and no two overlap.
std::vector<Polygon> populate_block(const Polygon& block, const MainAxis& axis, Rng& rng,
                                    const PopulateOptions& options = {});

struct SyntheticScene {
  Polygon block;
  std::vector<Polygon> buildings;
};

SyntheticScene synthetic_scene(BlockKind kind, Rng& rng, Point2 center = {}, const PopulateOptions& options = {});

}  // namespace blockgen
