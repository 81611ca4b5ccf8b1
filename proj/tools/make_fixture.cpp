// Writes the synthetic GeoJSON fixtures under data/.
#include <cstdlib>
#include <iostream>
#include <string>

#include "blockgen/pipeline.hpp"
#include "blockgen/procedural.hpp"

using namespace blockgen;

namespace {

// Blocks on a square grid of `spacing` meters, numbered from `first`.
std::vector<BlockGroup> scenes(int n, int first, std::uint64_t seed, bool with_buildings, double spacing,
                               Point2 origin) {
  Rng rng(seed);
  std::vector<BlockGroup> out;
  const int per_row = 8;
  for (int i = 0; i < n; ++i) {
    const Point2 c = origin + Point2{(i % per_row) * spacing, (i / per_row) * spacing};
    SyntheticScene sc = synthetic_scene(static_cast<BlockKind>(i % kBlockKindCount), rng, c);
    out.push_back({"b" + std::to_string(first + i), sc.block, with_buildings ? sc.buildings : std::vector<Polygon>{}});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  const GeoProjection proj{11.576, 48.137};
  // 64 populated training blocks
  write_file(dir + "/fixture.geojson", groups_to_geojson(scenes(64, 0, 2024, true, 320.0, {0, 0}), proj));
  // 10 unseen empty blocks south of the training area
  write_file(dir + "/roads.geojson", groups_to_geojson(scenes(10, 100, 77, false, 320.0, {0, -1200}), proj));
  // a neighbourhood with known and empty blocks for sparse-prior generation
  auto mixed = scenes(16, 200, 5, true, 320.0, {0, 3000});
  for (std::size_t i = 0; i < mixed.size(); i += 3) mixed[i].buildings.clear();
  write_file(dir + "/sparse.geojson", groups_to_geojson(mixed, proj));
  std::cout << "fixtures written to " << dir << "\n";
  return EXIT_SUCCESS;
}
