#pragma once

#include <vector>

#include "blockgen/graphrep.hpp"

namespace blockgen {

// Node features relative to the main axis:
//   x = arc-length fraction, y = offset / local half-width,
//   w = w / axis length, h = h / (2 * local half-width).
struct CanonicalGraph {
  GridSpec grid;
  std::vector<NodeFeatures> nodes;
};

CanonicalGraph to_canonical(const BlockGraph& g);

struct InverseTransform {
  BlockGraph graph;
  int clamped = 0;  // nodes whose x' fell outside [0, 1]
};

InverseTransform from_canonical(const CanonicalGraph& cg, const BlockShapeFeature& shape, const MainAxis& axis);

// 11-wide model input per node: one-hot e (2), x', y', w', h', one-hot s (4), a.
inline constexpr int kNodeFeatureWidth = 11;
std::vector<double> node_feature_matrix(const CanonicalGraph& cg);

}  // namespace blockgen
