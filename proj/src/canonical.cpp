#include "blockgen/canonical.hpp"

#include <algorithm>

namespace blockgen {

CanonicalGraph to_canonical(const BlockGraph& g) {
  const MainAxis& axis = g.axis;
  if (!(axis.length() > 0.0)) throw GeometryError("degenerate main axis");
  CanonicalGraph cg{g.grid, std::vector<NodeFeatures>(g.nodes.size())};
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const NodeFeatures& n = g.nodes[i];
    if (!n.exists) continue;
    const AxisCoord c = axis.project({n.x, n.y});
    const double hw = axis.half_width(c.fraction);
    cg.nodes[i] = {true, c.fraction, c.offset, n.w / axis.length(), n.h / (2.0 * hw), n.shape, n.occupancy};
  }
  return cg;
}

InverseTransform from_canonical(const CanonicalGraph& cg, const BlockShapeFeature& /*shape*/, const MainAxis& axis) {
  InverseTransform out{BlockGraph{cg.grid, std::vector<NodeFeatures>(cg.nodes.size()), axis.boundary(), axis,
                                  std::vector<int>(cg.nodes.size(), -1)},
                       0};
  for (std::size_t i = 0; i < cg.nodes.size(); ++i) {
    const NodeFeatures& n = cg.nodes[i];
    if (!n.exists) continue;
    double t = n.x;
    if (t < 0.0 || t > 1.0) {
      ++out.clamped;
      t = std::clamp(t, 0.0, 1.0);
    }
    const Point2 p = axis.locate(t, n.y);
    const double hw = axis.half_width(t);
    out.graph.nodes[i] = {true, p.x, p.y, n.w * axis.length(), n.h * 2.0 * hw, n.shape, n.occupancy};
  }
  return out;
}

std::vector<double> node_feature_matrix(const CanonicalGraph& cg) {
  std::vector<double> m(cg.nodes.size() * kNodeFeatureWidth, 0.0);
  for (std::size_t i = 0; i < cg.nodes.size(); ++i) {
    const NodeFeatures& n = cg.nodes[i];
    double* row = &m[i * kNodeFeatureWidth];
    if (!n.exists) {
      row[0] = 1.0;
      continue;
    }
    row[1] = 1.0;
    row[2] = n.x;
    row[3] = n.y;
    row[4] = n.w;
    row[5] = n.h;
    row[6 + static_cast<int>(n.shape)] = 1.0;
    row[10] = n.occupancy;
  }
  return m;
}

}  // namespace blockgen
