#include "blockgen/graphrep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace blockgen {

BuildingRecord make_building_record(const Polygon& footprint, const FitOptions& options) {
  return {footprint, fit_building(footprint, options), min_area_oriented_box(footprint)};
}

std::vector<std::pair<int, int>> grid_edges(const GridSpec& grid) {
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const int i = grid.index(r, c);
      if (c + 1 < grid.cols) edges.emplace_back(i, grid.index(r, c + 1));
      if (r + 1 < grid.rows) edges.emplace_back(i, grid.index(r + 1, c));
    }
  }
  return edges;
}

BlockShapeFeature block_shape_feature(const Polygon& block) {
  BlockShapeFeature f;
  f.mask = rasterize(block);
  f.scale = min_area_oriented_box(block).width;
  return f;
}

int BlockGraph::occupied() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const NodeFeatures& n) { return n.exists; }));
}

KMeans1D kmeans_1d(std::span<const double> values, int k) {
  const int n = static_cast<int>(values.size());
  if (k < 1) throw GeometryError("k-means needs k >= 1");
  KMeans1D out;
  if (n == 0) return out;
  k = std::min(k, n);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double v = values[order[i]];
    s1[i + 1] = s1[i] + v;
    s2[i + 1] = s2[i] + v * v;
  }
  // SSE of sorted values [i, j)
  auto cost = [&](int i, int j) {
    const double m = j - i;
    const double sum = s1[j] - s1[i];
    return std::max(0.0, (s2[j] - s2[i]) - sum * sum / m);
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(k + 1, std::vector<double>(n + 1, inf));
  std::vector<std::vector<int>> cut(k + 1, std::vector<int>(n + 1, 0));
  dp[0][0] = 0.0;
  for (int c = 1; c <= k; ++c) {
    for (int j = c; j <= n; ++j) {
      for (int i = c - 1; i < j; ++i) {
        const double v = dp[c - 1][i] + cost(i, j);
        if (v < dp[c][j]) {
          dp[c][j] = v;
          cut[c][j] = i;
        }
      }
    }
  }
  out.sse = dp[k][n];
  out.labels.assign(n, 0);
  out.means.assign(k, 0.0);
  int j = n;
  for (int c = k; c >= 1; --c) {
    const int i = cut[c][j];
    out.means[c - 1] = (s1[j] - s1[i]) / (j - i);
    for (int q = i; q < j; ++q) out.labels[order[q]] = c - 1;
    j = i;
  }
  return out;
}

std::vector<int> assign_rows(std::span<const double> offsets, const RowOptions& options) {
  const int n = static_cast<int>(offsets.size());
  if (n == 0) return {};
  KMeans1D best = kmeans_1d(offsets, 1);
  const double floor_sse = options.noise_floor * options.noise_floor * n;
  for (int k = 2; k <= std::min(options.max_rows, n); ++k) {
    if (best.sse <= floor_sse) break;
    KMeans1D next = kmeans_1d(offsets, k);
    if (best.sse - next.sse < options.elbow_gain * best.sse) break;
    best = std::move(next);
  }
  return best.labels;
}

double axis_offset(const MainAxis& axis, Point2 p) {
  const AxisCoord c = axis.project(p);
  return c.offset * axis.half_width(c.fraction);
}

std::vector<int> assign_rows(const std::vector<BuildingRecord>& buildings, const MainAxis& axis,
                             const RowOptions& options) {
  std::vector<double> offsets;
  offsets.reserve(buildings.size());
  for (const auto& b : buildings) offsets.push_back(axis_offset(axis, b.box.center));
  return assign_rows(offsets, options);
}

BlockGraph build_block_graph(const Polygon& block, const std::vector<BuildingRecord>& buildings,
                             const GridSpec& grid, const RowOptions& rows) {
  return build_block_graph(block, extract_main_axis(block), buildings, grid, rows);
}

BlockGraph build_block_graph(const Polygon& block, const MainAxis& axis,
                             const std::vector<BuildingRecord>& buildings, const GridSpec& grid,
                             const RowOptions& rows) {
  if (static_cast<int>(buildings.size()) > grid.size()) {
    throw GeometryError("block has " + std::to_string(buildings.size()) + " buildings, more than " +
                        std::to_string(grid.size()) + " slots");
  }
  RowOptions ro = rows;
  ro.max_rows = std::min(ro.max_rows, grid.rows);
  BlockGraph g{grid, std::vector<NodeFeatures>(grid.size()), block, axis, std::vector<int>(grid.size(), -1)};
  const std::vector<int> row_of = assign_rows(buildings, axis, ro);

  std::vector<double> t(buildings.size());
  for (std::size_t i = 0; i < buildings.size(); ++i) t[i] = axis.project(buildings[i].box.center).fraction;

  for (int r = 0; r < grid.rows; ++r) {
    std::vector<int> members;
    for (std::size_t i = 0; i < buildings.size(); ++i) {
      if (row_of[i] == r) members.push_back(static_cast<int>(i));
    }
    if (static_cast<int>(members.size()) > grid.cols) {
      throw GeometryError("row " + std::to_string(r) + " holds " + std::to_string(members.size()) +
                          " buildings, more than " + std::to_string(grid.cols) + " columns");
    }
    // order by position, then by center so input order never matters
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      const Point2 pa = buildings[a].box.center, pb = buildings[b].box.center;
      if (t[a] != t[b]) return t[a] < t[b];
      if (pa.x != pb.x) return pa.x < pb.x;
      return pa.y < pb.y;
    });
    std::vector<bool> taken(grid.cols, false);
    for (int m : members) {
      const int want = static_cast<int>(std::lround(t[m] * (grid.cols - 1)));
      int col = -1;
      for (int d = 0; d < grid.cols && col < 0; ++d) {
        if (want - d >= 0 && !taken[want - d]) {
          col = want - d;
        } else if (want + d < grid.cols && !taken[want + d]) {
          col = want + d;
        }
      }
      taken[col] = true;
      const BuildingRecord& b = buildings[m];
      const int slot = grid.index(r, col);
      g.nodes[slot] = {true, b.box.center.x, b.box.center.y, b.box.width, b.box.height, b.fit.shape, b.fit.occupancy};
      g.source[slot] = m;
    }
  }
  return g;
}

}  // namespace blockgen
