#pragma once

#include <span>
#include <utility>
#include <vector>

#include "blockgen/geometry.hpp"
#include "blockgen/shapefit.hpp"
#include "blockgen/skeleton.hpp"

namespace blockgen {

struct BuildingRecord {
  Polygon footprint;
  FitResult fit;
  OrientedBox box;  // minimum-area box of the footprint
};

BuildingRecord make_building_record(const Polygon& footprint, const FitOptions& options = {});

struct GridSpec {
  int rows = 4;
  int cols = 30;
  int size() const { return rows * cols; }
  int index(int row, int col) const { return row * cols + col; }
  bool operator==(const GridSpec&) const = default;
};

// Undirected 4-neighbourhood edges (i < j), identical for every block.
std::vector<std::pair<int, int>> grid_edges(const GridSpec& grid);

// World-space features for BlockGraph, axis-relative ones for CanonicalGraph.
struct NodeFeatures {
  bool exists = false;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  ShapeType shape = ShapeType::Rect;
  double occupancy = 0.0;
  bool operator==(const NodeFeatures&) const = default;
};

struct BlockShapeFeature {
  BinaryMask mask;
  double scale = 0.0;  // OBB width in meters
};

BlockShapeFeature block_shape_feature(const Polygon& block);

struct BlockGraph {
  GridSpec grid;
  std::vector<NodeFeatures> nodes;  // row-major, grid.size() entries
  Polygon block;
  MainAxis axis;
  std::vector<int> source;  // input building index per slot, -1 when empty

  int occupied() const;
};

struct KMeans1D {
  std::vector<int> labels;  // cluster per input value, clusters ordered by mean
  std::vector<double> means;
  double sse = 0.0;
};

// Exact 1-D k-means by dynamic programming over the sorted values.
KMeans1D kmeans_1d(std::span<const double> values, int k);

struct RowOptions {
  int max_rows = 4;
  double elbow_gain = 0.2;     // stop when adding a row gains less than this share of SSE
  double noise_floor = 1.5;    // meters; stop once the RMS spread within rows is below it
};

// Row index per offset, ordered by mean offset.
std::vector<int> assign_rows(std::span<const double> offsets, const RowOptions& options = {});
std::vector<int> assign_rows(const std::vector<BuildingRecord>& buildings, const MainAxis& axis,
                             const RowOptions& options = {});

// Signed perpendicular offset in meters of a point from the axis.
double axis_offset(const MainAxis& axis, Point2 p);

// Throws GeometryError when a row overflows or there are more buildings than slots.
BlockGraph build_block_graph(const Polygon& block, const std::vector<BuildingRecord>& buildings,
                             const GridSpec& grid = {}, const RowOptions& rows = {});
BlockGraph build_block_graph(const Polygon& block, const MainAxis& axis,
                             const std::vector<BuildingRecord>& buildings, const GridSpec& grid = {},
                             const RowOptions& rows = {});

}  // namespace blockgen
