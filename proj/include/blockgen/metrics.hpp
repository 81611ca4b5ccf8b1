#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blockgen/graphrep.hpp"

namespace blockgen {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A generated or observed layout. The block, when present, defines the
// alignment frame; otherwise the buildings' own bounding box does.
struct Layout {
  std::optional<Polygon> block;
  std::vector<Polygon> buildings;
};

struct AlignedBuilding {
  Point2 center;  // oriented-box centre in the aligned frame
  double area = 0.0;
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;  // axis-aligned bounds in the aligned frame
};

// Rotates the frame's long side to horizontal and moves its centre to the origin; scale is kept.
std::vector<AlignedBuilding> align_layout(const Layout& layout);

inline constexpr double kMatchDecay = 0.02;  // per meter

// min(area1, area2) * 2^(-c * |center1 - center2|)
double matching_score(double area1, Point2 center1, double area2, Point2 center2, double c = kMatchDecay);
double matching_score(const BuildingRecord& a, const BuildingRecord& b, double c = kMatchDecay);

// Maximum-weight assignment on a rows x cols score matrix (padded with zeros
// to square). Returns the matched (row, col) pairs among real rows and columns.
struct Assignment {
  std::vector<std::pair<int, int>> pairs;
  double total = 0.0;
};
Assignment hungarian(const std::vector<std::vector<double>>& scores);

// Total matched score over max(|A|, |B|); 0 when either layout is empty.
double layout_sim(const Layout& a, const Layout& b, double c = kMatchDecay);

// Sum of pairwise intersection areas over total building area, in percent, capped at 100.
double overlap_index(const std::vector<Polygon>& buildings);
// Building area outside the block over total building area, in percent.
double out_block_index(const std::vector<Polygon>& buildings, const Polygon& block);

// Empirical W1 between two samples: integral of |F_a - F_b|.
double wasserstein_1d(std::vector<double> a, std::vector<double> b);
// Mean of the per-coordinate W1 over aligned (x, y, w, h) boxes, samples pooled over layouts.
double bbox_wasserstein(const std::vector<Layout>& a, const std::vector<Layout>& b);
double count_wasserstein(const std::vector<Layout>& a, const std::vector<Layout>& b);

// Mean centre shift over slots occupied in both graphs, as a percent of the truth axis length.
double position_error(const BlockGraph& pred, const BlockGraph& truth);
double position_error(const std::vector<NodeFeatures>& pred, const std::vector<NodeFeatures>& truth,
                      double axis_length);
// |covered area difference| over block area, in percent.
double coverage_error(const std::vector<Polygon>& pred, const std::vector<Polygon>& truth, const Polygon& block);

struct BlockEvaluation {
  std::string id;
  int buildings = 0;
  double overlap = 0.0;
  double out_block = 0.0;
  std::optional<double> l_sim, position_error, coverage_error;
  std::optional<double> pre_clip_out_block;  // percent, before clipping to the block
};

struct EvaluationReport {
  int blocks = 0;
  double overlap = 0.0;
  double out_block = 0.0;
  // the rest need reference layouts
  std::optional<double> l_sim, wd_bbox, wd_count, position_error, coverage_error;
  std::optional<double> pre_clip_out_block;
  std::vector<BlockEvaluation> per_block;
};

struct EvaluationInput {
  std::string id;
  Layout generated;
  std::optional<Layout> reference;
  std::optional<double> pre_clip_out_area;  // building area outside the block before clipping
  // slot-matched graphs for the one-to-one position error
  std::optional<BlockGraph> generated_graph, reference_graph;
};

EvaluationReport evaluate(const std::vector<EvaluationInput>& items);
std::string report_to_json(const EvaluationReport& r, int indent = 2);

}  // namespace blockgen
