#include "blockgen/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace blockgen {

using nlohmann::json;

std::vector<AlignedBuilding> align_layout(const Layout& layout) {
  std::vector<AlignedBuilding> out;
  if (layout.buildings.empty()) return out;
  OrientedBox frame;
  if (layout.block) {
    frame = min_area_oriented_box(*layout.block);
  } else {
    std::vector<Point2> pts;
    for (const auto& b : layout.buildings) pts.insert(pts.end(), b.ring().begin(), b.ring().end());
    frame = min_area_oriented_box(pts);
  }
  for (const auto& b : layout.buildings) {
    AlignedBuilding a;
    a.area = polygon_area(b);
    a.center = frame.to_local(min_area_oriented_box(b).center);
    a.min_x = a.min_y = std::numeric_limits<double>::infinity();
    a.max_x = a.max_y = -std::numeric_limits<double>::infinity();
    for (const auto& v : b.ring()) {
      const Point2 q = frame.to_local(v);
      a.min_x = std::min(a.min_x, q.x), a.max_x = std::max(a.max_x, q.x);
      a.min_y = std::min(a.min_y, q.y), a.max_y = std::max(a.max_y, q.y);
    }
    out.push_back(a);
  }
  return out;
}

double matching_score(double area1, Point2 center1, double area2, Point2 center2, double c) {
  return std::min(area1, area2) * std::exp2(-c * distance(center1, center2));
}

double matching_score(const BuildingRecord& a, const BuildingRecord& b, double c) {
  return matching_score(polygon_area(a.footprint), a.box.center, polygon_area(b.footprint), b.box.center, c);
}

Assignment hungarian(const std::vector<std::vector<double>>& scores) {
  Assignment result;
  const int rows = static_cast<int>(scores.size());
  if (rows == 0) return result;
  const int cols = static_cast<int>(scores[0].size());
  for (const auto& r : scores) {
    if (static_cast<int>(r.size()) != cols) throw MetricError("ragged score matrix");
    for (double v : r)
      if (!std::isfinite(v)) throw MetricError("non-finite score");
  }
  if (cols == 0) return result;

  // Shortest augmenting paths with potentials, minimizing the negated scores.
  const int n = std::max(rows, cols);
  auto cost = [&](int i, int j) { return (i < rows && j < cols) ? -scores[i][j] : 0.0; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);  // match[col] = row, 1-based
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) {
    const int i = match[j] - 1;
    if (i < rows && j - 1 < cols) {
      result.pairs.emplace_back(i, j - 1);
      result.total += scores[i][j - 1];
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

double layout_sim(const Layout& a, const Layout& b, double c) {
  if (a.buildings.empty() || b.buildings.empty()) return 0.0;
  const auto pa = align_layout(a), pb = align_layout(b);
  std::vector<std::vector<double>> s(pa.size(), std::vector<double>(pb.size()));
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j)
      s[i][j] = matching_score(pa[i].area, pa[i].center, pb[j].area, pb[j].center, c);
  return hungarian(s).total / static_cast<double>(std::max(pa.size(), pb.size()));
}

namespace {

double total_area(const std::vector<Polygon>& ps) {
  double t = 0.0;
  for (const auto& p : ps) t += polygon_area(p);
  return t;
}

bool boxes_overlap(const Polygon& a, const Polygon& b) {
  auto bounds = [](const Polygon& p) {
    std::array<double, 4> r{1e300, 1e300, -1e300, -1e300};
    for (const auto& v : p.ring()) {
      r[0] = std::min(r[0], v.x), r[1] = std::min(r[1], v.y);
      r[2] = std::max(r[2], v.x), r[3] = std::max(r[3], v.y);
    }
    return r;
  };
  const auto ra = bounds(a), rb = bounds(b);
  return ra[0] <= rb[2] && rb[0] <= ra[2] && ra[1] <= rb[3] && rb[1] <= ra[3];
}

}  // namespace

double overlap_index(const std::vector<Polygon>& buildings) {
  const double total = total_area(buildings);
  if (total <= 0.0) return 0.0;
  double inter = 0.0;
  for (std::size_t i = 0; i < buildings.size(); ++i)
    for (std::size_t j = i + 1; j < buildings.size(); ++j)
      if (boxes_overlap(buildings[i], buildings[j])) inter += intersection_area(buildings[i], buildings[j]);
  return std::min(100.0, 100.0 * inter / total);
}

double out_block_index(const std::vector<Polygon>& buildings, const Polygon& block) {
  const double total = total_area(buildings);
  if (total <= 0.0) return 0.0;
  double out = 0.0;
  for (const auto& b : buildings) out += difference_area(b, block);
  return std::clamp(100.0 * out / total, 0.0, 100.0);
}

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw MetricError("wasserstein_1d needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
  }
  // integral of |F_a - F_b| over the merged breakpoints
  std::vector<double> xs(a);
  xs.insert(xs.end(), b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double w = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    while (ia < a.size() && a[ia] <= xs[k]) ++ia;
    while (ib < b.size() && b[ib] <= xs[k]) ++ib;
    w += std::abs(ia / na - ib / nb) * (xs[k + 1] - xs[k]);
  }
  return w;
}

double bbox_wasserstein(const std::vector<Layout>& a, const std::vector<Layout>& b) {
  std::array<std::vector<double>, 4> sa, sb;
  auto pool = [](const std::vector<Layout>& ls, std::array<std::vector<double>, 4>& s) {
    for (const auto& l : ls) {
      for (const auto& ab : align_layout(l)) {
        s[0].push_back((ab.min_x + ab.max_x) / 2);
        s[1].push_back((ab.min_y + ab.max_y) / 2);
        s[2].push_back(ab.max_x - ab.min_x);
        s[3].push_back(ab.max_y - ab.min_y);
      }
    }
  };
  pool(a, sa);
  pool(b, sb);
  if (sa[0].empty() || sb[0].empty()) throw MetricError("bbox_wasserstein needs buildings on both sides");
  double w = 0.0;
  for (int k = 0; k < 4; ++k) w += wasserstein_1d(sa[k], sb[k]);
  return w / 4.0;
}

double count_wasserstein(const std::vector<Layout>& a, const std::vector<Layout>& b) {
  std::vector<double> ca, cb;
  for (const auto& l : a) ca.push_back(static_cast<double>(l.buildings.size()));
  for (const auto& l : b) cb.push_back(static_cast<double>(l.buildings.size()));
  return wasserstein_1d(ca, cb);
}

double position_error(const std::vector<NodeFeatures>& pred, const std::vector<NodeFeatures>& truth,
                      double axis_length) {
  if (pred.size() != truth.size()) throw MetricError("graphs differ in size");
  if (!(axis_length > 0.0)) throw MetricError("axis length must be positive");
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred[i].exists || !truth[i].exists) continue;
    sum += std::hypot(pred[i].x - truth[i].x, pred[i].y - truth[i].y);
    ++n;
  }
  if (n == 0) throw MetricError("no common occupied slots");
  return 100.0 * sum / n / axis_length;
}

double position_error(const BlockGraph& pred, const BlockGraph& truth) {
  return position_error(pred.nodes, truth.nodes, truth.axis.length());
}

double coverage_error(const std::vector<Polygon>& pred, const std::vector<Polygon>& truth, const Polygon& block) {
  return 100.0 * std::abs(total_area(pred) - total_area(truth)) / polygon_area(block);
}

EvaluationReport evaluate(const std::vector<EvaluationInput>& items) {
  EvaluationReport r;
  r.blocks = static_cast<int>(items.size());
  std::vector<Layout> gen, ref;
  double lsim = 0.0, pos = 0.0, cov = 0.0, pre = 0.0;
  int n_ref = 0, n_pos = 0, n_cov = 0, n_build = 0, n_pre = 0;
  for (const auto& it : items) {
    BlockEvaluation e;
    e.id = it.id;
    e.buildings = static_cast<int>(it.generated.buildings.size());
    if (!it.generated.buildings.empty()) {
      e.overlap = overlap_index(it.generated.buildings);
      if (it.generated.block) e.out_block = out_block_index(it.generated.buildings, *it.generated.block);
      r.overlap += e.overlap;
      if (it.pre_clip_out_area) {
        const double kept = total_area(it.generated.buildings);
        e.pre_clip_out_block = 100.0 * *it.pre_clip_out_area / (kept + *it.pre_clip_out_area);
        pre += *e.pre_clip_out_block;
        ++n_pre;
      }
      r.out_block += e.out_block;
      ++n_build;
    }
    if (it.reference) {
      e.l_sim = layout_sim(it.generated, *it.reference);
      lsim += *e.l_sim;
      ++n_ref;
      gen.push_back(it.generated);
      ref.push_back(*it.reference);
      const auto& blk = it.reference->block ? it.reference->block : it.generated.block;
      if (blk) {
        e.coverage_error = coverage_error(it.generated.buildings, it.reference->buildings, *blk);
        cov += *e.coverage_error;
        ++n_cov;
      }
    }
    if (it.generated_graph && it.reference_graph) {
      try {
        e.position_error = position_error(*it.generated_graph, *it.reference_graph);
        pos += *e.position_error;
        ++n_pos;
      } catch (const MetricError&) {
        // no shared slots: skipped for this block
      }
    }
    r.per_block.push_back(std::move(e));
  }
  if (n_build > 0) {
    r.overlap /= n_build;
    r.out_block /= n_build;
  }
  if (n_ref > 0) {
    r.l_sim = lsim / n_ref;
    r.wd_count = count_wasserstein(gen, ref);
    try {
      r.wd_bbox = bbox_wasserstein(gen, ref);
    } catch (const MetricError&) {
    }
  }
  if (n_pos > 0) r.position_error = pos / n_pos;
  if (n_cov > 0) r.coverage_error = cov / n_cov;
  if (n_pre > 0) r.pre_clip_out_block = pre / n_pre;
  return r;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_to_json(const EvaluationReport& r, int indent) {
  json blocks = json::array();
  for (const auto& b : r.per_block) {
    blocks.push_back({{"id", b.id},
                      {"buildings", b.buildings},
                      {"overlap", b.overlap},
                      {"out_block", b.out_block},
                      {"l_sim", opt(b.l_sim)},
                      {"position_error", opt(b.position_error)},
                      {"coverage_error", opt(b.coverage_error)},
                      {"pre_clip_out_block", opt(b.pre_clip_out_block)}});
  }
  json j = {{"blocks", r.blocks},
            {"l_sim", opt(r.l_sim)},
            {"overlap", r.overlap},
            {"out_block", r.out_block},
            {"wd_bbox", opt(r.wd_bbox)},
            {"wd_count", opt(r.wd_count)},
            {"position_error", opt(r.position_error)},
            {"coverage_error", opt(r.coverage_error)},
            {"pre_clip_out_block", opt(r.pre_clip_out_block)},
            {"per_block", blocks}};
  return j.dump(indent);
}

}  // namespace blockgen
