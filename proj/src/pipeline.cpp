#include "blockgen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blockgen/random.hpp"
#include "json.hpp"

namespace blockgen {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

Point2 GeoProjection::project(double lon, double lat) const {
  return {kEarthRadius * std::cos(lat0 * kDeg) * (lon - lon0) * kDeg, kEarthRadius * (lat - lat0) * kDeg};
}

std::pair<double, double> GeoProjection::unproject(Point2 p) const {
  return {lon0 + p.x / (kEarthRadius * std::cos(lat0 * kDeg)) / kDeg, lat0 + p.y / kEarthRadius / kDeg};
}

double haversine(double lon1, double lat1, double lon2, double lat2) {
  const double dlat = (lat2 - lat1) * kDeg, dlon = (lon2 - lon1) * kDeg;
  const double a = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) * std::pow(std::sin(dlon / 2), 2);
  return 2 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(a)));
}

// ---- GeoJSON ----

namespace {

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  throw PipelineError("block_id must be a string or a number");
}

using LonLatRing = std::vector<std::pair<double, double>>;

std::vector<LonLatRing> read_rings(const json& geometry) {
  if (!geometry.is_object() || geometry.value("type", "") != "Polygon")
    throw PipelineError("only Polygon geometries are supported");
  const auto& coords = geometry.at("coordinates");
  if (!coords.is_array() || coords.empty()) throw PipelineError("polygon without rings");
  std::vector<LonLatRing> rings;
  for (const auto& ring : coords) {
    LonLatRing r;
    for (const auto& pos : ring) {
      if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
        throw PipelineError("bad coordinate position");
      r.emplace_back(pos[0].get<double>(), pos[1].get<double>());
    }
    rings.push_back(std::move(r));
  }
  return rings;
}

Polygon project_ring(const LonLatRing& ring, const GeoProjection& proj) {
  std::vector<Point2> pts;
  pts.reserve(ring.size());
  for (auto [lon, lat] : ring) pts.push_back(proj.project(lon, lat));
  return Polygon(std::move(pts));
}

}  // namespace

IngestResult parse_geojson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PipelineError(std::string("malformed GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
    throw PipelineError("expected a FeatureCollection");
  const json features = doc.value("features", json::array());
  if (!features.is_array()) throw PipelineError("features must be an array");

  struct Raw {
    bool block;
    std::string id;
    std::vector<LonLatRing> rings;
  };
  std::vector<Raw> raw;
  double lon_sum = 0.0, lat_sum = 0.0;
  long count = 0;
  for (const auto& f : features) {
    if (!f.is_object() || f.value("type", "") != "Feature") throw PipelineError("expected Feature objects");
    const json props = f.value("properties", json::object());
    if (!props.is_object() || !props.contains("kind")) throw PipelineError("feature without a kind property");
    const std::string kind = props.at("kind").is_string() ? props.at("kind").get<std::string>() : "";
    if (kind != "block" && kind != "building") throw PipelineError("unknown feature kind '" + kind + "'");
    if (!props.contains("block_id") || props.at("block_id").is_null())
      throw PipelineError("feature without a block_id");
    Raw r{kind == "block", id_string(props.at("block_id")), read_rings(f.at("geometry"))};
    if (r.block) {
      const auto& ring = r.rings.front();
      // skip the repeated closing vertex
      const std::size_t n = ring.size() > 1 && ring.front() == ring.back() ? ring.size() - 1 : ring.size();
      for (std::size_t k = 0; k < n; ++k) {
        const auto [lon, lat] = ring[k];
        lon_sum += lon;
        lat_sum += lat;
        ++count;
      }
    }
    raw.push_back(std::move(r));
  }

  IngestResult out;
  if (count > 0) out.projection = {lon_sum / count, lat_sum / count};

  std::map<std::string, std::size_t> index;
  std::set<std::string> rejected;
  for (const auto& r : raw) {
    if (!r.block) continue;
    if (index.count(r.id) || rejected.count(r.id)) throw PipelineError("duplicate block id " + r.id);
    if (r.rings.size() > 1) {
      rejected.insert(r.id);
      out.rejected.push_back(r.id + ": block has interior holes");
      spdlog::warn("block {} rejected: interior holes", r.id);
      continue;
    }
    try {
      out.groups.push_back({r.id, project_ring(r.rings.front(), out.projection), {}});
      index[r.id] = out.groups.size() - 1;
    } catch (const GeometryError& e) {
      rejected.insert(r.id);
      out.rejected.push_back(r.id + ": " + e.what());
      spdlog::warn("block {} rejected: {}", r.id, e.what());
    }
  }
  for (const auto& r : raw) {
    if (r.block) continue;
    auto it = index.find(r.id);
    if (it == index.end()) {
      if (!rejected.count(r.id)) spdlog::warn("building references unknown block {}", r.id);
      continue;
    }
    try {
      // building courtyards are not modelled: the outer ring stands for the footprint
      out.groups[it->second].buildings.push_back(project_ring(r.rings.front(), out.projection));
    } catch (const GeometryError& e) {
      spdlog::warn("invalid building in block {} skipped: {}", r.id, e.what());
    }
  }
  return out;
}

IngestResult ingest_geojson(const std::string& path) { return parse_geojson(read_file(path)); }

namespace {

json lonlat_ring(const Polygon& p, const GeoProjection& proj) {
  json ring = json::array();
  for (const auto& v : p.ring()) {
    auto [lon, lat] = proj.unproject(v);
    ring.push_back({lon, lat});
  }
  auto [lon, lat] = proj.unproject(p.ring().front());
  ring.push_back({lon, lat});
  return ring;
}

json feature(const Polygon& p, const std::string& kind, const std::string& id, const GeoProjection& proj) {
  return {{"type", "Feature"},
          {"properties", {{"kind", kind}, {"block_id", id}}},
          {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({lonlat_ring(p, proj)})}}}};
}

}  // namespace

std::string groups_to_geojson(const std::vector<BlockGroup>& groups, const GeoProjection& projection) {
  json features = json::array();
  for (const auto& g : groups) {
    features.push_back(feature(g.block, "block", g.id, projection));
    for (const auto& b : g.buildings) features.push_back(feature(b, "building", g.id, projection));
  }
  return json{{"type", "FeatureCollection"}, {"features", features}}.dump() + "\n";
}

// ---- dataset ----

std::uint64_t split_key(const std::string& id, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix_seed(h, seed);
}

Split split_of(const std::string& id, std::uint64_t seed) {
  return split_key(id, seed) % 10000 < 8000 ? Split::Train : Split::Validation;
}

std::vector<Split> assign_splits(const std::vector<std::string>& ids, std::uint64_t seed) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> keys(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) keys[i] = split_key(ids[i], seed);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : ids[a] < ids[b];
  });
  const auto n_train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(ids.size())));
  std::vector<Split> out(ids.size(), Split::Validation);
  for (std::size_t r = 0; r < n_train; ++r) out[order[r]] = Split::Train;
  return out;
}

DatasetRecord build_record(const BlockGroup& group, const DatasetOptions& options) {
  std::vector<BuildingRecord> recs;
  recs.reserve(group.buildings.size());
  for (const auto& b : group.buildings) recs.push_back(make_building_record(b, options.fit));
  BlockGraph g = build_block_graph(group.block, recs);
  CanonicalGraph cg = to_canonical(g);
  std::vector<FitResult> fits;
  for (const auto& r : recs) fits.push_back(r.fit);
  return {group.id,  split_of(group.id, options.seed), group.block, group.buildings, std::move(fits),
          std::move(g), std::move(cg), block_shape_feature(group.block)};
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

DatasetBuild build_dataset(const std::vector<BlockGroup>& groups, const DatasetOptions& options) {
  std::vector<std::optional<DatasetRecord>> slots(groups.size());
  std::vector<std::string> errors(groups.size());
  parallel_for(static_cast<int>(groups.size()), options.threads, [&](int i) {
    try {
      slots[i] = build_record(groups[i], options);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  DatasetBuild out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!seen.insert(groups[i].id).second) {
      out.failures.push_back(groups[i].id + ": duplicate id");
      continue;
    }
    if (slots[i]) {
      out.records.push_back(std::move(*slots[i]));
    } else {
      out.failures.push_back(groups[i].id + ": " + errors[i]);
      spdlog::warn("block {} skipped: {}", groups[i].id, errors[i]);
    }
  }
  std::vector<std::string> ids;
  for (const auto& r : out.records) ids.push_back(r.id);
  const auto splits = assign_splits(ids, options.seed);
  for (std::size_t i = 0; i < splits.size(); ++i) out.records[i].split = splits[i];
  return out;
}

namespace {

json pt(Point2 p) { return json::array({p.x, p.y}); }
Point2 to_pt(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json ring_json(const Polygon& p) {
  json r = json::array();
  for (const auto& v : p.ring()) r.push_back(pt(v));
  return r;
}

Polygon ring_from(const json& j) {
  std::vector<Point2> pts;
  for (const auto& v : j) pts.push_back(to_pt(v));
  return Polygon::trusted(std::move(pts));
}

json box_json(const OrientedBox& b) { return {pt(b.center), b.width, b.height, b.angle}; }
OrientedBox box_from(const json& j) {
  return {to_pt(j.at(0)), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

json fit_json(const FitResult& f) {
  return {{"shape", static_cast<int>(f.shape)},
          {"occupancy", f.occupancy},
          {"iou", f.iou},
          {"hausdorff", f.hausdorff},
          {"params",
           {static_cast<int>(f.params.tag), f.params.orientation, f.params.fractions[0], f.params.fractions[1],
            f.params.fractions[2], f.params.fractions[3]}},
          {"frame", box_json(f.frame)}};
}

ShapeType shape_from(int v) {
  if (v < 0 || v >= kShapeTypeCount) throw PipelineError("shape type out of range");
  return static_cast<ShapeType>(v);
}

FitResult fit_from(const json& j) {
  FitResult f;
  f.shape = shape_from(j.at("shape").get<int>());
  f.occupancy = j.at("occupancy").get<double>();
  f.iou = j.at("iou").get<double>();
  f.hausdorff = j.at("hausdorff").get<double>();
  const auto& p = j.at("params");
  f.params.tag = shape_from(p.at(0).get<int>());
  f.params.orientation = p.at(1).get<int>();
  for (int k = 0; k < 4; ++k) f.params.fractions[k] = p.at(2 + k).get<double>();
  f.frame = box_from(j.at("frame"));
  return f;
}

json nodes_json(const std::vector<NodeFeatures>& nodes) {
  json a = json::array();
  for (const auto& n : nodes)
    a.push_back({n.exists ? 1 : 0, n.x, n.y, n.w, n.h, static_cast<int>(n.shape), n.occupancy});
  return a;
}

std::vector<NodeFeatures> nodes_from(const json& j) {
  std::vector<NodeFeatures> out;
  for (const auto& n : j) {
    out.push_back({n.at(0).get<int>() != 0, n.at(1).get<double>(), n.at(2).get<double>(), n.at(3).get<double>(),
                   n.at(4).get<double>(), shape_from(n.at(5).get<int>()), n.at(6).get<double>()});
  }
  return out;
}

std::string bits_hex(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (std::size_t k = 0; k < 4 && i + k < bits.size(); ++k) v |= (bits[i + k] ? 1 : 0) << k;
    s.push_back("0123456789abcdef"[v]);
  }
  return s;
}

std::vector<std::uint8_t> bits_from_hex(const std::string& s, std::size_t n) {
  if (s.size() != (n + 3) / 4) throw PipelineError("mask length mismatch");
  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else throw PipelineError("bad mask character");
    for (std::size_t k = 0; k < 4 && 4 * i + k < n; ++k) bits[4 * i + k] = (v >> k) & 1;
  }
  return bits;
}

}  // namespace

std::string record_to_json(const DatasetRecord& r) {
  json buildings = json::array(), fits = json::array();
  for (const auto& b : r.buildings) buildings.push_back(ring_json(b));
  for (const auto& f : r.fits) fits.push_back(fit_json(f));
  json axis = json::array();
  for (const auto& p : r.graph.axis.polyline()) axis.push_back(pt(p));
  const auto& m = r.shape.mask;
  json j = {{"id", r.id},
            {"split", r.split == Split::Train ? "train" : "validation"},
            {"block", ring_json(r.block)},
            {"buildings", buildings},
            {"fits", fits},
            {"graph",
             {{"rows", r.graph.grid.rows},
              {"cols", r.graph.grid.cols},
              {"axis", axis},
              {"nodes", nodes_json(r.graph.nodes)},
              {"source", r.graph.source}}},
            {"canonical", nodes_json(r.canonical.nodes)},
            {"shape",
             {{"scale", r.shape.scale},
              {"mask_scale", m.scale},
              {"frame", {pt(m.frame.center), m.frame.angle, m.frame.pixels_per_meter, m.frame.resolution}},
              {"bits", bits_hex(m.bits)}}}};
  return j.dump();
}

DatasetRecord record_from_json(const std::string& line) {
  try {
    const json j = json::parse(line);
    const Polygon block = ring_from(j.at("block"));
    std::vector<Polygon> buildings;
    for (const auto& b : j.at("buildings")) buildings.push_back(ring_from(b));
    std::vector<FitResult> fits;
    for (const auto& f : j.at("fits")) fits.push_back(fit_from(f));
    if (fits.size() != buildings.size()) throw PipelineError("one fit per building expected");

    const auto& gj = j.at("graph");
    std::vector<Point2> axis_pts;
    for (const auto& p : gj.at("axis")) axis_pts.push_back(to_pt(p));
    const GridSpec grid{gj.at("rows").get<int>(), gj.at("cols").get<int>()};
    BlockGraph g{grid, nodes_from(gj.at("nodes")), block, MainAxis::from_polyline(axis_pts, block),
                 gj.at("source").get<std::vector<int>>()};
    CanonicalGraph cg{grid, nodes_from(j.at("canonical"))};
    if (static_cast<int>(g.nodes.size()) != grid.size() || static_cast<int>(cg.nodes.size()) != grid.size())
      throw PipelineError("graph size does not match its grid");

    const auto& sj = j.at("shape");
    BlockShapeFeature shape;
    shape.scale = sj.at("scale").get<double>();
    shape.mask.scale = sj.at("mask_scale").get<double>();
    const auto& fj = sj.at("frame");
    shape.mask.frame = {to_pt(fj.at(0)), fj.at(1).get<double>(), fj.at(2).get<double>(), fj.at(3).get<int>()};
    shape.mask.bits = bits_from_hex(sj.at("bits").get<std::string>(), shape.mask.bits.size());

    const std::string split = j.at("split").get<std::string>();
    if (split != "train" && split != "validation") throw PipelineError("unknown split " + split);
    return {j.at("id").get<std::string>(), split == "train" ? Split::Train : Split::Validation, block,
            std::move(buildings), std::move(fits), std::move(g), std::move(cg), std::move(shape)};
  } catch (const json::exception& e) {
    throw PipelineError(std::string("malformed dataset record: ") + e.what());
  } catch (const GeometryError& e) {
    throw PipelineError(std::string("invalid geometry in dataset record: ") + e.what());
  }
}

namespace {

template <typename F>
void for_each_line(const std::string& path, F&& f) {
  std::istringstream in(read_file(path));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(line);
    } catch (const PipelineError& e) {
      throw PipelineError(fmt::format("{}:{}: {}", path, n, e.what()));
    }
  }
}

}  // namespace

void save_dataset(const std::vector<DatasetRecord>& records, const std::string& path) {
  std::string text;
  for (const auto& r : records) text += record_to_json(r) + "\n";
  write_file(path, text);
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::vector<DatasetRecord> out;
  std::set<std::string> ids;
  for_each_line(path, [&](const std::string& line) {
    out.push_back(record_from_json(line));
    if (!ids.insert(out.back().id).second) throw PipelineError("duplicate id " + out.back().id);
  });
  return out;
}

void save_groups(const std::vector<BlockGroup>& groups, const std::string& path) {
  std::string text;
  for (const auto& g : groups) {
    json b = json::array();
    for (const auto& p : g.buildings) b.push_back(ring_json(p));
    text += json{{"id", g.id}, {"block", ring_json(g.block)}, {"buildings", b}}.dump() + "\n";
  }
  write_file(path, text);
}

std::vector<BlockGroup> load_groups(const std::string& path) {
  std::vector<BlockGroup> out;
  for_each_line(path, [&](const std::string& line) {
    try {
      const json j = json::parse(line);
      std::vector<Point2> ring;
      for (const auto& v : j.at("block")) ring.push_back(to_pt(v));
      BlockGroup g{j.at("id").get<std::string>(), Polygon(ring), {}};
      for (const auto& b : j.at("buildings")) {
        std::vector<Point2> r;
        for (const auto& v : b) r.push_back(to_pt(v));
        g.buildings.emplace_back(r);
      }
      out.push_back(std::move(g));
    } catch (const json::exception& e) {
      throw PipelineError(std::string("malformed group record: ") + e.what());
    } catch (const GeometryError& e) {
      throw PipelineError(std::string("invalid geometry: ") + e.what());
    }
  });
  return out;
}

void save_layouts(const std::vector<GeneratedLayout>& layouts, const std::string& path) {
  std::string text;
  for (const auto& l : layouts) {
    json b = json::array(), s = json::array();
    for (const auto& p : l.buildings) b.push_back(ring_json(p));
    for (auto t : l.shapes) s.push_back(static_cast<int>(t));
    text += json{{"id", l.id},
                 {"block", ring_json(l.block)},
                 {"buildings", b},
                 {"shapes", s},
                 {"nodes", nodes_json(l.nodes)},
                 {"axis_length", l.axis_length},
                 {"pre_clip_out_area", l.pre_clip_out_area}}
                .dump() +
            "\n";
  }
  write_file(path, text);
}

std::vector<GeneratedLayout> load_layouts(const std::string& path) {
  std::vector<GeneratedLayout> out;
  for_each_line(path, [&](const std::string& line) {
    try {
      const json j = json::parse(line);
      GeneratedLayout l{j.at("id").get<std::string>(), ring_from(j.at("block")), {}, {}, {}, 0.0, 0.0};
      for (const auto& b : j.at("buildings")) l.buildings.push_back(ring_from(b));
      for (const auto& s : j.at("shapes")) l.shapes.push_back(shape_from(s.get<int>()));
      if (l.shapes.size() != l.buildings.size()) throw PipelineError("one shape per building expected");
      l.nodes = nodes_from(j.at("nodes"));
      l.axis_length = j.at("axis_length").get<double>();
      l.pre_clip_out_area = j.at("pre_clip_out_area").get<double>();
      out.push_back(std::move(l));
    } catch (const json::exception& e) {
      throw PipelineError(std::string("malformed layout record: ") + e.what());
    } catch (const GeometryError& e) {
      throw PipelineError(std::string("invalid geometry: ") + e.what());
    }
  });
  return out;
}

// ---- SVG ----

namespace {

constexpr const char* kShapeColours[kShapeTypeCount] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759"};

std::string path_data(const Polygon& p) {
  std::string d;
  for (std::size_t i = 0; i < p.size(); ++i)
    d += fmt::format("{}{:.3f} {:.3f} ", i == 0 ? "M " : "L ", p[i].x, -p[i].y);
  return d + "Z";
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  auto grow = [&](const Polygon& p) {
    for (const auto& v : p.ring()) {
      x0 = std::min(x0, v.x), x1 = std::max(x1, v.x);
      y0 = std::min(y0, -v.y), y1 = std::max(y1, -v.y);
    }
  };
  for (const auto& b : scene.blocks) grow(b);
  for (const auto& [b, s] : scene.buildings) grow(b);
  if (x0 > x1) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const double margin = 5.0;
  x0 -= margin, y0 -= margin, x1 += margin, y1 += margin;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.3f}\" height=\"{:.3f}\" "
      "viewBox=\"{:.3f} {:.3f} {:.3f} {:.3f}\">\n",
      x1 - x0, y1 - y0, x0, y0, x1 - x0, y1 - y0);
  out += "<g id=\"blocks\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.5\">\n";
  for (const auto& b : scene.blocks) out += "<path d=\"" + path_data(b) + "\"/>\n";
  out += "</g>\n<g id=\"buildings\" stroke=\"#222222\" stroke-width=\"0.2\">\n";
  for (const auto& [b, s] : scene.buildings)
    out += fmt::format("<path class=\"{}\" fill=\"{}\" d=\"{}\"/>\n", shape_name(s),
                       kShapeColours[static_cast<int>(s)], path_data(b));
  out += "</g>\n</svg>\n";
  return out;
}

void write_svg(const SvgScene& scene, const std::string& path) { write_file(path, render_svg(scene)); }

// ---- config and files ----

Config parse_config(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw PipelineError(fmt::format("config line {}: expected key = value", n));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw PipelineError(fmt::format("config line {}: empty key", n));
    c[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + path);
  out << text;
  if (!out.flush()) throw PipelineError("write failed for " + path);
}

}  // namespace blockgen
