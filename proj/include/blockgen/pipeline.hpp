#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockgen/canonical.hpp"
#include "blockgen/metrics.hpp"

namespace blockgen {

// Bad input from the user: malformed files, missing keys, unknown values.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- GeoJSON ingest ----

inline constexpr double kEarthRadius = 6371008.8;  // meters, mean radius

// Equirectangular projection about a reference lon/lat, in meters.
struct GeoProjection {
  double lon0 = 0.0, lat0 = 0.0;
  Point2 project(double lon, double lat) const;
  std::pair<double, double> unproject(Point2 p) const;
};

double haversine(double lon1, double lat1, double lon2, double lat2);

struct BlockGroup {
  std::string id;
  Polygon block;
  std::vector<Polygon> buildings;
};

struct IngestResult {
  std::vector<BlockGroup> groups;          // ordered by first appearance of the block
  std::vector<std::string> rejected;       // "id: reason"
  GeoProjection projection;
};

// Feature collection with Polygon features tagged kind = block | building and
// a block_id. Blocks with holes are rejected; buildings are grouped under
// their block. Throws PipelineError on malformed input.
IngestResult parse_geojson(const std::string& text);
IngestResult ingest_geojson(const std::string& path);

// GeoJSON text for groups given in projected meters.
std::string groups_to_geojson(const std::vector<BlockGroup>& groups, const GeoProjection& projection);

// ---- dataset ----

enum class Split { Train, Validation };

// Seeded hash of a block id.
std::uint64_t split_key(const std::string& id, std::uint64_t seed);
// Per-id split: train with probability 0.8, independent of the rest of the data.
Split split_of(const std::string& id, std::uint64_t seed);
// Exact 80/20 split: ids ranked by split_key, the lowest 80% (rounded) go to training.
std::vector<Split> assign_splits(const std::vector<std::string>& ids, std::uint64_t seed);

struct DatasetRecord {
  std::string id;
  Split split = Split::Train;
  Polygon block;
  std::vector<Polygon> buildings;
  std::vector<FitResult> fits;
  BlockGraph graph;
  CanonicalGraph canonical;
  BlockShapeFeature shape;
};

struct DatasetOptions {
  std::uint64_t seed = 0;
  FitOptions fit;
  int threads = 0;  // 0: hardware concurrency
};

struct DatasetBuild {
  std::vector<DatasetRecord> records;
  std::vector<std::string> failures;  // "id: reason"
};

DatasetRecord build_record(const BlockGroup& group, const DatasetOptions& options);
DatasetBuild build_dataset(const std::vector<BlockGroup>& groups, const DatasetOptions& options = {});

std::string record_to_json(const DatasetRecord& r);
DatasetRecord record_from_json(const std::string& line);
void save_dataset(const std::vector<DatasetRecord>& records, const std::string& path);
std::vector<DatasetRecord> load_dataset(const std::string& path);

// Raw groups as NDJSON (id, block, buildings).
void save_groups(const std::vector<BlockGroup>& groups, const std::string& path);
std::vector<BlockGroup> load_groups(const std::string& path);

// ---- generated layouts ----

struct GeneratedLayout {
  std::string id;
  Polygon block;
  std::vector<Polygon> buildings;
  std::vector<ShapeType> shapes;
  std::vector<NodeFeatures> nodes;  // world-space slots, for slot-matched errors
  double axis_length = 0.0;
  double pre_clip_out_area = 0.0;
};

void save_layouts(const std::vector<GeneratedLayout>& layouts, const std::string& path);
std::vector<GeneratedLayout> load_layouts(const std::string& path);

// ---- SVG ----

struct SvgScene {
  std::vector<Polygon> blocks;
  std::vector<std::pair<Polygon, ShapeType>> buildings;
};

// One SVG 1.1 document, 1 unit = 1 m, north up.
std::string render_svg(const SvgScene& scene);
void write_svg(const SvgScene& scene, const std::string& path);

// ---- config ----

// key = value lines; '#' starts a comment.
using Config = std::map<std::string, std::string>;
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Runs f(i) for i in [0, n) on a small worker pool; waits for all of them.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace blockgen
