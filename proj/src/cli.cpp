#include "blockgen/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "blockgen/generator.hpp"
#include "blockgen/latentops.hpp"
#include "blockgen/metrics.hpp"
#include "blockgen/pipeline.hpp"
#include "blockgen/synthesis.hpp"
#include "json.hpp"

namespace blockgen {

namespace {

using nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::string checkpoint, out;
  std::string input, dataset, blocks, generated, reference, layouts;
  std::string a, b, split = "all";
  int steps = 5;
  bool reconstruct = false;
  bool verbose = false;
};

// Config file values with typed lookups; flags override file values.
class Settings {
 public:
  Settings(const Flags& f) : flags_(f) {
    if (!f.config.empty()) values_ = load_config(f.config);
  }

  std::uint64_t seed() const { return flags_.seed ? *flags_.seed : get<std::uint64_t>("seed", 0); }
  int epochs(int fallback) const { return flags_.epochs ? *flags_.epochs : get<int>("epochs", fallback); }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      if constexpr (std::is_same_v<T, int>) return std::stoi(it->second);
      else if constexpr (std::is_same_v<T, std::uint64_t>) return std::stoull(it->second);
      else if constexpr (std::is_same_v<T, double>) return std::stod(it->second);
      else return it->second;
    } catch (const std::exception&) {
      throw PipelineError("config value for '" + key + "' is not valid: " + it->second);
    }
  }

  ModelConfig model() const {
    ModelConfig c;
    c.gat_layers = get("gat_layers", c.gat_layers);
    c.hidden = get("hidden", c.hidden);
    c.latent = get("latent", c.latent);
    c.shape_latent = get("shape_latent", c.shape_latent);
    c.decoder_seed = get("decoder_seed", c.decoder_seed);
    c.mask_hidden = get("mask_hidden", c.mask_hidden);
    c.lr = get("lr", c.lr);
    c.batch = get("batch", c.batch);
    if (c.gat_layers < 1 || c.hidden < 1 || c.latent < 1 || c.shape_latent < 1 || c.batch < 1 || !(c.lr > 0))
      throw PipelineError("model settings must be positive");
    return c;
  }

  int threads() const { return get("threads", 0); }

 private:
  Flags flags_;
  Config values_;
};

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw PipelineError("missing required option " + flag);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_geojson(const std::string& path) { return ends_with(path, ".geojson") || ends_with(path, ".json"); }

std::vector<BlockGroup> read_groups(const std::string& path) {
  if (is_geojson(path)) return ingest_geojson(path).groups;
  return load_groups(path);
}

std::vector<DatasetRecord> select_split(std::vector<DatasetRecord> records, const std::string& split) {
  if (split == "all") return records;
  if (split != "train" && split != "validation") throw PipelineError("split must be train, validation or all");
  const Split want = split == "train" ? Split::Train : Split::Validation;
  std::erase_if(records, [&](const DatasetRecord& r) { return r.split != want; });
  return records;
}

int cmd_ingest(const Settings&, const Flags& f) {
  require(f.input, "--input");
  require(f.out, "--out");
  const IngestResult r = ingest_geojson(f.input);
  save_groups(r.groups, f.out);
  std::size_t buildings = 0;
  for (const auto& g : r.groups) buildings += g.buildings.size();
  fmt::print("ingested {} blocks, {} buildings, {} rejected\n", r.groups.size(), buildings, r.rejected.size());
  for (const auto& why : r.rejected) fmt::print("  rejected {}\n", why);
  return kExitOk;
}

int cmd_fit_shapes(const Settings& s, const Flags& f) {
  require(f.input, "--input");
  const auto groups = read_groups(f.input);
  struct Item {
    int group, index;
  };
  std::vector<Item> items;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t i = 0; i < groups[g].buildings.size(); ++i) items.push_back({int(g), int(i)});
  std::vector<FitResult> fits(items.size());
  FitOptions fo;
  fo.seed = mix_seed(s.seed(), 1);
  parallel_for(static_cast<int>(items.size()), s.threads(),
               [&](int k) { fits[k] = fit_building(groups[items[k].group].buildings[items[k].index], fo); });
  std::array<int, kShapeTypeCount> hist{};
  double iou = 0.0;
  std::string text;
  for (std::size_t k = 0; k < items.size(); ++k) {
    ++hist[static_cast<int>(fits[k].shape)];
    iou += fits[k].iou;
    text += json{{"block_id", groups[items[k].group].id},
                 {"index", items[k].index},
                 {"shape", shape_name(fits[k].shape)},
                 {"occupancy", fits[k].occupancy},
                 {"iou", fits[k].iou}}
                .dump() +
            "\n";
  }
  if (!f.out.empty()) write_file(f.out, text);
  fmt::print("fitted {} footprints: Rect {} L {} U {} X {}, mean IoU {:.4f}\n", items.size(), hist[0], hist[1],
             hist[2], hist[3], items.empty() ? 0.0 : iou / items.size());
  return kExitOk;
}

int cmd_build_dataset(const Settings& s, const Flags& f) {
  require(f.input, "--input");
  require(f.out, "--out");
  DatasetOptions o;
  o.seed = s.seed();
  o.fit.seed = mix_seed(s.seed(), 1);
  o.threads = s.threads();
  const DatasetBuild d = build_dataset(read_groups(f.input), o);
  save_dataset(d.records, f.out);
  const auto train = std::count_if(d.records.begin(), d.records.end(), [](auto& r) { return r.split == Split::Train; });
  fmt::print("dataset: {} records ({} train, {} validation), {} failed\n", d.records.size(), train,
             d.records.size() - train, d.failures.size());
  for (const auto& why : d.failures) fmt::print("  failed {}\n", why);
  return kExitOk;
}

void train_shapes(Generator& g, const std::vector<DatasetRecord>& records, int epochs, std::uint64_t seed) {
  std::vector<BlockShapeFeature> shapes;
  for (const auto& r : records) shapes.push_back(r.shape);
  if (shapes.empty()) throw PipelineError("no training records");
  ShapeTrainOptions o;
  o.epochs = epochs;
  o.seed = mix_seed(seed, 10);
  o.lr = g.config().lr;
  const ShapeTrainReport rep = train_shape_encoder(g, shapes, o);
  fmt::print("shape encoder: {} epochs, loss {:.5f}, mask IoU {:.4f}\n", rep.epochs, rep.loss, rep.mean_iou);
}

int cmd_train_shape_encoder(const Settings& s, const Flags& f) {
  require(f.dataset, "--dataset");
  require(f.out, "--out");
  const auto records = select_split(load_dataset(f.dataset), "train");
  Generator g = f.checkpoint.empty() ? Generator(s.model(), s.seed()) : load_checkpoint(f.checkpoint);
  g.metadata.seed = s.seed();
  train_shapes(g, records, s.epochs(s.get("shape_epochs", 100)), s.seed());
  save_checkpoint(g, f.out);
  return kExitOk;
}

int cmd_train(const Settings& s, const Flags& f) {
  require(f.dataset, "--dataset");
  require(f.out, "--out");
  const auto records = select_split(load_dataset(f.dataset), "train");
  if (records.empty()) throw PipelineError("no training records");
  Generator g = f.checkpoint.empty() ? Generator(s.model(), s.seed()) : load_checkpoint(f.checkpoint);
  g.metadata.seed = s.seed();
  if (!g.shape_encoder().trained) train_shapes(g, records, s.get("shape_epochs", 100), s.seed());

  std::vector<TrainingSample> samples;
  for (const auto& r : records) samples.push_back({r.canonical, g.encode_shape(r.shape)});
  LayoutTrainOptions o;
  o.batch = g.config().batch;
  const int per_epoch = static_cast<int>((samples.size() + o.batch - 1) / o.batch);
  o.steps = f.epochs ? *f.epochs * per_epoch : s.get("steps", s.epochs(100) * per_epoch);
  o.seed = mix_seed(s.seed(), 11);
  o.check_every = std::max(1, o.steps / 10);
  const auto history = train_layout_vae(g, samples, o);
  if (!history.empty()) {
    const auto& last = history.back();
    fmt::print("layout VAE: {} steps, loss {:.5f} (geometry {:.5f}, categorical {:.5f}, kl {:.5f})\n", history.size(),
               last.total, last.geometry, last.categorical, last.kl);
  }
  save_checkpoint(g, f.out);
  return kExitOk;
}

struct Target {
  std::string id;
  Polygon block;
  std::optional<CanonicalGraph> known;  // present for reconstruction
};

GeneratedLayout realize(const Generator& g, const Target& t, const std::vector<double>& z, const ShapeLatent& m,
                        const BlockShapeFeature& shape, const MainAxis& axis, std::uint64_t seed) {
  const CanonicalGraph cg = g.decode_layout(z, m);
  const RealizedBlock rb = realize_block(cg, shape, axis, seed);
  GeneratedLayout out{t.id, t.block, {}, {}, from_canonical(cg, shape, axis).graph.nodes, axis.length(),
                      rb.pre_clip_out_area};
  for (const auto& b : rb.buildings) {
    out.buildings.push_back(b.footprint);
    out.shapes.push_back(cg.nodes[b.node].shape);
  }
  return out;
}

void write_outputs(const std::vector<GeneratedLayout>& layouts, const Flags& f) {
  SvgScene scene;
  for (const auto& l : layouts) {
    scene.blocks.push_back(l.block);
    for (std::size_t i = 0; i < l.buildings.size(); ++i) scene.buildings.emplace_back(l.buildings[i], l.shapes[i]);
  }
  write_svg(scene, f.out);
  if (!f.layouts.empty()) save_layouts(layouts, f.layouts);
  std::size_t n = 0;
  for (const auto& l : layouts) n += l.buildings.size();
  fmt::print("generated {} blocks, {} buildings\n", layouts.size(), n);
}

int cmd_generate(const Settings& s, const Flags& f) {
  require(f.checkpoint, "--checkpoint");
  require(f.out, "--out");
  if (f.blocks.empty() == f.dataset.empty()) throw PipelineError("give exactly one of --blocks or --dataset");
  const Generator g = load_checkpoint(f.checkpoint);

  std::vector<Target> targets;
  if (!f.blocks.empty()) {
    for (auto& grp : read_groups(f.blocks)) targets.push_back({grp.id, grp.block, std::nullopt});
  } else {
    for (auto& r : select_split(load_dataset(f.dataset), f.split))
      targets.push_back({r.id, r.block, f.reconstruct ? std::optional(r.canonical) : std::nullopt});
  }
  if (f.reconstruct && f.dataset.empty()) throw PipelineError("--reconstruct needs --dataset");

  const std::uint64_t seed = s.seed();
  std::vector<std::optional<GeneratedLayout>> out(targets.size());
  std::vector<std::string> errors(targets.size());
  parallel_for(static_cast<int>(targets.size()), s.threads(), [&](int i) {
    const Target& t = targets[i];
    try {
      const MainAxis axis = extract_main_axis(t.block);
      const BlockShapeFeature shape = block_shape_feature(t.block);
      const ShapeLatent m = g.encode_shape(shape);
      std::vector<double> z;
      if (t.known) {
        z = g.encode_layout(*t.known, m).mu;
      } else {
        Rng rng(mix_seed(seed, 1000 + i));
        z = g.sample_prior(rng);
      }
      out[i] = realize(g, t, z, m, shape, axis, mix_seed(seed, 5000 + i));
    } catch (const GeometryError& e) {
      errors[i] = e.what();
    }
  });
  std::vector<GeneratedLayout> layouts;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i]) layouts.push_back(std::move(*out[i]));
    else spdlog::warn("block {} skipped: {}", targets[i].id, errors[i]);
  }
  write_outputs(layouts, f);
  return kExitOk;
}

int cmd_sparse_generate(const Settings& s, const Flags& f) {
  require(f.checkpoint, "--checkpoint");
  require(f.blocks, "--blocks");
  require(f.out, "--out");
  const Generator g = load_checkpoint(f.checkpoint);
  const auto groups = read_groups(f.blocks);
  std::vector<BlockGroup> known;
  std::vector<const BlockGroup*> empty;
  for (const auto& grp : groups) {
    if (grp.buildings.empty()) empty.push_back(&grp);
    else known.push_back(grp);
  }
  DatasetOptions dopt;
  dopt.fit.seed = mix_seed(s.seed(), 1);
  dopt.threads = s.threads();
  const DatasetBuild d = build_dataset(known, dopt);
  if (d.records.empty()) throw PipelineError("sparse generation needs blocks with buildings as priors");

  std::vector<LatentPrior> priors;
  for (const auto& r : d.records)
    priors.push_back({centroid(r.block), g.encode_layout(r.canonical, g.encode_shape(r.shape)).mu});
  SparsePriorOptions so;
  so.k = s.get("k", so.k);
  so.sigma = s.get("sigma", so.sigma);

  std::vector<GeneratedLayout> layouts;
  for (std::size_t i = 0; i < empty.size(); ++i) {
    const BlockGroup& t = *empty[i];
    try {
      const MainAxis axis = extract_main_axis(t.block);
      const BlockShapeFeature shape = block_shape_feature(t.block);
      const auto z = sparse_prior_latent(centroid(t.block), priors, so, mix_seed(s.seed(), 2000 + i)).z;
      layouts.push_back(realize(g, {t.id, t.block, std::nullopt}, z, g.encode_shape(shape), shape, axis,
                                mix_seed(s.seed(), 5000 + i)));
    } catch (const GeometryError& e) {
      spdlog::warn("block {} skipped: {}", t.id, e.what());
    }
  }
  // known blocks are drawn with their observed buildings
  SvgScene scene;
  for (const auto& grp : known) {
    scene.blocks.push_back(grp.block);
  }
  for (const auto& r : d.records)
    for (std::size_t i = 0; i < r.buildings.size(); ++i) scene.buildings.emplace_back(r.buildings[i], r.fits[i].shape);
  for (const auto& l : layouts) {
    scene.blocks.push_back(l.block);
    for (std::size_t i = 0; i < l.buildings.size(); ++i) scene.buildings.emplace_back(l.buildings[i], l.shapes[i]);
  }
  write_svg(scene, f.out);
  if (!f.layouts.empty()) save_layouts(layouts, f.layouts);
  fmt::print("sparse generation: {} priors, {} empty blocks filled\n", d.records.size(), layouts.size());
  return kExitOk;
}

int cmd_interpolate(const Settings& s, const Flags& f) {
  require(f.checkpoint, "--checkpoint");
  require(f.dataset, "--dataset");
  require(f.a, "--a");
  require(f.b, "--b");
  require(f.out, "--out");
  if (f.steps < 2) throw PipelineError("--steps must be at least 2");
  const Generator g = load_checkpoint(f.checkpoint);
  const auto records = load_dataset(f.dataset);
  auto find = [&](const std::string& id) -> const DatasetRecord& {
    for (const auto& r : records)
      if (r.id == id) return r;
    throw PipelineError("no record with id " + id);
  };
  const DatasetRecord& ra = find(f.a);
  const DatasetRecord& rb = find(f.b);
  const ShapeLatent ma = g.encode_shape(ra.shape);
  const auto za = g.encode_layout(ra.canonical, ma).mu;
  const auto zb = g.encode_layout(rb.canonical, g.encode_shape(rb.shape)).mu;
  const MainAxis& axis = ra.graph.axis;

  // frames laid out left to right, each a copy of block a
  const OrientedBox frame = min_area_oriented_box(ra.block);
  const double spacing = frame.width + 20.0;
  std::vector<GeneratedLayout> layouts;
  for (int k = 0; k < f.steps; ++k) {
    const double alpha = static_cast<double>(k) / (f.steps - 1);
    GeneratedLayout l = realize(g, {fmt::format("{}-{}-{}", f.a, f.b, k), ra.block, std::nullopt},
                                interpolate(za, zb, alpha), ma, ra.shape, axis, mix_seed(s.seed(), 3000 + k));
    const Point2 shift{k * spacing, 0.0};
    l.block = l.block.translated(shift);
    for (auto& b : l.buildings) b = b.translated(shift);
    layouts.push_back(std::move(l));
  }
  write_outputs(layouts, f);
  return kExitOk;
}

int cmd_evaluate(const Settings&, const Flags& f) {
  require(f.generated, "--generated");
  const auto layouts = load_layouts(f.generated);
  std::map<std::string, DatasetRecord> refs;
  if (!f.reference.empty())
    for (auto& r : load_dataset(f.reference)) refs.emplace(r.id, std::move(r));

  std::vector<EvaluationInput> items;
  for (const auto& l : layouts) {
    EvaluationInput in;
    in.id = l.id;
    in.generated = {l.block, l.buildings};
    in.pre_clip_out_area = l.pre_clip_out_area;
    if (auto it = refs.find(l.id); it != refs.end()) {
      in.reference = Layout{it->second.block, it->second.buildings};
      if (l.nodes.size() == it->second.graph.nodes.size()) {
        BlockGraph gen = it->second.graph;
        gen.nodes = l.nodes;
        in.generated_graph = std::move(gen);
        in.reference_graph = it->second.graph;
      }
    }
    items.push_back(std::move(in));
  }
  const EvaluationReport r = evaluate(items);
  const std::string text = report_to_json(r);
  if (!f.out.empty()) write_file(f.out, text + "\n");
  fmt::print("evaluated {} blocks: overlap {:.3f}%, out-block {:.3f}%", r.blocks, r.overlap, r.out_block);
  if (r.l_sim) fmt::print(", L-Sim {:.3f}", *r.l_sim);
  if (r.position_error) fmt::print(", position error {:.3f}%", *r.position_error);
  if (r.coverage_error) fmt::print(", coverage error {:.3f}%", *r.coverage_error);
  fmt::print("\n");
  return kExitOk;
}

int cmd_render(const Settings&, const Flags& f) {
  require(f.input, "--input");
  require(f.out, "--out");
  SvgScene scene;
  if (is_geojson(f.input)) {
    for (const auto& grp : ingest_geojson(f.input).groups) {
      scene.blocks.push_back(grp.block);
      for (const auto& b : grp.buildings) scene.buildings.emplace_back(b, ShapeType::Rect);
    }
  } else {
    const std::string text = read_file(f.input);
    const auto first = text.substr(0, text.find('\n'));
    json head;
    try {
      head = first.empty() ? json::object() : json::parse(first);
    } catch (const json::exception& e) {
      throw PipelineError(std::string("cannot read ") + f.input + ": " + e.what());
    }
    if (head.contains("fits")) {
      for (const auto& r : load_dataset(f.input)) {
        scene.blocks.push_back(r.block);
        for (std::size_t i = 0; i < r.buildings.size(); ++i) scene.buildings.emplace_back(r.buildings[i], r.fits[i].shape);
      }
    } else if (head.contains("shapes")) {
      for (const auto& l : load_layouts(f.input)) {
        scene.blocks.push_back(l.block);
        for (std::size_t i = 0; i < l.buildings.size(); ++i) scene.buildings.emplace_back(l.buildings[i], l.shapes[i]);
      }
    } else if (!first.empty()) {
      for (const auto& grp : load_groups(f.input)) {
        scene.blocks.push_back(grp.block);
        for (const auto& b : grp.buildings) scene.buildings.emplace_back(b, ShapeType::Rect);
      }
    }
  }
  write_svg(scene, f.out);
  fmt::print("rendered {} blocks, {} buildings\n", scene.blocks.size(), scene.buildings.size());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Generate building layouts for city blocks."};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "key = value settings file");
  app.add_option("--seed", f.seed, "seed for all randomness");
  app.add_flag("-v,--verbose", f.verbose, "debug logging");

  auto common = [&](CLI::App* c) {
    c->add_option("--config", f.config, "key = value settings file");
    c->add_option("--seed", f.seed, "seed for all randomness");
    c->add_option("--out", f.out, "output path");
    c->add_flag("-v,--verbose", f.verbose, "debug logging");
    return c;
  };
  auto* ingest = common(app.add_subcommand("ingest", "GeoJSON to block groups (NDJSON)"));
  ingest->add_option("--input", f.input, "GeoJSON feature collection")->required();
  auto* fit = common(app.add_subcommand("fit-shapes", "fit shape templates to every building"));
  fit->add_option("--input", f.input, "GeoJSON or block groups")->required();
  auto* build = common(app.add_subcommand("build-dataset", "fit, graph and normalize every block"));
  build->add_option("--input", f.input, "GeoJSON or block groups")->required();
  auto* tse = common(app.add_subcommand("train-shape-encoder", "train the block shape encoder"));
  tse->add_option("--dataset", f.dataset, "dataset NDJSON")->required();
  tse->add_option("--checkpoint", f.checkpoint, "start from this checkpoint");
  tse->add_option("--epochs", f.epochs, "passes over the shapes");
  auto* train = common(app.add_subcommand("train", "train the layout VAE"));
  train->add_option("--dataset", f.dataset, "dataset NDJSON")->required();
  train->add_option("--checkpoint", f.checkpoint, "start from this checkpoint");
  train->add_option("--epochs", f.epochs, "passes over the training blocks");
  auto* gen = common(app.add_subcommand("generate", "generate layouts for blocks"));
  gen->add_option("--checkpoint", f.checkpoint, "trained model")->required();
  gen->add_option("--blocks", f.blocks, "GeoJSON or block groups to fill");
  gen->add_option("--dataset", f.dataset, "dataset whose blocks to fill");
  gen->add_option("--split", f.split, "train, validation or all")->check(CLI::IsMember({"train", "validation", "all"}));
  gen->add_flag("--reconstruct", f.reconstruct, "decode each record's own posterior mean");
  gen->add_option("--layouts", f.layouts, "also write the layouts as NDJSON");
  auto* sparse = common(app.add_subcommand("sparse-generate", "fill empty blocks from nearby known ones"));
  sparse->add_option("--checkpoint", f.checkpoint, "trained model")->required();
  sparse->add_option("--blocks", f.blocks, "GeoJSON with known and empty blocks")->required();
  sparse->add_option("--layouts", f.layouts, "also write the layouts as NDJSON");
  auto* interp = common(app.add_subcommand("interpolate", "blend the layouts of two blocks"));
  interp->add_option("--checkpoint", f.checkpoint, "trained model")->required();
  interp->add_option("--dataset", f.dataset, "dataset NDJSON")->required();
  interp->add_option("--a", f.a, "first block id")->required();
  interp->add_option("--b", f.b, "second block id")->required();
  interp->add_option("--steps", f.steps, "frames including both ends");
  interp->add_option("--layouts", f.layouts, "also write the layouts as NDJSON");
  auto* eval = common(app.add_subcommand("evaluate", "metric report for generated layouts"));
  eval->add_option("--generated", f.generated, "layouts NDJSON")->required();
  eval->add_option("--reference", f.reference, "dataset with the reference layouts");
  auto* render = common(app.add_subcommand("render", "draw blocks and buildings as SVG"));
  render->add_option("--input", f.input, "GeoJSON, groups, dataset or layouts")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUser;
  }
  spdlog::set_level(f.verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    const Settings s(f);
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "ingest") return cmd_ingest(s, f);
    if (name == "fit-shapes") return cmd_fit_shapes(s, f);
    if (name == "build-dataset") return cmd_build_dataset(s, f);
    if (name == "train-shape-encoder") return cmd_train_shape_encoder(s, f);
    if (name == "train") return cmd_train(s, f);
    if (name == "generate") return cmd_generate(s, f);
    if (name == "sparse-generate") return cmd_sparse_generate(s, f);
    if (name == "interpolate") return cmd_interpolate(s, f);
    if (name == "evaluate") return cmd_evaluate(s, f);
    if (name == "render") return cmd_render(s, f);
    return kExitInternal;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const LatentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace blockgen
