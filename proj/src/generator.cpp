#include "blockgen/generator.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include "json.hpp"

namespace blockgen {

using nlohmann::json;
using nn::Tensor;

namespace {

constexpr int kMask = BinaryMask::kResolution;
constexpr std::array<int, 5> kHeadWidth{2, 2, 2, 4, 1};  // e, (x', y'), (w', h'), s, a

Tensor row_tensor(const std::vector<double>& v) { return Tensor::from({1, static_cast<int>(v.size())}, v); }

}  // namespace

std::string config_to_json(const ModelConfig& c) {
  json j = {{"rows", c.grid.rows},
            {"cols", c.grid.cols},
            {"gat_layers", c.gat_layers},
            {"hidden", c.hidden},
            {"latent", c.latent},
            {"shape_latent", c.shape_latent},
            {"decoder_seed", c.decoder_seed},
            {"pos_code", c.pos_code},
            {"conv_channels", c.conv_channels},
            {"mask_hidden", c.mask_hidden},
            {"w_geometry", c.w_geometry},
            {"w_categorical", c.w_categorical},
            {"w_kl", c.w_kl},
            {"lr", c.lr},
            {"batch", c.batch},
            {"logvar_floor", c.logvar_floor}};
  return j.dump();
}

ModelConfig config_from_json(const std::string& s) {
  const json j = json::parse(s);
  ModelConfig c;
  c.grid = {j.at("rows").get<int>(), j.at("cols").get<int>()};
  c.gat_layers = j.at("gat_layers");
  c.hidden = j.at("hidden");
  c.latent = j.at("latent");
  c.shape_latent = j.at("shape_latent");
  c.decoder_seed = j.at("decoder_seed");
  c.pos_code = j.at("pos_code");
  c.conv_channels = j.at("conv_channels").get<std::array<int, 4>>();
  c.mask_hidden = j.at("mask_hidden");
  c.w_geometry = j.at("w_geometry");
  c.w_categorical = j.at("w_categorical");
  c.w_kl = j.at("w_kl");
  c.lr = j.at("lr");
  c.batch = j.at("batch");
  c.logvar_floor = j.at("logvar_floor");
  return c;
}

std::vector<double> positional_code(const GridSpec& grid, int width) {
  std::vector<double> out(static_cast<std::size_t>(grid.size()) * width, 0.0);
  const int row_dims = std::min(4, width);
  for (int r = 0; r < grid.rows; ++r) {
    const double ur = grid.rows > 1 ? double(r) / (grid.rows - 1) : 0.0;
    for (int c = 0; c < grid.cols; ++c) {
      const double uc = grid.cols > 1 ? double(c) / (grid.cols - 1) : 0.0;
      double* row = &out[static_cast<std::size_t>(grid.index(r, c)) * width];
      for (int k = 0; k < row_dims; ++k) row[k] = std::cos(std::numbers::pi * (k + 1) * ur);
      for (int k = row_dims; k < width; ++k) {
        const int f = (k - row_dims) / 2 + 1;
        row[k] = (k - row_dims) % 2 == 0 ? std::sin(std::numbers::pi * f * uc) : std::cos(std::numbers::pi * f * uc);
      }
    }
  }
  return out;
}

Tensor shape_input(const BlockShapeFeature& f) {
  std::vector<double> v(2 * kMask * kMask);
  for (int i = 0; i < kMask * kMask; ++i) {
    v[i] = f.mask.bits[i] ? 1.0 : 0.0;
    v[kMask * kMask + i] = f.scale / 1000.0;
  }
  return Tensor::from({2, kMask, kMask}, std::move(v));
}

// ---- shape encoder ----

ShapeEncoder::ShapeEncoder(const ModelConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  int in = 2;
  for (int k = 0; k < 4; ++k) {
    conv_[k] = nn::Conv2d(in, c.conv_channels[k], 4, 2, 1, rng, params_, "shape.conv" + std::to_string(k));
    in = c.conv_channels[k];
  }
  to_latent_ = nn::Dense(in * 16, c.shape_latent, rng, params_, "shape.latent");
  dec_hidden_ = nn::Dense(c.shape_latent, c.mask_hidden, rng, params_, "shape.dec0");
  dec_out_ = nn::Dense(c.mask_hidden, kMask * kMask, rng, params_, "shape.dec1");
}

Tensor ShapeEncoder::encode(const Tensor& input) const {
  Tensor x = input;
  for (const auto& conv : conv_) x = nn::elu(conv(x));
  return to_latent_(nn::reshape(x, {1, static_cast<int>(x.size())}));
}

Tensor ShapeEncoder::decode(const Tensor& m) const { return dec_out_(nn::elu(dec_hidden_(m))); }

ShapeLatent ShapeEncoder::encode(const BlockShapeFeature& f) const {
  std::vector<double> m = encode(shape_input(f)).values();
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k < latent_mean.size()) m[k] -= latent_mean[k];
    m[k] /= latent_scale;
  }
  return {std::move(m)};
}

std::vector<std::uint8_t> ShapeEncoder::reconstruct(const BlockShapeFeature& f) const {
  const Tensor logits = decode(encode(shape_input(f)));
  std::vector<std::uint8_t> out(logits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = logits[i] > 0.0 ? 1 : 0;
  return out;
}

// ---- layout VAE ----

LayoutVae::LayoutVae(const ModelConfig& c, std::uint64_t seed)
    : cfg_(c),
      adj_(nn::adjacency_from_edges(c.grid.size(), grid_edges(c.grid))),
      pos_(Tensor::from({c.grid.size(), c.pos_code}, positional_code(c.grid, c.pos_code))) {
  std::vector<double> anchor;
  for (int i = 0; i < c.grid.size(); ++i)
    anchor.insert(anchor.end(), {c.grid.cols > 1 ? double(i % c.grid.cols) / (c.grid.cols - 1) : 0.5, 0.0});
  anchor_ = Tensor::from({c.grid.size(), 2}, anchor);
  if (c.gat_layers < 1) throw nn::NnError("at least one GAT layer is required");
  Rng rng(seed);
  for (int t = 0; t < c.gat_layers; ++t)
    enc_gat_.push_back(nn::make_gat_weights(t == 0 ? kNodeFeatureWidth : c.hidden, c.hidden, rng, params_,
                                            "enc.gat" + std::to_string(t)));
  enc_hidden_ = nn::Dense(c.gat_layers * c.hidden + c.shape_latent, c.hidden, rng, params_, "enc.hidden");
  enc_mu_ = nn::Dense(c.hidden, c.latent, rng, params_, "enc.mu");
  enc_logvar_ = nn::Dense(c.hidden, c.latent, rng, params_, "enc.logvar");
  dec_seed_ = nn::Dense(c.latent + c.shape_latent, c.grid.size() * c.decoder_seed, rng, params_, "dec.seed");
  for (int t = 0; t < c.gat_layers; ++t)
    dec_gat_.push_back(nn::make_gat_weights(t == 0 ? c.decoder_seed + c.pos_code : c.hidden, c.hidden, rng, params_,
                                            "dec.gat" + std::to_string(t)));
  for (int k = 0; k < 5; ++k) {
    head_hidden_[k] = nn::Dense(c.hidden, c.hidden, rng, params_, "dec.head" + std::to_string(k) + ".0");
    head_out_[k] = nn::Dense(c.hidden, kHeadWidth[k], rng, params_, "dec.head" + std::to_string(k) + ".1");
  }
}

Posterior LayoutVae::encode(const CanonicalGraph& cg, const Tensor& m) const {
  if (!(cg.grid == cfg_.grid) || static_cast<int>(cg.nodes.size()) != cfg_.grid.size())
    throw nn::NnError("encode: graph does not match the model grid");
  if (m.size() != static_cast<std::size_t>(cfg_.shape_latent)) throw nn::NnError("encode: shape latent size");
  Tensor h = Tensor::from({cfg_.grid.size(), kNodeFeatureWidth}, node_feature_matrix(cg));
  std::vector<Tensor> per_step;
  for (const auto& w : enc_gat_) {
    h = nn::elu(nn::gat_layer(h, adj_, w));
    per_step.push_back(h);
  }
  const Tensor pooled = nn::mean_rows(nn::concat_cols(per_step));
  const Tensor u = nn::elu(enc_hidden_(nn::concat_cols({pooled, nn::reshape(m, {1, cfg_.shape_latent})})));
  return {enc_mu_(u), enc_logvar_(u)};
}

DecoderOutput LayoutVae::decode(const Tensor& z, const Tensor& m) const {
  if (z.size() != static_cast<std::size_t>(cfg_.latent)) throw nn::NnError("decode: latent size");
  if (m.size() != static_cast<std::size_t>(cfg_.shape_latent)) throw nn::NnError("decode: shape latent size");
  const int n = cfg_.grid.size();
  const Tensor u = nn::concat_cols({nn::reshape(z, {1, cfg_.latent}), nn::reshape(m, {1, cfg_.shape_latent})});
  Tensor h = nn::concat_cols({nn::elu(nn::reshape(dec_seed_(u), {n, cfg_.decoder_seed})), pos_});
  for (const auto& w : dec_gat_) h = nn::elu(nn::gat_layer(h, adj_, w));
  std::array<Tensor, 5> out;
  for (int k = 0; k < 5; ++k) out[k] = head_out_[k](nn::elu(head_hidden_[k](h)));
  // the position head predicts an offset from the slot's nominal place along the axis
  return {out[0], nn::add(out[1], anchor_), out[2], out[3], out[4]};
}

Tensor LayoutVae::reparameterize(const Posterior& q, Rng& rng) const {
  std::vector<double> eps(q.mu.size());
  for (double& e : eps) e = rng.normal();
  const Tensor e = Tensor::from(q.mu.shape(), std::move(eps));
  return nn::add(q.mu, nn::mul(nn::std_from_logvar(q.logvar, cfg_.logvar_floor), e));
}

Tensor LayoutVae::loss(const TrainingSample& s, Rng& rng, LossBreakdown& parts) const {
  return loss(s.graph, row_tensor(s.shape.m), rng, parts);
}

Tensor LayoutVae::loss(const CanonicalGraph& cg, const Tensor& m, Rng& rng, LossBreakdown& parts) const {
  const Posterior q = encode(cg, m);
  const DecoderOutput out = decode(reparameterize(q, rng), m);

  std::vector<int> e_label, idx, s_label;
  std::vector<double> geo_target, a_target;
  for (int i = 0; i < static_cast<int>(cg.nodes.size()); ++i) {
    const NodeFeatures& n = cg.nodes[i];
    e_label.push_back(n.exists ? 1 : 0);
    if (!n.exists) continue;
    idx.push_back(i);
    s_label.push_back(static_cast<int>(n.shape));
    geo_target.insert(geo_target.end(), {n.x, n.y, n.w, n.h});
    a_target.push_back(n.occupancy);
  }
  const Tensor ce_e = nn::cross_entropy(out.e_logits, e_label);
  Tensor geometry = Tensor::scalar(0.0), ce_s = Tensor::scalar(0.0), l2_a = Tensor::scalar(0.0);
  if (!idx.empty()) {
    const int k = static_cast<int>(idx.size());
    geometry = nn::l2(nn::gather_rows(nn::concat_cols({out.position, out.size}), idx),
                      Tensor::from({k, 4}, geo_target));
    ce_s = nn::cross_entropy(nn::gather_rows(out.s_logits, idx), s_label);
    l2_a = nn::l2(nn::gather_rows(out.occupancy, idx), Tensor::from({k, 1}, a_target));
  }
  const Tensor kl = nn::scale(nn::kl_standard_normal(q.mu, q.logvar), 1.0 / cfg_.latent);
  const Tensor categorical = nn::add(nn::add(ce_e, ce_s), l2_a);
  const Tensor total = nn::add(nn::add(nn::scale(geometry, cfg_.w_geometry), nn::scale(categorical, cfg_.w_categorical)),
                               nn::scale(kl, cfg_.w_kl));
  parts.total = total.item();
  parts.geometry = geometry.item();
  parts.categorical = categorical.item();
  parts.kl = kl.item();
  parts.ce_e = ce_e.item();
  parts.ce_s = ce_s.item();
  parts.l2_a = l2_a.item();
  parts.w_geometry = cfg_.w_geometry;
  parts.w_categorical = cfg_.w_categorical;
  parts.w_kl = cfg_.w_kl;
  parts.finite = std::isfinite(parts.total);
  return total;
}

CanonicalGraph to_canonical_graph(const DecoderOutput& out, const GridSpec& grid) {
  CanonicalGraph cg{grid, std::vector<NodeFeatures>(grid.size())};
  for (int i = 0; i < grid.size(); ++i) {
    if (!(out.e_logits[2 * i + 1] > out.e_logits[2 * i])) continue;
    NodeFeatures& n = cg.nodes[i];
    n.exists = true;
    n.x = out.position[2 * i];
    n.y = out.position[2 * i + 1];
    n.w = std::max(out.size[2 * i], 1e-3);
    n.h = std::max(out.size[2 * i + 1], 1e-3);
    const double* s = &out.s_logits.values()[4 * i];
    n.shape = static_cast<ShapeType>(std::max_element(s, s + 4) - s);
    n.occupancy = std::clamp(out.occupancy[i], 0.05, 1.0);
  }
  return cg;
}

// ---- generator facade ----

Generator::Generator(const ModelConfig& config, std::uint64_t seed)
    : cfg_(config), shape_(config, mix_seed(seed, 1)), vae_(config, mix_seed(seed, 2)) {
  metadata.seed = seed;
}

ShapeLatent Generator::encode_shape(const BlockShapeFeature& f) const {
  if (!shape_.trained) spdlog::warn("shape encoder used before training");
  return shape_.encode(f);
}

LayoutLatent Generator::encode_layout(const CanonicalGraph& cg, const ShapeLatent& m) const {
  const Posterior q = vae_.encode(cg, row_tensor(m.m));
  return {q.mu.values(), q.mu.values(), q.logvar.values()};
}

CanonicalGraph Generator::decode_layout(const std::vector<double>& z, const ShapeLatent& m) const {
  return to_canonical_graph(vae_.decode(row_tensor(z), row_tensor(m.m)), cfg_.grid);
}

CanonicalGraph Generator::reconstruct(const CanonicalGraph& cg, const ShapeLatent& m) const {
  return decode_layout(encode_layout(cg, m).mu, m);
}

std::vector<double> Generator::sample_prior(Rng& rng) const {
  std::vector<double> z(cfg_.latent);
  for (double& v : z) v = rng.normal();
  return z;
}

// ---- training ----

double mask_iou(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mask_iou: size mismatch");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

ShapeTrainReport train_shape_encoder(Generator& g, const std::vector<BlockShapeFeature>& shapes,
                                     const ShapeTrainOptions& o) {
  ShapeEncoder& enc = g.shape_encoder();
  ShapeTrainReport rep;
  if (shapes.empty()) return rep;
  std::vector<Tensor> inputs;
  std::vector<std::vector<double>> targets;
  for (const auto& f : shapes) {
    inputs.push_back(shape_input(f));
    targets.emplace_back(f.mask.bits.begin(), f.mask.bits.end());
  }
  auto mean_iou = [&] {
    double s = 0;
    for (const auto& f : shapes) s += mask_iou(enc.reconstruct(f), f.mask.bits);
    return s / shapes.size();
  };
  nn::Adam opt(enc.params().tensors(), nn::AdamOptions{o.lr});
  Rng rng(mix_seed(o.seed, 11));
  std::vector<int> order(shapes.size());
  std::iota(order.begin(), order.end(), 0);
  const int batch = std::max(1, o.batch);
  for (int epoch = 1; epoch <= o.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(0, int(i) - 1)]);
    double total = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += batch) {
      const std::size_t b1 = std::min(order.size(), b0 + batch);
      opt.zero_grad();
      for (std::size_t k = b0; k < b1; ++k) {
        const Tensor l = nn::bce_with_logits(enc.decode(enc.encode(inputs[order[k]])), targets[order[k]]);
        total += l.item();
        nn::backward(nn::scale(l, 1.0 / double(b1 - b0)));
      }
      opt.step();
    }
    rep.epochs = epoch;
    rep.loss = total / shapes.size();
    ++g.metadata.shape_iterations;
    if (epoch % std::max(1, o.check_every) == 0 || epoch == o.epochs) {
      rep.mean_iou = mean_iou();
      spdlog::debug("shape epoch {} loss {:.5f} iou {:.4f}", epoch, rep.loss, rep.mean_iou);
      if (rep.mean_iou >= o.target_iou) break;
    }
  }
  // standardize m' so the layout VAE sees unit-scale conditioning
  const std::size_t dim = static_cast<std::size_t>(g.config().shape_latent);
  std::vector<std::vector<double>> raw;
  for (const auto& in : inputs) raw.push_back(enc.encode(in).values());
  enc.latent_mean.assign(dim, 0.0);
  for (const auto& m : raw)
    for (std::size_t k = 0; k < dim; ++k) enc.latent_mean[k] += m[k] / raw.size();
  double var = 0;
  for (const auto& m : raw)
    for (std::size_t k = 0; k < dim; ++k) var += std::pow(m[k] - enc.latent_mean[k], 2);
  var /= double(raw.size() * dim);
  enc.latent_scale = var > 1e-12 ? std::sqrt(var) : 1.0;
  enc.trained = true;
  return rep;
}

LossBreakdown training_step(const LayoutVae& vae, nn::Adam& opt, const std::vector<TrainingSample>& batch,
                            Rng& rng) {
  LossBreakdown sum;
  if (batch.empty()) return sum;
  opt.zero_grad();
  const double inv = 1.0 / double(batch.size());
  for (const auto& s : batch) {
    LossBreakdown p;
    Tensor l;
    try {
      l = vae.loss(s, rng, p);
    } catch (const nn::NonFiniteError& e) {
      p.finite = false;
    }
    if (!p.finite) {
      spdlog::warn("non-finite loss; optimizer step skipped");
      opt.zero_grad();
      sum.finite = false;
      return sum;
    }
    nn::backward(nn::scale(l, inv));
    sum.total += p.total * inv;
    sum.geometry += p.geometry * inv;
    sum.categorical += p.categorical * inv;
    sum.kl += p.kl * inv;
    sum.ce_e += p.ce_e * inv;
    sum.ce_s += p.ce_s * inv;
    sum.l2_a += p.l2_a * inv;
    sum.w_geometry = p.w_geometry;
    sum.w_categorical = p.w_categorical;
    sum.w_kl = p.w_kl;
  }
  opt.step();
  return sum;
}

std::vector<LossBreakdown> train_layout_vae(Generator& g, const std::vector<TrainingSample>& samples,
                                            const LayoutTrainOptions& o) {
  std::vector<LossBreakdown> history;
  if (samples.empty()) return history;
  nn::Adam opt(g.vae().params().tensors(), nn::AdamOptions{g.config().lr});
  Rng rng(mix_seed(o.seed, 21));
  std::vector<int> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  const std::size_t batch = std::min<std::size_t>(std::max(1, o.batch), samples.size());
  for (int step = 1; step <= o.steps; ++step) {
    std::vector<TrainingSample> b;
    while (b.size() < batch) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(0, int(i) - 1)]);
        cursor = 0;
      }
      b.push_back(samples[order[cursor++]]);
    }
    history.push_back(training_step(g.vae(), opt, b, rng));
    ++g.metadata.layout_iterations;
    if (step % std::max(1, o.check_every) == 0) {
      spdlog::debug("layout step {} loss {:.5f}", step, history.back().total);
      if (o.stop && o.stop(step)) break;
    }
  }
  return history;
}

// ---- checkpoint ----

namespace {

constexpr char kMagic[4] = {'G', 'M', 'C', 'K'};

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint64_t get_uint(std::istream& is, int bytes) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), bytes)) throw CheckpointError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::vector<std::pair<std::string, Tensor>> all_params(const Generator& g) {
  auto out = g.shape_encoder().params().items();
  const auto& v = g.vae().params().items();
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

void save_checkpoint(const Generator& g, const std::string& path) {
  json tensors = json::array();
  const auto params = all_params(g);
  for (const auto& [name, t] : params) tensors.push_back({{"name", name}, {"shape", t.shape()}});
  const json header = {{"format", "blockgen-checkpoint"},
                       {"version", std::to_string(kCheckpointVersion)},
                       {"config", json::parse(config_to_json(g.config()))},
                       {"metadata",
                        {{"shape_iterations", g.metadata.shape_iterations},
                         {"layout_iterations", g.metadata.layout_iterations},
                         {"seed", g.metadata.seed},
                         {"shape_trained", g.shape_encoder().trained},
                         {"shape_latent_mean", g.shape_encoder().latent_mean},
                         {"shape_latent_scale", g.shape_encoder().latent_scale}}},
                       {"tensors", tensors}};
  const std::string text = header.dump();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot write " + path);
  os.write(kMagic, 4);
  put_u32(os, kCheckpointVersion);
  put_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [_, t] : params) {
    put_u64(os, t.size());
    for (double v : t.values()) put_u64(os, std::bit_cast<std::uint64_t>(v));
  }
  if (!os) throw CheckpointError("write failed for " + path);
}

Generator load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("not a checkpoint: " + path);
  const auto version = static_cast<std::uint32_t>(get_uint(is, 4));
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  const std::uint64_t len = get_uint(is, 8);
  if (len > (1u << 26)) throw CheckpointError("corrupt header length");
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw CheckpointError("checkpoint truncated");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt header: ") + e.what());
  }
  if (header.value("version", "") != std::to_string(kCheckpointVersion)) throw CheckpointError("header version mismatch");
  ModelConfig cfg;
  try {
    cfg = config_from_json(header.at("config").dump());
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad config: ") + e.what());
  }
  const json& meta = header.at("metadata");
  Generator g(cfg, meta.at("seed").get<std::uint64_t>());
  g.metadata.shape_iterations = meta.at("shape_iterations");
  g.metadata.layout_iterations = meta.at("layout_iterations");
  g.shape_encoder().trained = meta.at("shape_trained");
  try {
    g.shape_encoder().latent_mean = meta.at("shape_latent_mean").get<std::vector<double>>();
    g.shape_encoder().latent_scale = meta.at("shape_latent_scale").get<double>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad shape latent statistics: ") + e.what());
  }
  if (!g.shape_encoder().latent_mean.empty() &&
      g.shape_encoder().latent_mean.size() != static_cast<std::size_t>(cfg.shape_latent))
    throw CheckpointError("shape latent statistics do not match the configuration");
  if (!(g.shape_encoder().latent_scale > 0)) throw CheckpointError("non-positive shape latent scale");
  auto params = all_params(g);
  const json& listed = header.at("tensors");
  if (listed.size() != params.size()) throw CheckpointError("tensor count does not match the configuration");
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& [name, t] = params[k];
    if (listed[k].at("name") != name || listed[k].at("shape").get<nn::Shape>() != t.shape())
      throw CheckpointError("tensor " + name + " does not match the configuration");
    if (get_uint(is, 8) != t.size()) throw CheckpointError("blob size mismatch for " + name);
    for (double& v : t.values()) v = std::bit_cast<double>(get_uint(is, 8));
  }
  if (is.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes in checkpoint");
  return g;
}

}  // namespace blockgen
