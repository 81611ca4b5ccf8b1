#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "blockgen/canonical.hpp"
#include "blockgen/nn.hpp"

namespace blockgen {

struct ModelConfig {
  GridSpec grid;
  int gat_layers = 3;      // T
  int hidden = 128;        // GAT and MLP width
  int latent = 512;        // z
  int shape_latent = 64;   // m'
  int decoder_seed = 32;   // per-node width of the decoder's initial feature matrix
  int pos_code = 16;       // per-slot positional code in the decoder
  std::array<int, 4> conv_channels{8, 16, 32, 32};
  int mask_hidden = 256;   // mask decoder width
  double w_geometry = 4.0;
  double w_categorical = 1.0;
  double w_kl = 0.5;
  double lr = 0.001;
  int batch = 32;
  double logvar_floor = -20.0;

  bool operator==(const ModelConfig&) const = default;
};

std::string config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const std::string& s);

struct ShapeLatent {
  std::vector<double> m;
};

struct LayoutLatent {
  std::vector<double> z, mu, logvar;
};

// Fixed code per grid slot: row cosines then column sines and cosines.
std::vector<double> positional_code(const GridSpec& grid, int width);

// 2 x 64 x 64 input: the mask and the block scale / 1000 broadcast.
nn::Tensor shape_input(const BlockShapeFeature& f);

class ShapeEncoder {
 public:
  ShapeEncoder(const ModelConfig& config, std::uint64_t seed);

  nn::Tensor encode(const nn::Tensor& input) const;  // [1 x shape_latent], raw bottleneck
  nn::Tensor decode(const nn::Tensor& m) const;      // [1 x 4096] mask logits
  // Standardized m': (raw - latent_mean) / latent_scale.
  ShapeLatent encode(const BlockShapeFeature& f) const;
  // Reconstructed mask bits, row-major 64 x 64.
  std::vector<std::uint8_t> reconstruct(const BlockShapeFeature& f) const;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  bool trained = false;
  // Set after training from the training shapes; identity before.
  std::vector<double> latent_mean;
  double latent_scale = 1.0;

 private:
  nn::ParameterSet params_;
  std::array<nn::Conv2d, 4> conv_;
  nn::Dense to_latent_, dec_hidden_, dec_out_;
};

struct DecoderOutput {
  nn::Tensor e_logits;  // [N x 2]
  nn::Tensor position;  // [N x 2]  x', y'
  nn::Tensor size;      // [N x 2]  w', h'
  nn::Tensor s_logits;  // [N x 4]
  nn::Tensor occupancy; // [N x 1]
};

struct Posterior {
  nn::Tensor mu, logvar;  // [1 x latent]
};

struct LossBreakdown {
  double total = 0.0;
  double geometry = 0.0;     // L2 on x', y', w', h' over existing nodes
  double categorical = 0.0;  // ce_e + ce_s + l2_a
  double kl = 0.0;           // per latent dimension
  double ce_e = 0.0, ce_s = 0.0, l2_a = 0.0;
  double w_geometry = 0.0, w_categorical = 0.0, w_kl = 0.0;
  bool finite = true;
};

struct TrainingSample {
  CanonicalGraph graph;
  ShapeLatent shape;
};

class LayoutVae {
 public:
  LayoutVae(const ModelConfig& config, std::uint64_t seed);

  Posterior encode(const CanonicalGraph& cg, const nn::Tensor& m) const;
  DecoderOutput decode(const nn::Tensor& z, const nn::Tensor& m) const;
  // z = mu + sigma * eps, with eps drawn from rng.
  nn::Tensor reparameterize(const Posterior& q, Rng& rng) const;
  // Weighted loss tensor for one sample; components are written to `parts`.
  nn::Tensor loss(const TrainingSample& s, Rng& rng, LossBreakdown& parts) const;
  nn::Tensor loss(const CanonicalGraph& cg, const nn::Tensor& m, Rng& rng, LossBreakdown& parts) const;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const nn::Adjacency& adjacency() const { return adj_; }

 private:
  ModelConfig cfg_;
  nn::ParameterSet params_;
  nn::Adjacency adj_;
  nn::Tensor pos_;
  nn::Tensor anchor_;  // [N x 2] nominal (x', y') of each slot: column / (C - 1), 0
  std::vector<nn::GatLayerWeights> enc_gat_, dec_gat_;
  nn::Dense enc_hidden_, enc_mu_, enc_logvar_, dec_seed_;
  std::array<nn::Dense, 5> head_hidden_, head_out_;
};

// Argmax existence and shape; sizes floored at 1e-3, occupancy clamped to [0.05, 1].
CanonicalGraph to_canonical_graph(const DecoderOutput& out, const GridSpec& grid);

struct TrainingMetadata {
  long shape_iterations = 0;
  long layout_iterations = 0;
  std::uint64_t seed = 0;
};

class Generator {
 public:
  explicit Generator(const ModelConfig& config = {}, std::uint64_t seed = 0);

  const ModelConfig& config() const { return cfg_; }
  ShapeEncoder& shape_encoder() { return shape_; }
  const ShapeEncoder& shape_encoder() const { return shape_; }
  LayoutVae& vae() { return vae_; }
  const LayoutVae& vae() const { return vae_; }
  TrainingMetadata metadata;

  ShapeLatent encode_shape(const BlockShapeFeature& f) const;
  LayoutLatent encode_layout(const CanonicalGraph& cg, const ShapeLatent& m) const;
  CanonicalGraph decode_layout(const std::vector<double>& z, const ShapeLatent& m) const;
  // Posterior mean through the decoder.
  CanonicalGraph reconstruct(const CanonicalGraph& cg, const ShapeLatent& m) const;
  // z drawn from the standard normal prior.
  std::vector<double> sample_prior(Rng& rng) const;

 private:
  ModelConfig cfg_;
  ShapeEncoder shape_;
  LayoutVae vae_;
};

// ---- training ----

struct ShapeTrainOptions {
  int epochs = 300;
  int batch = 8;
  double lr = 0.001;
  std::uint64_t seed = 0;
  double target_iou = 1.1;  // stop early once mean reconstruction IoU reaches it
  int check_every = 10;     // epochs between IoU checks
};

struct ShapeTrainReport {
  int epochs = 0;
  double loss = 0.0;
  double mean_iou = 0.0;
};

double mask_iou(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

ShapeTrainReport train_shape_encoder(Generator& g, const std::vector<BlockShapeFeature>& shapes,
                                     const ShapeTrainOptions& options = {});

// One optimizer step over a batch; the step is skipped when the loss is not finite.
LossBreakdown training_step(const LayoutVae& vae, nn::Adam& opt, const std::vector<TrainingSample>& batch, Rng& rng);

struct LayoutTrainOptions {
  int steps = 2000;
  int batch = 32;
  std::uint64_t seed = 0;
  int check_every = 100;
  // Called every check_every steps with the step count; returning true stops training.
  std::function<bool(int)> stop;
};

std::vector<LossBreakdown> train_layout_vae(Generator& g, const std::vector<TrainingSample>& samples,
                                            const LayoutTrainOptions& options = {});

// ---- checkpoint ----

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const Generator& g, const std::string& path);
Generator load_checkpoint(const std::string& path);

}  // namespace blockgen
