#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blockgen/random.hpp"
#include "blockgen/tensor.hpp"

namespace blockgen::nn {

// Named trainable tensors in declaration order (the checkpoint order).
class ParameterSet {
 public:
  Tensor add(std::string name, Tensor t);
  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::vector<Tensor> tensors() const;
  std::size_t count() const;  // total scalar count
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

// Glorot-scaled normal initialisation.
Tensor init_weight(const Shape& shape, int fan_in, int fan_out, Rng& rng);

struct Dense {
  Tensor W;  // [in x out]
  Tensor b;  // [1 x out]

  Dense() = default;
  Dense(int in, int out, Rng& rng, ParameterSet& params, const std::string& name);
  // x: [m x in] -> [m x out]
  Tensor operator()(const Tensor& x) const { return add_row(matmul(x, W), b); }
  int in() const { return W.dim(0); }
  int out() const { return W.dim(1); }
};

struct Conv2d {
  Tensor K;  // [out x in x k x k]
  Tensor b;  // [out]
  int stride = 2;
  int pad = 1;

  Conv2d() = default;
  Conv2d(int in, int out, int kernel, int stride, int pad, Rng& rng, ParameterSet& params, const std::string& name);
  Tensor operator()(const Tensor& x) const { return conv2d(x, K, b, stride, pad); }
};

struct GatLayerWeights {
  Tensor W;  // [in x out]
  Tensor a;  // [2 out]
  double slope = 0.2;
};

GatLayerWeights make_gat_weights(int in, int out, Rng& rng, ParameterSet& params, const std::string& name);

// Projection by W followed by single-head attention aggregation over adj.
Tensor gat_layer(const Tensor& features, const Adjacency& adj, const GatLayerWeights& w);

struct AdamOptions {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options = {});
  // One bias-corrected update from the current gradients.
  void step();
  void zero_grad();
  long steps() const { return t_; }
  const AdamOptions& options() const { return opt_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  AdamOptions opt_;
  long t_ = 0;
};

}  // namespace blockgen::nn
