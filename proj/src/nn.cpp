#include "blockgen/nn.hpp"

#include <cmath>

namespace blockgen::nn {

Tensor ParameterSet::add(std::string name, Tensor t) {
  for (const auto& [n, _] : items_)
    if (n == name) throw NnError("duplicate parameter name " + name);
  items_.emplace_back(std::move(name), t);
  return t;
}

std::vector<Tensor> ParameterSet::tensors() const {
  std::vector<Tensor> out;
  for (const auto& [_, t] : items_) out.push_back(t);
  return out;
}

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : items_) n += t.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& [_, t] : items_) t.zero_grad();
}

Tensor init_weight(const Shape& shape, int fan_in, int fan_out, Rng& rng) {
  const double sd = std::sqrt(2.0 / (fan_in + fan_out));
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = sd * rng.normal();
  return Tensor::from(shape, std::move(v), true);
}

Dense::Dense(int in, int out, Rng& rng, ParameterSet& params, const std::string& name)
    : W(params.add(name + ".W", init_weight({in, out}, in, out, rng))),
      b(params.add(name + ".b", Tensor::zeros({1, out}, true))) {}

Conv2d::Conv2d(int in, int out, int kernel, int stride_, int pad_, Rng& rng, ParameterSet& params,
               const std::string& name)
    : K(params.add(name + ".K", init_weight({out, in, kernel, kernel}, in * kernel * kernel,
                                            out * kernel * kernel, rng))),
      b(params.add(name + ".b", Tensor::zeros({out}, true))),
      stride(stride_),
      pad(pad_) {}

GatLayerWeights make_gat_weights(int in, int out, Rng& rng, ParameterSet& params, const std::string& name) {
  GatLayerWeights w;
  w.W = params.add(name + ".W", init_weight({in, out}, in, out, rng));
  w.a = params.add(name + ".a", init_weight({2 * out}, 2 * out, 1, rng));
  return w;
}

Tensor gat_layer(const Tensor& features, const Adjacency& adj, const GatLayerWeights& w) {
  if (features.rank() != 2 || features.dim(1) != w.W.dim(0))
    throw NnError("gat_layer: features " + shape_string(features.shape()) + " for weights " +
                  shape_string(w.W.shape()));
  return gat_attend(matmul(features, w.W), w.a, adj, w.slope);
}

Adam::Adam(std::vector<Tensor> params, AdamOptions options) : params_(std::move(params)), opt_(options) {
  for (const auto& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& val = params_[k].values();
    const auto& g = params_[k].grad();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < val.size(); ++i) {
      m[i] = opt_.beta1 * m[i] + (1.0 - opt_.beta1) * g[i];
      v[i] = opt_.beta2 * v[i] + (1.0 - opt_.beta2) * g[i] * g[i];
      val[i] -= opt_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + opt_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace blockgen::nn
