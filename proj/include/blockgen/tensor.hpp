#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockgen::nn {

class NnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the losses when an input holds NaN or infinity.
class NonFiniteError : public NnError {
 public:
  using NnError::NnError;
};

using Shape = std::vector<int>;

struct TensorData {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first needed
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorData>> parents;
  // Pushes this node's grad into its parents' grads.
  std::function<void(TensorData&)> backward;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

// Reference-counted handle to a node of the recorded computation graph.
// Copies share storage.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorData> d) : d_(std::move(d)) {}

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor from(const Shape& shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false) { return from({1}, {v}, requires_grad); }

  bool defined() const { return static_cast<bool>(d_); }
  const Shape& shape() const { return d_->shape; }
  int dim(int i) const { return d_->shape.at(i); }
  int rank() const { return static_cast<int>(d_->shape.size()); }
  std::size_t size() const { return d_->value.size(); }
  std::vector<double>& values() { return d_->value; }
  const std::vector<double>& values() const { return d_->value; }
  double operator[](std::size_t i) const { return d_->value[i]; }
  double item() const;
  // Gradient buffer, zero-filled on first access.
  std::vector<double>& grad();
  bool requires_grad() const { return d_->requires_grad; }
  void zero_grad();
  // Same values, no history, no gradient.
  Tensor detach() const;

  TensorData* get() const { return d_.get(); }
  const std::shared_ptr<TensorData>& ptr() const { return d_; }

 private:
  std::shared_ptr<TensorData> d_;
};

std::size_t shape_size(const Shape& s);
std::string shape_string(const Shape& s);

// Reverse pass from a scalar loss. Leaf gradients accumulate; interior
// gradients are reset at the start of each call.
void backward(const Tensor& loss);

// ---- ops (2-D tensors are row-major [rows x cols]) ----

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// a[m x n] + b[1 x n] on every row.
Tensor add_row(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

Tensor elu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor reshape(const Tensor& a, const Shape& shape);
// Concatenate 2-D tensors with equal row counts along columns.
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, int begin, int end);
// [m x n] -> [1 x n]
Tensor mean_rows(const Tensor& a);
// [1 x n] -> [m x n]
Tensor repeat_rows(const Tensor& a, int m);
Tensor gather_rows(const Tensor& a, const std::vector<int>& rows);

// Cross-correlation. x: [c x H x W], k: [o x c x kh x kw], b: [o] or undefined.
Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& b, int stride, int pad);

// Neighbourhood lists per node, each including the node itself.
using Adjacency = std::vector<std::vector<int>>;
Adjacency adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

// Single-head graph attention aggregation on projected features h [N x d]
// with attention vector a [2d]: out_i = sum_j alpha_ij h_j over j in nbrs(i),
// alpha_i = softmax_j leaky(a_l . h_i + a_r . h_j).
Tensor gat_attend(const Tensor& h, const Tensor& a, const Adjacency& adj, double slope);
// The alpha_ij above, listed per node in adjacency order.
std::vector<std::vector<double>> gat_attention_weights(const Tensor& h, const Tensor& a, const Adjacency& adj,
                                                       double slope);

// exp(logvar / 2), with exactly zero (and zero gradient) where logvar <= floor.
Tensor std_from_logvar(const Tensor& logvar, double floor = -20.0);

// ---- losses (scalar results) ----

// Mean squared error.
Tensor l2(const Tensor& pred, const Tensor& target);
// Mean over rows of -log softmax(logits)[label]. logits: [N x C].
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels);
// -1/2 sum(1 + logvar - mu^2 - exp(logvar)).
Tensor kl_standard_normal(const Tensor& mu, const Tensor& logvar);
// Mean binary cross-entropy of sigmoid(logits) against 0/1 targets.
Tensor bce_with_logits(const Tensor& logits, const std::vector<double>& targets);

}  // namespace blockgen::nn
