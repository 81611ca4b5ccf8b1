#include "blockgen/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace blockgen::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<RowMat>;
using CMapM = Eigen::Map<const RowMat>;

CMapM cmat(const std::vector<double>& v, int r, int c) { return CMapM(v.data(), r, c); }
MapM mat(std::vector<double>& v, int r, int c) { return MapM(v.data(), r, c); }

void need_rank(const Tensor& t, int r, const char* op) {
  if (!t.defined() || t.rank() != r)
    throw NnError(std::string(op) + ": expected rank " + std::to_string(r) + ", got " +
                  (t.defined() ? shape_string(t.shape()) : "undefined"));
}

void need_same(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw NnError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}

// Output node wired to its parents; history is only kept when some parent needs it.
Tensor make(Shape shape, std::vector<double> values, std::vector<Tensor> parents,
            std::function<void(TensorData&)> back) {
  auto d = std::make_shared<TensorData>();
  d->shape = std::move(shape);
  d->value = std::move(values);
  for (const auto& p : parents) d->requires_grad = d->requires_grad || p.requires_grad();
  if (d->requires_grad) {
    for (auto& p : parents) d->parents.push_back(p.ptr());
    d->backward = std::move(back);
  }
  return Tensor(d);
}

template <class F>
Tensor unary(const Tensor& a, F f, std::function<double(double x, double y)> dfdx) {
  std::vector<double> out(a.size());
  std::transform(a.values().begin(), a.values().end(), out.begin(), f);
  return make(a.shape(), std::move(out), {a}, [dfdx](TensorData& self) {
    TensorData& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (std::size_t i = 0; i < self.value.size(); ++i) p.grad[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
  });
}

void check_finite(const Tensor& t, const char* op) {
  for (double v : t.values())
    if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + ": non-finite input");
}

}  // namespace

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) {
    if (d < 0) throw NnError("negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out + "]";
}

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) {
  return from(shape, std::vector<double>(shape_size(shape), 0.0), requires_grad);
}

Tensor Tensor::from(const Shape& shape, std::vector<double> values, bool requires_grad) {
  if (shape_size(shape) != values.size())
    throw NnError("shape " + shape_string(shape) + " does not match " + std::to_string(values.size()) + " values");
  auto d = std::make_shared<TensorData>();
  d->shape = shape;
  d->value = std::move(values);
  d->requires_grad = requires_grad;
  if (requires_grad) d->ensure_grad();
  return Tensor(d);
}

double Tensor::item() const {
  if (size() != 1) throw NnError("item() on tensor of shape " + shape_string(shape()));
  return d_->value[0];
}

std::vector<double>& Tensor::grad() {
  d_->ensure_grad();
  return d_->grad;
}

void Tensor::zero_grad() { d_->grad.assign(d_->value.size(), 0.0); }

Tensor Tensor::detach() const { return from(shape(), values(), false); }

void backward(const Tensor& loss) {
  if (loss.size() != 1) throw NnError("backward needs a scalar loss");
  // iterative DFS post-order; a grey node reached again means a cycle
  std::vector<TensorData*> order;
  std::unordered_map<TensorData*, int> state;
  std::vector<std::pair<TensorData*, std::size_t>> stack{{loss.get(), 0}};
  state[loss.get()] = 1;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorData* p = node->parents[next++].get();
      if (!p->requires_grad) continue;
      const int s = state[p];
      if (s == 1) throw NnError("cycle in computation graph");
      if (s == 0) {
        state[p] = 1;
        stack.push_back({p, 0});
      }
    } else {
      state[node] = 2;
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (TensorData* n : order)
    if (n->backward) n->grad.assign(n->value.size(), 0.0);
  loss.get()->ensure_grad();
  loss.get()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward) (*it)->backward(**it);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  need_rank(a, 2, "matmul");
  need_rank(b, 2, "matmul");
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) throw NnError("matmul: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  std::vector<double> out(static_cast<std::size_t>(m) * n);
  mat(out, m, n).noalias() = cmat(a.values(), m, k) * cmat(b.values(), k, n);
  return make({m, n}, std::move(out), {a, b}, [m, k, n](TensorData& self) {
    TensorData& pa = *self.parents[0];
    TensorData& pb = *self.parents[1];
    const auto g = cmat(self.grad, m, n);
    if (pa.requires_grad) {
      pa.ensure_grad();
      mat(pa.grad, m, k).noalias() += g * cmat(pb.value, k, n).transpose();
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      mat(pb.grad, k, n).noalias() += cmat(pa.value, m, k).transpose() * g;
    }
  });
}

namespace {

Tensor binary(const Tensor& a, const Tensor& b, double sb, const char* name) {
  need_same(a, b, name);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + sb * b[i];
  return make(a.shape(), std::move(out), {a, b}, [sb](TensorData& self) {
    for (int k = 0; k < 2; ++k) {
      TensorData& p = *self.parents[k];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      const double f = k == 0 ? 1.0 : sb;
      for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += f * self.grad[i];
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary(a, b, 1.0, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(a, b, -1.0, "sub"); }

Tensor mul(const Tensor& a, const Tensor& b) {
  need_same(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return make(a.shape(), std::move(out), {a, b}, [](TensorData& self) {
    TensorData& pa = *self.parents[0];
    TensorData& pb = *self.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pb.grad[i] += self.grad[i] * pa.value[i];
    }
  });
}

Tensor add_row(const Tensor& a, const Tensor& b) {
  need_rank(a, 2, "add_row");
  const int m = a.dim(0), n = a.dim(1);
  if (b.size() != static_cast<std::size_t>(n))
    throw NnError("add_row: " + shape_string(a.shape()) + " + " + shape_string(b.shape()));
  std::vector<double> out(a.values());
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) out[r * n + c] += b[c];
  return make(a.shape(), std::move(out), {a, b}, [m, n](TensorData& self) {
    TensorData& pa = *self.parents[0];
    TensorData& pb = *self.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) pb.grad[c] += self.grad[r * n + c];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor elu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0 ? x : std::expm1(x); }, [](double x, double y) { return x > 0 ? 1.0 : y + 1.0; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  return unary(
      a, [slope](double x) { return x > 0 ? x : slope * x; }, [slope](double x, double) { return x > 0 ? 1.0 : slope; });
}

Tensor tanh(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor sum(const Tensor& a) {
  const double s = std::accumulate(a.values().begin(), a.values().end(), 0.0);
  return make({1}, {s}, {a}, [](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    for (double& g : p.grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw NnError("mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor reshape(const Tensor& a, const Shape& shape) {
  if (shape_size(shape) != a.size())
    throw NnError("reshape " + shape_string(a.shape()) + " -> " + shape_string(shape));
  return make(shape, a.values(), {a}, [](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += self.grad[i];
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw NnError("concat_cols: nothing to concatenate");
  const int m = parts[0].dim(0);
  std::vector<int> widths;
  int n = 0;
  for (const auto& p : parts) {
    need_rank(p, 2, "concat_cols");
    if (p.dim(0) != m) throw NnError("concat_cols: row count mismatch");
    widths.push_back(p.dim(1));
    n += p.dim(1);
  }
  std::vector<double> out(static_cast<std::size_t>(m) * n);
  for (int r = 0, off = 0; r < m; ++r, off = 0) {
    for (std::size_t k = 0; k < parts.size(); ++k) {
      std::copy_n(parts[k].values().begin() + r * widths[k], widths[k], out.begin() + r * n + off);
      off += widths[k];
    }
  }
  return make({m, n}, std::move(out), parts, [m, n, widths](TensorData& self) {
    int off = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      TensorData& p = *self.parents[k];
      if (p.requires_grad) {
        p.ensure_grad();
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < widths[k]; ++c) p.grad[r * widths[k] + c] += self.grad[r * n + off + c];
      }
      off += widths[k];
    }
  });
}

Tensor slice_cols(const Tensor& a, int begin, int end) {
  need_rank(a, 2, "slice_cols");
  const int m = a.dim(0), n = a.dim(1);
  if (begin < 0 || end > n || begin >= end) throw NnError("slice_cols: bad range");
  const int w = end - begin;
  std::vector<double> out(static_cast<std::size_t>(m) * w);
  for (int r = 0; r < m; ++r) std::copy_n(a.values().begin() + r * n + begin, w, out.begin() + r * w);
  return make({m, w}, std::move(out), {a}, [m, n, w, begin](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < w; ++c) p.grad[r * n + begin + c] += self.grad[r * w + c];
  });
}

Tensor mean_rows(const Tensor& a) {
  need_rank(a, 2, "mean_rows");
  const int m = a.dim(0), n = a.dim(1);
  if (m == 0) throw NnError("mean_rows: no rows");
  std::vector<double> out(n, 0.0);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) out[c] += a[r * n + c];
  for (double& v : out) v /= m;
  return make({1, n}, std::move(out), {a}, [m, n](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) p.grad[r * n + c] += self.grad[c] / m;
  });
}

Tensor repeat_rows(const Tensor& a, int m) {
  const int n = static_cast<int>(a.size());
  std::vector<double> out(static_cast<std::size_t>(m) * n);
  for (int r = 0; r < m; ++r) std::copy(a.values().begin(), a.values().end(), out.begin() + r * n);
  return make({m, n}, std::move(out), {a}, [m, n](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) p.grad[c] += self.grad[r * n + c];
  });
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& rows) {
  need_rank(a, 2, "gather_rows");
  const int m = a.dim(0), n = a.dim(1);
  std::vector<double> out;
  out.reserve(rows.size() * n);
  for (int r : rows) {
    if (r < 0 || r >= m) throw NnError("gather_rows: row out of range");
    out.insert(out.end(), a.values().begin() + r * n, a.values().begin() + (r + 1) * n);
  }
  return make({static_cast<int>(rows.size()), n}, std::move(out), {a}, [rows, n](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    for (std::size_t k = 0; k < rows.size(); ++k)
      for (int c = 0; c < n; ++c) p.grad[rows[k] * n + c] += self.grad[k * n + c];
  });
}

Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& b, int stride, int pad) {
  need_rank(x, 3, "conv2d");
  need_rank(k, 4, "conv2d");
  const int c = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int o = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  if (k.dim(1) != c) throw NnError("conv2d: kernel " + shape_string(k.shape()) + " on input " + shape_string(x.shape()));
  if (b.defined() && b.size() != static_cast<std::size_t>(o)) throw NnError("conv2d: bias size");
  if (stride < 1 || pad < 0) throw NnError("conv2d: bad stride or padding");
  const int ho = (H + 2 * pad - kh) / stride + 1, wo = (W + 2 * pad - kw) / stride + 1;
  if (ho < 1 || wo < 1) throw NnError("conv2d: kernel larger than padded input");
  const int rows = c * kh * kw, cols = ho * wo;

  // im2col: one column per output pixel
  auto patches = std::make_shared<std::vector<double>>(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int ci = 0; ci < c; ++ci)
    for (int i = 0; i < kh; ++i)
      for (int j = 0; j < kw; ++j) {
        double* dst = patches->data() + static_cast<std::size_t>((ci * kh + i) * kw + j) * cols;
        for (int y = 0; y < ho; ++y) {
          const int sy = y * stride - pad + i;
          if (sy < 0 || sy >= H) continue;
          for (int xo = 0; xo < wo; ++xo) {
            const int sx = xo * stride - pad + j;
            if (sx >= 0 && sx < W) dst[y * wo + xo] = x[(ci * H + sy) * W + sx];
          }
        }
      }
  std::vector<double> out(static_cast<std::size_t>(o) * cols);
  mat(out, o, cols).noalias() = cmat(k.values(), o, rows) * cmat(*patches, rows, cols);
  if (b.defined())
    for (int oc = 0; oc < o; ++oc)
      for (int p = 0; p < cols; ++p) out[oc * cols + p] += b[oc];

  std::vector<Tensor> parents{x, k};
  if (b.defined()) parents.push_back(b);
  return make({o, ho, wo}, std::move(out), parents,
              [=](TensorData& self) {
                TensorData& px = *self.parents[0];
                TensorData& pk = *self.parents[1];
                const auto g = cmat(self.grad, o, cols);
                if (pk.requires_grad) {
                  pk.ensure_grad();
                  mat(pk.grad, o, rows).noalias() += g * cmat(*patches, rows, cols).transpose();
                }
                if (self.parents.size() > 2 && self.parents[2]->requires_grad) {
                  TensorData& pb = *self.parents[2];
                  pb.ensure_grad();
                  for (int oc = 0; oc < o; ++oc) pb.grad[oc] += g.row(oc).sum();
                }
                if (px.requires_grad) {
                  px.ensure_grad();
                  RowMat dcols = cmat(pk.value, o, rows).transpose() * g;
                  for (int ci = 0; ci < c; ++ci)
                    for (int i = 0; i < kh; ++i)
                      for (int j = 0; j < kw; ++j) {
                        const double* src = dcols.data() + static_cast<std::size_t>((ci * kh + i) * kw + j) * cols;
                        for (int y = 0; y < ho; ++y) {
                          const int sy = y * stride - pad + i;
                          if (sy < 0 || sy >= H) continue;
                          for (int xo = 0; xo < wo; ++xo) {
                            const int sx = xo * stride - pad + j;
                            if (sx >= 0 && sx < W) px.grad[(ci * H + sy) * W + sx] += src[y * wo + xo];
                          }
                        }
                      }
                }
              });
}

Adjacency adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Adjacency adj(n);
  for (int i = 0; i < n; ++i) adj[i].push_back(i);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw NnError("edge endpoint out of range");
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return adj;
}

namespace {

struct Attention {
  std::vector<double> s_left, s_right;         // a_l . h_i, a_r . h_j
  std::vector<std::vector<double>> pre, alpha;  // per node, per neighbour
};

Attention attention(const Tensor& h, const Tensor& a, const Adjacency& adj, double slope) {
  need_rank(h, 2, "gat_attend");
  const int n = h.dim(0), d = h.dim(1);
  if (a.size() != static_cast<std::size_t>(2 * d))
    throw NnError("gat_attend: attention vector of size " + std::to_string(a.size()) + " for width " +
                  std::to_string(d));
  if (static_cast<int>(adj.size()) != n) throw NnError("gat_attend: adjacency has wrong node count");
  Attention at;
  at.s_left.assign(n, 0.0);
  at.s_right.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) {
      at.s_left[i] += a[c] * h[i * d + c];
      at.s_right[i] += a[d + c] * h[i * d + c];
    }
  at.pre.resize(n);
  at.alpha.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& nb = adj[i];
    if (nb.empty()) throw NnError("gat_attend: node without neighbours");
    auto& pre = at.pre[i];
    auto& al = at.alpha[i];
    pre.resize(nb.size());
    al.resize(nb.size());
    double mx = -1e300;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] < 0 || nb[k] >= n) throw NnError("gat_attend: neighbour out of range");
      pre[k] = at.s_left[i] + at.s_right[nb[k]];
      const double e = pre[k] > 0 ? pre[k] : slope * pre[k];
      al[k] = e;
      mx = std::max(mx, e);
    }
    double z = 0;
    for (double& v : al) z += (v = std::exp(v - mx));
    for (double& v : al) v /= z;
  }
  return at;
}

}  // namespace

std::vector<std::vector<double>> gat_attention_weights(const Tensor& h, const Tensor& a, const Adjacency& adj,
                                                       double slope) {
  return attention(h, a, adj, slope).alpha;
}

Tensor gat_attend(const Tensor& h, const Tensor& a, const Adjacency& adj, double slope) {
  auto at = std::make_shared<Attention>(attention(h, a, adj, slope));
  const int n = h.dim(0), d = h.dim(1);
  std::vector<double> out(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < adj[i].size(); ++k) {
      const double w = at->alpha[i][k];
      const int j = adj[i][k];
      for (int c = 0; c < d; ++c) out[i * d + c] += w * h[j * d + c];
    }
  return make({n, d}, std::move(out), {h, a}, [at, adj, n, d, slope](TensorData& self) {
    TensorData& ph = *self.parents[0];
    TensorData& pa = *self.parents[1];
    const auto& H = ph.value;
    const auto& G = self.grad;
    std::vector<double> dh(static_cast<std::size_t>(n) * d, 0.0), ds_left(n, 0.0), ds_right(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto& nb = adj[i];
      const auto& al = at->alpha[i];
      std::vector<double> dal(nb.size(), 0.0);
      double dot = 0;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const int j = nb[k];
        for (int c = 0; c < d; ++c) {
          dh[j * d + c] += al[k] * G[i * d + c];
          dal[k] += G[i * d + c] * H[j * d + c];
        }
        dot += al[k] * dal[k];
      }
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const double de = al[k] * (dal[k] - dot);
        const double dpre = de * (at->pre[i][k] > 0 ? 1.0 : slope);
        ds_left[i] += dpre;
        ds_right[nb[k]] += dpre;
      }
    }
    const auto& A = pa.value;
    if (ph.requires_grad) {
      ph.ensure_grad();
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) ph.grad[i * d + c] += dh[i * d + c] + ds_left[i] * A[c] + ds_right[i] * A[d + c];
    }
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) {
          pa.grad[c] += ds_left[i] * H[i * d + c];
          pa.grad[d + c] += ds_right[i] * H[i * d + c];
        }
    }
  });
}

Tensor std_from_logvar(const Tensor& logvar, double floor) {
  return unary(
      logvar, [floor](double x) { return x <= floor ? 0.0 : std::exp(0.5 * x); },
      [floor](double x, double y) { return x <= floor ? 0.0 : 0.5 * y; });
}

Tensor l2(const Tensor& pred, const Tensor& target) {
  need_same(pred, target, "l2");
  check_finite(pred, "l2");
  check_finite(target, "l2");
  if (pred.size() == 0) return Tensor::scalar(0.0);
  const Tensor diff = sub(pred, target);
  return mean(mul(diff, diff));
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  need_rank(logits, 2, "cross_entropy");
  check_finite(logits, "cross_entropy");
  const int m = logits.dim(0), c = logits.dim(1);
  if (static_cast<int>(labels.size()) != m) throw NnError("cross_entropy: label count mismatch");
  if (m == 0) return Tensor::scalar(0.0);
  auto prob = std::make_shared<std::vector<double>>(static_cast<std::size_t>(m) * c);
  double loss = 0;
  for (int r = 0; r < m; ++r) {
    if (labels[r] < 0 || labels[r] >= c) throw NnError("cross_entropy: label out of range");
    const double* row = logits.values().data() + r * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0;
    for (int k = 0; k < c; ++k) z += ((*prob)[r * c + k] = std::exp(row[k] - mx));
    for (int k = 0; k < c; ++k) (*prob)[r * c + k] /= z;
    loss += -(row[labels[r]] - mx - std::log(z));
  }
  return make({1}, {loss / m}, {logits}, [prob, labels, m, c](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    const double g = self.grad[0] / m;
    for (int r = 0; r < m; ++r)
      for (int k = 0; k < c; ++k) p.grad[r * c + k] += g * ((*prob)[r * c + k] - (k == labels[r] ? 1.0 : 0.0));
  });
}

Tensor kl_standard_normal(const Tensor& mu, const Tensor& logvar) {
  need_same(mu, logvar, "kl_standard_normal");
  check_finite(mu, "kl_standard_normal");
  check_finite(logvar, "kl_standard_normal");
  double kl = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) kl += -0.5 * (1.0 + logvar[i] - mu[i] * mu[i] - std::exp(logvar[i]));
  return make({1}, {kl}, {mu, logvar}, [](TensorData& self) {
    TensorData& pm = *self.parents[0];
    TensorData& pl = *self.parents[1];
    const double g = self.grad[0];
    if (pm.requires_grad) {
      pm.ensure_grad();
      for (std::size_t i = 0; i < pm.value.size(); ++i) pm.grad[i] += g * pm.value[i];
    }
    if (pl.requires_grad) {
      pl.ensure_grad();
      for (std::size_t i = 0; i < pl.value.size(); ++i) pl.grad[i] += g * 0.5 * (std::exp(pl.value[i]) - 1.0);
    }
  });
}

Tensor bce_with_logits(const Tensor& logits, const std::vector<double>& targets) {
  if (logits.size() != targets.size()) throw NnError("bce_with_logits: size mismatch");
  check_finite(logits, "bce_with_logits");
  const std::size_t n = logits.size();
  if (n == 0) return Tensor::scalar(0.0);
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = logits[i];
    loss += std::max(x, 0.0) - x * targets[i] + std::log1p(std::exp(-std::abs(x)));
  }
  return make({1}, {loss / n}, {logits}, [targets, n](TensorData& self) {
    TensorData& p = *self.parents[0];
    p.ensure_grad();
    const double g = self.grad[0] / n;
    for (std::size_t i = 0; i < n; ++i) p.grad[i] += g * (1.0 / (1.0 + std::exp(-p.value[i])) - targets[i]);
  });
}

}  // namespace blockgen::nn
