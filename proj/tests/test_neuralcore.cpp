#include <cmath>
#include <numeric>

#include "blockgen/graphrep.hpp"
#include "blockgen/nn.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace blockgen;
using namespace blockgen::nn;
using blockgen::testing::grad_check;

namespace {

Tensor random_tensor(const Shape& s, Rng& rng, double sd = 1.0) {
  std::vector<double> v(shape_size(s));
  for (double& x : v) x = sd * rng.normal();
  return Tensor::from(s, std::move(v), true);
}

// Fixed random projection to a scalar so every output entry gets a distinct weight.
Tensor probe(const Tensor& y, std::uint64_t seed = 99) {
  Rng rng(seed);
  std::vector<double> w(y.size());
  for (double& x : w) x = rng.uniform(-1, 1);
  return sum(mul(reshape(y, {static_cast<int>(y.size())}), Tensor::from({static_cast<int>(w.size())}, w)));
}

}  // namespace

TEST_CASE("backward basics") {
  Tensor x = Tensor::from({3}, {1, 2, 3}, true);
  backward(sum(mul(x, x)));
  CHECK(x.values() == std::vector<double>{1, 2, 3});
  CHECK(x.grad() == std::vector<double>{2, 4, 6});

  Tensor y = Tensor::from({2}, {4, 5}, true);
  backward(add(sum(Tensor::from({2}, {1, 1})), scale(sum(y), 0.0)));
  CHECK(y.grad() == std::vector<double>{0, 0});

  Tensor z = Tensor::from({1}, {2}, true);
  Tensor loss = mul(z, z);
  backward(loss);
  backward(loss);
  CHECK(z.grad()[0] == doctest::Approx(8));  // leaves accumulate
  z.zero_grad();
  CHECK(z.grad()[0] == 0.0);

  CHECK_THROWS_AS(backward(Tensor::from({2}, {1, 2}, true)), NnError);
}

TEST_CASE("backward rejects a cyclic tape") {
  Tensor a = Tensor::from({1}, {1}, true);
  Tensor b = scale(a, 2.0);
  Tensor c = scale(b, 3.0);
  b.get()->parents.push_back(c.ptr());  // forge a cycle
  CHECK_THROWS_AS(backward(c), NnError);
  b.get()->parents.pop_back();
}

TEST_CASE("finite-difference checks for every op") {
  Rng rng(11);
  const Tensor A = random_tensor({3, 4}, rng), B = random_tensor({4, 5}, rng), C = random_tensor({3, 4}, rng);
  const Tensor r = random_tensor({1, 4}, rng);
  auto near = [](double e) { return e <= 1e-4; };

  CHECK(near(grad_check([&] { return probe(matmul(A, B)); }, {A, B})));
  CHECK(near(grad_check([&] { return probe(add(A, C)); }, {A, C})));
  CHECK(near(grad_check([&] { return probe(sub(A, C)); }, {A, C})));
  CHECK(near(grad_check([&] { return probe(mul(A, C)); }, {A, C})));
  CHECK(near(grad_check([&] { return probe(add_row(A, r)); }, {A, r})));
  CHECK(near(grad_check([&] { return probe(scale(A, -1.7)); }, {A})));
  CHECK(near(grad_check([&] { return probe(elu(A)); }, {A})));
  CHECK(near(grad_check([&] { return probe(leaky_relu(A, 0.2)); }, {A})));
  CHECK(near(grad_check([&] { return probe(tanh(A)); }, {A})));
  CHECK(near(grad_check([&] { return probe(sigmoid(A)); }, {A})));
  CHECK(near(grad_check([&] { return probe(exp(A)); }, {A})));
  CHECK(near(grad_check([&] { return mean(mul(A, A)); }, {A})));
  CHECK(near(grad_check([&] { return probe(reshape(A, {2, 6})); }, {A})));
  CHECK(near(grad_check([&] { return probe(concat_cols({A, C, A})); }, {A, C})));
  CHECK(near(grad_check([&] { return probe(slice_cols(A, 1, 3)); }, {A})));
  CHECK(near(grad_check([&] { return probe(mean_rows(A)); }, {A})));
  CHECK(near(grad_check([&] { return probe(repeat_rows(r, 5)); }, {r})));
  CHECK(near(grad_check([&] { return probe(gather_rows(A, {2, 0, 2})); }, {A})));
  CHECK(near(grad_check([&] { return probe(std_from_logvar(A)); }, {A})));

  const Tensor T = random_tensor({3, 4}, rng);
  CHECK(near(grad_check([&] { return l2(A, T); }, {A, T})));
  CHECK(near(grad_check([&] { return cross_entropy(A, {3, 0, 1}); }, {A})));
  CHECK(near(grad_check([&] { return kl_standard_normal(A, C); }, {A, C})));
  std::vector<double> bits(12);
  for (auto& b : bits) b = rng.uniform() < 0.5 ? 0.0 : 1.0;
  CHECK(near(grad_check([&] { return bce_with_logits(A, bits); }, {A})));
}

TEST_CASE("conv2d") {
  SUBCASE("identity 1x1 kernel") {
    Rng rng(2);
    const Tensor x = random_tensor({1, 5, 5}, rng);
    const Tensor y = conv2d(x, Tensor::from({1, 1, 1, 1}, {1.0}), Tensor(), 1, 0);
    CHECK(y.shape() == Shape{1, 5, 5});
    CHECK(y.values() == x.values());
  }
  SUBCASE("all-ones 2x2 kernel, stride 2") {
    const Tensor x = Tensor::from({1, 64, 64}, std::vector<double>(64 * 64, 1.0));
    const Tensor y = conv2d(x, Tensor::from({1, 1, 2, 2}, {1, 1, 1, 1}), Tensor(), 2, 0);
    CHECK(y.shape() == Shape{1, 32, 32});
    for (double v : y.values()) CHECK(v == 4.0);
  }
  SUBCASE("matches a direct loop") {
    Rng rng(3);
    const Tensor x = random_tensor({2, 7, 6}, rng), k = random_tensor({3, 2, 3, 3}, rng), b = random_tensor({3}, rng);
    const Tensor y = conv2d(x, k, b, 2, 1);
    REQUIRE(y.shape() == Shape{3, 4, 3});
    for (int o = 0; o < 3; ++o)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = b[o];
          for (int c = 0; c < 2; ++c)
            for (int u = 0; u < 3; ++u)
              for (int v = 0; v < 3; ++v) {
                const int yy = 2 * i - 1 + u, xx = 2 * j - 1 + v;
                if (yy >= 0 && yy < 7 && xx >= 0 && xx < 6) s += k[((o * 2 + c) * 3 + u) * 3 + v] * x[(c * 7 + yy) * 6 + xx];
              }
          CHECK(y[(o * 4 + i) * 3 + j] == doctest::Approx(s).epsilon(1e-12));
        }
    CHECK(grad_check([&] { return probe(conv2d(x, k, b, 2, 1)); }, {x, k, b}) <= 1e-4);
  }
  SUBCASE("gradient at the model's layer shape") {
    Rng rng(4);
    const Tensor x = random_tensor({2, 16, 16}, rng), k = random_tensor({4, 2, 4, 4}, rng, 0.3),
                 b = random_tensor({4}, rng);
    CHECK(grad_check([&] { return probe(conv2d(x, k, b, 2, 1)); }, {x, k, b}) <= 1e-4);
  }
  CHECK_THROWS_AS(conv2d(Tensor::zeros({2, 8, 8}), Tensor::zeros({1, 3, 2, 2}), Tensor(), 2, 0), NnError);
  CHECK_THROWS_AS(conv2d(Tensor::zeros({8, 8}), Tensor::zeros({1, 1, 2, 2}), Tensor(), 2, 0), NnError);
}

TEST_CASE("gat_layer") {
  Rng rng(5);
  ParameterSet ps;
  const GatLayerWeights w = make_gat_weights(3, 4, rng, ps, "g");
  CHECK(w.slope == 0.2);
  CHECK(ps.count() == 3 * 4 + 8);

  SUBCASE("identical node features give uniform attention and identical outputs") {
    const GridSpec grid{2, 5};
    const Adjacency adj = adjacency_from_edges(grid.size(), grid_edges(grid));
    std::vector<double> f;
    for (int i = 0; i < grid.size(); ++i) f.insert(f.end(), {0.3, -1.2, 0.7});
    const Tensor F = Tensor::from({grid.size(), 3}, f);
    const auto alpha = gat_attention_weights(matmul(F, w.W), w.a, adj, w.slope);
    for (const auto& row : alpha)
      for (double v : row) CHECK(v == doctest::Approx(1.0 / row.size()).epsilon(1e-12));
    const Tensor out = gat_layer(F, adj, w);
    for (int i = 1; i < grid.size(); ++i)
      for (int c = 0; c < 4; ++c) CHECK(out[i * 4 + c] == doctest::Approx(out[c]).epsilon(1e-12));
  }
  SUBCASE("two-node path graph in closed form") {
    const Adjacency adj = adjacency_from_edges(2, {{0, 1}});
    const Tensor F = random_tensor({2, 3}, rng);
    const Tensor h = matmul(F, w.W);
    const Tensor out = gat_layer(F, adj, w);
    for (int i = 0; i < 2; ++i) {
      double e[2];
      for (int j = 0; j < 2; ++j) {
        double s = 0;
        for (int c = 0; c < 4; ++c) s += w.a[c] * h[i * 4 + c] + w.a[4 + c] * h[j * 4 + c];
        e[j] = s > 0 ? s : 0.2 * s;
      }
      const double a0 = 1.0 / (1.0 + std::exp(e[1] - e[0]));
      for (int c = 0; c < 4; ++c) CHECK(out[i * 4 + c] == doctest::Approx(a0 * h[c] + (1 - a0) * h[4 + c]).epsilon(1e-12));
    }
  }
  SUBCASE("attention sums to one on the full grid") {
    const GridSpec grid;
    const Adjacency adj = adjacency_from_edges(grid.size(), grid_edges(grid));
    for (const auto& nb : adj) CHECK((nb.size() >= 3 && nb.size() <= 5));
    const Tensor F = random_tensor({grid.size(), 3}, rng, 3.0);
    for (const auto& row : gat_attention_weights(matmul(F, w.W), w.a, adj, w.slope))
      CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
  }
  SUBCASE("gradients with respect to the weights and the features") {
    const GridSpec grid{2, 4};
    const Adjacency adj = adjacency_from_edges(grid.size(), grid_edges(grid));
    const Tensor F = random_tensor({grid.size(), 3}, rng);
    CHECK(grad_check([&] { return probe(gat_layer(F, adj, w)); }, {w.W, w.a, F}) <= 1e-4);
  }
  CHECK_THROWS_AS(gat_layer(Tensor::zeros({4, 5}), adjacency_from_edges(4, {}), w), NnError);
  CHECK_THROWS_AS(gat_layer(Tensor::zeros({4, 3}), adjacency_from_edges(3, {}), w), NnError);
}

TEST_CASE("losses") {
  const Tensor x = Tensor::from({2, 2}, {0.5, -1, 2, 3});
  CHECK(l2(x, x).item() == 0.0);
  CHECK(l2(x, Tensor::zeros({2, 2})).item() == doctest::Approx((0.25 + 1 + 4 + 9) / 4));
  const Tensor u = Tensor::from({3, 4}, std::vector<double>(12, 0.7));
  CHECK(cross_entropy(u, {0, 2, 3}).item() == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(kl_standard_normal(Tensor::zeros({1, 8}), Tensor::zeros({1, 8})).item() == 0.0);
  CHECK(kl_standard_normal(Tensor::from({1, 1}, {1.0}), Tensor::zeros({1, 1})).item() == doctest::Approx(0.5));
  CHECK(kl_standard_normal(Tensor::from({1, 1}, {0.3}), Tensor::from({1, 1}, {-0.4})).item() > 0);
  CHECK(bce_with_logits(Tensor::from({2}, {0, 0}), {0, 1}).item() == doctest::Approx(std::log(2.0)));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(l2(Tensor::from({1}, {inf}), Tensor::from({1}, {0})), NnError);
  CHECK_THROWS_AS(cross_entropy(Tensor::from({1, 2}, {std::nan(""), 0}), {0}), NnError);
  CHECK_THROWS_AS(cross_entropy(u, {0, 4, 1}), NnError);
}

TEST_CASE("std_from_logvar floor") {
  const Tensor lv = Tensor::from({3}, {-25, -20, 0}, true);
  const Tensor s = std_from_logvar(lv);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 1.0);
}

TEST_CASE("adam") {
  SUBCASE("one step on x^2 from 1 descends") {
    Tensor x = Tensor::from({1}, {1.0}, true);
    Adam opt({x});
    backward(mul(x, x));
    opt.step();
    CHECK(x[0] < 1.0);
    CHECK(x[0] == doctest::Approx(1.0 - 0.001).epsilon(1e-9));
  }
  SUBCASE("zero gradient leaves parameters unchanged") {
    Tensor x = Tensor::from({3}, {1, -2, 3}, true);
    Adam opt({x});
    opt.zero_grad();
    opt.step();
    CHECK(x.values() == std::vector<double>{1, -2, 3});
  }
  SUBCASE("converges on a quadratic within 500 steps") {
    Tensor x = Tensor::from({1}, {0.3}, true);
    Adam opt({x}, AdamOptions{0.01});
    int steps = 0;
    for (; steps < 500 && std::abs(x[0]) >= 1e-2; ++steps) {
      opt.zero_grad();
      backward(mul(x, x));
      opt.step();
    }
    CHECK(std::abs(x[0]) < 1e-2);
    CHECK(steps <= 500);
  }
}

TEST_CASE("forward passes are bitwise deterministic") {
  auto run = [] {
    Rng rng(21);
    ParameterSet ps;
    const Dense d(6, 5, rng, ps, "d");
    const GatLayerWeights g = make_gat_weights(5, 4, rng, ps, "g");
    const GridSpec grid{2, 6};
    const Adjacency adj = adjacency_from_edges(grid.size(), grid_edges(grid));
    return gat_layer(elu(d(random_tensor({grid.size(), 6}, rng))), adj, g).values();
  };
  CHECK(run() == run());
}

TEST_CASE("parameter sets") {
  Rng rng(1);
  ParameterSet ps;
  const Dense d(3, 2, rng, ps, "dense");
  CHECK(ps.items().size() == 2);
  CHECK(ps.items()[0].first == "dense.W");
  CHECK(ps.count() == 8);
  CHECK_THROWS_AS(ps.add("dense.W", Tensor::zeros({1})), NnError);
  const Tensor y = d(Tensor::from({1, 3}, {1, 2, 3}));
  CHECK(y.shape() == Shape{1, 2});
}
