#include "blockgen/latentops.hpp"

#include <algorithm>
#include <numeric>

#include "blockgen/random.hpp"

namespace blockgen {

namespace {

void check_same_size(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw LatentError("latent dimensions differ");
}

}  // namespace

SparsePriorResult sparse_prior_latent(Point2 target, const std::vector<LatentPrior>& priors,
                                      const SparsePriorOptions& options, std::uint64_t seed) {
  if (priors.empty()) throw LatentError("sparse prior needs at least one known block");
  if (options.k < 1) throw LatentError("k must be positive");
  if (options.sigma < 0.0 || options.epsilon <= 0.0) throw LatentError("invalid sparse prior options");
  for (const auto& p : priors) check_same_size(p.z, priors.front().z);

  std::vector<int> order(priors.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(priors.size());
  for (std::size_t i = 0; i < priors.size(); ++i) dist[i] = distance(target, priors[i].centroid);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    const auto& pa = priors[a];
    const auto& pb = priors[b];
    if (pa.centroid.x != pb.centroid.x) return pa.centroid.x < pb.centroid.x;
    if (pa.centroid.y != pb.centroid.y) return pa.centroid.y < pb.centroid.y;
    return pa.z < pb.z;
  });
  order.resize(std::min<std::size_t>(order.size(), options.k));

  SparsePriorResult r;
  r.neighbours = order;
  double total = 0.0;
  for (int i : order) {
    r.weights.push_back(1.0 / (dist[i] + options.epsilon));
    total += r.weights.back();
  }
  for (double& w : r.weights) w /= total;

  r.z.assign(priors.front().z.size(), 0.0);
  for (std::size_t n = 0; n < order.size(); ++n) {
    const auto& z = priors[order[n]].z;
    for (std::size_t d = 0; d < z.size(); ++d) r.z[d] += r.weights[n] * z[d];
  }
  if (options.sigma > 0.0) {
    Rng rng(seed);
    for (double& v : r.z) v += options.sigma * rng.normal();
  }
  return r;
}

std::vector<double> interpolate(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
  check_same_size(a, b);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw LatentError("alpha must lie in [0, 1]");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - alpha) * a[i] + alpha * b[i];
  return out;
}

std::vector<double> manipulate(const std::vector<double>& z, const std::vector<double>& from,
                               const std::vector<double>& to, double beta) {
  check_same_size(z, from);
  check_same_size(z, to);
  std::vector<double> out(z);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] += beta * (to[i] - from[i]);
  return out;
}

std::map<int, std::vector<double>> cluster_centroid(const std::vector<std::vector<double>>& latents,
                                                    const std::vector<int>& labels) {
  if (latents.size() != labels.size()) throw LatentError("one label per latent required");
  if (latents.empty()) throw LatentError("no latents to cluster");
  std::map<int, std::vector<double>> sums;
  std::map<int, int> counts;
  for (std::size_t i = 0; i < latents.size(); ++i) {
    check_same_size(latents[i], latents.front());
    auto& s = sums[labels[i]];
    if (s.empty()) s.assign(latents[i].size(), 0.0);
    for (std::size_t d = 0; d < s.size(); ++d) s[d] += latents[i][d];
    ++counts[labels[i]];
  }
  for (auto& [label, s] : sums)
    for (double& v : s) v /= counts[label];
  return sums;
}

int occupied_rows(const CanonicalGraph& g) {
  int rows = 0;
  for (int r = 0; r < g.grid.rows; ++r) {
    for (int c = 0; c < g.grid.cols; ++c) {
      if (g.nodes[g.grid.index(r, c)].exists) {
        ++rows;
        break;
      }
    }
  }
  return rows;
}

}  // namespace blockgen
