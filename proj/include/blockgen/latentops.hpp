#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "blockgen/canonical.hpp"

namespace blockgen {

class LatentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LatentPrior {
  Point2 centroid;  // block centroid, meters
  std::vector<double> z;
};

struct SparsePriorOptions {
  int k = 5;
  double sigma = 0.1;     // std of the added normal noise
  double epsilon = 1.0;   // meters, weight = 1 / (d + epsilon)
};

struct SparsePriorResult {
  std::vector<double> z;
  std::vector<int> neighbours;  // indices into the prior list, nearest first
  std::vector<double> weights;  // normalized, same order
};

// Inverse-distance blend of the k nearest priors plus N(0, sigma^2) noise.
// Ties in distance are broken by centroid then latent values, so the result
// does not depend on the order of `priors`.
SparsePriorResult sparse_prior_latent(Point2 target, const std::vector<LatentPrior>& priors,
                                      const SparsePriorOptions& options, std::uint64_t seed);

// (1 - alpha) a + alpha b
std::vector<double> interpolate(const std::vector<double>& a, const std::vector<double>& b, double alpha);

// z + beta (to - from)
std::vector<double> manipulate(const std::vector<double>& z, const std::vector<double>& from,
                               const std::vector<double>& to, double beta);

// Mean latent per label.
std::map<int, std::vector<double>> cluster_centroid(const std::vector<std::vector<double>>& latents,
                                                    const std::vector<int>& labels);

// Number of grid rows holding at least one existing node.
int occupied_rows(const CanonicalGraph& g);

}  // namespace blockgen
