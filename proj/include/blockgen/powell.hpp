#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace blockgen {

struct PowellOptions {
  double tolerance = 1e-4;
  int max_iterations = 200;
};

struct PowellResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Powell's conjugate-direction method with box bounds. Each line search
// brackets a minimum inside the feasible interval and refines it by golden
// section; steps that do not improve the objective are rejected.
PowellResult powell_minimize(const Objective& f, std::vector<double> x0,
                             const std::vector<std::pair<double, double>>& bounds,
                             const PowellOptions& options = {});

}  // namespace blockgen
