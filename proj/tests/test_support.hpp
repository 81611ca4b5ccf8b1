#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "blockgen/geometry.hpp"
#include "blockgen/random.hpp"

namespace blockgen::testing {

inline Polygon rect(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Star-shaped random polygon: sorted angles with random radii.
inline Polygon random_star(Rng& rng, int n, Point2 c = {}, double rmin = 2.0, double rmax = 10.0) {
  std::vector<double> ang(n);
  for (auto& a : ang) a = rng.uniform(0.0, 2 * std::numbers::pi);
  std::sort(ang.begin(), ang.end());
  std::vector<Point2> ring;
  for (double a : ang) {
    const double r = rng.uniform(rmin, rmax);
    ring.push_back(c + Point2{r * std::cos(a), r * std::sin(a)});
  }
  return Polygon(ring);
}

// Monte-Carlo estimate of a region's area given an indicator.
template <typename Inside>
double monte_carlo_area(Rng& rng, double x0, double y0, double x1, double y1, int samples, Inside&& inside) {
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Point2 p{rng.uniform(x0, x1), rng.uniform(y0, y1)};
    if (inside(p)) ++hits;
  }
  return (x1 - x0) * (y1 - y0) * hits / samples;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace blockgen::testing
