#include "blockgen/powell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blockgen {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - phi
constexpr double kGrow = 1.618033988749895;

struct LineResult {
  double alpha = 0.0;
  double value = 0.0;
};

template <typename G>
LineResult golden_section(G& g, double left, double right, double tol) {
  if (left > right) std::swap(left, right);
  double x1 = left + kGolden * (right - left), x2 = right - kGolden * (right - left);
  double f1 = g(x1), f2 = g(x2);
  while (right - left > tol) {
    if (f1 < f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = left + kGolden * (right - left);
      f1 = g(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = right - kGolden * (right - left);
      f2 = g(x2);
    }
  }
  return f1 < f2 ? LineResult{x1, f1} : LineResult{x2, f2};
}

// Minimizes g(alpha) on [lo, hi] (lo <= 0 <= hi) starting from alpha = 0.
template <typename G>
LineResult line_minimize(G& g, double f0, double lo, double hi, double tol) {
  if (hi - lo <= tol) return {0.0, f0};
  const double step = 0.1 * (hi - lo);
  double sign = 1.0;
  double x1 = std::min(step, hi);
  double f1 = x1 > 0 ? g(x1) : std::numeric_limits<double>::infinity();
  if (!(f1 < f0)) {
    const double xm = std::max(-step, lo);
    const double fm = xm < 0 ? g(xm) : std::numeric_limits<double>::infinity();
    if (!(fm < f0)) {
      const LineResult r = golden_section(g, xm < 0 ? xm : 0.0, x1 > 0 ? x1 : 0.0, tol);
      return r.value < f0 ? r : LineResult{0.0, f0};
    }
    sign = -1.0;
    x1 = xm;
    f1 = fm;
  }
  const double bound = sign > 0 ? hi : lo;
  double x0 = 0.0;
  while (true) {
    double x2 = x1 + kGrow * (x1 - x0);
    if ((sign > 0 && x2 >= bound) || (sign < 0 && x2 <= bound)) x2 = bound;
    if (x2 == x1) return {x1, f1};
    const double f2 = g(x2);
    if (f2 >= f1) {
      const LineResult r = golden_section(g, x0, x2, tol);
      return r.value < f1 ? r : LineResult{x1, f1};
    }
    if (x2 == bound) {
      const LineResult r = golden_section(g, x1, x2, tol);
      return r.value < f2 ? r : LineResult{x2, f2};
    }
    x0 = x1;
    x1 = x2;
    f1 = f2;
  }
}

}  // namespace

PowellResult powell_minimize(const Objective& f, std::vector<double> x0,
                             const std::vector<std::pair<double, double>>& bounds,
                             const PowellOptions& options) {
  const std::size_t n = x0.size();
  if (bounds.size() != n) throw std::invalid_argument("powell: bounds size mismatch");
  if (n == 0) throw std::invalid_argument("powell: empty parameter vector");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(bounds[i].first <= bounds[i].second)) throw std::invalid_argument("powell: invalid bounds");
    x0[i] = std::clamp(x0[i], bounds[i].first, bounds[i].second);
  }

  PowellResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;

  std::vector<double> x = x0;
  double fx = eval(x);
  std::vector<double> trial(n);

  // Feasible alpha range for x + alpha * d.
  auto feasible = [&](const std::vector<double>& base, const std::vector<double>& d) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(d[i]) < 1e-15) continue;
      const double a = (bounds[i].first - base[i]) / d[i];
      const double b = (bounds[i].second - base[i]) / d[i];
      lo = std::max(lo, std::min(a, b));
      hi = std::min(hi, std::max(a, b));
    }
    if (!std::isfinite(lo)) lo = 0.0;
    if (!std::isfinite(hi)) hi = 0.0;
    return std::pair{std::min(lo, 0.0), std::max(hi, 0.0)};
  };

  auto search = [&](std::vector<double>& base, double& fbase, const std::vector<double>& d) {
    auto [lo, hi] = feasible(base, d);
    auto g = [&](double alpha) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = std::clamp(base[i] + alpha * d[i], bounds[i].first, bounds[i].second);
      }
      return eval(trial);
    };
    const LineResult r = line_minimize(g, fbase, lo, hi, options.tolerance * std::max(1.0, hi - lo) * 0.1);
    if (r.value < fbase) {
      for (std::size_t i = 0; i < n; ++i) {
        base[i] = std::clamp(base[i] + r.alpha * d[i], bounds[i].first, bounds[i].second);
      }
      const double drop = fbase - r.value;
      fbase = r.value;
      return drop;
    }
    return 0.0;
  };

  for (result.iterations = 1; result.iterations <= options.max_iterations; ++result.iterations) {
    const std::vector<double> start = x;
    const double fstart = fx;
    double biggest = 0.0;
    std::size_t biggest_dir = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double drop = search(x, fx, dirs[k]);
      if (drop > biggest) {
        biggest = drop;
        biggest_dir = k;
      }
    }
    if (2.0 * (fstart - fx) <= options.tolerance * (std::abs(fstart) + std::abs(fx)) + 1e-20) {
      result.converged = true;
      break;
    }
    std::vector<double> shift(n);
    double shift_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      shift[i] = x[i] - start[i];
      shift_norm += shift[i] * shift[i];
    }
    if (shift_norm > 0.0) {
      // extrapolated point test from the classic update rule
      std::vector<double> ext(n);
      for (std::size_t i = 0; i < n; ++i) ext[i] = std::clamp(2.0 * x[i] - start[i], bounds[i].first, bounds[i].second);
      const double fe = eval(ext);
      if (fe < fstart) {
        const double t = 2.0 * (fstart - 2.0 * fx + fe) * std::pow(fstart - fx - biggest, 2) -
                         biggest * std::pow(fstart - fe, 2);
        if (t < 0.0) {
          search(x, fx, shift);
          dirs[biggest_dir] = dirs.back();
          dirs.back() = shift;
        }
      }
    }
  }
  if (result.iterations > options.max_iterations) result.iterations = options.max_iterations;
  result.x = x;
  result.value = fx;
  return result;
}

}  // namespace blockgen
