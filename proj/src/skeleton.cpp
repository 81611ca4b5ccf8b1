#include "blockgen/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <set>

namespace blockgen {

namespace {

constexpr int kRes = BinaryMask::kResolution;
constexpr std::array<int, 8> kDc = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDr = {1, 1, 0, -1, -1, -1, 0, 1};

using Grid = std::vector<std::uint8_t>;

bool on(const Grid& g, int c, int r) {
  return c >= 0 && r >= 0 && c < kRes && r < kRes && g[static_cast<std::size_t>(r) * kRes + c] != 0;
}

// Zhang-Suen sub-iteration; neighbours P2..P9 run clockwise starting north.
bool zs_pass(Grid& g, int step) {
  std::vector<std::size_t> kill;
  std::size_t remaining = 0;
  for (int r = 0; r < kRes; ++r) {
    for (int c = 0; c < kRes; ++c) {
      if (!on(g, c, r)) continue;
      ++remaining;
      const int p2 = on(g, c, r + 1), p3 = on(g, c + 1, r + 1), p4 = on(g, c + 1, r),
                p5 = on(g, c + 1, r - 1), p6 = on(g, c, r - 1), p7 = on(g, c - 1, r - 1),
                p8 = on(g, c - 1, r), p9 = on(g, c - 1, r + 1);
      const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
      if (b < 2 || b > 6) continue;
      const std::array<int, 9> seq = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
      int a = 0;
      for (int k = 0; k < 8; ++k) a += (seq[k] == 0 && seq[k + 1] == 1) ? 1 : 0;
      if (a != 1) continue;
      if (step == 0) {
        if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
      } else {
        if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
      }
      kill.push_back(static_cast<std::size_t>(r) * kRes + c);
    }
  }
  // a 2x2 block would vanish entirely; keep it as the final cluster
  if (kill.size() == remaining) return false;
  for (auto i : kill) g[i] = 0;
  return !kill.empty();
}

// Removes staircase corners so the skeleton is one pixel wide under
// 8-connectivity, keeping connectivity (a pixel goes only when its 4-neighbours
// in an L are bridged diagonally anyway).
void remove_staircases(Grid& g) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < kRes; ++r) {
      for (int c = 0; c < kRes; ++c) {
        if (!on(g, c, r)) continue;
        const bool n = on(g, c, r + 1), s = on(g, c, r - 1), e = on(g, c + 1, r), w = on(g, c - 1, r);
        const bool corner = (n && e && !on(g, c - 1, r - 1) && !s && !w) ||
                            (n && w && !on(g, c + 1, r - 1) && !s && !e) ||
                            (s && e && !on(g, c - 1, r + 1) && !n && !w) ||
                            (s && w && !on(g, c + 1, r + 1) && !n && !e);
        if (!corner) continue;
        g[static_cast<std::size_t>(r) * kRes + c] = 0;
        // removing must not split the pixel's neighbourhood
        int comps = 0;
        std::array<bool, 8> seen{};
        for (int k = 0; k < 8; ++k) {
          if (seen[k] || !on(g, c + kDc[k], r + kDr[k])) continue;
          ++comps;
          std::vector<int> stack = {k};
          seen[k] = true;
          while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            for (int m = 0; m < 8; ++m) {
              if (seen[m] || !on(g, c + kDc[m], r + kDr[m])) continue;
              if (std::abs(kDc[m] - kDc[cur]) <= 1 && std::abs(kDr[m] - kDr[cur]) <= 1) {
                seen[m] = true;
                stack.push_back(m);
              }
            }
          }
        }
        if (comps > 1) {
          g[static_cast<std::size_t>(r) * kRes + c] = 1;
        } else {
          changed = true;
        }
      }
    }
  }
}

struct PixelGraph {
  std::vector<Pixel> pixels;
  std::map<Pixel, int> index;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<bool> alive;

  explicit PixelGraph(const Skeleton& skel) : pixels(skel) {
    for (std::size_t i = 0; i < pixels.size(); ++i) index[pixels[i]] = static_cast<int>(i);
    adj.resize(pixels.size());
    alive.assign(pixels.size(), true);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      for (int k = 0; k < 8; ++k) {
        auto it = index.find({pixels[i].col + kDc[k], pixels[i].row + kDr[k]});
        if (it == index.end()) continue;
        adj[i].push_back({it->second, (kDc[k] != 0 && kDr[k] != 0) ? std::numbers::sqrt2 : 1.0});
      }
    }
  }

  int degree(int i) const {
    int d = 0;
    for (auto [j, w] : adj[i]) d += alive[j] ? 1 : 0;
    return d;
  }

  // Dijkstra from src over alive pixels; returns distances and predecessors.
  std::pair<std::vector<double>, std::vector<int>> shortest(int src) const {
    std::vector<double> dist(pixels.size(), std::numeric_limits<double>::infinity());
    std::vector<int> prev(pixels.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    dist[src] = 0.0;
    q.push({0.0, src});
    while (!q.empty()) {
      auto [d, u] = q.top();
      q.pop();
      if (d > dist[u]) continue;
      for (auto [v, w] : adj[u]) {
        if (!alive[v]) continue;
        if (d + w < dist[v] - 1e-12) {
          dist[v] = d + w;
          prev[v] = u;
          q.push({dist[v], v});
        }
      }
    }
    return {dist, prev};
  }

  int farthest(const std::vector<double>& dist) const {
    int best = -1;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (!alive[i] || !std::isfinite(dist[i])) continue;
      if (best < 0 || dist[i] > dist[best] + 1e-9) best = static_cast<int>(i);
    }
    return best;
  }

  int first_alive() const {
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (alive[i]) return static_cast<int>(i);
    }
    return -1;
  }

  // Double-sweep diameter: returns the pixel path and its length.
  std::pair<std::vector<int>, double> diameter() const {
    const int s = first_alive();
    const int a = farthest(shortest(s).first);
    auto [dist, prev] = shortest(a);
    const int b = farthest(dist);
    std::vector<int> path;
    for (int v = b; v >= 0; v = prev[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return {path, dist[b]};
  }

  // Removes endpoint branches shorter than `limit` that end at a junction.
  bool prune_spurs(double limit) {
    bool any = false;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      if (!alive[i] || degree(static_cast<int>(i)) != 1) continue;
      std::vector<int> branch = {static_cast<int>(i)};
      double len = 0.0;
      int prev = -1, cur = static_cast<int>(i);
      bool reached_junction = false;
      while (true) {
        int next = -1;
        double w_next = 0.0;
        for (auto [v, w] : adj[cur]) {
          if (!alive[v] || v == prev) continue;
          if (std::find(branch.begin(), branch.end(), v) != branch.end()) continue;
          next = v;
          w_next = w;
          break;
        }
        if (next < 0) break;
        if (degree(next) >= 3) {
          len += w_next;
          reached_junction = true;
          break;
        }
        len += w_next;
        prev = cur;
        cur = next;
        branch.push_back(cur);
      }
      if (reached_junction && len < limit) {
        for (int v : branch) alive[v] = false;
        any = true;
      }
    }
    return any;
  }
};

Point2 centre_of(const Pixel& p) { return {p.col + 0.5, p.row + 0.5}; }

// Distance from a mask point to the nearest background pixel centre.
double clearance(const BinaryMask& mask, Point2 p) {
  double best = 1e300;
  for (int r = -1; r <= kRes; ++r) {
    for (int c = -1; c <= kRes; ++c) {
      if (mask.at(c, r)) continue;
      best = std::min(best, distance(p, {c + 0.5, r + 0.5}));
    }
  }
  return best;
}

// Marches from `from` along `dir` while inside the mask, then bisects the exit.
Point2 march_to_boundary(const BinaryMask& mask, Point2 from, Point2 dir) {
  const double step = 0.05;
  Point2 inside = from;
  if (!mask.contains(inside)) return from;
  for (int k = 1; k < 64 * 40; ++k) {
    const Point2 p = from + dir * (k * step);
    if (!mask.contains(p)) {
      Point2 lo = inside, hi = p;
      for (int it = 0; it < 30; ++it) {
        const Point2 mid = (lo + hi) * 0.5;
        (mask.contains(mid) ? lo : hi) = mid;
      }
      return lo;
    }
    inside = p;
  }
  return inside;
}

std::vector<Point2> longest_chord(const BinaryMask& mask, Point2 through) {
  std::vector<Point2> best;
  double best_len = -1.0;
  for (int deg = 0; deg < 180; ++deg) {
    const double a = deg * std::numbers::pi / 180.0;
    const Point2 d{std::cos(a), std::sin(a)};
    const Point2 p0 = march_to_boundary(mask, through, d * -1.0);
    const Point2 p1 = march_to_boundary(mask, through, d);
    const double len = distance(p0, p1);
    if (len > best_len + 1e-9) {
      best_len = len;
      best = {p0, p1};
    }
  }
  if (distance(best[0], best[1]) <= 1e-9) best[1] = best[0] + Point2{1e-3, 0.0};
  return best;
}

}  // namespace

int count_components(const BinaryMask& mask) {
  std::vector<int> label(kRes * kRes, -1);
  int comps = 0;
  for (int r = 0; r < kRes; ++r) {
    for (int c = 0; c < kRes; ++c) {
      if (!mask.at(c, r) || label[r * kRes + c] >= 0) continue;
      std::vector<Pixel> stack = {{c, r}};
      label[r * kRes + c] = comps;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nc = p.col + kDc[k], nr = p.row + kDr[k];
          if (!mask.at(nc, nr) || label[nr * kRes + nc] >= 0) continue;
          label[nr * kRes + nc] = comps;
          stack.push_back({nc, nr});
        }
      }
      ++comps;
    }
  }
  return comps;
}

Skeleton thin_mask(const BinaryMask& mask) {
  const int comps = count_components(mask);
  if (comps == 0) throw GeometryError("cannot thin an empty mask");
  if (comps > 1) throw GeometryError("mask has more than one connected component");
  Grid g = mask.bits;
  while (true) {
    const bool a = zs_pass(g, 0);
    const bool b = zs_pass(g, 1);
    if (!a && !b) break;
  }
  remove_staircases(g);
  Skeleton out;
  for (int c = 0; c < kRes; ++c) {
    for (int r = 0; r < kRes; ++r) {
      if (on(g, c, r)) out.push_back({c, r});
    }
  }
  return out;
}

int count_branch_points(const Skeleton& skel) {
  std::set<Pixel> all(skel.begin(), skel.end());
  std::set<Pixel> branch;
  for (const auto& p : skel) {
    int n = 0;
    for (int k = 0; k < 8; ++k) n += all.count({p.col + kDc[k], p.row + kDr[k]}) ? 1 : 0;
    if (n > 2) branch.insert(p);
  }
  int clusters = 0;
  std::set<Pixel> seen;
  for (const auto& p : branch) {
    if (seen.count(p)) continue;
    ++clusters;
    std::vector<Pixel> stack = {p};
    seen.insert(p);
    while (!stack.empty()) {
      const Pixel q = stack.back();
      stack.pop_back();
      for (int k = 0; k < 8; ++k) {
        const Pixel nb{q.col + kDc[k], q.row + kDr[k]};
        if (branch.count(nb) && !seen.count(nb)) {
          seen.insert(nb);
          stack.push_back(nb);
        }
      }
    }
  }
  return clusters;
}

std::vector<Point2> douglas_peucker(const std::vector<Point2>& pts, double tolerance) {
  if (pts.size() <= 2) return pts;
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, pts.size() - 1}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t at = i;
    for (std::size_t k = i + 1; k < j; ++k) {
      const double d = point_segment_distance(pts[k], pts[i], pts[j]);
      if (d > worst) {
        worst = d;
        at = k;
      }
    }
    if (worst > tolerance) {
      keep[at] = true;
      stack.push_back({i, at});
      stack.push_back({at, j});
    }
  }
  std::vector<Point2> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (keep[k]) out.push_back(pts[k]);
  }
  return out;
}

std::vector<Point2> trace_main_axis(const Skeleton& skel, const BinaryMask& mask) {
  if (skel.empty()) throw GeometryError("empty skeleton");
  std::vector<Point2> line;
  if (skel.size() == 1) {
    line = longest_chord(mask, centre_of(skel.front()));
  } else {
    PixelGraph graph(skel);
    auto [path, diam] = graph.diameter();
    while (graph.prune_spurs(0.1 * diam)) {
    }
    std::tie(path, diam) = graph.diameter();
    // An end that leaves through a fork (two branches running into corners)
    // is cut back to the junction; the boundary extension replaces it.
    auto trim = [&](std::vector<int>& p) {
      double len = 0.0;
      for (std::size_t k = 1; k < p.size(); ++k) {
        len += distance(centre_of(graph.pixels[p[k - 1]]), centre_of(graph.pixels[p[k]]));
        if (len > 0.3 * diam) return;
        if (graph.degree(p[k]) >= 3) {
          p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
          return;
        }
      }
    };
    // An end that runs into a convex corner has a clearance that falls
    // towards zero; cut it back to where the clearance stops growing.
    auto corner_cut = [&](std::vector<int>& p) {
      const std::size_t window = std::max<std::size_t>(2, p.size() * 35 / 100);
      std::vector<double> clear(std::min(window, p.size()));
      for (std::size_t k = 0; k < clear.size(); ++k) clear[k] = clearance(mask, centre_of(graph.pixels[p[k]]));
      const double peak = *std::max_element(clear.begin(), clear.end());
      if (clear.front() >= 0.5 * peak) return;
      std::size_t k = 0;
      while (k + 1 < clear.size() && clear[k + 1] >= clear[k] - 0.5) ++k;
      p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
    };
    if (path.size() > 2) {
      trim(path);
      corner_cut(path);
      std::reverse(path.begin(), path.end());
      trim(path);
      corner_cut(path);
    }
    if (path.size() < 2) {
      line = longest_chord(mask, centre_of(graph.pixels[path.front()]));
    } else {
      std::vector<Point2> pts;
      for (int v : path) pts.push_back(centre_of(graph.pixels[v]));
      line = douglas_peucker(pts, 1.0);
      // stubby end segments give unreliable tangents for the extension
      while (line.size() > 2 && distance(line[0], line[1]) < 6.0) line.erase(line.begin());
      while (line.size() > 2 && distance(line.back(), line[line.size() - 2]) < 6.0) line.pop_back();
      const Point2 d0 = line[0] - line[1];
      const Point2 d1 = line.back() - line[line.size() - 2];
      line.front() = march_to_boundary(mask, line.front(), d0 / norm(d0));
      line.back() = march_to_boundary(mask, line.back(), d1 / norm(d1));
    }
  }
  const Point2 a = line.front(), b = line.back();
  if (a.x > b.x + 1e-9 || (std::abs(a.x - b.x) <= 1e-9 && a.y > b.y)) std::reverse(line.begin(), line.end());
  return line;
}

// ---------------------------------------------------------------------------

MainAxis::MainAxis(std::vector<Point2> polyline, Polygon boundary)
    : polyline_(std::move(polyline)), boundary_(std::move(boundary)) {}

MainAxis MainAxis::from_polyline(std::vector<Point2> polyline, Polygon boundary) {
  std::vector<Point2> clean;
  for (const auto& p : polyline) {
    if (!clean.empty() && distance(clean.back(), p) <= kCoordEps) continue;
    clean.push_back(p);
  }
  if (clean.size() < 2) throw GeometryError("main axis needs two distinct points");
  MainAxis axis(std::move(clean), std::move(boundary));
  const auto& pl = axis.polyline_;
  axis.cumulative_.assign(pl.size(), 0.0);
  for (std::size_t i = 1; i < pl.size(); ++i) axis.cumulative_[i] = axis.cumulative_[i - 1] + distance(pl[i - 1], pl[i]);
  axis.min_half_width_ = std::max(1e-6, 0.01 * axis.cumulative_.back());

  axis.vertex_half_widths_.assign(pl.size(), 0.0);
  for (std::size_t i = 0; i < pl.size(); ++i) {
    Point2 n;
    if (i == 0) {
      n = perp((pl[1] - pl[0]) / norm(pl[1] - pl[0]));
    } else if (i + 1 == pl.size()) {
      n = perp((pl[i] - pl[i - 1]) / norm(pl[i] - pl[i - 1]));
    } else {
      const Point2 d = (pl[i] - pl[i - 1]) / norm(pl[i] - pl[i - 1]) + (pl[i + 1] - pl[i]) / norm(pl[i + 1] - pl[i]);
      n = norm(d) > 1e-12 ? perp(d / norm(d)) : perp((pl[i] - pl[i - 1]) / norm(pl[i] - pl[i - 1]));
    }
    axis.vertex_half_widths_[i] = axis.raw_half_width(pl[i], n);
  }

  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pl.size(); ++i) {
    if (i > 0) {
      const double lam = axis.vertex_half_widths_[i] * std::abs(axis.turn_at(static_cast<int>(i)));
      if (lam > 0.0) {
        axis.pieces_.push_back({s, lam, static_cast<int>(i), true});
        s += lam;
      }
    }
    const double len = distance(pl[i], pl[i + 1]);
    axis.pieces_.push_back({s, len, static_cast<int>(i), false});
    s += len;
  }
  axis.param_length_ = s;
  return axis;
}

MainAxis MainAxis::fit(const std::vector<Point2>& rough, const Polygon& boundary) {
  if (rough.size() < 2) throw GeometryError("main axis needs two points");
  std::vector<Point2> pts = rough;
  const std::size_t n = pts.size();
  // pull the ends inward so re-centring sees both walls
  const Point2 q0 = rough[0] + (rough[1] - rough[0]) * 0.25;
  const Point2 q1 = rough[n - 1] + (rough[n - 2] - rough[n - 1]) * 0.25;
  pts.front() = q0;
  pts.back() = q1;

  auto recentre = [&](Point2 v, Point2 normal) {
    const double up = ray_hit_distance(boundary, v, normal);
    const double down = ray_hit_distance(boundary, v, normal * -1.0);
    if (up < 0 || down < 0 || !point_in_polygon(v, boundary)) return v;
    return v + normal * ((up - down) / 2.0);
  };
  // a few sweeps: each move changes the neighbours' tangents
  std::vector<Point2> centred = pts;
  for (int sweep = 0; sweep < 8; ++sweep) {
    const std::vector<Point2> prev = centred;
    for (std::size_t i = 0; i < n; ++i) {
      Point2 d;
      if (i == 0) {
        d = prev[1] - prev[0];
      } else if (i + 1 == n) {
        d = prev[i] - prev[i - 1];
      } else {
        const double la = norm(prev[i] - prev[i - 1]), lb = norm(prev[i + 1] - prev[i]);
        if (la <= 1e-12 || lb <= 1e-12) continue;
        d = (prev[i] - prev[i - 1]) / la + (prev[i + 1] - prev[i]) / lb;
      }
      if (norm(d) <= 1e-12) continue;
      centred[i] = recentre(prev[i], perp(d / norm(d)));
    }
  }
  auto extend = [&](Point2 end, Point2 toward_outside, Point2 fallback) {
    const double l = norm(toward_outside);
    if (l <= 1e-12) return fallback;
    const Point2 d = toward_outside / l;
    const double hit = ray_hit_distance(boundary, end, d);
    return hit > 0 ? end + d * hit : fallback;
  };
  centred.front() = extend(centred[0], centred[0] - centred[1], rough.front());
  centred.back() = extend(centred[n - 1], centred[n - 1] - centred[n - 2], rough.back());
  return from_polyline(std::move(centred), boundary);
}

double MainAxis::turn_at(int vertex) const {
  const Point2 a = polyline_[vertex] - polyline_[vertex - 1];
  const Point2 b = polyline_[vertex + 1] - polyline_[vertex];
  return std::atan2(cross(a, b), dot(a, b));
}

double MainAxis::raw_half_width(Point2 origin, Point2 normal) const {
  const double up = ray_hit_distance(boundary_, origin, normal);
  const double down = ray_hit_distance(boundary_, origin, normal * -1.0);
  double hw;
  if (up > 0 && down > 0) {
    hw = (up + down) / 2.0;
  } else if (up > 0) {
    hw = up;
  } else if (down > 0) {
    hw = down;
  } else {
    hw = 0.0;
  }
  return std::max(hw, min_half_width_);
}

const MainAxis::Piece& MainAxis::piece_at(double s) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                             [](double v, const Piece& p) { return v < p.start; });
  if (it == pieces_.begin()) return pieces_.front();
  return *(it - 1);
}

Point2 MainAxis::base_at(const Piece& piece, double s) const {
  if (piece.joint) return polyline_[piece.index];
  const Point2 a = polyline_[piece.index], b = polyline_[piece.index + 1];
  const double u = piece.length > 0 ? std::clamp((s - piece.start) / piece.length, 0.0, 1.0) : 0.0;
  return a + (b - a) * u;
}

Point2 MainAxis::normal_at(const Piece& piece, double s) const {
  if (!piece.joint) {
    const Point2 d = polyline_[piece.index + 1] - polyline_[piece.index];
    return perp(d / norm(d));
  }
  const Point2 din = polyline_[piece.index] - polyline_[piece.index - 1];
  const double f = std::clamp((s - piece.start) / piece.length, 0.0, 1.0);
  return perp(rotate(din / norm(din), turn_at(piece.index) * f));
}

AxisCoord MainAxis::project(Point2 p) const {
  const std::size_t nseg = polyline_.size() - 1;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_seg = 0;
  double best_u = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    const Point2 a = polyline_[i], d = polyline_[i + 1] - a;
    const double u = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
    const double dist = distance(p, a + d * u);
    if (dist < best - 1e-12) {
      best = dist;
      best_seg = i;
      best_u = u;
    }
  }
  // locate the segment piece
  const Piece* seg = nullptr;
  for (const auto& pc : pieces_) {
    if (!pc.joint && pc.index == static_cast<int>(best_seg)) seg = &pc;
  }
  const Point2 a = polyline_[best_seg], b = polyline_[best_seg + 1];
  const Point2 dir = (b - a) / norm(b - a);

  // Outer wedge of an interior vertex: parameterize by angle through the joint.
  int vertex = -1;
  if (best_u <= 0.0 && best_seg > 0) vertex = static_cast<int>(best_seg);
  if (best_u >= 1.0 && best_seg + 1 < nseg) vertex = static_cast<int>(best_seg) + 1;
  if (vertex > 0) {
    const Piece* joint = nullptr;
    for (const auto& pc : pieces_) {
      if (pc.joint && pc.index == vertex) joint = &pc;
    }
    const Point2 w = p - polyline_[vertex];
    if (joint != nullptr && norm(w) > 0.0) {
      const double turn = turn_at(vertex);
      const Point2 din = (polyline_[vertex] - polyline_[vertex - 1]) / norm(polyline_[vertex] - polyline_[vertex - 1]);
      const double side = turn > 0 ? -1.0 : 1.0;  // outer side sign
      const Point2 o0 = perp(din) * side;
      const double phi = std::atan2(cross(o0, w), dot(o0, w));
      const double f = std::clamp(phi / turn, 0.0, 1.0);
      const double s = joint->start + joint->length * f;
      return {s / param_length_, side * norm(w) / half_width(s / param_length_)};
    }
    // no joint: the vertex belongs to the segment start
  }

  double s;
  double offset;
  if (best_seg == 0 && dot(p - a, b - a) < 0) {
    s = 0.0;
    offset = cross(dir, p - a);
  } else if (best_seg + 1 == nseg && dot(p - b, b - a) > 0) {
    s = param_length_;
    offset = cross(dir, p - b);
  } else {
    s = seg->start + seg->length * best_u;
    offset = cross(dir, p - (a + (b - a) * best_u));
  }
  const double t = std::clamp(s / param_length_, 0.0, 1.0);
  return {t, offset / half_width(t)};
}

Point2 MainAxis::locate(double fraction, double offset) const {
  const double s = std::clamp(fraction, 0.0, 1.0) * param_length_;
  const Piece& piece = piece_at(s);
  return base_at(piece, s) + normal_at(piece, s) * (offset * half_width(fraction));
}

double MainAxis::tangent_angle(double fraction) const {
  const double s = std::clamp(fraction, 0.0, 1.0) * param_length_;
  const Point2 n = normal_at(piece_at(s), s);
  return std::atan2(-n.x, n.y);
}

double MainAxis::half_width(double fraction) const {
  const double s = std::clamp(fraction, 0.0, 1.0) * param_length_;
  const Piece& piece = piece_at(s);
  if (piece.joint) return vertex_half_widths_[piece.index];
  // nudge off the ends so the perpendicular rays do not start on the boundary
  const double eps = 1e-9 * param_length_;
  const double ss = std::clamp(s, piece.start + (piece.index == 0 ? eps : 0.0),
                               piece.start + piece.length - (piece.index + 2 == static_cast<int>(polyline_.size()) ? eps : 0.0));
  return raw_half_width(base_at(piece, ss), normal_at(piece, ss));
}

MainAxis extract_main_axis(const Polygon& block) {
  const BinaryMask mask = rasterize(block);
  const Skeleton skel = thin_mask(mask);
  const auto line = trace_main_axis(skel, mask);
  std::vector<Point2> world;
  world.reserve(line.size());
  for (const auto& p : line) world.push_back(mask.frame.to_world(p));
  return MainAxis::fit(world, block);
}

double local_half_width(const MainAxis& axis, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw GeometryError("axis fraction outside [0, 1]");
  return axis.half_width(t);
}

}  // namespace blockgen
