#include <algorithm>
#include <cmath>
#include <numeric>

#include "blockgen/metrics.hpp"
#include "blockgen/procedural.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace blockgen;
using namespace blockgen::testing;

TEST_CASE("matching score") {
  CHECK(matching_score(100, {0, 0}, 150, {30, 40}) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(matching_score(80, {2, 3}, 80, {2, 3}) == doctest::Approx(80.0));
  double prev = 1e300;
  for (double d = 0; d <= 3000; d += 50) {
    const double s = matching_score(100, {0, 0}, 120, {d, 0});
    CHECK(s < prev);
    prev = s;
  }
  CHECK(prev < 1e-10);

  const BuildingRecord a = make_building_record(rect(0, 0, 10, 10));
  const BuildingRecord b = make_building_record(rect(30, 40, 40, 55));
  CHECK(matching_score(a, b) == doctest::Approx(100.0 * std::exp2(-0.02 * std::hypot(30, 42.5))));
}

TEST_CASE("hungarian") {
  const Assignment a = hungarian({{5, 1}, {2, 6}});
  CHECK(a.pairs == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(a.total == doctest::Approx(11.0));
  const Assignment one = hungarian({{3.5}});
  CHECK(one.pairs.size() == 1);
  CHECK(one.total == doctest::Approx(3.5));

  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = rng.uniform_int(1, 6), cols = rng.uniform_int(1, 6);
    std::vector<std::vector<double>> s(rows, std::vector<double>(cols));
    for (auto& r : s)
      for (auto& v : r) v = rng.uniform(0, 100);
    const Assignment h = hungarian(s);
    CHECK(h.total == doctest::Approx(brute_force_max(s)).epsilon(1e-12));
    CHECK(static_cast<int>(h.pairs.size()) == std::min(rows, cols));
    std::vector<int> seen_r, seen_c;
    for (auto [i, j] : h.pairs) {
      seen_r.push_back(i);
      seen_c.push_back(j);
    }
    std::sort(seen_c.begin(), seen_c.end());
    CHECK(std::adjacent_find(seen_c.begin(), seen_c.end()) == seen_c.end());
  }
}

TEST_CASE("layout similarity") {
  Rng rng(11);
  const Polygon block = rect(0, 0, 120, 50);
  Layout a{block, random_layout(rng, 7, 40)};
  double mean_area = 0.0;
  for (const auto& p : a.buildings) mean_area += polygon_area(p);
  mean_area /= 7;
  CHECK(layout_sim(a, a) == doctest::Approx(mean_area).epsilon(1e-12));

  Layout b{block, random_layout(rng, 5, 40)};
  CHECK(layout_sim(a, b) == doctest::Approx(layout_sim(b, a)).epsilon(1e-12));

  // moving the whole scene leaves the score unchanged
  Layout moved{block.translated({500, -200}).rotated(0.7), {}};
  for (const auto& p : b.buildings) moved.buildings.push_back(p.translated({500, -200}).rotated(0.7));
  CHECK(layout_sim(a, moved) == doctest::Approx(layout_sim(a, b)).epsilon(1e-9));

  // without a block the buildings' own frame is used, so joint translation is free
  Layout loose{std::nullopt, b.buildings}, loose_moved{std::nullopt, {}};
  for (const auto& p : b.buildings) loose_moved.buildings.push_back(p.translated({13, 29}));
  CHECK(layout_sim(a, loose) == doctest::Approx(layout_sim(a, loose_moved)).epsilon(1e-9));

  CHECK(layout_sim(a, Layout{block, {}}) == 0.0);

  // self-match dominates perturbed copies with equal areas
  for (int t = 0; t < 20; ++t) {
    Layout p{block, {}};
    for (const auto& q : a.buildings) p.buildings.push_back(q.translated({rng.uniform(-5, 5), rng.uniform(-5, 5)}));
    CHECK(layout_sim(a, a) >= layout_sim(a, p) - 1e-12);
  }
}

TEST_CASE("overlap index") {
  CHECK(overlap_index({rect(0, 0, 1, 1), rect(2, 0, 3, 1)}) == 0.0);
  CHECK(overlap_index({rect(0, 0, 1, 1), rect(0, 0, 1, 1)}) == doctest::Approx(50.0));
  CHECK(overlap_index({}) == 0.0);

  Rng rng(21);
  for (int t = 0; t < 5; ++t) {
    const auto layout = random_layout(rng, 6, 20);
    const double exact = overlap_index(layout);
    const double raster = raster_overlap(layout, -10, -10, 30, 30, 1024);
    CHECK(exact == doctest::Approx(raster).epsilon(0.01).scale(1.0));
    CHECK(exact >= 0.0);
    CHECK(exact <= 100.0);
    // rigid motion of the scene
    std::vector<Polygon> moved;
    for (const auto& p : layout) moved.push_back(p.rotated(1.3, {5, 5}).translated({40, 7}));
    CHECK(overlap_index(moved) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("out-block index") {
  const Polygon block = rect(0, 0, 100, 50);
  CHECK(out_block_index({rect(10, 10, 20, 20), rect(30, 10, 40, 30)}, block) == 0.0);
  CHECK(out_block_index({rect(10, 10, 20, 20), rect(200, 10, 210, 20)}, block) == doctest::Approx(50.0));
  // half of one of two equal rectangles sticks out
  CHECK(out_block_index({rect(10, 10, 20, 20), rect(95, 10, 105, 20)}, block) == doctest::Approx(25.0));
  const std::vector<Polygon> moved{rect(10, 10, 20, 20).rotated(0.4), rect(95, 10, 105, 20).rotated(0.4)};
  CHECK(out_block_index(moved, block.rotated(0.4)) == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("wasserstein 1-d") {
  CHECK(wasserstein_1d({1, 2, 3}, {3, 1, 2}) == 0.0);
  CHECK(wasserstein_1d({0}, {1}) == doctest::Approx(1.0));
  CHECK(wasserstein_1d({0, 0}, {1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wasserstein_1d({}, {1}), MetricError);

  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(rng.uniform_int(1, 8)), b(rng.uniform_int(1, 8)), c(rng.uniform_int(1, 8));
    for (auto* v : {&a, &b, &c})
      for (auto& x : *v) x = rng.uniform(-10, 10);
    CHECK(wasserstein_1d(a, b) == doctest::Approx(transport_oracle(a, b)).epsilon(1e-9).scale(1e-9));
    CHECK(wasserstein_1d(a, c) <= wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-9);
  }
}

TEST_CASE("bbox and count wasserstein") {
  Rng rng(6);
  std::vector<Layout> a, b;
  for (int i = 0; i < 4; ++i) a.push_back({rect(0, 0, 60, 40), random_layout(rng, 3 + i, 30)});
  CHECK(bbox_wasserstein(a, a) == 0.0);
  CHECK(count_wasserstein(a, a) == 0.0);
  for (const auto& l : a) {
    Layout m{l.block->translated({100, 100}), {}};
    for (const auto& p : l.buildings) m.buildings.push_back(p.translated({100, 100}));
    b.push_back(m);
  }
  CHECK(bbox_wasserstein(a, b) == doctest::Approx(0.0).scale(1e-9));
  b.pop_back();
  CHECK(count_wasserstein(a, b) > 0.0);
}

TEST_CASE("position and coverage error") {
  std::vector<NodeFeatures> truth(6), pred(6);
  truth[1] = {true, 10, 5, 8, 4, ShapeType::Rect, 1.0};
  truth[3] = {true, 40, -5, 8, 4, ShapeType::Rect, 1.0};
  pred = truth;
  CHECK(position_error(pred, truth, 200.0) == 0.0);
  pred[1].x += 2.0;
  pred[3].y -= 2.0;
  CHECK(position_error(pred, truth, 200.0) == doctest::Approx(1.0));
  std::vector<NodeFeatures> empty(6);
  CHECK_THROWS_AS(position_error(empty, truth, 200.0), MetricError);

  const Polygon block = rect(0, 0, 100, 60);
  const std::vector<Polygon> full{rect(0, 0, 10, 6), rect(20, 20, 30, 26)};
  CHECK(coverage_error(full, full, block) == 0.0);
  CHECK(coverage_error({full[0]}, full, block) == doctest::Approx(1.0));
}

TEST_CASE("evaluation report") {
  const Polygon block = rect(0, 0, 100, 60);
  EvaluationInput in;
  in.id = "b0";
  in.generated = {block, {rect(10, 10, 20, 20), rect(15, 10, 25, 20)}};
  in.reference = Layout{block, {rect(10, 10, 20, 20)}};
  const EvaluationReport r = evaluate({in});
  CHECK(r.blocks == 1);
  CHECK(r.overlap == doctest::Approx(25.0));
  REQUIRE(r.l_sim);
  REQUIRE(r.coverage_error);
  CHECK(*r.coverage_error == doctest::Approx(100.0 / 6000 * 100));
  CHECK_FALSE(r.position_error);
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["overlap"].get<double>() == doctest::Approx(25.0));
  CHECK(j["per_block"][0]["id"] == "b0");
  CHECK(j["position_error"].is_null());
}
