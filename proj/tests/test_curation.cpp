#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "roveval/curation.hpp"
#include "roveval/errors.hpp"
#include "roveval/splitmix64.hpp"
#include "roveval/types.hpp"

using namespace roveval;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ToolkitError& e) {
    return e.code();
  }
  FAIL("expected a ToolkitError");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("centroid averages pixel centers") {
  // Pixels (row, col): (0,0), (0,1), (1,0) -> centers (0.5,0.5), (1.5,0.5),
  // (0.5,1.5); mean (5/6 + ...) per axis.
  const std::vector<Pixel> px = {{0, 0}, {0, 1}, {1, 0}};
  const PointD c = centroid(px);
  CHECK(c.x == doctest::Approx((0.5 + 1.5 + 0.5) / 3.0).epsilon(1e-15));
  CHECK(c.y == doctest::Approx((0.5 + 0.5 + 1.5) / 3.0).epsilon(1e-15));
  CHECK(code_of([] { centroid({}); }) == ErrorCode::EmptyInstance);
}

TEST_CASE("hull of a square block is its four corners, counter-clockwise") {
  std::vector<Pixel> px;
  for (int r = 2; r <= 4; ++r) {
    for (int c = 1; c <= 3; ++c) px.push_back({r, c});
  }
  const Polygon hull = convex_hull(px);
  REQUIRE(hull.size() == 4);
  // Corner pixel centers.
  CHECK(hull[0].x == 1.5);
  CHECK(hull[0].y == 2.5);
  CHECK(oracle::doubled_area2(hull) > 0);  // CCW in the value plane
  for (const Pixel& p : px) {
    CHECK(oracle::hull_contains(
        hull, PointD{p.col + 0.5, p.row + 0.5}));
  }
}

TEST_CASE("hull degenerates gracefully") {
  const Polygon point = convex_hull({{3, 7}});
  REQUIRE(point.size() == 1);
  CHECK(point[0].x == 7.5);
  CHECK(point[0].y == 3.5);

  // Collinear diagonal set: the hull is the extreme segment.
  const Polygon segment = convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  REQUIRE(segment.size() == 2);
  CHECK(segment[0].x == 0.5);
  CHECK(segment[1].x == 3.5);
}

TEST_CASE("random hulls contain every input point and are convex") {
  SplitMix64 rng(13579);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 40);
    std::vector<Pixel> px;
    for (int i = 0; i < n; ++i) {
      px.push_back({static_cast<int>(rng.next() % 20),
                    static_cast<int>(rng.next() % 20)});
    }
    const Polygon hull = convex_hull(px);
    REQUIRE(!hull.empty());
    for (const Pixel& p : px) {
      CHECK(oracle::hull_contains(hull, PointD{p.col + 0.5, p.row + 0.5}));
    }
    if (hull.size() >= 3) {
      CHECK(oracle::doubled_area2(hull) > 0);
      // Convexity: every vertex triple turns left (strictly, since collinear
      // interior points are removed).
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto a = oracle::doubled(hull[i]);
        const auto b = oracle::doubled(hull[(i + 1) % hull.size()]);
        const auto c = oracle::doubled(hull[(i + 2) % hull.size()]);
        CHECK(oracle::cross3(a, b, c) > 0);
      }
      // Hull vertices are input pixel centers.
      for (const PointD& v : hull) {
        const bool found = std::any_of(px.begin(), px.end(), [&](const Pixel& p) {
          return p.col + 0.5 == v.x && p.row + 0.5 == v.y;
        });
        CHECK(found);
      }
    }
  }
}

TEST_CASE("on_road uses the pixel containing the point") {
  BinaryMask road = BinaryMask::filled(4, 4, false);
  road.set(2, 1, true);
  CHECK(on_road({2.5, 1.5}, road));
  CHECK(on_road({2.0, 1.0}, road));     // floor lands on the same pixel
  CHECK_FALSE(on_road({1.9, 1.5}, road));
  CHECK_FALSE(on_road({-0.5, 1.5}, road));  // out of bounds is never road
  CHECK_FALSE(on_road({2.5, 4.2}, road));
}

TEST_CASE("hull road overlap counts road centers inside the hull") {
  BinaryMask road = BinaryMask::filled(6, 6, true);
  std::vector<Pixel> px;
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 3; ++c) px.push_back({r, c});
  }
  const Polygon hull = convex_hull(px);
  // All 9 pixel centers of the block are inside or on the hull.
  CHECK(hull_road_overlap(hull, road) == 9);
  BinaryMask no_road = BinaryMask::filled(6, 6, false);
  CHECK(hull_road_overlap(hull, no_road) == 0);
}

TEST_CASE("filtering partitions instances and is idempotent") {
  // 8x8 road strip in rows 3..5. Instances: 1 = 2x2 on road, 2 = single
  // pixel on road (too small), 3 = 2x2 off road, 4 = 2x2 straddling with
  // centroid on road.
  BinaryMask road = BinaryMask::filled(8, 8, false);
  for (int r = 3; r <= 5; ++r) {
    for (int c = 0; c < 8; ++c) road.set(c, r, true);
  }
  InstanceMap inst = InstanceMap::filled(8, 8, 0);
  inst.at(1, 3) = inst.at(2, 3) = inst.at(1, 4) = inst.at(2, 4) = 1;
  inst.at(5, 4) = 2;
  inst.at(6, 0) = inst.at(7, 0) = inst.at(6, 1) = inst.at(7, 1) = 3;
  // rows 2..3: centroid row = 3.0 -> pixel row 3 = road
  inst.at(4, 2) = inst.at(5, 2) = inst.at(4, 3) = inst.at(5, 3) = 4;

  const auto [filtered, report] = filter_instances(inst, road, 2);
  CHECK(report.kept == std::vector<std::uint16_t>{1, 4});
  CHECK(report.removed_small == std::vector<std::uint16_t>{2});
  CHECK(report.removed_off_road == std::vector<std::uint16_t>{3});

  // Survivors keep pixels, the removed become 0.
  CHECK(filtered.at(1, 3) == 1);
  CHECK(filtered.at(5, 4) == 0);
  CHECK(filtered.at(6, 0) == 0);
  CHECK(filtered.at(4, 2) == 4);

  const auto [twice, report2] = filter_instances(filtered, road, 2);
  CHECK(twice.ids == filtered.ids);
  CHECK(report2.kept == report.kept);
  CHECK(report2.removed_small.empty());
  CHECK(report2.removed_off_road.empty());

  // Per-instance records are sorted by id and carry the partition flags.
  REQUIRE(report.per_instance.size() == 4);
  CHECK(report.per_instance[0].id == 1);
  CHECK(report.per_instance[0].on_road);
  CHECK(report.per_instance[2].id == 3);
  CHECK_FALSE(report.per_instance[2].on_road);
}

TEST_CASE("small instances are reported as small even when also off road") {
  BinaryMask road = BinaryMask::filled(4, 4, false);  // no road at all
  InstanceMap inst = InstanceMap::filled(4, 4, 0);
  inst.at(0, 0) = 9;
  const auto [filtered, report] = filter_instances(inst, road, 5);
  CHECK(report.removed_small == std::vector<std::uint16_t>{9});
  CHECK(report.removed_off_road.empty());
  CHECK(filtered.at(0, 0) == 0);
}

TEST_CASE("profile thresholds") {
  CHECK(profile_min_size("lidarsod") == 100);
  CHECK(profile_min_size("sos") == 225);
  CHECK(profile_min_size("lostandfound") == 225);
  CHECK(profile_min_size("asro") == 0);
  CHECK(code_of([] { profile_min_size("unknown"); }) ==
        ErrorCode::SchemaViolation);
}

TEST_CASE("profile thresholds remove instances strictly below the cut") {
  // 100-pixel instance survives the lidarsod profile; 99 pixels does not.
  BinaryMask road = BinaryMask::filled(30, 30, true);
  InstanceMap inst = InstanceMap::filled(30, 30, 0);
  int placed = 0;
  for (int r = 0; r < 10 && placed < 100; ++r) {
    for (int c = 0; c < 10 && placed < 100; ++c) {
      inst.at(c, r) = 1;
      ++placed;
    }
  }
  placed = 0;
  for (int r = 15; r < 25 && placed < 99; ++r) {
    for (int c = 15; c < 25 && placed < 99; ++c) {
      inst.at(c, r) = 2;
      ++placed;
    }
  }
  const auto [filtered, report] =
      filter_instances(inst, road, profile_min_size("lidarsod"));
  CHECK(report.kept == std::vector<std::uint16_t>{1});
  CHECK(report.removed_small == std::vector<std::uint16_t>{2});
}

TEST_CASE("size histogram bins right-open intervals") {
  InstanceMap inst = InstanceMap::filled(10, 2, 0);
  // Sizes: id 1 -> 3 px, id 2 -> 5 px, id 3 -> 10 px.
  for (int i = 0; i < 3; ++i) inst.at(i, 0) = 1;
  for (int i = 3; i < 8; ++i) inst.at(i, 0) = 2;
  for (int i = 0; i < 10; ++i) inst.at(i, 1) = 3;
  const std::vector<std::int64_t> counts =
      size_histogram(inst, {1, 5, 10, 100});
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] == 1);  // [1, 5): the 3-pixel instance
  CHECK(counts[1] == 1);  // [5, 10): the 5-pixel instance
  CHECK(counts[2] == 1);  // [10, 100): the 10-pixel instance
  CHECK(code_of([&] { size_histogram(inst, {5}); }) == ErrorCode::BadBinEdges);
  CHECK(code_of([&] { size_histogram(inst, {5, 5, 6}); }) ==
        ErrorCode::BadBinEdges);
}

TEST_CASE("average location map is the per-pixel instance frequency") {
  InstanceMap a = InstanceMap::filled(2, 1, 0);
  a.at(0, 0) = 1;
  InstanceMap b = InstanceMap::filled(2, 1, 0);
  b.at(0, 0) = 2;
  InstanceMap c = InstanceMap::filled(2, 1, 0);
  c.at(1, 0) = 1;
  const ScoreMap m = average_location_map({a, b, c});
  CHECK(m.at(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(m.at(1, 0) == doctest::Approx(1.0 / 3.0));
}
