#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "roveval/types.hpp"

namespace roveval {

// Image pixel by (row, col). The pixel's center point is
// (x, y) = (col + 0.5, row + 0.5), x growing rightward and y downward.
struct Pixel {
  int row = 0;
  int col = 0;
};

struct PointD {
  double x = 0.0;
  double y = 0.0;
};

using Polygon = std::vector<PointD>;

// Mean of the pixel centers. Throws EmptyInstance on an empty set.
PointD centroid(const std::vector<Pixel>& pixels);

// Monotone-chain hull over the pixels' center points, counter-clockwise in
// the (x, y) value plane, collinear interior points removed. One point or a
// collinear set come back as the point / extreme segment. Orientation tests
// run on doubled coordinates (2*col+1, 2*row+1), which are exact integers.
Polygon convex_hull(const std::vector<Pixel>& pixels);

// True iff the pixel containing the point, (floor(y), floor(x)), is road.
// Points outside the image are never on the road.
bool on_road(const PointD& point, const BinaryMask& road);

// Road pixels whose center lies inside or on the hull. Diagnostic only; the
// keep/remove decision uses the centroid.
std::int64_t hull_road_overlap(const Polygon& hull, const BinaryMask& road);

struct InstanceRecord {
  std::uint16_t id = 0;
  std::int64_t size = 0;
  PointD center;
  bool on_road = false;
  Polygon hull;
  std::int64_t hull_road_overlap_px = 0;
};

// Partition of the input ids: every id lands in exactly one of the three
// lists. per_instance is sorted by id.
struct CurationReport {
  std::vector<std::uint16_t> kept;
  std::vector<std::uint16_t> removed_small;
  std::vector<std::uint16_t> removed_off_road;
  std::vector<InstanceRecord> per_instance;
};

// Removes instances smaller than min_size, then instances whose centroid
// does not fall on the road. Survivors keep their ids and pixels; removed
// pixels become 0. Filtering the result again is a no-op.
std::pair<InstanceMap, CurationReport> filter_instances(const InstanceMap& inst,
                                                        const BinaryMask& road,
                                                        std::int64_t min_size);

// Size thresholds the benchmark profiles use: lidarsod 100, sos 225,
// lostandfound 225, asro 0 (road test only).
std::int64_t profile_min_size(const std::string& profile);

// counts[k] = number of instances with edges[k] <= size < edges[k+1].
// Edges must be strictly increasing with at least two entries.
std::vector<std::int64_t> size_histogram(const InstanceMap& inst,
                                         const std::vector<std::int64_t>& edges);

// Per-pixel fraction of frames in which the pixel belongs to any instance.
ScoreMap average_location_map(const std::vector<InstanceMap>& frames);

}  // namespace roveval
