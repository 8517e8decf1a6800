#include "roveval/curation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "roveval/errors.hpp"

namespace roveval {

namespace {

// Doubled pixel-center coordinates: integers, so orientation is exact.
struct Point2 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

Point2 doubled(const Pixel& p) {
  return Point2{2 * static_cast<std::int64_t>(p.col) + 1,
                2 * static_cast<std::int64_t>(p.row) + 1};
}

PointD halved(const Point2& p) {
  return PointD{static_cast<double>(p.x) / 2.0, static_cast<double>(p.y) / 2.0};
}

std::int64_t cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Signed doubled-coordinate orientation of point p against hull edge a->b:
// > 0 left of the edge, 0 on it, < 0 right of it.
std::int64_t edge_side(const PointD& a, const PointD& b, const PointD& p) {
  const auto dx = [](double v) { return static_cast<std::int64_t>(std::llround(2.0 * v)); };
  const Point2 o{dx(a.x), dx(a.y)};
  const Point2 u{dx(b.x), dx(b.y)};
  const Point2 q{dx(p.x), dx(p.y)};
  return cross(o, u, q);
}

}  // namespace

PointD centroid(const std::vector<Pixel>& pixels) {
  if (pixels.empty()) {
    fail(ErrorCode::EmptyInstance, "centroid of an empty pixel set");
  }
  std::int64_t sx = 0;
  std::int64_t sy = 0;
  for (const Pixel& p : pixels) {
    sx += p.col;
    sy += p.row;
  }
  const double n = static_cast<double>(pixels.size());
  return PointD{static_cast<double>(sx) / n + 0.5,
                static_cast<double>(sy) / n + 0.5};
}

Polygon convex_hull(const std::vector<Pixel>& pixels) {
  if (pixels.empty()) {
    fail(ErrorCode::EmptyInstance, "convex hull of an empty pixel set");
  }
  std::vector<Point2> pts;
  pts.reserve(pixels.size());
  for (const Pixel& p : pixels) pts.push_back(doubled(p));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  if (pts.size() == 1) {
    return {halved(pts[0])};
  }

  // Monotone chain. Strict turns only, so collinear interior points drop out.
  const auto build = [&](auto begin, auto end) {
    std::vector<Point2> chain;
    for (auto it = begin; it != end; ++it) {
      while (chain.size() >= 2 &&
             cross(chain[chain.size() - 2], chain.back(), *it) <= 0) {
        chain.pop_back();
      }
      chain.push_back(*it);
    }
    return chain;
  };
  const std::vector<Point2> lower = build(pts.begin(), pts.end());
  const std::vector<Point2> upper = build(pts.rbegin(), pts.rend());

  std::vector<Point2> hull(lower.begin(), lower.end() - 1);
  hull.insert(hull.end(), upper.begin(), upper.end() - 1);
  if (hull.size() < 2) {
    // Collinear input: both chains collapse to the extremes.
    hull = {pts.front(), pts.back()};
  }

  Polygon out;
  out.reserve(hull.size());
  for (const Point2& p : hull) out.push_back(halved(p));
  return out;
}

bool on_road(const PointD& point, const BinaryMask& road) {
  const double fx = std::floor(point.x);
  const double fy = std::floor(point.y);
  if (fx < 0.0 || fy < 0.0 || fx >= road.width || fy >= road.height) {
    return false;
  }
  return road.at(static_cast<int>(fx), static_cast<int>(fy));
}

std::int64_t hull_road_overlap(const Polygon& hull, const BinaryMask& road) {
  if (hull.empty()) return 0;
  double min_x = hull[0].x, max_x = hull[0].x;
  double min_y = hull[0].y, max_y = hull[0].y;
  for (const PointD& p : hull) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int row_lo = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
  const int row_hi = std::min(road.height - 1, static_cast<int>(std::ceil(max_y)));
  const int col_lo = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
  const int col_hi = std::min(road.width - 1, static_cast<int>(std::ceil(max_x)));

  std::int64_t count = 0;
  for (int r = row_lo; r <= row_hi; ++r) {
    for (int c = col_lo; c <= col_hi; ++c) {
      if (!road.at(c, r)) continue;
      const PointD center{c + 0.5, r + 0.5};
      bool inside = true;
      if (hull.size() == 1) {
        inside = hull[0].x == center.x && hull[0].y == center.y;
      } else if (hull.size() == 2) {
        inside = edge_side(hull[0], hull[1], center) == 0 &&
                 center.x >= std::min(hull[0].x, hull[1].x) &&
                 center.x <= std::max(hull[0].x, hull[1].x) &&
                 center.y >= std::min(hull[0].y, hull[1].y) &&
                 center.y <= std::max(hull[0].y, hull[1].y);
      } else {
        for (std::size_t i = 0; i < hull.size() && inside; ++i) {
          const PointD& a = hull[i];
          const PointD& b = hull[(i + 1) % hull.size()];
          inside = edge_side(a, b, center) >= 0;
        }
      }
      if (inside) ++count;
    }
  }
  return count;
}

std::pair<InstanceMap, CurationReport> filter_instances(const InstanceMap& inst,
                                                        const BinaryMask& road,
                                                        std::int64_t min_size) {
  require_same_dims(inst, road, "instance map", "road mask");

  std::map<std::uint16_t, std::vector<Pixel>> by_id;
  for (int r = 0; r < inst.height; ++r) {
    for (int c = 0; c < inst.width; ++c) {
      const std::uint16_t id = inst.at(c, r);
      if (id != 0) by_id[id].push_back(Pixel{r, c});
    }
  }

  CurationReport report;
  std::vector<bool> keep_id(65536, false);
  for (const auto& [id, pixels] : by_id) {
    InstanceRecord rec;
    rec.id = id;
    rec.size = static_cast<std::int64_t>(pixels.size());
    rec.center = centroid(pixels);
    rec.on_road = on_road(rec.center, road);
    rec.hull = convex_hull(pixels);
    rec.hull_road_overlap_px = hull_road_overlap(rec.hull, road);
    report.per_instance.push_back(rec);

    if (rec.size < min_size) {
      report.removed_small.push_back(id);
    } else if (!rec.on_road) {
      report.removed_off_road.push_back(id);
    } else {
      report.kept.push_back(id);
      keep_id[id] = true;
    }
  }

  InstanceMap filtered = inst;
  for (std::uint16_t& id : filtered.ids) {
    if (id != 0 && !keep_id[id]) id = 0;
  }
  return {std::move(filtered), std::move(report)};
}

std::int64_t profile_min_size(const std::string& profile) {
  if (profile == "lidarsod") return 100;
  if (profile == "sos" || profile == "lostandfound") return 225;
  if (profile == "asro") return 0;
  fail(ErrorCode::SchemaViolation,
       "unknown curation profile '" + profile +
           "' (expected lidarsod, sos, lostandfound, or asro)");
}

std::vector<std::int64_t> size_histogram(const InstanceMap& inst,
                                         const std::vector<std::int64_t>& edges) {
  if (edges.size() < 2) {
    fail(ErrorCode::BadBinEdges, "size histogram needs at least two edges");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      fail(ErrorCode::BadBinEdges, "size histogram edges must strictly increase");
    }
  }

  std::map<std::uint16_t, std::int64_t> sizes;
  for (std::uint16_t id : inst.ids) {
    if (id != 0) sizes[id] += 1;
  }

  std::vector<std::int64_t> counts(edges.size() - 1, 0);
  for (const auto& [id, size] : sizes) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), size);
    if (it == edges.begin() || it == edges.end()) continue;
    counts[static_cast<std::size_t>(it - edges.begin()) - 1] += 1;
  }
  return counts;
}

ScoreMap average_location_map(const std::vector<InstanceMap>& frames) {
  if (frames.empty()) {
    fail(ErrorCode::EmptyEvaluationDomain, "average location of zero frames");
  }
  const int w = frames[0].width;
  const int h = frames[0].height;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(w) * h, 0);
  for (const InstanceMap& f : frames) {
    require_same_dims(f, frames[0], "instance map", "first frame");
    for (std::size_t i = 0; i < f.ids.size(); ++i) {
      if (f.ids[i] != 0) counts[i] += 1;
    }
  }
  ScoreMap map;
  map.width = w;
  map.height = h;
  map.scores.resize(counts.size());
  const double n = static_cast<double>(frames.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    map.scores[i] = static_cast<float>(static_cast<double>(counts[i]) / n);
  }
  return map;
}

}  // namespace roveval
