#pragma once

// Reference layout scorer, written without the library's hull or distance
// code.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "infoforge/asset_store.hpp"

namespace infoforge::oracle {

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Gift wrapping, then the shoelace formula.
inline double hull_area(std::vector<Point> pts) {
  if (pts.size() < 3) return 0;
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x() < pts[start].x() ||
        (pts[i].x() == pts[start].x() && pts[i].y() < pts[start].y())) {
      start = i;
    }
  }
  std::vector<Point> hull;
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    std::size_t next = (cur + 1) % pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double c = cross(pts[cur], pts[next], pts[i]);
      const bool farther = (pts[i] - pts[cur]).squaredNorm() > (pts[next] - pts[cur]).squaredNorm();
      if (c < 0 || (c == 0 && farther)) next = i;
    }
    cur = next;
  } while (cur != start && hull.size() <= pts.size());
  double twice = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2;
}

inline double score(const VifLayout& l, const std::optional<BBox>& pivot, double alpha) {
  int e_o = 1;
  if (pivot) {
    for (const auto& p : l.points) {
      if (p.x() >= pivot->x && p.x() <= pivot->x + pivot->w && p.y() >= pivot->y &&
          p.y() <= pivot->y + pivot->h) {
        e_o = 0;
      }
    }
  }
  std::vector<Point> corners;
  for (const auto& p : l.points) {
    for (double dx : {-0.05, 0.05}) {
      for (double dy : {-0.05, 0.05}) corners.emplace_back(p.x() + dx, p.y() + dy);
    }
  }
  const double e_c = std::min(1.0, hull_area(corners));
  const double cx = pivot ? pivot->x + pivot->w / 2 : 0.5;
  const double cy = pivot ? pivot->y + pivot->h / 2 : 0.5;
  double sum = 0;
  double sum_sq = 0;
  for (const auto& p : l.points) {
    const double d = std::hypot(p.x() - cx, p.y() - cy) / std::sqrt(2.0);
    sum += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(l.points.size());
  const double var = std::max(0.0, sum_sq / n - (sum / n) * (sum / n));
  const double uniformity = 1 - std::min(1.0, 4 * var);
  return e_o * (alpha * e_c + (1 - alpha) * uniformity);
}

}  // namespace infoforge::oracle
