#pragma once

// Planar primitives used by layout scoring, sketch matching and placement.
//
// Coordinates are canvas fractions: origin top-left, y grows downward, the
// canvas spans [0,1]^2. Everything here is templated on the scalar type and
// works on Eigen fixed-size vectors.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "infoforge/error.hpp"

namespace infoforge {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;
using Point = Point2<double>;

template <typename Scalar>
using PointList2 = std::vector<Point2<Scalar>>;
using PointList = PointList2<double>;

/// Axis-aligned box given by its top-left corner and extent.
template <typename Scalar>
struct BBox2 {
  Scalar x{0};
  Scalar y{0};
  Scalar w{0};
  Scalar h{0};

  Point2<Scalar> center() const { return {x + w / 2, y + h / 2}; }
  Scalar right() const { return x + w; }
  Scalar bottom() const { return y + h; }
  Scalar area() const { return w * h; }

  /// Closed containment: points on the boundary count as inside.
  bool contains(const Point2<Scalar>& p) const {
    return p.x() >= x && p.x() <= right() && p.y() >= y && p.y() <= bottom();
  }

  bool within_unit() const {
    return x >= 0 && y >= 0 && right() <= 1 && bottom() <= 1;
  }

  bool valid() const { return w > 0 && h > 0; }

  friend bool operator==(const BBox2&, const BBox2&) = default;
};
using BBox = BBox2<double>;

template <typename Scalar>
Scalar intersection_area(const BBox2<Scalar>& a, const BBox2<Scalar>& b) {
  const Scalar iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const Scalar ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0 || ih <= 0) return Scalar(0);
  return iw * ih;
}

template <typename Scalar>
Scalar cross(const Point2<Scalar>& o, const Point2<Scalar>& a,
             const Point2<Scalar>& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Convex hull by monotone chain. Vertices come back with positive signed
/// (shoelace) area; collinear input yields the two extreme points and a
/// single distinct point yields itself.
template <typename Scalar>
PointList2<Scalar> convex_hull(PointList2<Scalar> points) {
  std::sort(points.begin(), points.end(),
            [](const Point2<Scalar>& a, const Point2<Scalar>& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 2) return points;

  PointList2<Scalar> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Shoelace area; zero for points and segments.
template <typename Scalar>
Scalar polygon_area(const PointList2<Scalar>& polygon) {
  if (polygon.size() < 3) return Scalar(0);
  Scalar twice = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2;
}

/// Inside-or-on test against a hull produced by convex_hull.
template <typename Scalar>
bool in_convex_polygon(const PointList2<Scalar>& hull, const Point2<Scalar>& p,
                       Scalar eps = Scalar(1e-12)) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return (hull[0] - p).norm() <= eps;
  if (hull.size() == 2) {
    const Point2<Scalar> d = hull[1] - hull[0];
    const Scalar len = d.norm();
    const Scalar t = (p - hull[0]).dot(d) / (len * len);
    return std::abs(cross(hull[0], hull[1], p)) <= eps * len && t >= -eps &&
           t <= 1 + eps;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (cross(hull[i], hull[(i + 1) % hull.size()], p) < -eps) return false;
  }
  return true;
}

template <typename Scalar>
Scalar polyline_length(const PointList2<Scalar>& points) {
  Scalar total = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += (points[i] - points[i - 1]).norm();
  }
  return total;
}

/// Drops consecutive duplicates so every segment has positive length.
template <typename Scalar>
PointList2<Scalar> dedupe_consecutive(const PointList2<Scalar>& points) {
  PointList2<Scalar> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  return out;
}

/// n points equally spaced by arc length along the polyline through
/// `points`. First and last input points are preserved exactly.
template <typename Scalar>
PointList2<Scalar> resample_to_n(const PointList2<Scalar>& points, int n) {
  if (points.size() < 2 || n < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "resample_to_n needs at least 2 points and n >= 2");
  }
  std::vector<Scalar> cumulative(points.size(), Scalar(0));
  for (std::size_t i = 1; i < points.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + (points[i] - points[i - 1]).norm();
  }
  const Scalar total = cumulative.back();
  PointList2<Scalar> out;
  out.reserve(n);
  out.push_back(points.front());
  std::size_t seg = 1;
  for (int j = 1; j < n - 1; ++j) {
    const Scalar target = total * Scalar(j) / Scalar(n - 1);
    while (seg < points.size() - 1 && cumulative[seg] < target) ++seg;
    const Scalar seg_len = cumulative[seg] - cumulative[seg - 1];
    const Scalar t = seg_len > 0 ? (target - cumulative[seg - 1]) / seg_len : Scalar(0);
    out.push_back(points[seg - 1] + t * (points[seg] - points[seg - 1]));
  }
  out.push_back(points.back());
  return out;
}

/// Centered moving average with the window truncated at the ends.
/// Endpoints are left untouched.
template <typename Scalar>
PointList2<Scalar> moving_average(const PointList2<Scalar>& points, int window) {
  const int half = window / 2;
  const int m = static_cast<int>(points.size());
  PointList2<Scalar> out(points);
  for (int i = 1; i < m - 1; ++i) {
    const int r = std::min({half, i, m - 1 - i});
    Point2<Scalar> sum = Point2<Scalar>::Zero();
    for (int j = i - r; j <= i + r; ++j) sum += points[j];
    out[i] = sum / Scalar(2 * r + 1);
  }
  return out;
}

struct DominantPointOptions {
  /// Moving-average window applied before detection.
  int smoothing_window = 5;
  /// Smallest region of support considered, in samples. Smoothing spreads a
  /// corner over half the window on each side, so this must exceed that.
  int min_support = 4;
  /// Largest region of support. Without a cap the chord test keeps growing
  /// across neighbouring turns of the same sign and merges them.
  int max_support = 10;
  /// Turning angle a point must reach to count as a corner.
  double min_turn_deg = 30.0;
  /// Samples on each side used to refine a corner by line intersection.
  int arm_samples = 9;
  /// Cap on returned points, endpoints included; the sharpest corners win.
  /// Zero means no cap.
  int max_points = 0;
};

namespace detail {

/// Total-least-squares line through points[lo..hi]: returns (centroid, direction).
template <typename Scalar>
std::pair<Point2<Scalar>, Point2<Scalar>> fit_line(const PointList2<Scalar>& points, int lo, int hi) {
  Point2<Scalar> mean = Point2<Scalar>::Zero();
  for (int i = lo; i <= hi; ++i) mean += points[i];
  mean /= Scalar(hi - lo + 1);
  Eigen::Matrix<Scalar, 2, 2> scatter = Eigen::Matrix<Scalar, 2, 2>::Zero();
  for (int i = lo; i <= hi; ++i) {
    const Point2<Scalar> d = points[i] - mean;
    scatter += d * d.transpose();
  }
  // Principal direction of a symmetric 2x2 matrix in closed form.
  const Scalar angle = Scalar(0.5) * std::atan2(2 * scatter(0, 1), scatter(0, 0) - scatter(1, 1));
  return {mean, Point2<Scalar>(std::cos(angle), std::sin(angle))};
}

}  // namespace detail

/// Sharpens a detected corner at `c` by intersecting lines fitted to the
/// incoming arm [lo, c] and the outgoing arm [c, hi]. Falls back to the
/// sample itself when the arms are too short, nearly parallel, or the
/// intersection lands away from the sample.
template <typename Scalar>
Point2<Scalar> refine_corner(const PointList2<Scalar>& points, int lo, int c, int hi) {
  if (c - lo < 2 || hi - c < 2) return points[c];
  // The sample farthest from the lo-hi chord is the best discrete corner.
  Scalar best = -1;
  for (int i = lo + 1; i < hi; ++i) {
    const Scalar d = std::abs(cross(points[lo], points[hi], points[i]));
    if (d > best) {
      best = d;
      c = i;
    }
  }
  if (c - lo < 2 || hi - c < 2) return points[c];
  const auto [p0, d0] = detail::fit_line(points, lo, c);
  const auto [p1, d1] = detail::fit_line(points, c, hi);
  const Scalar denom = d0.x() * d1.y() - d0.y() * d1.x();
  if (std::abs(denom) < Scalar(0.5)) return points[c];
  const Point2<Scalar> w = p1 - p0;
  const Scalar t = (w.x() * d1.y() - w.y() * d1.x()) / denom;
  const Point2<Scalar> hit = p0 + t * d0;
  const Scalar reach = std::min((points[lo] - points[c]).norm(), (points[hi] - points[c]).norm());
  if ((hit - points[c]).norm() > Scalar(0.5) * reach) return points[c];
  return hit;
}

/// Teh-Chin dominant points of an open stroke, endpoints included.
///
/// Each interior sample gets a region of support k (grown while the chord
/// keeps lengthening and the relative chord distance keeps rising); its
/// significance is the k-cosine over that region. Non-maximum suppression
/// inside half the region keeps local maxima, and a turning-angle floor
/// rejects the nearly straight ones. Detection runs on the smoothed stroke
/// but the returned points are the original samples.
template <typename Scalar>
PointList2<Scalar> dominant_points(const PointList2<Scalar>& stroke,
                                   const DominantPointOptions& options = {}) {
  const PointList2<Scalar> raw = dedupe_consecutive(stroke);
  if (raw.size() < 2) {
    throw Error(ErrorCode::kStrokeTooShort,
                "stroke needs at least 2 distinct points");
  }
  const int m = static_cast<int>(raw.size());
  if (m == 2) return raw;

  const PointList2<Scalar> pts =
      options.smoothing_window > 1 ? moving_average(raw, options.smoothing_window) : raw;

  auto chord = [&](int i, int k, Scalar& length, Scalar& dist) {
    const Point2<Scalar> a = pts[i - k];
    const Point2<Scalar> b = pts[i + k];
    length = (b - a).norm();
    dist = length > 0 ? cross(a, b, pts[i]) / length : (pts[i] - a).norm();
  };

  std::vector<int> support(m, 0);
  std::vector<Scalar> cosine(m, Scalar(-1));
  for (int i = 1; i < m - 1; ++i) {
    const int k_max = std::min({i, m - 1 - i, std::max(options.min_support, options.max_support)});
    int k = std::min(options.min_support, k_max);
    while (k < k_max) {
      Scalar l0, d0, l1, d1;
      chord(i, k, l0, d0);
      chord(i, k + 1, l1, d1);
      if (l0 >= l1) break;
      if (l0 > 0 && l1 > 0) {
        const Scalar r0 = d0 / l0;
        const Scalar r1 = d1 / l1;
        if ((d0 > 0 && r0 >= r1) || (d0 < 0 && r0 <= r1)) break;
      }
      ++k;
    }
    support[i] = k;
    const Point2<Scalar> a = pts[i - k] - pts[i];
    const Point2<Scalar> b = pts[i + k] - pts[i];
    const Scalar na = a.norm();
    const Scalar nb = b.norm();
    cosine[i] = (na > 0 && nb > 0) ? std::clamp(a.dot(b) / (na * nb), Scalar(-1), Scalar(1))
                                   : Scalar(-1);
  }

  const Scalar min_cos =
      std::cos(std::numbers::pi_v<Scalar> - Scalar(options.min_turn_deg) *
                                                std::numbers::pi_v<Scalar> / 180);
  const int edge = std::max(1, options.min_support);
  std::vector<int> keep;
  keep.push_back(0);
  for (int i = edge; i < m - edge; ++i) {
    if (cosine[i] < min_cos) continue;
    const int half = std::max(1, support[i] / 2);
    bool is_max = true;
    for (int j = std::max(1, i - half); j <= std::min(m - 2, i + half) && is_max; ++j) {
      if (j == i) continue;
      // Plateaus keep their first sample.
      if (cosine[j] > cosine[i] || (j < i && cosine[j] == cosine[i])) is_max = false;
    }
    if (!is_max) continue;
    // Two survivors inside one region of support describe the same corner.
    if (keep.size() > 1 && i - keep.back() <= support[i]) {
      if (cosine[i] > cosine[keep.back()]) keep.back() = i;
      continue;
    }
    keep.push_back(i);
  }
  if (options.max_points >= 2 && static_cast<int>(keep.size()) - 1 > options.max_points - 2) {
    std::vector<int> corners(keep.begin() + 1, keep.end());
    std::stable_sort(corners.begin(), corners.end(),
                     [&](int a, int b) { return cosine[a] > cosine[b]; });
    corners.resize(options.max_points - 2);
    std::sort(corners.begin(), corners.end());
    keep.assign(1, 0);
    keep.insert(keep.end(), corners.begin(), corners.end());
  }
  keep.push_back(m - 1);

  PointList2<Scalar> out;
  out.reserve(keep.size());
  out.push_back(raw.front());
  for (std::size_t j = 1; j + 1 < keep.size(); ++j) {
    const int arm = options.arm_samples;
    const int lo = std::max(keep[j] - arm, (keep[j - 1] + keep[j] + 1) / 2);
    const int hi = std::min(keep[j] + arm, (keep[j] + keep[j + 1]) / 2);
    out.push_back(refine_corner(raw, lo, keep[j], hi));
  }
  out.push_back(raw.back());
  return out;
}

}  // namespace infoforge
