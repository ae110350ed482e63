#include "infoforge/layout_recommender.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace infoforge {
namespace {

// Stroke spacing, in fit_unit coordinates, the corner detector expects.
constexpr double kSketchSpacing = 0.01;
constexpr int kStrokeSmoothing = 5;
// Strokes with at least this many samples per position are pointer streams.
constexpr int kDenseSamplesPerVg = 8;
// Turn threshold for the second, n-capped detection pass.
constexpr double kRelaxedTurnDeg = 10.0;

bool by_score(const LayoutScore& a, const LayoutScore& b) {
  if (a.e_l != b.e_l) return a.e_l > b.e_l;
  return a.layout_id < b.layout_id;
}

bool by_distance(const SketchMatch& a, const SketchMatch& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.layout_id < b.layout_id;
}

// Completes `corners` to n positions along the stroke. Missing positions go
// to the gap with the largest arc length per position, then are spaced
// evenly by arc length inside each gap. Corners are mapped to their nearest
// samples on `even`, in order.
PointList fill_gaps(const PointList& even, const PointList& corners, int n) {
  std::vector<double> arc(even.size(), 0.0);
  for (std::size_t i = 1; i < even.size(); ++i) arc[i] = arc[i - 1] + (even[i] - even[i - 1]).norm();
  std::vector<std::size_t> at;
  std::size_t from = 0;
  for (const auto& c : corners) {
    std::size_t best = from;
    for (std::size_t i = from; i < even.size(); ++i) {
      if ((even[i] - c).squaredNorm() < (even[best] - c).squaredNorm()) best = i;
    }
    at.push_back(best);
    from = best;
  }
  at.front() = 0;
  at.back() = even.size() - 1;

  const std::size_t gaps = at.size() - 1;
  std::vector<int> extra(gaps, 0);
  for (int added = static_cast<int>(corners.size()); added < n; ++added) {
    std::size_t pick = 0;
    double pick_len = -1;
    for (std::size_t g = 0; g < gaps; ++g) {
      const double len = (arc[at[g + 1]] - arc[at[g]]) / (extra[g] + 1);
      if (len > pick_len) {
        pick_len = len;
        pick = g;
      }
    }
    ++extra[pick];
  }

  PointList out;
  for (std::size_t g = 0; g < gaps; ++g) {
    out.push_back(corners[g]);
    const double a = arc[at[g]];
    const double len = arc[at[g + 1]] - a;
    std::size_t i = at[g];
    for (int e = 1; e <= extra[g]; ++e) {
      const double target = a + len * e / (extra[g] + 1);
      while (i + 1 < at[g + 1] && arc[i + 1] <= target) ++i;
      const double seg = arc[i + 1] - arc[i];
      const double t = seg > 0 ? std::clamp((target - arc[i]) / seg, 0.0, 1.0) : 0.0;
      out.push_back(even[i] + (even[i + 1] - even[i]) * t);
    }
  }
  out.push_back(corners.back());
  return out;
}

}  // namespace

void EnergyWeights::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("alpha must be in [0,1], got {}", alpha));
  }
}

void PivotPlacement::validate() const {
  const double eps = 1e-9;
  if (!bbox.valid() || bbox.x < -eps || bbox.y < -eps || bbox.right() > 1 + eps ||
      bbox.bottom() > 1 + eps) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("pivot box ({}, {}, {}, {}) must be non-empty and inside the canvas",
                            bbox.x, bbox.y, bbox.w, bbox.h));
  }
}

Point pivot_center(const BBox& pivot) { return pivot.center(); }

int energy_overlap(const PointList& points, const std::optional<PivotPlacement>& pivot) {
  if (!pivot) return 1;
  for (const auto& p : points) {
    if (pivot->bbox.contains(p)) return 0;
  }
  return 1;
}

double energy_coverage(const PointList& points, bool padded) {
  if (!padded) return std::clamp(polygon_area(convex_hull(points)), 0.0, 1.0);
  const double h = kFootprintSide / 2;
  PointList corners;
  corners.reserve(points.size() * 4);
  for (const auto& p : points) {
    corners.emplace_back(p.x() - h, p.y() - h);
    corners.emplace_back(p.x() + h, p.y() - h);
    corners.emplace_back(p.x() + h, p.y() + h);
    corners.emplace_back(p.x() - h, p.y() + h);
  }
  return std::clamp(polygon_area(convex_hull(corners)), 0.0, 1.0);
}

Uniformity energy_uniformity(const PointList& points, const Point& center) {
  Uniformity u;
  if (points.empty()) return u;
  std::vector<double> d;
  d.reserve(points.size());
  for (const auto& p : points) d.push_back((p - center).norm() / std::sqrt(2.0));
  const double n = static_cast<double>(d.size());
  double mean = 0;
  for (double v : d) mean += v;
  mean /= n;
  double var = 0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= n;
  u.e_u_raw = var;
  u.uniformity = 1.0 - std::min(1.0, 4.0 * var);
  u.mean_distance = mean;
  return u;
}

LayoutScore score_layout(const VifLayout& layout, const std::optional<PivotPlacement>& pivot,
                         const EnergyWeights& weights) {
  LayoutScore s;
  s.layout_id = layout.id;
  s.vg_count = layout.vg_count();
  s.e_o = energy_overlap(layout.points, pivot);
  s.e_c = energy_coverage(layout.points, true);
  const Point center = pivot ? pivot_center(pivot->bbox) : Point(0.5, 0.5);
  const auto u = energy_uniformity(layout.points, center);
  s.e_u_raw = u.e_u_raw;
  s.uniformity = u.uniformity;
  s.mean_distance = u.mean_distance;
  s.e_l = s.e_o * (weights.alpha * s.e_c + (1.0 - weights.alpha) * s.uniformity);
  return s;
}

LayoutRanking rank_layouts(const AssetStore& store, const std::optional<PivotPlacement>& pivot,
                           const LayoutQuery& query) {
  if (query.n_vgs < 1) throw Error(ErrorCode::kInvalidArgument, "n_vgs must be at least 1");
  if (query.top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");
  query.weights.validate();
  if (pivot) pivot->validate();

  LayoutRanking out;
  for (const auto* l : store.layouts_with_count(query.n_vgs)) {
    out.scores.push_back(score_layout(*l, pivot, query.weights));
  }
  if (out.scores.empty() && query.allow_truncation) {
    for (const auto& l : store.layouts()) {
      if (l.vg_count() <= query.n_vgs) continue;
      VifLayout cut = l;
      cut.points.resize(query.n_vgs);
      auto s = score_layout(cut, pivot, query.weights);
      s.truncated = true;
      out.scores.push_back(std::move(s));
    }
    out.truncated = !out.scores.empty();
  }
  if (out.scores.empty()) {
    throw Error(ErrorCode::kNoCandidates,
                fmt::format("no layout has {} points", query.n_vgs));
  }
  std::sort(out.scores.begin(), out.scores.end(), by_score);
  if (static_cast<int>(out.scores.size()) > query.top_k) out.scores.resize(query.top_k);
  return out;
}

PointList fit_unit(const PointList& points) {
  if (points.empty()) return {};
  Point lo = points[0];
  Point hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  const double s = extent > 1e-12 ? 1.0 / extent : 1.0;
  const Point mid = (lo + hi) / 2;
  PointList out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back((p - mid) * s + Point(0.5, 0.5));
  return out;
}

PointList estimate_positions(const PointList& stroke, int n_vgs) {
  if (n_vgs < 2) throw Error(ErrorCode::kInvalidArgument, "sketch matching needs n_vgs >= 2");
  const PointList distinct = dedupe_consecutive(stroke);
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kStrokeTooShort, "stroke needs at least 2 distinct points");
  }
  // Dense pointer samples carry pen jitter at their own rate; smooth them
  // before arc-length resampling inflates it. Sparse strokes are vertices.
  const bool dense = distinct.size() >= static_cast<std::size_t>(kDenseSamplesPerVg * n_vgs);
  const PointList unit =
      fit_unit(dense ? moving_average(distinct, kStrokeSmoothing) : distinct);
  const int samples = std::max(
      2, static_cast<int>(std::ceil(polyline_length(unit) / kSketchSpacing)) + 1);
  const PointList even = resample_to_n(unit, samples);

  const PointList strict = dominant_points(even);
  if (static_cast<int>(strict.size()) == n_vgs) return strict;
  DominantPointOptions capped;
  capped.max_points = n_vgs;
  if (static_cast<int>(strict.size()) > n_vgs) return dominant_points(even, capped);
  capped.min_turn_deg = kRelaxedTurnDeg;
  const PointList relaxed = dominant_points(even, capped);
  if (static_cast<int>(relaxed.size()) == n_vgs) return relaxed;
  return fill_gaps(even, relaxed.size() > strict.size() ? relaxed : strict, n_vgs);
}

double shape_distance(const PointList& a, const PointList& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "shape_distance needs equal, non-empty point counts");
  }
  const PointList fa = fit_unit(a);
  const PointList fb = fit_unit(b);
  const std::size_t n = fa.size();
  double fwd = 0;
  double rev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    fwd += (fa[i] - fb[i]).norm();
    rev += (fa[i] - fb[n - 1 - i]).norm();
  }
  return std::min(fwd, rev) / static_cast<double>(n);
}

SketchResult match_sketch(const AssetStore& store, const PointList& stroke, int n_vgs, int top_k,
                          const std::optional<PivotPlacement>& pivot) {
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");
  if (pivot) pivot->validate();
  SketchResult out;
  out.positions = estimate_positions(stroke, n_vgs);
  const auto candidates = store.layouts_with_count(n_vgs);
  if (candidates.empty()) {
    throw Error(ErrorCode::kNoCandidates, fmt::format("no layout has {} points", n_vgs));
  }
  for (const auto* l : candidates) {
    SketchMatch m{l->id, shape_distance(out.positions, l->points)};
    (energy_overlap(l->points, pivot) ? out.matches : out.gated_out).push_back(std::move(m));
  }
  std::sort(out.matches.begin(), out.matches.end(), by_distance);
  std::sort(out.gated_out.begin(), out.gated_out.end(), by_distance);
  if (static_cast<int>(out.matches.size()) > top_k) out.matches.resize(top_k);
  return out;
}

}  // namespace infoforge
