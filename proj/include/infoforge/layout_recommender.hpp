#pragma once

// Layout ranking by the energy functional and sketch-based retrieval.
//
//   E_L = E_O * (alpha * E_C + (1 - alpha) * uniformity)
//
// E_O gates layouts touching the pivot box, E_C is convex-hull coverage and
// uniformity = 1 - min(1, 4 * var(d_i)) where d_i is each point's distance
// to the pivot center (canvas center without a pivot) over the diagonal.
// All of it runs in normalized canvas coordinates, so canvas pixel size
// never enters.

#include <optional>
#include <string>
#include <vector>

#include "infoforge/asset_store.hpp"

namespace infoforge {

inline constexpr double kDefaultAlpha = 0.5;
/// Side of the square each point is padded to in padded coverage.
inline constexpr double kFootprintSide = 0.1;

struct EnergyWeights {
  double alpha = kDefaultAlpha;
  /// Throws Error(kInvalidArgument) unless 0 <= alpha <= 1.
  void validate() const;
};

struct PivotPlacement {
  BBox bbox;
  std::optional<std::string> graphic_ref;
  /// Throws Error(kInvalidArgument) unless the box is non-empty and inside
  /// the unit square.
  void validate() const;
};

struct LayoutScore {
  std::string layout_id;
  int e_o = 1;
  double e_c = 0;
  double e_u_raw = 0;
  double uniformity = 1;
  double mean_distance = 0;
  int vg_count = 0;
  double e_l = 0;
  /// Set when a longer layout was cut to the requested count.
  bool truncated = false;
};

Point pivot_center(const BBox& pivot);

int energy_overlap(const PointList& points, const std::optional<PivotPlacement>& pivot);

/// Raw: hull area over unit canvas area. Padded: hull of the points'
/// 0.1-side squares, clamped to [0,1].
double energy_coverage(const PointList& points, bool padded);

struct Uniformity {
  double e_u_raw = 0;
  double uniformity = 1;
  double mean_distance = 0;
};

Uniformity energy_uniformity(const PointList& points, const Point& center);

LayoutScore score_layout(const VifLayout& layout, const std::optional<PivotPlacement>& pivot,
                         const EnergyWeights& weights = {});

struct LayoutQuery {
  int n_vgs = 1;
  EnergyWeights weights;
  int top_k = 4;
  /// Allow cutting longer layouts when none has exactly n_vgs points.
  bool allow_truncation = false;
};

struct LayoutRanking {
  std::vector<LayoutScore> scores;
  bool truncated = false;
};

/// Sorted by (e_l desc, layout_id asc), at most top_k long. Throws
/// Error(kNoCandidates) when nothing has the requested count.
LayoutRanking rank_layouts(const AssetStore& store, const std::optional<PivotPlacement>& pivot,
                           const LayoutQuery& query);

/// Translates and uniformly scales points so their bounding box is centered
/// at (0.5, 0.5) with its longer side 1. A single point maps to the center.
PointList fit_unit(const PointList& points);

/// The n positions a stroke suggests, in fit_unit coordinates.
PointList estimate_positions(const PointList& stroke, int n_vgs);

/// Mean point-to-point distance after fit_unit, minimised over both
/// traversal directions of `b`.
double shape_distance(const PointList& a, const PointList& b);

struct SketchMatch {
  std::string layout_id;
  double distance = 0;
  friend bool operator==(const SketchMatch&, const SketchMatch&) = default;
};

struct SketchResult {
  /// Ascending distance, ties by id; at most top_k.
  std::vector<SketchMatch> matches;
  /// Candidates removed by the pivot overlap gate, ascending distance.
  std::vector<SketchMatch> gated_out;
  PointList positions;
};

/// Throws Error(kStrokeTooShort), Error(kInvalidArgument) for n_vgs < 2 or
/// top_k < 1, and Error(kNoCandidates) when no layout has n_vgs points.
SketchResult match_sketch(const AssetStore& store, const PointList& stroke, int n_vgs, int top_k,
                          const std::optional<PivotPlacement>& pivot = std::nullopt);

}  // namespace infoforge
