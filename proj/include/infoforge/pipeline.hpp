#pragma once

// The three recommendation stages chained over one corpus: layouts (by
// energy or by sketch), then VG designs and connection styles for the
// chosen layout's cluster, then palettes. Shared by the CLI and the
// service so both produce the same bytes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infoforge/composer.hpp"
#include "infoforge/corpus.hpp"
#include "infoforge/vg_recommender.hpp"
#include "json.hpp"

namespace infoforge {

inline constexpr int kDefaultTopK = 4;
/// Layouts listed in a recommendation bundle.
inline constexpr int kBundleLayouts = 12;
inline constexpr int kBundleVgs = 8;
inline constexpr int kSampledConnectionDesigns = 3;

/// What the user has provided so far.
struct DesignInput {
  ContentSpec content;
  Canvas canvas;
  std::optional<PivotPlacement> pivot;
  /// Normalized canvas coordinates.
  std::optional<PointList> sketch;
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
  Color background{255, 255, 255};
};

struct Selections {
  std::optional<std::string> layout_id;
  std::optional<std::string> vg_design_id;
  std::optional<ConnectionChoice> connection;
  std::optional<std::string> palette_id;
  friend bool operator==(const Selections&, const Selections&) = default;
};

struct LayoutCandidate {
  LayoutScore score;
  /// Shape distance when the list came from a sketch.
  std::optional<double> distance;
};

struct LayoutStage {
  /// Energy order, or sketch order when a sketch is present. Gated layouts
  /// stay in the energy list with e_l = 0.
  std::vector<LayoutCandidate> layouts;
  /// Sketch matches removed by the pivot gate.
  std::vector<LayoutCandidate> gated_out;
  bool from_sketch = false;
  bool truncated = false;
  /// Estimated VG positions from the sketch, fit_unit coordinates.
  PointList sketch_positions;
};

/// Throws Error(kEmptySpec), Error(kNoCandidates) or Error(kStrokeTooShort).
LayoutStage recommend_layouts(const Corpus& corpus, const DesignInput& input, int top_k);

struct ConnectionStage {
  std::vector<StyleScore> styles;
  ConnectionStyle style = ConnectionStyle::kNone;
  /// Sampled with the input seed; empty for None or a style without designs.
  std::vector<std::string> design_ids;
};

ConnectionStage recommend_connections(const Corpus& corpus, int cluster_id, bool has_pivot,
                                      std::uint64_t seed, int k = kSampledConnectionDesigns);

struct RecommendationBundle {
  LayoutStage layout;
  /// Selected layout, else the best ungated candidate.
  std::optional<std::string> layout_id;
  int cluster_id = -1;
  std::optional<VgRanking> vgs;
  std::optional<ConnectionStage> connections;
  std::vector<PaletteChoice> palettes;
};

/// Stage 1 always; stages 2 and 3 for the selected or best layout. Unknown
/// selected ids throw Error(kNotFound).
RecommendationBundle recommend(const Corpus& corpus, const DesignInput& input,
                               const Selections& selections, int layout_count = kBundleLayouts);

/// A complete request from the input and selections. Throws
/// Error(kSelectionIncomplete) without a layout or VG design.
AssemblyRequest assembly_request(const DesignInput& input, const Selections& selections,
                                 const LayoutStage& stage);

struct GeneratedInfographic {
  LayoutCandidate layout;
  AssembledInfographic result;
};

struct Generation {
  std::vector<GeneratedInfographic> outputs;
  /// Candidates passed over, with the reason.
  std::vector<std::string> skipped;
};

/// Walks the layout candidates in order, taking each one's best VG design
/// and connection style, until top_k assemble. Unplaceable candidates are
/// skipped. Throws Error(kNoCandidates) when none assembles.
Generation generate_top_k(const Corpus& corpus, const DesignInput& input, int top_k,
                          const Uploads& uploads = {});

/// Sketch wire format {points: [[x,y],...], space: "canvas-px" | "normalized"},
/// to normalized canvas coordinates. Space defaults to canvas-px. Throws
/// Error(kInvalidArgument) on malformed input.
PointList sketch_from_json(const nlohmann::json& j, const Canvas& canvas);

/// Pixel box on the canvas to a normalized pivot placement.
PivotPlacement pivot_from_px(const BBox& px, const Canvas& canvas,
                             std::optional<std::string> graphic_ref = std::nullopt);

nlohmann::json to_json(const LayoutCandidate& c);
nlohmann::json to_json(const LayoutStage& s);
nlohmann::json to_json(const ConnectionStage& s);
nlohmann::json to_json(const VgRanking& r);
nlohmann::json to_json(const PaletteChoice& p);
nlohmann::json to_json(const RecommendationBundle& b);
nlohmann::json to_json(const Selections& s);
/// Throws Error(kInvalidArgument) on mistyped fields.
Selections selections_from_json(const nlohmann::json& j);

}  // namespace infoforge
