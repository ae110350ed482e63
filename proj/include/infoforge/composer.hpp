#pragma once

// Final assembly: VG placement, content embedding, connection geometry,
// palette choice and the SVG document.
//
// Geometry is computed in canvas pixels so facing and slopes are visual on
// non-square canvases. Layout points and connection placements stay in
// normalized canvas coordinates.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infoforge/asset_store.hpp"
#include "infoforge/content_spec.hpp"
#include "infoforge/layout_recommender.hpp"
#include "json.hpp"

namespace infoforge {

struct Canvas {
  int width = 1200;
  int height = 1600;

  double min_side() const { return std::min(width, height); }
  Point to_px(const Point& p) const { return {p.x() * width, p.y() * height}; }
  BBox to_px(const BBox& b) const { return {b.x * width, b.y * height, b.w * width, b.h * height}; }
  /// Throws Error(kInvalidArgument) unless both sides are in [16, 20000].
  void validate() const;
  friend bool operator==(const Canvas&, const Canvas&) = default;
};

/// Parses "1200x1600".
Canvas parse_canvas(std::string_view text);

inline constexpr double kFootprintFraction = 0.22;
inline constexpr double kMinScale = 0.25;
inline constexpr double kMaxScale = 1.0;
inline constexpr double kMinFontPx = 6.0;
inline constexpr double kConnectionLengthFactor = 0.8;
inline constexpr double kFlowShapeOffset = 0.35;

struct VgTransform {
  int item_index = 0;
  /// Normalized canvas point the VG is centered on.
  Point position = Point::Zero();
  /// Clockwise, in [0, 360).
  double rotation_deg = 0;
  /// Uniform footprint scale in [kMinScale, kMaxScale].
  double scale = 1;
};

/// Design-unit to canvas-pixel factor at footprint scale `scale`: the longer
/// native side becomes scale * 0.22 * min(W, H) pixels.
double pixel_factor(double scale, const Eigen::Vector2d& native_size, const Canvas& canvas);

/// Axis-aligned pixel box of the rotated footprint.
BBox footprint_px(const VgTransform& t, const Eigen::Vector2d& native_size, const Canvas& canvas);

/// One transform per point. Rotation turns the up vector (0,-1) toward the
/// pivot center; the shared scale is the largest in [0.25, 1] keeping all
/// footprints disjoint, inside the canvas and off the pivot box. Throws
/// Error(kUnplaceable) when even 0.25 fails.
std::vector<VgTransform> compute_transforms(const PointList& points, const Canvas& canvas,
                                            const std::optional<PivotPlacement>& pivot,
                                            const Eigen::Vector2d& native_size);

/// Advance width of UTF-8 text at `font_size`, from embedded Helvetica
/// metrics. Characters outside ASCII count 0.6 em.
double text_width(std::string_view text, double font_size, bool bold = false);

struct FittedText {
  double font_size = 0;
  std::vector<std::string> lines;
  /// Did not fit at min_font; the last line ends in an ellipsis.
  bool overflow = false;
};

inline constexpr double kLineHeight = 1.2;

/// Largest font size in [min_font, max_font] whose greedy word wrap fits
/// the box, by bisection.
FittedText fit_text(std::string_view text, double width, double height, double min_font,
                    double max_font, bool bold = false);

/// The design's shapes under the transform, accent fills set to `fill`, and
/// the item's content in a group counter-rotated about the VG center.
/// Placeholders are consumed or removed. Overflow is appended to `warnings`.
XmlNode embed_content(const VgDesign& design, const VgContent& item, const VgTransform& transform,
                      const Canvas& canvas, const Color& fill, const Color& text_color,
                      std::vector<std::string>* warnings = nullptr);

struct ConnectionInstance {
  std::string design_id;
  ConnectionStyle style = ConnectionStyle::kNone;
  /// Normalized canvas point the connection is centered on.
  Point placement = Point::Zero();
  /// Pixel-space slope, clockwise degrees from +x.
  double angle_deg = 0;
  /// Pixel length over min(W, H).
  double length = 0;
  /// Segment index, or VG index for the Pivot style.
  int index = 0;
};

/// Regular: every segment, at its midpoint. Alternate: segments 0, 2, 4...
/// Pivot: pivot center to each point. FlowShape: every segment, 35% along
/// from the end nearer the pivot (or canvas) center. Lengths are 0.8 of the
/// span. Zero-length spans are skipped with a warning. Throws
/// Error(kPivotRequired) for Pivot without a pivot.
std::vector<ConnectionInstance> generate_connections(ConnectionStyle style,
                                                     const std::string& design_id,
                                                     const PointList& points,
                                                     const std::optional<PivotPlacement>& pivot,
                                                     const Canvas& canvas,
                                                     std::vector<std::string>* warnings = nullptr);

inline constexpr double kMinPaletteContrast = 3.0;

struct PaletteChoice {
  const Palette* palette = nullptr;
  /// Mean series-vs-background contrast.
  double score = 0;
  double min_contrast = 0;
  /// False when every palette has a series color under 3.0:1 and the best
  /// one was taken anyway.
  bool accessible = true;
};

/// Accessible palettes first, then by (score desc, id asc).
std::vector<PaletteChoice> rank_palettes(const std::vector<Palette>& palettes,
                                         const Color& background);

/// First of rank_palettes. Throws Error(kInvalidArgument) for an empty list.
PaletteChoice select_palette(const std::vector<Palette>& palettes, const Color& background);

struct ConnectionChoice {
  ConnectionStyle style = ConnectionStyle::kNone;
  /// Sampled with the request seed when absent.
  std::optional<std::string> design_id;
  friend bool operator==(const ConnectionChoice&, const ConnectionChoice&) = default;
};

/// Everything a render depends on. Once assembled, the resolved copy is the
/// provenance: assembling it again gives the same bytes.
struct AssemblyRequest {
  Canvas canvas;
  ContentSpec content;
  std::string layout_id;
  /// Use the first |items| points of a longer layout.
  bool truncate_layout = false;
  std::string vg_design_id;
  std::optional<PivotPlacement> pivot;
  ConnectionChoice connection;
  /// Chosen by select_palette when absent.
  std::optional<std::string> palette_id;
  Color background{255, 255, 255};
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const AssemblyRequest& request);
/// Throws Error(kInvalidArgument) on missing or mistyped fields.
AssemblyRequest assembly_request_from_json(const nlohmann::json& j);

/// Pivot graphics supplied by the user, by reference ("upload-<fnv1a>").
using Uploads = std::map<std::string, std::string>;
std::string upload_ref(std::string_view svg);

struct AssembledInfographic {
  std::string svg;
  /// Fully resolved request.
  AssemblyRequest provenance;
  std::vector<VgTransform> transforms;
  std::vector<ConnectionInstance> connections;
  std::vector<std::string> warnings;
};

/// Throws Error(kNotFound) for unknown asset ids, Error(kInvalidArgument)
/// for mismatched counts or a design lacking needed slots, plus whatever
/// placement and connection generation throw.
AssembledInfographic assemble(const AssetStore& store, const AssemblyRequest& request,
                              const Uploads& uploads = {});

AssembledInfographic assemble_from_provenance(const AssetStore& store,
                                              const nlohmann::json& provenance,
                                              const Uploads& uploads = {});

/// The provenance block embedded in an assembled SVG, if any.
std::optional<nlohmann::json> extract_provenance(std::string_view svg);

}  // namespace infoforge
