#pragma once

// Design-asset corpus: VIF layouts, VG designs, connection designs, pivot
// graphics and palettes, loaded once and immutable afterwards.
//
// On-disk layout of a corpus root:
//   manifest.json                 format_version, counts, FNV-1a checksums
//   layouts/<id>.json             {id, points: [[x,y],...], cluster, source}
//   vgs/<id>.svg + .meta.json     placeholders, anchor, native_size, clusters
//   connections/<id>.svg + .meta.json   style_class, native_length_axis
//   pivots/<id>.svg
//   palettes.json                 [{id, background, series, text_color}]
//   c_vif_table.json              {style: [cluster ids]}

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infoforge/color.hpp"
#include "infoforge/content_spec.hpp"
#include "infoforge/error.hpp"
#include "infoforge/geometry.hpp"
#include "infoforge/xml.hpp"

namespace infoforge {

inline constexpr int kFormatVersion = 1;
inline constexpr int kDefaultClusterCount = 12;

struct VifLayout {
  std::string id;
  /// Normalized canvas fractions, in narrative order.
  PointList points;
  std::optional<int> cluster_id;
  std::string source;

  int vg_count() const { return static_cast<int>(points.size()); }
};

enum class Slot { kTitle, kText, kLabel, kImage };
inline constexpr std::array<Slot, 4> kAllSlots = {Slot::kTitle, Slot::kText, Slot::kLabel,
                                                  Slot::kImage};
std::string_view slot_name(Slot slot);

struct VgDesign {
  std::string id;
  std::string svg;
  XmlNode svg_root;
  ComponentSignature placeholders;
  /// Placeholder rectangles in the design's local units, indexed by Slot.
  std::array<std::optional<BBox>, 4> slot_rects;
  /// Connection attachment point in local units.
  Point anchor = Point::Zero();
  Eigen::Vector2d native_size = Eigen::Vector2d::Ones();
  std::vector<int> clusters;

  const std::optional<BBox>& rect(Slot s) const { return slot_rects[static_cast<int>(s)]; }
};

enum class ConnectionStyle { kFlowShape, kRegular, kAlternate, kPivot, kNone };
inline constexpr std::array<ConnectionStyle, 5> kAllStyles = {
    ConnectionStyle::kFlowShape, ConnectionStyle::kRegular, ConnectionStyle::kAlternate,
    ConnectionStyle::kPivot, ConnectionStyle::kNone};

std::string_view style_name(ConnectionStyle style);
std::optional<ConnectionStyle> parse_style(std::string_view name);

struct ConnectionDesign {
  std::string id;
  std::string svg;
  XmlNode svg_root;
  ConnectionStyle style = ConnectionStyle::kRegular;
  /// 'x' or 'y': the local axis that stretches with the connection length.
  char length_axis = 'x';
  Eigen::Vector2d native_size = Eigen::Vector2d::Ones();
};

struct PivotGraphic {
  std::string id;
  std::string svg;
  XmlNode svg_root;
};

struct Palette {
  std::string id;
  Color background;
  std::vector<Color> series;
  Color text_color;
};

struct AssetManifest {
  std::filesystem::path root;
  int format_version = kFormatVersion;
  std::map<std::string, int> counts;
};

struct AssetDiagnostic {
  std::string file;
  std::string reason;
};

/// Thrown by AssetStore::load when one or more assets fail validation.
class CorruptAssetError : public Error {
 public:
  explicit CorruptAssetError(std::vector<AssetDiagnostic> diagnostics);
  const std::vector<AssetDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<AssetDiagnostic> diagnostics_;
};

std::string fnv1a64_hex(std::string_view bytes);

class AssetStore {
 public:
  /// Throws Error(kMissingManifest), Error(kVersionMismatch) or
  /// CorruptAssetError.
  static AssetStore load(const std::filesystem::path& root);
  /// In-memory store holding only layouts, sorted by id. Throws
  /// Error(kInvalidArgument) on duplicate ids or points outside [0,1]².
  static AssetStore from_layouts(std::vector<VifLayout> layouts);

  const AssetManifest& manifest() const { return manifest_; }
  const std::vector<VifLayout>& layouts() const { return layouts_; }
  const std::vector<VgDesign>& vgs() const { return vgs_; }
  const std::vector<ConnectionDesign>& connections() const { return connections_; }
  const std::vector<PivotGraphic>& pivots() const { return pivots_; }
  const std::vector<Palette>& palettes() const { return palettes_; }
  /// Style class name -> cluster ids, as authored in c_vif_table.json.
  const std::map<std::string, std::vector<int>>& c_vif_table() const { return c_vif_table_; }

  const VifLayout* layout(std::string_view id) const;
  const VgDesign* vg(std::string_view id) const;
  const ConnectionDesign* connection(std::string_view id) const;
  const PivotGraphic* pivot(std::string_view id) const;
  const Palette* palette(std::string_view id) const;

  /// Layouts with exactly n points, ordered by id.
  std::vector<const VifLayout*> layouts_with_count(int n) const;
  /// Designs whose slots cover `sig`, ordered by id.
  std::vector<const VgDesign*> vgs_matching(const ComponentSignature& sig) const;
  std::vector<const ConnectionDesign*> connections_of(ConnectionStyle style) const;

 private:
  AssetManifest manifest_;
  std::vector<VifLayout> layouts_;
  std::vector<VgDesign> vgs_;
  std::vector<ConnectionDesign> connections_;
  std::vector<PivotGraphic> pivots_;
  std::vector<Palette> palettes_;
  std::map<std::string, std::vector<int>> c_vif_table_;
};

}  // namespace infoforge
