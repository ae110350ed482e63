#include "infoforge/asset_store.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace infoforge {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> files_with_suffix(const fs::path& dir, std::string_view suffix,
                                        std::string_view exclude = {}) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || !name.ends_with(suffix)) continue;
    if (!exclude.empty() && name.ends_with(exclude)) continue;
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string stem_of(const fs::path& p, std::string_view suffix) {
  auto name = p.filename().string();
  return name.substr(0, name.size() - suffix.size());
}

Point parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::runtime_error("point must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::Vector2d parse_size(const json& j) {
  const Point p = parse_point(j);
  if (!(p.x() > 0 && p.y() > 0)) throw std::runtime_error("native_size must be positive");
  return p;
}

class Loader {
 public:
  explicit Loader(fs::path root) : root_(std::move(root)) {}

  void fail(const fs::path& file, std::string reason) {
    diagnostics_.push_back({fs::relative(file, root_).generic_string(), std::move(reason)});
  }

  const fs::path& root() const { return root_; }
  std::vector<AssetDiagnostic>& diagnostics() { return diagnostics_; }

 private:
  fs::path root_;
  std::vector<AssetDiagnostic> diagnostics_;
};

}  // namespace

std::string_view slot_name(Slot slot) {
  switch (slot) {
    case Slot::kTitle: return "title";
    case Slot::kText: return "text";
    case Slot::kLabel: return "label";
    case Slot::kImage: return "image";
  }
  return "";
}

std::string_view style_name(ConnectionStyle style) {
  switch (style) {
    case ConnectionStyle::kFlowShape: return "FlowShape";
    case ConnectionStyle::kRegular: return "Regular";
    case ConnectionStyle::kAlternate: return "Alternate";
    case ConnectionStyle::kPivot: return "Pivot";
    case ConnectionStyle::kNone: return "None";
  }
  return "";
}

std::optional<ConnectionStyle> parse_style(std::string_view name) {
  for (auto s : kAllStyles) {
    if (style_name(s) == name) return s;
  }
  return std::nullopt;
}

CorruptAssetError::CorruptAssetError(std::vector<AssetDiagnostic> diagnostics)
    : Error(ErrorCode::kCorruptAsset,
            [&] {
              std::string msg = "corrupt assets:";
              for (const auto& d : diagnostics) msg += fmt::format(" [{}: {}]", d.file, d.reason);
              return msg;
            }()),
      diagnostics_(std::move(diagnostics)) {}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

AssetStore AssetStore::load(const fs::path& root) {
  const fs::path manifest_path = root / "manifest.json";
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec)) {
    throw Error(ErrorCode::kMissingManifest,
                fmt::format("no manifest.json under '{}'", root.string()));
  }
  Loader loader(root);
  AssetStore store;
  store.manifest_.root = root;

  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw CorruptAssetError(std::vector<AssetDiagnostic>{{"manifest.json", e.what()}});
  }
  const int version = manifest.value("format_version", -1);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                fmt::format("corpus format version {} (expected {})", version, kFormatVersion));
  }
  store.manifest_.format_version = version;

  if (manifest.contains("checksums")) {
    for (const auto& [rel, sum] : manifest["checksums"].items()) {
      const fs::path p = root / rel;
      if (!fs::is_regular_file(p, ec)) {
        loader.fail(p, "listed in manifest but missing");
      } else if (fnv1a64_hex(read_file(p)) != sum.get<std::string>()) {
        loader.fail(p, "checksum mismatch");
      }
    }
  }

  // Layouts.
  std::set<std::string> seen_ids;
  for (const auto& path : files_with_suffix(root / "layouts", ".json")) {
    try {
      const json j = json::parse(read_file(path));
      VifLayout layout;
      layout.id = j.at("id").get<std::string>();
      for (const auto& p : j.at("points")) layout.points.push_back(parse_point(p));
      if (j.contains("cluster") && !j["cluster"].is_null()) {
        layout.cluster_id = j["cluster"].get<int>();
      }
      layout.source = j.value("source", "");
      if (layout.points.size() < 2) throw std::runtime_error("layout needs at least 2 points");
      for (const auto& p : layout.points) {
        if (p.x() < 0 || p.x() > 1 || p.y() < 0 || p.y() > 1) {
          throw std::runtime_error("layout point outside [0,1]^2");
        }
      }
      if (layout.cluster_id && (*layout.cluster_id < 0 || *layout.cluster_id >= kDefaultClusterCount)) {
        throw std::runtime_error("cluster id outside [0,12)");
      }
      if (!seen_ids.insert(layout.id).second) throw std::runtime_error("duplicate layout id");
      store.layouts_.push_back(std::move(layout));
    } catch (const std::exception& e) {
      loader.fail(path, e.what());
    }
  }
  std::sort(store.layouts_.begin(), store.layouts_.end(),
            [](const VifLayout& a, const VifLayout& b) { return a.id < b.id; });

  std::set<int> known_clusters;
  for (const auto& l : store.layouts_) {
    if (l.cluster_id) known_clusters.insert(*l.cluster_id);
  }
  if (known_clusters.empty()) {
    for (int c = 0; c < kDefaultClusterCount; ++c) known_clusters.insert(c);
  }

  // VG designs.
  for (const auto& svg_path : files_with_suffix(root / "vgs", ".svg")) {
    const fs::path meta_path = root / "vgs" / (stem_of(svg_path, ".svg") + ".meta.json");
    try {
      if (!fs::is_regular_file(meta_path, ec)) throw std::runtime_error("missing .meta.json sidecar");
      const json meta = json::parse(read_file(meta_path));
      VgDesign d;
      d.id = meta.at("id").get<std::string>();
      d.svg = read_file(svg_path);
      d.svg_root = parse_xml(d.svg);
      d.native_size = parse_size(meta.at("native_size"));
      for (Slot s : kAllSlots) {
        const auto& ph = meta.at("placeholders");
        const std::string key(slot_name(s));
        if (!ph.contains(key)) continue;
        const auto& r = ph[key];
        BBox box{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                 r.at(3).get<double>()};
        if (!box.valid()) throw std::runtime_error(fmt::format("placeholder {} has empty rect", key));
        if (find_by_id(d.svg_root, "ph-" + key) == nullptr) {
          throw std::runtime_error(fmt::format("declared placeholder 'ph-{}' missing from svg", key));
        }
        d.slot_rects[static_cast<int>(s)] = box;
      }
      d.placeholders = {d.rect(Slot::kTitle).has_value(), d.rect(Slot::kText).has_value(),
                        d.rect(Slot::kLabel).has_value(), d.rect(Slot::kImage).has_value()};
      if (!d.placeholders.any()) throw std::runtime_error("design declares no placeholders");
      d.anchor = meta.contains("anchor") ? parse_point(meta["anchor"])
                                         : Point(d.native_size.x() / 2, d.native_size.y());
      d.clusters = meta.at("clusters").get<std::vector<int>>();
      if (d.clusters.empty()) throw std::runtime_error("clusters list is empty");
      for (int c : d.clusters) {
        if (!known_clusters.contains(c)) {
          throw std::runtime_error(fmt::format("unknown cluster id {}", c));
        }
      }
      std::sort(d.clusters.begin(), d.clusters.end());
      d.clusters.erase(std::unique(d.clusters.begin(), d.clusters.end()), d.clusters.end());
      store.vgs_.push_back(std::move(d));
    } catch (const std::exception& e) {
      loader.fail(svg_path, e.what());
    }
  }
  std::sort(store.vgs_.begin(), store.vgs_.end(),
            [](const VgDesign& a, const VgDesign& b) { return a.id < b.id; });

  // Connection designs.
  for (const auto& svg_path : files_with_suffix(root / "connections", ".svg")) {
    const fs::path meta_path = root / "connections" / (stem_of(svg_path, ".svg") + ".meta.json");
    try {
      if (!fs::is_regular_file(meta_path, ec)) throw std::runtime_error("missing .meta.json sidecar");
      const json meta = json::parse(read_file(meta_path));
      ConnectionDesign d;
      d.id = meta.at("id").get<std::string>();
      d.svg = read_file(svg_path);
      d.svg_root = parse_xml(d.svg);
      const auto style = parse_style(meta.at("style_class").get<std::string>());
      if (!style || *style == ConnectionStyle::kNone) {
        throw std::runtime_error("invalid style_class");
      }
      d.style = *style;
      const auto axis = meta.value("native_length_axis", std::string("x"));
      if (axis != "x" && axis != "y") throw std::runtime_error("native_length_axis must be x or y");
      d.length_axis = axis[0];
      d.native_size = parse_size(meta.at("native_size"));
      store.connections_.push_back(std::move(d));
    } catch (const std::exception& e) {
      loader.fail(svg_path, e.what());
    }
  }
  std::sort(store.connections_.begin(), store.connections_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const auto& svg_path : files_with_suffix(root / "pivots", ".svg")) {
    try {
      PivotGraphic p;
      p.id = stem_of(svg_path, ".svg");
      p.svg = read_file(svg_path);
      p.svg_root = parse_xml(p.svg);
      store.pivots_.push_back(std::move(p));
    } catch (const std::exception& e) {
      loader.fail(svg_path, e.what());
    }
  }

  const fs::path palettes_path = root / "palettes.json";
  try {
    if (!fs::is_regular_file(palettes_path, ec)) throw std::runtime_error("missing palettes.json");
    for (const auto& j : json::parse(read_file(palettes_path))) {
      Palette p;
      p.id = j.at("id").get<std::string>();
      p.background = Color::from_hex(j.at("background").get<std::string>());
      for (const auto& c : j.at("series")) p.series.push_back(Color::from_hex(c.get<std::string>()));
      p.text_color = Color::from_hex(j.at("text_color").get<std::string>());
      if (p.series.size() < 6) {
        throw std::runtime_error(fmt::format("palette {} has fewer than 6 series colors", p.id));
      }
      store.palettes_.push_back(std::move(p));
    }
    std::sort(store.palettes_.begin(), store.palettes_.end(),
              [](const Palette& a, const Palette& b) { return a.id < b.id; });
  } catch (const std::exception& e) {
    loader.fail(palettes_path, e.what());
  }

  const fs::path table_path = root / "c_vif_table.json";
  if (fs::is_regular_file(table_path, ec)) {
    try {
      const json table = json::parse(read_file(table_path));
      for (const auto& [style, clusters] : table.items()) {
        if (!parse_style(style)) throw std::runtime_error("unknown style " + style);
        store.c_vif_table_[style] = clusters.get<std::vector<int>>();
      }
    } catch (const std::exception& e) {
      loader.fail(table_path, e.what());
    }
  }

  const std::map<std::string, int> actual = {
      {"layouts", static_cast<int>(store.layouts_.size())},
      {"vgs", static_cast<int>(store.vgs_.size())},
      {"connections", static_cast<int>(store.connections_.size())},
      {"pivots", static_cast<int>(store.pivots_.size())},
      {"palettes", static_cast<int>(store.palettes_.size())}};
  if (manifest.contains("counts")) {
    for (const auto& [kind, count] : manifest["counts"].items()) {
      const auto it = actual.find(kind);
      if (it == actual.end()) {
        loader.fail(manifest_path, fmt::format("unknown asset kind '{}'", kind));
      } else if (it->second != count.get<int>()) {
        loader.fail(manifest_path, fmt::format("manifest lists {} {} but {} loaded", count.get<int>(),
                                               kind, it->second));
      }
    }
  }
  store.manifest_.counts = actual;

  if (!loader.diagnostics().empty()) throw CorruptAssetError(std::move(loader.diagnostics()));
  return store;
}

const VifLayout* AssetStore::layout(std::string_view id) const {
  for (const auto& l : layouts_) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const VgDesign* AssetStore::vg(std::string_view id) const {
  for (const auto& d : vgs_) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

const ConnectionDesign* AssetStore::connection(std::string_view id) const {
  for (const auto& d : connections_) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

const PivotGraphic* AssetStore::pivot(std::string_view id) const {
  for (const auto& p : pivots_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const Palette* AssetStore::palette(std::string_view id) const {
  for (const auto& p : palettes_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

AssetStore AssetStore::from_layouts(std::vector<VifLayout> layouts) {
  std::sort(layouts.begin(), layouts.end(),
            [](const VifLayout& a, const VifLayout& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    if (i > 0 && layouts[i].id == layouts[i - 1].id) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("duplicate layout id '{}'", layouts[i].id));
    }
    for (const auto& p : layouts[i].points) {
      if (!(p.x() >= 0 && p.x() <= 1 && p.y() >= 0 && p.y() <= 1)) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("layout '{}' has a point outside the unit square", layouts[i].id));
      }
    }
  }
  AssetStore store;
  store.manifest_.counts["layouts"] = static_cast<int>(layouts.size());
  store.layouts_ = std::move(layouts);
  return store;
}

std::vector<const VifLayout*> AssetStore::layouts_with_count(int n) const {
  std::vector<const VifLayout*> out;
  for (const auto& l : layouts_) {
    if (l.vg_count() == n) out.push_back(&l);
  }
  return out;
}

std::vector<const VgDesign*> AssetStore::vgs_matching(const ComponentSignature& sig) const {
  std::vector<const VgDesign*> out;
  for (const auto& d : vgs_) {
    if (d.placeholders.covers(sig)) out.push_back(&d);
  }
  return out;
}

std::vector<const ConnectionDesign*> AssetStore::connections_of(ConnectionStyle style) const {
  std::vector<const ConnectionDesign*> out;
  for (const auto& d : connections_) {
    if (d.style == style) out.push_back(&d);
  }
  return out;
}

}  // namespace infoforge
