#include "infoforge/composer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "infoforge/vg_recommender.hpp"

namespace infoforge {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr int kProvenanceVersion = 1;
constexpr std::string_view kProvenanceTag = "infoforge-provenance ";
constexpr const char* kFontFamily = "Helvetica, Arial, sans-serif";
// Cross-axis size of a connection, as a fraction of min(W, H).
constexpr double kConnectionThickness = 0.02;
constexpr double kBoldWidth = 1.1;

// Helvetica advance widths in 1/1000 em for ' ' through '~'.
constexpr std::array<int, 95> kHelvetica = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278,
    556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 278, 278, 584, 584, 584, 556,
    1015, 667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833, 722, 778,
    667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611, 278, 278, 278, 469, 556,
    333, 556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833, 556, 556,
    556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584};

double normalize_deg(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  if (d >= 360.0) d -= 360.0;
  return d;
}

// Clockwise angle (y down) taking (0,-1) onto `v`.
double facing_deg(const Point& v) { return normalize_deg(std::atan2(v.x(), -v.y()) * kDeg); }

// Splits UTF-8 into code points, kept as byte strings.
std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) {
      len = 4;
    } else if (c >= 0xE0) {
      len = 3;
    } else if (c >= 0xC0) {
      len = 2;
    }
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

// Greedy wrap. Words wider than the box are broken between code points.
std::vector<std::string> wrap(const std::vector<std::string>& words, double width, double font,
                              bool bold) {
  std::vector<std::string> lines;
  std::string line;
  auto push_word = [&](const std::string& word) {
    const std::string candidate = line.empty() ? word : line + " " + word;
    if (text_width(candidate, font, bold) <= width) {
      line = candidate;
      return;
    }
    if (!line.empty()) {
      lines.push_back(line);
      line.clear();
    }
    if (text_width(word, font, bold) <= width) {
      line = word;
      return;
    }
    for (const auto& cp : code_points(word)) {
      if (!line.empty() && text_width(line + cp, font, bold) > width) {
        lines.push_back(line);
        line.clear();
      }
      line += cp;
    }
  };
  for (const auto& w : words) push_word(w);
  if (!line.empty()) lines.push_back(line);
  return lines;
}

bool fits(const std::vector<std::string>& lines, double width, double height, double font,
          bool bold) {
  if (static_cast<double>(lines.size()) * font * kLineHeight > height + 1e-9) return false;
  return std::all_of(lines.begin(), lines.end(), [&](const std::string& l) {
    return text_width(l, font, bold) <= width + 1e-9;
  });
}

bool has_class(const XmlNode& node, std::string_view cls) {
  const auto* c = node.attr("class");
  if (c == nullptr) return false;
  for (const auto& word : split_words(*c)) {
    if (word == cls) return true;
  }
  return false;
}

// Copies design content, dropping placeholders and recoloring accents.
void copy_shapes(const XmlNode& from, XmlNode& to, const Color& fill) {
  for (const auto& child : from.children) {
    if (child.is_text()) continue;
    const auto* id = child.attr("id");
    if (id != nullptr && id->rfind("ph-", 0) == 0) continue;
    XmlNode copy = child;
    copy.children.clear();
    if (has_class(copy, "accent")) copy.set_attr("fill", fill.hex());
    copy_shapes(child, copy, fill);
    to.children.push_back(std::move(copy));
  }
}

XmlNode element(std::string name, std::vector<std::pair<std::string, std::string>> attrs = {}) {
  XmlNode n;
  n.name = std::move(name);
  n.attributes = std::move(attrs);
  return n;
}

XmlNode text_node(std::string text) {
  XmlNode n;
  n.text = std::move(text);
  return n;
}

void emit_text(XmlNode& group, const FittedText& fitted, const BBox& rect, const Color& color,
               bool bold) {
  const double block = static_cast<double>(fitted.lines.size()) * fitted.font_size * kLineHeight;
  const double top = rect.y + (rect.h - block) / 2;
  for (std::size_t i = 0; i < fitted.lines.size(); ++i) {
    const double baseline =
        top + fitted.font_size * (kLineHeight * static_cast<double>(i) + 0.9);
    XmlNode t = element("text", {{"x", num(rect.center().x())},
                                 {"y", num(baseline)},
                                 {"font-family", kFontFamily},
                                 {"font-size", num(fitted.font_size)},
                                 {"text-anchor", "middle"},
                                 {"fill", color.hex()}});
    if (bold) t.set_attr("font-weight", "bold");
    t.children.push_back(text_node(fitted.lines[i]));
    group.children.push_back(std::move(t));
  }
}

std::string transform_chain(const Point& at_px, double rotation_deg, double sx, double sy,
                            const Eigen::Vector2d& native) {
  return fmt::format("translate({} {}) rotate({}) scale({} {}) translate({} {})", num(at_px.x()),
                     num(at_px.y()), num(rotation_deg), num(sx), num(sy), num(-native.x() / 2),
                     num(-native.y() / 2));
}

// Children of an asset's root <svg>, skipping whitespace.
void copy_children(const XmlNode& root, XmlNode& to) {
  for (const auto& c : root.children) {
    if (!c.is_text()) to.children.push_back(c);
  }
}

const Palette& palette_by_id(const AssetStore& store, const std::string& id) {
  const auto* p = store.palette(id);
  if (p == nullptr) throw Error(ErrorCode::kNotFound, fmt::format("unknown palette '{}'", id));
  return *p;
}

std::string provenance_comment(const AssemblyRequest& request) {
  std::string body = to_json(request).dump();
  // "--" may not appear inside a comment; it can only occur in strings.
  std::string safe;
  for (std::size_t i = 0; i < body.size(); ++i) {
    safe += body[i];
    if (body[i] == '-' && i + 1 < body.size() && body[i + 1] == '-') {
      safe += "\\u002d";
      ++i;
    }
  }
  return "<!--" + std::string(kProvenanceTag) + safe + " -->";
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("provenance lacks '{}'", key));
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("provenance field '{}' has wrong type", key));
  }
}

}  // namespace

void Canvas::validate() const {
  if (width < 16 || height < 16 || width > 20000 || height > 20000) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("canvas {}x{} outside 16..20000 px", width, height));
  }
}

Canvas parse_canvas(std::string_view text) {
  const auto x = text.find('x');
  Canvas c{0, 0};
  if (x == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("canvas '{}' is not WxH", text));
  }
  const auto w = std::from_chars(text.data(), text.data() + x, c.width);
  const auto h = std::from_chars(text.data() + x + 1, text.data() + text.size(), c.height);
  if (w.ec != std::errc() || w.ptr != text.data() + x || h.ec != std::errc() ||
      h.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("canvas '{}' is not WxH", text));
  }
  c.validate();
  return c;
}

double pixel_factor(double scale, const Eigen::Vector2d& native_size, const Canvas& canvas) {
  return scale * kFootprintFraction * canvas.min_side() / native_size.maxCoeff();
}

BBox footprint_px(const VgTransform& t, const Eigen::Vector2d& native_size, const Canvas& canvas) {
  const double k = pixel_factor(t.scale, native_size, canvas);
  const double w = native_size.x() * k;
  const double h = native_size.y() * k;
  const double r = t.rotation_deg / kDeg;
  const double c = std::abs(std::cos(r));
  const double s = std::abs(std::sin(r));
  const double bw = w * c + h * s;
  const double bh = w * s + h * c;
  const Point p = canvas.to_px(t.position);
  return {p.x() - bw / 2, p.y() - bh / 2, bw, bh};
}

std::vector<VgTransform> compute_transforms(const PointList& points, const Canvas& canvas,
                                            const std::optional<PivotPlacement>& pivot,
                                            const Eigen::Vector2d& native_size) {
  canvas.validate();
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "no points to place");
  if (!(native_size.minCoeff() > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "design native size must be positive");
  }
  std::vector<VgTransform> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    VgTransform t;
    t.item_index = static_cast<int>(i);
    t.position = points[i];
    if (pivot) {
      const Point v = canvas.to_px(pivot_center(pivot->bbox)) - canvas.to_px(points[i]);
      if (v.norm() > 1e-12) t.rotation_deg = facing_deg(v);
    }
    out.push_back(t);
  }

  const BBox pivot_px = pivot ? canvas.to_px(pivot->bbox) : BBox{};
  auto feasible = [&](double s) {
    std::vector<BBox> boxes;
    for (auto t : out) {
      t.scale = s;
      const BBox b = footprint_px(t, native_size, canvas);
      if (b.x < 0 || b.y < 0 || b.right() > canvas.width || b.bottom() > canvas.height) return false;
      if (pivot && intersection_area(b, pivot_px) > 0) return false;
      for (const auto& other : boxes) {
        if (intersection_area(b, other) > 0) return false;
      }
      boxes.push_back(b);
    }
    return true;
  };

  double scale = kMaxScale;
  if (!feasible(kMaxScale)) {
    if (!feasible(kMinScale)) {
      throw Error(ErrorCode::kUnplaceable,
                  fmt::format("{} VGs do not fit without overlap even at scale {}", points.size(),
                              kMinScale));
    }
    double lo = kMinScale;
    double hi = kMaxScale;
    for (int it = 0; it < 50; ++it) {
      const double mid = (lo + hi) / 2;
      (feasible(mid) ? lo : hi) = mid;
    }
    scale = lo;
  }
  for (auto& t : out) t.scale = scale;
  return out;
}

double text_width(std::string_view text, double font_size, bool bold) {
  double em = 0;
  for (const auto& cp : code_points(text)) {
    const auto c = static_cast<unsigned char>(cp[0]);
    em += (cp.size() == 1 && c >= 32 && c <= 126) ? kHelvetica[c - 32] / 1000.0 : 0.6;
  }
  return em * font_size * (bold ? kBoldWidth : 1.0);
}

FittedText fit_text(std::string_view text, double width, double height, double min_font,
                    double max_font, bool bold) {
  const auto words = split_words(text);
  FittedText out;
  max_font = std::max(max_font, min_font);
  auto lines_at = [&](double f) { return wrap(words, width, f, bold); };

  if (fits(lines_at(max_font), width, height, max_font, bold)) {
    out.font_size = max_font;
  } else if (!fits(lines_at(min_font), width, height, min_font, bold)) {
    out.font_size = min_font;
    out.overflow = true;
  } else {
    double lo = min_font;
    double hi = max_font;
    for (int it = 0; it < 40; ++it) {
      const double mid = (lo + hi) / 2;
      (fits(lines_at(mid), width, height, mid, bold) ? lo : hi) = mid;
    }
    // Snap down to the precision written to SVG.
    out.font_size = std::max(min_font, std::floor(lo * 1000) / 1000);
  }
  out.lines = lines_at(out.font_size);

  if (out.overflow) {
    const auto keep = static_cast<std::size_t>(
        std::max(1.0, std::floor(height / (out.font_size * kLineHeight) + 1e-9)));
    if (out.lines.size() > keep) out.lines.resize(keep);
    std::string& last = out.lines.back();
    const std::string ellipsis = "…";
    auto cps = code_points(last);
    while (!cps.empty()) {
      std::string joined;
      for (const auto& cp : cps) joined += cp;
      if (text_width(joined + ellipsis, out.font_size, bold) <= width) break;
      cps.pop_back();
    }
    last.clear();
    for (const auto& cp : cps) last += cp;
    last += ellipsis;
  }
  return out;
}

XmlNode embed_content(const VgDesign& design, const VgContent& item, const VgTransform& transform,
                      const Canvas& canvas, const Color& fill, const Color& text_color,
                      std::vector<std::string>* warnings) {
  if (!design.placeholders.covers(signature_of(item))) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("design '{}' lacks a slot item {} needs", design.id, transform.item_index));
  }
  const double k = pixel_factor(transform.scale, design.native_size, canvas);
  const Point center(design.native_size.x() / 2, design.native_size.y() / 2);

  XmlNode group = element(
      "g", {{"id", fmt::format("vg-{}", transform.item_index)},
            {"transform", transform_chain(canvas.to_px(transform.position), transform.rotation_deg,
                                          k, k, design.native_size)}});
  copy_shapes(design.svg_root, group, fill);

  XmlNode content = element("g", {{"class", "vg-content"}});
  if (transform.rotation_deg != 0) {
    content.set_attr("transform", fmt::format("rotate({} {} {})", num(-transform.rotation_deg),
                                              num(center.x()), num(center.y())));
  }
  const double min_font = kMinFontPx / k;
  auto place_text = [&](Slot slot, const std::optional<std::string>& value, bool bold) {
    if (!value) return;
    const BBox rect = *design.rect(slot);
    const auto fitted = fit_text(*value, rect.w, rect.h, min_font, rect.h, bold);
    if (fitted.overflow && warnings != nullptr) {
      warnings->push_back(fmt::format("ContentOverflow: item {} {} truncated", transform.item_index,
                                      slot_name(slot)));
    }
    emit_text(content, fitted, rect, text_color, bold);
  };
  place_text(Slot::kTitle, item.title, true);
  place_text(Slot::kText, item.text, false);
  place_text(Slot::kLabel, item.label, false);
  if (item.image_ref) {
    const BBox rect = *design.rect(Slot::kImage);
    content.children.push_back(element("image", {{"x", num(rect.x)},
                                                 {"y", num(rect.y)},
                                                 {"width", num(rect.w)},
                                                 {"height", num(rect.h)},
                                                 {"preserveAspectRatio", "xMidYMid meet"},
                                                 {"xlink:href", *item.image_ref}}));
  }
  group.children.push_back(std::move(content));
  return group;
}

std::vector<ConnectionInstance> generate_connections(ConnectionStyle style,
                                                     const std::string& design_id,
                                                     const PointList& points,
                                                     const std::optional<PivotPlacement>& pivot,
                                                     const Canvas& canvas,
                                                     std::vector<std::string>* warnings) {
  std::vector<ConnectionInstance> out;
  if (style == ConnectionStyle::kNone) return out;
  if (style == ConnectionStyle::kPivot && !pivot) {
    throw Error(ErrorCode::kPivotRequired, "the Pivot connection style needs a pivot");
  }
  const Point center = pivot ? pivot_center(pivot->bbox) : Point(0.5, 0.5);

  // Instance spanning a -> b, centered at fraction t along it.
  auto span = [&](const Point& a, const Point& b, double t, int index) {
    const Point d = canvas.to_px(b) - canvas.to_px(a);
    if (d.norm() < 1e-9) {
      if (warnings != nullptr) {
        warnings->push_back(fmt::format("ZeroLengthSegment: connection {} skipped", index));
      }
      return;
    }
    ConnectionInstance c;
    c.design_id = design_id;
    c.style = style;
    c.placement = a + (b - a) * t;
    c.angle_deg = std::atan2(d.y(), d.x()) * kDeg;
    c.length = kConnectionLengthFactor * d.norm() / canvas.min_side();
    c.index = index;
    out.push_back(std::move(c));
  };

  const int segments = static_cast<int>(points.size()) - 1;
  switch (style) {
    case ConnectionStyle::kRegular:
      for (int i = 0; i < segments; ++i) span(points[i], points[i + 1], 0.5, i);
      break;
    case ConnectionStyle::kAlternate:
      for (int i = 0; i < segments; i += 2) span(points[i], points[i + 1], 0.5, i);
      break;
    case ConnectionStyle::kPivot:
      for (int i = 0; i <= segments; ++i) span(center, points[i], 0.5, i);
      break;
    case ConnectionStyle::kFlowShape:
      for (int i = 0; i < segments; ++i) {
        const Point& a = points[i];
        const Point& b = points[i + 1];
        const bool a_inner = (a - center).norm() <= (b - center).norm();
        const Point start = a_inner ? a : b;
        const Point end = a_inner ? b : a;
        // Placed from the inner end, but the slope keeps flow order.
        const std::size_t before = out.size();
        span(start, end, kFlowShapeOffset, i);
        if (out.size() > before && !a_inner) out.back().angle_deg = normalize_deg(out.back().angle_deg + 180.0);
      }
      break;
    case ConnectionStyle::kNone:
      break;
  }
  for (auto& c : out) {
    if (c.angle_deg > 180.0) c.angle_deg -= 360.0;
  }
  return out;
}

std::vector<PaletteChoice> rank_palettes(const std::vector<Palette>& palettes,
                                         const Color& background) {
  std::vector<PaletteChoice> scored;
  for (const auto& p : palettes) {
    PaletteChoice c;
    c.palette = &p;
    c.min_contrast = std::numeric_limits<double>::infinity();
    for (const auto& s : p.series) {
      const double r = contrast_ratio(s, background);
      c.score += r;
      c.min_contrast = std::min(c.min_contrast, r);
    }
    if (!p.series.empty()) c.score /= static_cast<double>(p.series.size());
    c.accessible = c.min_contrast >= kMinPaletteContrast;
    scored.push_back(c);
  }
  std::sort(scored.begin(), scored.end(), [](const PaletteChoice& a, const PaletteChoice& b) {
    if (a.accessible != b.accessible) return a.accessible;
    if (a.score != b.score) return a.score > b.score;
    return a.palette->id < b.palette->id;
  });
  return scored;
}

PaletteChoice select_palette(const std::vector<Palette>& palettes, const Color& background) {
  if (palettes.empty()) throw Error(ErrorCode::kInvalidArgument, "no palettes to choose from");
  return rank_palettes(palettes, background).front();
}

nlohmann::json to_json(const AssemblyRequest& r) {
  nlohmann::json j;
  j["format_version"] = kProvenanceVersion;
  j["canvas"] = {{"width", r.canvas.width}, {"height", r.canvas.height}};
  j["content"] = to_markdown(r.content);
  j["layout_id"] = r.layout_id;
  j["truncate_layout"] = r.truncate_layout;
  j["vg_design_id"] = r.vg_design_id;
  if (r.pivot) {
    j["pivot"] = {{"bbox", {r.pivot->bbox.x, r.pivot->bbox.y, r.pivot->bbox.w, r.pivot->bbox.h}}};
    j["pivot"]["graphic_ref"] =
        r.pivot->graphic_ref ? nlohmann::json(*r.pivot->graphic_ref) : nlohmann::json(nullptr);
  } else {
    j["pivot"] = nullptr;
  }
  j["connection"] = {{"style", style_name(r.connection.style)}};
  j["connection"]["design_id"] =
      r.connection.design_id ? nlohmann::json(*r.connection.design_id) : nlohmann::json(nullptr);
  j["palette_id"] = r.palette_id ? nlohmann::json(*r.palette_id) : nlohmann::json(nullptr);
  j["background"] = r.background.hex();
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  return j;
}

AssemblyRequest assembly_request_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "provenance must be an object");
  if (field<int>(j, "format_version") != kProvenanceVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported provenance format_version");
  }
  AssemblyRequest r;
  const auto canvas = field<nlohmann::json>(j, "canvas");
  r.canvas = {field<int>(canvas, "width"), field<int>(canvas, "height")};
  r.content = parse_markdown(field<std::string>(j, "content"));
  r.layout_id = field<std::string>(j, "layout_id");
  r.truncate_layout = j.value("truncate_layout", false);
  r.vg_design_id = field<std::string>(j, "vg_design_id");
  if (j.contains("pivot") && !j["pivot"].is_null()) {
    const auto b = field<std::vector<double>>(j["pivot"], "bbox");
    if (b.size() != 4) throw Error(ErrorCode::kInvalidArgument, "pivot bbox needs 4 numbers");
    PivotPlacement p{{b[0], b[1], b[2], b[3]}, {}};
    if (j["pivot"].contains("graphic_ref") && !j["pivot"]["graphic_ref"].is_null()) {
      p.graphic_ref = field<std::string>(j["pivot"], "graphic_ref");
    }
    r.pivot = p;
  }
  const auto conn = field<nlohmann::json>(j, "connection");
  const auto style = parse_style(field<std::string>(conn, "style"));
  if (!style) throw Error(ErrorCode::kInvalidArgument, "unknown connection style");
  r.connection.style = *style;
  if (conn.contains("design_id") && !conn["design_id"].is_null()) {
    r.connection.design_id = field<std::string>(conn, "design_id");
  }
  if (j.contains("palette_id") && !j["palette_id"].is_null()) {
    r.palette_id = field<std::string>(j, "palette_id");
  }
  if (j.contains("background")) r.background = Color::from_hex(field<std::string>(j, "background"));
  r.alpha = j.value("alpha", kDefaultAlpha);
  r.seed = j.value("seed", std::uint64_t{0});
  return r;
}

std::string upload_ref(std::string_view svg) { return "upload-" + fnv1a64_hex(svg); }

AssembledInfographic assemble(const AssetStore& store, const AssemblyRequest& request,
                              const Uploads& uploads) {
  request.canvas.validate();
  EnergyWeights{request.alpha}.validate();
  if (request.pivot) request.pivot->validate();
  const auto& items = request.content.items;
  if (items.empty()) throw Error(ErrorCode::kEmptySpec, "content has no items");

  const auto* layout = store.layout(request.layout_id);
  if (layout == nullptr) {
    throw Error(ErrorCode::kNotFound, fmt::format("unknown layout '{}'", request.layout_id));
  }
  const std::size_t n = items.size();
  if (layout->points.size() != n && !(request.truncate_layout && layout->points.size() > n)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("layout '{}' has {} points for {} items", layout->id,
                            layout->points.size(), n));
  }
  const PointList points(layout->points.begin(), layout->points.begin() + static_cast<long>(n));

  const auto* design = store.vg(request.vg_design_id);
  if (design == nullptr) {
    throw Error(ErrorCode::kNotFound, fmt::format("unknown VG design '{}'", request.vg_design_id));
  }

  AssembledInfographic out;
  out.provenance = request;

  const ConnectionDesign* connection = nullptr;
  if (request.connection.style != ConnectionStyle::kNone) {
    if (request.connection.design_id) {
      connection = store.connection(*request.connection.design_id);
      if (connection == nullptr) {
        throw Error(ErrorCode::kNotFound,
                    fmt::format("unknown connection design '{}'", *request.connection.design_id));
      }
      if (connection->style != request.connection.style) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("connection design '{}' is not of style {}", connection->id,
                                style_name(request.connection.style)));
      }
    } else {
      connection = sample_connection_designs(store, request.connection.style, request.seed, 1)[0];
      out.provenance.connection.design_id = connection->id;
    }
  } else {
    out.provenance.connection.design_id.reset();
  }

  const Palette* palette = nullptr;
  if (request.palette_id) {
    palette = &palette_by_id(store, *request.palette_id);
  } else {
    const auto choice = select_palette(store.palettes(), request.background);
    palette = choice.palette;
    if (!choice.accessible) {
      out.warnings.push_back(
          fmt::format("NoAccessiblePalette: using '{}' (min contrast {:.2f})", palette->id,
                      choice.min_contrast));
    }
    out.provenance.palette_id = palette->id;
  }
  if (palette->series.empty()) {
    throw Error(ErrorCode::kCorruptAsset, fmt::format("palette '{}' has no series", palette->id));
  }

  std::optional<XmlNode> pivot_graphic;
  if (request.pivot && request.pivot->graphic_ref) {
    const std::string& ref = *request.pivot->graphic_ref;
    if (const auto* g = store.pivot(ref)) {
      pivot_graphic = g->svg_root;
    } else if (auto it = uploads.find(ref); it != uploads.end()) {
      pivot_graphic = parse_xml(it->second);
    } else {
      throw Error(ErrorCode::kNotFound, fmt::format("unknown pivot graphic '{}'", ref));
    }
  }

  out.transforms = compute_transforms(points, request.canvas, request.pivot, design->native_size);
  if (connection != nullptr) {
    out.connections = generate_connections(request.connection.style, connection->id, points,
                                           request.pivot, request.canvas, &out.warnings);
  }

  const Canvas& canvas = request.canvas;
  XmlNode root = element("svg", {{"xmlns", "http://www.w3.org/2000/svg"},
                                 {"xmlns:xlink", "http://www.w3.org/1999/xlink"},
                                 {"version", "1.1"},
                                 {"viewBox", fmt::format("0 0 {} {}", canvas.width, canvas.height)},
                                 {"width", std::to_string(canvas.width)},
                                 {"height", std::to_string(canvas.height)}});

  XmlNode background = element("g", {{"id", "layer-background"}});
  background.children.push_back(element("rect", {{"x", "0"},
                                                 {"y", "0"},
                                                 {"width", std::to_string(canvas.width)},
                                                 {"height", std::to_string(canvas.height)},
                                                 {"fill", request.background.hex()}}));
  root.children.push_back(std::move(background));

  if (request.pivot) {
    XmlNode layer = element("g", {{"id", "layer-pivot"}});
    if (pivot_graphic) {
      const BBox b = canvas.to_px(request.pivot->bbox);
      XmlNode nested = element("svg", {{"x", num(b.x)},
                                       {"y", num(b.y)},
                                       {"width", num(b.w)},
                                       {"height", num(b.h)},
                                       {"preserveAspectRatio", "xMidYMid meet"}});
      if (const auto* vb = pivot_graphic->attr("viewBox")) nested.set_attr("viewBox", *vb);
      copy_children(*pivot_graphic, nested);
      layer.children.push_back(std::move(nested));
    }
    root.children.push_back(std::move(layer));
  }

  XmlNode connections = element("g", {{"id", "layer-connections"}});
  if (connection != nullptr) {
    const Eigen::Vector2d native = connection->native_size;
    const double thickness = kConnectionThickness * canvas.min_side();
    for (const auto& c : out.connections) {
      const double length_px = c.length * canvas.min_side();
      const bool along_x = connection->length_axis == 'x';
      const double sx = along_x ? length_px / native.x() : thickness / native.x();
      const double sy = along_x ? thickness / native.y() : length_px / native.y();
      XmlNode g = element(
          "g", {{"class", "connection"},
                {"transform", transform_chain(canvas.to_px(c.placement),
                                              along_x ? c.angle_deg : c.angle_deg - 90.0, sx, sy,
                                              native)}});
      copy_children(connection->svg_root, g);
      connections.children.push_back(std::move(g));
    }
  }
  root.children.push_back(std::move(connections));

  XmlNode vgs = element("g", {{"id", "layer-vgs"}});
  for (std::size_t i = 0; i < n; ++i) {
    const Color fill = palette->series[i % palette->series.size()];
    vgs.children.push_back(embed_content(*design, items[i], out.transforms[i], canvas, fill,
                                         palette->text_color, &out.warnings));
  }
  root.children.push_back(std::move(vgs));

  if (request.content.infographic_title) {
    XmlNode layer = element("g", {{"id", "layer-title"}});
    const BBox band{0.05 * canvas.width, 0.01 * canvas.height, 0.9 * canvas.width,
                    0.06 * canvas.height};
    const auto fitted = fit_text(*request.content.infographic_title, band.w, band.h, kMinFontPx,
                                 band.h / kLineHeight, true);
    if (fitted.overflow) out.warnings.push_back("ContentOverflow: infographic title truncated");
    const Color ink = contrast_ratio(request.background, Color{0, 0, 0}) >=
                              contrast_ratio(request.background, Color{255, 255, 255})
                          ? Color{0x22, 0x22, 0x22}
                          : Color{0xff, 0xff, 0xff};
    emit_text(layer, fitted, band, ink, true);
    root.children.push_back(std::move(layer));
  }

  std::string doc = serialize(root);
  const auto open_end = doc.find('>');
  doc.insert(open_end + 1, provenance_comment(out.provenance));
  out.svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + doc + "\n";
  return out;
}

AssembledInfographic assemble_from_provenance(const AssetStore& store,
                                              const nlohmann::json& provenance,
                                              const Uploads& uploads) {
  return assemble(store, assembly_request_from_json(provenance), uploads);
}

std::optional<nlohmann::json> extract_provenance(std::string_view svg) {
  const std::string open = "<!--" + std::string(kProvenanceTag);
  const auto start = svg.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  const auto body = start + open.size();
  const auto end = svg.find(" -->", body);
  if (end == std::string_view::npos) return std::nullopt;
  try {
    return nlohmann::json::parse(svg.substr(body, end - body));
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace infoforge
