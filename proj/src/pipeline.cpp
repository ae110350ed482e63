#include "infoforge/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace infoforge {

namespace {

nlohmann::json optional_json(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

const VifLayout& layout_by_id(const Corpus& corpus, const std::string& id) {
  const auto* l = corpus.store.layout(id);
  if (l == nullptr) throw Error(ErrorCode::kNotFound, fmt::format("unknown layout '{}'", id));
  return *l;
}

/// First style that renders: None, or one the store has designs for.
ConnectionStyle usable_style(const Corpus& corpus, const std::vector<StyleScore>& styles) {
  for (const auto& s : styles) {
    if (s.style == ConnectionStyle::kNone) return s.style;
    if (!corpus.store.connections_of(s.style).empty()) return s.style;
  }
  return ConnectionStyle::kNone;
}

}  // namespace

LayoutStage recommend_layouts(const Corpus& corpus, const DesignInput& input, int top_k) {
  if (input.content.items.empty()) throw Error(ErrorCode::kEmptySpec, "content has no items");
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");
  if (input.pivot) input.pivot->validate();
  const EnergyWeights weights{input.alpha};
  weights.validate();
  const int n = static_cast<int>(input.content.items.size());

  LayoutStage out;
  if (input.sketch) {
    out.from_sketch = true;
    const auto result = match_sketch(corpus.store, *input.sketch, n, top_k, input.pivot);
    out.sketch_positions = result.positions;
    auto candidate = [&](const SketchMatch& m) {
      return LayoutCandidate{score_layout(layout_by_id(corpus, m.layout_id), input.pivot, weights),
                             m.distance};
    };
    for (const auto& m : result.matches) out.layouts.push_back(candidate(m));
    for (const auto& m : result.gated_out) out.gated_out.push_back(candidate(m));
    return out;
  }
  LayoutQuery query;
  query.n_vgs = n;
  query.weights = weights;
  query.top_k = top_k;
  query.allow_truncation = true;
  auto ranking = rank_layouts(corpus.store, input.pivot, query);
  out.truncated = ranking.truncated;
  for (auto& s : ranking.scores) out.layouts.push_back({std::move(s), std::nullopt});
  return out;
}

ConnectionStage recommend_connections(const Corpus& corpus, int cluster_id, bool has_pivot,
                                      std::uint64_t seed, int k) {
  ConnectionStage out;
  out.styles = rank_connection_styles(corpus.indices.c_index, cluster_id, has_pivot);
  out.style = usable_style(corpus, out.styles);
  if (out.style != ConnectionStyle::kNone) {
    for (const auto* d : sample_connection_designs(corpus.store, out.style, seed, k)) {
      out.design_ids.push_back(d->id);
    }
  }
  return out;
}

RecommendationBundle recommend(const Corpus& corpus, const DesignInput& input,
                               const Selections& selections, int layout_count) {
  RecommendationBundle out;
  out.layout = recommend_layouts(corpus, input, layout_count);
  if (selections.layout_id) {
    layout_by_id(corpus, *selections.layout_id);
    out.layout_id = selections.layout_id;
  } else {
    for (const auto& c : out.layout.layouts) {
      if (c.score.e_o == 1) {
        out.layout_id = c.score.layout_id;
        break;
      }
    }
  }
  if (!out.layout_id) return out;

  out.cluster_id = corpus.cluster_of(layout_by_id(corpus, *out.layout_id));
  out.vgs = rank_vgs(corpus.indices.vg_index, corpus.store, out.cluster_id,
                     union_signature(input.content), kBundleVgs);
  if (selections.vg_design_id && corpus.store.vg(*selections.vg_design_id) == nullptr) {
    throw Error(ErrorCode::kNotFound,
                fmt::format("unknown VG design '{}'", *selections.vg_design_id));
  }
  out.connections = recommend_connections(corpus, out.cluster_id, input.pivot.has_value(),
                                          input.seed);
  if (selections.connection) {
    const auto& c = *selections.connection;
    if (c.style == ConnectionStyle::kPivot && !input.pivot) {
      throw Error(ErrorCode::kPivotRequired, "Pivot connections need a pivot");
    }
    if (c.design_id && corpus.store.connection(*c.design_id) == nullptr) {
      throw Error(ErrorCode::kNotFound, fmt::format("unknown connection '{}'", *c.design_id));
    }
  }
  if (selections.palette_id && corpus.store.palette(*selections.palette_id) == nullptr) {
    throw Error(ErrorCode::kNotFound, fmt::format("unknown palette '{}'", *selections.palette_id));
  }
  out.palettes = rank_palettes(corpus.store.palettes(), input.background);
  return out;
}

AssemblyRequest assembly_request(const DesignInput& input, const Selections& selections,
                                 const LayoutStage& stage) {
  std::vector<std::string> missing;
  if (!selections.layout_id) missing.emplace_back("layout_id");
  if (!selections.vg_design_id) missing.emplace_back("vg_design_id");
  if (!missing.empty()) {
    throw Error(ErrorCode::kSelectionIncomplete,
                fmt::format("missing selections: {}", fmt::join(missing, ", ")));
  }
  AssemblyRequest r;
  r.canvas = input.canvas;
  r.content = input.content;
  r.layout_id = *selections.layout_id;
  r.truncate_layout = std::any_of(stage.layouts.begin(), stage.layouts.end(), [&](const auto& c) {
    return c.score.layout_id == r.layout_id && c.score.truncated;
  });
  r.vg_design_id = *selections.vg_design_id;
  r.pivot = input.pivot;
  if (selections.connection) r.connection = *selections.connection;
  r.palette_id = selections.palette_id;
  r.background = input.background;
  r.alpha = input.alpha;
  r.seed = input.seed;
  return r;
}

Generation generate_top_k(const Corpus& corpus, const DesignInput& input, int top_k,
                          const Uploads& uploads) {
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");
  // Every candidate, so unplaceable ones can be replaced by the next.
  const auto stage = recommend_layouts(
      corpus, input, std::max<int>(top_k, static_cast<int>(corpus.store.layouts().size())));
  const auto sig = union_signature(input.content);

  Generation out;
  for (const auto& candidate : stage.layouts) {
    if (static_cast<int>(out.outputs.size()) == top_k) break;
    const auto& id = candidate.score.layout_id;
    if (candidate.score.e_o == 0) {
      out.skipped.push_back(fmt::format("{}: overlaps the pivot", id));
      continue;
    }
    const int cluster = corpus.cluster_of(layout_by_id(corpus, id));
    const auto vgs = rank_vgs(corpus.indices.vg_index, corpus.store, cluster, sig, 1);
    if (vgs.designs.empty()) {
      out.skipped.push_back(fmt::format("{}: no VG design offers the needed slots", id));
      continue;
    }
    const auto styles =
        rank_connection_styles(corpus.indices.c_index, cluster, input.pivot.has_value());
    Selections sel;
    sel.layout_id = id;
    sel.vg_design_id = vgs.designs.front().id;
    sel.connection = ConnectionChoice{usable_style(corpus, styles), std::nullopt};
    try {
      out.outputs.push_back({candidate, assemble(corpus.store, assembly_request(input, sel, stage),
                                                 uploads)});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnplaceable) throw;
      out.skipped.push_back(fmt::format("{}: {}", id, e.what()));
    }
  }
  if (out.outputs.empty()) {
    throw Error(ErrorCode::kNoCandidates, "no candidate layout could be assembled");
  }
  return out;
}

PointList sketch_from_json(const nlohmann::json& j, const Canvas& canvas) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "sketch needs a points array");
  }
  const std::string space = j.value("space", std::string("canvas-px"));
  if (space != "canvas-px" && space != "normalized") {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown sketch space '{}'", space));
  }
  const double sx = space == "canvas-px" ? canvas.width : 1.0;
  const double sy = space == "canvas-px" ? canvas.height : 1.0;
  PointList out;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::kInvalidArgument, "sketch points must be [x, y] pairs");
    }
    out.emplace_back(p[0].get<double>() / sx, p[1].get<double>() / sy);
  }
  return out;
}

PivotPlacement pivot_from_px(const BBox& px, const Canvas& canvas,
                             std::optional<std::string> graphic_ref) {
  PivotPlacement p{{px.x / canvas.width, px.y / canvas.height, px.w / canvas.width,
                    px.h / canvas.height},
                   std::move(graphic_ref)};
  p.validate();
  return p;
}

nlohmann::json to_json(const LayoutCandidate& c) {
  const auto& s = c.score;
  nlohmann::json j{{"layout_id", s.layout_id},
                   {"e_l", s.e_l},
                   {"e_o", s.e_o},
                   {"e_c", s.e_c},
                   {"uniformity", s.uniformity},
                   {"e_u_raw", s.e_u_raw},
                   {"mean_distance", s.mean_distance},
                   {"vg_count", s.vg_count},
                   {"truncated", s.truncated}};
  j["distance"] = c.distance ? nlohmann::json(*c.distance) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const LayoutStage& s) {
  nlohmann::json j{{"from_sketch", s.from_sketch}, {"truncated", s.truncated}};
  j["layouts"] = nlohmann::json::array();
  for (const auto& c : s.layouts) j["layouts"].push_back(to_json(c));
  j["gated_out"] = nlohmann::json::array();
  for (const auto& c : s.gated_out) j["gated_out"].push_back(to_json(c));
  j["sketch_positions"] = nlohmann::json::array();
  for (const auto& p : s.sketch_positions) j["sketch_positions"].push_back({p.x(), p.y()});
  return j;
}

nlohmann::json to_json(const ConnectionStage& s) {
  nlohmann::json j{{"style", style_name(s.style)}, {"design_ids", s.design_ids}};
  j["styles"] = nlohmann::json::array();
  for (const auto& st : s.styles) {
    j["styles"].push_back({{"style", style_name(st.style)}, {"score", st.score}});
  }
  return j;
}

nlohmann::json to_json(const VgRanking& r) {
  nlohmann::json j{{"cluster_id", r.cluster_id}, {"relaxed", r.relaxed}};
  j["signature"] = {{"title", r.signature.has_title},
                    {"text", r.signature.has_text},
                    {"label", r.signature.has_label},
                    {"image", r.signature.has_image}};
  j["designs"] = nlohmann::json::array();
  for (const auto& d : r.designs) j["designs"].push_back({{"id", d.id}, {"score", d.score}});
  return j;
}

nlohmann::json to_json(const PaletteChoice& p) {
  return {{"id", p.palette->id},
          {"score", p.score},
          {"min_contrast", p.min_contrast},
          {"accessible", p.accessible}};
}

nlohmann::json to_json(const RecommendationBundle& b) {
  nlohmann::json j{{"layout", to_json(b.layout)}, {"layout_id", optional_json(b.layout_id)}};
  j["cluster_id"] = b.layout_id ? nlohmann::json(b.cluster_id) : nlohmann::json(nullptr);
  j["vgs"] = b.vgs ? to_json(*b.vgs) : nlohmann::json(nullptr);
  j["connections"] = b.connections ? to_json(*b.connections) : nlohmann::json(nullptr);
  j["palettes"] = nlohmann::json::array();
  for (const auto& p : b.palettes) j["palettes"].push_back(to_json(p));
  return j;
}

nlohmann::json to_json(const Selections& s) {
  nlohmann::json j{{"layout_id", optional_json(s.layout_id)},
                   {"vg_design_id", optional_json(s.vg_design_id)},
                   {"palette_id", optional_json(s.palette_id)}};
  if (s.connection) {
    j["connection"] = {{"style", style_name(s.connection->style)},
                       {"design_id", optional_json(s.connection->design_id)}};
  } else {
    j["connection"] = nullptr;
  }
  return j;
}

Selections selections_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "selections must be an object");
  auto opt = [&](const nlohmann::json& o, const char* key) -> std::optional<std::string> {
    if (!o.contains(key) || o[key].is_null()) return std::nullopt;
    if (!o[key].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("'{}' must be a string", key));
    }
    return o[key].get<std::string>();
  };
  Selections s;
  s.layout_id = opt(j, "layout_id");
  s.vg_design_id = opt(j, "vg_design_id");
  s.palette_id = opt(j, "palette_id");
  if (j.contains("connection") && !j["connection"].is_null()) {
    const auto& c = j["connection"];
    const auto name = c.is_object() ? opt(c, "style") : std::nullopt;
    const auto style = name ? parse_style(*name) : std::nullopt;
    if (!style) throw Error(ErrorCode::kInvalidArgument, "connection needs a known style");
    s.connection = ConnectionChoice{*style, opt(c, "design_id")};
  }
  return s;
}

}  // namespace infoforge
