#include "infoforge/service.hpp"

#include <fmt/format.h>

#include <cstdlib>

namespace infoforge {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";
constexpr const char* kSvg = "image/svg+xml";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), {{"error", {{"code", to_string(code)}, {"message", message}}}});
}

/// Runs a handler, turning exceptions into error bodies.
template <typename F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    send_error(res, e.code(), e.what());
  } catch (const json::exception& e) {
    send_error(res, ErrorCode::kInvalidArgument, e.what());
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(json{{"error", {{"code", "INTERNAL"}, {"message", e.what()}}}}.dump(), kJson);
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  }
  return j;
}

Canvas canvas_from(const json& j) {
  Canvas c;
  if (j.is_string()) {
    c = parse_canvas(j.get<std::string>());
  } else if (j.is_object()) {
    c = {j.at("width").get<int>(), j.at("height").get<int>()};
  } else {
    throw Error(ErrorCode::kInvalidArgument, "canvas must be \"WxH\" or {width, height}");
  }
  c.validate();
  return c;
}

/// {bbox: [x, y, w, h], space: "normalized" | "canvas-px", graphic_ref?, svg?}.
/// An inline svg is stored as an upload and referenced.
PivotPlacement pivot_from(const json& j, const Canvas& canvas, SessionStore* store) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "pivot must be an object");
  const auto b = j.at("bbox").get<std::vector<double>>();
  if (b.size() != 4) throw Error(ErrorCode::kInvalidArgument, "pivot bbox needs 4 numbers");
  const std::string space = j.value("space", std::string("normalized"));
  std::optional<std::string> ref;
  if (j.contains("svg") && !j["svg"].is_null()) {
    if (store == nullptr) throw Error(ErrorCode::kInvalidArgument, "inline pivot svg needs a session");
    ref = store->put_upload(j["svg"].get<std::string>());
  } else if (j.contains("graphic_ref") && !j["graphic_ref"].is_null()) {
    ref = j["graphic_ref"].get<std::string>();
  }
  if (space == "canvas-px") return pivot_from_px({b[0], b[1], b[2], b[3]}, canvas, ref);
  if (space != "normalized") {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown pivot space '{}'", space));
  }
  PivotPlacement p{{b[0], b[1], b[2], b[3]}, ref};
  p.validate();
  return p;
}

ComponentSignature signature_from(const json& j) {
  return {j.value("title", false), j.value("text", false), j.value("label", false),
          j.value("image", false)};
}

/// Overwrites the selections named in `j`; null clears one.
void merge_selections(Selections& s, const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "selections must be an object");
  const Selections given = selections_from_json(j);
  if (j.contains("layout_id")) s.layout_id = given.layout_id;
  if (j.contains("vg_design_id")) s.vg_design_id = given.vg_design_id;
  if (j.contains("connection")) s.connection = given.connection;
  if (j.contains("palette_id")) s.palette_id = given.palette_id;
}

json session_reply(const Session& s, const RecommendationBundle& b) {
  return {{"session", to_json(s)}, {"recommendations", to_json(b)}};
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* v = std::getenv("INFOFORGE_CORPUS")) c.corpus = v;
  if (const char* v = std::getenv("INFOFORGE_STORE")) c.store = v;
  if (const char* v = std::getenv("INFOFORGE_ADDR")) {
    const std::string addr = v;
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("INFOFORGE_ADDR '{}' lacks a port", addr));
    }
    c.host = addr.substr(0, colon);
    try {
      c.port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("INFOFORGE_ADDR '{}' has a bad port", addr));
    }
  }
  return c;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySpec:
    case ErrorCode::kMalformedItem:
    case ErrorCode::kOversizeField:
    case ErrorCode::kStrokeTooShort:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kTooFewSamples:
    case ErrorCode::kNoCandidates:
    case ErrorCode::kNoDesignsForStyle:
    case ErrorCode::kUnplaceable:
    case ErrorCode::kPivotRequired:
    case ErrorCode::kSelectionIncomplete: return 422;
    case ErrorCode::kStorageFull: return 507;
    case ErrorCode::kMissingManifest:
    case ErrorCode::kCorruptAsset: return 500;
  }
  return 500;
}

Service::Service(const Corpus& corpus, SessionStore& store) : corpus_(corpus), store_(store) {}

void Service::install(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                              {"Access-Control-Expose-Headers", kProvenanceHeader}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_mount_point("/assets", corpus_.store.manifest().root.string());

  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      Session s;
      s.markdown = body.at("markdown").get<std::string>();
      s.input.content = parse_markdown(s.markdown);
      if (body.contains("canvas")) s.input.canvas = canvas_from(body["canvas"]);
      s.input.alpha = body.value("alpha", kDefaultAlpha);
      s.input.seed = body.value("seed", std::uint64_t{0});
      if (body.contains("background")) {
        s.input.background = Color::from_hex(body["background"].get<std::string>());
      }
      if (body.contains("pivot") && !body["pivot"].is_null()) {
        s.input.pivot = pivot_from(body["pivot"], s.input.canvas, &store_);
      }
      if (body.contains("sketch") && !body["sketch"].is_null()) {
        s.input.sketch = sketch_from_json(body["sketch"], s.input.canvas);
      }
      const auto bundle = recommend(corpus_, s.input, s.selections);
      s = store_.create(std::move(s));
      send_json(res, 201, session_reply(s, bundle));
    });
  });

  server.Get(R"(/sessions/([0-9A-Z]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, to_json(store_.load(req.matches[1]))); });
  });

  server.Patch(R"(/sessions/([0-9A-Z]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      RecommendationBundle bundle;
      const Session s = store_.update(req.matches[1], [&](Session& s) {
        if (body.contains("markdown")) {
          s.markdown = body["markdown"].get<std::string>();
          s.input.content = parse_markdown(s.markdown);
        }
        if (body.contains("canvas")) s.input.canvas = canvas_from(body["canvas"]);
        if (body.contains("alpha")) s.input.alpha = body["alpha"].get<double>();
        if (body.contains("seed")) s.input.seed = body["seed"].get<std::uint64_t>();
        if (body.contains("background")) {
          s.input.background = Color::from_hex(body["background"].get<std::string>());
        }
        if (body.contains("pivot")) {
          if (body["pivot"].is_null()) {
            s.input.pivot.reset();
            if (s.selections.connection && s.selections.connection->style == ConnectionStyle::kPivot) {
              s.selections.connection.reset();
            }
          } else {
            s.input.pivot = pivot_from(body["pivot"], s.input.canvas, &store_);
          }
        }
        if (body.contains("sketch")) {
          if (body["sketch"].is_null()) {
            s.input.sketch.reset();
          } else {
            s.input.sketch = sketch_from_json(body["sketch"], s.input.canvas);
          }
        }
        if (body.contains("selections")) merge_selections(s.selections, body["selections"]);
        // Rejects the patch, unsaved, if the new state cannot be recommended.
        bundle = recommend(corpus_, s.input, s.selections);
      });
      send_json(res, 200, session_reply(s, bundle));
    });
  });

  server.Get(R"(/sessions/([0-9A-Z]+)/recommendations)",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const Session s = store_.load(req.matches[1]);
                 const auto b = recommend(corpus_, s.input, s.selections);
                 const std::string stage = req.get_param_value("stage");
                 if (stage.empty()) return send_json(res, 200, to_json(b));
                 const json full = to_json(b);
                 if (stage == "layout") return send_json(res, 200, full["layout"]);
                 if (stage == "vg") return send_json(res, 200, full["vgs"]);
                 if (stage == "connection") return send_json(res, 200, full["connections"]);
                 if (stage == "palette") return send_json(res, 200, full["palettes"]);
                 throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown stage '{}'", stage));
               });
             });

  server.Post(R"(/sessions/([0-9A-Z]+)/assemble)",
              [this](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const Session s = store_.load(req.matches[1]);
                  const auto stage = recommend_layouts(
                      corpus_, s.input, static_cast<int>(corpus_.store.layouts().size()));
                  const auto request = assembly_request(s.input, s.selections, stage);
                  const auto out = assemble(corpus_.store, request, store_.uploads_for(s.input.pivot));
                  res.status = 200;
                  res.set_header(kProvenanceHeader, to_json(out.provenance).dump(-1, ' ', true));
                  res.set_content(out.svg, kSvg);
                });
              });

  server.Post("/render", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const auto request = assembly_request_from_json(body.contains("provenance") ? body["provenance"] : body);
      const auto out = assemble(corpus_.store, request, store_.uploads_for(request.pivot));
      res.status = 200;
      res.set_header(kProvenanceHeader, to_json(out.provenance).dump(-1, ' ', true));
      res.set_content(out.svg, kSvg);
    });
  });

  server.Post("/recommend/layouts", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      DesignInput in;
      if (body.contains("canvas")) in.canvas = canvas_from(body["canvas"]);
      if (body.contains("markdown")) {
        in.content = parse_markdown(body["markdown"].get<std::string>());
      } else {
        in.content.items.assign(body.at("n_vgs").get<std::size_t>(), VgContent{});
      }
      in.alpha = body.value("alpha", kDefaultAlpha);
      if (body.contains("pivot") && !body["pivot"].is_null()) {
        in.pivot = pivot_from(body["pivot"], in.canvas, nullptr);
      }
      if (body.contains("sketch") && !body["sketch"].is_null()) {
        in.sketch = sketch_from_json(body["sketch"], in.canvas);
      }
      send_json(res, 200, to_json(recommend_layouts(corpus_, in, body.value("top_k", kBundleLayouts))));
    });
  });

  auto cluster_from = [this](const json& body) {
    if (body.contains("layout_id")) {
      const auto id = body["layout_id"].get<std::string>();
      const auto* l = corpus_.store.layout(id);
      if (l == nullptr) throw Error(ErrorCode::kNotFound, fmt::format("unknown layout '{}'", id));
      return corpus_.cluster_of(*l);
    }
    return body.at("cluster_id").get<int>();
  };

  server.Post("/recommend/vgs", [this, cluster_from](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const ComponentSignature sig =
          body.contains("markdown")
              ? union_signature(parse_markdown(body["markdown"].get<std::string>()))
              : signature_from(body.value("signature", json::object()));
      send_json(res, 200,
                to_json(rank_vgs(corpus_.indices.vg_index, corpus_.store, cluster_from(body), sig,
                                 body.value("top_k", kBundleVgs))));
    });
  });

  server.Post("/recommend/connections",
              [this, cluster_from](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const json body = parse_body(req);
                  send_json(res, 200,
                            to_json(recommend_connections(
                                corpus_, cluster_from(body), body.value("has_pivot", false),
                                body.value("seed", std::uint64_t{0}),
                                body.value("k", kSampledConnectionDesigns))));
                });
              });
}

}  // namespace infoforge
