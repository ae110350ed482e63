// infoforge: batch generation, re-rendering from provenance, index building
// and the HTTP service.
//
// Exit codes: 0 success, 2 invalid input, 3 pipeline failure.

#include <fmt/format.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "infoforge/service.hpp"

namespace fs = std::filesystem;
using namespace infoforge;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitPipeline = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code(ErrorCode code) {
  const int status = http_status(code);
  return status == 400 || status == 404 ? kExitInvalid : kExitPipeline;
}

/// "file.svg@x,y,w,h" in canvas pixels. The part before '@' is a graphic
/// file, a corpus pivot id, or empty for a bare box.
PivotPlacement parse_pivot(const std::string& arg, const Canvas& canvas, const AssetStore& store,
                           Uploads& uploads) {
  const auto at = arg.rfind('@');
  if (at == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "--pivot expects file.svg@x,y,w,h");
  }
  std::vector<double> box;
  std::stringstream ss(arg.substr(at + 1));
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      box.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("bad pivot box number '{}'", part));
    }
  }
  if (box.size() != 4) throw Error(ErrorCode::kInvalidArgument, "pivot box needs x,y,w,h");
  const std::string source = arg.substr(0, at);
  std::optional<std::string> ref;
  if (!source.empty() && store.pivot(source) != nullptr && !fs::exists(source)) {
    ref = source;
  } else if (!source.empty()) {
    const std::string svg = read_file(source);
    std::string error;
    if (!is_well_formed_xml(svg, &error)) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("{}: {}", source, error));
    }
    ref = upload_ref(svg);
    uploads[*ref] = svg;
  }
  return pivot_from_px({box[0], box[1], box[2], box[3]}, canvas, ref);
}

struct GenerateArgs {
  std::string input;
  std::string canvas = "1200x1600";
  std::string pivot;
  std::string sketch;
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
  int top_k = kDefaultTopK;
  std::string out;
  std::string corpus;
};

int run_generate(const GenerateArgs& args) {
  const Corpus corpus = Corpus::open(args.corpus);
  const fs::path input_path(args.input);
  const std::string markdown = read_file(input_path);

  DesignInput in;
  in.content = parse_markdown(markdown);
  for (const auto& issue : validate_spec(in.content, file_resolver(input_path.parent_path()))) {
    const bool error = issue.severity == Severity::kError;
    std::cerr << fmt::format("{}: item {}: {} {}\n", error ? "error" : "warning", issue.item_index,
                             issue.code, issue.message);
    if (error) return kExitInvalid;
  }
  in.canvas = parse_canvas(args.canvas);
  in.canvas.validate();
  in.alpha = args.alpha;
  in.seed = args.seed;
  Uploads uploads;
  if (!args.pivot.empty()) in.pivot = parse_pivot(args.pivot, in.canvas, corpus.store, uploads);
  if (!args.sketch.empty()) {
    const auto j = nlohmann::json::parse(read_file(args.sketch), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, args.sketch + " is not JSON");
    in.sketch = sketch_from_json(j, in.canvas);
  }

  const auto generation = generate_top_k(corpus, in, args.top_k, uploads);
  for (const auto& note : generation.skipped) std::cerr << "skipped " << note << "\n";

  const fs::path out(args.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kStorageFull, fmt::format("cannot create {}", out.string()));
  for (const auto& [ref, svg] : uploads) write_file_atomic(out / (ref + ".svg"), svg);
  for (std::size_t i = 0; i < generation.outputs.size(); ++i) {
    const auto& result = generation.outputs[i].result;
    const std::string stem = fmt::format("infographic-{}", i + 1);
    write_file_atomic(out / (stem + ".svg"), result.svg);
    write_file_atomic(out / (stem + ".provenance.json"), to_json(result.provenance).dump(2) + "\n");
    for (const auto& w : result.warnings) std::cerr << stem << ": " << w << "\n";
    std::cout << (out / (stem + ".svg")).string() << "  " << result.provenance.layout_id << "  "
              << result.provenance.vg_design_id << "\n";
  }
  return 0;
}

/// Provenance from a .json file or from the comment inside an assembled SVG.
nlohmann::json load_provenance(const fs::path& path) {
  const std::string text = read_file(path);
  if (auto embedded = extract_provenance(text)) return *embedded;
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} holds no provenance", path.string()));
  }
  return j;
}

int run_render(const std::string& provenance, const std::string& uploads_dir,
               const std::string& out, const std::string& corpus_root) {
  const Corpus corpus = Corpus::open(corpus_root);
  const auto request = assembly_request_from_json(load_provenance(provenance));
  Uploads uploads;
  if (request.pivot && request.pivot->graphic_ref) {
    const fs::path dir = uploads_dir.empty() ? fs::path(provenance).parent_path() : fs::path(uploads_dir);
    const fs::path file = dir / (*request.pivot->graphic_ref + ".svg");
    if (fs::exists(file)) uploads[*request.pivot->graphic_ref] = read_file(file);
  }
  const auto result = assemble(corpus.store, request, uploads);
  if (out.empty() || out == "-") {
    std::cout << result.svg;
  } else {
    write_file_atomic(out, result.svg);
  }
  return 0;
}

int run_index_build(const std::string& root, int k, std::uint64_t seed) {
  const AssetStore store = AssetStore::load(root);
  BuildOptions options;
  options.k = k;
  options.seed = seed;
  const IndexBundle bundle = build_indices(store, options);
  write_indices(bundle, root);
  std::cout << fmt::format("{} layouts in {} clusters; indices written to {}\n",
                           bundle.clusters.layout_ids.size(), bundle.clusters.k, root);
  return 0;
}

httplib::Server* g_server = nullptr;

int run_serve(ServiceConfig config) {
  const Corpus corpus = Corpus::open(config.corpus);
  SessionStore store(config.store);
  Service service(corpus, store);
  httplib::Server server;
  service.install(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << fmt::format("serving {} on http://{}:{} (store {})\n", config.corpus.string(),
                           config.host, config.port, config.store.string());
  if (!server.listen(config.host, config.port)) {
    std::cerr << fmt::format("cannot listen on {}:{}\n", config.host, config.port);
    return kExitPipeline;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infoforge: infographic generation from markdown, a pivot and a sketch"};
  app.require_subcommand(1);
  const std::string default_corpus = [] {
    const char* env = std::getenv("INFOFORGE_CORPUS");
    return std::string(env != nullptr ? env : "assets/sample_pack");
  }();

  GenerateArgs gen;
  gen.corpus = default_corpus;
  auto* generate = app.add_subcommand("generate", "Write the top-k infographics for a markdown file");
  generate->add_option("--input", gen.input, "Markdown content")->required();
  generate->add_option("--canvas", gen.canvas, "Canvas size WxH in pixels")->capture_default_str();
  generate->add_option("--pivot", gen.pivot, "Pivot graphic and box: file.svg@x,y,w,h (pixels)");
  generate->add_option("--sketch", gen.sketch, "Stroke JSON {points, space}");
  generate->add_option("--alpha", gen.alpha, "Coverage weight")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed for connection sampling")->capture_default_str();
  generate->add_option("--top-k", gen.top_k, "Number of infographics")->capture_default_str();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--corpus", gen.corpus, "Asset corpus root")->capture_default_str();

  std::string provenance, uploads_dir, render_out, render_corpus = default_corpus;
  auto* render = app.add_subcommand("render", "Re-render an infographic from its provenance");
  render->add_option("--provenance", provenance, "Provenance JSON or an assembled SVG")->required();
  render->add_option("--uploads", uploads_dir, "Directory holding upload-*.svg pivot graphics");
  render->add_option("--out", render_out, "Output SVG (stdout if omitted)");
  render->add_option("--corpus", render_corpus, "Asset corpus root")->capture_default_str();

  std::string index_root = default_corpus;
  int index_k = kDefaultClusterCount;
  std::uint64_t index_seed = 0;
  auto* index = app.add_subcommand("index", "Index maintenance");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Build and write the cluster and TF-IDF indices");
  build->add_option("--corpus", index_root, "Asset corpus root")->capture_default_str();
  build->add_option("--clusters", index_k, "Cluster count")->capture_default_str();
  build->add_option("--seed", index_seed, "Seed for the k-means++ fallback")->capture_default_str();

  ServiceConfig serve_config;
  std::string addr;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service (env INFOFORGE_CORPUS, INFOFORGE_STORE, INFOFORGE_ADDR)");
  serve->add_option("--corpus", serve_config.corpus, "Asset corpus root");
  serve->add_option("--store", serve_config.store, "Session store directory");
  serve->add_option("--addr", addr, "host:port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (render->parsed()) return run_render(provenance, uploads_dir, render_out, render_corpus);
    if (build->parsed()) return run_index_build(index_root, index_k, index_seed);
    if (serve->parsed()) {
      ServiceConfig config = ServiceConfig::from_env();
      if (serve->count("--corpus") > 0) config.corpus = serve_config.corpus;
      if (serve->count("--store") > 0) config.store = serve_config.store;
      if (!addr.empty()) {
        setenv("INFOFORGE_ADDR", addr.c_str(), 1);
        const auto parsed = ServiceConfig::from_env();
        config.host = parsed.host;
        config.port = parsed.port;
      }
      return run_serve(config);
    }
  } catch (const CorruptAssetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d.file << ": " << d.reason << "\n";
    return kExitPipeline;
  } catch (const Error& e) {
    std::cerr << fmt::format("error: {}: {}\n", to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
