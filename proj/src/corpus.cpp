#include "infoforge/corpus.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace infoforge {
namespace {

namespace fs = std::filesystem;

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, fmt::format("{} not found", path.string()));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptAsset, fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace

IndexBundle build_indices(const AssetStore& store, const BuildOptions& options) {
  IndexBundle bundle;
  bundle.clusters = build_cluster_model(store.layouts(), options);

  TfidfIndex::Documents vg_docs;
  for (const auto& d : store.vgs()) vg_docs[d.id] = {d.clusters.begin(), d.clusters.end()};
  bundle.vg_index = TfidfIndex::build(std::move(vg_docs));

  TfidfIndex::Documents c_docs;
  for (const auto& [style, clusters] : store.c_vif_table()) {
    c_docs[style] = {clusters.begin(), clusters.end()};
  }
  bundle.c_index = TfidfIndex::build(std::move(c_docs));
  return bundle;
}

void write_indices(const IndexBundle& bundle, const fs::path& root) {
  write_file_atomic(root / kClusterModelFile, to_json(bundle.clusters).dump() + "\n");
  write_file_atomic(root / kVgIndexFile, bundle.vg_index.to_json().dump(2) + "\n");
  write_file_atomic(root / kCIndexFile, bundle.c_index.to_json().dump(2) + "\n");
}

IndexBundle load_indices(const fs::path& root) {
  IndexBundle bundle;
  bundle.clusters = cluster_model_from_json(read_json(root / kClusterModelFile));
  bundle.vg_index = TfidfIndex::from_json(read_json(root / kVgIndexFile));
  bundle.c_index = TfidfIndex::from_json(read_json(root / kCIndexFile));
  return bundle;
}

Corpus Corpus::open(const fs::path& root) {
  Corpus corpus{AssetStore::load(root), {}, false};
  const bool on_disk = fs::exists(root / kClusterModelFile) && fs::exists(root / kVgIndexFile) &&
                       fs::exists(root / kCIndexFile);
  if (on_disk) {
    corpus.indices = load_indices(root);
    corpus.indices_from_disk = true;
  } else {
    corpus.indices = build_indices(corpus.store);
  }
  return corpus;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kStorageFull, fmt::format("cannot write {}", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kStorageFull, fmt::format("cannot replace {}: {}", path.string(), ec.message()));
  }
}

}  // namespace infoforge
