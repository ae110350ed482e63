#pragma once

// An asset store together with its three indices, as consumed at request
// time. Index files live next to the manifest:
//   cluster_model.json   PCA basis, planar embedding, cluster assignments
//   vg_vif_index.json    TF-IDF over VG designs x VIF clusters
//   c_vif_index.json     TF-IDF over the five connection-style classes

#include <filesystem>
#include <string_view>

#include "infoforge/asset_store.hpp"
#include "infoforge/index_builder.hpp"
#include "infoforge/tfidf.hpp"

namespace infoforge {

inline constexpr const char* kClusterModelFile = "cluster_model.json";
inline constexpr const char* kVgIndexFile = "vg_vif_index.json";
inline constexpr const char* kCIndexFile = "c_vif_index.json";

/// Writes through `<path>.tmp` and a rename. Throws Error(kStorageFull).
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

struct IndexBundle {
  ClusterModel clusters;
  TfidfIndex vg_index;
  TfidfIndex c_index;
};

IndexBundle build_indices(const AssetStore& store, const BuildOptions& options = {});

/// Writes the three index files under `root`, each through a temporary
/// file and a rename.
void write_indices(const IndexBundle& bundle, const std::filesystem::path& root);

/// Throws Error(kNotFound) when any of the three files is missing.
IndexBundle load_indices(const std::filesystem::path& root);

struct Corpus {
  AssetStore store;
  IndexBundle indices;
  /// False when the index files were absent and indices were built in memory.
  bool indices_from_disk = false;

  static Corpus open(const std::filesystem::path& root);

  int cluster_of(const VifLayout& layout) const { return assign_cluster(indices.clusters, layout); }
};

}  // namespace infoforge
