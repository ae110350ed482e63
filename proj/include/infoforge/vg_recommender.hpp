#pragma once

// VG design and connection-style ranking for a chosen layout cluster, read
// off the TF-IDF indices.

#include <cstdint>
#include <string>
#include <vector>

#include "infoforge/asset_store.hpp"
#include "infoforge/tfidf.hpp"

namespace infoforge {

struct VgRanking {
  /// (score desc, id asc). Every design covers `signature`.
  std::vector<ScoredItem> designs;
  int cluster_id = 0;
  ComponentSignature signature;
  /// No design both covers the signature and belongs to the cluster, so
  /// signature-only candidates are listed with score 0.
  bool relaxed = false;
};

/// Throws Error(kInvalidArgument) for a negative cluster or top_k < 1.
VgRanking rank_vgs(const TfidfIndex& index, const AssetStore& store, int cluster_id,
                   const ComponentSignature& signature, int top_k);

struct StyleScore {
  ConnectionStyle style = ConnectionStyle::kNone;
  double score = 0;
  friend bool operator==(const StyleScore&, const StyleScore&) = default;
};

/// All admissible styles by (score desc, name asc); Pivot is left out
/// without a pivot. `index` is keyed by style name.
std::vector<StyleScore> rank_connection_styles(const TfidfIndex& index, int cluster_id,
                                               bool has_pivot);

/// Up to k designs of `style`, drawn without replacement from a
/// mt19937_64 seeded with `seed`. Throws Error(kNoDesignsForStyle) when the
/// store has none and Error(kInvalidArgument) for k < 1.
std::vector<const ConnectionDesign*> sample_connection_designs(const AssetStore& store,
                                                               ConnectionStyle style,
                                                               std::uint64_t seed, int k);

}  // namespace infoforge
