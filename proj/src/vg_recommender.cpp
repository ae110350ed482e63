#include "infoforge/vg_recommender.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace infoforge {

VgRanking rank_vgs(const TfidfIndex& index, const AssetStore& store, int cluster_id,
                   const ComponentSignature& signature, int top_k) {
  if (cluster_id < 0) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid cluster id {}", cluster_id));
  }
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");

  VgRanking out;
  out.cluster_id = cluster_id;
  out.signature = signature;
  const auto admissible = store.vgs_matching(signature);
  for (const auto& item : index.rank(cluster_id)) {
    const bool fits = std::any_of(admissible.begin(), admissible.end(),
                                  [&](const VgDesign* d) { return d->id == item.id; });
    if (fits) out.designs.push_back(item);
  }
  if (out.designs.empty()) {
    out.relaxed = true;
    for (const auto* d : admissible) out.designs.push_back({d->id, 0.0});
  }
  if (static_cast<int>(out.designs.size()) > top_k) out.designs.resize(top_k);
  return out;
}

std::vector<StyleScore> rank_connection_styles(const TfidfIndex& index, int cluster_id,
                                               bool has_pivot) {
  if (cluster_id < 0) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid cluster id {}", cluster_id));
  }
  std::vector<StyleScore> out;
  for (const auto style : kAllStyles) {
    if (style == ConnectionStyle::kPivot && !has_pivot) continue;
    out.push_back({style, index.score(std::string(style_name(style)), cluster_id)});
  }
  std::sort(out.begin(), out.end(), [](const StyleScore& a, const StyleScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return style_name(a.style) < style_name(b.style);
  });
  return out;
}

std::vector<const ConnectionDesign*> sample_connection_designs(const AssetStore& store,
                                                               ConnectionStyle style,
                                                               std::uint64_t seed, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  auto pool = store.connections_of(style);
  if (pool.empty()) {
    throw Error(ErrorCode::kNoDesignsForStyle,
                fmt::format("no connection designs of style {}", style_name(style)));
  }
  // Partial Fisher-Yates with plain modulo draws, so the sequence is the
  // same on every standard library.
  std::mt19937_64 rng(seed);
  const std::size_t take = std::min(pool.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

}  // namespace infoforge
