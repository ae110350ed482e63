#include "infoforge/tfidf.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "infoforge/error.hpp"

namespace infoforge {

TfidfIndex TfidfIndex::build(Documents documents) {
  if (documents.empty()) throw Error(ErrorCode::kInvalidArgument, "TF-IDF index needs documents");
  TfidfIndex index;
  for (const auto& [id, clusters] : documents) {
    if (clusters.empty()) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("document '{}' has no clusters", id));
    }
    for (int c : clusters) ++index.df_[c];
  }
  const double n = static_cast<double>(documents.size());
  for (const auto& [id, clusters] : documents) {
    const double tf = 1.0 / static_cast<double>(clusters.size());
    auto& row = index.scores_[id];
    for (int c : clusters) row[c] = tf * std::log(n / index.df_.at(c));
  }
  index.documents_ = std::move(documents);
  return index;
}

int TfidfIndex::df(int cluster) const {
  const auto it = df_.find(cluster);
  return it == df_.end() ? 0 : it->second;
}

double TfidfIndex::idf(int cluster) const {
  const int d = df(cluster);
  return d == 0 ? 0.0 : std::log(static_cast<double>(doc_count()) / d);
}

double TfidfIndex::score(const std::string& item, int cluster) const {
  const auto row = scores_.find(item);
  if (row == scores_.end()) return 0.0;
  const auto it = row->second.find(cluster);
  return it == row->second.end() ? 0.0 : it->second;
}

std::vector<ScoredItem> TfidfIndex::rank(int cluster) const {
  std::vector<ScoredItem> out;
  for (const auto& [id, row] : scores_) {
    if (const auto it = row.find(cluster); it != row.end()) out.push_back({id, it->second});
  }
  // Ids arrive sorted, so a stable sort on score alone gives the id tie-break.
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredItem& a, const ScoredItem& b) { return a.score > b.score; });
  return out;
}

nlohmann::json TfidfIndex::to_json() const {
  nlohmann::json docs = nlohmann::json::object();
  for (const auto& [id, clusters] : documents_) docs[id] = clusters;
  nlohmann::json df = nlohmann::json::object();
  for (const auto& [c, d] : df_) df[std::to_string(c)] = d;
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& [id, row] : scores_) {
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [c, s] : row) r[std::to_string(c)] = s;
    scores[id] = std::move(r);
  }
  return {{"doc_count", doc_count()}, {"documents", docs}, {"df", df}, {"scores", scores}};
}

TfidfIndex TfidfIndex::from_json(const nlohmann::json& j) {
  Documents docs;
  try {
    for (const auto& [id, clusters] : j.at("documents").items()) {
      docs[id] = clusters.get<std::set<int>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptAsset, fmt::format("TF-IDF index: {}", e.what()));
  }
  auto index = build(std::move(docs));
  if (const auto it = j.find("scores"); it != j.end()) {
    for (const auto& [id, row] : it->items()) {
      for (const auto& [c, s] : row.items()) {
        if (std::abs(index.score(id, std::stoi(c)) - s.get<double>()) > 1e-12) {
          throw Error(ErrorCode::kCorruptAsset,
                      fmt::format("TF-IDF index: stored score for ({}, {}) is stale", id, c));
        }
      }
    }
  }
  return index;
}

}  // namespace infoforge
