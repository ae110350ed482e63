#pragma once

// TF-IDF over membership sets: items are documents, VIF cluster ids are
// terms. tf = 1/|set| for members, idf = ln(N/df), score = tf * idf.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace infoforge {

struct ScoredItem {
  std::string id;
  double score = 0;
  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

class TfidfIndex {
 public:
  using Documents = std::map<std::string, std::set<int>>;

  /// Throws Error(kInvalidArgument) on an empty corpus or an empty set.
  static TfidfIndex build(Documents documents);

  const Documents& documents() const { return documents_; }
  int doc_count() const { return static_cast<int>(documents_.size()); }
  /// Number of documents containing `cluster`; 0 if none.
  int df(int cluster) const;
  double idf(int cluster) const;
  /// Zero when the item does not contain `cluster` or is unknown.
  double score(const std::string& item, int cluster) const;

  /// Items containing `cluster`, by (score desc, id asc).
  std::vector<ScoredItem> rank(int cluster) const;

  nlohmann::json to_json() const;
  /// Rebuilds from the stored documents and checks the stored scores.
  static TfidfIndex from_json(const nlohmann::json& j);

 private:
  Documents documents_;
  std::map<int, int> df_;
  std::map<std::string, std::map<int, double>> scores_;
};

}  // namespace infoforge
