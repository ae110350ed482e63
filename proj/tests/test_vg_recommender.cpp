#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "infoforge/corpus.hpp"
#include "infoforge/vg_recommender.hpp"
#include "test_support.hpp"

using namespace infoforge;

namespace {

const AssetStore& pack() {
  static const AssetStore store = AssetStore::load(INFOFORGE_SAMPLE_PACK);
  return store;
}

const IndexBundle& indices() {
  static const IndexBundle bundle = build_indices(pack());
  return bundle;
}

const VgDesign* first_design(bool with_image) {
  for (const auto& d : pack().vgs()) {
    if (d.placeholders.has_image == with_image) return &d;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("rarer membership ranks first") {
  const auto* a = first_design(false);
  const auto* b = first_design(true);
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  const auto index = TfidfIndex::build({{a->id, {1}}, {b->id, {1, 2}}});
  const auto r = rank_vgs(index, pack(), 1, {}, 10);
  REQUIRE(r.designs.size() == 2);
  CHECK(r.designs[0].id == a->id);
  CHECK(r.designs[1].id == b->id);
  CHECK_FALSE(r.relaxed);

  // Only b offers an image slot, so the filter wins over the score.
  const auto img = rank_vgs(index, pack(), 1, {.has_image = true}, 10);
  REQUIRE(img.designs.size() == 1);
  CHECK(img.designs[0].id == b->id);
}

TEST_CASE("a cluster without member designs relaxes to the signature filter") {
  const ComponentSignature sig{.has_title = true};
  const auto r = rank_vgs(indices().vg_index, pack(), 999, sig, 100);
  CHECK(r.relaxed);
  CHECK(r.designs.size() == pack().vgs_matching(sig).size());
  for (const auto& d : r.designs) CHECK(d.score == 0.0);
  CHECK_THROWS_AS(rank_vgs(indices().vg_index, pack(), -1, sig, 4), Error);
  CHECK_THROWS_AS(rank_vgs(indices().vg_index, pack(), 0, sig, 0), Error);
}

TEST_CASE("every ranked design covers the query signature") {
  for (int cluster = 0; cluster < 12; ++cluster) {
    for (int bits = 0; bits < 16; ++bits) {
      const ComponentSignature sig{bool(bits & 1), bool(bits & 2), bool(bits & 4), bool(bits & 8)};
      const auto r = rank_vgs(indices().vg_index, pack(), cluster, sig, 100);
      for (std::size_t i = 0; i < r.designs.size(); ++i) {
        CHECK(pack().vg(r.designs[i].id)->placeholders.covers(sig));
        if (i > 0) CHECK(r.designs[i - 1].score >= r.designs[i].score);
      }
    }
  }
}

TEST_CASE("connection styles for a circular cluster with a pivot") {
  const auto& table = pack().c_vif_table();
  const auto& c = indices().c_index;
  // The clock family is the circular one in the sample pack.
  const int circular = pack().layout("vif-clock-6")->cluster_id.value();

  // Hand computation from the shipped table.
  const double n = static_cast<double>(table.size());
  std::vector<std::pair<double, std::string>> expected;
  for (const auto& [style, clusters] : table) {
    int df = 0;
    for (const auto& [other, cs] : table) df += std::count(cs.begin(), cs.end(), circular) > 0;
    const bool member = std::count(clusters.begin(), clusters.end(), circular) > 0;
    const double score = member ? std::log(n / df) / static_cast<double>(clusters.size()) : 0.0;
    expected.emplace_back(-score, style);
  }
  std::sort(expected.begin(), expected.end());

  const auto ranked = rank_connection_styles(c, circular, true);
  REQUIRE(ranked.size() == 5);
  CHECK(ranked[0].style == ConnectionStyle::kPivot);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(style_name(ranked[i].style) == expected[i].second);
    CHECK(std::abs(ranked[i].score + expected[i].first) < 1e-12);
  }
}

TEST_CASE("without a pivot the Pivot style is not offered") {
  for (int cluster = 0; cluster < 12; ++cluster) {
    const auto ranked = rank_connection_styles(indices().c_index, cluster, false);
    CHECK(ranked.size() == 4);
    std::set<ConnectionStyle> seen;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      CHECK(ranked[i].style != ConnectionStyle::kPivot);
      seen.insert(ranked[i].style);
      if (i > 0) CHECK(ranked[i - 1].score >= ranked[i].score);
    }
    CHECK(seen.size() == 4);
    CHECK(rank_connection_styles(indices().c_index, cluster, true).size() == 5);
  }
}

TEST_CASE("connection design sampling") {
  const auto a = sample_connection_designs(pack(), ConnectionStyle::kRegular, 7, 3);
  const auto b = sample_connection_designs(pack(), ConnectionStyle::kRegular, 7, 3);
  CHECK(a == b);
  CHECK(a.size() == 3);
  CHECK(std::set<const ConnectionDesign*>(a.begin(), a.end()).size() == 3);
  for (const auto* d : a) CHECK(d->style == ConnectionStyle::kRegular);

  const auto available = pack().connections_of(ConnectionStyle::kPivot).size();
  CHECK(sample_connection_designs(pack(), ConnectionStyle::kPivot, 1, 50).size() == available);

  std::set<std::vector<const ConnectionDesign*>> draws;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    draws.insert(sample_connection_designs(pack(), ConnectionStyle::kRegular, seed, 2));
  }
  CHECK(draws.size() > 1);

  CHECK_THROWS_AS(sample_connection_designs(pack(), ConnectionStyle::kRegular, 1, 0), Error);
  const auto bare = AssetStore::from_layouts({});
  try {
    sample_connection_designs(bare, ConnectionStyle::kRegular, 1, 1);
    FAIL("expected NoDesignsForStyle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoDesignsForStyle);
  }
}
