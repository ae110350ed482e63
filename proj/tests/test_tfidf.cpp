#include <cmath>
#include <random>

#include "doctest.h"
#include "infoforge/tfidf.hpp"
#include "test_support.hpp"

using namespace infoforge;

namespace {

std::size_t position(const std::vector<ScoredItem>& ranking, const std::string& id) {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (ranking[i].id == id) return i;
  }
  return ranking.size();
}

}  // namespace

TEST_CASE("three-document example") {
  const auto index = TfidfIndex::build({{"A", {1}}, {"B", {1, 2}}, {"C", {2}}});
  CHECK(index.score("A", 1) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(index.score("B", 1) == doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-12));
  CHECK(index.score("C", 1) == 0.0);
  const auto ranked = index.rank(1);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].id == "A");
  CHECK(ranked[1].id == "B");
}

TEST_CASE("an item whose clusters appear everywhere scores zero") {
  const auto index = TfidfIndex::build({{"A", {1, 2}}, {"B", {1, 2}}, {"C", {1, 2, 3}}});
  CHECK(index.score("A", 1) == 0.0);
  CHECK(index.score("A", 2) == 0.0);
  CHECK(index.score("C", 3) > 0.0);
}

TEST_CASE("single item, single cluster") {
  const auto index = TfidfIndex::build({{"only", {5}}});
  CHECK(index.score("only", 5) == 0.0);
  const auto ranked = index.rank(5);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].id == "only");
}

TEST_CASE("ten-item corpus against hand-computed scores") {
  // df: c0=4 c1=3 c2=5 c3=3 c4=1 c5=3, N=10.
  const TfidfIndex::Documents complete{
      {"i0", {0, 2}},    {"i1", {0, 1, 2}}, {"i2", {2}},       {"i3", {3, 4}}, {"i4", {0, 5}},
      {"i5", {1, 2, 5}}, {"i6", {0}},       {"i7", {1, 3, 5}}, {"i8", {2}},    {"i9", {3}}};
  const auto index = TfidfIndex::build(complete);

  const double n = 10;
  const std::map<int, double> idf{{0, std::log(n / 4)}, {1, std::log(n / 3)}, {2, std::log(n / 5)},
                                  {3, std::log(n / 3)}, {4, std::log(n / 1)}, {5, std::log(n / 3)}};
  for (const auto& [c, expected] : idf) CHECK(std::abs(index.idf(c) - expected) < 1e-12);

  const std::map<std::pair<std::string, int>, double> hand{
      {{"i0", 0}, std::log(10.0 / 4) / 2}, {{"i0", 2}, std::log(10.0 / 5) / 2},
      {{"i1", 0}, std::log(10.0 / 4) / 3}, {{"i1", 1}, std::log(10.0 / 3) / 3},
      {{"i1", 2}, std::log(10.0 / 5) / 3}, {{"i2", 2}, std::log(10.0 / 5)},
      {{"i3", 3}, std::log(10.0 / 3) / 2}, {{"i3", 4}, std::log(10.0) / 2},
      {{"i4", 0}, std::log(10.0 / 4) / 2}, {{"i4", 5}, std::log(10.0 / 3) / 2},
      {{"i5", 1}, std::log(10.0 / 3) / 3}, {{"i5", 2}, std::log(10.0 / 5) / 3},
      {{"i5", 5}, std::log(10.0 / 3) / 3}, {{"i6", 0}, std::log(10.0 / 4)},
      {{"i7", 1}, std::log(10.0 / 3) / 3}, {{"i7", 3}, std::log(10.0 / 3) / 3},
      {{"i7", 5}, std::log(10.0 / 3) / 3}, {{"i8", 2}, std::log(10.0 / 5)},
      {{"i9", 3}, std::log(10.0 / 3)}};
  for (const auto& [key, expected] : hand) {
    CHECK(std::abs(index.score(key.first, key.second) - expected) < 1e-9);
  }
  for (const auto& [id, clusters] : complete) {
    for (int c = 0; c < 6; ++c) CHECK((index.score(id, c) > 0) == (clusters.count(c) > 0));
  }

  // Equal scores (i5 and i7 for c1; i1 has the same) fall back to id order.
  const auto c1 = index.rank(1);
  REQUIRE(c1.size() == 3);
  CHECK(c1[0].id == "i1");
  CHECK(c1[1].id == "i5");
  CHECK(c1[2].id == "i7");
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(TfidfIndex::build({}), Error);
  CHECK_THROWS_AS(TfidfIndex::build({{"a", {}}}), Error);
}

TEST_CASE("dropping other memberships never lowers an item's rank") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> cluster(0, 11);
  for (int trial = 0; trial < 1000; ++trial) {
    TfidfIndex::Documents docs;
    const int items = 3 + trial % 15;
    for (int i = 0; i < items; ++i) {
      auto& set = docs["vg" + std::to_string(i)];
      const int size = 1 + static_cast<int>(rng() % 5);
      while (static_cast<int>(set.size()) < size) set.insert(cluster(rng));
    }
    // Pick an item with more than one cluster and query one of them.
    std::vector<std::string> multi;
    for (const auto& [id, set] : docs) {
      if (set.size() > 1) multi.push_back(id);
    }
    if (multi.empty()) continue;
    const std::string item = multi[rng() % multi.size()];
    std::vector<int> own(docs[item].begin(), docs[item].end());
    const int query = own[rng() % own.size()];
    int drop = query;
    while (drop == query) drop = own[rng() % own.size()];

    const auto before = TfidfIndex::build(docs);
    auto mutated = docs;
    mutated[item].erase(drop);
    const auto after = TfidfIndex::build(mutated);

    CHECK(position(after.rank(query), item) <= position(before.rank(query), item));
    CHECK(after.score(item, query) >= before.score(item, query));
  }
}

TEST_CASE("at fixed tf, score falls as the cluster becomes common") {
  for (int df = 1; df < 10; ++df) {
    TfidfIndex::Documents docs;
    for (int i = 0; i < 10; ++i) docs["d" + std::to_string(i)] = {i < df ? 0 : 1};
    TfidfIndex::Documents more = docs;
    more["d" + std::to_string(df)] = {0};
    CHECK(TfidfIndex::build(more).score("d0", 0) <= TfidfIndex::build(docs).score("d0", 0));
  }
}

TEST_CASE("json round trip and stale-score detection") {
  const auto index = TfidfIndex::build({{"A", {1}}, {"B", {1, 2}}, {"C", {2}}});
  const auto j = index.to_json();
  const auto back = TfidfIndex::from_json(j);
  CHECK(back.documents() == index.documents());
  CHECK(back.to_json() == j);
  auto stale = j;
  stale["scores"]["A"]["1"] = 9.0;
  CHECK_THROWS_AS(TfidfIndex::from_json(stale), Error);
}
