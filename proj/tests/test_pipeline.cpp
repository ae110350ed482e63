#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "infoforge/pipeline.hpp"
#include "test_support.hpp"

using namespace infoforge;

namespace {

const Corpus& corpus() {
  static const Corpus c = Corpus::open(INFOFORGE_SAMPLE_PACK);
  return c;
}

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(INFOFORGE_FIXTURES) + "/" + name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DesignInput fixture_input(const std::string& markdown) {
  DesignInput in;
  in.content = parse_markdown(slurp(markdown));
  in.seed = 11;
  return in;
}

const Canvas kCanvas{1200, 1600};
const BBox kCenterPivotPx{450, 650, 300, 300};

}  // namespace

TEST_CASE("bundle for four text items lists at least four layouts of four points") {
  const auto in = fixture_input("uc1_timeline.md");
  const auto b = recommend(corpus(), in, {});
  REQUIRE(b.layout.layouts.size() >= 4);
  for (const auto& c : b.layout.layouts) CHECK(c.score.vg_count == 4);
  for (std::size_t i = 1; i < b.layout.layouts.size(); ++i) {
    CHECK(b.layout.layouts[i - 1].score.e_l >= b.layout.layouts[i].score.e_l);
  }
  REQUIRE(b.layout_id);
  CHECK(*b.layout_id == b.layout.layouts.front().score.layout_id);
  REQUIRE(b.vgs);
  CHECK_FALSE(b.vgs->designs.empty());
  REQUIRE(b.connections);
  for (const auto& s : b.connections->styles) CHECK(s.style != ConnectionStyle::kPivot);
  CHECK(b.palettes.size() == corpus().store.palettes().size());
}

TEST_CASE("a pivot over a layout point zeroes that layout in the bundle") {
  auto in = fixture_input("uc1_timeline.md");
  // Covers (0.5, 0.16), the first point of vif-clock-4 and vif-star-4.
  in.pivot = PivotPlacement{{0.45, 0.1, 0.1, 0.1}, std::nullopt};
  const auto b = recommend(corpus(), in, {}, 100);
  std::set<std::string> zeroed;
  for (const auto& c : b.layout.layouts) {
    if (c.score.e_o == 0) {
      CHECK(c.score.e_l == 0.0);
      zeroed.insert(c.score.layout_id);
    }
  }
  CHECK(zeroed.count("vif-clock-4") == 1);
  CHECK(zeroed.count("vif-zigzag-4") == 0);
  REQUIRE(b.layout_id);
  CHECK(zeroed.count(*b.layout_id) == 0);
}

TEST_CASE("stage-2 selections leave stage-1 rankings alone") {
  const auto in = fixture_input("uc2_water_cycle.md");
  const auto plain = recommend(corpus(), in, {});
  Selections sel;
  sel.layout_id = plain.layout.layouts.back().score.layout_id;
  sel.vg_design_id = plain.vgs->designs.back().id;
  sel.connection = ConnectionChoice{ConnectionStyle::kRegular, std::nullopt};
  const auto chosen = recommend(corpus(), in, sel);
  CHECK(to_json(chosen.layout) == to_json(plain.layout));
  CHECK(*chosen.layout_id == *sel.layout_id);
}

TEST_CASE("unknown selections and a pivot style without pivot are rejected") {
  const auto in = fixture_input("uc1_timeline.md");
  Selections sel;
  sel.layout_id = "vif-nope";
  CHECK_THROWS_AS(recommend(corpus(), in, sel), Error);
  sel.layout_id.reset();
  sel.connection = ConnectionChoice{ConnectionStyle::kPivot, std::nullopt};
  try {
    recommend(corpus(), in, sel);
    FAIL("expected PivotRequired");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPivotRequired);
  }
}

TEST_CASE("assembly request needs layout and VG selections") {
  const auto in = fixture_input("uc1_timeline.md");
  try {
    assembly_request(in, {}, {});
    FAIL("expected SelectionIncomplete");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSelectionIncomplete);
  }
}

TEST_CASE("top-4 generation for the three use cases") {
  SUBCASE("four text items, no design input") {
    const auto in = fixture_input("uc1_timeline.md");
    const auto g = generate_top_k(corpus(), in, 4);
    REQUIRE(g.outputs.size() == 4);
    std::set<std::string> layouts;
    for (const auto& o : g.outputs) {
      layouts.insert(o.result.provenance.layout_id);
      CHECK(o.result.transforms.size() == 4);
      CHECK(is_well_formed_xml(o.result.svg));
    }
    CHECK(layouts.size() == 4);
  }
  SUBCASE("five items around a pivot") {
    const std::string globe = slurp("globe.svg");
    auto in = fixture_input("uc2_water_cycle.md");
    in.pivot = pivot_from_px(kCenterPivotPx, kCanvas, upload_ref(globe));
    const auto g = generate_top_k(corpus(), in, 4, {{upload_ref(globe), globe}});
    REQUIRE(g.outputs.size() == 4);
    for (const auto& o : g.outputs) {
      CHECK(o.layout.score.e_o == 1);
      CHECK(o.result.svg.find("layer-pivot") != std::string::npos);
    }
  }
  SUBCASE("sketch picks from the sketch's top-4 matches") {
    const std::string globe = slurp("globe.svg");
    auto in = fixture_input("uc3_water_cycle.md");
    in.pivot = pivot_from_px(kCenterPivotPx, kCanvas, upload_ref(globe));
    in.sketch = sketch_from_json(nlohmann::json::parse(slurp("uc3_stroke.json")), kCanvas);
    const auto top = match_sketch(corpus().store, *in.sketch, 5, 4, in.pivot);
    std::set<std::string> allowed;
    for (const auto& m : top.matches) allowed.insert(m.layout_id);
    CHECK(top.matches.front().layout_id == "vif-clock-5");
    const auto g = generate_top_k(corpus(), in, 4, {{upload_ref(globe), globe}});
    REQUIRE(g.outputs.size() == 4);
    for (const auto& o : g.outputs) CHECK(allowed.count(o.result.provenance.layout_id) == 1);
  }
}

TEST_CASE("generation is byte-identical across runs") {
  auto in = fixture_input("uc2_water_cycle.md");
  const auto a = generate_top_k(corpus(), in, 4);
  const auto b = generate_top_k(corpus(), in, 4);
  REQUIRE(a.outputs.size() == b.outputs.size());
  for (std::size_t i = 0; i < a.outputs.size(); ++i) {
    CHECK(a.outputs[i].result.svg == b.outputs[i].result.svg);
  }
}

TEST_CASE("sketch wire format") {
  const auto px = sketch_from_json(
      nlohmann::json::parse(R"({"points": [[0, 0], [600, 800]], "space": "canvas-px"})"), kCanvas);
  CHECK(px[1].isApprox(Point(0.5, 0.5)));
  const auto norm = sketch_from_json(
      nlohmann::json::parse(R"({"points": [[0.25, 0.75]], "space": "normalized"})"), kCanvas);
  CHECK(norm[0].isApprox(Point(0.25, 0.75)));
  CHECK_THROWS_AS(sketch_from_json(nlohmann::json::parse(R"({"points": [[1]]})"), kCanvas), Error);
  CHECK_THROWS_AS(sketch_from_json(nlohmann::json::parse(R"({"points": [], "space": "mm"})"), kCanvas),
                  Error);
}

TEST_CASE("selections round-trip through JSON") {
  Selections s;
  s.layout_id = "vif-bowl-4";
  s.connection = ConnectionChoice{ConnectionStyle::kAlternate, std::string("conn-x")};
  CHECK(selections_from_json(to_json(s)) == s);
  CHECK(selections_from_json(to_json(Selections{})) == Selections{});
  CHECK_THROWS_AS(selections_from_json(nlohmann::json::parse(R"({"connection": {"style": "Zig"}})")),
                  Error);
}
