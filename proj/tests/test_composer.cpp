#include <cmath>
#include <numbers>
#include <random>

#include "composition_check.hpp"
#include "doctest.h"
#include "infoforge/vg_recommender.hpp"
#include "test_support.hpp"

using namespace infoforge;

namespace {

const AssetStore& pack() {
  static const AssetStore store = AssetStore::load(INFOFORGE_SAMPLE_PACK);
  return store;
}

const Canvas kSquare{1000, 1000};

PivotPlacement pivot_at(double x, double y, double w, double h) { return {BBox{x, y, w, h}, {}}; }

const VgDesign& design_with(bool image) {
  for (const auto& d : pack().vgs()) {
    if (d.placeholders.has_image == image && d.placeholders.has_title) return d;
  }
  return pack().vgs().front();
}

AssemblyRequest use_case_one() {
  AssemblyRequest r;
  r.canvas = {1200, 1600};
  r.content = parse_markdown(
      "# Four seasons\n"
      "- title: Spring\n  text: Snowmelt fills the rivers\n"
      "- title: Summer\n  text: Long days on the ridge\n"
      "- title: Autumn\n  text: Larches turn gold\n"
      "- title: Winter\n  text: Quiet under snow\n");
  r.layout_id = "vif-zigzag-4";
  r.vg_design_id = "vg-card-00";
  r.connection = {ConnectionStyle::kRegular, std::nullopt};
  r.seed = 3;
  return r;
}

}  // namespace

TEST_CASE("canvas parsing") {
  CHECK(parse_canvas("1200x1600") == Canvas{1200, 1600});
  CHECK_THROWS_AS(parse_canvas("1200"), Error);
  CHECK_THROWS_AS(parse_canvas("12x1600"), Error);
  CHECK_THROWS_AS(parse_canvas("1200x16oo"), Error);
}

TEST_CASE("VGs turn to face the pivot") {
  const Eigen::Vector2d native(100, 100);
  const auto pivot = pivot_at(0.45, 0.45, 0.1, 0.1);
  const auto below = compute_transforms({{0.5, 0.9}}, kSquare, pivot, native);
  CHECK(below[0].rotation_deg == doctest::Approx(0.0));
  const auto left = compute_transforms({{0.1, 0.5}}, kSquare, pivot, native);
  CHECK(left[0].rotation_deg == doctest::Approx(90.0));
  const auto above = compute_transforms({{0.5, 0.1}}, kSquare, pivot, native);
  CHECK(above[0].rotation_deg == doctest::Approx(180.0));
  const auto right = compute_transforms({{0.9, 0.5}}, kSquare, pivot, native);
  CHECK(right[0].rotation_deg == doctest::Approx(270.0));
}

TEST_CASE("four corners without a pivot") {
  const PointList corners{{0.2, 0.2}, {0.8, 0.2}, {0.8, 0.8}, {0.2, 0.8}};
  const Eigen::Vector2d native(200, 160);
  const auto t = compute_transforms(corners, kSquare, std::nullopt, native);
  REQUIRE(t.size() == 4);
  for (const auto& x : t) {
    CHECK(x.rotation_deg == 0.0);
    CHECK(x.scale == t[0].scale);
  }
  CHECK(t[0].scale == 1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      CHECK(intersection_area(footprint_px(t[i], native, kSquare),
                              footprint_px(t[j], native, kSquare)) == 0.0);
    }
  }
}

TEST_CASE("crowded points shrink, coincident points are unplaceable") {
  const Eigen::Vector2d native(100, 100);
  const PointList close{{0.45, 0.5}, {0.55, 0.5}};
  const auto t = compute_transforms(close, kSquare, std::nullopt, native);
  CHECK(t[0].scale < 1.0);
  CHECK(t[0].scale >= kMinScale);
  // Footprints just touch at the largest scale: 0.1 canvas apart.
  CHECK(footprint_px(t[0], native, kSquare).w == doctest::Approx(100.0).epsilon(1e-6));

  try {
    compute_transforms({{0.5, 0.5}, {0.5, 0.5}}, kSquare, std::nullopt, native);
    FAIL("expected Unplaceable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnplaceable);
  }
  CHECK_THROWS_AS(compute_transforms({{0.0, 0.5}}, kSquare, std::nullopt, native), Error);
}

TEST_CASE("text fitting") {
  CHECK(text_width("Hi", 10) == doctest::Approx((722 + 222) / 100.0));
  CHECK(text_width("Hi", 10, true) > text_width("Hi", 10));

  const std::string short_text(50, 'a');
  std::string long_text;
  for (int i = 0; i < 100; ++i) long_text += "word ";
  const auto a = fit_text(short_text, 120, 60, 2, 60);
  const auto b = fit_text(long_text, 120, 60, 2, 60);
  CHECK(b.font_size < a.font_size);
  CHECK_FALSE(a.overflow);
  for (const auto& line : b.lines) CHECK(text_width(line, b.font_size) <= 120 + 1e-9);
  CHECK(static_cast<double>(b.lines.size()) * b.font_size * kLineHeight <= 60 + 1e-9);

  const auto title = fit_text("Go", 100, 20, 6, 20);
  CHECK(title.lines.size() == 1);
  CHECK(title.font_size == doctest::Approx(20.0 / kLineHeight).epsilon(1e-3));

  const auto squeezed = fit_text(long_text, 40, 10, 6, 10);
  CHECK(squeezed.overflow);
  CHECK(squeezed.font_size == 6.0);
  REQUIRE_FALSE(squeezed.lines.empty());
  CHECK(squeezed.lines.back().size() >= 3);
  CHECK(squeezed.lines.back().substr(squeezed.lines.back().size() - 3) == "…");
}

TEST_CASE("embedded content is upright and consumes placeholders") {
  const auto& design = design_with(false);
  VgContent item;
  item.title = "Upright";
  if (design.placeholders.has_text) item.text = "stays level";
  for (double rotation : {0.0, 90.0, 213.5}) {
    const VgTransform t{0, {0.5, 0.5}, rotation, 1.0};
    const XmlNode g = embed_content(design, item, t, kSquare, Color{0x11, 0x22, 0x33},
                                    Color{255, 255, 255});
    for (const auto& id : collect_ids(g)) CHECK(id.rfind("ph-", 0) != 0);
    std::vector<double> rot;
    test::text_rotations(g, 0.0, rot);
    REQUIRE_FALSE(rot.empty());
    for (double r : rot) CHECK(std::abs(r) < 1e-6);
    const std::string s = serialize(g);
    CHECK(s.find("#112233") != std::string::npos);
    if (rotation == 0.0) CHECK(s.find("rotate(-") == std::string::npos);
    if (rotation == 90.0) CHECK(s.find("rotate(-90 ") != std::string::npos);
  }

  VgContent needs_image;
  needs_image.image_ref = "x.png";
  CHECK_THROWS_AS(embed_content(design, needs_image, {}, kSquare, {}, {}), Error);
  const auto& with_image = design_with(true);
  const auto s = serialize(embed_content(with_image, needs_image, {}, kSquare, {}, {}));
  CHECK(s.find("preserveAspectRatio=\"xMidYMid meet\"") != std::string::npos);
}

TEST_CASE("connection counts and placement") {
  const PointList five{{0.1, 0.2}, {0.3, 0.8}, {0.5, 0.2}, {0.7, 0.8}, {0.9, 0.2}};
  CHECK(generate_connections(ConnectionStyle::kRegular, "c", five, std::nullopt, kSquare).size() == 4);
  const auto alt = generate_connections(ConnectionStyle::kAlternate, "c", five, std::nullopt, kSquare);
  REQUIRE(alt.size() == 2);
  CHECK(alt[0].index == 0);
  CHECK(alt[1].index == 2);
  CHECK(generate_connections(ConnectionStyle::kNone, "c", five, std::nullopt, kSquare).empty());
  CHECK_THROWS_AS(generate_connections(ConnectionStyle::kPivot, "c", five, std::nullopt, kSquare),
                  Error);

  const auto pivot = pivot_at(0.4, 0.4, 0.2, 0.2);
  const auto rays = generate_connections(ConnectionStyle::kPivot, "c", five, pivot, kSquare);
  REQUIRE(rays.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const double mx = (0.5 + five[i].x()) / 2;
    const double my = (0.5 + five[i].y()) / 2;
    CHECK(rays[i].placement.x() == doctest::Approx(mx).epsilon(1e-12));
    CHECK(rays[i].placement.y() == doctest::Approx(my).epsilon(1e-12));
    const double angle =
        std::atan2(five[i].y() - 0.5, five[i].x() - 0.5) * 180.0 / std::numbers::pi;
    CHECK(rays[i].angle_deg == doctest::Approx(angle).epsilon(1e-12));
    CHECK(rays[i].length ==
          doctest::Approx(0.8 * std::hypot(five[i].x() - 0.5, five[i].y() - 0.5)).epsilon(1e-12));
  }

  const auto mid = generate_connections(ConnectionStyle::kRegular, "c", five, std::nullopt, kSquare);
  CHECK(mid[0].placement.isApprox(Point(0.2, 0.5)));
  CHECK(mid[0].length == doctest::Approx(0.8 * std::hypot(0.2, 0.6)));

  // FlowShape starts from the end nearer the center.
  const auto flow =
      generate_connections(ConnectionStyle::kFlowShape, "c", {{0.5, 0.5}, {0.9, 0.5}}, std::nullopt,
                           kSquare);
  REQUIRE(flow.size() == 1);
  CHECK(flow[0].placement.isApprox(Point(0.5 + 0.35 * 0.4, 0.5)));
  const auto flow_in =
      generate_connections(ConnectionStyle::kFlowShape, "c", {{0.9, 0.5}, {0.5, 0.5}}, std::nullopt,
                           kSquare);
  CHECK(flow_in[0].placement.isApprox(Point(0.5 + 0.35 * 0.4, 0.5)));
  CHECK(std::abs(flow_in[0].angle_deg) == doctest::Approx(180.0));

  std::vector<std::string> warnings;
  const auto skipped = generate_connections(ConnectionStyle::kRegular, "c",
                                            {{0.2, 0.2}, {0.2, 0.2}, {0.6, 0.2}}, std::nullopt,
                                            kSquare, &warnings);
  CHECK(skipped.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("ZeroLengthSegment") == 0);
}

TEST_CASE("palette selection") {
  const Color white{255, 255, 255};
  std::vector<Palette> palettes{
      {"pastel", white, {Color::from_hex("#ffd6e0"), Color::from_hex("#c1f0e0")}, white},
      {"dark", white, {Color::from_hex("#1b263b"), Color::from_hex("#22333b")}, white}};
  const auto pick = select_palette(palettes, white);
  CHECK(pick.palette->id == "dark");
  CHECK(pick.accessible);
  CHECK(pick.min_contrast >= 3.0);

  const std::vector<Palette> same{{"only", white, {white}, white}};
  const auto fallback = select_palette(same, white);
  CHECK_FALSE(fallback.accessible);
  CHECK(fallback.min_contrast == doctest::Approx(1.0));

  const Color ink = Color::from_hex("#222222");
  const std::vector<Palette> tie{{"b", white, {ink}, white}, {"a", white, {ink}, white}};
  CHECK(select_palette(tie, white).palette->id == "a");
  CHECK_THROWS_AS(select_palette({}, white), Error);

  // Against the shipped palettes a white page never gets a pastel series.
  const auto shipped = select_palette(pack().palettes(), white);
  CHECK(shipped.accessible);
}

TEST_CASE("assembling a four-item infographic") {
  const auto request = use_case_one();
  const auto out = assemble(pack(), request);
  std::string error;
  REQUIRE_MESSAGE(is_well_formed_xml(out.svg, &error), error);
  const XmlNode root = parse_xml(out.svg);
  CHECK(*root.attr("viewBox") == "0 0 1200 1600");
  CHECK(find_by_id(root, "layer-pivot") == nullptr);
  for (int i = 0; i < 4; ++i) CHECK(find_by_id(root, "vg-" + std::to_string(i)) != nullptr);
  CHECK(find_by_id(root, "vg-4") == nullptr);
  for (const auto& id : collect_ids(root)) CHECK(id.rfind("ph-", 0) != 0);
  CHECK(test::count_named(root, "g", "connection") == 3);
  CHECK(out.svg.find("Four seasons") != std::string::npos);

  CHECK(out.provenance.connection.design_id.has_value());
  CHECK(out.provenance.palette_id.has_value());
  CHECK(assemble(pack(), request).svg == out.svg);

  const auto embedded = extract_provenance(out.svg);
  REQUIRE(embedded.has_value());
  CHECK(*embedded == to_json(out.provenance));
  CHECK(assemble_from_provenance(pack(), *embedded).svg == out.svg);
}

TEST_CASE("a pivot layer and upload references") {
  auto request = use_case_one();
  request.content = parse_markdown(
      "- title: One\n- title: Two\n- title: Three\n- title: Four\n- title: Five\n");
  request.layout_id = "vif-clock-5";
  request.pivot = PivotPlacement{{0.4, 0.4, 0.2, 0.2}, pack().pivots().front().id};
  request.connection = {ConnectionStyle::kPivot, std::nullopt};
  const auto out = assemble(pack(), request);
  const XmlNode root = parse_xml(out.svg);
  REQUIRE(find_by_id(root, "layer-pivot") != nullptr);
  CHECK(test::count_named(root, "g", "connection") == 5);
  test::CompositionReport report;
  test::check_assembly(out.provenance, out, pack().vg("vg-card-00")->native_size, report);
  CHECK(report.worst_facing_rad < 1e-6);
  CHECK(report.overlap_area == 0.0);
  for (const auto& t : out.transforms) CHECK(t.rotation_deg != 0.0);

  const std::string upload = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 10 10\">"
                             "<circle cx=\"5\" cy=\"5\" r=\"4\"/></svg>";
  request.pivot->graphic_ref = upload_ref(upload);
  CHECK_THROWS_AS(assemble(pack(), request), Error);
  const auto with_upload = assemble(pack(), request, {{upload_ref(upload), upload}});
  CHECK(with_upload.svg.find("<circle cx=\"5\"") != std::string::npos);
}

TEST_CASE("assembly input errors") {
  auto request = use_case_one();
  request.layout_id = "vif-clock-5";
  CHECK_THROWS_AS(assemble(pack(), request), Error);
  request.truncate_layout = true;
  CHECK(assemble(pack(), request).transforms.size() == 4);

  request = use_case_one();
  request.vg_design_id = "nope";
  try {
    assemble(pack(), request);
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
  request = use_case_one();
  request.connection = {ConnectionStyle::kRegular, "conn-pivot-ray"};
  CHECK_THROWS_AS(assemble(pack(), request), Error);

  nlohmann::json bad = to_json(use_case_one());
  bad.erase("layout_id");
  CHECK_THROWS_AS(assemble_from_provenance(pack(), bad), Error);
  bad = to_json(use_case_one());
  bad["format_version"] = 99;
  CHECK_THROWS_AS(assemble_from_provenance(pack(), bad), Error);
}

TEST_CASE("provenance text survives double hyphens") {
  auto request = use_case_one();
  request.content.items[0].text = "before -- after --> end";
  const auto out = assemble(pack(), request);
  REQUIRE(is_well_formed_xml(out.svg));
  const auto p = extract_provenance(out.svg);
  REQUIRE(p.has_value());
  CHECK(assembly_request_from_json(*p).content == request.content);
}

TEST_CASE("randomized compositions keep their geometry") {
  std::mt19937_64 rng(77);
  int done = 0;
  int unplaceable = 0;
  test::CompositionReport report;
  for (int attempt = 0; done < 150 && attempt < 2000; ++attempt) {
    const auto r = test::random_request(pack(), rng);
    if (!r) continue;
    const auto& design = *pack().vg(r->vg_design_id);
    try {
      const auto out = assemble(pack(), *r);
      test::check_assembly(out.provenance, out, design.native_size, report);
      ++done;
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::kUnplaceable);
      ++unplaceable;
    }
  }
  MESSAGE(done << " placed, " << unplaceable << " unplaceable");
  CHECK(done == 150);
  CHECK(report.worst_facing_rad < 1e-6);
  CHECK(report.worst_text_rotation < 1e-6);
  CHECK(report.overlap_area == 0.0);
  CHECK_MESSAGE(report.counts_ok, report.failure);
  CHECK_MESSAGE(report.xml_ok, report.failure);
  CHECK(report.residual_placeholders == 0);
}
