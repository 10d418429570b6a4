#include <gtest/gtest.h>

#include "circlechain/scene_io.hpp"
#include "circlechain/svg.hpp"

using namespace circlechain;

namespace {

const char* kMinimal = R"({
  "version": "1",
  "circles": [
    {"id": "a", "cx": 0, "cy": 0, "r": 1},
    {"id": "b", "cx": 1, "cy": 0, "r": 1},
    {"id": "c", "cx": 0.5, "cy": 0.8, "r": 1}
  ],
  "chain": {"order": ["a", "b", "c"], "closed": true, "pivots": [{"choice": "A"}, {"choice": "B"}, {"choice": "A"}]}
})";

Json minimal() { return Json::parse(kMinimal); }

std::string error_path(const Json& j) {
  try {
    (void)scene_from_json(j);
  } catch (const SceneFormatError& e) {
    return e.path();
  }
  return "";
}

std::string error_text(const Json& j) {
  try {
    (void)scene_from_json(j);
  } catch (const SceneFormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scene, MinimalParses) {
  const SceneDocument doc = parse_scene(kMinimal);
  EXPECT_EQ(doc.circles.size(), 3u);
  EXPECT_EQ(doc.chain.pivots[1].kind, PivotRecord::Kind::b);
  const Chain c = to_chain(doc);
  EXPECT_EQ(c.circles[2].center, (Point{0.5, 0.8}));
  EXPECT_EQ(c.pivots[0], PivotChoice::A());
  EXPECT_TRUE(c.closed);
}

TEST(Scene, WrongPivotCountNamesTheRule) {
  Json j = minimal();
  j["chain"]["pivots"].erase(2);
  EXPECT_EQ(error_path(j), "$.chain.pivots");
  EXPECT_NE(error_text(j).find("n if closed, n-1 if open"), std::string::npos);
  j["chain"]["closed"] = false;
  EXPECT_NO_THROW(scene_from_json(j));
  j["chain"]["pivots"].erase(1);
  EXPECT_EQ(error_path(j), "$.chain.pivots");
}

TEST(Scene, StartOffCircle) {
  Json j = minimal();
  j["start"] = {{"circle", "a"}, {"x", 1.0}, {"y", 0.0}};
  EXPECT_NO_THROW(scene_from_json(j));
  j["start"]["x"] = 1.001;
  EXPECT_EQ(error_path(j), "$.start");
  j["start"] = {{"circle", "b"}, {"x", 2.0}, {"y", 0.0}};
  EXPECT_EQ(error_path(j), "$.start.circle");
}

TEST(Scene, StructuralErrorsCarryPaths) {
  Json j = minimal();
  j["circles"][1]["r"] = -1;
  EXPECT_EQ(error_path(j), "$.circles[1].r");
  j = minimal();
  j["circles"][2]["id"] = "a";
  EXPECT_EQ(error_path(j), "$.circles[2].id");
  j = minimal();
  j["chain"]["order"][1] = "zz";
  EXPECT_EQ(error_path(j), "$.chain.order[1]");
  j = minimal();
  j["circles"][0]["cx"] = "zero";
  EXPECT_EQ(error_path(j), "$.circles[0].cx");
  j = minimal();
  j["circles"][0]["colour"] = "red";
  EXPECT_EQ(error_path(j), "$.circles[0].colour");
  j = minimal();
  j["version"] = "2";
  EXPECT_EQ(error_path(j), "$.version");
  j = minimal();
  j["chain"]["pivots"][0] = {{"choice", "C"}};
  EXPECT_EQ(error_path(j), "$.chain.pivots[0].choice");
  EXPECT_THROW(parse_scene("{"), SceneFormatError);
}

TEST(Scene, GeometricErrors) {
  Json j = minimal();
  j["circles"][2]["cx"] = 10;
  EXPECT_EQ(error_path(j), "$.chain.pivots[1]");
  j = minimal();
  j["chain"]["pivots"][0] = {{"choice", {{"x", 3}, {"y", 3}}}};
  EXPECT_EQ(error_path(j), "$.chain.pivots[0]");
  j = minimal();
  j["anchor_i"] = {{"x", 1.0}, {"y", 0.0}};
  EXPECT_EQ(error_path(j), "$.anchor_i");
}

TEST(Scene, UnknownTopLevelFieldsGoToMeta) {
  Json j = minimal();
  j["note"] = "hello";
  j["meta"] = {{"k", 1}};
  const SceneDocument doc = scene_from_json(j);
  EXPECT_EQ(doc.meta["note"], "hello");
  EXPECT_EQ(doc.meta["k"], 1);
}

TEST(Scene, RoundTripIsFixpoint) {
  Json j = minimal();
  // An explicit pivot on a, with c moved to pass through it.
  const Point p = to_chain(scene_from_json(minimal())).circles[0].at(-0.5);
  j["chain"]["pivots"][2] = {{"choice", {{"x", p.x}, {"y", p.y}}}};
  j["circles"][2]["cx"] = p.x + 0.6;
  j["circles"][2]["cy"] = p.y + 0.8;
  j["start"] = {{"circle", "a"}, {"x", 0.0}, {"y", 1.0}};
  j["anchor_i"] = {{"x", 5.0}, {"y", 5.0}};
  const SceneDocument doc = scene_from_json(j);
  const std::string bytes = write_scene(doc);
  EXPECT_EQ(parse_scene(bytes), doc);
  EXPECT_EQ(write_scene(parse_scene(bytes)), bytes);
}

TEST(Scene, DoublesRoundTripExactly) {
  SceneDocument doc = parse_scene(kMinimal);
  doc.meta["probe"] = 0.1;
  doc.meta["third"] = 1.0 / 3.0;
  doc.circles[0].cx = 1e-300;
  const SceneDocument back = parse_scene(write_scene(doc));
  EXPECT_EQ(back.meta["probe"].get<double>(), 0.1);
  EXPECT_EQ(back.meta["third"].get<double>(), 1.0 / 3.0);
  EXPECT_EQ(back.circles[0].cx, 1e-300);
}

TEST(Scene, FromChainUsesExplicitPoints) {
  Chain c = to_chain(parse_scene(kMinimal));
  c.pivots[1] = PivotChoice::at(resolve_pivot(c.circles[1], c.circles[2], PivotChoice::B(), scene_tolerance(c)));
  const SceneDocument doc = scene_from_chain(c);
  EXPECT_EQ(doc.circles[0].id, "C1");
  EXPECT_EQ(doc.chain.pivots[1].kind, PivotRecord::Kind::point);
  EXPECT_EQ(to_chain(parse_scene(write_scene(doc))).pivots[1], c.pivots[1]);
}

TEST(Scene, HashIsStable) {
  const SceneDocument doc = parse_scene(kMinimal);
  EXPECT_EQ(scene_hash(doc), scene_hash(parse_scene(write_scene(doc))));
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Trace, JsonRoundTrip) {
  Trace t;
  t.rounds = 2;
  t.vertices = {{0, 1}, {0.1, -2}};
  t.side_lines = {Line({0, 1}, {0.1, -3})};
  const Trace back = trace_from_json(Json::parse(trace_to_json(t).dump()));
  EXPECT_EQ(back.rounds, 2);
  EXPECT_EQ(back.vertices, t.vertices);
  EXPECT_EQ(back.side_lines[0].direction, t.side_lines[0].direction);
  EXPECT_THROW(trace_from_json(Json::parse(R"({"rounds": 1, "vertices": [[1]]})")), SceneFormatError);
}

TEST(Report, OverallAndShape) {
  ReportDocument r;
  r.kind = "verify";
  r.bound("a", 1.0, 1e-12, 1e-9);
  EXPECT_TRUE(r.overall());
  r.bound("b", Json::object(), 1.0, 1e-9);
  EXPECT_FALSE(r.overall());
  const Json j = report_to_json(r);
  EXPECT_EQ(j["overall"], false);
  EXPECT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][1]["name"], "b");
  EXPECT_EQ(write_report(r), write_report(r));
}

TEST(Svg, EmptyScene) {
  const std::string svg = render_svg(SceneDocument{});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("<circle"), std::string::npos);
}

TEST(Svg, CirclesPolygonAndDeterminism) {
  const SceneDocument doc = parse_scene(kMinimal);
  const Chain c = to_chain(doc);
  const Tolerance tol = scene_tolerance(c);
  const Trace t = iterate(c, c.circles[0].at(1.0), 1, std::nullopt, tol);
  const std::string svg = render_svg(doc, t);
  EXPECT_EQ(svg, render_svg(doc, t));
  std::size_t black = 0;
  for (std::size_t pos = 0; (pos = svg.find("stroke=\"black\"", pos)) != std::string::npos; ++pos) ++black;
  EXPECT_GE(black, 3u);
  EXPECT_NE(svg.find("red"), std::string::npos);
  EXPECT_EQ(svg.find("-0.000000"), std::string::npos);
}
