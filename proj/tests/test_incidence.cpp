#include <gtest/gtest.h>

#include "circlechain/incidence.hpp"
#include "circlechain/scenes.hpp"
#include "oracles.hpp"

using namespace circlechain;

namespace {

Chain traversed_twice(const Chain& base, bool flip_second) {
  Chain out;
  for (int r = 0; r < 2; ++r)
    for (std::size_t i = 0; i < base.circles.size(); ++i) {
      out.circles.push_back(base.circles[i]);
      PivotChoice p = base.pivots[i];
      if (r == 1 && flip_second) p = p.kind == PivotChoice::Kind::a ? PivotChoice::B() : PivotChoice::A();
      out.pivots.push_back(p);
    }
  return out;
}

Chain equilateral_touching() {
  Chain c;
  c.circles = {Circle({0, 0}, 1), Circle({2, 0}, 1), Circle({1, std::sqrt(3.0)}, 1)};
  c.pivots.assign(3, PivotChoice::A());
  return c;
}

std::array<Line, 4> steiner_lines() {
  return {Line({0, 0}, {1, 0}), Line({0, 0}, {0, 1}), Line({0, 1}, {1, -1}), Line({0, 0.3}, {1, 2})};
}

}  // namespace

TEST(SideLines, SquareTrace) {
  Trace t;
  t.side_lines = {Line({0, 0}, {1, 0}), Line({1, 0}, {0, 1}), Line({1, 1}, {-1, 0}), Line({0, 1}, {0, -1})};
  const SideLineMeets m = side_line_intersections(t, Tolerance(1e-9, 1));
  EXPECT_EQ(m.points.size(), 4u);
  ASSERT_EQ(m.parallel.size(), 2u);
  EXPECT_EQ(m.parallel[0], (PairKey{1, 3}));
  EXPECT_EQ(m.parallel[1], (PairKey{2, 4}));
  EXPECT_NEAR(m.points.at({1, 2}).x, 1.0, 1e-15);
  EXPECT_NEAR(m.points.at({3, 4}).y, 1.0, 1e-15);
  EXPECT_NEAR(m.points.at({1, 4}).x, 0.0, 1e-15);
}

TEST(SideLines, ThreeTouchingOppositeSidesMeetAtPivots) {
  for (int s = 0; s < 20; ++s) {
    const Chain base = gen_touching_chain(3, s);
    const Tolerance tol = scene_tolerance(base);
    const auto pivots = resolve_pivots(base, tol);
    const Trace t = iterate(base, base.circles[0].at(0.7 + s), 2, std::nullopt, tol);
    const SideLineMeets m = side_line_intersections(t, tol);
    for (int i = 1; i <= 3; ++i)
      EXPECT_LE(distance(m.points.at({i, i + 3}), pivots[i - 1]), 1e-9 * tol.scene_scale);
  }
}

TEST(Lighthouse, PolygonChainCirclesAndConcurrency) {
  for (int s = 0; s < 10; ++s) {
    const auto poly = gen_polygon_chain(6, 20 + s);
    const Tolerance tol = scene_tolerance(poly.chain);
    const LighthouseReport r = lighthouse_sweep(poly.chain, 16, tol, s);
    EXPECT_LE(r.worst_residual(), 1e-8 * tol.scene_scale);
    EXPECT_LE(r.worst_spread(), 1e-8 * tol.scene_scale);
    EXPECT_GE(r.starts_used, 16);
    EXPECT_FALSE(r.fitted.empty());
    // Every fitted circle runs through its two pivots.
    for (const auto& [key, c] : r.fitted) {
      EXPECT_LE(std::abs(c.offset(r.pivots[key.first - 1])), 1e-8 * tol.scene_scale);
      EXPECT_LE(std::abs(c.offset(r.pivots[key.second - 1])), 1e-8 * tol.scene_scale);
    }
  }
}

TEST(Lighthouse, SamplesOnBothSidesOfThePivotChord) {
  const auto poly = gen_polygon_chain(5, 3);
  const Tolerance tol = scene_tolerance(poly.chain);
  const LighthouseReport r = lighthouse_sweep(poly.chain, 16, tol, 1);
  int both = 0;
  for (const auto& [key, counts] : r.side_counts) both += counts[0] > 0 && counts[1] > 0;
  EXPECT_GT(both, 0);
}

TEST(Lighthouse, SampledPointsMatchTraceOracle) {
  const auto poly = gen_polygon_chain(5, 4);
  const Tolerance tol = scene_tolerance(poly.chain);
  const LighthouseReport r = lighthouse_sweep(poly.chain, 8, tol, 2);
  // Recompute X_12 for the first start from the vertices alone.
  const Point x = poly.chain.circles[0].at(starting_angles(1, 2)[0]);
  const Trace t = iterate(poly.chain, x, 1, std::nullopt, tol);
  const auto& v = t.vertices;
  const double d1x = v[1].x - v[0].x, d1y = v[1].y - v[0].y, d2x = v[2].x - v[1].x, d2y = v[2].y - v[1].y;
  const double det = d1x * (-d2y) + d2x * d1y;
  const double s = ((v[1].x - v[0].x) * (-d2y) + d2x * (v[1].y - v[0].y)) / det;
  const Point want{v[0].x + s * d1x, v[0].y + s * d1y};
  EXPECT_LE(distance(r.sampled_x.at({1, 2}).front(), want), 1e-9 * tol.scene_scale);
}

TEST(Lighthouse, MiquelChainCirclesConcur) {
  for (int s = 0; s < 10; ++s) {
    const Chain c = gen_common_point(3, 40 + s);
    const Tolerance tol = scene_tolerance(c);
    const LighthouseReport r = lighthouse_sweep(c, 16, tol, s);
    EXPECT_EQ(r.fitted.size(), 3u);
    EXPECT_LE(r.worst_residual(), 1e-8 * tol.scene_scale);
    EXPECT_LE(r.worst_spread(), 1e-8 * tol.scene_scale);
  }
}

TEST(Lighthouse, SkipsSamplesAtPivots) {
  // Starting exactly at a pivot makes some X_jk coincide with it.
  const auto poly = gen_polygon_chain(4, 5);
  const Tolerance tol = scene_tolerance(poly.chain);
  const auto pivots = resolve_pivots(poly.chain, tol);
  const Trace t = iterate(poly.chain, pivots.back(), 1, std::nullopt, tol);
  const SideLineMeets m = side_line_intersections(t, tol);
  int at_pivot = 0;
  for (const auto& [key, x] : m.points)
    at_pivot += distance(x, pivots[key.first - 1]) <= tol.abs() || distance(x, pivots[key.second - 1]) <= tol.abs();
  EXPECT_GT(at_pivot, 0);
  EXPECT_LE(lighthouse_sweep(poly.chain, 16, tol).worst_residual(), 1e-8 * tol.scene_scale);
}

TEST(Lighthouse, RejectsNonClosingChains) {
  const Chain c = gen_intersecting_chain(5, 1);
  const Tolerance tol = scene_tolerance(c);
  ASSERT_FALSE(is_closing(c, tol));
  EXPECT_THROW(lighthouse_sweep(c, 16, tol), GeometryError);
  const auto poly = gen_polygon_chain(4, 1);
  EXPECT_THROW(lighthouse_sweep(poly.chain, 4, scene_tolerance(poly.chain)), GeometryError);
}

TEST(ThreeTouching, EquilateralConfiguration) {
  const Chain c = equilateral_touching();
  const Tolerance tol = scene_tolerance(c);
  const TouchingReport r = three_touching_report(c, 16, tol);
  const double h = std::sqrt(3.0) / 2;
  const std::vector<Point> mids{{1, 0}, {1.5, h}, {0.5, h}};
  for (Point m : mids) EXPECT_NEAR(r.base_circle.offset(m), 0.0, 1e-12);
  EXPECT_NEAR(r.base_circle.center.x, 1.0, 1e-12);
  EXPECT_NEAR(r.base_circle.center.y, std::sqrt(3.0) / 3, 1e-12);
  EXPECT_NEAR(r.base_circle.radius, std::sqrt(3.0) / 3, 1e-12);
  EXPECT_LE(r.worst_orthogonality(), 1e-9);
  EXPECT_LE(r.worst_length_defect(), 1e-9 * tol.scene_scale);
}

TEST(ThreeTouching, BruteForceOracle) {
  const Chain c = equilateral_touching();
  const Tolerance tol = scene_tolerance(c);
  for (double a : starting_angles(10, 7)) {
    const Trace t = iterate(c, c.circles[0].at(a), 2, std::nullopt, tol);
    const auto& v = t.vertices;
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = v[i + 1] - v[i], w = v[i + 4] - v[i + 3];
      EXPECT_LE(std::abs(u.x * w.x + u.y * w.y) / (std::hypot(u.x, u.y) * std::hypot(w.x, w.y)), 1e-9);
    }
  }
}

TEST(ThreeTouching, RandomTriples) {
  for (int s = 0; s < 100; ++s) {
    const Chain c = gen_touching_chain(3, 1000 + s);
    const Tolerance tol = scene_tolerance(c);
    const TouchingReport r = three_touching_report(c, 10, tol, s);
    EXPECT_LE(r.worst_orthogonality(), 1e-9) << s;
    EXPECT_LE(r.midpoint_defect, 1e-9 * tol.scene_scale) << s;
    EXPECT_LE(r.worst_length_defect(), 1e-9 * tol.scene_scale) << s;
  }
}

TEST(ThreeTouching, RejectsIntersectingJoint) {
  const Chain c = gen_intersecting_chain(3, 2);
  EXPECT_THROW(three_touching_report(c, 10, scene_tolerance(c)), ChainError);
  const Chain four = gen_touching_chain(4, 2);
  EXPECT_THROW(three_touching_report(four, 10, scene_tolerance(four)), GeometryError);
}

TEST(FourTouching, ContactsConcyclicAndDiagonalMeetsOnCircle) {
  for (int s = 0; s < 50; ++s) {
    const Chain c = gen_touching_chain(4, 2000 + s);
    const Tolerance tol = scene_tolerance(c);
    ASSERT_TRUE(is_closing(c, tol));
    const TouchingReport r = four_touching_report(c, 10, tol, s);
    EXPECT_LE(r.concyclicity_defect, 1e-9 * tol.scene_scale);
    EXPECT_LE(r.membership_defects[0], 1e-9 * tol.scene_scale);
    EXPECT_LE(r.membership_defects[1], 1e-9 * tol.scene_scale);
  }
}

TEST(FourTouching, SymmetricKite) {
  Chain c;
  // Two circles of radius 1 on the axis, two of radius 2 above and below.
  const double y = std::sqrt(9.0 - 4.0);
  c.circles = {Circle({-2, 0}, 1), Circle({0, y}, 2), Circle({2, 0}, 1), Circle({0, -y}, 2)};
  c.pivots.assign(4, PivotChoice::A());
  const Tolerance tol = scene_tolerance(c);
  const TouchingReport r = four_touching_report(c, 16, tol);
  EXPECT_LE(r.worst_length_defect(), 1e-9 * tol.scene_scale);
  EXPECT_NEAR(r.base_circle.center.x, 0.0, 1e-12);
  EXPECT_NEAR(r.base_circle.center.y, 0.0, 1e-12);
}

TEST(Steiner, DirectConstruction) {
  const auto lines = steiner_lines();
  const Tolerance tol(1e-9, 4.0);
  const Chain q = quadrilateral_chain(lines, tol);
  // Triangle vertices by hand: (0,0), (0,1), (1,0), (-0.3,-0.6)... intersections of each line pair.
  auto meet = [&](int i, int j) { return intersect_lines(lines[i], lines[j], tol); };
  const Point a1 = meet(0, 1), a2 = meet(1, 2), a3 = meet(2, 3), a4 = meet(3, 0);
  EXPECT_NEAR(distance(a1, {0, 0}), 0.0, 1e-15);
  EXPECT_NEAR(distance(a2, {0, 1}), 0.0, 1e-15);
  EXPECT_NEAR(distance(a3, {0.7 / 3, 1 - 0.7 / 3}), 0.0, 1e-14);
  EXPECT_NEAR(distance(a4, {-0.15, 0}), 0.0, 1e-15);
  const Point p{0, 0.3}, qq{1, 0};
  const std::array<Circle, 4> want{oracle::circle_through(a4, a1, p), oracle::circle_through(a1, a2, qq),
                                   oracle::circle_through(a2, a3, p), oracle::circle_through(a3, a4, qq)};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(distance(q.circles[i].center, want[i].center), 0.0, 1e-12);
    EXPECT_NEAR(q.circles[i].radius, want[i].radius, 1e-12);
  }
  const SteinerReport r = steiner_report(lines, q.circles[0].at(1.0), tol);
  EXPECT_LE(r.worst(), 1e-9 * tol.scene_scale);
  EXPECT_NEAR(distance(r.p_point, p), 0.0, 1e-15);
  EXPECT_NEAR(distance(r.q_point, qq), 0.0, 1e-15);
  for (const Circle& c : want) EXPECT_LE(std::abs(c.offset(r.steiner_point)), 1e-12);
  EXPECT_TRUE(r.degenerate.empty());
}

TEST(Steiner, StartAtFirstPivot) {
  const auto lines = steiner_lines();
  const Tolerance tol(1e-9, 4.0);
  const Chain q = quadrilateral_chain(lines, tol);
  const SteinerReport r = steiner_report(lines, q.pivots[0].point, tol);
  EXPECT_LE(r.collinearity_defects[0], 1e-12);
  EXPECT_LE(r.collinearity_defects[1], 1e-12);
  EXPECT_LE(r.worst(), 1e-9 * tol.scene_scale);
}

TEST(Steiner, StartAtSteinerPoint) {
  const auto lines = steiner_lines();
  const Tolerance tol(1e-9, 4.0);
  const Chain q = quadrilateral_chain(lines, tol);
  const Point s = steiner_report(lines, q.circles[0].at(1.0), tol).steiner_point;
  const SteinerReport r = steiner_report(lines, s, tol);
  for (Point x : r.polygon) EXPECT_LE(distance(x, s), 1e-9 * tol.scene_scale);
  EXPECT_FALSE(r.degenerate.empty());
}

TEST(Steiner, RandomQuadrilaterals) {
  for (int s = 0; s < 100; ++s) {
    const LineScene scene = gen_line_arrangement(4, 3000 + s);
    std::array<Line, 4> lines;
    std::copy_n(scene.arrangement.lines.begin(), 4, lines.begin());
    const Chain q = quadrilateral_chain(lines, scene_tolerance(scene.chain));
    const Tolerance tol = scene_tolerance(q);
    for (double a : starting_angles(10, s)) {
      const SteinerReport r = steiner_report(lines, q.circles[0].at(a), tol);
      EXPECT_LE(r.worst(), 1e-9 * tol.scene_scale) << s;
    }
  }
}

TEST(Steiner, Preconditions) {
  const Tolerance tol(1e-9, 4.0);
  auto lines = steiner_lines();
  lines[2] = Line({0, 5}, {1, 0});
  EXPECT_THROW(quadrilateral_chain(lines, tol), GeometryError);
  lines = steiner_lines();
  lines[2] = Line({0, 0}, {1, -1});  // through A_1 with l_1, l_2
  EXPECT_THROW(quadrilateral_chain(lines, tol), GeometryError);
  EXPECT_THROW(steiner_report(steiner_lines(), {10, 10}, tol), GeometryError);
}

TEST(TangencyProbe, Examples) {
  const Tolerance tol(1e-9, 1.0);
  const TangencyProbe ext = tangency_probe(Circle({0, 0}, 1), Circle({3, 0}, 2), tol);
  EXPECT_TRUE(ext.is_tangent);
  EXPECT_EQ(ext.defect, 0.0);
  const TangencyProbe in = tangency_probe(Circle({0, 0}, 2), Circle({1, 0}, 1), tol);
  EXPECT_TRUE(in.is_tangent);
  EXPECT_EQ(in.defect, 0.0);
  const TangencyProbe no = tangency_probe(Circle({0, 0}, 1), Circle({1, 0}, 1), tol);
  EXPECT_FALSE(no.is_tangent);
  EXPECT_NEAR(no.defect, 1.0, 1e-15);
}

// Three intersecting circles traversed as an A pass followed by a B pass.
TEST(TangencyProbe, CaptionClaimOnABChain) {
  double worst = 0.0;
  for (int s = 0; s < 6; ++s) {
    Chain base = gen_intersecting_chain(3, 100 + s);
    for (auto& p : base.pivots) p = PivotChoice::A();
    const Chain ab = traversed_twice(base, true);
    const Tolerance tol = scene_tolerance(ab);
    ASSERT_TRUE(is_closing(ab, tol));
    const LighthouseReport r = lighthouse_sweep(ab, 16, tol, s);
    auto fitted = [&](int j, int k) { return r.fitted.at({j, k}); };
    for (auto [j, k] : {std::pair{2, 5}, {3, 6}, {1, 4}}) {
      for (const Circle& other : {fitted(2, 4), fitted(1, 3)}) {
        const TangencyProbe t = tangency_probe(fitted(j, k), other, Tolerance(1e-7, tol.scene_scale));
        EXPECT_TRUE(t.is_tangent) << s << " C" << j << k;
        worst = std::max(worst, t.defect / tol.scene_scale);
      }
    }
  }
  RecordProperty("worst_relative_defect", std::to_string(worst));
}
