#pragma once

// Pivot maps, transfer angles and the closing criterion for chains of
// intersecting or touching circles.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "circlechain/geom.hpp"

namespace circlechain {

class ChainError : public GeometryError {
 public:
  ChainError(const std::string& what, std::size_t index)
      : GeometryError(what + " (at index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct PivotChoice {
  enum class Kind { a, b, explicit_point };

  Kind kind = Kind::a;
  Point point{};

  static PivotChoice A() { return {Kind::a, {}}; }
  static PivotChoice B() { return {Kind::b, {}}; }
  static PivotChoice at(Point p) { return {Kind::explicit_point, p}; }

  bool operator==(const PivotChoice& o) const {
    return kind == o.kind && (kind != Kind::explicit_point || point == o.point);
  }
};

struct Chain {
  std::vector<Circle> circles;
  std::vector<PivotChoice> pivots;
  bool closed = true;

  std::size_t size() const { return circles.size(); }
  std::size_t joint_count() const { return closed ? circles.size() : circles.size() - 1; }
  const Circle& joint_from(std::size_t j) const { return circles[j]; }
  const Circle& joint_to(std::size_t j) const { return circles[(j + 1) % circles.size()]; }
};

inline Tolerance scene_tolerance(const Chain& chain, double rel = 1e-9) {
  return scene_tolerance(std::span<const Circle>(chain.circles), rel);
}

inline Point resolve_pivot(const Circle& from, const Circle& to, const PivotChoice& choice, const Tolerance& tol) {
  const CircleRelation rel = intersect_circles(from, to, tol);
  if (std::holds_alternative<Disjoint>(rel)) throw GeometryError("resolve_pivot: circles are disjoint");
  if (std::holds_alternative<Nested>(rel)) throw GeometryError("resolve_pivot: circles are nested");
  if (std::holds_alternative<Coincident>(rel)) throw GeometryError("resolve_pivot: circles coincide");

  if (choice.kind == PivotChoice::Kind::explicit_point) {
    if (!on_circle(from, choice.point, tol) || !on_circle(to, choice.point, tol))
      throw GeometryError("resolve_pivot: explicit pivot is not on both circles");
    return choice.point;
  }
  if (const auto* t = std::get_if<Tangent>(&rel)) return t->contact;
  const auto& both = std::get<Intersecting>(rel);
  return choice.kind == PivotChoice::Kind::a ? both.a : both.b;
}

// The other common point of the joint; the contact point itself when the
// circles touch.
inline Point companion_point(const Circle& from, const Circle& to, Point pivot, const Tolerance& tol) {
  const CircleRelation rel = intersect_circles(from, to, tol);
  if (const auto* t = std::get_if<Tangent>(&rel)) return t->contact;
  const auto* both = std::get_if<Intersecting>(&rel);
  if (both == nullptr) throw GeometryError("companion_point: circles do not intersect");
  return distance(both->a, pivot) >= distance(both->b, pivot) ? both->a : both->b;
}

// Label (A or B) that resolves to `pivot`, or an explicit choice when it is
// neither intersection point.
inline PivotChoice label_pivot(const Circle& from, const Circle& to, Point pivot, const Tolerance& tol) {
  const CircleRelation rel = intersect_circles(from, to, tol);
  if (const auto* t = std::get_if<Tangent>(&rel)) {
    if (distance(t->contact, pivot) <= tol.abs()) return PivotChoice::A();
  } else if (const auto* both = std::get_if<Intersecting>(&rel)) {
    if (distance(both->a, pivot) <= tol.abs()) return PivotChoice::A();
    if (distance(both->b, pivot) <= tol.abs()) return PivotChoice::B();
  }
  return PivotChoice::at(pivot);
}

inline std::vector<Point> resolve_pivots(const Chain& chain, const Tolerance& tol) {
  if (chain.circles.size() < 2) throw GeometryError("chain: need at least two circles");
  if (chain.pivots.size() != chain.joint_count())
    throw GeometryError(chain.closed ? "chain: a closed chain needs one pivot per circle"
                                     : "chain: an open chain needs one pivot fewer than circles");
  std::vector<Point> out;
  out.reserve(chain.joint_count());
  for (std::size_t j = 0; j < chain.joint_count(); ++j) {
    try {
      out.push_back(resolve_pivot(chain.joint_from(j), chain.joint_to(j), chain.pivots[j], tol));
    } catch (const GeometryError& e) {
      throw ChainError(e.what(), j);
    }
  }
  return out;
}

inline void validate_chain(const Chain& chain, const Tolerance& tol) { (void)resolve_pivots(chain, tol); }

// The image point together with the line (or, for the concyclic map, the
// chord) that carried it.
struct MapStep {
  Point image;
  Line carrier;
};

namespace detail {

inline void require_joint(const Circle& from, const Circle& to, Point pivot, Point x, const Tolerance& tol) {
  if (!on_circle(from, pivot, tol) || !on_circle(to, pivot, tol))
    throw GeometryError("pivot map: pivot is not on both circles");
  if (!on_circle(from, x, tol)) throw GeometryError("pivot map: point is not on the source circle");
}

inline MapStep line_step(const Circle& from, const Circle& to, Point pivot, Point x, const Tolerance& tol) {
  const Vec2 chord = x - pivot;
  Vec2 direction;
  if (norm(chord) <= tol.abs()) {
    direction = perp(pivot - from.center);
  } else {
    // The chord is perpendicular to the sum of the two radii; that form is
    // exact in the limit x -> pivot, the difference form near antipodes.
    const Vec2 bisector = (x - from.center) + (pivot - from.center);
    direction = norm(chord) >= norm(bisector) ? chord : perp(bisector);
  }
  const Line carrier(pivot, direction);
  return {second_intersection(carrier, to, pivot, tol), carrier};
}

}  // namespace detail

inline MapStep pivot_step(const Circle& from, const Circle& to, Point pivot, Point x, const Tolerance& tol) {
  detail::require_joint(from, to, pivot, x, tol);
  return detail::line_step(from, to, pivot, x, tol);
}

inline Point pivot_map(const Circle& from, const Circle& to, Point pivot, Point x, const Tolerance& tol) {
  return pivot_step(from, to, pivot, x, tol).image;
}

inline MapStep concyclic_step(const Circle& from, const Circle& to, Point pivot, Point anchor, Point x,
                              const Tolerance& tol) {
  if (on_circle(from, anchor, tol) || on_circle(to, anchor, tol))
    throw GeometryError("concyclic pivot map: anchor lies on a joint circle");
  detail::require_joint(from, to, pivot, x, tol);

  Circle carrier;
  const Vec2 w = pivot - anchor;
  if (distance(x, pivot) <= tol.abs()) {
    // Circle through pivot and anchor tangent to the source circle at pivot.
    const Vec2 u = unit(pivot - from.center);
    const double uw = dot(u, w);
    if (std::abs(uw) <= tol.rel * norm(w)) return detail::line_step(from, to, pivot, x, tol);
    const double s = -dot(w, w) / (2.0 * uw);
    carrier = Circle(pivot + s * u, std::abs(s));
  } else {
    const Vec2 b = x - pivot;
    const Vec2 c = anchor - pivot;
    if (std::abs(cross(b, c)) <= tol.rel * norm(b) * norm(c))
      return detail::line_step(from, to, pivot, x, tol);
    // circumcircle() would reject x this close to the pivot
    const double inv = 0.5 / cross(b, c);
    const Vec2 offset{(c.y * dot(b, b) - b.y * dot(c, c)) * inv, (b.x * dot(c, c) - c.x * dot(b, b)) * inv};
    carrier = Circle(pivot + offset, norm(offset));
  }

  const Point image = other_common_point(carrier, to, pivot);
  const Line side = distance(x, image) > tol.abs() ? Line::through(x, image)
                                                   : Line(pivot, perp(pivot - carrier.center));
  return {image, side};
}

inline Point pivot_map_concyclic(const Circle& from, const Circle& to, Point pivot, Point anchor, Point x,
                                 const Tolerance& tol) {
  return concyclic_step(from, to, pivot, anchor, x, tol).image;
}

// Transfer angle by definition: rotation from the radial direction of a
// probe X about M1 to the radial direction of its image about M2.
inline Angle transfer_angle_measured(const Circle& from, const Circle& to, Point pivot, const Tolerance& tol,
                                     double probe_offset = kPi / 2) {
  const double phase = std::atan2(pivot.y - from.center.y, pivot.x - from.center.x);
  const Point probe = from.at(phase + probe_offset);
  const Point image = pivot_map(from, to, pivot, probe, tol);
  return oriented_angle(probe - from.center, image - to.center);
}

// delta and gamma are counterclockwise sweeps in [0, 2pi): delta from the
// pivot to its companion about M1, gamma from the companion to the pivot
// about M2. On that branch mu = pi - (delta + gamma) / 2 holds for every
// configuration.
struct JointAngles {
  double delta = 0.0;
  double gamma = 0.0;
  Angle mu;
};

inline JointAngles transfer_angle_formula(const Circle& from, const Circle& to, Point pivot, const Tolerance& tol) {
  if (!on_circle(from, pivot, tol) || !on_circle(to, pivot, tol))
    throw GeometryError("transfer angle: pivot is not on both circles");
  const CircleRelation rel = intersect_circles(from, to, tol);
  JointAngles out;
  if (const auto* t = std::get_if<Tangent>(&rel)) {
    // Limit of the sweeps as the two common points merge.
    out.delta = 0.0;
    out.gamma = t->internal ? kTwoPi : 0.0;
  } else if (std::holds_alternative<Intersecting>(rel)) {
    const Point other = companion_point(from, to, pivot, tol);
    out.delta = ccw_sweep(pivot - from.center, other - from.center);
    out.gamma = ccw_sweep(other - to.center, pivot - to.center);
  } else {
    throw GeometryError("transfer angle: circles do not intersect");
  }
  out.mu = Angle(kPi - 0.5 * (out.delta + out.gamma));
  return out;
}

struct TangentAngle {
  Angle mu;
  bool fallback = false;  // tangents were degenerate; value came from the measured route
};

// Angle from t2 to t1, where t1 (tangent of the source circle) points into
// the target circle and t2 (tangent of the target) points out of the source.
inline TangentAngle transfer_angle_tangent(const Circle& from, const Circle& to, Point pivot, const Tolerance& tol) {
  if (!on_circle(from, pivot, tol) || !on_circle(to, pivot, tol))
    throw GeometryError("transfer angle: pivot is not on both circles");
  const Vec2 r1 = unit(pivot - from.center);
  const Vec2 r2 = unit(pivot - to.center);
  Vec2 t1 = perp(r1);
  Vec2 t2 = perp(r2);
  const double into = dot(t1, r2);
  const double out_of = dot(t2, r1);
  if (std::abs(into) <= tol.rel || std::abs(out_of) <= tol.rel)
    return {transfer_angle_measured(from, to, pivot, tol), true};
  if (into > 0.0) t1 = -t1;
  if (out_of < 0.0) t2 = -t2;
  return {oriented_angle(t2, t1), false};
}

struct TransferReport {
  std::vector<JointAngles> joints;
  double total = 0.0;       // plain sum of the joint angles, no wrapping
  long long winding = 0;    // k with total closest to 2 pi k
  double closing_defect = 0.0;
};

inline TransferReport transfer_report(const Chain& chain, const Tolerance& tol) {
  if (!chain.closed) throw GeometryError("transfer_report: chain is open");
  const std::vector<Point> pivots = resolve_pivots(chain, tol);
  TransferReport report;
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    try {
      report.joints.push_back(transfer_angle_formula(chain.joint_from(j), chain.joint_to(j), pivots[j], tol));
    } catch (const GeometryError& e) {
      throw ChainError(e.what(), j);
    }
    report.total += report.joints.back().mu.value();
  }
  report.winding = std::llround(report.total / kTwoPi);
  report.closing_defect = report.total - kTwoPi * static_cast<double>(report.winding);
  // Half-turn defects are reported as +pi, matching the angle convention.
  const double slack = static_cast<double>(pivots.size()) * tol.rel;
  if (report.closing_defect <= -kPi + slack) {
    report.winding -= 1;
    report.closing_defect += kTwoPi;
  }
  return report;
}

inline bool is_closing(const TransferReport& report, const Tolerance& tol) {
  return std::abs(report.closing_defect) <= static_cast<double>(report.joints.size()) * tol.rel;
}

inline bool is_closing(const Chain& chain, const Tolerance& tol) { return is_closing(transfer_report(chain, tol), tol); }

struct Trace {
  std::vector<Point> vertices;
  std::vector<Line> side_lines;
  int rounds = 1;
};

inline Trace iterate(const Chain& chain, Point start, int rounds, std::optional<Point> concyclic_anchor,
                     const Tolerance& tol) {
  if (rounds < 1) throw GeometryError("iterate: rounds must be at least 1");
  if (!chain.closed && rounds != 1) throw GeometryError("iterate: an open chain runs a single pass");
  const std::vector<Point> pivots = resolve_pivots(chain, tol);
  if (!on_circle(chain.circles.front(), start, tol)) throw GeometryError("iterate: start is not on the first circle");

  const std::size_t joints = pivots.size();
  Trace trace;
  trace.rounds = rounds;
  trace.vertices.reserve(joints * static_cast<std::size_t>(rounds) + 1);
  trace.vertices.push_back(start);
  Point x = start;
  std::size_t step = 0;
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t j = 0; j < joints; ++j, ++step) {
      try {
        const MapStep s = concyclic_anchor
                              ? concyclic_step(chain.joint_from(j), chain.joint_to(j), pivots[j], *concyclic_anchor, x, tol)
                              : pivot_step(chain.joint_from(j), chain.joint_to(j), pivots[j], x, tol);
        x = s.image;
        trace.vertices.push_back(x);
        trace.side_lines.push_back(s.carrier);
      } catch (const GeometryError& e) {
        throw ChainError(std::string("iterate: ") + e.what(), step);
      }
    }
  }
  return trace;
}

// Image of x after one full pass through the chain.
inline Point composite_map(const Chain& chain, Point x, const Tolerance& tol,
                           std::optional<Point> concyclic_anchor = std::nullopt) {
  return iterate(chain, x, 1, concyclic_anchor, tol).vertices.back();
}

inline std::vector<double> starting_angles(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<double> out(count);
  for (double& a : out) a = kTwoPi * static_cast<double>(engine() >> 11) * 0x1.0p-53;
  return out;
}

inline std::optional<int> closure_order(const Chain& chain, int max_k, const Tolerance& tol,
                                        std::uint64_t seed = 0) {
  if (max_k < 1) throw GeometryError("closure_order: max_k must be at least 1");
  const TransferReport report = transfer_report(chain, tol);
  const double n = static_cast<double>(report.joints.size());
  const Point start = chain.circles.front().at(starting_angles(1, seed).front());
  for (int k = 1; k <= max_k; ++k) {
    const double defect = Angle::normalize(static_cast<double>(k) * report.total);
    if (std::abs(defect) > k * n * tol.rel) continue;
    const Trace trace = iterate(chain, start, k, std::nullopt, tol);
    if (distance(trace.vertices.back(), start) <= k * n * tol.abs()) return k;
  }
  return std::nullopt;
}

// Same circles with every pivot replaced by its companion intersection.
inline Chain flipped(const Chain& chain, const Tolerance& tol) {
  Chain out = chain;
  const std::vector<Point> pivots = resolve_pivots(chain, tol);
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    PivotChoice& p = out.pivots[j];
    switch (p.kind) {
      case PivotChoice::Kind::a: p = PivotChoice::B(); break;
      case PivotChoice::Kind::b: p = PivotChoice::A(); break;
      case PivotChoice::Kind::explicit_point:
        p = PivotChoice::at(companion_point(chain.joint_from(j), chain.joint_to(j), pivots[j], tol));
        break;
    }
  }
  return out;
}

enum class ReturnPivots {
  same,       // the return leg passes through the forward pivots again
  companion,  // the return leg uses the other intersection of each joint
};

// Closed chain C1 .. Cn C(n-1) .. C2 for an open chain C1 .. Cn.
inline Chain doubled_chain(const Chain& open, ReturnPivots mode = ReturnPivots::same,
                           std::optional<Tolerance> tolerance = std::nullopt) {
  if (open.closed) throw GeometryError("doubled_chain: chain is already closed");
  if (open.circles.size() < 2) throw GeometryError("doubled_chain: need at least two circles");
  const Tolerance tol = tolerance.value_or(scene_tolerance(open));
  const std::vector<Point> pivots = resolve_pivots(open, tol);
  const std::size_t n = open.circles.size();

  Chain out;
  out.closed = true;
  out.circles = open.circles;
  for (std::size_t i = n - 1; i-- > 1;) out.circles.push_back(open.circles[i]);
  out.pivots = open.pivots;
  for (std::size_t j = n - 1; j-- > 0;) {
    const PivotChoice& p = open.pivots[j];
    const Circle& near = open.circles[j];
    const Circle& far = open.circles[j + 1];
    // Traversed backwards, the left/right labels swap sides.
    if (p.kind == PivotChoice::Kind::explicit_point) {
      out.pivots.push_back(mode == ReturnPivots::same ? p
                                                      : PivotChoice::at(companion_point(near, far, pivots[j], tol)));
    } else {
      const bool keep = mode == ReturnPivots::companion;
      const bool is_a = p.kind == PivotChoice::Kind::a;
      out.pivots.push_back(is_a == keep ? PivotChoice::A() : PivotChoice::B());
    }
  }
  return out;
}

}  // namespace circlechain
