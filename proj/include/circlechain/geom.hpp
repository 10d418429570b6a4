#pragma once

// Planar primitives: points, circles, lines, oriented angles and the
// tolerance-governed intersection and incidence predicates everything else
// is built on.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

namespace circlechain {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

using Point = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Point a, Point b) { return norm(b - a); }
// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 unit(Vec2 v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError("unit: zero or non-finite vector");
  return v / n;
}

inline Vec2 polar(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Circle {
  Point center;
  double radius = 1.0;

  Circle() = default;
  Circle(Point c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r) || !is_finite(c))
      throw GeometryError("circle: radius must be positive and finite");
  }

  Point at(double angle) const { return center + radius * polar(angle); }
  // Signed distance from the circle, positive outside.
  double offset(Point p) const { return distance(center, p) - radius; }

  bool operator==(const Circle&) const = default;
};

struct Line {
  Point anchor;
  Vec2 direction{1.0, 0.0};

  Line() = default;
  Line(Point a, Vec2 d) : anchor(a), direction(unit(d)) {}

  static Line through(Point p, Point q) { return Line(p, q - p); }

  Point at(double t) const { return anchor + t * direction; }
  double offset(Point p) const { return cross(direction, p - anchor); }
};

// Oriented angle in radians, normalized to (-pi, pi].
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double radians) : value_(normalize(radians)) {}

  static double normalize(double radians) {
    double r = std::remainder(radians, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    if (r > kPi) r -= kTwoPi;
    return r;
  }

  constexpr double value() const { return value_; }
  Angle operator-() const { return Angle(-value_); }

 private:
  double value_ = 0.0;
};

// Distance between two angles on the circle, in [0, pi].
inline double angular_distance(double a, double b) { return std::abs(Angle::normalize(a - b)); }

struct Tolerance {
  double rel = 1e-9;
  double scene_scale = 1.0;

  Tolerance() = default;
  Tolerance(double r, double s) : rel(r), scene_scale(s) {
    if (!(r > 0.0) || !(s > 0.0)) throw GeometryError("tolerance: rel and scene_scale must be positive");
  }

  // Absolute length tolerance in scene units.
  double abs() const { return rel * scene_scale; }
  Tolerance scaled(double factor) const { return Tolerance(rel * factor, scene_scale); }
};

// Diameter of the bounding box of all circles.
inline double scene_scale(std::span<const Circle> circles) {
  if (circles.empty()) return 1.0;
  double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
  for (const Circle& c : circles) {
    lo_x = std::min(lo_x, c.center.x - c.radius);
    lo_y = std::min(lo_y, c.center.y - c.radius);
    hi_x = std::max(hi_x, c.center.x + c.radius);
    hi_y = std::max(hi_y, c.center.y + c.radius);
  }
  return std::hypot(hi_x - lo_x, hi_y - lo_y);
}

inline Tolerance scene_tolerance(std::span<const Circle> circles, double rel = 1e-9) {
  return Tolerance(rel, scene_scale(circles));
}

// Circle relations.
struct Disjoint {};
struct Nested {};
struct Coincident {};
struct Tangent {
  Point contact;
  bool internal = false;
};
struct Intersecting {
  Point a;  // left of the directed center line M1 -> M2
  Point b;  // right of it
};

using CircleRelation = std::variant<Disjoint, Tangent, Intersecting, Coincident, Nested>;

inline CircleRelation intersect_circles(const Circle& c1, const Circle& c2, const Tolerance& tol) {
  const Vec2 between = c2.center - c1.center;
  const double d = norm(between);
  const double r1 = c1.radius, r2 = c2.radius;
  const double eps = tol.abs();

  if (d <= eps) {
    if (std::abs(r1 - r2) <= eps) return Coincident{};
    return Nested{};
  }
  const Vec2 u = between / d;
  if (std::abs(d - (r1 + r2)) <= eps) return Tangent{c1.center + r1 * u, false};
  if (std::abs(d - std::abs(r1 - r2)) <= eps) {
    const Point contact = r1 >= r2 ? c1.center + r1 * u : c1.center - r1 * u;
    return Tangent{contact, true};
  }
  if (d > r1 + r2) return Disjoint{};
  if (d < std::abs(r1 - r2)) return Nested{};

  const double along = (d * d + (r1 - r2) * (r1 + r2)) / (2.0 * d);
  const double h2 = (r1 - along) * (r1 + along);
  const double h = std::sqrt(std::max(h2, 0.0));
  const Point base = c1.center + along * u;
  return Intersecting{base + h * perp(u), base - h * perp(u)};
}

inline bool on_circle(const Circle& c, Point p, const Tolerance& tol) {
  return std::abs(c.offset(p)) <= tol.abs();
}

// The other intersection of `carrier` with `circle`, given one known
// intersection. The non-known root comes from the root-sum identity, so it
// has no cancellation; a tangent carrier returns `known` itself.
inline Point second_intersection(const Line& carrier, const Circle& circle, Point known, const Tolerance& tol) {
  if (!on_circle(circle, known, tol))
    throw GeometryError("second_intersection: known point is not on the circle");
  if (std::abs(carrier.offset(known)) > tol.abs())
    throw GeometryError("second_intersection: carrier does not pass through the known point");
  const Vec2 d = carrier.direction;
  const double t = -2.0 * dot(d, known - circle.center) / dot(d, d);
  return known + t * d;
}

inline Circle circumcircle(Point p, Point q, Point r, const Tolerance& tol) {
  const Vec2 b = q - p;
  const Vec2 c = r - p;
  const double bb = dot(b, b), cc = dot(c, c);
  const double det = cross(b, c);
  const double span = std::max(bb, cc);
  if (!(span > 0.0) || std::abs(det) <= tol.rel * span)
    throw GeometryError("circumcircle: points are collinear or coincident");
  const double inv = 0.5 / det;
  const Vec2 offset{(c.y * bb - b.y * cc) * inv, (b.x * cc - c.x * bb) * inv};
  return Circle(p + offset, norm(offset));
}

inline Angle oriented_angle(Vec2 u, Vec2 v) {
  if (!(norm(u) > 0.0) || !(norm(v) > 0.0)) throw GeometryError("oriented_angle: zero vector");
  const double a = std::atan2(cross(u, v), dot(u, v));
  return Angle(a == -kPi ? kPi : a);
}

// Counterclockwise sweep from u to v, in [0, 2pi).
inline double ccw_sweep(Vec2 u, Vec2 v) {
  double a = oriented_angle(u, v).value();
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Tangent at `at`, directed as the quarter turn of the outward radial.
inline Line tangent_line(const Circle& circle, Point at, const Tolerance& tol) {
  if (!on_circle(circle, at, tol)) throw GeometryError("tangent_line: point is not on the circle");
  return Line(at, perp(unit(at - circle.center)));
}

inline Point intersect_lines(const Line& l1, const Line& l2, const Tolerance& tol) {
  const double denom = cross(l1.direction, l2.direction);
  if (std::abs(denom) <= tol.rel) throw GeometryError("intersect_lines: lines are parallel");
  const double t = cross(l2.anchor - l1.anchor, l2.direction) / denom;
  return l1.at(t);
}

inline Point reflect_across(Point p, const Line& l) {
  const Vec2 rel = p - l.anchor;
  const Point foot = l.anchor + dot(rel, l.direction) * l.direction;
  return 2.0 * foot - p;
}

// Second common point of two circles known to share `known`: the mirror
// image of `known` in the line of centers.
inline Point other_common_point(const Circle& c1, const Circle& c2, Point known) {
  const Vec2 q = c1.center - known;
  const Vec2 m = c2.center - known;
  const Vec2 e = unit(m - q);
  const Vec2 foot = q - dot(q, e) * e;
  return known + 2.0 * foot;
}

struct CircleFit {
  Circle circle;
  double residual = 0.0;
};

// Algebraic (Kasa) least-squares circle: minimizes the residual of
// x^2 + y^2 + D x + E y + F = 0 over centered, scaled data.
inline CircleFit fit_circle(std::span<const Point> points, const Tolerance& tol) {
  const auto count = static_cast<Eigen::Index>(points.size());
  if (count < 3) throw GeometryError("fit_circle: need at least three points");

  Point mean{};
  for (Point p : points) mean = mean + p;
  mean = mean / static_cast<double>(count);
  double spread = 0.0;
  for (Point p : points) spread = std::max(spread, distance(p, mean));
  if (!(spread > tol.abs())) throw GeometryError("fit_circle: points are coincident");

  Eigen::MatrixXd design(count, 3);
  Eigen::VectorXd rhs(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vec2 v = (points[static_cast<std::size_t>(i)] - mean) / spread;
    design(i, 0) = v.x;
    design(i, 1) = v.y;
    design(i, 2) = 1.0;
    rhs(i) = -(v.x * v.x + v.y * v.y);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(2) <= tol.rel * sv(0)) throw GeometryError("fit_circle: points are collinear");
  const Eigen::Vector3d coeff = svd.solve(rhs);

  const Vec2 c{-0.5 * coeff(0), -0.5 * coeff(1)};
  const double r2 = dot(c, c) - coeff(2);
  if (!(r2 > 0.0)) throw GeometryError("fit_circle: degenerate fit");
  const Circle fitted(mean + spread * c, spread * std::sqrt(r2));

  double residual = 0.0;
  for (Point p : points) residual = std::max(residual, std::abs(fitted.offset(p)));
  return {fitted, residual};
}

}  // namespace circlechain
