#pragma once

// Seeded generators for the chain configurations the closing theorems talk
// about. Each generator builds its scene so that the property it illustrates
// holds by construction, independent of the transfer-angle code.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "circlechain/chain.hpp"
#include "circlechain/geom.hpp"
#include "circlechain/incidence.hpp"

namespace circlechain {

class SceneError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// mt19937_64 with an explicit double conversion, so the stream of reals is
// the same on every standard library.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool chance(double p) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class SceneKind { polygon, common_point, touching, quadrilateral, n_lines, rational, open_polygon };

inline constexpr std::array<SceneKind, 7> kAllSceneKinds = {SceneKind::polygon,  SceneKind::common_point,
                                                            SceneKind::touching, SceneKind::quadrilateral,
                                                            SceneKind::n_lines,  SceneKind::rational,
                                                            SceneKind::open_polygon};

inline std::string_view kind_name(SceneKind k) {
  switch (k) {
    case SceneKind::polygon: return "polygon";
    case SceneKind::common_point: return "common_point";
    case SceneKind::touching: return "touching";
    case SceneKind::quadrilateral: return "quadrilateral";
    case SceneKind::n_lines: return "n_lines";
    case SceneKind::rational: return "rational";
    case SceneKind::open_polygon: return "open_polygon";
  }
  return "?";
}

inline std::optional<SceneKind> parse_kind(std::string_view name) {
  for (SceneKind k : kAllSceneKinds)
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

struct LineArrangement {
  std::vector<Line> lines;
  std::vector<Angle> exterior_angles;  // omega_i at A_i = l_i meet l_(i+1), turning from l_(i+1) to l_i
};

// Whether the triangle of l_(i-1), l_i, l_(i+1) (0-based i) runs against the
// polygon, i.e. l_(i-1) and l_(i+1) meet behind A_(i-1) A_i.
inline bool flipped_triangle(const LineArrangement& arr, std::size_t i) {
  const std::size_t n = arr.exterior_angles.size();
  return Angle(arr.exterior_angles[(i + n - 1) % n].value() + arr.exterior_angles[i].value()).value() >= 0.0;
}

// Transfer angle at A_i predicted from the exterior angles:
// 2 pi - (omega_(i-1) + omega_i + omega_(i+1)), plus pi for each flipped
// triangle at A_i when `corrected`.
inline double n_line_transfer_angle(const LineArrangement& arr, std::size_t i, bool corrected = true) {
  const std::size_t n = arr.exterior_angles.size();
  const auto w = [&](std::size_t k) { return arr.exterior_angles[k % n].value(); };
  double mu = kTwoPi - (w(i + n - 1) + w(i) + w(i + 1));
  if (corrected) mu += kPi * (flipped_triangle(arr, i) + flipped_triangle(arr, (i + 1) % n));
  return Angle::normalize(mu);
}

struct PolygonScene {
  Chain chain;
  Point witness;
};

struct LineScene {
  LineArrangement arrangement;
  Chain chain;
};

namespace detail {

inline constexpr int kMaxAttempts = 5000;
inline constexpr double kBaseRadius = 3.0;
// Minimum |sin| between any two side lines of a generated polygon.
inline constexpr double kMinSideSeparation = 0.05;

// Star-shaped polygon around the origin with jittered angles and radii.
inline std::vector<Point> star_polygon(SceneRng& rng, int n, double radius) {
  std::vector<double> angles(static_cast<std::size_t>(n));
  const double offset = rng.uniform(0.0, kTwoPi);
  for (int i = 0; i < n; ++i) angles[i] = offset + kTwoPi * (i + rng.uniform(-0.3, 0.3)) / n;
  std::vector<Point> pts;
  for (double a : angles) pts.push_back(rng.uniform(0.6, 1.4) * radius * polar(a));
  return pts;
}

inline bool genuinely_intersecting(const Circle& c1, const Circle& c2, const Tolerance& tol, double min_gap) {
  const CircleRelation rel = intersect_circles(c1, c2, tol);
  const auto* both = std::get_if<Intersecting>(&rel);
  return both != nullptr && distance(both->a, both->b) >= min_gap;
}

inline Chain labeled(Chain chain) {
  const Tolerance tol = scene_tolerance(chain);
  for (std::size_t j = 0; j < chain.joint_count(); ++j) {
    if (chain.pivots[j].kind == PivotChoice::Kind::explicit_point)
      chain.pivots[j] = label_pivot(chain.joint_from(j), chain.joint_to(j), chain.pivots[j].point, tol);
  }
  return chain;
}

inline bool circles_reasonable(const std::vector<Circle>& circles, double max_radius) {
  return std::all_of(circles.begin(), circles.end(), [&](const Circle& c) {
    return c.radius <= max_radius && norm(c.center) <= 2.0 * max_radius;
  });
}

}  // namespace detail

inline PolygonScene gen_polygon_chain(int n, std::uint64_t seed) {
  if (n < 3) throw SceneError("gen_polygon_chain: n must be at least 3");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  for (int attempt = 0; attempt < detail::kMaxAttempts; ++attempt) {
    const std::vector<Point> x = detail::star_polygon(rng, n, R);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j) {
        const Vec2 si = x[(i + 1) % n] - x[i];
        const Vec2 sj = x[(j + 1) % n] - x[j];
        ok = std::abs(cross(unit(si), unit(sj))) >= detail::kMinSideSeparation;
      }
    if (!ok) continue;

    // A_i on the (extended) side X_i X_(i+1).
    std::vector<Point> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double t = rng.uniform(0.15, 0.85);
      if (rng.chance(0.2)) t = rng.chance(0.5) ? rng.uniform(1.1, 1.5) : rng.uniform(-0.5, -0.1);
      a[i] = x[i] + t * (x[(i + 1) % n] - x[i]);
    }
    Chain chain;
    try {
      const Tolerance unit_tol(1e-6, 1.0);
      for (int i = 0; i < n; ++i) chain.circles.push_back(circumcircle(a[(i + n - 1) % n], x[i], a[i], unit_tol));
    } catch (const GeometryError&) {
      continue;
    }
    if (!detail::circles_reasonable(chain.circles, 8.0 * R)) continue;
    const Tolerance tol = scene_tolerance(chain);
    for (int i = 0; i < n && ok; ++i)
      ok = detail::genuinely_intersecting(chain.circles[i], chain.circles[(i + 1) % n], tol, 0.02 * R);
    if (!ok) continue;
    for (int i = 0; i < n; ++i) chain.pivots.push_back(PivotChoice::at(a[i]));
    return {detail::labeled(std::move(chain)), x[0]};
  }
  throw SceneError("gen_polygon_chain: no acceptable polygon after bounded retries");
}

// Random closed or open chain whose neighbors genuinely intersect, with
// random pivot labels. Nothing about closing is implied.
inline Chain gen_intersecting_chain(int n, std::uint64_t seed, bool closed = true) {
  if (n < 2) throw SceneError("gen_intersecting_chain: n must be at least 2");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  for (int attempt = 0; attempt < detail::kMaxAttempts; ++attempt) {
    const std::vector<Point> centers = detail::star_polygon(rng, n, R);
    Chain chain;
    chain.closed = closed;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const double d_prev = distance(centers[i], centers[(i + n - 1) % n]);
      const double d_next = distance(centers[i], centers[(i + 1) % n]);
      const double lo = 0.35 * std::max(closed || i > 0 ? d_prev : 0.0, i + 1 < n || closed ? d_next : 0.0);
      const double hi = 0.95 * std::min(closed || i > 0 ? d_prev : INFINITY, i + 1 < n || closed ? d_next : INFINITY);
      const double r = rng.uniform(std::max(lo, 0.3), std::max(hi, lo + 0.5));
      if (!(r > 0.0)) ok = false;
      else chain.circles.push_back(Circle(centers[i], r));
    }
    if (!ok) continue;
    const Tolerance tol = scene_tolerance(chain);
    for (std::size_t j = 0; j < chain.joint_count() && ok; ++j)
      ok = detail::genuinely_intersecting(chain.joint_from(j), chain.joint_to(j), tol, 0.05 * R);
    if (!ok) continue;
    for (std::size_t j = 0; j < chain.joint_count(); ++j)
      chain.pivots.push_back(rng.chance(0.5) ? PivotChoice::A() : PivotChoice::B());
    return chain;
  }
  throw SceneError("gen_intersecting_chain: no acceptable chain after bounded retries");
}

inline Chain gen_common_point(int n, std::uint64_t seed) {
  if (n < 3) throw SceneError("gen_common_point: n must be at least 3");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  for (int attempt = 0; attempt < detail::kMaxAttempts; ++attempt) {
    const Point common{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    std::vector<Point> centers = detail::star_polygon(rng, n, 0.6 * R);
    for (Point& m : centers) m = m + common;
    Chain chain;
    std::vector<Point> a;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const Point mi = centers[i], mj = centers[(i + 1) % n];
      const Point other = reflect_across(common, Line::through(mi, mj));
      ok = distance(other, common) >= 0.1 * R;
      a.push_back(other);
    }
    if (!ok) continue;
    for (const Point& m : centers) chain.circles.push_back(Circle(m, distance(m, common)));
    for (const Point& p : a) chain.pivots.push_back(PivotChoice::at(p));
    return detail::labeled(std::move(chain));
  }
  throw SceneError("gen_common_point: no acceptable configuration after bounded retries");
}

inline Chain gen_touching_chain(int n, std::uint64_t seed) {
  if (n < 3) throw SceneError("gen_touching_chain: n must be at least 3");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  for (int attempt = 0; attempt < detail::kMaxAttempts; ++attempt) {
    // Centers M_1 .. M_(n-1) on a jittered convex ring; radii follow from
    // tangency along the ring, and M_n closes it.
    std::vector<Point> m;
    const double offset = rng.uniform(0.0, kTwoPi);
    for (int i = 0; i + 1 < n; ++i)
      m.push_back(R * rng.uniform(0.85, 1.15) * polar(offset + kTwoPi * (i + rng.uniform(-0.15, 0.15)) / n));
    std::vector<double> r(static_cast<std::size_t>(n));
    r[0] = rng.uniform(0.3, 0.7) * distance(m[0], m[1 % (n - 1)]);
    bool ok = true;
    for (int i = 0; i + 2 < n && ok; ++i) {
      r[i + 1] = distance(m[i], m[i + 1]) - r[i];
      ok = r[i + 1] >= 0.15 * distance(m[i], m[i + 1]);
    }
    if (!ok) continue;
    r[n - 1] = rng.uniform(0.4, 1.2) * std::accumulate(r.begin(), r.end() - 1, 0.0) / (n - 1);
    try {
      const Circle around_last(m[n - 2], r[n - 2] + r[n - 1]);
      const Circle around_first(m[0], r[0] + r[n - 1]);
      const CircleRelation rel = intersect_circles(around_last, around_first, Tolerance(1e-12, R));
      const auto* both = std::get_if<Intersecting>(&rel);
      if (both == nullptr) continue;
      // Keep the ring convex: M_n on the far side of the chord M_(n-1) M_1.
      Point centroid{};
      for (const Point& p : m) centroid = centroid + p;
      centroid = centroid / static_cast<double>(m.size());
      const Point pick = distance(both->a, centroid) > distance(both->b, centroid) ? both->a : both->b;
      m.push_back(pick);
    } catch (const GeometryError&) {
      continue;
    }
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 2; j < n && ok; ++j) {
        if (i == 0 && j == n - 1) continue;
        ok = distance(m[i], m[j]) > 1.05 * (r[i] + r[j]);
      }
    if (!ok) continue;
    Chain chain;
    for (int i = 0; i < n; ++i) chain.circles.push_back(Circle(m[i], r[i]));
    const Tolerance tol = scene_tolerance(chain);
    for (int i = 0; i < n && ok; ++i) {
      const CircleRelation rel = intersect_circles(chain.circles[i], chain.circles[(i + 1) % n], tol);
      const auto* t = std::get_if<Tangent>(&rel);
      ok = t != nullptr && !t->internal;
    }
    if (!ok) continue;
    chain.pivots.assign(static_cast<std::size_t>(n), PivotChoice::A());
    return chain;
  }
  throw SceneError("gen_touching_chain: no acceptable ring after bounded retries");
}

inline LineScene gen_line_arrangement(int n, std::uint64_t seed) {
  if (n < 4) throw SceneError("gen_line_arrangement: n must be at least 4");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  for (int attempt = 0; attempt < detail::kMaxAttempts; ++attempt) {
    // Vertices A_1 .. A_n; l_i runs through A_(i-1) and A_i.
    const std::vector<Point> a = detail::star_polygon(rng, n, R);
    LineScene scene;
    auto& lines = scene.arrangement.lines;
    for (int i = 0; i < n; ++i) lines.push_back(Line::through(a[(i + n - 1) % n], a[i]));

    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j) ok = std::abs(cross(lines[i].direction, lines[j].direction)) >= 0.08;
    if (!ok) continue;
    const Tolerance unit_tol(1e-9, 1.0);
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j) {
        const Point meet = intersect_lines(lines[i], lines[j], unit_tol);
        ok = norm(meet) <= 12.0 * R;
        for (int k = 0; k < n && ok; ++k)
          if (k != i && k != j) ok = std::abs(lines[k].offset(meet)) >= 0.02 * R;
      }
    if (!ok) continue;

    Chain& chain = scene.chain;
    for (int i = 0; i < n; ++i) {
      const Line& before = lines[(i + n - 1) % n];
      const Line& after = lines[(i + 1) % n];
      chain.circles.push_back(circumcircle(a[(i + n - 1) % n], a[i], intersect_lines(before, after, unit_tol), unit_tol));
      chain.pivots.push_back(PivotChoice::at(a[i]));
    }
    if (!detail::circles_reasonable(chain.circles, 10.0 * R)) continue;
    const Tolerance tol = scene_tolerance(chain);
    for (int i = 0; i < n && ok; ++i)
      ok = detail::genuinely_intersecting(chain.circles[i], chain.circles[(i + 1) % n], tol, 0.02 * R);
    if (!ok) continue;
    const Trace probe = iterate(chain, chain.circles[0].at(rng.uniform(0.0, kTwoPi)), 1, std::nullopt, tol);
    if (side_line_separation(probe) < detail::kMinSideSeparation) continue;

    for (int i = 0; i < n; ++i)
      scene.arrangement.exterior_angles.push_back(oriented_angle(a[(i + 1) % n] - a[i], a[i] - a[(i + n - 1) % n]));
    chain = detail::labeled(std::move(chain));
    return scene;
  }
  throw SceneError("gen_line_arrangement: no lines in general position after bounded retries");
}

namespace detail {

// Circle through p and q whose counterclockwise central angle from p to q
// is `sweep`, in (0, 2 pi).
inline Circle pencil_circle(Point p, Point q, double sweep) {
  const double h = 0.5 * distance(p, q);
  const Vec2 e = unit(q - p);
  const Point mid = 0.5 * (p + q);
  const double s = h / std::tan(0.5 * sweep);
  return Circle(mid + s * perp(e), h / std::sin(0.5 * sweep));
}

// Solves wrap(f(sweep)) = 0 over the pencil through p and q by a grid scan
// for a genuine sign change followed by bisection. `period` is the wrap
// period of f. Returns nullopt when no admissible root exists.
template <typename F>
std::optional<double> solve_pencil(F&& f, double lo, double hi, double period) {
  auto wrapped = [&](double s) {
    const double v = std::remainder(f(s), period);
    return v;
  };
  constexpr int kGrid = 256;
  double prev_s = lo, prev_v = wrapped(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double s = lo + (hi - lo) * i / kGrid;
    const double v = wrapped(s);
    if (prev_v <= 0.0 && v > 0.0 && v - prev_v < 0.25 * period) {
      double a = prev_s, b = s;
      for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        const double mid = 0.5 * (a + b);
        if (wrapped(mid) <= 0.0) a = mid;
        else b = mid;
      }
      return 0.5 * (a + b);
    }
    prev_s = s;
    prev_v = v;
  }
  return std::nullopt;
}

// Unwrapped increments of f along the grid all share one sign.
template <typename F>
bool monotone_on(F&& f, double lo, double hi, double period) {
  constexpr int kGrid = 64;
  int sign = 0;
  double prev = f(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = f(lo + (hi - lo) * i / kGrid);
    const double step = std::remainder(v - prev, period);
    const int s = step > 0.0 ? 1 : (step < 0.0 ? -1 : 0);
    if (s != 0 && sign != 0 && s != sign) return false;
    if (s != 0) sign = s;
    prev = v;
  }
  return sign != 0;
}

inline double total_transfer(const Chain& chain, const Tolerance& tol) {
  const std::vector<Point> pivots = resolve_pivots(chain, tol);
  double total = 0.0;
  for (std::size_t j = 0; j < pivots.size(); ++j)
    total += transfer_angle_formula(chain.joint_from(j), chain.joint_to(j), pivots[j], tol).mu.value();
  return total;
}

}  // namespace detail

inline Chain gen_rational_chain(int n, int p, int q, std::uint64_t seed) {
  if (n < 3) throw SceneError("gen_rational_chain: n must be at least 3");
  if (q < 1 || std::gcd(p, q) != 1) throw SceneError("gen_rational_chain: need q >= 1 and gcd(p, q) = 1");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  const double target = kTwoPi * static_cast<double>(p) / static_cast<double>(q);
  for (int attempt = 0; attempt < 200; ++attempt) {
    // Upstream open chain C_1 .. C_(n-1); C_n comes from the pencil through
    // A_(n-1) on C_(n-1) and A_n on C_1.
    Chain upstream = gen_intersecting_chain(n - 1, rng.next(), false);
    const Circle& first = upstream.circles.front();
    const Circle& last = upstream.circles.back();
    const Point a_last = last.at(rng.uniform(0.0, kTwoPi));
    const Point a_first = first.at(rng.uniform(0.0, kTwoPi));
    if (distance(a_last, a_first) < 0.3 * R) continue;

    Chain chain = upstream;
    chain.closed = true;
    chain.circles.push_back(detail::pencil_circle(a_last, a_first, kPi));
    chain.pivots.push_back(PivotChoice::at(a_last));
    chain.pivots.push_back(PivotChoice::at(a_first));
    const Tolerance tol(1e-9, 4.0 * R);

    auto defect = [&](double sweep) {
      chain.circles.back() = detail::pencil_circle(a_last, a_first, sweep);
      try {
        return detail::total_transfer(chain, tol) - target;
      } catch (const GeometryError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    const double lo = 0.05, hi = kTwoPi - 0.05;
    if (!detail::monotone_on(defect, lo, hi, kTwoPi)) continue;
    const auto sweep = detail::solve_pencil(defect, lo, hi, kTwoPi);
    if (!sweep) continue;
    chain.circles.back() = detail::pencil_circle(a_last, a_first, *sweep);
    if (!detail::circles_reasonable(chain.circles, 10.0 * R)) continue;
    const Tolerance scene_tol = scene_tolerance(chain);
    const std::size_t m = chain.circles.size();
    if (!detail::genuinely_intersecting(chain.circles[m - 2], chain.circles[m - 1], scene_tol, 0.02 * R) ||
        !detail::genuinely_intersecting(chain.circles[m - 1], chain.circles[0], scene_tol, 0.02 * R))
      continue;
    const TransferReport report = transfer_report(chain, scene_tol);
    if (angular_distance(report.total, target) > 1e-11) continue;
    return detail::labeled(std::move(chain));
  }
  throw SceneError("gen_rational_chain: no pencil member reaches the target after bounded retries");
}

// Open chain whose forward-then-back traversal closes with either return
// pivot rule: the forward transfer angles sum to a multiple of pi.
inline PolygonScene gen_open_polygon(int n, std::uint64_t seed) {
  if (n < 2) throw SceneError("gen_open_polygon: n must be at least 2");
  SceneRng rng(seed);
  const double R = detail::kBaseRadius;
  if (n == 2) {
    // Only a touching pair has a forward angle that is a multiple of pi.
    const Circle c1({0.0, 0.0}, rng.uniform(0.8, 1.5) * R * 0.5);
    const double r2 = rng.uniform(0.5, 1.5) * c1.radius;
    const Vec2 dir = polar(rng.uniform(0.0, kTwoPi));
    Chain chain;
    chain.closed = false;
    chain.circles = {c1, Circle(c1.center + (c1.radius + r2) * dir, r2)};
    chain.pivots = {PivotChoice::A()};
    return {chain, c1.at(rng.uniform(0.0, kTwoPi))};
  }
  for (int attempt = 0; attempt < 200; ++attempt) {
    Chain upstream = gen_intersecting_chain(n - 1, rng.next(), false);
    const Circle& last = upstream.circles.back();
    const double phase = rng.uniform(0.0, kTwoPi);
    const Point pivot = last.at(phase);
    const Point other = last.at(phase + rng.uniform(0.6, 1.6) * (rng.chance(0.5) ? 1.0 : -1.0));

    Chain chain = upstream;
    chain.circles.push_back(detail::pencil_circle(pivot, other, kPi));
    chain.pivots.push_back(PivotChoice::at(pivot));
    const Tolerance tol(1e-9, 4.0 * R);
    auto defect = [&](double sweep) {
      chain.circles.back() = detail::pencil_circle(pivot, other, sweep);
      try {
        const Chain doubled = doubled_chain(chain, ReturnPivots::companion, tol);
        return 0.5 * detail::total_transfer(doubled, tol);
      } catch (const GeometryError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    const auto sweep = detail::solve_pencil(defect, 0.05, kTwoPi - 0.05, kPi);
    if (!sweep) continue;
    chain.circles.back() = detail::pencil_circle(pivot, other, *sweep);
    if (!detail::circles_reasonable(chain.circles, 10.0 * R)) continue;
    const Tolerance scene_tol = scene_tolerance(chain);
    const std::size_t m = chain.circles.size();
    if (!detail::genuinely_intersecting(chain.circles[m - 2], chain.circles[m - 1], scene_tol, 0.02 * R)) continue;
    if (!is_closing(doubled_chain(chain, ReturnPivots::companion, scene_tol), scene_tol)) continue;
    chain = detail::labeled(std::move(chain));
    return {chain, chain.circles.front().at(rng.uniform(0.0, kTwoPi))};
  }
  throw SceneError("gen_open_polygon: no pencil member closes after bounded retries");
}

// A point well away from every circle of the chain.
inline Point random_anchor(const Chain& chain, std::uint64_t seed) {
  SceneRng rng(seed);
  const double scale = scene_scale(chain.circles);
  for (int attempt = 0; attempt < detail::kMaxAttempts; ++attempt) {
    const Point p{rng.uniform(-0.5, 0.5) * scale, rng.uniform(-0.5, 0.5) * scale};
    const bool clear = std::all_of(chain.circles.begin(), chain.circles.end(),
                                   [&](const Circle& c) { return std::abs(c.offset(p)) >= 0.05 * scale; });
    if (clear) return p;
  }
  throw SceneError("random_anchor: no admissible point");
}

struct SceneSpec {
  SceneKind kind = SceneKind::polygon;
  int n = 3;
  std::uint64_t seed = 0;
  int p = 1;  // rational: transfer sum 2 pi p / q
  int q = 3;
  bool with_anchor = false;  // common_point: add a concyclic anchor
};

struct GeneratedScene {
  Chain chain;
  std::optional<Point> start;
  std::optional<Point> anchor;
  std::optional<LineArrangement> lines;
};

inline void validate_spec(const SceneSpec& spec) {
  const auto need = [&](bool ok, const char* rule) {
    if (!ok) throw SceneError(std::string(kind_name(spec.kind)) + ": " + rule);
  };
  switch (spec.kind) {
    case SceneKind::polygon:
    case SceneKind::common_point:
    case SceneKind::touching: need(spec.n >= 3, "n must be at least 3"); break;
    case SceneKind::quadrilateral: need(spec.n == 4, "n must be 4"); break;
    case SceneKind::n_lines: need(spec.n >= 4, "n must be at least 4"); break;
    case SceneKind::rational:
      need(spec.n >= 3, "n must be at least 3");
      need(spec.q >= 1 && std::gcd(spec.p, spec.q) == 1, "need q >= 1 and gcd(p, q) = 1");
      break;
    case SceneKind::open_polygon: need(spec.n >= 2, "n must be at least 2"); break;
  }
}

inline GeneratedScene generate(const SceneSpec& spec) {
  validate_spec(spec);
  GeneratedScene out;
  switch (spec.kind) {
    case SceneKind::polygon: {
      auto s = gen_polygon_chain(spec.n, spec.seed);
      out.chain = std::move(s.chain);
      out.start = s.witness;
      break;
    }
    case SceneKind::common_point:
      out.chain = gen_common_point(spec.n, spec.seed);
      if (spec.with_anchor) out.anchor = random_anchor(out.chain, spec.seed ^ 0x9e3779b97f4a7c15ULL);
      break;
    case SceneKind::touching: out.chain = gen_touching_chain(spec.n, spec.seed); break;
    case SceneKind::quadrilateral:
    case SceneKind::n_lines: {
      auto s = gen_line_arrangement(spec.n, spec.seed);
      out.chain = std::move(s.chain);
      out.lines = std::move(s.arrangement);
      break;
    }
    case SceneKind::rational: out.chain = gen_rational_chain(spec.n, spec.p, spec.q, spec.seed); break;
    case SceneKind::open_polygon: {
      auto s = gen_open_polygon(spec.n, spec.seed);
      out.chain = std::move(s.chain);
      out.start = s.witness;
      break;
    }
  }
  return out;
}

}  // namespace circlechain
