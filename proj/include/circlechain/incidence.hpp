#pragma once

// Incidences of the polygons traced by a chain: meets of side lines, the
// fixed circles those meets run on, their concurrency points, and the
// special reports for touching chains and complete quadrilaterals.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circlechain/chain.hpp"
#include "circlechain/geom.hpp"

namespace circlechain {

// Side lines are numbered from 1, as l_1 .. l_m of the trace.
using PairKey = std::pair<int, int>;
using TripleKey = std::array<int, 3>;

struct SideLineMeets {
  std::map<PairKey, Point> points;
  std::vector<PairKey> parallel;  // pairs without a finite meet
};

inline SideLineMeets side_line_intersections(const Trace& trace, const Tolerance& tol) {
  SideLineMeets out;
  const int m = static_cast<int>(trace.side_lines.size());
  for (int j = 1; j <= m; ++j) {
    for (int k = j + 1; k <= m; ++k) {
      try {
        out.points.emplace(PairKey{j, k}, intersect_lines(trace.side_lines[j - 1], trace.side_lines[k - 1], tol));
      } catch (const GeometryError&) {
        out.parallel.push_back({j, k});
      }
    }
  }
  return out;
}

// Smallest |sin| of the angle between any two side lines of a trace. The
// angles between side lines do not depend on the starting point.
inline double side_line_separation(const Trace& trace) {
  double worst = 1.0;
  for (std::size_t j = 0; j < trace.side_lines.size(); ++j)
    for (std::size_t k = j + 1; k < trace.side_lines.size(); ++k)
      worst = std::min(worst, std::abs(cross(trace.side_lines[j].direction, trace.side_lines[k].direction)));
  return worst;
}

struct Concurrency {
  Point point;
  double spread = 0.0;
  bool coincident_circles = false;  // two of the three circles are the same circle
};

struct LighthouseReport {
  std::map<PairKey, std::vector<Point>> sampled_x;
  std::map<PairKey, Circle> fitted;
  std::map<PairKey, double> residuals;
  std::map<PairKey, double> pivot_defects;  // distance of A_j, A_k from C_jk
  std::map<PairKey, std::array<int, 2>> side_counts;  // samples left / right of A_j A_k
  std::map<TripleKey, Concurrency> concurrency;
  std::vector<PairKey> omitted;
  std::vector<Point> pivots;
  int starts_used = 0;

  double worst_residual() const {
    double w = 0.0;
    for (const auto& [key, r] : residuals) w = std::max(w, r);
    for (const auto& [key, r] : pivot_defects) w = std::max(w, r);
    return w;
  }
  double worst_spread() const {
    double w = 0.0;
    for (const auto& [key, c] : concurrency) w = std::max(w, c.spread);
    return w;
  }
};

namespace detail {

inline bool same_circle(const Circle& a, const Circle& b, const Tolerance& tol) {
  return distance(a.center, b.center) <= tol.abs() && std::abs(a.radius - b.radius) <= tol.abs();
}

inline LighthouseReport sweep_once(const Chain& chain, const std::vector<Point>& pivots, int starts,
                                   const Tolerance& tol, std::uint64_t seed) {
  LighthouseReport report;
  report.pivots = pivots;
  report.starts_used = starts;
  const int m = static_cast<int>(pivots.size());

  for (double angle : starting_angles(static_cast<std::size_t>(starts), seed)) {
    Trace trace;
    try {
      trace = iterate(chain, chain.circles.front().at(angle), 1, std::nullopt, tol);
    } catch (const ChainError& e) {
      throw GeometryError(std::string("lighthouse_sweep: start at angle ") + std::to_string(angle) + ": " + e.what());
    }
    const SideLineMeets meets = side_line_intersections(trace, tol);
    for (const auto& [key, x] : meets.points) {
      const Point aj = pivots[key.first - 1];
      const Point ak = pivots[key.second - 1];
      if (distance(x, aj) <= tol.abs() || distance(x, ak) <= tol.abs()) continue;
      report.sampled_x[key].push_back(x);
      if (distance(aj, ak) > tol.abs()) {
        auto& counts = report.side_counts[key];
        ++counts[cross(ak - aj, x - aj) > 0.0 ? 0 : 1];
      }
    }
  }

  for (int j = 1; j <= m; ++j) {
    for (int k = j + 1; k <= m; ++k) {
      const PairKey key{j, k};
      auto it = report.sampled_x.find(key);
      if (it == report.sampled_x.end() || it->second.size() < 2 || distance(pivots[j - 1], pivots[k - 1]) <= tol.abs()) {
        report.omitted.push_back(key);
        continue;
      }
      std::vector<Point> pts = it->second;
      pts.push_back(pivots[j - 1]);
      pts.push_back(pivots[k - 1]);
      try {
        const CircleFit fit = fit_circle(pts, tol);
        report.fitted.emplace(key, fit.circle);
        report.residuals.emplace(key, fit.residual);
        report.pivot_defects.emplace(key, std::max(std::abs(fit.circle.offset(pivots[j - 1])),
                                                   std::abs(fit.circle.offset(pivots[k - 1]))));
      } catch (const GeometryError&) {
        report.omitted.push_back(key);
      }
    }
  }

  // P_ijk from C_ij and C_jk through A_j, checked against the other two pairings.
  for (int i = 1; i <= m; ++i) {
    for (int j = i + 1; j <= m; ++j) {
      for (int k = j + 1; k <= m; ++k) {
        const auto cij = report.fitted.find({i, j});
        const auto cjk = report.fitted.find({j, k});
        const auto cik = report.fitted.find({i, k});
        if (cij == report.fitted.end() || cjk == report.fitted.end() || cik == report.fitted.end()) continue;
        Concurrency c;
        if (same_circle(cij->second, cjk->second, tol) || same_circle(cjk->second, cik->second, tol) ||
            same_circle(cik->second, cij->second, tol)) {
          c.point = pivots[j - 1];
          c.coincident_circles = true;
        } else {
          const Point p1 = other_common_point(cij->second, cjk->second, pivots[j - 1]);
          const Point p2 = other_common_point(cjk->second, cik->second, pivots[k - 1]);
          const Point p3 = other_common_point(cik->second, cij->second, pivots[i - 1]);
          c.point = p1;
          c.spread = std::max({distance(p1, p2), distance(p2, p3), distance(p3, p1)});
        }
        report.concurrency.emplace(TripleKey{i, j, k}, c);
      }
    }
  }
  return report;
}

}  // namespace detail

inline LighthouseReport lighthouse_sweep(const Chain& chain, int starts, const Tolerance& tol, std::uint64_t seed = 0) {
  if (starts < 5) throw GeometryError("lighthouse_sweep: need at least five starts");
  if (!is_closing(chain, tol)) throw GeometryError("lighthouse_sweep: chain does not close");
  const std::vector<Point> pivots = resolve_pivots(chain, tol);

  // Widen the start set until every fitted pair has samples on both sides
  // of its chord.
  LighthouseReport report;
  for (int attempt = 0, count = starts; attempt < 5; ++attempt, count *= 2) {
    report = detail::sweep_once(chain, pivots, count, tol, seed);
    bool covered = true;
    for (const auto& [key, circle] : report.fitted) {
      const auto sc = report.side_counts.find(key);
      if (sc != report.side_counts.end() && (sc->second[0] == 0 || sc->second[1] == 0)) covered = false;
    }
    if (covered) break;
  }
  return report;
}

struct TouchingReport {
  int n = 0;
  Circle base_circle;
  std::vector<Point> contacts;
  // three circles
  Point x135, x246;
  std::array<double, 3> orthogonality_defects{};
  double midpoint_defect = 0.0;
  double coincidence_defect = 0.0;  // spread of X13, X35, X51 and of X24, X46, X62
  double pivot_defect = 0.0;        // distance of X_{i,i+3} from A_i
  // four circles
  Point x13, x24;
  double concyclicity_defect = 0.0;
  // n = 3: x135, x246 on the base circle; n = 4: x13, x24
  std::array<double, 2> membership_defects{};
  int starts = 0;

  double worst_length_defect() const {
    return std::max({midpoint_defect, coincidence_defect, pivot_defect, concyclicity_defect, membership_defects[0],
                     membership_defects[1]});
  }
  double worst_orthogonality() const {
    return std::max({orthogonality_defects[0], orthogonality_defects[1], orthogonality_defects[2]});
  }
};

namespace detail {

inline std::vector<Point> require_touching(const Chain& chain, std::size_t n, const Tolerance& tol, const char* who) {
  if (!chain.closed || chain.circles.size() != n)
    throw GeometryError(std::string(who) + ": expected a closed chain of " + std::to_string(n) + " circles");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::holds_alternative<Tangent>(intersect_circles(chain.joint_from(j), chain.joint_to(j), tol)))
      throw ChainError(std::string(who) + ": joint is not tangent", j);
  }
  return resolve_pivots(chain, tol);
}

inline Point meet(const Trace& t, int j, int k, const Tolerance& tol) {
  return intersect_lines(t.side_lines[j - 1], t.side_lines[k - 1], tol);
}

}  // namespace detail

inline TouchingReport three_touching_report(const Chain& chain, int starts, const Tolerance& tol, std::uint64_t seed = 0) {
  const std::vector<Point> contacts = detail::require_touching(chain, 3, tol, "three_touching_report");
  TouchingReport report;
  report.n = 3;
  report.contacts = contacts;
  report.base_circle = circumcircle(contacts[0], contacts[1], contacts[2], tol);
  const Circle& base = report.base_circle;

  bool first = true;
  for (double angle : starting_angles(static_cast<std::size_t>(starts), seed)) {
    const Trace t = iterate(chain, chain.circles.front().at(angle), 2, std::nullopt, tol);
    Point odd[3], even[3];
    try {
      odd[0] = detail::meet(t, 1, 3, tol);
      odd[1] = detail::meet(t, 3, 5, tol);
      odd[2] = detail::meet(t, 5, 1, tol);
      even[0] = detail::meet(t, 2, 4, tol);
      even[1] = detail::meet(t, 4, 6, tol);
      even[2] = detail::meet(t, 6, 2, tol);
    } catch (const GeometryError&) {
      continue;  // measure-zero parallel position
    }
    ++report.starts;
    if (first) {
      report.x135 = odd[0];
      report.x246 = even[0];
      first = false;
    }
    auto spread = [](const Point (&p)[3]) {
      return std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
    };
    report.coincidence_defect = std::max({report.coincidence_defect, spread(odd), spread(even)});
    report.membership_defects[0] = std::max(report.membership_defects[0], std::abs(base.offset(odd[0])));
    report.membership_defects[1] = std::max(report.membership_defects[1], std::abs(base.offset(even[0])));
    report.midpoint_defect = std::max(report.midpoint_defect, distance(0.5 * (odd[0] + even[0]), base.center));
    for (int i = 1; i <= 3; ++i) {
      const double d = std::abs(dot(t.side_lines[i - 1].direction, t.side_lines[i + 2].direction));
      report.orthogonality_defects[i - 1] = std::max(report.orthogonality_defects[i - 1], d);
      try {
        report.pivot_defect = std::max(report.pivot_defect, distance(detail::meet(t, i, i + 3, tol), contacts[i - 1]));
      } catch (const GeometryError&) {
      }
    }
  }
  return report;
}

inline TouchingReport four_touching_report(const Chain& chain, int starts, const Tolerance& tol, std::uint64_t seed = 0) {
  const std::vector<Point> contacts = detail::require_touching(chain, 4, tol, "four_touching_report");
  TouchingReport report;
  report.n = 4;
  report.contacts = contacts;
  report.base_circle = circumcircle(contacts[0], contacts[1], contacts[2], tol);
  report.concyclicity_defect = std::abs(report.base_circle.offset(contacts[3]));
  if (report.concyclicity_defect > tol.abs())
    throw GeometryError("four_touching_report: contact points are not concyclic");
  if (!is_closing(chain, tol)) throw GeometryError("four_touching_report: chain does not close in one round");

  bool first = true;
  for (double angle : starting_angles(static_cast<std::size_t>(starts), seed)) {
    const Trace t = iterate(chain, chain.circles.front().at(angle), 1, std::nullopt, tol);
    Point x13, x24;
    try {
      x13 = detail::meet(t, 1, 3, tol);
      x24 = detail::meet(t, 2, 4, tol);
    } catch (const GeometryError&) {
      continue;
    }
    ++report.starts;
    if (first) {
      report.x13 = x13;
      report.x24 = x24;
      first = false;
    }
    report.membership_defects[0] = std::max(report.membership_defects[0], std::abs(report.base_circle.offset(x13)));
    report.membership_defects[1] = std::max(report.membership_defects[1], std::abs(report.base_circle.offset(x24)));
  }
  return report;
}

struct SteinerReport {
  std::array<Line, 4> lines;
  std::array<Point, 4> pivots;   // A_i = l_i meet l_(i+1)
  std::array<Circle, 4> circles; // C_i through the triangle of l_(i-1), l_i, l_(i+1)
  std::array<Point, 5> polygon;  // X_1 .. X_5
  Point steiner_point, p_point, q_point;
  Circle circle_c13, circle_c24, circle_c;
  std::optional<Circle> circle_d;
  double steiner_defect = 0.0;       // spread of S candidates and distance to all four circles
  double closure_defect = 0.0;       // |X_5 - X_1|
  double x13_defect = 0.0, x24_defect = 0.0, x_defect = 0.0, d_defect = 0.0;
  std::array<double, 2> collinearity_defects{};  // (X1, X3, P) and (X2, X4, Q)
  std::vector<std::string> degenerate;            // checks that hold vacuously at this start

  double worst() const {
    return std::max({steiner_defect, closure_defect, x13_defect, x24_defect, x_defect, d_defect,
                     collinearity_defects[0], collinearity_defects[1]});
  }
};

inline Chain quadrilateral_chain(const std::array<Line, 4>& lines, const Tolerance& tol) {
  auto meet = [&](int i, int j) {
    try {
      return intersect_lines(lines[i], lines[j], tol);
    } catch (const GeometryError&) {
      throw GeometryError("steiner: lines " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " are parallel");
    }
  };
  std::array<Point, 4> a;
  for (int i = 0; i < 4; ++i) a[i] = meet(i, (i + 1) % 4);
  const Point p = meet(1, 3);
  const Point q = meet(0, 2);
  Chain chain;
  for (int i = 0; i < 4; ++i) {
    const Point opposite = (i % 2 == 0) ? p : q;
    try {
      chain.circles.push_back(circumcircle(a[(i + 3) % 4], a[i], opposite, tol));
    } catch (const GeometryError&) {
      throw GeometryError("steiner: lines " + std::to_string((i + 3) % 4 + 1) + ", " + std::to_string(i + 1) + ", " +
                          std::to_string((i + 1) % 4 + 1) + " are concurrent");
    }
    chain.pivots.push_back(PivotChoice::at(a[i]));
  }
  return chain;
}

inline SteinerReport steiner_report(const std::array<Line, 4>& lines, Point start, const Tolerance& tol) {
  SteinerReport r;
  r.lines = lines;
  const Chain chain = quadrilateral_chain(lines, tol);
  for (int i = 0; i < 4; ++i) {
    r.circles[i] = chain.circles[i];
    r.pivots[i] = chain.pivots[i].point;
  }
  r.p_point = intersect_lines(lines[1], lines[3], tol);
  r.q_point = intersect_lines(lines[0], lines[2], tol);
  if (!on_circle(r.circles[0], start, tol)) throw GeometryError("steiner: start is not on C_1");

  std::array<Point, 4> s;
  for (int i = 0; i < 4; ++i) s[i] = other_common_point(r.circles[i], r.circles[(i + 1) % 4], r.pivots[i]);
  r.steiner_point = s[0];
  for (int i = 0; i < 4; ++i) {
    r.steiner_defect = std::max(r.steiner_defect, distance(s[i], s[0]));
    r.steiner_defect = std::max(r.steiner_defect, std::abs(r.circles[i].offset(s[0])));
  }
  const Point S = r.steiner_point;

  const Trace t = iterate(chain, start, 1, std::nullopt, tol);
  for (int i = 0; i < 5; ++i) r.polygon[i] = t.vertices[i];
  const auto& X = r.polygon;
  r.closure_defect = distance(X[4], X[0]);

  const double eps = tol.abs();
  auto circle_or_degenerate = [&](Point a, Point b, Point c, const char* name) -> std::optional<Circle> {
    try {
      return circumcircle(a, b, c, tol);
    } catch (const GeometryError&) {
      r.degenerate.emplace_back(name);
      return std::nullopt;
    }
  };
  auto line_or_degenerate = [&](Point a, Point b, const char* name) -> std::optional<Line> {
    if (distance(a, b) <= eps) {
      r.degenerate.emplace_back(name);
      return std::nullopt;
    }
    return Line::through(a, b);
  };

  if (auto c = circle_or_degenerate(r.pivots[0], r.pivots[2], S, "C13")) {
    r.circle_c13 = *c;
    try {
      r.x13_defect = std::abs(c->offset(intersect_lines(t.side_lines[0], t.side_lines[2], tol)));
    } catch (const GeometryError&) {
      r.degenerate.emplace_back("X13");
    }
  }
  if (auto c = circle_or_degenerate(r.pivots[1], r.pivots[3], S, "C24")) {
    r.circle_c24 = *c;
    try {
      r.x24_defect = std::abs(c->offset(intersect_lines(t.side_lines[1], t.side_lines[3], tol)));
    } catch (const GeometryError&) {
      r.degenerate.emplace_back("X24");
    }
  }

  const auto diag13 = line_or_degenerate(X[0], X[2], "X1X3");
  const auto diag24 = line_or_degenerate(X[1], X[3], "X2X4");
  if (diag13) r.collinearity_defects[0] = std::abs(diag13->offset(r.p_point));
  if (diag24) r.collinearity_defects[1] = std::abs(diag24->offset(r.q_point));
  if (auto c = circle_or_degenerate(r.p_point, r.q_point, S, "C")) {
    r.circle_c = *c;
    if (diag13 && diag24) {
      try {
        r.x_defect = std::abs(c->offset(intersect_lines(*diag13, *diag24, tol)));
      } catch (const GeometryError&) {
        r.degenerate.emplace_back("X");
      }
    }
  }
  if ((r.circle_d = circle_or_degenerate(X[0], X[1], X[2], "D"))) {
    r.d_defect = std::max(std::abs(r.circle_d->offset(X[3])), std::abs(r.circle_d->offset(S)));
  }
  return r;
}

struct TangencyProbe {
  bool is_tangent = false;
  double defect = 0.0;
};

inline TangencyProbe tangency_probe(const Circle& c1, const Circle& c2, const Tolerance& tol) {
  const double d = distance(c1.center, c2.center);
  const double defect = std::min(std::abs(d - (c1.radius + c2.radius)), std::abs(d - std::abs(c1.radius - c2.radius)));
  return {defect <= tol.abs(), defect};
}

}  // namespace circlechain
