#pragma once

// Fractional-linear maps z -> (a z + b) / (c z + d) acting on points,
// circles and whole chains.

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "circlechain/chain.hpp"
#include "circlechain/geom.hpp"

namespace circlechain {

using Complex = std::complex<double>;

inline Complex to_complex(Point p) { return {p.x, p.y}; }
inline Point to_point(Complex z) { return {z.real(), z.imag()}; }

struct MobiusMap {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  MobiusMap() = default;
  MobiusMap(Complex a_, Complex b_, Complex c_, Complex d_) : a(a_), b(b_), c(c_), d(d_) {
    if (!(std::abs(determinant()) > 0.0)) throw GeometryError("mobius: degenerate coefficients");
  }

  static MobiusMap identity() { return {}; }
  // z -> 1 / (z - center): sends `center` to infinity.
  static MobiusMap reciprocal_about(Point center) { return {0.0, 1.0, 1.0, -to_complex(center)}; }

  Complex determinant() const { return a * d - b * c; }
  // Preimage of infinity, if finite.
  std::optional<Point> pole() const {
    if (c == Complex(0.0)) return std::nullopt;
    return to_point(-d / c);
  }
  MobiusMap inverse() const { return {d, -b, -c, a}; }
};

// m2 after m1.
inline MobiusMap compose(const MobiusMap& m2, const MobiusMap& m1) {
  return {m2.a * m1.a + m2.b * m1.c, m2.a * m1.b + m2.b * m1.d, m2.c * m1.a + m2.d * m1.c,
          m2.c * m1.b + m2.d * m1.d};
}

inline Point apply_point(const MobiusMap& m, Point p, const Tolerance& tol = {}) {
  const Complex z = to_complex(p);
  const Complex den = m.c * z + m.d;
  const double scale = std::abs(m.c) * std::abs(z) + std::abs(m.d);
  if (std::abs(den) <= tol.rel * scale) throw GeometryError("mobius: point is the pole of the map");
  return to_point((m.a * z + m.b) / den);
}

// alpha (x^2 + y^2) + beta x + gamma y + delta = 0, scaled so the largest
// coefficient magnitude is 1. alpha = 0 is a line.
struct GeneralizedCircle {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
  bool line = false;

  static GeneralizedCircle from_circle(const Circle& c) {
    GeneralizedCircle g{1.0, -2.0 * c.center.x, -2.0 * c.center.y, dot(c.center, c.center) - c.radius * c.radius};
    g.normalize();
    return g;
  }
  // Line through p and q.
  static GeneralizedCircle from_line(Point p, Point q) {
    const Vec2 n = perp(unit(q - p));
    GeneralizedCircle g{0.0, n.x, n.y, -dot(n, p), true};
    g.normalize();
    return g;
  }

  void normalize() {
    const double m = std::max({std::abs(alpha), std::abs(beta), std::abs(gamma), std::abs(delta)});
    alpha /= m, beta /= m, gamma /= m, delta /= m;
  }
  double discriminant() const { return beta * beta + gamma * gamma - 4.0 * alpha * delta; }

  std::optional<Circle> as_circle() const {
    if (line || alpha == 0.0) return std::nullopt;
    const Point center{-beta / (2.0 * alpha), -gamma / (2.0 * alpha)};
    return Circle(center, std::sqrt(discriminant()) / (2.0 * std::abs(alpha)));
  }
  // Value of the defining polynomial, normalized to a distance-like quantity.
  double evaluate(Point p) const { return alpha * dot(p, p) + beta * p.x + gamma * p.y + delta; }
};

inline bool pole_on_circle(const MobiusMap& m, const Circle& c, const Tolerance& tol) {
  const auto pole = m.pole();
  return pole && on_circle(c, *pole, tol);
}

inline GeneralizedCircle apply_circle(const MobiusMap& m, const Circle& c, const Tolerance& tol) {
  if (pole_on_circle(m, c, tol)) {
    const Vec2 toward = *m.pole() - c.center;
    const double phase = std::atan2(toward.y, toward.x);
    const Point p = apply_point(m, c.at(phase + kPi / 2), tol);
    const Point q = apply_point(m, c.at(phase - kPi / 2), tol);
    return GeneralizedCircle::from_line(p, q);
  }
  const Point p = apply_point(m, c.at(0.0), tol);
  const Point q = apply_point(m, c.at(kTwoPi / 3), tol);
  const Point r = apply_point(m, c.at(2.0 * kTwoPi / 3), tol);
  return GeneralizedCircle::from_circle(circumcircle(p, q, r, tol));
}

// Image chain; pivots become explicit image points since the left/right
// labeling is not preserved.
inline Chain apply_scene(const MobiusMap& m, const Chain& chain, const Tolerance& tol) {
  std::string bad;
  for (std::size_t i = 0; i < chain.circles.size(); ++i) {
    if (pole_on_circle(m, chain.circles[i], tol)) bad += (bad.empty() ? "" : ", ") + std::to_string(i);
  }
  if (!bad.empty()) throw GeometryError("mobius: circles map to lines: " + bad);

  const std::vector<Point> pivots = resolve_pivots(chain, tol);
  Chain out;
  out.closed = chain.closed;
  for (const Circle& c : chain.circles) out.circles.push_back(*apply_circle(m, c, tol).as_circle());
  for (Point p : pivots) out.pivots.push_back(PivotChoice::at(apply_point(m, p, tol)));
  return out;
}

// Deterministic map whose pole sits between two and four scene scales from
// `center`, so every circle of a scene of that scale maps to a circle.
inline MobiusMap random_mobius(std::uint64_t seed, double scale, Point center = {}) {
  std::mt19937_64 engine(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  const double pole_angle = uniform(0.0, kTwoPi);
  const Complex pole = to_complex(center) + std::polar(uniform(2.0, 4.0) * scale, pole_angle);
  const Complex gain = std::polar(uniform(4.0, 12.0) * scale * scale, uniform(0.0, kTwoPi));
  const Complex shift = to_complex(center) + std::polar(uniform(0.0, 1.0) * scale, uniform(0.0, kTwoPi));
  // z -> shift + gain / (z - pole)
  return {shift, gain - shift * pole, 1.0, -pole};
}

}  // namespace circlechain
