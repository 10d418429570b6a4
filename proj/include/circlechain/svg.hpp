#pragma once

// Deterministic SVG figures: black chain circles, red polygon, blue derived
// circles and points, white pivot dots. y points up in scene coordinates and
// is flipped on output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "circlechain/chain.hpp"
#include "circlechain/scene_io.hpp"

namespace circlechain {

struct StyleOptions {
  double width_px = 800.0;
  double margin = 0.05;  // fraction of the larger extent
  double circle_stroke = 0.004;  // stroke widths as fractions of the extent
  double polygon_stroke = 0.004;
  double dot_radius = 0.008;
  bool show_pivots = true;
  bool show_start = true;
};

struct Overlay {
  std::vector<Circle> circles;  // derived circles, drawn blue
  std::vector<Point> points;    // derived points, drawn blue
};

namespace detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) return "0.000000";
  return s;
}

struct Box {
  double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
  void add(Point p, double pad = 0.0) {
    lo_x = std::min(lo_x, p.x - pad), hi_x = std::max(hi_x, p.x + pad);
    lo_y = std::min(lo_y, p.y - pad), hi_y = std::max(hi_y, p.y + pad);
  }
  bool empty() const { return !(lo_x <= hi_x); }
};

}  // namespace detail

inline std::string render_svg(const SceneDocument& doc, const std::optional<Trace>& trace = std::nullopt,
                              const Overlay& overlay = {}, const StyleOptions& style = {}) {
  using detail::num;
  std::vector<Circle> circles;
  for (const CircleRecord& c : doc.circles) circles.push_back(Circle({c.cx, c.cy}, c.r));
  std::vector<Point> pivots;
  if (style.show_pivots && !doc.chain.order.empty()) {
    const Chain chain = to_chain(doc);
    pivots = resolve_pivots(chain, scene_tolerance(chain));
  }

  detail::Box box;
  for (const Circle& c : circles) box.add(c.center, c.radius);
  for (const Circle& c : overlay.circles) box.add(c.center, c.radius);
  for (Point p : overlay.points) box.add(p);
  if (trace)
    for (Point p : trace->vertices) box.add(p);
  if (doc.anchor_i) box.add(*doc.anchor_i);
  if (box.empty()) box = {-1.0, -1.0, 1.0, 1.0};

  const double extent = std::max({box.hi_x - box.lo_x, box.hi_y - box.lo_y, 1e-12});
  const double pad = style.margin * extent;
  const double vx = box.lo_x - pad, vy = -box.hi_y - pad;
  const double vw = box.hi_x - box.lo_x + 2.0 * pad, vh = box.hi_y - box.lo_y + 2.0 * pad;
  const double height_px = style.width_px * vh / vw;
  const double cs = style.circle_stroke * extent, ps = style.polygon_stroke * extent, dot = style.dot_radius * extent;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(style.width_px) + "\" height=\"" +
         num(height_px) + "\" viewBox=\"" + num(vx) + " " + num(vy) + " " + num(vw) + " " + num(vh) + "\">\n";
  out += "<rect x=\"" + num(vx) + "\" y=\"" + num(vy) + "\" width=\"" + num(vw) + "\" height=\"" + num(vh) +
         "\" fill=\"white\"/>\n";

  const auto circle = [&](const Circle& c, const char* color, double stroke) {
    out += "<circle cx=\"" + num(c.center.x) + "\" cy=\"" + num(-c.center.y) + "\" r=\"" + num(c.radius) +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(stroke) + "\"/>\n";
  };
  const auto dot_at = [&](Point p, const char* fill, const char* stroke) {
    out += "<circle cx=\"" + num(p.x) + "\" cy=\"" + num(-p.y) + "\" r=\"" + num(dot) + "\" fill=\"" + fill +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(0.5 * cs) + "\"/>\n";
  };

  out += "<g id=\"chain\">\n";
  for (const Circle& c : circles) circle(c, "black", cs);
  out += "</g>\n<g id=\"derived\">\n";
  for (const Circle& c : overlay.circles) circle(c, "blue", 0.75 * cs);
  out += "</g>\n";

  if (trace && trace->vertices.size() >= 2) {
    const auto& v = trace->vertices;
    const bool closes = distance(v.front(), v.back()) <= 1e-9 * extent;
    const std::size_t count = closes ? v.size() - 1 : v.size();
    std::string pts;
    for (std::size_t i = 0; i < count; ++i) pts += (i ? " " : "") + num(v[i].x) + "," + num(-v[i].y);
    out += std::string("<") + (closes ? "polygon" : "polyline") + " id=\"polygon\" points=\"" + pts +
           "\" fill=\"none\" stroke=\"red\" stroke-width=\"" + num(ps) + "\" stroke-linejoin=\"round\"/>\n";
  }

  out += "<g id=\"points\">\n";
  for (Point p : overlay.points) dot_at(p, "blue", "blue");
  if (doc.anchor_i) dot_at(*doc.anchor_i, "blue", "black");
  if (style.show_start && doc.start) dot_at({doc.start->x, doc.start->y}, "red", "red");
  for (Point p : pivots) dot_at(p, "white", "black");
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace circlechain
