#pragma once

// JSON scene and report documents. Writing is canonical: sorted keys,
// shortest round-trip floats, two-space indent and a trailing newline.

#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "circlechain/chain.hpp"
#include "circlechain/geom.hpp"
#include "circlechain/scenes.hpp"

namespace circlechain {

using Json = nlohmann::json;

inline constexpr const char* kSceneVersion = "1";

class SceneFormatError : public std::runtime_error {
 public:
  SceneFormatError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct CircleRecord {
  std::string id;
  double cx = 0.0, cy = 0.0, r = 1.0;
  bool operator==(const CircleRecord&) const = default;
};

// "A", "B", or an explicit point.
struct PivotRecord {
  enum class Kind { a, b, point } kind = Kind::a;
  double x = 0.0, y = 0.0;
  bool operator==(const PivotRecord&) const = default;
};

struct ChainRecord {
  std::vector<std::string> order;
  bool closed = true;
  std::vector<PivotRecord> pivots;
  bool operator==(const ChainRecord&) const = default;
};

struct StartRecord {
  std::string circle;
  double x = 0.0, y = 0.0;
  bool operator==(const StartRecord&) const = default;
};

struct SceneDocument {
  std::string version = kSceneVersion;
  std::vector<CircleRecord> circles;
  ChainRecord chain;
  std::optional<StartRecord> start;
  std::optional<Point> anchor_i;
  Json meta = Json::object();
  bool operator==(const SceneDocument&) const = default;
};

namespace detail {

inline std::string child(const std::string& path, std::string_view key) { return path + "." + std::string(key); }
inline std::string child(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

inline const Json& field(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SceneFormatError(path, std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw SceneFormatError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SceneFormatError(path, "number is not finite");
  return d;
}

inline std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) throw SceneFormatError(path, "expected a string");
  return v.get<std::string>();
}

inline const Json& object(const Json& v, const std::string& path) {
  if (!v.is_object()) throw SceneFormatError(path, "expected an object");
  return v;
}

inline const Json& array(const Json& v, const std::string& path) {
  if (!v.is_array()) throw SceneFormatError(path, "expected an array");
  return v;
}

inline void only_fields(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw SceneFormatError(child(path, key), "unknown field");
  }
}

inline Point point_field(const Json& v, const std::string& path) {
  object(v, path);
  only_fields(v, path, {"x", "y"});
  return {number(field(v, path, "x"), child(path, "x")), number(field(v, path, "y"), child(path, "y"))};
}

inline Json point_json(Point p) { return Json{{"x", p.x}, {"y", p.y}}; }

}  // namespace detail

inline std::size_t circle_index(const SceneDocument& doc, std::string_view id) {
  for (std::size_t i = 0; i < doc.circles.size(); ++i)
    if (doc.circles[i].id == id) return i;
  throw SceneFormatError("$.circles", "no circle with id '" + std::string(id) + "'");
}

inline Chain to_chain(const SceneDocument& doc) {
  Chain chain;
  chain.closed = doc.chain.closed;
  for (const std::string& id : doc.chain.order) {
    const CircleRecord& c = doc.circles[circle_index(doc, id)];
    chain.circles.push_back(Circle({c.cx, c.cy}, c.r));
  }
  for (const PivotRecord& p : doc.chain.pivots) {
    switch (p.kind) {
      case PivotRecord::Kind::a: chain.pivots.push_back(PivotChoice::A()); break;
      case PivotRecord::Kind::b: chain.pivots.push_back(PivotChoice::B()); break;
      case PivotRecord::Kind::point: chain.pivots.push_back(PivotChoice::at({p.x, p.y})); break;
    }
  }
  return chain;
}

// Structural and geometric checks; `rel` scales with the scene.
inline void validate_scene(const SceneDocument& doc, double rel = 1e-9) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.circles.size(); ++i) {
    const CircleRecord& c = doc.circles[i];
    const std::string path = detail::child("$.circles", i);
    if (c.id.empty()) throw SceneFormatError(detail::child(path, "id"), "id must not be empty");
    if (!ids.insert(c.id).second) throw SceneFormatError(detail::child(path, "id"), "duplicate circle id '" + c.id + "'");
    if (!(c.r > 0.0)) throw SceneFormatError(detail::child(path, "r"), "radius must be positive");
  }
  const std::size_t n = doc.chain.order.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!ids.count(doc.chain.order[i]))
      throw SceneFormatError(detail::child("$.chain.order", i), "unknown circle id '" + doc.chain.order[i] + "'");
  }
  if (doc.circles.empty() && n == 0) return;
  if (n < 2) throw SceneFormatError("$.chain.order", "a chain needs at least two circles");
  const std::size_t want = doc.chain.closed ? n : n - 1;
  if (doc.chain.pivots.size() != want)
    throw SceneFormatError("$.chain.pivots", "pivot count must be " + std::to_string(want) + " for " +
                                                 (doc.chain.closed ? "a closed" : "an open") + " chain of " +
                                                 std::to_string(n) + " circles (n if closed, n-1 if open), got " +
                                                 std::to_string(doc.chain.pivots.size()));

  const Chain chain = to_chain(doc);
  const Tolerance tol = scene_tolerance(chain, rel);
  try {
    validate_chain(chain, tol);
  } catch (const ChainError& e) {
    throw SceneFormatError(detail::child("$.chain.pivots", e.index()), e.what());
  } catch (const GeometryError& e) {
    throw SceneFormatError("$.chain", e.what());
  }
  if (doc.start) {
    if (doc.start->circle != doc.chain.order.front())
      throw SceneFormatError("$.start.circle", "the start must lie on the first circle of the chain");
    const Point p{doc.start->x, doc.start->y};
    if (!on_circle(chain.circles.front(), p, tol))
      throw SceneFormatError("$.start", "start is off its circle by " + std::to_string(std::abs(chain.circles.front().offset(p))) +
                                            " (tolerance " + std::to_string(tol.abs()) + ")");
  }
  if (doc.anchor_i) {
    for (std::size_t i = 0; i < chain.circles.size(); ++i)
      if (on_circle(chain.circles[i], *doc.anchor_i, tol))
        throw SceneFormatError("$.anchor_i", "anchor lies on circle '" + doc.chain.order[i] + "'");
  }
}

inline SceneDocument scene_from_json(const Json& root, double rel = 1e-9) {
  using detail::child;
  detail::object(root, "$");
  SceneDocument doc;
  doc.version = detail::text(detail::field(root, "$", "version"), "$.version");
  if (doc.version != kSceneVersion) throw SceneFormatError("$.version", "unsupported version '" + doc.version + "'");

  const Json& circles = detail::array(detail::field(root, "$", "circles"), "$.circles");
  for (std::size_t i = 0; i < circles.size(); ++i) {
    const std::string path = child("$.circles", i);
    const Json& c = detail::object(circles[i], path);
    detail::only_fields(c, path, {"id", "cx", "cy", "r"});
    doc.circles.push_back({detail::text(detail::field(c, path, "id"), child(path, "id")),
                           detail::number(detail::field(c, path, "cx"), child(path, "cx")),
                           detail::number(detail::field(c, path, "cy"), child(path, "cy")),
                           detail::number(detail::field(c, path, "r"), child(path, "r"))});
  }

  const Json& chain = detail::object(detail::field(root, "$", "chain"), "$.chain");
  detail::only_fields(chain, "$.chain", {"order", "closed", "pivots"});
  const Json& order = detail::array(detail::field(chain, "$.chain", "order"), "$.chain.order");
  for (std::size_t i = 0; i < order.size(); ++i) doc.chain.order.push_back(detail::text(order[i], child("$.chain.order", i)));
  const Json& closed = detail::field(chain, "$.chain", "closed");
  if (!closed.is_boolean()) throw SceneFormatError("$.chain.closed", "expected a boolean");
  doc.chain.closed = closed.get<bool>();
  const Json& pivots = detail::array(detail::field(chain, "$.chain", "pivots"), "$.chain.pivots");
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    const std::string path = child("$.chain.pivots", i);
    detail::object(pivots[i], path);
    detail::only_fields(pivots[i], path, {"choice"});
    const Json& choice = detail::field(pivots[i], path, "choice");
    const std::string cpath = child(path, "choice");
    PivotRecord p;
    if (choice.is_string()) {
      const std::string s = choice.get<std::string>();
      if (s == "A") p.kind = PivotRecord::Kind::a;
      else if (s == "B") p.kind = PivotRecord::Kind::b;
      else throw SceneFormatError(cpath, "choice must be \"A\", \"B\" or {x, y}");
    } else if (choice.is_object()) {
      const Point q = detail::point_field(choice, cpath);
      p = {PivotRecord::Kind::point, q.x, q.y};
    } else {
      throw SceneFormatError(cpath, "choice must be \"A\", \"B\" or {x, y}");
    }
    doc.chain.pivots.push_back(p);
  }

  if (auto it = root.find("start"); it != root.end()) {
    detail::object(*it, "$.start");
    detail::only_fields(*it, "$.start", {"circle", "x", "y"});
    doc.start = StartRecord{detail::text(detail::field(*it, "$.start", "circle"), "$.start.circle"),
                            detail::number(detail::field(*it, "$.start", "x"), "$.start.x"),
                            detail::number(detail::field(*it, "$.start", "y"), "$.start.y")};
  }
  if (auto it = root.find("anchor_i"); it != root.end()) doc.anchor_i = detail::point_field(*it, "$.anchor_i");
  if (auto it = root.find("meta"); it != root.end()) doc.meta = detail::object(*it, "$.meta");

  // Unknown top-level fields move into meta.
  for (const auto& [key, value] : root.items()) {
    static const std::set<std::string> known{"version", "circles", "chain", "start", "anchor_i", "meta"};
    if (known.count(key)) continue;
    if (doc.meta.contains(key)) throw SceneFormatError(child("$", key), "unknown field collides with meta." + key);
    doc.meta[key] = value;
  }

  validate_scene(doc, rel);
  return doc;
}

inline SceneDocument parse_scene(std::string_view bytes, double rel = 1e-9) {
  Json root;
  try {
    root = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw SceneFormatError("$", std::string("invalid JSON: ") + e.what());
  }
  return scene_from_json(root, rel);
}

inline Json scene_to_json(const SceneDocument& doc) {
  Json root = Json::object();
  root["version"] = doc.version;
  Json circles = Json::array();
  for (const CircleRecord& c : doc.circles) circles.push_back({{"id", c.id}, {"cx", c.cx}, {"cy", c.cy}, {"r", c.r}});
  root["circles"] = circles;
  Json pivots = Json::array();
  for (const PivotRecord& p : doc.chain.pivots) {
    switch (p.kind) {
      case PivotRecord::Kind::a: pivots.push_back({{"choice", "A"}}); break;
      case PivotRecord::Kind::b: pivots.push_back({{"choice", "B"}}); break;
      case PivotRecord::Kind::point: pivots.push_back({{"choice", detail::point_json({p.x, p.y})}}); break;
    }
  }
  root["chain"] = {{"order", doc.chain.order}, {"closed", doc.chain.closed}, {"pivots", pivots}};
  if (doc.start) root["start"] = {{"circle", doc.start->circle}, {"x", doc.start->x}, {"y", doc.start->y}};
  if (doc.anchor_i) root["anchor_i"] = detail::point_json(*doc.anchor_i);
  root["meta"] = doc.meta;
  return root;
}

inline std::string canonical_json(const Json& j) { return j.dump(2) + "\n"; }

inline std::string write_scene(const SceneDocument& doc) { return canonical_json(scene_to_json(doc)); }

inline SceneDocument scene_from_chain(const Chain& chain, std::optional<Point> start = std::nullopt,
                                      std::optional<Point> anchor = std::nullopt) {
  SceneDocument doc;
  for (std::size_t i = 0; i < chain.circles.size(); ++i) {
    const Circle& c = chain.circles[i];
    doc.circles.push_back({"C" + std::to_string(i + 1), c.center.x, c.center.y, c.radius});
    doc.chain.order.push_back(doc.circles.back().id);
  }
  doc.chain.closed = chain.closed;
  for (const PivotChoice& p : chain.pivots) {
    switch (p.kind) {
      case PivotChoice::Kind::a: doc.chain.pivots.push_back({PivotRecord::Kind::a}); break;
      case PivotChoice::Kind::b: doc.chain.pivots.push_back({PivotRecord::Kind::b}); break;
      case PivotChoice::Kind::explicit_point:
        doc.chain.pivots.push_back({PivotRecord::Kind::point, p.point.x, p.point.y});
        break;
    }
  }
  if (start) doc.start = StartRecord{doc.chain.order.front(), start->x, start->y};
  doc.anchor_i = anchor;
  return doc;
}

inline SceneDocument scene_document(const GeneratedScene& scene, const SceneSpec& spec) {
  SceneDocument doc = scene_from_chain(scene.chain, scene.start, scene.anchor);
  Json gen = {{"kind", kind_name(spec.kind)}, {"n", spec.n}, {"seed", spec.seed}};
  if (spec.kind == SceneKind::rational) gen["p"] = spec.p, gen["q"] = spec.q;
  doc.meta["generator"] = gen;
  if (scene.lines) {
    Json lines = Json::array();
    for (const Line& l : scene.lines->lines)
      lines.push_back({{"anchor", detail::point_json(l.anchor)}, {"direction", detail::point_json(l.direction)}});
    Json omega = Json::array();
    for (const Angle& w : scene.lines->exterior_angles) omega.push_back(w.value());
    doc.meta["lines"] = lines;
    doc.meta["exterior_angles"] = omega;
  }
  return doc;
}

inline std::vector<Line> lines_from_json(const Json& lines, const std::string& path) {
  detail::array(lines, path);
  std::vector<Line> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string p = detail::child(path, i);
    detail::object(lines[i], p);
    const Point a = detail::point_field(detail::field(lines[i], p, "anchor"), detail::child(p, "anchor"));
    const Point d = detail::point_field(detail::field(lines[i], p, "direction"), detail::child(p, "direction"));
    if (!(norm(d) > 0.0)) throw SceneFormatError(detail::child(p, "direction"), "direction must be non-zero");
    out.emplace_back(a, d);
  }
  return out;
}

inline std::optional<std::vector<Line>> scene_lines(const SceneDocument& doc) {
  auto it = doc.meta.find("lines");
  if (it == doc.meta.end()) return std::nullopt;
  return lines_from_json(*it, "$.meta.lines");
}

// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string scene_hash(const SceneDocument& doc) { return fnv1a_hex(write_scene(doc)); }

struct CheckRecord {
  std::string name;
  Json value;
  double defect = 0.0;
  bool pass = true;
};

struct ReportDocument {
  std::string kind;
  double tolerance = 1e-9;
  std::string scene_hash;
  std::vector<CheckRecord> checks;

  bool overall() const {
    for (const CheckRecord& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(std::string name, Json value, double defect, bool pass) {
    checks.push_back({std::move(name), std::move(value), defect, pass});
  }
  // Pass iff defect <= bound.
  void bound(std::string name, Json value, double defect, double limit) {
    add(std::move(name), std::move(value), defect, defect <= limit);
  }
};

inline Json report_to_json(const ReportDocument& r) {
  Json checks = Json::array();
  for (const CheckRecord& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"defect", c.defect}, {"pass", c.pass}});
  return {{"kind", r.kind}, {"tolerance", r.tolerance}, {"scene_hash", r.scene_hash}, {"checks", checks},
          {"overall", r.overall()}};
}

inline std::string write_report(const ReportDocument& r) { return canonical_json(report_to_json(r)); }

inline Json point_array(Point p) { return Json::array({p.x, p.y}); }

inline Json trace_to_json(const Trace& t) {
  Json vertices = Json::array();
  for (Point v : t.vertices) vertices.push_back(point_array(v));
  Json lines = Json::array();
  for (const Line& l : t.side_lines) lines.push_back({{"anchor", point_array(l.anchor)}, {"direction", point_array(l.direction)}});
  return {{"rounds", t.rounds}, {"vertices", vertices}, {"side_lines", lines}};
}

inline Trace trace_from_json(const Json& j) {
  const auto pt = [](const Json& a, const std::string& path) {
    if (!a.is_array() || a.size() != 2) throw SceneFormatError(path, "expected [x, y]");
    return Point{detail::number(a[0], path + "[0]"), detail::number(a[1], path + "[1]")};
  };
  detail::object(j, "$");
  Trace t;
  const Json& rounds = detail::field(j, "$", "rounds");
  if (!rounds.is_number_integer()) throw SceneFormatError("$.rounds", "expected an integer");
  t.rounds = rounds.get<int>();
  const Json& vertices = detail::array(detail::field(j, "$", "vertices"), "$.vertices");
  for (std::size_t i = 0; i < vertices.size(); ++i) t.vertices.push_back(pt(vertices[i], detail::child("$.vertices", i)));
  if (auto it = j.find("side_lines"); it != j.end()) {
    detail::array(*it, "$.side_lines");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = detail::child("$.side_lines", i);
      const Json& l = detail::object((*it)[i], path);
      const Point d = pt(detail::field(l, path, "direction"), detail::child(path, "direction"));
      if (!(norm(d) > 0.0)) throw SceneFormatError(detail::child(path, "direction"), "direction must be non-zero");
      t.side_lines.emplace_back(pt(detail::field(l, path, "anchor"), detail::child(path, "anchor")), d);
    }
  }
  return t;
}

}  // namespace circlechain
