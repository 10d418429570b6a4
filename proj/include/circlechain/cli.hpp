#pragma once

// Command-line surface: generate, verify, iterate, incidence, steiner,
// mobius, render, sweep. Exit codes: 0 pass, 1 check failure, 2 input error.

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circlechain/chain.hpp"
#include "circlechain/incidence.hpp"
#include "circlechain/mobius.hpp"
#include "circlechain/scene_io.hpp"
#include "circlechain/scenes.hpp"
#include "circlechain/svg.hpp"

namespace circlechain {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cli {

inline std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

inline std::string read_file(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return read_all(in);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  return read_all(f);
}

inline SceneDocument load_scene(const std::string& path, std::istream& in, double rel) {
  const std::string text = read_file(path, in);
  try {
    return parse_scene(text, rel);
  } catch (const SceneFormatError& e) {
    throw InputError(std::string("scene ") + (path.empty() || path == "-" ? "<stdin>" : path) + ": " + e.what());
  } catch (const GeometryError& e) {
    throw InputError(std::string("scene: ") + e.what());
  }
}

inline void emit(const std::string& bytes, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << bytes;
}

inline Json pt(Point p) { return point_array(p); }
inline Json circle_json(const Circle& c) { return {{"center", pt(c.center)}, {"radius", c.radius}}; }

inline Point bbox_center(const Chain& chain) {
  double lx = INFINITY, ly = INFINITY, hx = -INFINITY, hy = -INFINITY;
  for (const Circle& c : chain.circles) {
    lx = std::min(lx, c.center.x - c.radius), hx = std::max(hx, c.center.x + c.radius);
    ly = std::min(ly, c.center.y - c.radius), hy = std::max(hy, c.center.y + c.radius);
  }
  return {0.5 * (lx + hx), 0.5 * (ly + hy)};
}

inline ReturnPivots parse_return_pivots(const std::string& s) {
  if (s == "same") return ReturnPivots::same;
  if (s == "companion") return ReturnPivots::companion;
  throw InputError("--return-pivots must be 'same' or 'companion'");
}

// The closed chain a scene is checked on: itself, or its doubling if open.
inline Chain closed_form(const Chain& chain, ReturnPivots mode, const Tolerance& tol) {
  return chain.closed ? chain : doubled_chain(chain, mode, tol);
}

// Starting points: the scene's own start first, then seeded ones.
inline std::vector<Point> starts_for(const SceneDocument& doc, const Chain& chain, int count, std::uint64_t seed) {
  std::vector<Point> out;
  if (doc.start) out.push_back({doc.start->x, doc.start->y});
  for (double a : starting_angles(static_cast<std::size_t>(std::max(0, count - static_cast<int>(out.size()))), seed))
    out.push_back(chain.circles.front().at(a));
  return out;
}

inline double worst_return(const Chain& chain, const std::vector<Point>& starts, int rounds, const Tolerance& tol,
                           std::optional<Point> anchor = std::nullopt) {
  double worst = 0.0;
  for (Point x : starts) worst = std::max(worst, distance(iterate(chain, x, rounds, anchor, tol).vertices.back(), x));
  return worst;
}

inline Json transfer_json(const TransferReport& r) {
  Json joints = Json::array();
  for (const JointAngles& j : r.joints) joints.push_back({{"delta", j.delta}, {"gamma", j.gamma}, {"mu", j.mu.value()}});
  return {{"total", r.total}, {"winding", r.winding}, {"closing_defect", r.closing_defect}, {"joints", joints}};
}

struct VerifyOptions {
  double rel = 1e-9;
  ReturnPivots return_pivots = ReturnPivots::same;
  int starts = 3;
  std::uint64_t seed = 0;
};

inline ReportDocument verify_report(const SceneDocument& doc, const VerifyOptions& opt) {
  ReportDocument report;
  report.kind = "verify";
  report.tolerance = opt.rel;
  report.scene_hash = scene_hash(doc);
  const Chain chain = to_chain(doc);
  const Tolerance tol = scene_tolerance(chain, opt.rel);
  const Chain closed = closed_form(chain, opt.return_pivots, tol);
  const TransferReport r = transfer_report(closed, tol);
  Json value = transfer_json(r);
  if (!chain.closed) value["doubled"] = opt.return_pivots == ReturnPivots::same ? "same" : "companion";
  report.add("transfer_sum", value, std::abs(r.closing_defect), is_closing(r, tol));

  const double n = static_cast<double>(closed.joint_count());
  const std::vector<Point> starts = starts_for(doc, closed, opt.starts, opt.seed);
  report.bound("polygon_return", Json{{"starts", starts.size()}, {"rounds", 1}}, worst_return(closed, starts, 1, tol),
               n * tol.abs());
  if (doc.anchor_i) {
    report.bound("concyclic_return", Json{{"anchor", pt(*doc.anchor_i)}, {"starts", starts.size()}},
                 worst_return(closed, starts, 1, tol, doc.anchor_i), 10.0 * n * tol.abs());
  }
  return report;
}

inline Json lighthouse_json(const LighthouseReport& r) {
  Json circles = Json::array();
  for (const auto& [key, c] : r.fitted) {
    circles.push_back({{"pair", {key.first, key.second}},
                       {"circle", circle_json(c)},
                       {"residual", r.residuals.at(key)},
                       {"pivot_defect", r.pivot_defects.at(key)},
                       {"samples", r.sampled_x.at(key).size()}});
  }
  Json points = Json::array();
  for (const auto& [key, c] : r.concurrency)
    points.push_back({{"triple", {key[0], key[1], key[2]}}, {"point", pt(c.point)}, {"spread", c.spread}});
  Json omitted = Json::array();
  for (const auto& key : r.omitted) omitted.push_back({key.first, key.second});
  return {{"fitted", circles}, {"concurrency", points}, {"omitted", omitted}, {"starts", r.starts_used}};
}

inline ReportDocument incidence_report(const SceneDocument& doc, double rel, int starts, std::uint64_t seed) {
  ReportDocument report;
  report.kind = "incidence";
  report.tolerance = rel;
  report.scene_hash = scene_hash(doc);
  const Chain chain = to_chain(doc);
  const Tolerance tol = scene_tolerance(chain, rel);
  if (!chain.closed) throw InputError("incidence needs a closed chain");

  const auto all_tangent = [&] {
    for (std::size_t j = 0; j < chain.joint_count(); ++j)
      if (!std::holds_alternative<Tangent>(intersect_circles(chain.joint_from(j), chain.joint_to(j), tol))) return false;
    return true;
  };
  const std::size_t n = chain.circles.size();
  if ((n == 3 || n == 4) && all_tangent()) {
    if (n == 3) {
      const TouchingReport t = three_touching_report(chain, starts, tol, seed);
      report.kind = "three_touching";
      report.bound("orthogonality", Json(t.orthogonality_defects), t.worst_orthogonality(), tol.rel);
      report.bound("midpoint_center", Json{{"base_circle", circle_json(t.base_circle)}}, t.midpoint_defect, tol.abs());
      report.bound("x135_x246_coincidence", Json{{"x135", pt(t.x135)}, {"x246", pt(t.x246)}}, t.coincidence_defect,
                   tol.abs());
      report.bound("pivots_as_meets", Json("A_i = X_(i,i+3)"), t.pivot_defect, tol.abs());
      report.bound("base_circle_membership", Json(t.membership_defects),
                   std::max(t.membership_defects[0], t.membership_defects[1]), tol.abs());
    } else {
      const TouchingReport t = four_touching_report(chain, starts, tol, seed);
      report.kind = "four_touching";
      report.bound("contacts_concyclic", Json{{"base_circle", circle_json(t.base_circle)}}, t.concyclicity_defect,
                   tol.abs());
      report.bound("x13_x24_membership", Json{{"x13", pt(t.x13)}, {"x24", pt(t.x24)}},
                   std::max(t.membership_defects[0], t.membership_defects[1]), tol.abs());
    }
    return report;
  }

  report.kind = "lighthouse";
  const TransferReport tr = transfer_report(chain, tol);
  const bool closing = is_closing(tr, tol);
  report.add("closing", transfer_json(tr), std::abs(tr.closing_defect), closing);
  if (!closing) return report;
  const LighthouseReport l = lighthouse_sweep(chain, starts, tol, seed);
  const Json data = lighthouse_json(l);
  report.bound("lighthouse_circles", data["fitted"], l.worst_residual(), tol.abs());
  report.bound("concurrency", data["concurrency"], l.worst_spread(), tol.abs());
  return report;
}

// "a,b,c;..." with each line a x + b y = c.
inline std::vector<Line> parse_lines(const std::string& spec) {
  std::vector<Line> out;
  std::stringstream all(spec);
  std::string item;
  while (std::getline(all, item, ';')) {
    std::vector<double> v;
    std::stringstream parts(item);
    std::string part;
    while (std::getline(parts, part, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(part, &used));
        if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw InputError("--lines: '" + part + "' is not a number");
      }
    }
    if (v.size() != 3) throw InputError("--lines: each line is 'a,b,c' meaning a*x + b*y = c");
    const Vec2 normal{v[0], v[1]};
    const double nn = dot(normal, normal);
    if (!(nn > 0.0)) throw InputError("--lines: a and b must not both be zero");
    out.emplace_back(normal * (v[2] / nn), perp(normal));
  }
  return out;
}

inline ReportDocument steiner_document(const std::array<Line, 4>& lines, std::optional<Point> start, double rel,
                                       std::uint64_t seed, const std::string& hash) {
  ReportDocument report;
  report.kind = "steiner";
  report.tolerance = rel;
  report.scene_hash = hash;
  Chain chain;
  try {
    chain = quadrilateral_chain(lines, Tolerance(rel, 1.0));
  } catch (const GeometryError& e) {
    throw InputError(e.what());
  }
  const Tolerance tol = scene_tolerance(chain, rel);
  const Point x1 = start.value_or(chain.circles[0].at(starting_angles(1, seed).front()));
  const SteinerReport r = steiner_report(lines, x1, tol);
  Json polygon = Json::array();
  for (int i = 0; i < 4; ++i) polygon.push_back(pt(r.polygon[i]));
  report.bound("steiner_point", Json{{"S", pt(r.steiner_point)}}, r.steiner_defect, tol.abs());
  report.bound("closure", polygon, r.closure_defect, 4.0 * tol.abs());
  report.bound("x13_on_c13", circle_json(r.circle_c13), r.x13_defect, tol.abs());
  report.bound("x24_on_c24", circle_json(r.circle_c24), r.x24_defect, tol.abs());
  report.bound("x_on_c", Json{{"P", pt(r.p_point)}, {"Q", pt(r.q_point)}, {"circle", circle_json(r.circle_c)}}, r.x_defect,
               tol.abs());
  report.bound("concyclic_d", r.circle_d ? circle_json(*r.circle_d) : Json(nullptr), r.d_defect, tol.abs());
  report.bound("collinear_x1_x3_p", Json(nullptr), r.collinearity_defects[0], tol.abs());
  report.bound("collinear_x2_x4_q", Json(nullptr), r.collinearity_defects[1], tol.abs());
  if (!r.degenerate.empty()) report.add("degenerate_checks", Json(r.degenerate), 0.0, true);
  return report;
}

inline ReportDocument mobius_report(const SceneDocument& doc, double rel, std::uint64_t seed, Chain* image_out) {
  ReportDocument report;
  report.kind = "mobius";
  report.tolerance = rel;
  report.scene_hash = scene_hash(doc);
  const Chain chain = to_chain(doc);
  const Tolerance tol = scene_tolerance(chain, rel);
  const MobiusMap m = random_mobius(seed, tol.scene_scale, bbox_center(chain));
  const Chain image = apply_scene(m, chain, tol);
  const Tolerance itol = scene_tolerance(image, rel);
  if (image_out) *image_out = image;

  const Json coeff = {{"a", {m.a.real(), m.a.imag()}}, {"b", {m.b.real(), m.b.imag()}},
                      {"c", {m.c.real(), m.c.imag()}}, {"d", {m.d.real(), m.d.imag()}}};
  report.add("map", coeff, 0.0, true);

  const std::vector<Point> pivots = resolve_pivots(chain, tol);
  double angle = 0.0;
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    const double before = transfer_angle_formula(chain.joint_from(j), chain.joint_to(j), pivots[j], tol).mu.value();
    const double after =
        transfer_angle_formula(image.joint_from(j), image.joint_to(j), image.pivots[j].point, itol).mu.value();
    angle = std::max(angle, angular_distance(before, after));
  }
  report.bound("transfer_angles", Json(nullptr), angle, 10.0 * rel);

  const Chain closed = closed_form(chain, ReturnPivots::same, tol);
  const Chain iclosed = closed_form(image, ReturnPivots::same, itol);
  const bool b = is_closing(closed, tol), a = is_closing(iclosed, itol);
  report.add("closing_preserved", Json{{"before", b}, {"after", a}}, b == a ? 0.0 : 1.0, b == a);

  // m(phi_A(x)) against the concyclic map of the image joint anchored at m(infinity).
  const Point far = to_point(m.a / m.c);
  double commute = 0.0;
  for (double t : starting_angles(8, seed)) {
    const Point x = chain.circles[0].at(t);
    const Point lhs = apply_point(m, pivot_map(chain.circles[0], chain.circles[1], pivots[0], x, tol), tol);
    const Point rhs =
        pivot_map_concyclic(image.circles[0], image.circles[1], image.pivots[0].point, far, apply_point(m, x, tol), itol);
    commute = std::max(commute, distance(lhs, rhs));
  }
  report.bound("pivot_map_commutation", Json{{"anchor", pt(far)}}, commute, 10.0 * itol.abs());
  return report;
}

// Theorem-aware checks for generated scenes, keyed on meta.generator.
inline ReportDocument theorem_report(const SceneDocument& doc, double rel, std::uint64_t seed) {
  ReportDocument report;
  report.tolerance = rel;
  report.scene_hash = scene_hash(doc);
  const Chain chain = to_chain(doc);
  const Tolerance tol = scene_tolerance(chain, rel);
  const Json gen = doc.meta.value("generator", Json::object());
  const std::string kind = gen.value("kind", std::string("plain"));
  report.kind = "theorem:" + kind;

  const auto round_trip = write_scene(parse_scene(write_scene(doc), rel)) == write_scene(doc);
  report.add("round_trip", Json(nullptr), round_trip ? 0.0 : 1.0, round_trip);

  const auto closing_suite = [&](const Chain& closed, const std::string& prefix, int rounds) {
    const TransferReport r = transfer_report(closed, tol);
    const double n = static_cast<double>(closed.joint_count());
    if (rounds == 1) report.add(prefix + "closing", transfer_json(r), std::abs(r.closing_defect), is_closing(r, tol));
    const std::vector<Point> starts = starts_for(doc, closed, 5, seed);
    report.bound(prefix + "polygon_return", Json{{"rounds", rounds}}, worst_return(closed, starts, rounds, tol),
                 rounds * n * tol.abs());
    return r;
  };

  if (kind == "open_polygon") {
    closing_suite(doubled_chain(chain, ReturnPivots::same, tol), "same:", 1);
    closing_suite(doubled_chain(chain, ReturnPivots::companion, tol), "companion:", 1);
    return report;
  }
  if (kind == "touching" && chain.circles.size() % 2 == 1) {
    const TransferReport r = closing_suite(chain, "", 2);
    const double n = static_cast<double>(chain.joint_count());
    report.bound("odd_defect_pi", Json{{"closing_defect", r.closing_defect}}, std::abs(std::abs(r.closing_defect) - kPi),
                 n * tol.rel);
    const auto order = closure_order(chain, 4, tol, seed);
    report.add("closure_order", order ? Json(*order) : Json(nullptr), 0.0, order == 2);
    return report;
  }
  if (kind == "rational") {
    const int q = gen.value("q", 1);
    closing_suite(chain, "", q);
    const auto order = closure_order(chain, 2 * q + 2, tol, seed);
    report.add("closure_order", order ? Json(*order) : Json(nullptr), 0.0, order == q);
    return report;
  }

  closing_suite(chain, "", 1);
  if (doc.anchor_i) {
    const std::vector<Point> starts = starts_for(doc, chain, 5, seed);
    report.bound("concyclic_return", Json{{"anchor", pt(*doc.anchor_i)}}, worst_return(chain, starts, 1, tol, doc.anchor_i),
                 10.0 * chain.joint_count() * tol.abs());
  }
  if ((kind == "n_lines" || kind == "quadrilateral") && doc.meta.contains("exterior_angles")) {
    LineArrangement arr;
    for (const Json& w : doc.meta["exterior_angles"]) arr.exterior_angles.emplace_back(w.get<double>());
    const TransferReport r = transfer_report(chain, tol);
    double identity = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < arr.exterior_angles.size(); ++i) {
      identity = std::max(identity, angular_distance(r.joints[i].mu.value(), n_line_transfer_angle(arr, i)));
      sum += arr.exterior_angles[i].value();
    }
    report.bound("exterior_angle_identity", Json(nullptr), identity, tol.rel);
    report.bound("exterior_angle_sum", Json{{"sum", sum}}, angular_distance(sum, 0.0), tol.rel);
    if (kind == "quadrilateral") {
      const auto lines = scene_lines(doc);
      std::array<Line, 4> four;
      std::copy_n(lines->begin(), 4, four.begin());
      const ReportDocument s = steiner_document(four, std::nullopt, rel, seed, report.scene_hash);
      for (const CheckRecord& c : s.checks) report.checks.push_back({"steiner:" + c.name, c.value, c.defect, c.pass});
    }
  }
  return report;
}

inline std::string repro_command(const SceneSpec& spec, double rel) {
  std::string cmd = "circlechain generate --kind " + std::string(kind_name(spec.kind)) + " --n " +
                    std::to_string(spec.n) + " --seed " + std::to_string(spec.seed);
  if (spec.kind == SceneKind::rational) cmd += " --p " + std::to_string(spec.p) + " --q " + std::to_string(spec.q);
  if (spec.with_anchor) cmd += " --anchor";
  char tol[32];
  const auto end = std::to_chars(tol, tol + sizeof tol, rel).ptr;
  return cmd + " | circlechain sweep-check --tol " + std::string(tol, end);
}

// Deterministic spec for the i-th scene of a sweep.
inline SceneSpec sweep_spec(SceneKind kind, std::uint64_t seed) {
  SceneRng rng(seed);
  SceneSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  const auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1)); };
  switch (kind) {
    case SceneKind::polygon: spec.n = pick(3, 12); break;
    case SceneKind::common_point:
      spec.n = pick(3, 6);
      spec.with_anchor = rng.chance(0.5);
      break;
    case SceneKind::touching: spec.n = pick(3, 8); break;
    case SceneKind::quadrilateral: spec.n = 4; break;
    case SceneKind::n_lines: spec.n = pick(4, 7); break;
    case SceneKind::rational: {
      spec.n = pick(3, 6);
      static constexpr int kQ[] = {2, 3, 5, 7};
      spec.q = kQ[pick(0, 3)];
      do spec.p = pick(1, spec.q - 1);
      while (std::gcd(spec.p, spec.q) != 1);
      break;
    }
    case SceneKind::open_polygon: spec.n = pick(2, 6); break;
  }
  return spec;
}

struct Args {
  std::string scene;
  std::string out;
  std::string kind;
  std::string trace;
  std::string lines;
  std::string kinds;
  std::string return_pivots = "same";
  int n = 3, p = 1, q = 3, rounds = 1, starts = 0, count = 100;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool anchor = false;
};

inline int run_generate(const Args& a, std::ostream& out) {
  SceneSpec spec;
  const auto kind = parse_kind(a.kind);
  if (!kind) throw InputError("unknown kind '" + a.kind + "'");
  spec.kind = *kind;
  spec.n = a.n;
  spec.seed = a.seed;
  spec.p = a.p;
  spec.q = a.q;
  spec.with_anchor = a.anchor;
  if (spec.with_anchor && spec.kind != SceneKind::common_point) throw InputError("--anchor applies to common_point only");
  GeneratedScene scene;
  try {
    scene = generate(spec);
  } catch (const SceneError& e) {
    throw InputError(e.what());
  }
  emit(write_scene(scene_document(scene, spec)), a.out, out);
  return kExitPass;
}

inline int finish(const ReportDocument& r, const std::string& path, std::ostream& out) {
  emit(write_report(r), path, out);
  return r.overall() ? kExitPass : kExitCheckFailed;
}

inline int run_iterate(const Args& a, std::istream& in, std::ostream& out) {
  const SceneDocument doc = load_scene(a.scene, in, a.tol);
  const Chain chain = to_chain(doc);
  if (a.rounds < 1) throw InputError("--rounds must be at least 1");
  if (!chain.closed && a.rounds != 1) throw InputError("an open chain runs a single pass; use --rounds 1");
  const Tolerance tol = scene_tolerance(chain, a.tol);
  const int count = a.starts > 0 ? a.starts : 1;
  Json traces = Json::array();
  for (Point x : starts_for(doc, chain, count, a.seed))
    traces.push_back(trace_to_json(iterate(chain, x, a.rounds, doc.anchor_i, tol)));
  emit(canonical_json({{"traces", traces}}), a.out, out);
  return kExitPass;
}

inline int run_render(const Args& a, std::istream& in, std::ostream& out) {
  const SceneDocument doc = load_scene(a.scene, in, a.tol);
  std::optional<Trace> trace;
  if (!a.trace.empty()) {
    std::ifstream f(a.trace, std::ios::binary);
    if (!f) throw InputError("cannot open '" + a.trace + "'");
    try {
      const Json j = Json::parse(read_all(f));
      trace = trace_from_json(j.contains("traces") ? j.at("traces").at(0) : j);
    } catch (const std::exception& e) {
      throw InputError("trace " + a.trace + ": " + e.what());
    }
  } else if (doc.start && !doc.chain.order.empty()) {
    const Chain chain = to_chain(doc);
    trace = iterate(chain, {doc.start->x, doc.start->y}, chain.closed ? a.rounds : 1, doc.anchor_i,
                    scene_tolerance(chain, a.tol));
  }
  emit(render_svg(doc, trace), a.out, out);
  return kExitPass;
}

inline int run_sweep(const Args& a, std::ostream& out, std::ostream& err) {
  std::vector<SceneKind> kinds;
  if (a.kinds.empty()) {
    kinds.assign(kAllSceneKinds.begin(), kAllSceneKinds.end());
  } else {
    std::stringstream ss(a.kinds);
    std::string k;
    while (std::getline(ss, k, ',')) {
      const auto kind = parse_kind(k);
      if (!kind) throw InputError("--kinds: unknown kind '" + k + "'");
      kinds.push_back(*kind);
    }
  }
  if (a.count < 0) throw InputError("--count must not be negative");

  struct Tally {
    int count = 0, failed = 0;
    double worst = 0.0;
    Json repro = Json::array();
  };
  std::map<std::string, Tally> tally;
  for (SceneKind k : kinds) tally[std::string(kind_name(k))];
  for (int i = 0; i < a.count; ++i) {
    const SceneKind kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
    const SceneSpec spec = sweep_spec(kind, a.seed + static_cast<std::uint64_t>(i));
    Tally& t = tally[std::string(kind_name(kind))];
    ++t.count;
    bool ok = false;
    std::string why;
    try {
      const GeneratedScene scene = generate(spec);
      const ReportDocument r = theorem_report(scene_document(scene, spec), a.tol, spec.seed);
      ok = r.overall();
      for (const CheckRecord& c : r.checks) {
        if (c.name == "round_trip" || c.name.find("closure_order") != std::string::npos) continue;
        if (!c.pass && why.empty()) why = c.name;
      }
      for (const CheckRecord& c : r.checks)
        if (c.name.find("return") != std::string::npos) t.worst = std::max(t.worst, c.defect);
      if (!ok && why.empty()) why = "closure_order";
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!ok) {
      ++t.failed;
      t.repro.push_back(repro_command(spec, a.tol));
      err << "sweep: " << kind_name(kind) << " seed " << spec.seed << " failed (" << why << "): "
          << repro_command(spec, a.tol) << "\n";
    }
  }

  ReportDocument report;
  report.kind = "sweep";
  report.tolerance = a.tol;
  report.scene_hash = "";
  for (const auto& [name, t] : tally) {
    report.add(name, Json{{"count", t.count}, {"failed", t.failed}, {"worst_return", t.worst}, {"reproduce", t.repro}},
               static_cast<double>(t.failed), t.failed == 0);
  }
  return finish(report, a.out, out);
}

inline int dispatch(CLI::App& app, const Args& a, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (!(a.tol > 0.0)) throw InputError("--tol must be positive");
  if (name == "generate") return run_generate(a, out);
  if (name == "verify") {
    VerifyOptions opt;
    opt.rel = a.tol;
    opt.return_pivots = parse_return_pivots(a.return_pivots);
    opt.starts = a.starts > 0 ? a.starts : 3;
    opt.seed = a.seed;
    return finish(verify_report(load_scene(a.scene, in, a.tol), opt), a.out, out);
  }
  if (name == "sweep-check") {
    return finish(theorem_report(load_scene(a.scene, in, a.tol), a.tol, a.seed), a.out, out);
  }
  if (name == "iterate") return run_iterate(a, in, out);
  if (name == "incidence") {
    return finish(incidence_report(load_scene(a.scene, in, a.tol), a.tol, a.starts > 0 ? a.starts : 16, a.seed), a.out,
                  out);
  }
  if (name == "steiner") {
    std::vector<Line> lines;
    std::optional<Point> start;
    std::string hash;
    if (!a.lines.empty()) {
      lines = parse_lines(a.lines);
    } else {
      const SceneDocument doc = load_scene(a.scene, in, a.tol);
      const auto from_meta = scene_lines(doc);
      if (!from_meta) throw InputError("steiner: the scene has no meta.lines; pass --lines");
      lines = *from_meta;
      if (doc.start) start = Point{doc.start->x, doc.start->y};
      hash = scene_hash(doc);
    }
    if (lines.size() != 4) throw InputError("steiner needs exactly four lines, got " + std::to_string(lines.size()));
    std::array<Line, 4> four;
    std::copy_n(lines.begin(), 4, four.begin());
    return finish(steiner_document(four, start, a.tol, a.seed, hash), a.out, out);
  }
  if (name == "mobius") {
    const SceneDocument doc = load_scene(a.scene, in, a.tol);
    ReportDocument r;
    try {
      r = mobius_report(doc, a.tol, a.seed, nullptr);
    } catch (const GeometryError& e) {
      throw InputError(std::string("mobius: ") + e.what());
    }
    return finish(r, a.out, out);
  }
  if (name == "render") return run_render(a, in, out);
  if (name == "sweep") return run_sweep(a, out, err);
  throw InputError("unknown subcommand '" + name + "'");
}

}  // namespace cli

inline int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  cli::Args a;
  CLI::App app{"Chains of circles: pivot maps, transfer angles and closing theorems", "circlechain"};
  app.require_subcommand(1);

  const auto add_tol = [&](CLI::App* s) { s->add_option("--tol", a.tol, "relative tolerance (default 1e-9)"); };
  const auto add_scene = [&](CLI::App* s) { s->add_option("scene", a.scene, "scene JSON file, or - / omitted for stdin"); };
  const auto add_out = [&](CLI::App* s) { s->add_option("--out", a.out, "output file (default stdout)"); };

  auto* gen = app.add_subcommand("generate", "emit a generated scene");
  gen->add_option("--kind", a.kind, "polygon|common_point|touching|quadrilateral|n_lines|rational|open_polygon")->required();
  gen->add_option("--n", a.n, "number of circles");
  gen->add_option("--seed", a.seed, "generator seed");
  gen->add_option("--p", a.p, "rational: numerator of the transfer sum 2 pi p / q");
  gen->add_option("--q", a.q, "rational: denominator");
  gen->add_flag("--anchor", a.anchor, "common_point: add a concyclic anchor point");
  add_out(gen);

  auto* verify = app.add_subcommand("verify", "transfer-angle report and closing check");
  add_scene(verify);
  add_tol(verify);
  add_out(verify);
  verify->add_option("--starts", a.starts, "polygon starts (default 3)");
  verify->add_option("--seed", a.seed, "seed for starts");
  verify->add_option("--return-pivots", a.return_pivots, "open chains: same|companion");

  auto* check = app.add_subcommand("sweep-check", "theorem checks for one generated scene");
  add_scene(check);
  add_tol(check);
  add_out(check);
  check->add_option("--seed", a.seed, "seed for starts");

  auto* iter = app.add_subcommand("iterate", "polygon traces");
  add_scene(iter);
  add_tol(iter);
  add_out(iter);
  iter->add_option("--rounds", a.rounds, "rounds through the chain");
  iter->add_option("--starts", a.starts, "number of starts (default 1; the scene start comes first)");
  iter->add_option("--seed", a.seed, "seed for starts");

  auto* inc = app.add_subcommand("incidence", "lighthouse circles or touching-chain report");
  add_scene(inc);
  add_tol(inc);
  add_out(inc);
  inc->add_option("--starts", a.starts, "number of starts (default 16)");
  inc->add_option("--seed", a.seed, "seed for starts");

  auto* st = app.add_subcommand("steiner", "extended Steiner quadrilateral report");
  add_scene(st);
  add_tol(st);
  add_out(st);
  st->add_option("--lines", a.lines, "four lines 'a,b,c;...' meaning a*x + b*y = c");
  st->add_option("--seed", a.seed, "seed for the start when the scene has none");

  auto* mob = app.add_subcommand("mobius", "Mobius invariance report");
  add_scene(mob);
  add_tol(mob);
  add_out(mob);
  mob->add_option("--seed", a.seed, "map seed");

  auto* ren = app.add_subcommand("render", "SVG figure");
  add_scene(ren);
  add_tol(ren);
  add_out(ren);
  ren->add_option("--trace", a.trace, "trace JSON from iterate");
  ren->add_option("--rounds", a.rounds, "rounds for the polygon drawn from the scene start");

  auto* sw = app.add_subcommand("sweep", "generate and check many scenes");
  add_tol(sw);
  add_out(sw);
  sw->add_option("--kinds", a.kinds, "comma-separated kinds (default all)");
  sw->add_option("--count", a.count, "number of scenes");
  sw->add_option("--seed", a.seed, "first seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "circlechain: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    return cli::dispatch(app, a, in, out, err);
  } catch (const InputError& e) {
    err << "circlechain: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SceneFormatError& e) {
    err << "circlechain: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "circlechain: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace circlechain
