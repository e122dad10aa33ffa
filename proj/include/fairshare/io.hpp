#pragma once

// Problem files (JSON) and SVG figures for region maps.
//
// A problem file is an object with
//   "vertices":     [[u1, u2], ...]        vertex list of F (any order)
//   "disagreement": [c1, c2]               optional, default [0, 0]
//   "preset":       "name" or {"name": ..., "n": ...}   optional; replaces vertices

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fairshare/analysis.hpp"
#include "fairshare/error.hpp"
#include "fairshare/geometry.hpp"

namespace fairshare::io {

using geometry::BargainingProblem;
using nlohmann::json;

namespace detail {

[[noreturn]] inline void bad_file(const std::string& what) { throw Error(ErrorCode::InvalidProblemFile, what); }

inline Payoff pair_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad_file(what + " must be a pair of numbers [u1, u2]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// Problem from a parsed document. Geometry errors (non-convex input,
/// disagreement outside F, ...) propagate with their own codes.
inline BargainingProblem problem_from_json(const json& doc) {
  if (!doc.is_object()) detail::bad_file("problem file must hold a JSON object");
  Payoff c{0.0, 0.0};
  if (doc.contains("disagreement")) c = detail::pair_of(doc["disagreement"], "disagreement");
  if (doc.contains("preset")) {
    const json& p = doc["preset"];
    std::string name;
    int n = geometry::kDefaultPresetSegments;
    if (p.is_string()) {
      name = p.get<std::string>();
    } else if (p.is_object() && p.contains("name") && p["name"].is_string()) {
      name = p["name"].get<std::string>();
      if (p.contains("n")) {
        if (!p["n"].is_number_integer()) detail::bad_file("preset n must be an integer");
        n = p["n"].get<int>();
      }
    } else {
      detail::bad_file("preset must be a name or {\"name\": ..., \"n\": ...}");
    }
    return geometry::preset_problem(name, n, c);
  }
  if (!doc.contains("vertices")) detail::bad_file("problem file needs \"vertices\" or \"preset\"");
  const json& v = doc["vertices"];
  if (!v.is_array()) detail::bad_file("vertices must be an array of [u1, u2] pairs");
  std::vector<Payoff> pts;
  pts.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) pts.push_back(detail::pair_of(v[k], "vertex " + std::to_string(k)));
  return geometry::make_problem(pts, c);
}

inline BargainingProblem parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    detail::bad_file(std::string("not valid JSON: ") + e.what());
  }
  return problem_from_json(doc);
}

inline BargainingProblem read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::bad_file("cannot open problem file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_problem(text.str());
}

/// Canonical document: the polygon's own vertex order, shortest round-trip
/// decimal for every coordinate.
inline json problem_to_json(const BargainingProblem& problem) {
  json v = json::array();
  for (const Payoff& p : problem.feasible().vertices()) v.push_back({p.u1, p.u2});
  return {{"vertices", v}, {"disagreement", {problem.disagreement().u1, problem.disagreement().u2}}};
}

inline void write_problem(std::ostream& out, const BargainingProblem& problem) {
  out << problem_to_json(problem).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// SVG

/// Static figure of a region map: one translucent cell per gain point and
/// player, the domain outline and the player-1 region boundary.
inline void write_region_svg(std::ostream& out, const analysis::RegionMap& rm, const geometry::ConvexPolygon& domain) {
  constexpr double size = 480.0;
  constexpr double pad = 20.0;
  const auto [lo, hi] = domain.bounding_box();
  const double scale = (size - 2 * pad) / std::max(hi.u1 - lo.u1, hi.u2 - lo.u2);
  char buf[256];
  const auto px = [&](Payoff p) {
    return std::pair{pad + (p.u1 - lo.u1) * scale, size - pad - (p.u2 - lo.u2) * scale};
  };
  const auto points = [&](const std::vector<Payoff>& pts) {
    std::string s;
    for (const Payoff& p : pts) {
      const auto [x, y] = px(p);
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", s.empty() ? "" : " ", x, y);
      s += buf;
    }
    return s;
  };

  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                size, size, size, size);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<title>gain regions, %s, grid step %g</title>\n",
                std::string(solutions::to_string(rm.solver)).c_str(), rm.grid_step);
  out << buf;

  const double half = rm.grid_step / 2;
  const char* fill[2] = {"#2b6cb0", "#c53030"};
  for (int player = 0; player < 2; ++player) {
    out << "<g fill=\"" << fill[player] << "\" fill-opacity=\"0.35\" stroke=\"none\">\n";
    for (const analysis::RegionPoint& p : rm.points) {
      if (p.label[player] != analysis::Label::Gain) continue;
      const Payoff c = p.c;
      out << "<polygon points=\""
          << points({{c.u1 - half, c.u2 - half}, {c.u1 + half, c.u2 - half}, {c.u1 + half, c.u2 + half},
                     {c.u1 - half, c.u2 + half}})
          << "\"/>\n";
    }
    out << "</g>\n";
  }

  std::vector<Payoff> outline = domain.vertices();
  outline.push_back(outline.front());
  out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"" << points(outline) << "\"/>\n";
  const std::vector<Payoff> edge = analysis::region_boundary(rm, 0);
  if (edge.size() > 1) {
    out << "<polyline fill=\"none\" stroke=\"#1a365d\" stroke-width=\"1\" stroke-dasharray=\"4 3\" points=\""
        << points(edge) << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace fairshare::io
