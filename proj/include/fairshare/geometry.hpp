#pragma once

// Bargaining problems as convex polygons in utility space.
//
// A problem is a convex feasibility polygon F together with a disagreement
// point c. Individual rationality is imposed everywhere by restricting F to
// the quadrant {u >= c} before ideal points or frontiers are computed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/error.hpp"

namespace fairshare {

/// A utility pair (u1, u2); player 1 on the horizontal axis.
struct Payoff {
  double u1 = 0.0;
  double u2 = 0.0;

  friend constexpr Payoff operator+(Payoff a, Payoff b) { return {a.u1 + b.u1, a.u2 + b.u2}; }
  friend constexpr Payoff operator-(Payoff a, Payoff b) { return {a.u1 - b.u1, a.u2 - b.u2}; }
  friend constexpr Payoff operator*(double s, Payoff a) { return {s * a.u1, s * a.u2}; }
  friend constexpr Payoff operator*(Payoff a, double s) { return {s * a.u1, s * a.u2}; }
  friend constexpr bool operator==(Payoff a, Payoff b) = default;
};

inline double dot(Payoff a, Payoff b) { return a.u1 * b.u1 + a.u2 * b.u2; }
inline double cross(Payoff a, Payoff b) { return a.u1 * b.u2 - a.u2 * b.u1; }
inline double norm(Payoff a) { return std::hypot(a.u1, a.u2); }
inline double distance(Payoff a, Payoff b) { return norm(a - b); }
inline double max_abs_diff(Payoff a, Payoff b) {
  return std::max(std::abs(a.u1 - b.u1), std::abs(a.u2 - b.u2));
}
inline bool is_finite(Payoff p) { return std::isfinite(p.u1) && std::isfinite(p.u2); }

}  // namespace fairshare

namespace fairshare::geometry {

/// Absolute tolerance for membership and collinearity. Example coordinates are O(1).
inline constexpr double kTolerance = 1e-12;

/// Boundary classification of a polygon edge by its outward normal.
enum class EdgeKind {
  StrongPareto,  // normal strictly positive in both coordinates
  WeakPareto,    // axis-parallel edge facing up or right
  Dominated,     // normal with a negative component (lower/left boundary)
};

/// Distance from p to the segment [a, b].
inline double segment_distance(Payoff p, Payoff a, Payoff b) {
  const Payoff d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + t * d);
}

/// Convex polygon with counterclockwise vertices, starting from the
/// lexicographically smallest vertex. Duplicate and exactly collinear
/// vertices are removed on construction.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  /// Convex hull of arbitrary points. Throws DegenerateSet for fewer than
  /// three hull vertices or zero area.
  static ConvexPolygon hull_of(std::span<const Payoff> points) {
    for (const Payoff& p : points) {
      if (!is_finite(p)) throw Error(ErrorCode::InvalidArgument, "non-finite vertex");
    }
    std::vector<Payoff> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Payoff a, Payoff b) {
      return a.u1 < b.u1 || (a.u1 == b.u1 && a.u2 < b.u2);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw Error(ErrorCode::DegenerateSet, "fewer than three distinct points");

    // Andrew's monotone chain; popping on cross <= 0 drops collinear points.
    std::vector<Payoff> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Payoff& p : pts) {
      while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
      hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
      const Payoff& p = pts[i];
      while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
      hull[k++] = p;
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw Error(ErrorCode::DegenerateSet, "points are collinear");

    ConvexPolygon poly(std::move(hull));
    const auto [lo, hi] = poly.bounding_box();
    const double scale = std::max(hi.u1 - lo.u1, hi.u2 - lo.u2);
    if (poly.area() <= kTolerance * scale * scale) {
      throw Error(ErrorCode::DegenerateSet, "zero-area feasibility set");
    }
    return poly;
  }

  /// Like hull_of, but every input point must lie on the hull boundary
  /// (within kTolerance); otherwise the input was not a convex vertex list.
  static ConvexPolygon from_vertices(std::span<const Payoff> points) {
    ConvexPolygon poly = hull_of(points);
    // Only points the hull dropped need the full distance test.
    std::vector<Payoff> kept = poly.vertices_;
    const auto lex = [](Payoff a, Payoff b) { return a.u1 < b.u1 || (a.u1 == b.u1 && a.u2 < b.u2); };
    std::sort(kept.begin(), kept.end(), lex);
    for (const Payoff& p : points) {
      if (std::binary_search(kept.begin(), kept.end(), p, lex)) continue;
      const double inside = poly.inward_distance(p);
      if (inside > kTolerance) {
        throw Error(ErrorCode::NonConvexInput,
                    "point (" + std::to_string(p.u1) + ", " + std::to_string(p.u2) +
                        ") lies strictly inside the hull");
      }
    }
    return poly;
  }

  const std::vector<Payoff>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Payoff& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

  /// Edge i runs from vertex(i) to vertex(i + 1).
  Payoff edge_direction(std::size_t i) const { return vertex(i + 1) - vertex(i); }
  /// Unit outward normal of edge i.
  Payoff normal(std::size_t i) const { return normals_[i]; }
  /// Offset of edge i's supporting line: normal(i) . x = offset(i).
  double offset(std::size_t i) const { return offsets_[i]; }

  double area() const {
    double twice = 0.0;
    for (std::size_t i = 0; i < size(); ++i) twice += cross(vertex(i), vertex(i + 1));
    return 0.5 * twice;
  }

  std::pair<Payoff, Payoff> bounding_box() const {
    Payoff lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Payoff hi{-lo.u1, -lo.u2};
    for (const Payoff& v : vertices_) {
      lo = {std::min(lo.u1, v.u1), std::min(lo.u2, v.u2)};
      hi = {std::max(hi.u1, v.u1), std::max(hi.u2, v.u2)};
    }
    return {lo, hi};
  }

  /// Signed distance to the boundary: positive inside, negative outside
  /// (outside values are a lower bound on the true distance magnitude).
  double inward_distance(Payoff p) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) d = std::min(d, offsets_[i] - dot(normals_[i], p));
    return d;
  }

  /// Closed membership; points within tol of an edge count as inside.
  bool contains(Payoff p, double tol = kTolerance) const {
    const std::size_t n = size();
    if (n > 32) {
      // Fan from vertex 0: inside the wedge's triangle means inside, beyond
      // the wedge's outer edge by tol means outside. Anything else falls
      // through to the full scan.
      const Payoff v0 = vertices_[0];
      const Payoff q = p - v0;
      if (cross(vertices_[1] - v0, q) > 0.0 && cross(vertices_[n - 1] - v0, q) < 0.0) {
        std::size_t lo = 1, hi = n - 1;
        while (hi - lo > 1) {
          const std::size_t mid = lo + (hi - lo) / 2;
          if (cross(vertices_[mid] - v0, q) > 0.0) lo = mid;
          else hi = mid;
        }
        const double d = offsets_[lo] - dot(normals_[lo], p);
        if (d > 0.0) return true;
        if (d < -tol) return false;
      }
    }
    return inward_distance(p) >= -tol;
  }

  /// Exit of the ray p + t*d (p inside, d != 0): smallest t >= 0 with the
  /// ray on the boundary, and the edge crossed there.
  struct Exit {
    double t = std::numeric_limits<double>::infinity();
    std::size_t edge = 0;
  };
  Exit ray_exit(Payoff p, Payoff d) const {
    Exit best;
    for (std::size_t i = 0; i < size(); ++i) {
      const double nd = dot(normals_[i], d);
      if (nd <= 0.0) continue;
      const double t = std::max(0.0, (offsets_[i] - dot(normals_[i], p)) / nd);
      if (t < best.t) best = {t, i};
    }
    return best;
  }

  EdgeKind edge_kind(std::size_t i) const {
    const Payoff d = edge_direction(i);
    const bool vertical = std::abs(d.u1) <= kTolerance;
    const bool horizontal = std::abs(d.u2) <= kTolerance;
    if (vertical) return d.u2 > 0.0 ? EdgeKind::WeakPareto : EdgeKind::Dominated;
    if (horizontal) return d.u1 < 0.0 ? EdgeKind::WeakPareto : EdgeKind::Dominated;
    // Outward normal (d.u2, -d.u1).
    return (d.u2 > 0.0 && d.u1 < 0.0) ? EdgeKind::StrongPareto : EdgeKind::Dominated;
  }

  /// Distance from p to the polygon boundary (unsigned, exact).
  double boundary_distance(Payoff p) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) d = std::min(d, segment_distance(p, vertex(i), vertex(i + 1)));
    return d;
  }

 private:
  explicit ConvexPolygon(std::vector<Payoff> ccw) : vertices_(std::move(ccw)) {
    normals_.resize(vertices_.size());
    offsets_.resize(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const Payoff d = edge_direction(i);
      const double len = norm(d);
      normals_[i] = {d.u2 / len, -d.u1 / len};
      offsets_[i] = dot(normals_[i], vertices_[i]);
    }
  }

  std::vector<Payoff> vertices_;
  std::vector<Payoff> normals_;
  std::vector<double> offsets_;
};

/// Sutherland-Hodgman clip of a convex polygon to {u1 >= c1, u2 >= c2}.
/// Returns the raw vertex list (possibly degenerate or empty).
inline std::vector<Payoff> clip_to_quadrant(const ConvexPolygon& poly, Payoff c) {
  std::vector<Payoff> pts = poly.vertices();
  const auto clip = [&pts](double Payoff::*coord, double bound) {
    std::vector<Payoff> out;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Payoff p = pts[i];
      const Payoff q = pts[(i + 1) % n];
      const bool p_in = p.*coord >= bound;
      const bool q_in = q.*coord >= bound;
      if (p_in) out.push_back(p);
      if (p_in != q_in) {
        const double t = (bound - p.*coord) / (q.*coord - p.*coord);
        Payoff x = p + t * (q - p);
        x.*coord = bound;
        out.push_back(x);
      }
    }
    pts = std::move(out);
  };
  clip(&Payoff::u1, c.u1);
  if (!pts.empty()) clip(&Payoff::u2, c.u2);
  return pts;
}

/// Positive diagonal affine map T(x, y) = (a1 x + b1, a2 y + b2).
struct AffineMap {
  double a1 = 1.0;
  double a2 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;

  static AffineMap identity() { return {}; }

  static AffineMap make(double a1, double a2, double b1, double b2) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "affine scale factors must be positive");
    }
    return {a1, a2, b1, b2};
  }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

inline Payoff apply_map(const AffineMap& m, Payoff p) {
  return {m.a1 * p.u1 + m.b1, m.a2 * p.u2 + m.b2};
}

inline AffineMap invert_map(const AffineMap& m) {
  return {1.0 / m.a1, 1.0 / m.a2, -m.b1 / m.a1, -m.b2 / m.a2};
}

/// (outer o inner)(p) = outer(inner(p)).
inline AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  return {outer.a1 * inner.a1, outer.a2 * inner.a2, outer.a1 * inner.b1 + outer.b1,
          outer.a2 * inner.b2 + outer.b2};
}

/// Scale the componentwise deviation of a payoff (no translation).
inline Payoff scale_only(const AffineMap& m, Payoff d) { return {m.a1 * d.u1, m.a2 * d.u2}; }

inline ConvexPolygon transform(const ConvexPolygon& poly, const AffineMap& m) {
  std::vector<Payoff> pts;
  pts.reserve(poly.size());
  for (const Payoff& v : poly.vertices()) pts.push_back(apply_map(m, v));
  return ConvexPolygon::hull_of(pts);
}

/// Ordered strongly Pareto-optimal boundary sub-chain: u1 strictly
/// decreasing, u2 strictly increasing. A single point is a valid chain.
struct ParetoChain {
  std::vector<Payoff> points;

  bool empty() const { return points.empty(); }
  const Payoff& front() const { return points.front(); }
  const Payoff& back() const { return points.back(); }

  double length() const {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) len += distance(points[i], points[i + 1]);
    return len;
  }

  /// Distance from p to the chain polyline.
  double distance_to(Payoff p) const {
    if (points.size() == 1) return distance(p, points.front());
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      d = std::min(d, segment_distance(p, points[i], points[i + 1]));
    }
    return d;
  }

  /// Closest point on the chain to p.
  Payoff project(Payoff p) const {
    if (points.size() == 1) return points.front();
    Payoff best = points.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const Payoff a = points[i];
      const Payoff d = points[i + 1] - a;
      const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
      const Payoff q = a + t * d;
      const double dist = distance(p, q);
      if (dist < best_d) best_d = dist, best = q;
    }
    return best;
  }
};

/// The strong Pareto chain of a whole polygon (no individual rationality).
inline std::vector<Payoff> strong_pareto_chain(const ConvexPolygon& poly) {
  const std::size_t n = poly.size();
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (poly.edge_kind(i) == EdgeKind::StrongPareto &&
        poly.edge_kind((i + n - 1) % n) != EdgeKind::StrongPareto) {
      first = i;
      break;
    }
  }
  std::vector<Payoff> chain;
  if (first == n) {
    // No strong edge: the undominated corner is the maximizer of u1 + u2.
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const Payoff v = poly.vertex(i);
      const Payoff b = poly.vertex(best);
      if (v.u1 + v.u2 > b.u1 + b.u2) best = i;
    }
    chain.push_back(poly.vertex(best));
    return chain;
  }
  chain.push_back(poly.vertex(first));
  for (std::size_t k = 0; k < n && poly.edge_kind((first + k) % n) == EdgeKind::StrongPareto; ++k) {
    chain.push_back(poly.vertex(first + k + 1));
  }
  return chain;
}

/// Validated, immutable bargaining problem (F, c).
class BargainingProblem {
 public:
  /// Throws DisagreementOutside if c is not in F.
  static BargainingProblem create(ConvexPolygon feasible, Payoff disagreement) {
    if (!is_finite(disagreement)) throw Error(ErrorCode::InvalidArgument, "non-finite disagreement point");
    if (!feasible.contains(disagreement)) {
      throw Error(ErrorCode::DisagreementOutside, "disagreement point lies outside the feasibility set");
    }
    auto chain = std::make_shared<const std::vector<Payoff>>(strong_pareto_chain(feasible));
    return BargainingProblem(std::make_shared<const ConvexPolygon>(std::move(feasible)), std::move(chain),
                             disagreement);
  }

  /// Same feasibility set, different disagreement point (shares the polygon).
  BargainingProblem with_disagreement(Payoff c) const {
    if (!is_finite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite disagreement point");
    if (!feasible_->contains(c)) {
      throw Error(ErrorCode::DisagreementOutside, "disagreement point lies outside the feasibility set");
    }
    return BargainingProblem(feasible_, chain_, c);
  }

  const ConvexPolygon& feasible() const { return *feasible_; }
  Payoff disagreement() const { return disagreement_; }
  /// Strong Pareto chain of the whole feasibility set, ignoring c.
  const std::vector<Payoff>& full_chain() const { return *chain_; }

 private:
  BargainingProblem(std::shared_ptr<const ConvexPolygon> f, std::shared_ptr<const std::vector<Payoff>> chain,
                    Payoff c)
      : feasible_(std::move(f)), chain_(std::move(chain)), disagreement_(c) {}

  std::shared_ptr<const ConvexPolygon> feasible_;
  std::shared_ptr<const std::vector<Payoff>> chain_;
  Payoff disagreement_;
};

inline BargainingProblem make_problem(std::span<const Payoff> vertices, Payoff disagreement) {
  return BargainingProblem::create(ConvexPolygon::from_vertices(vertices), disagreement);
}

inline bool contains(const BargainingProblem& problem, Payoff p) { return problem.feasible().contains(p); }

namespace detail {

inline Payoff lerp_at_u1(Payoff a, Payoff b, double u1) {
  const double t = (u1 - a.u1) / (b.u1 - a.u1);
  return {u1, a.u2 + t * (b.u2 - a.u2)};
}
inline Payoff lerp_at_u2(Payoff a, Payoff b, double u2) {
  const double t = (u2 - a.u2) / (b.u2 - a.u2);
  return {a.u1 + t * (b.u1 - a.u1), u2};
}

/// View of the individually rational part of a full chain: interior chain
/// vertices [lo, hi) plus exact clipped endpoints.
struct ChainView {
  std::span<const Payoff> full;
  std::size_t lo = 0;
  std::size_t hi = 0;
  Payoff first;
  Payoff last;
  bool empty = true;

  std::size_t point_count() const {
    if (empty) return 0;
    return (lo == hi && first == last) ? 1 : (hi - lo) + 2;
  }
  /// k-th point of the clipped chain, first and last included.
  Payoff point(std::size_t k) const {
    if (k == 0) return first;
    if (k + 1 == point_count()) return last;
    return full[lo + k - 1];
  }
};

inline ChainView ir_chain(std::span<const Payoff> chain, Payoff c) {
  ChainView view;
  view.full = chain;
  const std::size_t m = chain.size();
  if (m == 1) {
    if (chain[0].u1 >= c.u1 - kTolerance && chain[0].u2 >= c.u2 - kTolerance) {
      view.first = view.last = chain[0];
      view.empty = false;
    }
    return view;
  }
  // u2 increases along the chain: first index with u2 >= c2.
  const auto s = std::partition_point(chain.begin(), chain.end(), [&](const Payoff& p) { return p.u2 < c.u2; });
  // u1 decreases along the chain: first index with u1 < c1.
  const auto e = std::partition_point(chain.begin(), chain.end(), [&](const Payoff& p) { return p.u1 >= c.u1; });
  const std::size_t si = static_cast<std::size_t>(s - chain.begin());
  const std::size_t ei = static_cast<std::size_t>(e - chain.begin());
  if (si == m || ei == 0) return view;  // chain entirely below or left of c

  const Payoff start = si == 0 ? chain[0] : lerp_at_u2(chain[si - 1], chain[si], c.u2);
  const Payoff end = ei == m ? chain[m - 1] : lerp_at_u1(chain[ei - 1], chain[ei], c.u1);
  if (start.u1 < end.u1 || start.u2 > end.u2) return view;

  // Interior vertices strictly between the clipped endpoints.
  std::size_t lo = si;
  std::size_t hi = ei;
  while (lo < hi && chain[lo] == start) ++lo;
  while (hi > lo && chain[hi - 1] == end) --hi;
  view.lo = lo;
  view.hi = hi;
  view.first = start;
  view.last = end;
  view.empty = false;
  return view;
}

}  // namespace detail

/// Individually rational strong Pareto chain of the problem.
inline ParetoChain pareto_frontier(const BargainingProblem& problem) {
  const detail::ChainView view = detail::ir_chain(problem.full_chain(), problem.disagreement());
  ParetoChain chain;
  chain.points.reserve(view.point_count());
  for (std::size_t k = 0; k < view.point_count(); ++k) chain.points.push_back(view.point(k));
  return chain;
}

/// Coordinatewise maximum over F restricted to {u >= c}.
inline Payoff ideal_point(const BargainingProblem& problem) {
  const detail::ChainView view = detail::ir_chain(problem.full_chain(), problem.disagreement());
  if (view.empty) return problem.disagreement();
  return {view.first.u1, view.last.u2};
}

struct Normalized {
  BargainingProblem problem;
  /// Maps normalized coordinates back to the original ones.
  AffineMap map;
};

/// Affine normalization to c = (0, 0), ideal = (1, 1), with F restricted to
/// the individually rational quadrant.
inline Normalized normalize(const BargainingProblem& problem) {
  const Payoff c = problem.disagreement();
  const Payoff ideal = ideal_point(problem);
  if (ideal.u1 - c.u1 <= kTolerance || ideal.u2 - c.u2 <= kTolerance) {
    throw Error(ErrorCode::DegenerateNormalization, "ideal point does not strictly dominate the disagreement point");
  }
  const AffineMap map = AffineMap::make(ideal.u1 - c.u1, ideal.u2 - c.u2, c.u1, c.u2);
  const AffineMap inverse = invert_map(map);
  std::vector<Payoff> clipped = clip_to_quadrant(problem.feasible(), c);
  for (Payoff& v : clipped) {
    v = apply_map(inverse, v);
    // Snap clip lines onto the axes so the reflecting boundary is exact.
    if (std::abs(v.u1) <= kTolerance) v.u1 = 0.0;
    if (std::abs(v.u2) <= kTolerance) v.u2 = 0.0;
  }
  try {
    return {BargainingProblem::create(ConvexPolygon::hull_of(clipped), Payoff{0.0, 0.0}), map};
  } catch (const Error& e) {
    throw Error(ErrorCode::DegenerateNormalization, e.what());
  }
}

/// The frame map of normalize() without building the normalized polygon.
inline AffineMap normalization_map(const BargainingProblem& problem) {
  const Payoff c = problem.disagreement();
  const Payoff ideal = ideal_point(problem);
  if (ideal.u1 - c.u1 <= kTolerance || ideal.u2 - c.u2 <= kTolerance) {
    throw Error(ErrorCode::DegenerateNormalization, "ideal point does not strictly dominate the disagreement point");
  }
  return AffineMap::make(ideal.u1 - c.u1, ideal.u2 - c.u2, c.u1, c.u2);
}

/// True when c is at the origin and F lies in the closed positive quadrant.
inline bool is_normalized(const BargainingProblem& problem) {
  const auto [lo, hi] = problem.feasible().bounding_box();
  const Payoff c = problem.disagreement();
  return std::abs(c.u1) <= kTolerance && std::abs(c.u2) <= kTolerance && lo.u1 >= -kTolerance &&
         lo.u2 >= -kTolerance;
}

/// True when every reflecting (dominated) edge of a normalized problem lies
/// on a coordinate axis, so that reflection across the axes realizes it.
inline bool reflecting_boundary_on_axes(const ConvexPolygon& poly) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (poly.edge_kind(i) != EdgeKind::Dominated) continue;
    const Payoff a = poly.vertex(i);
    const Payoff b = poly.vertex(i + 1);
    const bool on_u1_axis = std::abs(a.u2) <= kTolerance && std::abs(b.u2) <= kTolerance;
    const bool on_u2_axis = std::abs(a.u1) <= kTolerance && std::abs(b.u1) <= kTolerance;
    if (!on_u1_axis && !on_u2_axis) return false;
  }
  return true;
}

/// Four-quadrant reflection {(x, y) : (|x|, |y|) in F}. The whole outer
/// boundary is absorbing with payoff (|x|, |y|).
struct SymmetricDomain {
  ConvexPolygon boundary;
  ConvexPolygon quadrant;

  static Payoff payoff_at(Payoff p) { return {std::abs(p.u1), std::abs(p.u2)}; }
  bool contains(Payoff p) const { return quadrant.contains(payoff_at(p)); }
};

inline SymmetricDomain symmetrize(const BargainingProblem& problem) {
  if (!is_normalized(problem)) {
    throw Error(ErrorCode::NotNormalized, "symmetrize needs c = (0, 0) and F in the positive quadrant");
  }
  const ConvexPolygon& f = problem.feasible();
  if (!reflecting_boundary_on_axes(f)) {
    throw Error(ErrorCode::NotNormalized, "reflecting boundary does not lie on the coordinate axes");
  }
  std::vector<Payoff> pts;
  pts.reserve(4 * f.size());
  for (const Payoff& v : f.vertices()) {
    pts.push_back({v.u1, v.u2});
    pts.push_back({-v.u1, v.u2});
    pts.push_back({-v.u1, -v.u2});
    pts.push_back({v.u1, -v.u2});
  }
  return {ConvexPolygon::hull_of(pts), f};
}

/// Default sampling of curved presets.
inline constexpr int kDefaultPresetSegments = 512;

/// Vertex lists of the named example sets.
inline std::vector<Payoff> curve_preset(std::string_view name, int n = kDefaultPresetSegments) {
  if (name == "trapezoid") return {{0, 0}, {1, 0}, {1, 0.5}, {0, 1}};
  if (name == "triangle") return {{0, 0}, {1, 0}, {0, 1}};
  if (name == "fig3-left") return {{0, 0}, {1, 0}, {0.7, 0.7}, {0, 1}};
  if (name == "fig3-right") return {{0, 0}, {1, 0}, {0.8, 0.65}, {0.7, 0.7}, {0, 1}};
  if (name == "parabola") {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "parabola preset needs n >= 2 segments");
    std::vector<Payoff> pts;
    pts.reserve(static_cast<std::size_t>(n) + 2);
    pts.push_back({0.0, 0.0});
    for (int k = n; k >= 0; --k) {
      const double x = static_cast<double>(k) / n;
      pts.push_back({x, 1.0 - x * x});
    }
    return pts;
  }
  throw Error(ErrorCode::UnknownPreset, std::string(name));
}

inline constexpr std::array<std::string_view, 5> kPresetNames{"trapezoid", "triangle", "parabola", "fig3-left",
                                                              "fig3-right"};

/// Preset problem with disagreement point (0, 0).
inline BargainingProblem preset_problem(std::string_view name, int n = kDefaultPresetSegments,
                                        Payoff disagreement = {0.0, 0.0}) {
  const std::vector<Payoff> pts = curve_preset(name, n);
  return make_problem(pts, disagreement);
}

}  // namespace fairshare::geometry
