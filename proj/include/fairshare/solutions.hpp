#pragma once

// Canonical two-player bargaining solutions on polygonal problems.

#include <cmath>
#include <limits>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/error.hpp"
#include "fairshare/geometry.hpp"

namespace fairshare::solutions {

using geometry::BargainingProblem;

enum class Method { Nash, KalaiSmorodinsky, Egalitarian, EqualLoss, YuLp, SDelta, SDeltaMC, IteratedSDelta };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::Nash: return "nash";
    case Method::KalaiSmorodinsky: return "ks";
    case Method::Egalitarian: return "egalitarian";
    case Method::EqualLoss: return "equal-loss";
    case Method::YuLp: return "yu-lp";
    case Method::SDelta: return "s-delta";
    case Method::SDeltaMC: return "s-delta-mc";
    case Method::IteratedSDelta: return "iterated-s-delta";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (Method m : {Method::Nash, Method::KalaiSmorodinsky, Method::Egalitarian, Method::EqualLoss, Method::YuLp,
                   Method::SDelta, Method::SDeltaMC, Method::IteratedSDelta}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::UnknownSolver, std::string(name));
}

struct Solution {
  Payoff payoff;
  Method method = Method::Nash;
  std::map<std::string, double> diagnostics;

  double diagnostic(const std::string& key, double fallback = std::numeric_limits<double>::quiet_NaN()) const {
    const auto it = diagnostics.find(key);
    return it == diagnostics.end() ? fallback : it->second;
  }
};

namespace detail {

inline double nash_product(Payoff p, Payoff c) { return (p.u1 - c.u1) * (p.u2 - c.u2); }

/// Maximizer of the Nash product on the segment [a, b]; the product is a
/// concave quadratic in the edge parameter when the edge slopes down.
inline Payoff nash_on_edge(Payoff a, Payoff b, Payoff c) {
  const Payoff d = b - a;
  const double curvature = 2.0 * d.u1 * d.u2;
  double t = 0.0;
  if (curvature < 0.0) {
    t = -(d.u1 * (a.u2 - c.u2) + d.u2 * (a.u1 - c.u1)) / curvature;
    t = std::clamp(t, 0.0, 1.0);
  } else {
    t = nash_product(b, c) > nash_product(a, c) ? 1.0 : 0.0;
  }
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return a + t * d;
}

/// Larger product wins; ties go to larger u1, then larger u2.
inline bool nash_better(Payoff p, Payoff q, Payoff c) {
  const double pp = nash_product(p, c);
  const double pq = nash_product(q, c);
  if (pp != pq) return pp > pq;
  if (p.u1 != q.u1) return p.u1 > q.u1;
  return p.u2 > q.u2;
}

/// First index k in [0, count) with pred(k) true, for a monotone predicate
/// (false ... false true ... true); count when none holds.
template <class Pred>
std::size_t first_true(std::size_t count, Pred pred) {
  std::size_t lo = 0;
  std::size_t hi = count;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

/// Point of the chain where the monotone increasing function f crosses
/// zero, by bisection over vertices and an exact solve on the edge.
/// Returns nullopt when f has no sign change.
template <class F>
std::optional<Payoff> chain_root(const geometry::detail::ChainView& view, F f) {
  const std::size_t m = view.point_count();
  if (m == 0) return std::nullopt;
  if (m == 1) return f(view.point(0)) == 0.0 ? std::optional<Payoff>(view.point(0)) : std::nullopt;
  if (f(view.point(0)) > 0.0 || f(view.point(m - 1)) < 0.0) return std::nullopt;
  const std::size_t k = first_true(m, [&](std::size_t i) { return f(view.point(i)) >= 0.0; });
  const Payoff b = view.point(k);
  const double fb = f(b);
  if (fb == 0.0 || k == 0) return b;
  const Payoff a = view.point(k - 1);
  const double fa = f(a);
  return a + (fa / (fa - fb)) * (b - a);
}

inline void require_room(const BargainingProblem& problem) { (void)geometry::normalization_map(problem); }

}  // namespace detail

/// Maximizes (u1 - c1)(u2 - c2) over the individually rational Pareto chain.
inline Solution nash(const BargainingProblem& problem) {
  const Payoff c = problem.disagreement();
  const auto view = geometry::detail::ir_chain(problem.full_chain(), c);
  const std::size_t m = view.point_count();
  Solution s{view.point(0), Method::Nash, {}};
  if (m >= 2) {
    // Vertex products are unimodal along the chain (log-concave product).
    const std::size_t k = detail::first_true(
        m - 1, [&](std::size_t i) { return detail::nash_product(view.point(i), c) >= detail::nash_product(view.point(i + 1), c); });
    const std::size_t e_lo = k >= 2 ? k - 2 : 0;
    const std::size_t e_hi = std::min(m - 2, k + 1);
    for (std::size_t e = e_lo; e <= e_hi; ++e) {
      const Payoff p = detail::nash_on_edge(view.point(e), view.point(e + 1), c);
      if (detail::nash_better(p, s.payoff, c)) s.payoff = p;
    }
  }
  s.diagnostics["product"] = detail::nash_product(s.payoff, c);
  return s;
}

/// Intersection of the segment from c to the ideal point with the frontier.
inline Solution kalai_smorodinsky(const BargainingProblem& problem) {
  detail::require_room(problem);
  const Payoff c = problem.disagreement();
  const Payoff ideal = geometry::ideal_point(problem);
  const Payoff d = ideal - c;
  const auto view = geometry::detail::ir_chain(problem.full_chain(), c);
  Solution s{c, Method::KalaiSmorodinsky, {{"weak-pareto-hit", 0.0}}};
  if (auto hit = detail::chain_root(view, [&](Payoff p) { return cross(d, p - c); })) {
    s.payoff = *hit;
  } else {
    const auto exit = problem.feasible().ray_exit(c, d);
    s.payoff = c + std::min(exit.t, 1.0) * d;
    if (problem.feasible().edge_kind(exit.edge) == geometry::EdgeKind::WeakPareto) {
      s.diagnostics["weak-pareto-hit"] = 1.0;
    }
  }
  return s;
}

/// c + (t, t) with t maximal such that the point stays feasible.
inline Solution egalitarian(const BargainingProblem& problem) {
  const Payoff c = problem.disagreement();
  const auto exit = problem.feasible().ray_exit(c, {1.0, 1.0});
  Solution s{c + exit.t * Payoff{1.0, 1.0}, Method::Egalitarian, {{"t", exit.t}}};
  return s;
}

/// Chain point with equal losses from the ideal point.
inline Solution equal_loss(const BargainingProblem& problem) {
  detail::require_room(problem);
  const Payoff c = problem.disagreement();
  const Payoff ideal = geometry::ideal_point(problem);
  const double gap = ideal.u2 - ideal.u1;
  const auto view = geometry::detail::ir_chain(problem.full_chain(), c);
  Solution s{view.point(0), Method::EqualLoss, {{"clamped", 0.0}}};
  const auto f = [&](Payoff p) { return (p.u2 - p.u1) - gap; };
  if (auto hit = detail::chain_root(view, f)) {
    s.payoff = *hit;
  } else {
    const Payoff first = view.point(0);
    const Payoff last = view.point(view.point_count() - 1);
    s.payoff = std::abs(f(first)) <= std::abs(f(last)) ? first : last;
    s.diagnostics["clamped"] = 1.0;
  }
  return s;
}

/// Search tolerance for yu_lp in the arc-length fraction of the chain.
inline constexpr double kChainTolerance = 1e-10;

/// Feasible point minimizing the l_p distance to the ideal point
/// (p = infinity allowed). The objective is quasiconvex along the chain, so
/// the sign of its directional derivative changes once; both ends of the
/// zero-slope set are bracketed by bisection and their midpoint returned.
inline Solution yu_lp(const BargainingProblem& problem, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must be >= 1");
  detail::require_room(problem);
  const Payoff ideal = geometry::ideal_point(problem);
  const auto view = geometry::detail::ir_chain(problem.full_chain(), problem.disagreement());
  const std::size_t m = view.point_count();

  Solution s{view.point(0), Method::YuLp, {{"p", p}}};
  if (m < 2) return s;

  std::vector<double> cumulative(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) cumulative[k] = cumulative[k - 1] + distance(view.point(k - 1), view.point(k));
  const double total = cumulative.back();
  // Edge index and point at arc-length fraction tau; vertices belong to the edge on their right.
  const auto locate = [&](double tau) {
    const double target = tau * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), 1, m - 1);
    const double len = cumulative[k] - cumulative[k - 1];
    const double t = len > 0.0 ? std::clamp((target - cumulative[k - 1]) / len, 0.0, 1.0) : 0.0;
    return std::pair{k - 1, view.point(k - 1) + t * (view.point(k) - view.point(k - 1))};
  };
  // Right derivative of the l_p distance along the chain, up to a positive factor.
  const auto slope = [&](double tau) {
    const auto [e, u] = locate(tau);
    const Payoff d = view.point(e + 1) - view.point(e);
    const double l1 = std::max(0.0, ideal.u1 - u.u1);
    const double l2 = std::max(0.0, ideal.u2 - u.u2);
    if (std::isinf(p)) return l1 > l2 ? -d.u1 : (l1 < l2 ? -d.u2 : std::max(-d.u1, -d.u2));
    const double big = std::max(l1, l2);
    if (big <= 0.0) return 0.0;
    return -(std::pow(l1 / big, p - 1.0) * d.u1 + std::pow(l2 / big, p - 1.0) * d.u2);
  };
  const auto boundary = [&](auto pred) {
    double lo = 0.0;
    double hi = 1.0;
    if (pred(lo)) return lo;
    if (!pred(hi)) return hi;
    int iterations = 0;
    while (hi - lo > kChainTolerance && iterations < 200) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? hi : lo) = mid;
      ++iterations;
    }
    return 0.5 * (lo + hi);
  };
  const double start = boundary([&](double tau) { return slope(tau) >= 0.0; });
  const double end = boundary([&](double tau) { return slope(tau) > 0.0; });
  s.payoff = locate(0.5 * (start + end)).second;
  const double l1 = std::max(0.0, ideal.u1 - s.payoff.u1);
  const double l2 = std::max(0.0, ideal.u2 - s.payoff.u2);
  s.diagnostics["distance"] = std::isinf(p) ? std::max(l1, l2) : std::pow(std::pow(l1, p) + std::pow(l2, p), 1.0 / p);
  return s;
}

}  // namespace fairshare::solutions
