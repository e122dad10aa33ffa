#pragma once

// Reflected random walk of the disagreement point. Walkers move by small
// random steps, bounce specularly off reflecting edges and stop at the first
// crossing of an absorbing edge; the mean stopping payoff estimates S_Delta.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/error.hpp"
#include "fairshare/geometry.hpp"
#include "fairshare/harmonic.hpp"
#include "fairshare/parallel.hpp"
#include "fairshare/random.hpp"
#include "fairshare/solutions.hpp"

namespace fairshare::montecarlo {

using geometry::BargainingProblem;
using geometry::ConvexPolygon;
using geometry::SymmetricDomain;
using solutions::Method;
using solutions::Solution;

enum class StepLaw { UniformAngle, GaussianIsotropic, TwoPointAxis };

constexpr std::string_view to_string(StepLaw v) {
  switch (v) {
    case StepLaw::UniformAngle: return "uniform-angle";
    case StepLaw::GaussianIsotropic: return "gaussian-isotropic";
    case StepLaw::TwoPointAxis: return "two-point-axis";
  }
  return "?";
}

inline StepLaw parse_step_law(std::string_view name) {
  for (StepLaw v : {StepLaw::UniformAngle, StepLaw::GaussianIsotropic, StepLaw::TwoPointAxis}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::UnknownVariant, "unknown step distribution: " + std::string(name));
}

inline constexpr double kMaxStep = 0.05;
inline constexpr int kMaxBounces = 100;

struct WalkConfig {
  double step = 0.01;
  std::size_t walkers = 200000;
  std::uint64_t seed = 0;
  std::uint64_t max_moves = 10000000;
  StepLaw law = StepLaw::UniformAngle;
  unsigned workers = 0;  // 0 = all cores; never changes results
  harmonic::Mode mode = harmonic::Mode::Symmetrized;
  bool weak_pareto_absorbs = false;  // mixed-bc mode only

  void validate() const {
    if (!(step > 0.0 && step <= kMaxStep)) {
      throw Error(ErrorCode::InvalidArgument, "step must lie in (0, 0.05], got " + std::to_string(step));
    }
    if (walkers < 1) throw Error(ErrorCode::InvalidArgument, "walkers must be >= 1");
    if (max_moves < 1) throw Error(ErrorCode::InvalidArgument, "max-moves must be >= 1");
  }
};

struct WalkOutcome {
  Payoff absorbed_at;
  std::uint64_t moves = 0;
};

namespace detail {

/// cos and sin of 2 pi u / 2^64: a 4096-entry table plus a short Taylor
/// series on the remainder (|delta| < 1.6e-3, truncation below 1e-26).
inline Payoff unit_direction(std::uint64_t u) {
  static const auto table = [] {
    std::array<Payoff, 4096> t{};
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double a = 2.0 * M_PI * static_cast<double>(k) / 4096.0;
      t[k] = {std::cos(a), std::sin(a)};
    }
    return t;
  }();
  const Payoff base = table[u >> 52];
  const double d = static_cast<double>(u & ((1ULL << 52) - 1)) * (2.0 * M_PI * 0x1.0p-64);
  const double d2 = d * d;
  const double c = 1.0 - d2 * (0.5 - d2 * (1.0 / 24 - d2 * (1.0 / 720)));
  const double sn = d * (1.0 - d2 * (1.0 / 6 - d2 * (1.0 / 120 - d2 * (1.0 / 5040))));
  return {base.u1 * c - base.u2 * sn, base.u2 * c + base.u1 * sn};
}

}  // namespace detail

/// Step source of one walker. Uniform-angle and two-point moves use one
/// 64-bit word each, four moves per block; Gaussian moves use a block each.
/// The step of move m is a pure function of (seed, walker, m).
class StepStream {
 public:
  StepStream(const WalkConfig& cfg, std::uint64_t walker) : cfg_(cfg), walker_(walker), length_(cfg.step) {}

  Payoff at(std::uint64_t move) {
    if (cfg_.law == StepLaw::GaussianIsotropic) {
      const random::Block b = block(move);
      // |Z| by Box-Muller; E r^2 = step^2 like the other laws.
      const double z = std::sqrt(-2.0 * std::log(random::to_unit_open(b[1]))) * detail::unit_direction(b[2]).u1;
      length_ = cfg_.step * std::abs(z);
      return length_ * detail::unit_direction(b[0]);
    }
    const std::uint64_t u = block(move >> 2)[move & 3];
    if (cfg_.law == StepLaw::UniformAngle) return cfg_.step * detail::unit_direction(u);
    const double s = (u >> 63) ? cfg_.step : -cfg_.step;
    return ((u >> 62) & 1) ? Payoff{s, 0.0} : Payoff{0.0, s};
  }

  /// Length of the last step drawn.
  double length() const { return length_; }

  /// Upper bound on the step length (infinite for unbounded laws).
  double max_length() const {
    return cfg_.law == StepLaw::GaussianIsotropic ? std::numeric_limits<double>::infinity() : cfg_.step;
  }

 private:
  const random::Block& block(std::uint64_t counter) {
    if (counter != counter_ || !valid_) {
      cached_ = random::draw(cfg_.seed, walker_, counter);
      counter_ = counter;
      valid_ = true;
    }
    return cached_;
  }

  const WalkConfig& cfg_;
  std::uint64_t walker_;
  double length_;
  random::Block cached_{};
  std::uint64_t counter_ = 0;
  bool valid_ = false;
};

/// Displacement of move `move` for walker `walker`.
inline Payoff draw_step(const WalkConfig& cfg, std::uint64_t walker, std::uint64_t move) {
  return StepStream(cfg, walker).at(move);
}

/// Convex polygon with per-edge absorbing flags and a cell index that lets
/// most moves skip the edge tests entirely.
class WalkDomain {
 public:
  WalkDomain(ConvexPolygon poly, std::vector<bool> absorbing, bool fold_payoff, double reach)
      : poly_(std::move(poly)), absorbing_(std::move(absorbing)), fold_(fold_payoff), reach_(reach) {
    if (absorbing_.size() != poly_.size()) throw Error(ErrorCode::InvalidArgument, "one flag per edge");
    if (std::none_of(absorbing_.begin(), absorbing_.end(), [](bool b) { return b; })) {
      throw Error(ErrorCode::InvalidArgument, "walk domain has no absorbing edge");
    }
    build_cells();
  }

  /// All edges absorb; payoff (|x|, |y|).
  static WalkDomain symmetric(const SymmetricDomain& d, double reach) {
    return WalkDomain(d.boundary, std::vector<bool>(d.boundary.size(), true), true, reach);
  }

  /// Unsymmetrized quadrant: strong Pareto edges absorb (weak ones too if
  /// asked), the rest reflect.
  static WalkDomain mixed(const ConvexPolygon& f, bool weak_absorbs, double reach) {
    return WalkDomain(f, harmonic::detail::absorbing_edges(f, weak_absorbs), false, reach);
  }

  const ConvexPolygon& polygon() const { return poly_; }
  bool absorbing(std::size_t e) const { return absorbing_[e]; }
  Payoff payoff(Payoff p) const { return fold_ ? SymmetricDomain::payoff_at(p) : p; }

  /// Distance to the nearest absorbing edge (unsigned).
  double absorbing_distance(Payoff p) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < poly_.size(); ++e) {
      if (absorbing_[e]) d = std::min(d, geometry::segment_distance(p, poly_.vertex(e), poly_.vertex(e + 1)));
    }
    return d;
  }

  struct Cell {
    double safe = 0.0;  // every point of the cell is at least this far inside
    std::uint32_t first = 0;
    std::uint32_t count = 0;
  };

  const Cell& cell(Payoff p) const {
    const int i = std::clamp(static_cast<int>((p.u1 - lo_.u1) * inv_size_), 0, n_ - 1);
    const int j = std::clamp(static_cast<int>((p.u2 - lo_.u2) * inv_size_), 0, n_ - 1);
    return cells_[static_cast<std::size_t>(j) * n_ + i];
  }
  double reach() const { return reach_; }
  std::span<const std::uint32_t> candidates(const Cell& c) const { return {edges_.data() + c.first, c.count}; }

 private:
  void build_cells() {
    const auto [lo, hi] = poly_.bounding_box();
    lo_ = lo;
    const double extent = std::max(hi.u1 - lo.u1, hi.u2 - lo.u2);
    n_ = 128;
    size_ = extent / n_ * (1.0 + 1e-9);
    inv_size_ = 1.0 / size_;
    const double half_diag = size_ * M_SQRT1_2;
    cells_.resize(static_cast<std::size_t>(n_) * n_);
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        const Payoff center{lo.u1 + (i + 0.5) * size_, lo.u2 + (j + 0.5) * size_};
        Cell& c = cells_[static_cast<std::size_t>(j) * n_ + i];
        c.first = static_cast<std::uint32_t>(edges_.size());
        c.safe = poly_.inward_distance(center) - half_diag;
        for (std::size_t e = 0; e < poly_.size(); ++e) {
          if (geometry::segment_distance(center, poly_.vertex(e), poly_.vertex(e + 1)) <= reach_ + half_diag) {
            edges_.push_back(static_cast<std::uint32_t>(e));
          }
        }
        c.count = static_cast<std::uint32_t>(edges_.size()) - c.first;
      }
    }
  }

  ConvexPolygon poly_;
  std::vector<bool> absorbing_;
  bool fold_ = false;
  double reach_ = 0.0;
  Payoff lo_;
  double size_ = 1.0;
  double inv_size_ = 1.0;
  int n_ = 1;
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> edges_;
};

namespace detail {

struct Crossing {
  double t = std::numeric_limits<double>::infinity();
  std::size_t edge = 0;
};

/// First edge crossed by x + t*d, t in [0, 1]. Ties prefer absorbing edges.
template <class Edges>
Crossing first_crossing(const WalkDomain& dom, Payoff x, Payoff d, const Edges& edges) {
  const ConvexPolygon& poly = dom.polygon();
  Crossing best;
  for (const auto e : edges) {
    const Payoff n = poly.normal(e);
    const double nd = dot(n, d);
    if (nd <= 0.0) continue;
    const double t = std::max(0.0, (poly.offset(e) - dot(n, x)) / nd);
    if (t > 1.0) continue;
    if (t < best.t || (t == best.t && dom.absorbing(e) && !dom.absorbing(best.edge))) best = {t, e};
  }
  return best;
}

struct AllEdges {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const { return i; }
    It& operator++() { ++i; return *this; }
    bool operator!=(const It& o) const { return i != o.i; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

}  // namespace detail

/// One walker from `start`. Returns the payoff at the first absorbing
/// crossing and the number of proposed moves.
inline WalkOutcome walk_once(const WalkDomain& dom, Payoff start, const WalkConfig& cfg, std::uint64_t walker) {
  const ConvexPolygon& poly = dom.polygon();
  if (poly.inward_distance(start) < -geometry::kTolerance || dom.absorbing_distance(start) <= 1e-12) {
    throw Error(ErrorCode::StartNotInterior, "walk must start strictly inside the absorbing boundary");
  }
  Payoff p = start;
  StepStream steps(cfg, walker);
  const bool bounded = steps.max_length() <= dom.reach();
  std::uint64_t free_moves = 0;  // moves known not to reach the boundary
  for (std::uint64_t move = 0; move < cfg.max_moves; ++move) {
    const Payoff d = steps.at(move);
    if (free_moves > 0) {
      --free_moves;
      p = p + d;
      continue;
    }
    const double len = bounded ? cfg.step : steps.length();
    const auto& cell = dom.cell(p);
    if (len <= cell.safe) {
      // k moves of length <= step stay within k * step of p.
      if (bounded) free_moves = static_cast<std::uint64_t>(cell.safe / len) - 1;
      p = p + d;
      continue;
    }
    // The whole bounced path stays within len of p, so the cell's
    // candidate list covers it when len <= reach.
    const bool local = len <= dom.reach();
    Payoff x = p;
    Payoff rest = d;
    for (int bounce = 0;; ++bounce) {
      const detail::Crossing c = local ? detail::first_crossing(dom, x, rest, dom.candidates(cell))
                                       : detail::first_crossing(dom, x, rest, detail::AllEdges{poly.size()});
      if (c.t > 1.0) {
        x = x + rest;
        break;
      }
      const Payoff hit = x + c.t * rest;
      if (dom.absorbing(c.edge)) return {dom.payoff(hit), move + 1};
      if (bounce == kMaxBounces) {
        x = hit;  // give up on the overshoot, stay on the edge
        break;
      }
      const Payoff n = poly.normal(c.edge);
      Payoff left = (1.0 - c.t) * rest;
      left = left - 2.0 * dot(n, left) * n;
      x = hit;
      rest = left;
    }
    p = x;
  }
  throw Error(ErrorCode::MaxMovesExceeded,
              "walker " + std::to_string(walker) + " not absorbed after " + std::to_string(cfg.max_moves) + " moves");
}

inline WalkOutcome walk_once(const SymmetricDomain& domain, Payoff start, const WalkConfig& cfg, std::uint64_t walker) {
  return walk_once(WalkDomain::symmetric(domain, 2.0 * cfg.step), start, cfg, walker);
}

struct Estimate {
  Solution solution;
  std::vector<WalkOutcome> outcomes;  // original coordinates, by walker index
};

namespace detail {

inline double reach_for(const WalkConfig& cfg) {
  // Gaussian steps are unbounded; long ones fall back to a full edge scan.
  return cfg.law == StepLaw::GaussianIsotropic ? 3.0 * cfg.step : cfg.step;
}

/// Domain in the normalized frame: symmetrized when the reflecting
/// boundary is on the axes, else mixed with weak edges absorbing (the same
/// fallback as the grid solver).
inline std::pair<WalkDomain, bool> walk_domain(const BargainingProblem& normalized, const WalkConfig& cfg) {
  const ConvexPolygon& f = normalized.feasible();
  if (cfg.mode == harmonic::Mode::MixedBc) {
    return {WalkDomain::mixed(f, cfg.weak_pareto_absorbs, reach_for(cfg)), false};
  }
  if (geometry::reflecting_boundary_on_axes(f)) {
    return {WalkDomain::symmetric(geometry::symmetrize(normalized), reach_for(cfg)), false};
  }
  return {WalkDomain::mixed(f, true, reach_for(cfg)), true};
}

}  // namespace detail

/// Mean absorption payoff of cfg.walkers walkers started at c, with the
/// chosen step law. Diagnostics carry per-coordinate standard errors.
inline Estimate estimate_with_outcomes(const BargainingProblem& problem, const WalkConfig& cfg) {
  cfg.validate();
  const geometry::Normalized n = geometry::normalize(problem);
  const auto [dom, fallback] = detail::walk_domain(n.problem, cfg);
  const Payoff start{0.0, 0.0};
  if (dom.absorbing_distance(start) <= 1e-12) {
    throw Error(ErrorCode::StartNotInterior, "disagreement point lies on the absorbing boundary");
  }

  std::vector<WalkOutcome> out(cfg.walkers);
  parallel::for_each_index(cfg.walkers, cfg.workers, [&](std::size_t w) {
    out[w] = walk_once(dom, start, cfg, w);
  });

  const std::size_t m = out.size();
  std::vector<double> a(m), b(m), moves(m);
  for (std::size_t w = 0; w < m; ++w) {
    a[w] = out[w].absorbed_at.u1;
    b[w] = out[w].absorbed_at.u2;
    moves[w] = static_cast<double>(out[w].moves);
  }
  const double mean1 = parallel::pairwise_sum(a) / m;
  const double mean2 = parallel::pairwise_sum(b) / m;
  for (std::size_t w = 0; w < m; ++w) {
    a[w] = (a[w] - mean1) * (a[w] - mean1);
    b[w] = (b[w] - mean2) * (b[w] - mean2);
  }
  const double denom = m > 1 ? static_cast<double>(m - 1) : 1.0;
  const double se1 = std::sqrt(parallel::pairwise_sum(a) / denom / m);
  const double se2 = std::sqrt(parallel::pairwise_sum(b) / denom / m);

  Estimate est;
  est.solution.payoff = geometry::apply_map(n.map, {mean1, mean2});
  est.solution.method = Method::SDeltaMC;
  est.solution.diagnostics = {{"stderr1", std::abs(n.map.a1) * se1},
                              {"stderr2", std::abs(n.map.a2) * se2},
                              {"walkers", static_cast<double>(m)},
                              {"step", cfg.step},
                              {"mean-moves", parallel::pairwise_sum(moves) / m}};
  if (fallback) est.solution.diagnostics["mixed-fallback"] = 1.0;
  for (auto& o : out) o.absorbed_at = geometry::apply_map(n.map, o.absorbed_at);
  est.outcomes = std::move(out);
  return est;
}

inline Solution estimate_s_delta_mc(const BargainingProblem& problem, const WalkConfig& cfg) {
  return estimate_with_outcomes(problem, cfg).solution;
}

inline Solution step_distribution_variant(const BargainingProblem& problem, WalkConfig cfg, std::string_view variant) {
  cfg.law = parse_step_law(variant);
  return estimate_with_outcomes(problem, cfg).solution;
}

/// Per-walker dump: walker, u1, u2, moves.
inline void write_walkers_csv(std::ostream& out, const std::vector<WalkOutcome>& outcomes) {
  out << "walker,u1,u2,moves\n";
  char buf[128];
  for (std::size_t w = 0; w < outcomes.size(); ++w) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%llu\n", w, outcomes[w].absorbed_at.u1, outcomes[w].absorbed_at.u2,
                  static_cast<unsigned long long>(outcomes[w].moves));
    out << buf;
  }
}

}  // namespace fairshare::montecarlo
