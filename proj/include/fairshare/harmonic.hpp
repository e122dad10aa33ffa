#pragma once

// Finite-difference harmonic extension of Pareto payoffs.
//
// The solver works on an arbitrary convex polygon with per-edge boundary
// conditions: Dirichlet (absorbing, data g(x, y)) or homogeneous Neumann
// (reflecting). Nodes sit at integer multiples of h, so the origin is a node.
// Cut cells use Shortley-Weller arms; a Neumann arm keeps its length but
// carries no flux, which reproduces an exact mirror for nodes on an axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fairshare/error.hpp"
#include "fairshare/geometry.hpp"
#include "fairshare/solutions.hpp"

namespace fairshare::harmonic {

using geometry::BargainingProblem;
using geometry::ConvexPolygon;
using solutions::Method;
using solutions::Solution;

enum class Mode { Symmetrized, MixedBc };

enum class NodeKind : std::uint8_t { Exterior, Interior, Dirichlet };

inline constexpr double kDefaultSpacing = 1.0 / 256;

struct GridSpec {
  double h = kDefaultSpacing;
  Payoff lo;  // filled in by the solver: grid box including one ghost cell
  Payoff hi;

  static GridSpec with_spacing(double h) {
    if (!(h > 0.0) || h > 0.1) throw Error(ErrorCode::InvalidArgument, "grid spacing must lie in (0, 0.1]");
    return {h, {}, {}};
  }
};

struct SolveOptions {
  Mode mode = Mode::Symmetrized;
  bool weak_pareto_absorbs = false;  // mixed-bc only
  double omega = 0.0;                // 0 selects 2 / (1 + sin(pi h / L))
  double tolerance = 1e-10;          // max-norm of the scaled residual
  long max_sweeps = 1'000'000;
  bool nested = true;                // coarse-grid initial guess
  bool full_domain = false;          // symmetrized: solve all four quadrants literally
};

struct SolveStats {
  long sweeps = 0;
  double residual = 0.0;
  double omega = 0.0;
  std::size_t unknowns = 0;
};

/// Node lattice {((i0 + i) h, (j0 + j) h)} with node classification.
struct Grid {
  double h = kDefaultSpacing;
  long i0 = 0;
  long j0 = 0;
  int nx = 0;
  int ny = 0;
  std::vector<NodeKind> kind;
  ConvexPolygon domain;       // polygon the grid was built on
  bool mirrored = false;      // values at (x, y) are read at (|x|, |y|)
  ConvexPolygon full_domain;  // four-quadrant polygon when mirrored

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Payoff position(int i, int j) const { return {static_cast<double>(i0 + i) * h, static_cast<double>(j0 + j) * h}; }
  NodeKind kind_at(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return NodeKind::Exterior;
    return kind[index(i, j)];
  }
  const ConvexPolygon& outer() const { return mirrored ? full_domain : domain; }
};

/// One scalar field on a shared grid.
class HarmonicField {
 public:
  HarmonicField() = default;
  HarmonicField(std::shared_ptr<const Grid> grid, std::vector<double> values, double data_min, double data_max)
      : grid_(std::move(grid)), values_(std::move(values)), data_min_(data_min), data_max_(data_max) {}

  /// Samples f on every non-exterior node of a grid over the polygon.
  static HarmonicField sample(const ConvexPolygon& domain, double h, const std::function<double(Payoff)>& f);

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  double h() const { return grid_->h; }
  GridSpec spec() const {
    const Grid& g = *grid_;
    return {g.h, g.position(0, 0), g.position(g.nx - 1, g.ny - 1)};
  }
  double node(int i, int j) const { return values_[grid_->index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  /// Range of the Dirichlet data imposed (nodes and cut-cell arms).
  double data_min() const { return data_min_; }
  double data_max() const { return data_max_; }

  /// Bilinear interpolation; nullopt when a contributing node is exterior.
  std::optional<double> bilinear(Payoff p) const {
    const Cell c = locate(p);
    const double w[2][2] = {{(1 - c.s) * (1 - c.t), c.s * (1 - c.t)}, {(1 - c.s) * c.t, c.s * c.t}};
    double sum = 0.0;
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        if (w[b][a] == 0.0) continue;
        if (grid_->kind_at(c.i + a, c.j + b) == NodeKind::Exterior) return std::nullopt;
        sum += w[b][a] * node(c.i + a, c.j + b);
      }
    }
    return sum;
  }

  /// Catmull-Rom bicubic interpolation; nullopt when a contributing node is exterior.
  std::optional<double> bicubic(Payoff p) const {
    const Cell c = locate(p);
    const auto weights = [](double s) {
      return std::array<double, 4>{0.5 * (-s + 2 * s * s - s * s * s), 0.5 * (2 - 5 * s * s + 3 * s * s * s),
                                   0.5 * (s + 4 * s * s - 3 * s * s * s), 0.5 * (-s * s + s * s * s)};
    };
    const auto wx = weights(c.s);
    const auto wy = weights(c.t);
    double sum = 0.0;
    for (int b = 0; b < 4; ++b) {
      if (wy[b] == 0.0) continue;
      for (int a = 0; a < 4; ++a) {
        if (wx[a] == 0.0) continue;
        const int i = c.i + a - 1;
        const int j = c.j + b - 1;
        if (grid_->kind_at(i, j) == NodeKind::Exterior) return std::nullopt;
        sum += wx[a] * wy[b] * node(i, j);
      }
    }
    return sum;
  }

  /// Bicubic where the stencil fits, bilinear otherwise.
  std::optional<double> smooth(Payoff p) const {
    if (auto v = bicubic(p)) return v;
    return bilinear(p);
  }

  /// Bilinear value; throws InvalidArgument outside the evaluable region.
  double at(Payoff p) const {
    if (auto v = bilinear(p)) return *v;
    throw Error(ErrorCode::InvalidArgument, "field evaluated outside its grid domain");
  }

 private:
  struct Cell {
    int i, j;
    double s, t;
  };
  Cell locate(Payoff p) const {
    const Grid& g = *grid_;
    if (g.mirrored) p = geometry::SymmetricDomain::payoff_at(p);
    const double fx = p.u1 / g.h - static_cast<double>(g.i0);
    const double fy = p.u2 / g.h - static_cast<double>(g.j0);
    const double ix = std::floor(fx);
    const double iy = std::floor(fy);
    return {static_cast<int>(ix), static_cast<int>(iy), fx - ix, fy - iy};
  }

  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
  double data_min_ = 0.0;
  double data_max_ = 0.0;
};

struct FieldPair {
  HarmonicField phi1;
  HarmonicField phi2;
  SolveStats stats;
  Mode mode = Mode::Symmetrized;

  Payoff at(Payoff p) const { return {phi1.at(p), phi2.at(p)}; }
};

namespace detail {

/// Linear boundary-value problem on a polygon.
struct BoundaryProblem {
  ConvexPolygon domain;
  std::vector<bool> dirichlet;                // per edge
  std::function<Payoff(Payoff)> data;         // (g1, g2) on Dirichlet edges
  double length_scale = 1.0;                  // for the automatic relaxation factor
};

inline Grid make_grid(const ConvexPolygon& domain, const std::vector<bool>& dirichlet, double h) {
  Grid g;
  g.h = h;
  g.domain = domain;
  const auto [lo, hi] = domain.bounding_box();
  g.i0 = static_cast<long>(std::floor(lo.u1 / h)) - 1;
  g.j0 = static_cast<long>(std::floor(lo.u2 / h)) - 1;
  g.nx = static_cast<int>(static_cast<long>(std::ceil(hi.u1 / h)) + 1 - g.i0 + 1);
  g.ny = static_cast<int>(static_cast<long>(std::ceil(hi.u2 / h)) + 1 - g.j0 + 1);
  g.kind.assign(static_cast<std::size_t>(g.nx) * g.ny, NodeKind::Exterior);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Payoff p = g.position(i, j);
      const double d = domain.inward_distance(p);
      if (d < -geometry::kTolerance) continue;
      NodeKind k = NodeKind::Interior;
      if (d <= geometry::kTolerance) {
        for (std::size_t e = 0; e < domain.size(); ++e) {
          if (dirichlet[e] && geometry::segment_distance(p, domain.vertex(e), domain.vertex(e + 1)) <= geometry::kTolerance) {
            k = NodeKind::Dirichlet;
            break;
          }
        }
      }
      g.kind[g.index(i, j)] = k;
    }
  }
  return g;
}

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  std::size_t edge = 0;
};

/// Boundary exit along d from p; at ties (a vertex) Dirichlet edges win.
inline Hit exit_along(const ConvexPolygon& poly, const std::vector<bool>& dirichlet, Payoff p, Payoff d) {
  Hit best;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double nd = dot(poly.normal(i), d);
    if (nd <= 0.0) continue;
    const double t = std::max(0.0, (poly.offset(i) - dot(poly.normal(i), p)) / nd);
    if (t < best.t - 1e-14) {
      best = {t, i};
    } else if (std::abs(t - best.t) <= 1e-14 && dirichlet[i] && !dirichlet[best.edge]) {
      best.edge = i;
    }
  }
  return best;
}

/// Sparse row of the discrete operator at one unknown node.
struct Row {
  double diag = 0.0;
  int count = 0;
  std::uint32_t nbr[4] = {0, 0, 0, 0};
  double coef[4] = {0, 0, 0, 0};
  Payoff rhs;
};

struct System {
  std::vector<Row> rows;
  std::vector<std::size_t> node_of;  // unknown -> grid index
  std::vector<std::uint32_t> red, black;
  double data_min1 = std::numeric_limits<double>::infinity(), data_max1 = -data_min1;
  double data_min2 = data_min1, data_max2 = data_max1;
};

inline System assemble(const Grid& g, const BoundaryProblem& bp, std::vector<Payoff>& dirichlet_values) {
  System sys;
  const std::size_t n = g.kind.size();
  std::vector<std::uint32_t> unknown(n, std::numeric_limits<std::uint32_t>::max());
  dirichlet_values.assign(n, {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
  const auto note_data = [&sys](Payoff v) {
    sys.data_min1 = std::min(sys.data_min1, v.u1);
    sys.data_max1 = std::max(sys.data_max1, v.u1);
    sys.data_min2 = std::min(sys.data_min2, v.u2);
    sys.data_max2 = std::max(sys.data_max2, v.u2);
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (g.kind[k] == NodeKind::Dirichlet) {
        dirichlet_values[k] = bp.data(g.position(i, j));
        note_data(dirichlet_values[k]);
      } else if (g.kind[k] == NodeKind::Interior) {
        unknown[k] = static_cast<std::uint32_t>(sys.node_of.size());
        sys.node_of.push_back(k);
      }
    }
  }
  sys.rows.resize(sys.node_of.size());

  struct Arm {
    double len;
    int type;  // 0 unknown node, 1 constant value, 2 no flux
    std::uint32_t node;
    Payoff value;
  };
  const int di[4] = {-1, 1, 0, 0};
  const int dj[4] = {0, 0, -1, 1};
  for (std::uint32_t u = 0; u < sys.node_of.size(); ++u) {
    const std::size_t k = sys.node_of[u];
    const int i = static_cast<int>(k % g.nx);
    const int j = static_cast<int>(k / g.nx);
    const Payoff p = g.position(i, j);
    Arm arms[4];
    for (int a = 0; a < 4; ++a) {
      const int ni = i + di[a];
      const int nj = j + dj[a];
      const NodeKind nk = g.kind_at(ni, nj);
      if (nk == NodeKind::Interior) {
        arms[a] = {g.h, 0, unknown[g.index(ni, nj)], {}};
      } else if (nk == NodeKind::Dirichlet) {
        arms[a] = {g.h, 1, 0, dirichlet_values[g.index(ni, nj)]};
      } else {
        const Payoff d{static_cast<double>(di[a]), static_cast<double>(dj[a])};
        const Hit hit = exit_along(g.domain, bp.dirichlet, p, d);
        const double t = std::min(hit.t, g.h);
        if (bp.dirichlet[hit.edge] && t > geometry::kTolerance) {
          const Payoff v = bp.data(p + t * d);
          note_data(v);
          arms[a] = {t, 1, 0, v};
        } else {
          arms[a] = {t, 2, 0, {}};
        }
      }
    }
    Row& row = sys.rows[u];
    for (int axis = 0; axis < 2; ++axis) {
      const Arm& m = arms[2 * axis];
      const Arm& q = arms[2 * axis + 1];
      const double span = m.len + q.len;
      if (span <= 0.0) continue;
      for (const Arm* arm : {&m, &q}) {
        if (arm->type == 2) continue;
        const double c = 2.0 / (span * arm->len);
        row.diag += c;
        if (arm->type == 0) {
          row.nbr[row.count] = arm->node;
          row.coef[row.count] = c;
          ++row.count;
        } else {
          row.rhs = row.rhs + c * arm->value;
        }
      }
    }
    if (row.diag <= 0.0) throw Error(ErrorCode::NoConvergence, "node without absorbing connection");
    ((i + j) % 2 == 0 ? sys.red : sys.black).push_back(u);
  }
  return sys;
}

inline double relaxation_factor(double h, double length_scale) {
  return 2.0 / (1.0 + std::sin(M_PI * h / length_scale));
}

/// Red-black SOR on both right-hand sides; returns the final stats.
inline SolveStats sor(const System& sys, std::vector<Payoff>& x, double omega, double tol, long max_sweeps) {
  SolveStats st;
  st.omega = omega;
  st.unknowns = sys.rows.size();
  if (sys.rows.empty()) return st;
  double best = std::numeric_limits<double>::infinity();
  long best_sweep = 0;
  const auto relax = [&](const std::vector<std::uint32_t>& color, double w) {
    double worst = 0.0;
    for (std::uint32_t u : color) {
      const Row& r = sys.rows[u];
      Payoff acc = r.rhs;
      for (int k = 0; k < r.count; ++k) acc = acc + r.coef[k] * x[r.nbr[k]];
      const Payoff res = (1.0 / r.diag) * acc - x[u];
      worst = std::max({worst, std::abs(res.u1), std::abs(res.u2)});
      x[u] = x[u] + w * res;
    }
    return worst;
  };
  while (st.sweeps < max_sweeps) {
    const double r = std::max(relax(sys.red, omega), relax(sys.black, omega));
    ++st.sweeps;
    if (!std::isfinite(r)) throw Error(ErrorCode::NoConvergence, "SOR diverged");
    if (r <= tol) {
      // Confirm with a pure residual pass (omega = 0 leaves x unchanged).
      const double check = std::max(relax(sys.red, 0.0), relax(sys.black, 0.0));
      if (check <= tol) {
        st.residual = check;
        return st;
      }
    }
    if (r < 0.5 * best) {
      best = r;
      best_sweep = st.sweeps;
    } else if (st.sweeps - best_sweep > 50'000) {
      throw Error(ErrorCode::NoConvergence, "SOR residual stagnated at " + std::to_string(best));
    }
  }
  throw Error(ErrorCode::NoConvergence, "SOR reached the sweep limit");
}

/// Weighted average over available cell corners; used for coarse-to-fine guesses.
inline std::optional<Payoff> robust_value(const Grid& g, const std::vector<Payoff>& values, Payoff p) {
  const double fx = p.u1 / g.h - static_cast<double>(g.i0);
  const double fy = p.u2 / g.h - static_cast<double>(g.j0);
  const int i = static_cast<int>(std::floor(fx));
  const int j = static_cast<int>(std::floor(fy));
  const double s = fx - i;
  const double t = fy - j;
  Payoff sum;
  double wsum = 0.0;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      if (g.kind_at(i + a, j + b) == NodeKind::Exterior) continue;
      const double w = (a ? s : 1 - s) * (b ? t : 1 - t) + 1e-12;
      sum = sum + w * values[g.index(i + a, j + b)];
      wsum += w;
    }
  }
  if (wsum == 0.0) return std::nullopt;
  return (1.0 / wsum) * sum;
}

struct GridSolution {
  std::shared_ptr<const Grid> grid;
  std::vector<Payoff> values;  // per node, NaN on exterior
  System system;
  SolveStats stats;
};

inline GridSolution solve_grid(const BoundaryProblem& bp, double h, const SolveOptions& opt, double tol) {
  auto grid = std::make_shared<Grid>(make_grid(bp.domain, bp.dirichlet, h));
  GridSolution out;
  std::vector<Payoff> node_values;
  out.system = assemble(*grid, bp, node_values);
  const System& sys = out.system;

  std::vector<Payoff> x(sys.rows.size());
  const auto [lo, hi] = bp.domain.bounding_box();
  const double extent = std::max(hi.u1 - lo.u1, hi.u2 - lo.u2);
  std::optional<GridSolution> coarse;
  if (opt.nested && 2.0 * h * 8.0 <= extent) coarse = solve_grid(bp, 2.0 * h, opt, std::max(tol, 1e-8));
  for (std::size_t u = 0; u < x.size(); ++u) {
    const std::size_t k = sys.node_of[u];
    const Payoff p = grid->position(static_cast<int>(k % grid->nx), static_cast<int>(k / grid->nx));
    std::optional<Payoff> guess;
    if (coarse) guess = robust_value(*coarse->grid, coarse->values, p);
    x[u] = guess ? *guess : bp.data(p);
  }
  const double omega = opt.omega > 0.0 ? opt.omega : relaxation_factor(h, bp.length_scale);
  out.stats = sor(sys, x, omega, tol, opt.max_sweeps);
  for (std::size_t u = 0; u < x.size(); ++u) node_values[sys.node_of[u]] = x[u];
  out.values = std::move(node_values);
  out.grid = std::move(grid);
  return out;
}

inline FieldPair to_fields(GridSolution&& sol, Mode mode) {
  std::vector<double> v1(sol.values.size());
  std::vector<double> v2(sol.values.size());
  for (std::size_t k = 0; k < sol.values.size(); ++k) {
    v1[k] = sol.values[k].u1;
    v2[k] = sol.values[k].u2;
  }
  const System& s = sol.system;
  return {HarmonicField(sol.grid, std::move(v1), s.data_min1, s.data_max1),
          HarmonicField(sol.grid, std::move(v2), s.data_min2, s.data_max2), sol.stats, mode};
}

inline bool is_unit_normalized(const BargainingProblem& problem) {
  if (!geometry::is_normalized(problem)) return false;
  const Payoff ideal = geometry::ideal_point(problem);
  return std::abs(ideal.u1 - 1.0) <= 1e-9 && std::abs(ideal.u2 - 1.0) <= 1e-9;
}

/// Boundary rule: reflect on dominated edges, and on weak-Pareto edges
/// unless they absorb.
inline std::vector<bool> absorbing_edges(const ConvexPolygon& poly, bool weak_absorbs) {
  std::vector<bool> d(poly.size());
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const auto kind = poly.edge_kind(e);
    d[e] = kind == geometry::EdgeKind::StrongPareto || (weak_absorbs && kind == geometry::EdgeKind::WeakPareto);
  }
  return d;
}

inline Payoff identity_data(Payoff p) { return p; }

}  // namespace detail

inline HarmonicField HarmonicField::sample(const ConvexPolygon& domain, double h,
                                           const std::function<double(Payoff)>& f) {
  auto grid = std::make_shared<Grid>(detail::make_grid(domain, std::vector<bool>(domain.size(), false), h));
  std::vector<double> v(grid->kind.size(), std::numeric_limits<double>::quiet_NaN());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      if (grid->kind_at(i, j) == NodeKind::Exterior) continue;
      const double value = f(grid->position(i, j));
      v[grid->index(i, j)] = value;
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
  }
  return HarmonicField(std::move(grid), std::move(v), lo, hi);
}

/// Solves the two Laplace problems for a normalized problem.
inline FieldPair solve_harmonic(const BargainingProblem& problem, const GridSpec& spec = {},
                                const SolveOptions& opt = {}) {
  (void)GridSpec::with_spacing(spec.h);
  if (!detail::is_unit_normalized(problem)) {
    throw Error(ErrorCode::NotNormalized, "solve_harmonic needs c = (0, 0) and ideal point (1, 1)");
  }
  const ConvexPolygon& f = problem.feasible();
  detail::BoundaryProblem bp;
  if (opt.mode == Mode::MixedBc) {
    bp = {f, detail::absorbing_edges(f, opt.weak_pareto_absorbs), detail::identity_data, 2.0};
    return detail::to_fields(detail::solve_grid(bp, spec.h, opt, opt.tolerance), opt.mode);
  }
  const geometry::SymmetricDomain sym = geometry::symmetrize(problem);
  if (opt.full_domain) {
    bp = {sym.boundary, std::vector<bool>(sym.boundary.size(), true),
          [](Payoff p) { return geometry::SymmetricDomain::payoff_at(p); }, 2.0};
    return detail::to_fields(detail::solve_grid(bp, spec.h, opt, opt.tolerance), opt.mode);
  }
  // One quadrant: axis edges reflect (the mirror), every other edge absorbs.
  std::vector<bool> absorbing(f.size());
  for (std::size_t e = 0; e < f.size(); ++e) absorbing[e] = f.edge_kind(e) != geometry::EdgeKind::Dominated;
  bp = {f, absorbing, detail::identity_data, 2.0};
  detail::GridSolution sol = detail::solve_grid(bp, spec.h, opt, opt.tolerance);
  auto grid = std::make_shared<Grid>(*sol.grid);
  grid->mirrored = true;
  grid->full_domain = sym.boundary;
  sol.grid = std::move(grid);
  return detail::to_fields(std::move(sol), opt.mode);
}

namespace detail {

/// Laplace problem on the normalized, individually rational part of F.
/// Symmetrizable problems (reflecting boundary on the axes) take the
/// requested mode; the rest reflect on dominated edges only.
inline std::pair<FieldPair, bool> solve_normalized(const BargainingProblem& normalized, const GridSpec& spec,
                                                   const SolveOptions& opt) {
  if (opt.mode == Mode::MixedBc || geometry::reflecting_boundary_on_axes(normalized.feasible())) {
    return {solve_harmonic(normalized, spec, opt), false};
  }
  SolveOptions fallback = opt;
  fallback.mode = Mode::MixedBc;
  fallback.weak_pareto_absorbs = true;
  return {solve_harmonic(normalized, spec, fallback), true};
}

}  // namespace detail

/// S_Delta by the finite-difference route.
inline Solution s_delta(const BargainingProblem& problem, const GridSpec& spec = {}, const SolveOptions& opt = {}) {
  const geometry::Normalized n = geometry::normalize(problem);
  auto [fields, fallback] = detail::solve_normalized(n.problem, spec, opt);
  const Payoff origin = fields.at({0.0, 0.0});
  Solution s{geometry::apply_map(n.map, origin), Method::SDelta, {}};
  s.diagnostics["h"] = spec.h;
  s.diagnostics["residual"] = fields.stats.residual;
  s.diagnostics["sweeps"] = static_cast<double>(fields.stats.sweeps);
  s.diagnostics["unknowns"] = static_cast<double>(fields.stats.unknowns);
  s.diagnostics["omega"] = fields.stats.omega;
  if (fallback) s.diagnostics["mixed-fallback"] = 1.0;
  return s;
}

inline constexpr int kCirclePoints = 32;

/// |average over the circle of radius r around p - value at p|, with
/// 32-point trapezoidal quadrature and bilinear interpolation.
inline double mean_value_residual(const HarmonicField& field, Payoff p, double r) {
  if (!(r >= 4.0 * field.h() - 1e-15)) throw Error(ErrorCode::InvalidArgument, "radius must be at least 4h");
  if (field.grid().outer().inward_distance(p) < r) {
    throw Error(ErrorCode::DiskOutsideDomain, "disk leaves the field domain");
  }
  const auto center = field.bilinear(p);
  if (!center) throw Error(ErrorCode::DiskOutsideDomain, "center not evaluable");
  double sum = 0.0;
  for (int k = 0; k < kCirclePoints; ++k) {
    const double theta = 2.0 * M_PI * k / kCirclePoints;
    const auto v = field.bilinear(p + r * Payoff{std::cos(theta), std::sin(theta)});
    if (!v) throw Error(ErrorCode::DiskOutsideDomain, "circle crosses cut cells");
    sum += *v;
  }
  return std::abs(sum / kCirclePoints - *center);
}

struct IterationResult {
  Solution solution;
  std::vector<Payoff> trace;
};

/// Repeatedly replaces the disagreement point by S_Delta.
inline IterationResult iterate_s_delta(const BargainingProblem& problem, double tol = 1e-4, const GridSpec& spec = {},
                                       const SolveOptions& opt = {}, int max_iterations = 200) {
  IterationResult out;
  Payoff c = problem.disagreement();
  out.trace.push_back(c);
  bool converged = false;
  int iterations = 0;
  for (; iterations < max_iterations; ++iterations) {
    Payoff next;
    try {
      next = s_delta(problem.with_disagreement(c), spec, opt).payoff;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateNormalization) throw;
      converged = true;  // no room left: c is on the frontier
      break;
    }
    out.trace.push_back(next);
    const double step = distance(next, c);
    c = next;
    if (step < tol) {
      converged = true;
      ++iterations;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "iterated S_Delta did not settle in 200 iterations");
  const geometry::ParetoChain chain{problem.full_chain()};
  Payoff limit = c;
  const double gap = chain.distance_to(c);
  if (gap <= 2.0 * spec.h) limit = chain.project(c);
  out.solution = {limit, Method::IteratedSDelta,
                  {{"iterations", static_cast<double>(iterations)}, {"frontier-gap", gap}, {"h", spec.h}}};
  return out;
}

/// S_Delta as a function of the disagreement point around a base problem:
/// the frame of the base problem is kept fixed and the whole feasibility set
/// is solved once, so the map is harmonic in c.
class SDeltaPayoffMap {
 public:
  explicit SDeltaPayoffMap(const BargainingProblem& base, const GridSpec& spec = {}, const SolveOptions& opt = {})
      : map_(geometry::normalization_map(base)), inverse_(geometry::invert_map(map_)) {
    (void)GridSpec::with_spacing(spec.h);
    const ConvexPolygon f = geometry::transform(base.feasible(), inverse_);
    const bool weak_absorbs = opt.mode == Mode::Symmetrized || opt.weak_pareto_absorbs;
    detail::BoundaryProblem bp{f, detail::absorbing_edges(f, weak_absorbs), detail::identity_data, 2.0};
    fields_ = detail::to_fields(detail::solve_grid(bp, spec.h, opt, opt.tolerance), opt.mode);
  }

  /// Payoff at disagreement point c (original coordinates); NaN where the
  /// interpolation stencil leaves the grid.
  Payoff operator()(Payoff c) const {
    const Payoff q = geometry::apply_map(inverse_, c);
    const auto v1 = fields_.phi1.smooth(q);
    const auto v2 = fields_.phi2.smooth(q);
    if (!v1 || !v2) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    return geometry::apply_map(map_, {*v1, *v2});
  }

  /// Node spacing in original coordinates, per axis.
  Payoff spacing() const { return {map_.a1 * fields_.phi1.h(), map_.a2 * fields_.phi1.h()}; }
  const FieldPair& fields() const { return fields_; }
  const geometry::AffineMap& frame() const { return map_; }

 private:
  geometry::AffineMap map_;
  geometry::AffineMap inverse_;
  FieldPair fields_;
};

/// CSV dump (x, y, phi1, phi2), row-major from the minimum corner. Mirrored
/// fields are expanded to all four quadrants.
inline void write_field_csv(std::ostream& out, const FieldPair& fields) {
  const Grid& g = fields.phi1.grid();
  out << "x,y,phi1,phi2\n";
  const auto row = [&](Payoff p, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.u1, p.u2, a, b);
    out << buf;
  };
  if (!g.mirrored) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.kind_at(i, j) == NodeKind::Exterior) continue;
        row(g.position(i, j), fields.phi1.node(i, j), fields.phi2.node(i, j));
      }
    }
    return;
  }
  const long imax = g.i0 + g.nx - 1;
  const long jmax = g.j0 + g.ny - 1;
  for (long J = -jmax; J <= jmax; ++J) {
    for (long I = -imax; I <= imax; ++I) {
      const int i = static_cast<int>(std::labs(I) - g.i0);
      const int j = static_cast<int>(std::labs(J) - g.j0);
      if (g.kind_at(i, j) == NodeKind::Exterior) continue;
      row({static_cast<double>(I) * g.h, static_cast<double>(J) * g.h}, fields.phi1.node(i, j), fields.phi2.node(i, j));
    }
  }
}

}  // namespace fairshare::harmonic
