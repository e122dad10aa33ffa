#pragma once

// Perturbation expectations, ISC residuals, incentive-region maps, axiom
// checks and the KS-versus-S_Delta domination sweep.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/error.hpp"
#include "fairshare/geometry.hpp"
#include "fairshare/harmonic.hpp"
#include "fairshare/parallel.hpp"
#include "fairshare/random.hpp"
#include "fairshare/solutions.hpp"

namespace fairshare::analysis {

using geometry::BargainingProblem;
using geometry::ConvexPolygon;
using solutions::Method;
using solutions::Solution;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
  harmonic::GridSpec spec;  // S_Delta grid
  harmonic::SolveOptions solve;
  double yu_p = 2.0;
  unsigned workers = 0;  // 0 = all cores; never changes results
};

/// Solvers accepted by the perturbation and region tools.
inline Method parse_solver(std::string_view id) {
  const Method m = solutions::parse_method(id);
  switch (m) {
    case Method::Nash:
    case Method::KalaiSmorodinsky:
    case Method::Egalitarian:
    case Method::EqualLoss:
    case Method::SDelta:
      return m;
    default:
      throw Error(ErrorCode::UnknownSolver, "solver not supported here: " + std::string(id));
  }
}

/// One solution of a problem by method (S_Delta on the grid).
inline Solution solve(Method m, const BargainingProblem& problem, const Options& opt = {}) {
  switch (m) {
    case Method::Nash: return solutions::nash(problem);
    case Method::KalaiSmorodinsky: return solutions::kalai_smorodinsky(problem);
    case Method::Egalitarian: return solutions::egalitarian(problem);
    case Method::EqualLoss: return solutions::equal_loss(problem);
    case Method::YuLp: return solutions::yu_lp(problem, opt.yu_p);
    case Method::SDelta: return harmonic::s_delta(problem, opt.spec, opt.solve);
    case Method::IteratedSDelta: return harmonic::iterate_s_delta(problem, 1e-4, opt.spec, opt.solve).solution;
    case Method::SDeltaMC:
      break;
  }
  throw Error(ErrorCode::UnknownSolver, "solver needs a walk configuration: " + std::string(solutions::to_string(m)));
}

/// The solution as a function of the disagreement point with F fixed.
/// S_Delta uses one grid solve over the whole of F in a fixed frame, so the
/// map is the harmonic extension itself; the other solvers are re-run.
class PayoffMap {
 public:
  PayoffMap(Method m, const BargainingProblem& problem, const Options& opt = {})
      : method_(m), problem_(problem), opt_(opt) {
    if (m == Method::SDelta) sdelta_ = std::make_shared<harmonic::SDeltaPayoffMap>(problem, opt.spec, opt.solve);
  }

  Payoff operator()(Payoff c) const {
    if (sdelta_) return (*sdelta_)(c);
    return solve(method_, problem_.with_disagreement(c), opt_).payoff;
  }

  Method method() const { return method_; }
  const BargainingProblem& problem() const { return problem_; }

  /// Grid spacing per axis in original units, for grid-based maps.
  std::optional<Payoff> grid_spacing() const {
    if (!sdelta_) return std::nullopt;
    return sdelta_->spacing();
  }

  /// Distance from the boundary of F below which the map is not evaluated
  /// by region scans: grid maps need their interpolation stencil on nodes
  /// with regular five-point equations.
  double boundary_margin() const {
    if (!sdelta_) return 0.0;
    const Payoff s = sdelta_->spacing();
    return 4.0 * std::max(s.u1, s.u2);
  }

 private:
  Method method_;
  BargainingProblem problem_;
  Options opt_;
  std::shared_ptr<harmonic::SDeltaPayoffMap> sdelta_;
};

inline constexpr int kMinAngles = 64;
inline constexpr int kDefaultAngles = 1024;

/// Trapezoidal average of the map over the circle of radius eps around c.
inline Payoff perturbed_expectation(const PayoffMap& map, Payoff c, double eps, int n_angles = kDefaultAngles) {
  if (n_angles < kMinAngles) throw Error(ErrorCode::InvalidArgument, "n-angles must be >= 64");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (map.problem().feasible().inward_distance(c) < eps * (1.0 - 1e-12)) {
    throw Error(ErrorCode::DiskOutsideFeasible, "the eps-disk around c leaves F");
  }
  std::vector<double> a(n_angles), b(n_angles);
  for (int k = 0; k < n_angles; ++k) {
    const double theta = 2.0 * M_PI * k / n_angles;
    const Payoff s = map(c + eps * Payoff{std::cos(theta), std::sin(theta)});
    if (!std::isfinite(s.u1) || !std::isfinite(s.u2)) {
      throw Error(ErrorCode::DiskOutsideFeasible, "payoff map not available on the eps-circle");
    }
    a[k] = s.u1;
    b[k] = s.u2;
  }
  return {parallel::pairwise_sum(a) / n_angles, parallel::pairwise_sum(b) / n_angles};
}

inline Payoff perturbed_expectation(std::string_view solver, const BargainingProblem& problem, double eps,
                                    int n_angles = kDefaultAngles, const Options& opt = {}) {
  if (n_angles < kMinAngles) throw Error(ErrorCode::InvalidArgument, "n-angles must be >= 64");
  return perturbed_expectation(PayoffMap(parse_solver(solver), problem, opt), problem.disagreement(), eps, n_angles);
}

// ---------------------------------------------------------------------------
// ISC residuals

enum class IscTerm { Vanishing, FiniteConstant, Divergent };

constexpr std::string_view to_string(IscTerm t) {
  switch (t) {
    case IscTerm::Vanishing: return "vanishing";
    case IscTerm::FiniteConstant: return "finite-constant";
    case IscTerm::Divergent: return "divergent";
  }
  return "?";
}

/// Floor on the ISC tolerance so an exact fit does not demand exact zeros.
inline constexpr double kIscFloor = 1e-4;

struct PerturbationReport {
  Method solver = Method::Nash;
  Payoff disagreement;
  Payoff base;                  // S(F, c)
  std::vector<double> eps;      // strictly decreasing
  std::vector<Payoff> expected; // E S(F, c + eps e_theta)
  std::vector<Payoff> scaled;   // (expected - base) / eps^2
  Payoff first_order;           // a in scaled ~ a / eps + b
  Payoff second_order;          // b
  Payoff fit_residual;          // RMS misfit of the a / eps + b model
  Payoff tolerance;             // 10 x max(fit residual, floor)
  std::array<IscTerm, 2> verdict{IscTerm::Vanishing, IscTerm::Vanishing};

  bool satisfies_isc() const { return verdict[0] == IscTerm::Vanishing && verdict[1] == IscTerm::Vanishing; }
};

namespace detail {

/// Least squares y ~ alpha + beta x; returns {alpha, beta, rms}.
inline std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  const double beta = det != 0.0 ? (n * sxy - sx * sy) / det : 0.0;
  const double alpha = (sy - beta * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - alpha - beta * x[i];
    ss += r * r;
  }
  return {alpha, beta, std::sqrt(ss / n)};
}

inline void check_ladder(const std::vector<double>& eps) {
  if (eps.size() < 2) throw Error(ErrorCode::InvalidArgument, "eps ladder needs at least two values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw Error(ErrorCode::InvalidArgument, "eps ladder must strictly decrease");
  }
}

}  // namespace detail

/// Expectations over the ladder and the a / eps + b fit of the eps^2-scaled
/// residual. A player's term is divergent when |a| / eps_min exceeds the
/// tolerance, finite when |b| does, vanishing otherwise.
inline PerturbationReport isc_residual(const PayoffMap& map, Payoff c, const std::vector<double>& ladder,
                                       int n_angles = kDefaultAngles) {
  detail::check_ladder(ladder);
  PerturbationReport r;
  r.solver = map.method();
  r.disagreement = c;
  r.base = map(c);
  r.eps = ladder;
  std::vector<double> inv, s1, s2;
  for (double e : ladder) {
    const Payoff ex = perturbed_expectation(map, c, e, n_angles);
    r.expected.push_back(ex);
    const Payoff s = (1.0 / (e * e)) * (ex - r.base);
    r.scaled.push_back(s);
    inv.push_back(1.0 / e);
    s1.push_back(s.u1);
    s2.push_back(s.u2);
  }
  const auto f1 = detail::fit_line(inv, s1);
  const auto f2 = detail::fit_line(inv, s2);
  r.second_order = {f1[0], f2[0]};
  r.first_order = {f1[1], f2[1]};
  r.fit_residual = {f1[2], f2[2]};
  r.tolerance = {10.0 * std::max(f1[2], kIscFloor), 10.0 * std::max(f2[2], kIscFloor)};
  const double eps_min = ladder.back();
  const auto classify = [&](double a, double b, double tol) {
    if (std::abs(a) / eps_min > tol) return IscTerm::Divergent;
    if (std::abs(b) > tol) return IscTerm::FiniteConstant;
    return IscTerm::Vanishing;
  };
  r.verdict = {classify(r.first_order.u1, r.second_order.u1, r.tolerance.u1),
               classify(r.first_order.u2, r.second_order.u2, r.tolerance.u2)};
  return r;
}

inline PerturbationReport isc_residual(std::string_view solver, const BargainingProblem& problem,
                                       const std::vector<double>& ladder, int n_angles = kDefaultAngles,
                                       const Options& opt = {}) {
  detail::check_ladder(ladder);
  return isc_residual(PayoffMap(parse_solver(solver), problem, opt), problem.disagreement(), ladder, n_angles);
}

/// Fit of E S = alpha + beta eps^power over the report's ladder.
struct ExpectationFit {
  Payoff intercept;
  Payoff coefficient;
  Payoff residual;
};

inline ExpectationFit fit_expectation(const PerturbationReport& r, int power) {
  std::vector<double> x, y1, y2;
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    x.push_back(std::pow(r.eps[i], power));
    y1.push_back(r.expected[i].u1);
    y2.push_back(r.expected[i].u2);
  }
  const auto f1 = detail::fit_line(x, y1);
  const auto f2 = detail::fit_line(x, y2);
  return {{f1[0], f2[0]}, {f1[1], f2[1]}, {f1[2], f2[2]}};
}

/// CSV: eps, Eu1, Eu2.
inline void write_perturbation_csv(std::ostream& out, const PerturbationReport& r) {
  out << "eps,Eu1,Eu2\n";
  char buf[96];
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.eps[i], r.expected[i].u1, r.expected[i].u2);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Incentive regions

enum class Label { Gain, Lose, Neutral, OutOfRange };

constexpr std::string_view to_string(Label l) {
  switch (l) {
    case Label::Gain: return "gain";
    case Label::Lose: return "lose";
    case Label::Neutral: return "neutral";
    case Label::OutOfRange: return "out-of-range";
  }
  return "?";
}

inline constexpr double kDefaultArm = 1e-3;
/// Neutral band numerator: |Laplacian| <= kBandNumerator / arm^2.
inline constexpr double kBandNumerator = 1e-9;

struct RegionPoint {
  Payoff c;
  Payoff laplacian{kNaN, kNaN};
  std::array<Label, 2> label{Label::OutOfRange, Label::OutOfRange};
};

struct RegionMap {
  Method solver = Method::Nash;
  double grid_step = 0;
  Payoff arm;   // per axis
  double band = 0;
  std::vector<RegionPoint> points;  // row-major from the lower-left corner
};

struct RegionOptions {
  double grid_step = 0.02;
  std::optional<double> fd_arm;  // default: grid spacing for S_Delta, else 1e-3
  double band_numerator = kBandNumerator;
  unsigned workers = 0;
};

/// Five-point Laplacian of the payoff map at every grid point of F, with
/// per-player sign labels.
inline RegionMap incentive_regions(const PayoffMap& map, const RegionOptions& ro) {
  RegionMap rm;
  rm.solver = map.method();
  rm.grid_step = ro.grid_step;
  if (ro.fd_arm) {
    rm.arm = {*ro.fd_arm, *ro.fd_arm};
  } else if (auto s = map.grid_spacing()) {
    rm.arm = *s;  // node-aligned arm: the interpolant's stencil is the grid's
  } else {
    rm.arm = {kDefaultArm, kDefaultArm};
  }
  const double arm = std::max(rm.arm.u1, rm.arm.u2);
  if (!(rm.arm.u1 > 0.0 && rm.arm.u2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd-arm must be positive");
  if (!(ro.grid_step >= 2.0 * arm)) throw Error(ErrorCode::InvalidArgument, "grid-step must be >= 2 fd-arm");
  rm.band = ro.band_numerator / (arm * arm);

  const ConvexPolygon& f = map.problem().feasible();
  const auto [lo, hi] = f.bounding_box();
  const int nx = static_cast<int>(std::floor((hi.u1 - lo.u1) / ro.grid_step + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((hi.u2 - lo.u2) / ro.grid_step + 1e-9)) + 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Payoff c{lo.u1 + i * ro.grid_step, lo.u2 + j * ro.grid_step};
      if (!f.contains(c, 0.0)) continue;
      rm.points.push_back({c});
    }
  }
  const double margin = arm + map.boundary_margin();
  parallel::for_each_index(rm.points.size(), ro.workers, [&](std::size_t k) {
    RegionPoint& pt = rm.points[k];
    if (f.inward_distance(pt.c) <= margin) return;
    Payoff center, sx, sy;
    try {
      center = map(pt.c);
      sx = map(pt.c + Payoff{rm.arm.u1, 0}) + map(pt.c - Payoff{rm.arm.u1, 0});
      sy = map(pt.c + Payoff{0, rm.arm.u2}) + map(pt.c - Payoff{0, rm.arm.u2});
    } catch (const Error&) {
      return;  // solver undefined at this stencil: out of range
    }
    const Payoff lap{(sx.u1 - 2 * center.u1) / (rm.arm.u1 * rm.arm.u1) + (sy.u1 - 2 * center.u1) / (rm.arm.u2 * rm.arm.u2),
                     (sx.u2 - 2 * center.u2) / (rm.arm.u1 * rm.arm.u1) + (sy.u2 - 2 * center.u2) / (rm.arm.u2 * rm.arm.u2)};
    if (!std::isfinite(lap.u1) || !std::isfinite(lap.u2)) return;
    pt.laplacian = lap;
    const auto label = [&](double v) { return v > rm.band ? Label::Gain : (v < -rm.band ? Label::Lose : Label::Neutral); };
    pt.label = {label(lap.u1), label(lap.u2)};
  });
  return rm;
}

inline RegionMap incentive_regions(std::string_view solver, const BargainingProblem& problem, const RegionOptions& ro,
                                   const Options& opt = {}) {
  return incentive_regions(PayoffMap(parse_solver(solver), problem, opt), ro);
}

/// Per column of the map, the height where a player's label changes from
/// gain (below) to not-gain (above): midpoint of the two grid points.
/// Columns without such a change are skipped.
inline std::vector<Payoff> region_boundary(const RegionMap& rm, int player) {
  std::map<double, std::vector<const RegionPoint*>> columns;
  for (const RegionPoint& p : rm.points) {
    if (p.label[player] != Label::OutOfRange) columns[p.c.u1].push_back(&p);
  }
  std::vector<Payoff> out;
  for (auto& [c1, col] : columns) {
    std::sort(col.begin(), col.end(), [](auto* a, auto* b) { return a->c.u2 < b->c.u2; });
    for (std::size_t k = col.size(); k-- > 1;) {
      if (col[k - 1]->label[player] == Label::Gain && col[k]->label[player] != Label::Gain) {
        out.push_back({c1, 0.5 * (col[k - 1]->c.u2 + col[k]->c.u2)});
        break;
      }
    }
  }
  return out;
}

/// CSV: c1, c2, lap1, lap2, label1, label2.
inline void write_region_csv(std::ostream& out, const RegionMap& rm) {
  out << "c1,c2,lap1,lap2,label1,label2\n";
  char buf[160];
  for (const RegionPoint& p : rm.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", p.c.u1, p.c.u2, p.laplacian.u1, p.laplacian.u2);
    out << buf << to_string(p.label[0]) << ',' << to_string(p.label[1]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Axiom checks

struct AxiomInstance {
  std::string description;
  BargainingProblem problem;
  std::optional<BargainingProblem> other;    // axioms 4 and 5
  std::optional<geometry::AffineMap> map;    // axiom 2
};

struct AxiomCase {
  std::string description;
  bool passed = true;
  double violation = 0.0;
  Payoff first{kNaN, kNaN};
  Payoff second{kNaN, kNaN};
  std::string note;
};

struct AxiomReport {
  int axiom = 0;
  Method solver = Method::Nash;
  double tolerance = 0.0;
  std::vector<AxiomCase> cases;

  bool passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const AxiomCase& c) { return c.passed; });
  }
  double max_violation() const {
    double v = 0.0;
    for (const AxiomCase& c : cases) v = std::max(v, c.violation);
    return v;
  }
};

inline constexpr double kAxiomTolerance = 1e-9;
inline const std::vector<double> kIscLadder{0.04, 0.02, 0.01};

namespace detail {

inline double max_abs(Payoff a, Payoff b) { return std::max(std::abs(a.u1 - b.u1), std::abs(a.u2 - b.u2)); }

inline bool polygon_inside(const ConvexPolygon& inner, const ConvexPolygon& outer, double tol) {
  return std::all_of(inner.vertices().begin(), inner.vertices().end(),
                     [&](const Payoff& v) { return outer.contains(v, tol); });
}

inline bool swap_symmetric(const BargainingProblem& p) {
  const Payoff c = p.disagreement();
  if (std::abs(c.u1 - c.u2) > kAxiomTolerance) return false;
  const auto& vs = p.feasible().vertices();
  return std::all_of(vs.begin(), vs.end(), [&](const Payoff& v) {
    return p.feasible().contains({v.u2, v.u1}, kAxiomTolerance);
  });
}

}  // namespace detail

/// Numeric check of one axiom over instances. Axiom ids: 1 symmetry,
/// 2 affine equivariance, 3 Pareto optimality, 4 independence of
/// irrelevant alternatives, 5 individual monotonicity, 6 ISC.
inline AxiomReport check_axiom(int axiom, Method solver, const std::vector<AxiomInstance>& instances,
                               const Options& opt = {}) {
  if (axiom < 1 || axiom > 6) throw Error(ErrorCode::InvalidArgument, "axiom id must be in 1..6");
  AxiomReport rep;
  rep.axiom = axiom;
  rep.solver = solver;
  rep.tolerance = (solver == Method::SDelta || solver == Method::IteratedSDelta) ? 3.0 * opt.spec.h : kAxiomTolerance;
  const auto malformed = [](const AxiomInstance& in, const std::string& why) {
    return Error(ErrorCode::MalformedInstance, in.description + ": " + why);
  };
  for (const AxiomInstance& in : instances) {
    AxiomCase ac;
    ac.description = in.description;
    switch (axiom) {
      case 1: {
        if (!detail::swap_symmetric(in.problem)) throw malformed(in, "problem is not swap-symmetric");
        ac.first = solve(solver, in.problem, opt).payoff;
        ac.violation = std::abs(ac.first.u1 - ac.first.u2);
        break;
      }
      case 2: {
        if (!in.map) throw malformed(in, "affine map missing");
        const geometry::AffineMap& t = *in.map;
        const BargainingProblem moved = BargainingProblem::create(
            geometry::transform(in.problem.feasible(), t), geometry::apply_map(t, in.problem.disagreement()));
        ac.first = geometry::apply_map(t, solve(solver, in.problem, opt).payoff);
        ac.second = solve(solver, moved, opt).payoff;
        ac.violation = detail::max_abs(ac.first, ac.second);
        break;
      }
      case 3: {
        ac.first = solve(solver, in.problem, opt).payoff;
        // Largest equal gain for both players still feasible.
        ac.violation = in.problem.feasible().ray_exit(ac.first, {1.0, 1.0}).t;
        break;
      }
      case 4: {
        if (!in.other) throw malformed(in, "sub-problem missing");
        const BargainingProblem& g = *in.other;
        if (detail::max_abs(g.disagreement(), in.problem.disagreement()) > kAxiomTolerance ||
            !detail::polygon_inside(g.feasible(), in.problem.feasible(), kAxiomTolerance)) {
          throw malformed(in, "second set is not contained in the first with the same c");
        }
        ac.first = solve(solver, in.problem, opt).payoff;
        if (!g.feasible().contains(ac.first, kAxiomTolerance)) {
          ac.note = "S(F) not in G: axiom does not apply";
          break;
        }
        ac.second = solve(solver, g, opt).payoff;
        ac.violation = detail::max_abs(ac.first, ac.second);
        break;
      }
      case 5: {
        if (!in.other) throw malformed(in, "expanded problem missing");
        const BargainingProblem& g = *in.other;
        if (detail::max_abs(g.disagreement(), in.problem.disagreement()) > kAxiomTolerance ||
            !detail::polygon_inside(in.problem.feasible(), g.feasible(), kAxiomTolerance) ||
            std::abs(geometry::ideal_point(g).u1 - geometry::ideal_point(in.problem).u1) > kAxiomTolerance) {
          throw malformed(in, "pair must be nested with equal player-1 ideal payoff");
        }
        ac.first = solve(solver, in.problem, opt).payoff;
        ac.second = solve(solver, g, opt).payoff;
        ac.violation = std::max(0.0, ac.first.u2 - ac.second.u2);
        break;
      }
      case 6: {
        const PerturbationReport r = isc_residual(PayoffMap(solver, in.problem, opt), in.problem.disagreement(), kIscLadder);
        ac.first = r.second_order;
        ac.second = r.first_order;
        const double eps_min = r.eps.back();
        ac.violation = std::max({std::max(0.0, std::abs(r.first_order.u1) / eps_min - r.tolerance.u1),
                                 std::max(0.0, std::abs(r.first_order.u2) / eps_min - r.tolerance.u2),
                                 std::max(0.0, std::abs(r.second_order.u1) - r.tolerance.u1),
                                 std::max(0.0, std::abs(r.second_order.u2) - r.tolerance.u2)});
        ac.note = std::string(to_string(r.verdict[0])) + "/" + std::string(to_string(r.verdict[1]));
        ac.passed = r.satisfies_isc();
        rep.cases.push_back(ac);
        continue;
      }
    }
    ac.passed = ac.violation <= rep.tolerance;
    rep.cases.push_back(ac);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Domination sweep

/// Random comprehensive problem number `index` of stream `seed`: hull of
/// 8-16 uniform points in the unit square, the origin and the points' axis
/// projections, c = (0, 0), normalized.
inline BargainingProblem random_problem(std::uint64_t seed, std::uint64_t index) {
  const random::Block head = random::draw(seed, index, 0);
  const int count = 8 + static_cast<int>(head[0] % 9);
  std::vector<Payoff> pts{{0.0, 0.0}};
  for (int k = 0; k < count; ++k) {
    const random::Block b = random::draw(seed, index, static_cast<std::uint64_t>(k) + 1);
    const Payoff p{random::to_unit_open(b[0]), random::to_unit_open(b[1])};
    pts.push_back(p);
    pts.push_back({p.u1, 0.0});
    pts.push_back({0.0, p.u2});
  }
  const BargainingProblem raw = BargainingProblem::create(ConvexPolygon::hull_of(pts), {0.0, 0.0});
  return geometry::normalize(raw).problem;
}

struct DominationEntry {
  std::string name;
  Payoff dominant;   // e.g. S_KS
  Payoff dominated;  // S_Delta
  Payoff margin;     // dominant - dominated
  bool violation = false;
};

struct DominationReport {
  std::string dominant_solver;
  std::string dominated_solver;
  double band = 0.0;
  std::vector<DominationEntry> entries;
  Payoff min_margin{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  std::size_t violations = 0;
};

/// Builds the report from raw (name, dominant, dominated) triples; any
/// source of pairs can be fed through here.
inline DominationReport summarize_domination(std::vector<DominationEntry> raw, double band,
                                             std::string dominant = "ks", std::string dominated = "s-delta") {
  DominationReport rep;
  rep.dominant_solver = std::move(dominant);
  rep.dominated_solver = std::move(dominated);
  rep.band = band;
  for (DominationEntry& e : raw) {
    e.margin = e.dominant - e.dominated;
    e.violation = e.margin.u1 < -band || e.margin.u2 < -band;
    rep.min_margin = {std::min(rep.min_margin.u1, e.margin.u1), std::min(rep.min_margin.u2, e.margin.u2)};
    if (e.violation) ++rep.violations;
  }
  rep.entries = std::move(raw);
  return rep;
}

struct SweepConfig {
  std::size_t count = 100;
  std::uint64_t seed = 1;
  double h = 1.0 / 64;
  Method dominant = Method::KalaiSmorodinsky;
  bool include_presets = true;
  unsigned workers = 0;
  double mc_stderr = 0.0;  // extra band term when S_Delta comes from walks
};

inline const std::vector<std::string_view> kSweepPresets{"triangle", "trapezoid", "parabola"};

/// S_dominant versus S_Delta (grid) over presets and seeded random problems;
/// flags instances beyond the band 3h + 3 stderr.
inline DominationReport domination_sweep(const SweepConfig& cfg) {
  if (cfg.count < 1) throw Error(ErrorCode::InvalidArgument, "instance count must be >= 1");
  std::vector<std::string> names;
  std::vector<BargainingProblem> problems;
  if (cfg.include_presets) {
    for (std::string_view p : kSweepPresets) {
      names.emplace_back(p);
      problems.push_back(geometry::preset_problem(p));
    }
  }
  for (std::size_t i = 0; i < cfg.count; ++i) {
    names.push_back("random-" + std::to_string(cfg.seed) + "-" + std::to_string(i));
    problems.push_back(random_problem(cfg.seed, i));
  }
  Options opt;
  opt.spec = harmonic::GridSpec::with_spacing(cfg.h);
  std::vector<DominationEntry> raw(problems.size());
  parallel::for_each_index(problems.size(), cfg.workers, [&](std::size_t k) {
    raw[k] = {names[k], solve(cfg.dominant, problems[k], opt).payoff, harmonic::s_delta(problems[k], opt.spec).payoff,
              {}, false};
  });
  return summarize_domination(std::move(raw), 3.0 * cfg.h + 3.0 * cfg.mc_stderr,
                              std::string(solutions::to_string(cfg.dominant)), "s-delta");
}

inline void write_domination_report(std::ostream& out, const DominationReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# domination: %s >= %s, band %.6g, instances %zu\n", rep.dominant_solver.c_str(),
                rep.dominated_solver.c_str(), rep.band, rep.entries.size());
  out << buf;
  out << "instance,dominant_u1,dominant_u2,dominated_u1,dominated_u2,margin_u1,margin_u2,status\n";
  for (const DominationEntry& e : rep.entries) {
    std::snprintf(buf, sizeof buf, "%s,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%s\n", e.name.c_str(), e.dominant.u1, e.dominant.u2,
                  e.dominated.u1, e.dominated.u2, e.margin.u1, e.margin.u2, e.violation ? "VIOLATION" : "ok");
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# min margin (%.9f, %.9f); violations %zu\n", rep.min_margin.u1, rep.min_margin.u2,
                rep.violations);
  out << buf;
}

}  // namespace fairshare::analysis
