#pragma once

// The fairshare command line: parsing, problem loading and the subcommands.
// run() never touches std::cout directly so the tests can drive it.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairshare/analysis.hpp"
#include "fairshare/error.hpp"
#include "fairshare/geometry.hpp"
#include "fairshare/harmonic.hpp"
#include "fairshare/io.hpp"
#include "fairshare/montecarlo.hpp"
#include "fairshare/solutions.hpp"

namespace fairshare::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitSolverFailure = 3;

/// Exit status for a library error: bad input is 2, a solver that could not
/// finish is 3.
inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::MaxMovesExceeded:
    case ErrorCode::DiskOutsideDomain:
      return kExitSolverFailure;
    default:
      return kExitInvalidInput;
  }
}

/// Regions default to a fine sampling of curved presets: the chord error of
/// the polygon enters finite-difference Laplacians as length / arm^2.
inline constexpr int kRegionSegments = 1 << 20;
inline constexpr double kRegionArm = 0.01;
inline constexpr std::uint64_t kCheckSeed = 1;

namespace detail {

template <class... A>
std::string format(const char* f, A... a) {
  const int n = std::snprintf(nullptr, 0, f, a...);
  std::string s(static_cast<std::size_t>(n), '\0');
  std::snprintf(s.data(), s.size() + 1, f, a...);
  return s;
}

/// Shortest decimal that reads back as the same double.
inline std::string num(double v) {
  for (int digits = 15; digits < 17; ++digits) {
    const std::string s = format("%.*g", digits, v);
    if (std::strtod(s.c_str(), nullptr) == v) return s;
  }
  return format("%.17g", v);
}

struct ProblemOptions {
  std::string preset;
  std::string file;
  int segments = geometry::kDefaultPresetSegments;
  std::string disagreement;
};

struct LoadedProblem {
  geometry::BargainingProblem problem;
  std::string description;
};

inline void add_problem_options(CLI::App* sub, ProblemOptions& po) {
  auto* preset = sub->add_option("--preset", po.preset, "named example set: trapezoid, triangle, parabola, "
                                                        "fig3-left, fig3-right");
  auto* file = sub->add_option("--file", po.file, "problem file (JSON: vertices, disagreement, optional preset)");
  preset->excludes(file);
  file->excludes(preset);
  sub->add_option("--segments", po.segments, "chords used to sample curved presets")->capture_default_str();
  sub->add_option("--disagreement", po.disagreement, "override the disagreement point, as c1,c2");
}

inline Payoff parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    const double a = std::stod(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    const std::string rest = s.substr(comma + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "expected a pair c1,c2 but got '" + s + "'");
  }
}

inline LoadedProblem load_problem(const ProblemOptions& po) {
  LoadedProblem out{geometry::preset_problem("triangle"), {}};
  if (!po.file.empty()) {
    out.problem = io::read_problem_file(po.file);
    out.description = "file " + po.file;
  } else if (!po.preset.empty()) {
    out.problem = geometry::preset_problem(po.preset, po.segments);
    out.description = "preset " + po.preset;
    if (po.preset == "parabola") out.description += format(" (%d segments)", po.segments);
  } else {
    throw Error(ErrorCode::InvalidArgument, "a problem is required: pass --preset NAME or --file PATH");
  }
  if (!po.disagreement.empty()) out.problem = out.problem.with_disagreement(parse_pair(po.disagreement));
  const Payoff c = out.problem.disagreement();
  out.description += "; c = (" + num(c.u1) + ", " + num(c.u2) + ")";
  return out;
}

struct WalkOptions {
  double step = 0.01;
  std::size_t walkers = 200000;
  std::optional<std::uint64_t> seed;
  std::string law{montecarlo::to_string(montecarlo::StepLaw::UniformAngle)};
  std::string mode = "symmetrized";
  bool weak_absorbs = false;
  std::uint64_t max_moves = 10'000'000;
};

inline void add_walk_options(CLI::App* sub, WalkOptions& wo, bool with_mode) {
  sub->add_option("--step", wo.step, "walk step length, in (0, 0.05]")->capture_default_str();
  sub->add_option("--walkers", wo.walkers, "number of walkers")->capture_default_str();
  sub->add_option("--seed", wo.seed, "walk seed (falls back to FAIRSHARE_SEED)");
  sub->add_option("--law", wo.law, "step law: uniform-angle, gaussian-isotropic, two-point-axis")->capture_default_str();
  sub->add_option("--max-moves", wo.max_moves, "per-walker move cap")->capture_default_str();
  if (with_mode) {
    sub->add_option("--mode", wo.mode, "symmetrized or mixed-bc")->capture_default_str();
    sub->add_flag("--weak-pareto-absorbs", wo.weak_absorbs, "mixed-bc: weakly Pareto edges absorb");
  }
}

inline std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("FAIRSHARE_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  const std::string text(s);
  std::size_t used = 0;
  try {
    const unsigned long long v = std::stoull(text, &used, 10);
    if (used == text.size() && text.front() != '-') return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidArgument, "FAIRSHARE_SEED is not a non-negative integer: '" + text + "'");
}

inline std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  return env_seed();
}

inline harmonic::Mode parse_mode(const std::string& m) {
  if (m == "symmetrized") return harmonic::Mode::Symmetrized;
  if (m == "mixed-bc") return harmonic::Mode::MixedBc;
  throw Error(ErrorCode::UnknownVariant, "mode must be symmetrized or mixed-bc, not '" + m + "'");
}

inline montecarlo::WalkConfig walk_config(const WalkOptions& wo, std::uint64_t seed, unsigned workers) {
  montecarlo::WalkConfig cfg;
  cfg.step = wo.step;
  cfg.walkers = wo.walkers;
  cfg.seed = seed;
  cfg.max_moves = wo.max_moves;
  cfg.law = montecarlo::parse_step_law(wo.law);
  cfg.workers = workers;
  cfg.mode = parse_mode(wo.mode);
  cfg.weak_pareto_absorbs = wo.weak_absorbs;
  cfg.validate();
  if (cfg.walkers < 1) throw Error(ErrorCode::InvalidArgument, "walkers must be >= 1");
  return cfg;
}

inline std::string walk_header(const montecarlo::WalkConfig& cfg) {
  return format("# walk: step %s; walkers %zu; seed %llu; law %s; mode %s; max-moves %llu\n", num(cfg.step).c_str(),
                cfg.walkers, static_cast<unsigned long long>(cfg.seed),
                std::string(montecarlo::to_string(cfg.law)).c_str(),
                cfg.mode == harmonic::Mode::Symmetrized ? "symmetrized" : "mixed-bc",
                static_cast<unsigned long long>(cfg.max_moves));
}

inline harmonic::GridSpec grid(double h) { return harmonic::GridSpec::with_spacing(h); }

/// Output directory, created up front so a long run cannot fail at the end.
inline std::optional<std::filesystem::path> prepare_out(const std::string& dir) {
  if (dir.empty()) return std::nullopt;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::InvalidArgument, "cannot create output directory " + dir);
  }
  return std::filesystem::path(dir);
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  return f;
}

inline void dump_problem(const std::optional<std::filesystem::path>& dir, const geometry::BargainingProblem& p) {
  if (!dir) return;
  std::ofstream f = open_out(*dir / "problem.json");
  io::write_problem(f, p);
}

inline std::string diagnostics_text(const solutions::Solution& s) {
  std::string t;
  for (const auto& [k, v] : s.diagnostics) t += (t.empty() ? "" : ";") + k + "=" + format("%.6g", v);
  return t;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  ProblemOptions problem;
  std::string methods = "nash,ks,s-delta";
  double grid_h = harmonic::kDefaultSpacing;
  double yu_p = 2.0;
  WalkOptions walk;
};

inline const std::vector<solutions::Method> kAllMethods{
    solutions::Method::Nash,       solutions::Method::KalaiSmorodinsky, solutions::Method::Egalitarian,
    solutions::Method::EqualLoss,  solutions::Method::YuLp,             solutions::Method::SDelta,
    solutions::Method::SDeltaMC,   solutions::Method::IteratedSDelta};

inline int cmd_solve(const SolveArgs& a, const std::string& out_dir, unsigned workers, std::ostream& out) {
  const auto dir = prepare_out(out_dir);
  const LoadedProblem lp = load_problem(a.problem);
  std::vector<solutions::Method> methods;
  const bool all = a.methods == "all";
  if (all) {
    methods = kAllMethods;
  } else {
    std::stringstream ss(a.methods);
    for (std::string tok; std::getline(ss, tok, ',');) {
      if (!tok.empty()) methods.push_back(solutions::parse_method(tok));
    }
  }
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods requested");

  const auto seed = resolve_seed(a.walk.seed);
  bool need_walk = false;
  for (auto m : methods) need_walk |= m == solutions::Method::SDeltaMC;
  if (need_walk && !seed && !all) {
    throw Error(ErrorCode::InvalidArgument, "s-delta-mc needs a seed: pass --seed or set FAIRSHARE_SEED");
  }
  analysis::Options opt;
  opt.spec = grid(a.grid_h);
  opt.yu_p = a.yu_p;
  std::optional<montecarlo::WalkConfig> wcfg;
  if (need_walk && seed) wcfg = walk_config(a.walk, *seed, workers);

  out << "# fairshare solve\n# problem: " << lp.description << "\n";
  out << "# grid-h " << num(a.grid_h) << "; yu-p " << num(a.yu_p) << "\n";
  if (wcfg) out << walk_header(*wcfg);
  out << format("%-18s %14s %14s  %s\n", "method", "u1", "u2", "diagnostics");

  std::ostringstream csv;
  csv << "method,u1,u2,diagnostics\n";
  for (auto m : methods) {
    const std::string name(solutions::to_string(m));
    if (m == solutions::Method::SDeltaMC && !wcfg) {
      out << "# s-delta-mc skipped: no seed given\n";
      continue;
    }
    const solutions::Solution s =
        m == solutions::Method::SDeltaMC ? montecarlo::estimate_s_delta_mc(lp.problem, *wcfg) : analysis::solve(m, lp.problem, opt);
    const std::string diag = diagnostics_text(s);
    out << format("%-18s %14.9f %14.9f  %s\n", name.c_str(), s.payoff.u1, s.payoff.u2, diag.c_str());
    csv << format("%s,%.17g,%.17g,\"%s\"\n", name.c_str(), s.payoff.u1, s.payoff.u2, diag.c_str());
  }
  if (dir) {
    dump_problem(dir, lp.problem);
    std::ofstream f = open_out(*dir / "solutions.csv");
    f << csv.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// walk

struct WalkArgs {
  ProblemOptions problem;
  WalkOptions walk;
};

inline int cmd_walk(const WalkArgs& a, const std::string& out_dir, unsigned workers, std::ostream& out) {
  const auto seed = resolve_seed(a.walk.seed);
  if (!seed) throw Error(ErrorCode::InvalidArgument, "walk needs a seed: pass --seed or set FAIRSHARE_SEED");
  const montecarlo::WalkConfig cfg = walk_config(a.walk, *seed, workers);
  const auto dir = prepare_out(out_dir);
  const LoadedProblem lp = load_problem(a.problem);
  const montecarlo::Estimate est = montecarlo::estimate_with_outcomes(lp.problem, cfg);
  const solutions::Solution& s = est.solution;
  out << "# fairshare walk\n# problem: " << lp.description << "\n" << walk_header(cfg);
  out << format("estimate    %.9f %.9f\n", s.payoff.u1, s.payoff.u2);
  out << format("stderr      %.9f %.9f\n", s.diagnostic("stderr1"), s.diagnostic("stderr2"));
  out << format("walkers     %zu\n", cfg.walkers);
  out << format("mean-moves  %.6f\n", s.diagnostic("mean-moves"));
  if (s.diagnostics.count("mixed-fallback")) out << "# reflecting edges off the axes: mixed walk with weak edges absorbing\n";
  if (dir) {
    dump_problem(dir, lp.problem);
    std::ofstream f = open_out(*dir / "walkers.csv");
    montecarlo::write_walkers_csv(f, est.outcomes);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// regions

struct RegionArgs {
  ProblemOptions problem{.preset = {}, .file = {}, .segments = kRegionSegments, .disagreement = {}};
  std::string solver = "nash";
  double grid_step = 0.02;
  std::optional<double> fd_arm;
  double grid_h = harmonic::kDefaultSpacing;
};

inline int cmd_regions(const RegionArgs& a, const std::string& out_dir, unsigned workers, std::ostream& out) {
  const auto dir = prepare_out(out_dir);
  const LoadedProblem lp = load_problem(a.problem);
  const solutions::Method m = analysis::parse_solver(a.solver);
  analysis::Options opt;
  opt.spec = grid(a.grid_h);
  analysis::RegionOptions ro;
  ro.grid_step = a.grid_step;
  ro.workers = workers;
  if (a.fd_arm) {
    ro.fd_arm = a.fd_arm;
  } else if (m != solutions::Method::SDelta) {
    ro.fd_arm = kRegionArm;
  }
  const analysis::PayoffMap map(m, lp.problem, opt);
  const analysis::RegionMap rm = analysis::incentive_regions(map, ro);

  out << "# fairshare regions\n# problem: " << lp.description << "\n";
  out << format("# solver %s; grid-step %s; fd-arm (%.6g, %.6g); neutral band %.6g", a.solver.c_str(),
                num(a.grid_step).c_str(), rm.arm.u1, rm.arm.u2, rm.band);
  if (m == solutions::Method::SDelta) out << "; grid-h " << num(a.grid_h);
  out << "\n";
  for (int player = 0; player < 2; ++player) {
    std::size_t count[4] = {0, 0, 0, 0};
    for (const auto& p : rm.points) ++count[static_cast<int>(p.label[player])];
    out << format("# player %d: gain %zu, lose %zu, neutral %zu, out-of-range %zu\n", player + 1, count[0], count[1],
                  count[2], count[3]);
  }
  const std::vector<Payoff> edge = analysis::region_boundary(rm, 0);
  if (edge.empty()) {
    out << "# region-1 boundary: none\n";
  } else {
    double sum = 0, lo = edge.front().u2, hi = lo;
    for (const Payoff& p : edge) {
      sum += p.u2;
      lo = std::min(lo, p.u2);
      hi = std::max(hi, p.u2);
    }
    out << format("# region-1 boundary: %zu columns, mean height %.6f, range [%.6f, %.6f]\n", edge.size(),
                  sum / edge.size(), lo, hi);
  }
  if (dir) {
    dump_problem(dir, lp.problem);
    std::ofstream csv = open_out(*dir / "regions.csv");
    analysis::write_region_csv(csv, rm);
    std::ofstream svg = open_out(*dir / "regions.svg");
    io::write_region_svg(svg, rm, lp.problem.feasible());
  } else {
    analysis::write_region_csv(out, rm);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// perturb

struct PerturbArgs {
  ProblemOptions problem;
  std::string solver = "nash";
  std::vector<double> eps{0.04, 0.02, 0.01};
  int angles = analysis::kDefaultAngles;
  double grid_h = harmonic::kDefaultSpacing;
};

inline int cmd_perturb(const PerturbArgs& a, const std::string& out_dir, std::ostream& out) {
  const auto dir = prepare_out(out_dir);
  const LoadedProblem lp = load_problem(a.problem);
  analysis::Options opt;
  opt.spec = grid(a.grid_h);
  const analysis::PerturbationReport r = analysis::isc_residual(a.solver, lp.problem, a.eps, a.angles, opt);
  out << "# fairshare perturb\n# problem: " << lp.description << "\n";
  out << format("# solver %s; angles %d; grid-h %s; isc floor %.6g\n", a.solver.c_str(), a.angles,
                num(a.grid_h).c_str(), analysis::kIscFloor);
  out << format("base        %.9f %.9f\n", r.base.u1, r.base.u2);
  out << format("%-10s %14s %14s\n", "eps", "E u1", "E u2");
  for (std::size_t k = 0; k < r.eps.size(); ++k) {
    out << format("%-10.6g %14.9f %14.9f\n", r.eps[k], r.expected[k].u1, r.expected[k].u2);
  }
  const double a1[2] = {r.first_order.u1, r.first_order.u2};
  const double b1[2] = {r.second_order.u1, r.second_order.u2};
  const double res[2] = {r.fit_residual.u1, r.fit_residual.u2};
  const double tol[2] = {r.tolerance.u1, r.tolerance.u2};
  for (int p = 0; p < 2; ++p) {
    out << format("player %d: 1/eps term %.6g, constant %.6g, fit residual %.3g, tolerance %.3g -> %s\n", p + 1, a1[p],
                  b1[p], res[p], tol[p], std::string(analysis::to_string(r.verdict[p])).c_str());
  }
  out << (r.satisfies_isc() ? "isc: satisfied\n" : "isc: violated\n");
  if (dir) {
    dump_problem(dir, lp.problem);
    std::ofstream f = open_out(*dir / "perturbation.csv");
    analysis::write_perturbation_csv(f, r);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check

struct AxiomArgs {
  double grid_h = 1.0 / 64;
};

struct AxiomExpectation {
  int axiom;
  solutions::Method solver;
  std::vector<analysis::AxiomInstance> instances;
  bool expect_pass;
};

/// The fixed axiom suite. Known failures (Nash monotonicity, KS IIA,
/// egalitarian scale invariance, S_Delta strong Pareto, ISC for the
/// closed-form solvers) are asserted as failures.
inline std::vector<AxiomExpectation> axiom_suite() {
  using solutions::Method;
  using geometry::AffineMap;
  using geometry::make_problem;
  using geometry::preset_problem;
  using V = std::vector<Payoff>;
  const analysis::AxiomInstance tri{"triangle", preset_problem("triangle"), std::nullopt, std::nullopt};
  const analysis::AxiomInstance square{"square c=(0.2,0.2)", make_problem(V{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0.2, 0.2}),
                                       std::nullopt, std::nullopt};
  const std::vector<analysis::AxiomInstance> sym{tri, square};
  const std::vector<analysis::AxiomInstance> affine{
      {"trapezoid x (2,3)+(-1,4)", preset_problem("trapezoid"), std::nullopt, AffineMap::make(2, 3, -1, 4)},
      {"parabola x (0.5,5)+(1,1)", preset_problem("parabola"), std::nullopt, AffineMap::make(0.5, 5, 1, 1)}};
  const std::vector<analysis::AxiomInstance> pareto{
      tri, {"trapezoid", preset_problem("trapezoid"), std::nullopt, std::nullopt},
      {"parabola", preset_problem("parabola"), std::nullopt, std::nullopt}};
  const std::vector<analysis::AxiomInstance> nested{
      {"trapezoid / box to 0.5", preset_problem("trapezoid"), make_problem(V{{0, 0}, {1, 0}, {1, 0.5}, {0, 0.5}}, {0, 0}),
       std::nullopt},
      {"fig3-left / square 0.7", preset_problem("fig3-left"), make_problem(V{{0, 0}, {0.7, 0}, {0.7, 0.7}, {0, 0.7}}, {0, 0}),
       std::nullopt},
      {"trapezoid / cut at ks", preset_problem("trapezoid"),
       make_problem(V{{0, 0}, {1, 0}, {1, 0.5}, {2.0 / 3, 2.0 / 3}, {0, 2.0 / 3}}, {0, 0}), std::nullopt}};
  const std::vector<analysis::AxiomInstance> fig3{
      {"fig3-left / fig3-right", preset_problem("fig3-left"), preset_problem("fig3-right"), std::nullopt}};
  const std::vector<analysis::AxiomInstance> isc{
      {"trapezoid c=(0.2,0.1)", preset_problem("trapezoid", geometry::kDefaultPresetSegments, {0.2, 0.1}), std::nullopt,
       std::nullopt}};

  std::vector<AxiomExpectation> suite;
  for (Method m : {Method::Nash, Method::KalaiSmorodinsky, Method::Egalitarian, Method::EqualLoss, Method::SDelta}) {
    suite.push_back({1, m, sym, true});
  }
  for (Method m : {Method::Nash, Method::KalaiSmorodinsky, Method::SDelta}) suite.push_back({2, m, affine, true});
  suite.push_back({2, Method::Egalitarian, affine, false});
  for (Method m : {Method::Nash, Method::KalaiSmorodinsky, Method::Egalitarian, Method::EqualLoss}) {
    suite.push_back({3, m, pareto, true});
  }
  // S_Delta averages the absorbing boundary, weak edges included, so on the
  // trapezoid it lands strictly inside F.
  suite.push_back({3, Method::SDelta, pareto, false});
  suite.push_back({4, Method::Nash, nested, true});
  suite.push_back({4, Method::KalaiSmorodinsky, nested, false});
  suite.push_back({5, Method::Nash, fig3, false});
  suite.push_back({5, Method::KalaiSmorodinsky, fig3, true});
  suite.push_back({6, Method::Nash, isc, false});
  suite.push_back({6, Method::KalaiSmorodinsky, isc, false});
  suite.push_back({6, Method::SDelta, isc, true});
  return suite;
}

inline int cmd_check_axioms(const AxiomArgs& a, const std::string& out_dir, unsigned workers, std::ostream& out) {
  const auto dir = prepare_out(out_dir);
  analysis::Options opt;
  opt.spec = grid(a.grid_h);
  opt.workers = workers;
  out << "# fairshare check axioms\n";
  out << format("# tolerance %.3g (s-delta: 3 grid-h); grid-h %s; isc ladder 0.04,0.02,0.01\n",
                analysis::kAxiomTolerance, num(a.grid_h).c_str());
  out << "# axioms: 1 symmetry, 2 scale covariance, 3 pareto, 4 iia, 5 monotonicity, 6 isc\n";
  std::ostringstream csv;
  csv << "axiom,solver,instance,passed,violation\n";
  out << format("%-6s %-12s %-8s %-8s %-12s %s\n", "axiom", "solver", "expect", "observed", "violation", "status");
  int unexpected = 0;
  for (const AxiomExpectation& e : axiom_suite()) {
    const analysis::AxiomReport rep = analysis::check_axiom(e.axiom, e.solver, e.instances, opt);
    const bool ok = rep.passed() == e.expect_pass;
    if (!ok) ++unexpected;
    const std::string solver(solutions::to_string(e.solver));
    out << format("%-6d %-12s %-8s %-8s %-12.3e %s\n", e.axiom, solver.c_str(), e.expect_pass ? "pass" : "fail",
                  rep.passed() ? "pass" : "fail", rep.max_violation(), ok ? "ok" : "UNEXPECTED");
    for (const analysis::AxiomCase& c : rep.cases) {
      csv << format("%d,%s,\"%s\",%s,%.17g\n", e.axiom, solver.c_str(), c.description.c_str(),
                    c.passed ? "true" : "false", c.violation);
    }
  }
  out << format("# %d unexpected outcome(s)\n", unexpected);
  if (dir) {
    std::ofstream f = open_out(*dir / "axioms.csv");
    f << csv.str();
  }
  return unexpected == 0 ? kExitOk : kExitCheckFailed;
}

struct DominationArgs {
  std::size_t count = 100;
  std::optional<std::uint64_t> seed;
  double grid_h = 1.0 / 64;
  std::string dominant = "ks";
};

inline int cmd_check_domination(const DominationArgs& a, const std::string& out_dir, unsigned workers,
                                std::ostream& out) {
  const auto dir = prepare_out(out_dir);
  analysis::SweepConfig cfg;
  cfg.count = a.count;
  cfg.seed = resolve_seed(a.seed).value_or(kCheckSeed);
  cfg.h = a.grid_h;
  cfg.dominant = analysis::parse_solver(a.dominant);
  cfg.workers = workers;
  const analysis::DominationReport rep = analysis::domination_sweep(cfg);
  out << format("# fairshare check domination: count %zu; seed %llu; grid-h %s\n", cfg.count,
                static_cast<unsigned long long>(cfg.seed), num(cfg.h).c_str());
  analysis::write_domination_report(out, rep);
  if (dir) {
    std::ofstream f = open_out(*dir / "domination.csv");
    analysis::write_domination_report(f, rep);
  }
  return rep.violations == 0 ? kExitOk : kExitCheckFailed;
}

struct CrossArgs {
  double grid_h = harmonic::kDefaultSpacing;
  WalkOptions walk;
};

/// |PDE - MC| <= 3 stderr + step + h^2 per coordinate on the three presets.
inline int cmd_check_cross(const CrossArgs& a, const std::string& out_dir, unsigned workers, std::ostream& out) {
  const auto dir = prepare_out(out_dir);
  const std::uint64_t seed = resolve_seed(a.walk.seed).value_or(kCheckSeed);
  const montecarlo::WalkConfig cfg = walk_config(a.walk, seed, workers);
  const harmonic::GridSpec spec = grid(a.grid_h);
  out << "# fairshare check cross-validate\n" << walk_header(cfg);
  out << "# grid-h " << num(a.grid_h) << "; band 3 stderr + step + h^2\n";
  const std::string head = format("%-10s %12s %12s %12s %12s %10s %10s %s\n", "preset", "pde_u1", "pde_u2", "mc_u1",
                                  "mc_u2", "diff", "band", "status");
  out << head;
  std::ostringstream csv;
  csv << "preset,pde_u1,pde_u2,mc_u1,mc_u2,stderr1,stderr2,band1,band2,status\n";
  int failed = 0;
  for (std::string_view name : analysis::kSweepPresets) {
    const geometry::BargainingProblem p = geometry::preset_problem(name);
    const solutions::Solution pde = harmonic::s_delta(p, spec);
    const solutions::Solution mc = montecarlo::estimate_s_delta_mc(p, cfg);
    const double extra = cfg.step + a.grid_h * a.grid_h;
    const double band1 = 3 * mc.diagnostic("stderr1") + extra;
    const double band2 = 3 * mc.diagnostic("stderr2") + extra;
    const double d1 = std::abs(pde.payoff.u1 - mc.payoff.u1);
    const double d2 = std::abs(pde.payoff.u2 - mc.payoff.u2);
    const bool ok = d1 <= band1 && d2 <= band2;
    if (!ok) ++failed;
    out << format("%-10s %12.6f %12.6f %12.6f %12.6f %10.6f %10.6f %s\n", std::string(name).c_str(), pde.payoff.u1,
                  pde.payoff.u2, mc.payoff.u1, mc.payoff.u2, std::max(d1, d2), std::min(band1, band2),
                  ok ? "ok" : "FAIL");
    csv << format("%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", std::string(name).c_str(), pde.payoff.u1,
                  pde.payoff.u2, mc.payoff.u1, mc.payoff.u2, mc.diagnostic("stderr1"), mc.diagnostic("stderr2"), band1,
                  band2, ok ? "ok" : "FAIL");
  }
  out << format("# %d preset(s) outside the band\n", failed);
  if (dir) {
    std::ofstream f = open_out(*dir / "cross_validate.csv");
    f << csv.str();
  }
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace detail

/// Runs one invocation. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"fairshare: two-player bargaining solutions, harmonic S_Delta and incentive analysis", "fairshare"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string out_dir;
  bool deterministic = false;
  unsigned workers = 0;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "directory for CSV / JSON / SVG artifacts");
    sub->add_option("--workers", workers, "worker threads, 0 = all cores; results never depend on it")
        ->capture_default_str();
    sub->add_flag("--deterministic", deterministic, "run single-threaded (output is identical either way)");
  };

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem with one or more methods");
  add_problem_options(solve, solve_args.problem);
  solve->add_option("--methods", solve_args.methods,
                    "comma list of nash, ks, egalitarian, equal-loss, yu-lp, s-delta, s-delta-mc, iterated-s-delta, "
                    "or all")
      ->capture_default_str();
  solve->add_option("--grid-h", solve_args.grid_h, "grid spacing for s-delta")->capture_default_str();
  solve->add_option("--p", solve_args.yu_p, "exponent of yu-lp")->capture_default_str();
  add_walk_options(solve, solve_args.walk, true);
  common(solve);

  WalkArgs walk_args;
  CLI::App* walk = app.add_subcommand("walk", "Monte Carlo estimate of S_Delta from reflected random walks");
  add_problem_options(walk, walk_args.problem);
  add_walk_options(walk, walk_args.walk, true);
  common(walk);

  RegionArgs region_args;
  CLI::App* regions = app.add_subcommand("regions", "sign map of the Laplacian of a solution in the disagreement point");
  add_problem_options(regions, region_args.problem);
  regions->add_option("--solver", region_args.solver, "nash, ks, egalitarian, equal-loss or s-delta")
      ->capture_default_str();
  regions->add_option("--grid-step", region_args.grid_step, "spacing of the sampled disagreement points")
      ->capture_default_str();
  regions->add_option("--fd-arm", region_args.fd_arm,
                      "finite-difference arm (default 0.01, s-delta: its grid spacing)");
  regions->add_option("--grid-h", region_args.grid_h, "grid spacing for s-delta")->capture_default_str();
  common(regions);

  PerturbArgs perturb_args;
  CLI::App* perturb = app.add_subcommand("perturb", "expected solution under a random eps-perturbation of c");
  add_problem_options(perturb, perturb_args.problem);
  perturb->add_option("--solver", perturb_args.solver, "nash, ks, egalitarian, equal-loss or s-delta")
      ->capture_default_str();
  perturb->add_option("--eps", perturb_args.eps, "decreasing ladder of radii")->delimiter(',')->capture_default_str();
  perturb->add_option("--angles", perturb_args.angles, "quadrature nodes on the circle")->capture_default_str();
  perturb->add_option("--grid-h", perturb_args.grid_h, "grid spacing for s-delta")->capture_default_str();
  common(perturb);

  CLI::App* check = app.add_subcommand("check", "pass/fail suites; exit 1 if any check fails");
  check->require_subcommand(1);
  AxiomArgs axiom_args;
  CLI::App* axioms = check->add_subcommand("axioms", "axioms 1-6 on constructed instances");
  axioms->add_option("--grid-h", axiom_args.grid_h, "grid spacing for s-delta")->capture_default_str();
  common(axioms);
  DominationArgs dom_args;
  CLI::App* domination = check->add_subcommand("domination", "does S_KS weakly dominate S_Delta");
  domination->add_option("--count", dom_args.count, "random problems besides the presets")->capture_default_str();
  domination->add_option("--seed", dom_args.seed, "generator seed (default 1, or FAIRSHARE_SEED)");
  domination->add_option("--grid-h", dom_args.grid_h, "grid spacing for s-delta")->capture_default_str();
  domination->add_option("--dominant", dom_args.dominant, "solver expected to dominate")->capture_default_str();
  common(domination);
  CrossArgs cross_args;
  CLI::App* cross = check->add_subcommand("cross-validate", "grid S_Delta against the walk estimate on the presets");
  cross->add_option("--grid-h", cross_args.grid_h, "grid spacing")->capture_default_str();
  add_walk_options(cross, cross_args.walk, false);
  common(cross);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }
  if (deterministic) workers = 1;

  try {
    if (*solve) return cmd_solve(solve_args, out_dir, workers, out);
    if (*walk) return cmd_walk(walk_args, out_dir, workers, out);
    if (*regions) return cmd_regions(region_args, out_dir, workers, out);
    if (*perturb) return cmd_perturb(perturb_args, out_dir, out);
    if (*axioms) return cmd_check_axioms(axiom_args, out_dir, workers, out);
    if (*domination) return cmd_check_domination(dom_args, out_dir, workers, out);
    if (*cross) return cmd_check_cross(cross_args, out_dir, workers, out);
  } catch (const Error& e) {
    err << "fairshare: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "fairshare: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitInvalidInput;
}

}  // namespace fairshare::cli
