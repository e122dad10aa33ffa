#include "fairshare/analysis.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "test_support.hpp"

using fairshare::Error;
using fairshare::ErrorCode;
using fairshare::Payoff;
using namespace fairshare::geometry;
using namespace fairshare::analysis;

namespace {

const BargainingProblem kTrapOff = preset_problem("trapezoid", 512, {0.2, 0.1});

// Closed-form Nash payoff of player 1 on {y <= 1 - x^2}: the tangency of
// the product level set, root of 3x^2 - 2 c1 x - (1 - c2) = 0.
double parabola_phi1(Payoff c) { return (c.u1 + std::sqrt(3.0 + c.u1 * c.u1 - 3.0 * c.u2)) / 3.0; }

Options coarse() {
  Options o;
  o.spec = fairshare::harmonic::GridSpec::with_spacing(1.0 / 64);
  return o;
}

}  // namespace

TEST(PerturbedExpectation, NashAtTrapezoidCorner) {
  // x* = 1 + c1/2 - c2 clamped at 1, so the player-1 loss is eps times the
  // circle mean of max(0, sin - cos/2) = sqrt(5)/2 / pi.
  const double k = std::sqrt(5.0) / (2.0 * M_PI);
  for (double eps : {0.005, 0.01, 0.02}) {
    const Payoff e = perturbed_expectation("nash", kTrapOff, eps);
    // the kink costs the trapezoid rule O(eps / n^2)
    EXPECT_NEAR(e.u1, 1.0 - k * eps, 1e-7) << eps;
    EXPECT_NEAR(e.u2, 0.5 + 0.5 * k * eps, 1e-7) << eps;
  }
}

TEST(PerturbedExpectation, KsSecondOrder) {
  const Payoff e = perturbed_expectation("ks", kTrapOff, 0.05);
  EXPECT_NEAR(e.u1, 22.0 / 30 - 0.115 * 0.05 * 0.05, 2e-5);
  EXPECT_NEAR(e.u2, 19.0 / 30 + 0.057 * 0.05 * 0.05, 2e-5);
}

TEST(PerturbedExpectation, SDeltaMeanValue) {
  const PayoffMap map(Method::SDelta, kTrapOff, coarse());
  const Payoff center = map(kTrapOff.disagreement());
  for (double eps : {0.01, 0.05}) {
    const Payoff e = perturbed_expectation(map, kTrapOff.disagreement(), eps);
    EXPECT_NEAR(e.u1, center.u1, 1e-5);
    EXPECT_NEAR(e.u2, center.u2, 1e-5);
  }
  // At the corner of the quadrant the map is the grid S_Delta itself.
  const BargainingProblem trap = preset_problem("trapezoid");
  const PayoffMap corner(Method::SDelta, trap, coarse());
  const Payoff s = fairshare::harmonic::s_delta(trap, coarse().spec).payoff;
  EXPECT_NEAR(corner({0, 0}).u1, s.u1, 1e-12);
  EXPECT_NEAR(corner({0, 0}).u2, s.u2, 1e-12);
}

TEST(PerturbedExpectation, QuadratureStableUnderDoubling) {
  for (std::string_view solver : {"ks", "egalitarian", "equal-loss"}) {
    const Payoff a = perturbed_expectation(solver, kTrapOff, 0.02, 512);
    const Payoff b = perturbed_expectation(solver, kTrapOff, 0.02, 1024);
    EXPECT_LE(max_abs_diff(a, b), 1e-6) << solver;
  }
}

TEST(PerturbedExpectation, Errors) {
  const auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([] { (void)perturbed_expectation("nash", preset_problem("trapezoid"), 0.01); }),
            ErrorCode::DiskOutsideFeasible);
  EXPECT_EQ(code([] { (void)perturbed_expectation("nash", kTrapOff, 0.15); }), ErrorCode::DiskOutsideFeasible);
  EXPECT_EQ(code([] { (void)perturbed_expectation("yu-lp", kTrapOff, 0.01); }), ErrorCode::UnknownSolver);
  EXPECT_EQ(code([] { (void)perturbed_expectation("bogus", kTrapOff, 0.01); }), ErrorCode::UnknownSolver);
  EXPECT_THROW((void)perturbed_expectation("nash", kTrapOff, 0.01, 32), Error);
}

TEST(IscResidual, ClassifiesTheThreeSolvers) {
  const PerturbationReport nash = isc_residual("nash", kTrapOff, kIscLadder);
  EXPECT_EQ(nash.verdict[0], IscTerm::Divergent);
  EXPECT_NEAR(nash.first_order.u1, -std::sqrt(5.0) / (2 * M_PI), 1e-6);
  EXPECT_FALSE(nash.satisfies_isc());

  const PerturbationReport ks = isc_residual("ks", kTrapOff, kIscLadder);
  EXPECT_EQ(ks.verdict[0], IscTerm::FiniteConstant);
  EXPECT_EQ(ks.verdict[1], IscTerm::FiniteConstant);
  EXPECT_NEAR(ks.second_order.u1, -0.115, 0.005);
  EXPECT_NEAR(ks.second_order.u2, 0.057, 0.003);

  const PerturbationReport sd = isc_residual("s-delta", kTrapOff, kIscLadder, kDefaultAngles, coarse());
  EXPECT_TRUE(sd.satisfies_isc());
  EXPECT_LE(std::abs(sd.second_order.u1), sd.tolerance.u1);
  EXPECT_LE(std::abs(sd.second_order.u2), sd.tolerance.u2);
}

TEST(IscResidual, LadderValidation) {
  EXPECT_THROW((void)isc_residual("ks", kTrapOff, {0.01}), Error);
  EXPECT_THROW((void)isc_residual("ks", kTrapOff, {0.01, 0.02}), Error);
  EXPECT_THROW((void)isc_residual("ks", kTrapOff, {0.02, 0.02}), Error);
}

TEST(IscResidual, FitsAndCsv) {
  const PerturbationReport r = isc_residual("nash", kTrapOff, {0.02, 0.01, 0.005});
  const ExpectationFit lin = fit_expectation(r, 1);
  EXPECT_NEAR(lin.coefficient.u1, -0.3559, 1e-4);
  EXPECT_NEAR(lin.coefficient.u2, 0.1779, 1e-4);
  EXPECT_NEAR(lin.intercept.u1, 1.0, 1e-9);
  std::ostringstream out;
  write_perturbation_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "eps,Eu1,Eu2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(NashPayoffMap, MatchesParabolaClosedForm) {
  const BargainingProblem para = preset_problem("parabola", 1 << 18);
  const PayoffMap map(Method::Nash, para);
  EXPECT_NEAR(map({0, 0}).u1, std::sqrt(3.0) / 3, 1e-6);
  EXPECT_NEAR(map({0, 0}).u2, 2.0 / 3, 1e-6);
  std::mt19937_64 rng(12);
  for (int k = 0; k < 300; ++k) {
    const Payoff c = fairshare::testing::random_interior_point(para.feasible(), rng);
    EXPECT_NEAR(map(c).u1, parabola_phi1(c), 1e-6) << c.u1 << ", " << c.u2;
  }
}

TEST(IncentiveRegions, NashParabolaBoundaryAtQuarter) {
  // The Laplacian of the closed form is (1/4 - c2) / s^3.
  const PayoffMap map(Method::Nash, preset_problem("parabola", 1 << 20));
  RegionOptions ro;
  ro.grid_step = 0.02;
  ro.fd_arm = 0.01;
  const RegionMap rm = incentive_regions(map, ro);
  const std::vector<Payoff> edge = region_boundary(rm, 0);
  ASSERT_GT(edge.size(), 20u);
  for (const Payoff& p : edge) EXPECT_NEAR(p.u2, 0.25, 2 * ro.grid_step) << p.u1;
  for (const RegionPoint& p : rm.points) {
    if (p.label[0] == Label::OutOfRange) continue;
    const double s = std::sqrt(3.0 + p.c.u1 * p.c.u1 - 3.0 * p.c.u2);
    const double exact = (0.25 - p.c.u2) / (s * s * s);
    if (std::abs(exact) > 0.01) {
      EXPECT_EQ(p.label[0], exact > 0 ? Label::Gain : Label::Lose) << p.c.u1 << ", " << p.c.u2;
    }
  }
}

TEST(IncentiveRegions, SDeltaIsNeutralEverywhere) {
  RegionOptions ro;
  ro.grid_step = 0.04;
  const RegionMap rm = incentive_regions("s-delta", preset_problem("trapezoid"), ro, coarse());
  EXPECT_EQ(rm.arm.u1, 1.0 / 64);
  int in_range = 0;
  for (const RegionPoint& p : rm.points) {
    if (p.label[0] == Label::OutOfRange) continue;
    ++in_range;
    EXPECT_EQ(p.label[0], Label::Neutral) << p.c.u1 << ", " << p.c.u2 << " " << p.laplacian.u1;
    EXPECT_EQ(p.label[1], Label::Neutral);
  }
  EXPECT_GT(in_range, 100);
}

TEST(IncentiveRegions, KsTriangleIsSwapSymmetric) {
  RegionOptions ro;
  ro.grid_step = 0.05;
  const RegionMap rm = incentive_regions("ks", preset_problem("triangle"), ro);
  std::map<std::pair<long, long>, const RegionPoint*> at;
  for (const RegionPoint& p : rm.points) at[{std::lround(p.c.u1 / 0.05), std::lround(p.c.u2 / 0.05)}] = &p;
  int checked = 0;
  for (const auto& [key, p] : at) {
    const auto it = at.find({key.second, key.first});
    ASSERT_NE(it, at.end());
    EXPECT_EQ(p->label[0], it->second->label[1]);
    if (p->label[0] != Label::OutOfRange) {
      EXPECT_NEAR(p->laplacian.u1, it->second->laplacian.u2, 1e-4);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(IncentiveRegions, ValidationAndCsv) {
  RegionOptions ro;
  ro.grid_step = 0.001;
  EXPECT_THROW((void)incentive_regions("nash", preset_problem("triangle"), ro), Error);
  ro.grid_step = 0.25;
  const RegionMap rm = incentive_regions("nash", preset_problem("triangle"), ro);
  for (const RegionPoint& p : rm.points) EXPECT_GE(preset_problem("triangle").feasible().inward_distance(p.c), 0.0);
  std::ostringstream out;
  write_region_csv(out, rm);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "c1,c2,lap1,lap2,label1,label2");
  EXPECT_NE(out.str().find("out-of-range"), std::string::npos);
}

TEST(CheckAxiom, MonotonicityOnFigureThreePair) {
  const std::vector<AxiomInstance> pair{
      {"fig3", preset_problem("fig3-left"), preset_problem("fig3-right"), std::nullopt}};
  const AxiomReport nash = check_axiom(5, Method::Nash, pair);
  ASSERT_EQ(nash.cases.size(), 1u);
  EXPECT_FALSE(nash.passed());
  EXPECT_NEAR(nash.cases[0].violation, 0.05, 1e-9);
  EXPECT_NEAR(nash.cases[0].first.u2, 0.7, 1e-9);
  EXPECT_NEAR(nash.cases[0].second.u2, 0.65, 1e-9);
  const AxiomReport ks = check_axiom(5, Method::KalaiSmorodinsky, pair);
  EXPECT_TRUE(ks.passed());
  EXPECT_EQ(ks.cases[0].violation, 0.0);
  EXPECT_NEAR(ks.cases[0].first.u1, 0.7, 1e-9);
  EXPECT_NEAR(ks.cases[0].second.u1, 0.7, 1e-9);
}

TEST(CheckAxiom, NashIsIndependentOfIrrelevantAlternatives) {
  std::mt19937_64 rng(3);
  std::vector<AxiomInstance> pairs;
  for (int k = 0; k < 20; ++k) {
    const BargainingProblem f = fairshare::testing::random_problem(rng);
    const Payoff s = fairshare::solutions::nash(f).payoff;
    // Keep S(F) and a random subset of the other vertices.
    std::vector<Payoff> sub{s, {0, 0}, {s.u1, 0}, {0, s.u2}};
    std::bernoulli_distribution keep(0.5);
    for (const Payoff& v : f.feasible().vertices()) {
      if (keep(rng)) sub.push_back(v);
    }
    pairs.push_back({"nested-" + std::to_string(k), f,
                     BargainingProblem::create(ConvexPolygon::hull_of(sub), {0, 0}), std::nullopt});
  }
  pairs.push_back({"fig3-restricted", preset_problem("fig3-left"),
                   make_problem(std::vector<Payoff>{{0, 0}, {0.7, 0}, {0.7, 0.7}, {0, 0.7}}, {0, 0}), std::nullopt});
  const AxiomReport rep = check_axiom(4, Method::Nash, pairs);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.max_violation(), 1e-9);
  const std::vector<AxiomInstance> ks_pair{{"trap-cut", preset_problem("trapezoid"),
                                            make_problem(std::vector<Payoff>{{0, 0}, {1, 0}, {1, 0.5}, {0, 0.5}}, {0, 0}),
                                            std::nullopt}};
  const AxiomReport nash_cut = check_axiom(4, Method::Nash, ks_pair);
  EXPECT_TRUE(nash_cut.passed());
}

TEST(CheckAxiom, SymmetryEquivarianceParetoAndIsc) {
  std::vector<AxiomInstance> sym{{"triangle", preset_problem("triangle"), std::nullopt, std::nullopt},
                                 {"square", make_problem(std::vector<Payoff>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0.2, 0.2}),
                                  std::nullopt, std::nullopt}};
  std::vector<AxiomInstance> affine{{"trap", preset_problem("trapezoid"), std::nullopt, AffineMap::make(2, 3, -1, 4)},
                                    {"para", preset_problem("parabola"), std::nullopt, AffineMap::make(0.5, 5, 1, 1)}};
  for (Method m : {Method::Nash, Method::KalaiSmorodinsky, Method::Egalitarian, Method::EqualLoss}) {
    EXPECT_TRUE(check_axiom(1, m, sym).passed()) << fairshare::solutions::to_string(m);
    EXPECT_TRUE(check_axiom(3, m, affine).passed()) << fairshare::solutions::to_string(m);
  }
  EXPECT_TRUE(check_axiom(2, Method::Nash, affine).passed());
  EXPECT_TRUE(check_axiom(2, Method::KalaiSmorodinsky, affine).passed());
  // Egalitarian is not scale invariant.
  EXPECT_FALSE(check_axiom(2, Method::Egalitarian, affine).passed());
  EXPECT_TRUE(check_axiom(1, Method::SDelta, sym, coarse()).passed());
  EXPECT_TRUE(check_axiom(2, Method::SDelta, affine, coarse()).passed());

  const std::vector<AxiomInstance> isc{{"trap-0.2-0.1", kTrapOff, std::nullopt, std::nullopt}};
  EXPECT_FALSE(check_axiom(6, Method::Nash, isc).passed());
  EXPECT_FALSE(check_axiom(6, Method::KalaiSmorodinsky, isc).passed());
  EXPECT_TRUE(check_axiom(6, Method::SDelta, isc, coarse()).passed());
}

TEST(CheckAxiom, MalformedInstances) {
  const auto code = [](int axiom, const AxiomInstance& in) {
    try {
      (void)check_axiom(axiom, Method::Nash, {in});
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  const BargainingProblem trap = preset_problem("trapezoid");
  EXPECT_EQ(code(1, {"asym", trap, std::nullopt, std::nullopt}), ErrorCode::MalformedInstance);
  EXPECT_EQ(code(2, {"nomap", trap, std::nullopt, std::nullopt}), ErrorCode::MalformedInstance);
  EXPECT_EQ(code(4, {"notsub", preset_problem("triangle"), trap, std::nullopt}), ErrorCode::MalformedInstance);
  EXPECT_EQ(code(4, {"missing", trap, std::nullopt, std::nullopt}), ErrorCode::MalformedInstance);
  EXPECT_EQ(code(5, {"reversed", preset_problem("fig3-right"), preset_problem("fig3-left"), std::nullopt}),
            ErrorCode::MalformedInstance);
  EXPECT_THROW((void)check_axiom(7, Method::Nash, {}), Error);
}

TEST(RandomProblem, DeterministicNormalizedAndComprehensive) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const BargainingProblem a = random_problem(7, i);
    const BargainingProblem b = random_problem(7, i);
    EXPECT_EQ(a.feasible().vertices(), b.feasible().vertices());
    EXPECT_TRUE(is_normalized(a));
    EXPECT_TRUE(reflecting_boundary_on_axes(a.feasible()));
    EXPECT_NEAR(ideal_point(a).u1, 1.0, 1e-12);
    EXPECT_NEAR(ideal_point(a).u2, 1.0, 1e-12);
  }
  EXPECT_NE(random_problem(7, 0).feasible().vertices(), random_problem(8, 0).feasible().vertices());
}

TEST(Domination, PresetMargins) {
  SweepConfig cfg;
  cfg.count = 1;
  const DominationReport rep = domination_sweep(cfg);
  ASSERT_EQ(rep.entries.size(), 4u);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_NEAR(rep.entries[0].margin.u1, 0.0, 3 * cfg.h);  // triangle
  EXPECT_NEAR(rep.entries[0].margin.u2, 0.0, 3 * cfg.h);
  EXPECT_NEAR(rep.entries[1].margin.u1, 2.0 / 3 - 0.60, 0.015);  // trapezoid
  EXPECT_NEAR(rep.entries[1].margin.u2, 2.0 / 3 - 0.63, 0.015);
}

TEST(Domination, NashIsFlaggedOnTrapezoid) {
  SweepConfig cfg;
  cfg.count = 1;
  cfg.dominant = Method::Nash;
  const DominationReport rep = domination_sweep(cfg);
  EXPECT_TRUE(rep.entries[1].violation);
  EXPECT_LT(rep.entries[1].margin.u2, -0.1);
}

TEST(Domination, InjectedViolationIsReported) {
  std::vector<DominationEntry> raw{{"ok", {0.7, 0.7}, {0.6, 0.6}, {}, false},
                                   {"synthetic", {0.5, 0.9}, {0.6, 0.6}, {}, false}};
  const DominationReport rep = summarize_domination(raw, 0.01);
  EXPECT_EQ(rep.violations, 1u);
  EXPECT_FALSE(rep.entries[0].violation);
  EXPECT_TRUE(rep.entries[1].violation);
  EXPECT_NEAR(rep.min_margin.u1, -0.1, 1e-12);
  EXPECT_NEAR(rep.min_margin.u2, 0.1, 1e-12);
  std::ostringstream out;
  write_domination_report(out, rep);
  EXPECT_NE(out.str().find("synthetic,0.500000000,0.900000000,0.600000000,0.600000000,-0.100000000,0.300000000,VIOLATION"),
            std::string::npos);
  EXPECT_NE(out.str().find("violations 1"), std::string::npos);
}

TEST(Domination, SweepIsReproducibleAcrossWorkers) {
  SweepConfig a;
  a.count = 6;
  a.seed = 9;
  a.workers = 1;
  SweepConfig b = a;
  b.workers = 3;
  std::ostringstream oa, ob;
  write_domination_report(oa, domination_sweep(a));
  write_domination_report(ob, domination_sweep(b));
  EXPECT_EQ(oa.str(), ob.str());
}
