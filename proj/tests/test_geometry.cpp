#include "fairshare/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using fairshare::Error;
using fairshare::ErrorCode;
using fairshare::Payoff;
using namespace fairshare::geometry;

namespace {

// Ideal point by enumerating polygon vertices and edge/cut-line
// intersections that lie in the individually rational quadrant.
Payoff ideal_by_enumeration(const ConvexPolygon& poly, Payoff c) {
  std::vector<Payoff> candidates;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Payoff a = poly.vertex(i);
    const Payoff b = poly.vertex(i + 1);
    candidates.push_back(a);
    for (int axis = 0; axis < 2; ++axis) {
      const double ca = axis == 0 ? a.u1 : a.u2;
      const double cb = axis == 0 ? b.u1 : b.u2;
      const double bound = axis == 0 ? c.u1 : c.u2;
      if ((ca - bound) * (cb - bound) < 0.0) {
        const double t = (bound - ca) / (cb - ca);
        candidates.push_back(a + t * (b - a));
      }
    }
  }
  Payoff best{-1e300, -1e300};
  for (const Payoff& p : candidates) {
    if (p.u1 < c.u1 - 1e-12 || p.u2 < c.u2 - 1e-12) continue;
    best.u1 = std::max(best.u1, p.u1);
    best.u2 = std::max(best.u2, p.u2);
  }
  return best;
}

void expect_near(Payoff a, Payoff b, double tol) {
  EXPECT_NEAR(a.u1, b.u1, tol);
  EXPECT_NEAR(a.u2, b.u2, tol);
}

}  // namespace

TEST(MakeProblem, TrapezoidIsCanonicalCounterclockwise) {
  const std::vector<Payoff> pts{{0, 1}, {1, 0.5}, {0, 0}, {1, 0}};
  const BargainingProblem p = make_problem(pts, {0, 0});
  const std::vector<Payoff> expected{{0, 0}, {1, 0}, {1, 0.5}, {0, 1}};
  EXPECT_EQ(p.feasible().vertices(), expected);
  EXPECT_DOUBLE_EQ(p.feasible().area(), 0.75);
}

TEST(MakeProblem, TriangleAndCollinearCleanup) {
  const std::vector<Payoff> pts{{0, 0}, {0.5, 0}, {1, 0}, {0.5, 0.5}, {0, 1}, {0, 1}};
  const BargainingProblem p = make_problem(pts, {0, 0});
  ASSERT_EQ(p.feasible().size(), 3u);
  EXPECT_EQ(p.feasible().vertex(1), (Payoff{1, 0}));
}

TEST(MakeProblem, Errors) {
  const std::vector<Payoff> segment{{0, 0}, {1, 0}};
  try {
    (void)make_problem(segment, {0, 0});
    FAIL() << "expected DegenerateSet";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSet);
  }
  const std::vector<Payoff> with_interior{{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}};
  try {
    (void)make_problem(with_interior, {0, 0});
    FAIL() << "expected NonConvexInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvexInput);
  }
  const std::vector<Payoff> tri{{0, 0}, {1, 0}, {0, 1}};
  try {
    (void)make_problem(tri, {0.6, 0.6});
    FAIL() << "expected DisagreementOutside";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DisagreementOutside);
  }
}

TEST(Contains, TrapezoidExamples) {
  const BargainingProblem p = preset_problem("trapezoid");
  EXPECT_TRUE(contains(p, {0.5, 0.5}));
  EXPECT_FALSE(contains(p, {1, 0.6}));
  EXPECT_TRUE(contains(p, {1, 0.5}));
  EXPECT_TRUE(contains(p, {0.5, 0.75 + 5e-13}));
  EXPECT_FALSE(contains(p, {0.5, 0.75 + 1e-9}));
}

TEST(IdealPoint, Examples) {
  const BargainingProblem trap = preset_problem("trapezoid");
  expect_near(ideal_point(trap), {1, 1}, 1e-15);
  expect_near(ideal_point(trap.with_disagreement({0.2, 0.1})), {1, 0.9}, 1e-15);
  expect_near(ideal_point(preset_problem("triangle")), {1, 1}, 1e-15);
}

TEST(IdealPoint, MatchesEnumerationOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const BargainingProblem p = fairshare::testing::random_problem(rng);
    const Payoff c = fairshare::testing::random_interior_point(p.feasible(), rng);
    const BargainingProblem q = p.with_disagreement(c);
    expect_near(ideal_point(q), ideal_by_enumeration(q.feasible(), c), 1e-12);
  }
}

TEST(ParetoFrontier, Examples) {
  const ParetoChain trap = pareto_frontier(preset_problem("trapezoid"));
  ASSERT_EQ(trap.points.size(), 2u);
  EXPECT_EQ(trap.front(), (Payoff{1, 0.5}));
  EXPECT_EQ(trap.back(), (Payoff{0, 1}));

  const ParetoChain tri = pareto_frontier(preset_problem("triangle"));
  ASSERT_EQ(tri.points.size(), 2u);
  EXPECT_EQ(tri.front(), (Payoff{1, 0}));
  EXPECT_EQ(tri.back(), (Payoff{0, 1}));

  const std::vector<Payoff> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const ParetoChain sq = pareto_frontier(make_problem(square, {0, 0}));
  ASSERT_EQ(sq.points.size(), 1u);
  EXPECT_EQ(sq.front(), (Payoff{1, 1}));
}

TEST(ParetoFrontier, IndividuallyRationalClipping) {
  const ParetoChain chain = pareto_frontier(preset_problem("trapezoid", 0, {0.2, 0.1}));
  ASSERT_EQ(chain.points.size(), 2u);
  expect_near(chain.front(), {1, 0.5}, 1e-15);
  expect_near(chain.back(), {0.2, 0.9}, 1e-15);

  // Disagreement on the frontier leaves a single point.
  const ParetoChain point = pareto_frontier(preset_problem("triangle", 0, {0.5, 0.5}));
  ASSERT_EQ(point.points.size(), 1u);
  expect_near(point.front(), {0.5, 0.5}, 1e-15);
}

TEST(ParetoFrontier, ChainIsMonotoneAndUndominated) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const BargainingProblem base = fairshare::testing::random_problem(rng);
    const BargainingProblem p = base.with_disagreement(fairshare::testing::random_interior_point(base.feasible(), rng));
    const ParetoChain chain = pareto_frontier(p);
    ASSERT_FALSE(chain.empty());
    for (std::size_t i = 0; i + 1 < chain.points.size(); ++i) {
      EXPECT_GT(chain.points[i].u1, chain.points[i + 1].u1);
      EXPECT_LT(chain.points[i].u2, chain.points[i + 1].u2);
    }
    for (const Payoff& q : chain.points) EXPECT_LT(p.feasible().boundary_distance(q), 1e-12);
    for (int s = 0; s < 50; ++s) {
      const Payoff f = fairshare::testing::random_interior_point(p.feasible(), rng);
      for (const Payoff& q : chain.points) {
        const bool weakly = f.u1 >= q.u1 - 1e-12 && f.u2 >= q.u2 - 1e-12;
        const bool strictly = f.u1 > q.u1 + 1e-12 || f.u2 > q.u2 + 1e-12;
        EXPECT_FALSE(weakly && strictly);
      }
    }
  }
}

TEST(Normalize, Examples) {
  const BargainingProblem trap = preset_problem("trapezoid");
  const Normalized id = normalize(trap);
  EXPECT_EQ(id.map, AffineMap::identity());
  EXPECT_EQ(id.problem.feasible().vertices(), trap.feasible().vertices());

  const Normalized shifted = normalize(trap.with_disagreement({0.2, 0.1}));
  EXPECT_NEAR(shifted.map.a1, 0.8, 1e-15);
  EXPECT_NEAR(shifted.map.a2, 0.8, 1e-15);
  EXPECT_NEAR(shifted.map.b1, 0.2, 1e-15);
  EXPECT_NEAR(shifted.map.b2, 0.1, 1e-15);
  expect_near(ideal_point(shifted.problem), {1, 1}, 1e-12);
  EXPECT_TRUE(is_normalized(shifted.problem));

  try {
    (void)normalize(preset_problem("triangle", 0, {0.5, 0.5}));
    FAIL() << "expected DegenerateNormalization";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateNormalization);
  }
}

TEST(Normalize, RoundTripReproducesClippedVertices) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const BargainingProblem base = fairshare::testing::random_problem(rng);
    const BargainingProblem p = base.with_disagreement(fairshare::testing::random_interior_point(base.feasible(), rng));
    const Normalized n = normalize(p);
    for (const Payoff& v : n.problem.feasible().vertices()) {
      const Payoff back = apply_map(n.map, v);
      EXPECT_TRUE(p.feasible().contains(back, 1e-12));
      const bool on_cut = std::abs(back.u1 - p.disagreement().u1) < 1e-12 ||
                          std::abs(back.u2 - p.disagreement().u2) < 1e-12;
      EXPECT_TRUE(on_cut || p.feasible().boundary_distance(back) < 1e-11);
      EXPECT_GE(back.u1, p.disagreement().u1 - 1e-12);
      EXPECT_GE(back.u2, p.disagreement().u2 - 1e-12);
    }
  }
}

TEST(AffineMapOps, Examples) {
  const AffineMap m = AffineMap::make(2, 3, 1, -1);
  EXPECT_EQ(apply_map(m, {1, 1}), (Payoff{3, 2}));
  EXPECT_EQ(apply_map(AffineMap::identity(), {0.3, 0.7}), (Payoff{0.3, 0.7}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const AffineMap r = AffineMap::make(std::exp(u(rng) / 3), std::exp(u(rng) / 3), u(rng), u(rng));
    const Payoff p{u(rng), u(rng)};
    expect_near(apply_map(invert_map(r), apply_map(r, p)), p, 1e-12);
  }
  EXPECT_THROW((void)AffineMap::make(0, 1, 0, 0), Error);
}

TEST(Symmetrize, TriangleBecomesDiamond) {
  const SymmetricDomain d = symmetrize(preset_problem("triangle"));
  const std::vector<Payoff> expected{{-1, 0}, {0, -1}, {1, 0}, {0, 1}};
  EXPECT_EQ(d.boundary.vertices(), expected);
  EXPECT_DOUBLE_EQ(d.boundary.area(), 2.0);
}

TEST(Symmetrize, TrapezoidReflectsVertexList) {
  const SymmetricDomain d = symmetrize(preset_problem("trapezoid"));
  const std::vector<Payoff> expected{{-1, -0.5}, {0, -1}, {1, -0.5}, {1, 0.5}, {0, 1}, {-1, 0.5}};
  EXPECT_EQ(d.boundary.vertices(), expected);
  // Membership sampling against (|x|, |y|) in F.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 5000; ++i) {
    const Payoff p{u(rng), u(rng)};
    const bool by_rule = d.quadrant.contains({std::abs(p.u1), std::abs(p.u2)});
    EXPECT_EQ(d.boundary.contains(p), by_rule);
    EXPECT_EQ(d.boundary.contains({-p.u1, p.u2}), by_rule);
    EXPECT_EQ(d.boundary.contains({p.u1, -p.u2}), by_rule);
  }
}

TEST(Symmetrize, ParabolaIsSymmetricOval) {
  const SymmetricDomain d = symmetrize(preset_problem("parabola"));
  EXPECT_EQ(d.boundary.size(), 4u * 512u);
  EXPECT_TRUE(d.boundary.contains({0, 0}));
  EXPECT_GT(d.boundary.inward_distance({0, 0}), 0.5);
}

TEST(Symmetrize, RequiresNormalizedProblem) {
  try {
    (void)symmetrize(preset_problem("trapezoid", 0, {0.2, 0.1}));
    FAIL() << "expected NotNormalized";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
  }
  // c = 0 but an oblique reflecting edge leaves the origin off the axes.
  const std::vector<Payoff> wedge{{0, 0}, {1, 0.2}, {0.3, 1}};
  EXPECT_THROW((void)symmetrize(make_problem(wedge, {0, 0})), Error);
}

TEST(CurvePreset, Examples) {
  const std::vector<Payoff> tri{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_EQ(curve_preset("triangle"), tri);
  const std::vector<Payoff> para4{{0, 0}, {1, 0}, {0.75, 7.0 / 16}, {0.5, 0.75}, {0.25, 15.0 / 16}, {0, 1}};
  EXPECT_EQ(curve_preset("parabola", 4), para4);
  for (const Payoff& p : curve_preset("parabola", 512)) {
    if (p == Payoff{0, 0}) continue;
    EXPECT_EQ(p.u2, 1.0 - p.u1 * p.u1);
  }
  EXPECT_THROW((void)curve_preset("hexagon"), Error);
  EXPECT_THROW((void)curve_preset("parabola", 1), Error);
}

TEST(CurvePreset, Fig3RightContainsFig3Left) {
  const BargainingProblem left = preset_problem("fig3-left");
  const BargainingProblem right = preset_problem("fig3-right");
  for (const Payoff& v : left.feasible().vertices()) EXPECT_TRUE(right.feasible().contains(v));
  const auto& rv = right.feasible().vertices();
  EXPECT_NE(std::find(rv.begin(), rv.end(), Payoff{0.8, 0.65}), rv.end());
  EXPECT_NE(std::find(rv.begin(), rv.end(), Payoff{0.7, 0.7}), rv.end());
}

TEST(ConvexPolygon, ConvexityInvariant) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const ConvexPolygon poly = fairshare::testing::random_problem(rng).feasible();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      EXPECT_GT(cross(poly.edge_direction(i), poly.edge_direction(i + 1)), 0.0);
    }
  }
}
