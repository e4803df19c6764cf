#include <gtest/gtest.h>

#include <cmath>

#include "horo/frechet.hpp"
#include "horo/problems.hpp"
#include "horo/solvers.hpp"
#include "test_support.hpp"

using namespace horo;
using namespace horo::test;

namespace {

void expect_bounds_pass(const Trace& t) {
  EXPECT_TRUE(t.reference_available);
  EXPECT_FALSE(t.bounds.empty());
  for (const auto& b : t.bounds) {
    EXPECT_TRUE(b.pass) << b.name << " at k=" << b.k << ": achieved "
                        << b.achieved << " > bound " << b.bound << " + "
                        << b.slack;
  }
}

const BoundCheck& bound_named(const Trace& t, const std::string& name) {
  for (const auto& b : t.bounds) {
    if (b.name == name) return b;
  }
  throw std::runtime_error("missing bound " + name);
}

std::vector<Point> median_points(const Manifold& m, Rng& rng, int k) {
  std::vector<Point> out;
  for (int i = 0; i < k; ++i) out.push_back(random_point(m, m.origin(), 1.5, rng));
  return out;
}

}  // namespace

TEST(GdStep, SingleComponentIsAnExponentialStep) {
  for (ManifoldPtr m : {ManifoldPtr(H3), ManifoldPtr(PD2)}) {
    Rng rng(1);
    const Point p = random_point(*m, m->origin(), 2.0, rng);
    const Point x = random_point(*m, m->origin(), 2.0, rng);
    const auto f = single(m, half_sq_dist_oracle(m, p));
    EXPECT_LE(m->dist(gd_step(f, x, 1.0, 1e-10), p), 1e-9);
    const auto fd = single(m, dist_oracle(m, p));
    const Tangent g = fd.grad(x);
    EXPECT_LE(m->dist(gd_step(fd, x, 0.3, 1e-10), m->exp(x, -0.3 * g)), 1e-9);
  }
}

TEST(GdStep, ZeroSubgradientsStay) {
  const auto m = H2;
  Rng rng(2);
  const Point x = random_point(*m, m->origin(), 2.0, rng);
  EXPECT_LE(m->dist(gd_step(*m, x, {m->zero_tangent(), m->zero_tangent()}, 0.7, 1e-10), x),
            1e-12);
}

TEST(GdStep, TwoSquaredDistancesGiveTheMeanOfTheAnchors) {
  const auto m = H2;
  Rng rng(3);
  const Point a = random_point(*m, m->origin(), 2.0, rng);
  const Point b = random_point(*m, m->origin(), 2.0, rng);
  const Point x = random_point(*m, m->origin(), 2.0, rng);
  const auto f = make_frechet(m, {a, b}, {1.0, 1.0});
  // s = 1 sends x to each anchor exactly; the step is their midpoint.
  EXPECT_LE(m->dist(gd_step(f, x, 1.0, 1e-14), geodesic_point(*m, a, b, 0.5)), 1e-6);
}

TEST(Gd, FrechetObjectiveConvergesInOneStep) {
  for (ManifoldPtr m : {ManifoldPtr(H3), ManifoldPtr(PD2)}) {
    const auto s = make_synthetic(m, 4, 1.0, 1.0, 3.0, 5);
    SolveConfig cfg;
    cfg.max_iters = 3;
    cfg.L = 1.0;
    cfg.mu = 1.0;
    cfg.sub_tol = kSubTolFloor;
    cfg.reference = s.reference;
    const Trace t = run_gd(s.objective, m->origin(), cfg);
    // Both the step and the reference are certified to gap 1e-12.
    EXPECT_LE(m->dist(t.records[1].x, s.reference), 2.0 * std::sqrt(2.0 * kSubTolFloor));
    EXPECT_LE(t.records[1].f - s.objective.value(s.reference), 1e-9);
    expect_bounds_pass(t);
  }
}

TEST(Gd, RatesOnSyntheticInstances) {
  for (ManifoldPtr m : {ManifoldPtr(H3), ManifoldPtr(PD2)}) {
    for (int count : {1, 5}) {
      for (double kappa : {1.0, 4.0, 25.0}) {
        const auto s = make_synthetic(m, count, 1.0 / kappa, 1.0, 3.0, 40 + count);
        SolveConfig cfg;
        cfg.max_iters = 60;
        cfg.L = s.L;
        cfg.mu = s.mu;
        cfg.reference = s.reference;
        const Trace t = run_gd(s.objective, m->origin(), cfg);
        ASSERT_EQ(t.records.size(), 61u);
        expect_bounds_pass(t);
        EXPECT_EQ(t.records.back().k, 60);
        // The convex bound also holds; the strong ones are present when μ > 0.
        bound_named(t, "gd_convex");
        bound_named(t, "gd_strong_value");
      }
    }
  }
}

TEST(Gd, ConvexBoundWithoutStrongConvexity) {
  // Busemann sums plus an anchor: h-convex, 1-h-smooth; check the convex bound only.
  const auto m = H2;
  Rng rng(6);
  const Point p = random_point(*m, m->origin(), 1.0, rng);
  std::vector<ScaledBusemann> terms;
  for (int i = 0; i < 3; ++i) {
    const Point q = random_point(*m, m->origin(), 1.0, rng);
    terms.push_back({q, random_direction(*m, q, rng, 0.8)});
  }
  const auto f = make_anchored_busemann(m, terms, p);
  SolveConfig cfg;
  cfg.max_iters = 50;
  cfg.L = 2.0;
  cfg.reference = solve_reference(f, p, 1.0);
  const Trace t = run_gd(f, m->origin(), cfg);
  expect_bounds_pass(t);
  EXPECT_EQ(t.bounds.size(), 1u);
}

TEST(Subgradient, MedianBoundsAtSeveralHorizons) {
  for (ManifoldPtr m : {ManifoldPtr(H2), ManifoldPtr(PD2)}) {
    Rng rng(7);
    for (int k : {4, 8}) {
      const auto pts = median_points(*m, rng, k);
      const auto f = make_median(m, pts);
      const GeodesicBall C{m->origin(), 1.5};
      SolveConfig cfg;
      cfg.schedule = StepSchedule::dl_sqrt;
      cfg.L = 1.0;
      cfg.constraint = C;
      cfg.reference = weiszfeld_median(*m, pts);
      ASSERT_LE(m->dist(*cfg.reference, C.center), C.radius);
      for (int N : {10, 100, 1000}) {
        cfg.max_iters = N;
        const Trace t = run_projected_subgradient(f, m->origin(), cfg);
        expect_bounds_pass(t);
        ASSERT_TRUE(t.averaged.has_value());
        EXPECT_LE(m->dist(*t.averaged, C.center), C.radius + 1e-9);
        EXPECT_EQ(bound_named(t, "subgradient_convex").k, N);
      }
    }
  }
}

TEST(Subgradient, SinglePointMedianStaysPut) {
  const auto m = H2;
  Rng rng(8);
  const Point p = random_point(*m, m->origin(), 1.0, rng);
  SolveConfig cfg;
  cfg.schedule = StepSchedule::dl_sqrt;
  cfg.max_iters = 20;
  cfg.constraint = GeodesicBall{p, 2.0};
  cfg.reference = p;
  const Trace t = run_projected_subgradient(make_median(m, {p}), p, cfg);
  for (const auto& r : t.records) {
    EXPECT_EQ(r.f, 0.0);
    EXPECT_EQ(*r.f_avg, 0.0);
  }
  expect_bounds_pass(t);
}

TEST(Subgradient, StronglyConvexScheduleOnAnchoredSquares) {
  // ½ c d(·,p_i)² with p_i inside C: μ = min c, Lipschitz c_max D on C.
  for (ManifoldPtr m : {ManifoldPtr(H2), ManifoldPtr(PD2)}) {
    Rng rng(9);
    const GeodesicBall C{m->origin(), 1.5};
    SumObjective f{m, {}};
    WeightedMeanProblem p;
    for (int i = 0; i < 5; ++i) {
      const Point a = random_point(*m, C.center, C.radius, rng);
      const double c = 0.5 + 0.25 * i;
      f.components.push_back(half_sq_dist_oracle(m, a, c));
      p.anchors.push_back(a);
      p.weights.push_back(c);
    }
    SolveConfig cfg;
    cfg.schedule = StepSchedule::strongly_convex;
    cfg.mu = 0.5;
    cfg.L = 1.5 * 2.0 * C.radius;
    cfg.constraint = C;
    cfg.reference = solve_weighted_mean(*m, p, 1e-12).x;
    for (int N : {10, 100, 1000}) {
      cfg.max_iters = N;
      expect_bounds_pass(run_projected_subgradient(f, m->origin(), cfg));
    }
  }
}

TEST(Subgradient, TylerOnPd2) {
  const auto m = std::make_shared<Spd>(2);
  Rng rng(10);
  std::normal_distribution<double> g;
  std::vector<Eigen::VectorXd> xs;
  for (int i = 0; i < 8; ++i) xs.push_back(Eigen::Vector2d(2.0 * g(rng), g(rng)));
  const auto f = make_tyler(m, xs);
  const Point ref = tyler_fixed_point(*m, xs);
  // The fixed point is scale-free; centre the constraint on it.
  const GeodesicBall C{m->origin(), 1.0 + m->dist(m->origin(), ref)};
  SolveConfig cfg;
  cfg.schedule = StepSchedule::dl_sqrt;
  cfg.L = *f.lips();
  cfg.max_iters = 200;
  cfg.constraint = C;
  cfg.reference = ref;
  const Trace t = run_projected_subgradient(f, m->origin(), cfg);
  expect_bounds_pass(t);
  // A local grid around the reference finds nothing lower.
  const auto basis = m->tangent_basis(ref);
  double lo = f.value(ref);
  for (int a = -4; a <= 4; ++a) {
    for (int b = -4; b <= 4; ++b) {
      for (int c = -4; c <= 4; ++c) {
        const Tangent v = 0.05 * (a * basis[0] + b * basis[1] + c * basis[2]);
        lo = std::min(lo, f.value(m->exp(ref, v)));
      }
    }
  }
  EXPECT_GE(lo, f.value(ref) - 1e-12);
}

TEST(Subgradient, Preconditions) {
  const auto m = H2;
  const auto f = make_median(m, {m->origin()});
  SolveConfig cfg;
  cfg.schedule = StepSchedule::dl_sqrt;
  EXPECT_THROW(run_projected_subgradient(f, m->origin(), cfg), ContractViolation);
  cfg.constraint = GeodesicBall{m->origin(), 1.0};
  EXPECT_THROW(run_projected_subgradient(f, m->exp(m->origin(), 2.0 * H2->apex_direction(0)), cfg),
               RangeError);
  cfg.schedule = StepSchedule::strongly_convex;
  EXPECT_THROW(run_projected_subgradient(f, m->origin(), cfg), RangeError);
}

TEST(Subgradient, NoReferenceMeansNoVerdict) {
  const auto m = H2;
  SolveConfig cfg;
  cfg.schedule = StepSchedule::dl_sqrt;
  cfg.max_iters = 5;
  cfg.constraint = GeodesicBall{m->origin(), 1.0};
  const Trace t = run_projected_subgradient(make_median(m, {m->origin()}), m->origin(), cfg);
  EXPECT_FALSE(t.reference_available);
  EXPECT_TRUE(t.bounds.empty());
}

TEST(AgmC, SingleSquaredDistance) {
  for (ManifoldPtr m : {ManifoldPtr(H3), ManifoldPtr(PD2)}) {
    Rng rng(11);
    const Point p = random_point(*m, m->origin(), 3.0, rng);
    SolveConfig cfg;
    cfg.max_iters = 30;
    cfg.L = 1.0;
    cfg.reference = p;
    const Trace t = run_agm_c(single(m, half_sq_dist_oracle(m, p)), m->origin(), cfg);
    expect_bounds_pass(t);
    EXPECT_TRUE(t.energy_monotone) << t.worst_energy_increase;
    EXPECT_LE(t.records.back().f, 1e-12);
  }
}

TEST(AgmC, BusemannSumWithAnchor) {
  const auto m = H2;
  Rng rng(12);
  const Point p = random_point(*m, m->origin(), 1.0, rng);
  std::vector<ScaledBusemann> terms;
  for (int i = 0; i < 3; ++i) {
    const Point q = random_point(*m, m->origin(), 2.0, rng);
    terms.push_back({q, random_direction(*m, q, rng, 1.0)});
  }
  const auto f = make_anchored_busemann(m, terms, p);
  SolveConfig cfg;
  cfg.max_iters = 64;
  cfg.L = 2.0;
  cfg.reference = solve_reference(f, p, 1.0);
  const Trace t = run_agm_c(f, m->origin(), cfg);
  expect_bounds_pass(t);
  EXPECT_TRUE(t.energy_monotone) << t.worst_energy_increase;
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_LE(*t.records[k].energy, *t.records[k - 1].energy + 64 * cfg.sub_tol + 1e-12);
  }
}

TEST(AgmC, DescentViolationAborts) {
  const auto m = H2;
  Rng rng(13);
  const Point p = random_point(*m, m->origin(), 2.0, rng);
  SolveConfig cfg;
  cfg.L = 1.0;  // true smoothness is 5
  try {
    run_agm_c(single(m, half_sq_dist_oracle(m, p, 5.0)), m->origin(), cfg);
    FAIL() << "expected an assumption violation";
  } catch (const AssumptionViolation& e) {
    EXPECT_EQ(e.k, 0);
  }
}

TEST(AgmSc, EqualConstantsConvergeInOneStep) {
  const auto m = H3;
  Rng rng(14);
  const Point p = random_point(*m, m->origin(), 3.0, rng);
  SolveConfig cfg;
  cfg.max_iters = 3;
  cfg.L = cfg.mu = 1.0;
  cfg.reference = p;
  const Trace t = run_agm_sc(single(m, half_sq_dist_oracle(m, p)), m->origin(), cfg);
  EXPECT_LE(m->dist(t.records[1].x, p), 1e-9);
  expect_bounds_pass(t);
}

TEST(AgmSc, SingleComponentClosedFormMatchesSolver) {
  const auto m = H3;
  Rng rng(15);
  // κ d(x0, p) sets how far the z-update anchors travel; keep it moderate.
  const Point p = random_point(*m, m->origin(), 0.5, rng);
  SolveConfig cfg;
  cfg.max_iters = 60;
  cfg.L = 1.0;
  cfg.mu = 0.1;
  cfg.reference = p;
  // f = ½ d(·,p)² is 1-strongly convex, hence also 0.1-strongly convex.
  const Trace t = run_agm_sc(single(m, half_sq_dist_oracle(m, p)), m->origin(), cfg);
  expect_bounds_pass(t);
  EXPECT_TRUE(t.energy_monotone) << t.worst_energy_increase;
  ASSERT_TRUE(t.crosscheck.has_value());
  EXPECT_LE(*t.crosscheck, 1e-8);
}

TEST(AgmSc, WeightedSquaresOnPd2) {
  const auto m = PD2;
  const auto s = make_synthetic(m, 4, 1.0 / 25.0, 1.0, 0.3, 16);
  SolveConfig cfg;
  cfg.max_iters = 60;
  cfg.L = s.L;
  cfg.mu = s.mu;
  cfg.reference = s.reference;
  const Trace t = run_agm_sc(s.objective, m->origin(), cfg);
  expect_bounds_pass(t);
  EXPECT_TRUE(t.energy_monotone) << t.worst_energy_increase;
}

TEST(Schedules, RoundTripNames) {
  for (auto s : {StepSchedule::inv_L, StepSchedule::dl_sqrt, StepSchedule::strongly_convex,
                 StepSchedule::localize_fixed, StepSchedule::localize_shrinking}) {
    EXPECT_EQ(parse_schedule(to_string(s)), s);
  }
  EXPECT_THROW(parse_schedule("bogus"), RangeError);
}
