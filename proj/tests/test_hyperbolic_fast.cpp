#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "horo/hyperbolic.hpp"
#include "horo/hyperbolic_fast.hpp"
#include "horo/sampling.hpp"

using namespace horo;
using namespace horo::fast;

namespace {

Eigen::VectorXd random_dir(int n, Rng& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = g(rng);
  return d;
}

}  // namespace

TEST(Precision, ScopeRaisesAndRestores) {
  const auto before = Real::default_precision();
  {
    const PrecisionScope s(2000);
    EXPECT_GE(Real::default_precision(), 600u);
  }
  EXPECT_EQ(Real::default_precision(), before);
  EXPECT_GT(precision_bits_for(1000.0), precision_bits_for(10.0));
}

TEST(FastSpace, AgreesWithDoubleBackend) {
  const PrecisionScope s(precision_bits_for(5.0));
  const Hyperbolic hd(3);
  const Space h(3);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Point a = random_point(hd, hd.origin(), 5.0, rng);
    const Point b = random_point(hd, hd.origin(), 5.0, rng);
    EXPECT_NEAR(h.dist(h.lift(a), h.lift(b)), hd.dist(a, b), 1e-10);
    EXPECT_LE((h.lower(h.lift(a)).coords - a.coords).norm(), 1e-12 * a.coords.norm());
  }
}

TEST(FastSpace, ShootsExactDistancesFarOut) {
  const PrecisionScope s(precision_bits_for(2000.0));
  const Space h(2);
  Rng rng(2);
  for (double t : {10.0, 500.0, 2000.0}) {
    const RVec x = h.shoot(h.origin(), random_dir(2, rng), t);
    EXPECT_NEAR(h.dist(h.origin(), x), t, 1e-9 * t);
    const RVec y = h.shoot(x, random_dir(2, rng), 3.0);
    EXPECT_NEAR(h.dist(x, y), 3.0, 1e-9);
  }
  EXPECT_THROW(h.lower(h.shoot(h.origin(), random_dir(2, rng), 1000.0)), ChartError);
}

TEST(Localize, IterationCounts) {
  EXPECT_EQ(localize_iterations(LocalizeMode::shrinking, 100.0, 0.0), 13);
  const int fixed = localize_iterations(LocalizeMode::fixed, 10.0, 0.5);
  EXPECT_EQ(fixed, static_cast<int>(std::ceil(std::log(std::cosh(10.0)) /
                                              std::log(std::cosh(0.5)))));
  EXPECT_THROW(localize_iterations(LocalizeMode::shrinking, 3.0, 0.0), RangeError);
}

TEST(Localize, ShrinkingModeReachesFourBall) {
  for (int n : {2, 3}) {
    for (double r : {10.0, 100.0, 1000.0}) {
      const PrecisionScope s(precision_bits_for(r));
      const Space h(n);
      Rng rng(10 + n);
      for (int trial = 0; trial < 3; ++trial) {
        const RVec p = h.shoot(h.origin(), random_dir(n, rng), 2.0);
        const RVec xs = h.shoot(p, random_dir(n, rng), r * (0.5 + 0.5 * trial / 2.0));
        LocalizeConfig cfg;
        cfg.r = r;
        cfg.reference = xs;
        const auto res = run_hyperbolic_localize(h, distance_to(xs), p, cfg);
        EXPECT_EQ(res.iters, localize_iterations(LocalizeMode::shrinking, r, 0.0));
        EXPECT_LE(h.dist(res.x, xs), 4.0) << "n=" << n << " r=" << r;
        EXPECT_EQ(res.queries, res.iters + 1);
      }
    }
  }
}

TEST(Localize, FixedModeGapAndMonotoneCosh) {
  const PrecisionScope s(precision_bits_for(10.0));
  const Space h(2);
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const RVec xs = h.shoot(h.origin(), random_dir(2, rng), 10.0);
    LocalizeConfig cfg;
    cfg.mode = LocalizeMode::fixed;
    cfg.r = 10.0;
    cfg.delta = 0.5;
    cfg.reference = xs;
    const auto res = run_hyperbolic_localize(h, distance_to(xs), h.origin(), cfg);
    EXPECT_LE(res.f, 0.5);
    ASSERT_TRUE(res.monotone.has_value());
    EXPECT_TRUE(*res.monotone) << res.worst_monotone_excess;
  }
}

TEST(Localize, StartAtMinimizerExitsImmediately) {
  const PrecisionScope s(precision_bits_for(10.0));
  const Space h(3);
  const RVec p = h.shoot(h.origin(), Eigen::Vector3d(1, 2, 3), 1.0);
  LocalizeConfig cfg;
  cfg.r = 10.0;
  const auto res = run_hyperbolic_localize(h, distance_to(p), p, cfg);
  EXPECT_TRUE(res.optimal);
  EXPECT_EQ(res.queries, 1);
  EXPECT_EQ(res.f, 0.0);
}

TEST(Localize, GapSlopeIsNegative) {
  const PrecisionScope s(precision_bits_for(1000.0));
  const Space h(2);
  const RVec xs = h.shoot(h.origin(), Eigen::Vector2d(1, 0), 1000.0);
  LocalizeConfig cfg;
  cfg.r = 1000.0;
  const auto res = run_hyperbolic_localize(h, distance_to(xs), h.origin(), cfg);
  const auto slope = log_gap_slope(res, 0.0);
  ASSERT_TRUE(slope.has_value());
  EXPECT_LT(*slope, 0.0);
}

TEST(Chart, PullbackMatchesFiniteDifferences) {
  const PrecisionScope s(precision_bits_for(40.0));
  const Space h(3);
  Rng rng(4);
  const RVec c = h.shoot(h.origin(), random_dir(3, rng), 30.0);
  const RVec target = h.shoot(c, random_dir(3, rng), 2.0);
  const auto f = distance_to(target);
  const Chart chart = chart_at(c);
  EXPECT_NEAR(h.dist(chart.map(Eigen::Vector3d::Zero()), c), 0.0, 1e-12);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d u(unit(rng), unit(rng), unit(rng));
    const Eigen::VectorXd g = chart.pullback(u, f.eval(h, chart.map(u)).grad);
    for (int j = 0; j < 3; ++j) {
      const double eps = 1e-6;
      Eigen::Vector3d up = u, um = u;
      up(j) += eps;
      um(j) -= eps;
      const double fd = (f.eval(h, chart.map(up)).value - f.eval(h, chart.map(um)).value) /
                        (2.0 * eps);
      EXPECT_NEAR(g(j), fd, 1e-5 * (1.0 + std::abs(fd)));
    }
  }
}

TEST(Chart, SublevelSetsAreConvex) {
  // f = max of distances is h-convex; in the Poincaré chart its sublevel
  // sets are intersections of Euclidean balls, so chords stay inside.
  const PrecisionScope s(precision_bits_for(20.0));
  const Space h(2);
  Rng rng(5);
  const RVec c = h.shoot(h.origin(), random_dir(2, rng), 15.0);
  std::vector<RVec> pts;
  for (int i = 0; i < 3; ++i) pts.push_back(h.shoot(c, random_dir(2, rng), 1.5));
  const auto f = max_distance(pts);
  const Chart chart = chart_at(c);
  std::uniform_real_distribution<double> unit(-0.9, 0.9), t01(0.0, 1.0);
  auto F = [&](const Eigen::VectorXd& u) { return f.eval(h, chart.map(u)).value; };
  int checked = 0;
  while (checked < 300) {
    const Eigen::Vector2d a(unit(rng), unit(rng)), b(unit(rng), unit(rng));
    if (a.norm() >= 0.95 || b.norm() >= 0.95) continue;
    const double level = std::max(F(a), F(b));
    const double t = t01(rng);
    EXPECT_LE(F((1 - t) * a + t * b), level + 1e-9);
    ++checked;
  }
}

TEST(Ellipsoid, AccuracyAndQueryBudget) {
  for (int n : {2, 3}) {
    for (double r : {10.0, 100.0}) {
      for (double delta : {1e-2, 1e-3}) {
        const PrecisionScope s(precision_bits_for(r + 2.0));
        const Space h(n);
        Rng rng(static_cast<std::uint64_t>(100 * n + r));
        const RVec p = h.shoot(h.origin(), random_dir(n, rng), 1.0);
        const RVec xs = h.shoot(p, random_dir(n, rng), 0.8 * r);
        EllipsoidConfig cfg;
        cfg.r = r;
        cfg.delta = delta;
        cfg.reference = xs;
        const auto res = run_hyperbolic_ellipsoid(h, distance_to(xs), p, cfg);
        ASSERT_TRUE(res.gap.has_value());
        EXPECT_LE(*res.gap, delta) << "n=" << n << " r=" << r << " δ=" << delta;
        EXPECT_TRUE(res.within_budget) << res.queries << " > " << res.budget;
        EXPECT_EQ(res.queries, res.phase1_queries + res.phase2_queries);
      }
    }
  }
}

TEST(Ellipsoid, MinimaxCentre) {
  // Three points placed symmetrically around c: the minimax centre is c.
  const PrecisionScope s(precision_bits_for(60.0));
  const Space h(2);
  const RVec c = h.shoot(h.origin(), Eigen::Vector2d(1, 1), 40.0);
  std::vector<RVec> pts;
  for (int i = 0; i < 3; ++i) {
    const double a = 2.0 * M_PI * i / 3.0;
    pts.push_back(h.shoot(c, Eigen::Vector2d(std::cos(a), std::sin(a)), 2.0));
  }
  EllipsoidConfig cfg;
  cfg.r = 50.0;
  cfg.delta = 1e-3;
  cfg.reference = c;
  const auto res = run_hyperbolic_ellipsoid(h, max_distance(pts), h.origin(), cfg);
  EXPECT_LE(*res.gap, 1e-3);
  EXPECT_TRUE(res.within_budget);
}

TEST(Ellipsoid, LooseAccuracyIsDominatedByLocalization) {
  // Phase 2 cost depends on n and δ only; phase 1 grows like log r.
  int phase2 = -1;
  int prev_phase1 = 0;
  for (double r : {10.0, 100.0, 1000.0}) {
    const PrecisionScope s(precision_bits_for(r + 1.0));
    const Space h(2);
    const RVec xs = h.shoot(h.origin(), Eigen::Vector2d(0.3, -1.0), 0.9 * r);
    EllipsoidConfig cfg;
    cfg.r = r;
    cfg.delta = 0.99;
    cfg.reference = xs;
    const auto res = run_hyperbolic_ellipsoid(h, distance_to(xs), h.origin(), cfg);
    EXPECT_LE(*res.gap, 0.99);
    EXPECT_GT(res.phase1_queries, prev_phase1);
    prev_phase1 = res.phase1_queries;
    if (phase2 < 0) phase2 = res.phase2_queries;
    EXPECT_LE(res.phase2_queries, phase2 + 5);
  }
}

TEST(Ellipsoid, RejectsBadAccuracy) {
  const Space h(2);
  EllipsoidConfig cfg;
  cfg.delta = 1.5;
  EXPECT_THROW(run_hyperbolic_ellipsoid(h, distance_to(h.origin()), h.origin(), cfg),
               RangeError);
}
