#include <gtest/gtest.h>

#include <cmath>

#include "horo/hyperbolic.hpp"
#include "horo/sampling.hpp"
#include "horo/spd.hpp"

using namespace horo;

namespace {

struct Backends {
  std::string name;
  ManifoldPtr m;
  // Longest round-trip vector: SPD matrices at distance t from the base have
  // condition number up to e^{2t}, which double precision cannot carry far.
  double reach = 20.0;
};

class ManifoldContract : public ::testing::TestWithParam<Backends> {
 protected:
  const Manifold& M() const { return *GetParam().m; }
  Rng rng{20240611};
};

std::string backend_name(const ::testing::TestParamInfo<Backends>& info) {
  return info.param.name;
}

}  // namespace

TEST_P(ManifoldContract, DistanceAxioms) {
  const Point o = M().origin();
  for (int i = 0; i < 50; ++i) {
    const Point x = random_point(M(), o, 5.0, rng);
    const Point y = random_point(M(), o, 5.0, rng);
    const Point z = random_point(M(), o, 5.0, rng);
    EXPECT_NEAR(M().dist(x, x), 0.0, 1e-7);
    EXPECT_NEAR(M().dist(x, y), M().dist(y, x), 1e-9);
    EXPECT_LE(M().dist(x, z), M().dist(x, y) + M().dist(y, z) + 1e-9);
  }
}

TEST_P(ManifoldContract, ExpLogRoundTrip) {
  const Point o = M().origin();
  for (int i = 0; i < 100; ++i) {
    const Point x = random_point(M(), o, 3.0, rng);
    std::uniform_real_distribution<double> len(0.0, GetParam().reach);
    const Tangent v = random_direction(M(), x, rng, len(rng));
    const Point y = M().exp(x, v);
    ASSERT_TRUE(M().is_valid(y));
    EXPECT_NEAR(M().dist(x, y), M().norm(x, v), 1e-9 * (1 + M().norm(x, v)));
    const Tangent back = M().log(x, y);
    EXPECT_LE(M().norm(x, back - v), 1e-9 * std::max(1.0, M().norm(x, v)));
    EXPECT_NEAR(M().norm(x, back), M().dist(x, y), 1e-9);
  }
}

TEST_P(ManifoldContract, ExpOfZeroAndLogOfSelf) {
  const Point x = random_point(M(), M().origin(), 2.0, rng);
  EXPECT_NEAR(M().dist(M().exp(x, M().zero_tangent()), x), 0.0, 1e-12);
  EXPECT_LE(M().norm(x, M().log(x, x)), 1e-7);
}

TEST_P(ManifoldContract, TransportIsLinearIsometry) {
  const Point o = M().origin();
  for (int i = 0; i < 50; ++i) {
    const Point p = random_point(M(), o, 4.0, rng);
    const Point q = random_point(M(), o, 4.0, rng);
    const Tangent u = random_tangent(M(), p, rng);
    const Tangent v = random_tangent(M(), p, rng);
    const Tangent tu = M().transport(p, q, u);
    const Tangent tv = M().transport(p, q, v);
    ASSERT_TRUE(M().is_tangent(q, tu, 1e-8));
    EXPECT_NEAR(M().inner(q, tu, tv), M().inner(p, u, v),
                1e-9 * (1 + M().norm(p, u) * M().norm(p, v)));
    const Tangent tsum = M().transport(p, q, u + 2.0 * v);
    EXPECT_LE(M().norm(q, tsum - tu - 2.0 * tv), 1e-9 * (1 + M().norm(q, tsum)));
  }
  const Point p = random_point(M(), o, 2.0, rng);
  const Tangent v = random_tangent(M(), p, rng);
  EXPECT_LE(M().norm(p, M().transport(p, p, v) - v), 1e-12);
}

TEST_P(ManifoldContract, TransportMatchesGeodesicDirection) {
  // The velocity of a geodesic is parallel along it.
  const Point o = M().origin();
  for (int i = 0; i < 20; ++i) {
    const Point p = random_point(M(), o, 3.0, rng);
    const Point q = random_point(M(), o, 3.0, rng);
    const Tangent moved = M().transport(p, q, M().log(p, q));
    const Tangent expected = -1.0 * M().log(q, p);
    EXPECT_LE(M().norm(q, moved - expected), 1e-8 * (1 + M().dist(p, q)));
  }
}

TEST_P(ManifoldContract, GeodesicPoint) {
  const Point o = M().origin();
  for (int i = 0; i < 30; ++i) {
    const Point x = random_point(M(), o, 5.0, rng);
    const Point y = random_point(M(), o, 5.0, rng);
    EXPECT_NEAR(M().dist(geodesic_point(M(), x, y, 0.0), x), 0.0, 1e-12);
    EXPECT_NEAR(M().dist(geodesic_point(M(), x, y, 1.0), y), 0.0, 1e-12);
    const Point mid = geodesic_point(M(), x, y, 0.5);
    EXPECT_NEAR(M().dist(x, mid), 0.5 * M().dist(x, y), 1e-10);
    EXPECT_NEAR(M().dist(mid, y), 0.5 * M().dist(x, y), 1e-10);
  }
  EXPECT_THROW(geodesic_point(M(), o, o, 1.5), RangeError);
  EXPECT_THROW(geodesic_point(M(), o, o, -0.1), RangeError);
}

TEST_P(ManifoldContract, ProjectBall) {
  const Point c = random_point(M(), M().origin(), 1.0, rng);
  const GeodesicBall ball{c, 1.0};
  const Point inside = M().exp(c, random_direction(M(), c, rng, 0.5));
  EXPECT_EQ((project_ball(M(), inside, ball).coords - inside.coords).norm(), 0.0);

  const Point far = M().exp(c, random_direction(M(), c, rng, 3.0));
  const Point pr = project_ball(M(), far, ball);
  EXPECT_NEAR(M().dist(c, pr), 1.0, 1e-10);
  EXPECT_NEAR(M().dist(c, pr) + M().dist(pr, far), M().dist(c, far), 1e-9);

  EXPECT_NEAR(M().dist(project_ball(M(), far, {c, 0.0}), c), 0.0, 1e-14);

  for (int i = 0; i < 100; ++i) {
    const Point x = random_point(M(), c, 4.0, rng);
    const Point y = random_point(M(), c, 4.0, rng);
    EXPECT_LE(M().dist(project_ball(M(), x, ball), project_ball(M(), y, ball)),
              M().dist(x, y) + 1e-9);
  }
}

TEST_P(ManifoldContract, FiniteDifferenceGradient) {
  const Point o = M().origin();
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(M(), o, 3.0, rng);
    const Point x = random_point(M(), o, 3.0, rng);
    auto f = [&](const Point& y) {
      const double d = M().dist(y, p);
      return d * d;
    };
    const Tangent fd = finite_diff_grad(M(), f, x);
    const Tangent exact = -2.0 * M().log(x, p);
    EXPECT_LE(M().norm(x, fd - exact), 1e-5 * M().norm(x, exact));
  }
  const Tangent zero =
      finite_diff_grad(M(), [](const Point&) { return 3.0; }, o);
  EXPECT_EQ(M().norm(o, zero), 0.0);
}

TEST_P(ManifoldContract, BusemannGradientFiniteDifferences) {
  const Point o = M().origin();
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(M(), o, 2.0, rng);
    const Tangent u = random_direction(M(), p, rng);
    const Point x = random_point(M(), o, 3.0, rng);
    auto f = [&](const Point& y) { return M().busemann(p, u, y); };
    const Tangent fd = finite_diff_grad(M(), f, x);
    const Tangent g = M().busemann_gradient(p, u, x);
    EXPECT_NEAR(M().norm(x, fd), 1.0, 1e-5);
    EXPECT_NEAR(M().norm(x, g), 1.0, 1e-9);
    EXPECT_LE(M().norm(x, fd - g), 1e-5);
    EXPECT_NEAR(M().busemann(p, u, p), 0.0, 1e-12);
    EXPECT_LE(M().norm(p, M().busemann_gradient(p, u, p) - u), 1e-9);
  }
}

TEST_P(ManifoldContract, TriangleComparison) {
  const Point o = M().origin();
  for (int i = 0; i < 200; ++i) {
    const Point x = random_point(M(), o, 5.0, rng);
    const Point y = random_point(M(), o, 5.0, rng);
    const Point p = random_point(M(), o, 5.0, rng);
    EXPECT_GE(triangle_comparison_residual(M(), x, y, p), -1e-9);
  }
}

TEST_P(ManifoldContract, BackendMismatchIsRejected) {
  const Hyperbolic h5(5);
  const Point alien = h5.origin();
  EXPECT_THROW(M().dist(alien, M().origin()), ContractViolation);
}

INSTANTIATE_TEST_SUITE_P(
    Backends, ManifoldContract,
    ::testing::Values(Backends{"H2", std::make_shared<Hyperbolic>(2)},
                      Backends{"H3", std::make_shared<Hyperbolic>(3)},
                      Backends{"PD2", std::make_shared<Spd>(2), 5.0},
                      Backends{"PD3", std::make_shared<Spd>(3), 5.0}),
    backend_name);

TEST(BackendTag, SameAmbientSizeDifferentBackends) {
  const Hyperbolic h3(3);
  const Spd pd2(2);
  EXPECT_EQ(h3.ambient_size(), pd2.ambient_size());
  EXPECT_THROW(h3.dist(pd2.origin(), h3.origin()), ContractViolation);
  EXPECT_EQ(to_string(h3.backend()), "H^3");
  EXPECT_EQ(to_string(pd2.backend()), "PD(2)");
}
