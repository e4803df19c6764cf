#include <gtest/gtest.h>

#include <cmath>

#include "horo/sampling.hpp"
#include "horo/spd.hpp"

using namespace horo;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd diag(std::initializer_list<double> d) {
  VectorXd v(d.size());
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

MatrixXd random_orthogonal(int n, Rng& rng) {
  std::normal_distribution<double> g;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ();
}

}  // namespace

TEST(Spd, ClosedFormExamples) {
  const Spd pd(2);
  const Point e = pd.point(diag({std::exp(1.0), std::exp(-1.0)}));
  EXPECT_NEAR(pd.dist(pd.origin(), e), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(pd.dist(e, e), 0.0, 1e-14);

  const Point y = pd.exp(pd.origin(), pd.tangent(diag({0.3, -1.7})));
  EXPECT_LE((pd.matrix(y) - diag({std::exp(0.3), std::exp(-1.7)})).norm(), 1e-14);
}

TEST(Spd, RejectsNonPositiveDefinite) {
  const Spd pd(2);
  EXPECT_THROW(pd.point(diag({1.0, -1.0})), ChartError);
  MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(pd.point(asym), ChartError);
  EXPECT_THROW(linalg::sym_log(diag({1.0, 0.0})), ChartError);
  EXPECT_THROW(pd.point(MatrixXd::Identity(3, 3)), ContractViolation);
}

TEST(Spd, HalfSquaredDistanceGradient) {
  const Spd pd(3);
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(pd, pd.origin(), 2.0, rng);
    const Point q = random_point(pd, pd.origin(), 2.0, rng);
    const Tangent fd = finite_diff_grad(
        pd,
        [&](const Point& x) {
          const double d = pd.dist(x, p);
          return 0.5 * d * d;
        },
        q);
    const Tangent exact = -1.0 * pd.log(q, p);
    EXPECT_LE(pd.norm(q, fd - exact), 1e-5 * (1 + pd.norm(q, exact)));
  }
}

TEST(Spd, TransportIsometryAndOdeCrossCheck) {
  const Spd pd(2);
  Rng rng(2);
  const Point p = random_point(pd, pd.origin(), 1.5, rng);
  const Point q = random_point(pd, pd.origin(), 1.5, rng);
  const Tangent v = random_tangent(pd, p, rng);
  const Tangent tv = pd.transport(p, q, v);
  EXPECT_NEAR(pd.norm(q, tv), pd.norm(p, v), 1e-9);

  // Integrate the parallel-transport ODE  V' = (Γ' P⁻¹ V + V P⁻¹ Γ') / 2
  // along Γ(t) = exp(p, t log(p, q)) with RK4.
  const MatrixXd w = pd.matrix(pd.log(p, q));
  auto gamma = [&](double t) { return pd.matrix(pd.exp(p, pd.tangent(t * w))); };
  auto velocity = [&](double t) {
    const MatrixXd s = linalg::sym_sqrt(pd.matrix(p));
    const MatrixXd is = linalg::sym_inv_sqrt(pd.matrix(p));
    const MatrixXd a = is * w * is;
    return MatrixXd(s * a * linalg::sym_exp(t * a) * s);
  };
  auto rhs = [&](double t, const MatrixXd& V) {
    const MatrixXd g = gamma(t);
    const MatrixXd gi = g.inverse();
    const MatrixXd gd = velocity(t);
    return MatrixXd(0.5 * (gd * gi * V + V * gi * gd));
  };
  MatrixXd V = pd.matrix(v);
  const int steps = 400;
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const MatrixXd k1 = rhs(t, V);
    const MatrixXd k2 = rhs(t + h / 2, V + h / 2 * k1);
    const MatrixXd k3 = rhs(t + h / 2, V + h / 2 * k2);
    const MatrixXd k4 = rhs(t + h, V + h * k3);
    V += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  EXPECT_LE((V - pd.matrix(tv)).norm(), 1e-9 * (1 + V.norm()));
}

TEST(Spd, CongruenceInvariance) {
  const Spd pd(3);
  Rng rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    const Point p = random_point(pd, pd.origin(), 2.0, rng);
    const Point q = random_point(pd, pd.origin(), 2.0, rng);
    MatrixXd a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = g(rng);
    if (std::abs(a.determinant()) < 0.1) continue;
    const Point gp = pd.point(a * pd.matrix(p) * a.transpose());
    const Point gq = pd.point(a * pd.matrix(q) * a.transpose());
    EXPECT_NEAR(pd.dist(gp, gq), pd.dist(p, q), 1e-8);
  }
}

TEST(SpdBusemann, FlagExamples) {
  const Spd pd(2);
  const FlagDirection dir{VectorXd::Map(std::vector<double>{1.0, -1.0}.data(), 2),
                          MatrixXd::Identity(2, 2)};
  EXPECT_NEAR(pd.busemann_flag(dir, pd.origin()), 0.0, 1e-15);
  EXPECT_NEAR(pd.busemann_flag(dir, pd.point(diag({std::exp(2.0), 1.0}))), 2.0,
              1e-14);
  // b(g exp(μ) gᵀ) = <λ, μ> for g unit lower triangular.
  MatrixXd g = MatrixXd::Identity(2, 2);
  g(1, 0) = 0.7;
  const Point gp = pd.point(g * diag({std::exp(0.4), std::exp(-1.1)}) * g.transpose());
  EXPECT_NEAR(pd.busemann_flag(dir, gp), 0.4 + 1.1, 1e-13);
}

TEST(SpdBusemann, DegenerateFlagRejected) {
  const Spd pd(3);
  const FlagDirection dir{Eigen::Vector3d(1.0, 1.0, -2.0), MatrixXd::Identity(3, 3)};
  EXPECT_THROW(pd.busemann_flag(dir, pd.origin()), DegenerateFlag);
  const FlagDirection close{Eigen::Vector3d(1.0, 1.0 - 1e-9, -2.0),
                            MatrixXd::Identity(3, 3)};
  EXPECT_THROW(pd.busemann_flag(close, pd.origin()), DegenerateFlag);
}

TEST(SpdBusemann, NumericLimitEndpoints) {
  const Spd pd(3);
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const Point base = random_point(pd, pd.origin(), 2.0, rng);
    const Tangent dir = random_direction(pd, base, rng);
    const SpdRay ray{base, dir};
    const NumericBusemann at_base = pd.busemann_numeric(ray, base);
    EXPECT_NEAR(at_base.value, 0.0, 1e-6);
    for (double s : {0.5, 3.0}) {
      const NumericBusemann on_ray = pd.busemann_numeric(ray, pd.exp(base, s * dir));
      EXPECT_NEAR(on_ray.value, -s, 1e-6);
      EXPECT_TRUE(on_ray.converged);
    }
    const Point x = random_point(pd, pd.origin(), 3.0, rng);
    const NumericBusemann nb = pd.busemann_numeric(ray, x);
    EXPECT_LE(nb.bracket_lo, nb.bracket_hi + 1e-12);  // h is non-increasing
  }
  EXPECT_THROW(pd.busemann_numeric({pd.origin(), 2.0 * pd.tangent(MatrixXd::Identity(3, 3))},
                                   pd.origin()),
               RangeError);
}

class SpdFlagVsNumeric : public ::testing::TestWithParam<int> {};

TEST_P(SpdFlagVsNumeric, Agree) {
  const int n = GetParam();
  const Spd pd(n);
  Rng rng(100 + n);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    // Generic directions: the limit converges like e^{-gap t}, so spectra with
    // a normalized gap below 0.05 are redrawn.
    VectorXd lambda(n);
    for (;;) {
      for (int k = 0; k < n; ++k) lambda(k) = g(rng);
      std::sort(lambda.data(), lambda.data() + n, std::greater<double>());
      const VectorXd gaps = lambda.head(n - 1) - lambda.tail(n - 1);
      if (gaps.minCoeff() >= 0.05 * lambda.norm()) break;
    }
    const MatrixXd frame = random_orthogonal(n, rng);
    const FlagDirection dir{lambda, frame};
    const Point p = random_point(pd, pd.origin(), 5.0, rng);
    // busemann_flag is ‖λ‖ times the Busemann function of the ray
    // t -> frame mexp(-t λ/‖λ‖) frameᵀ.
    const double s = lambda.norm();
    const Tangent down = pd.tangent(-frame * (lambda / s).asDiagonal() * frame.transpose());
    const NumericBusemann nb = pd.busemann_numeric({pd.origin(), down}, p);
    EXPECT_TRUE(nb.converged);
    worst = std::max(worst, std::abs(pd.busemann_flag(dir, p) - s * nb.value));
  }
  EXPECT_LE(worst, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Sizes, SpdFlagVsNumeric, ::testing::Values(2, 3, 4));

TEST(SpdBusemann, GenericRayMatchesNumericAndGradient) {
  const Spd pd(3);
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(pd, pd.origin(), 2.0, rng);
    const Tangent u = random_direction(pd, p, rng);
    const Point x = random_point(pd, pd.origin(), 3.0, rng);
    const NumericBusemann nb = pd.busemann_numeric({p, -1.0 * u}, x);
    EXPECT_NEAR(pd.busemann(p, u, x), nb.value, 1e-6);
  }
}

TEST(SpdBusemann, DegenerateDirectionUsesContinuity) {
  // A repeated eigenvalue: the closed form still matches the limit.
  const Spd pd(3);
  Rng rng(6);
  const MatrixXd o = random_orthogonal(3, rng);
  const Tangent u = pd.tangent(o * diag({1.0, 1.0, -2.0}) * o.transpose() / std::sqrt(6.0));
  for (int i = 0; i < 5; ++i) {
    const Point x = random_point(pd, pd.origin(), 3.0, rng);
    EXPECT_NEAR(pd.busemann(pd.origin(), u, x),
                pd.busemann_numeric({pd.origin(), -1.0 * u}, x).value, 1e-6);
  }
}

class SpdTyler : public ::testing::TestWithParam<int> {};

TEST_P(SpdTyler, ValueAndGradient) {
  const int n = GetParam();
  const Spd pd(n);
  Rng rng(7 + n);
  std::normal_distribution<double> g;
  VectorXd e = VectorXd::Zero(n);
  e(0) = 1.0;
  EXPECT_NEAR(pd.tyler_component(e, pd.origin()).value, 0.0, 1e-15);
  for (int i = 0; i < 5; ++i) {
    VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = g(rng);
    const Point sigma = random_point(pd, pd.origin(), 2.0, rng);
    const TylerTerm t = pd.tyler_component(x, sigma);
    EXPECT_NEAR(pd.tyler_component(2.0 * x, sigma).value, t.value + std::log(4.0), 1e-12);
    const Tangent fd = finite_diff_grad(
        pd, [&](const Point& s) { return pd.tyler_component(x, s).value; }, sigma);
    EXPECT_LE(pd.norm(sigma, fd - t.grad), 1e-5);
    EXPECT_NEAR(pd.norm(sigma, t.grad), 1.0, 1e-10);
  }
  EXPECT_THROW(pd.tyler_component(VectorXd::Zero(n), pd.origin()), RangeError);
}

INSTANTIATE_TEST_SUITE_P(Sizes, SpdTyler, ::testing::Values(2, 3, 5));

TEST(Spd, DetNormalize) {
  const Spd pd(3);
  EXPECT_LE((pd.matrix(pd.det_normalize(pd.point(4.0 * MatrixXd::Identity(3, 3)))) -
             MatrixXd::Identity(3, 3)).norm(), 1e-14);
  Rng rng(8);
  const Point p = random_point(pd, pd.origin(), 3.0, rng);
  const Point q = pd.det_normalize(p);
  EXPECT_NEAR(pd.matrix(q).determinant(), 1.0, 1e-10);
  EXPECT_LE((pd.matrix(pd.det_normalize(q)) - pd.matrix(q)).norm(), 1e-12 * pd.matrix(q).norm());
}
