#pragma once

// Closed-form hyperboloid geometry, generic over the scalar type so that the
// same formulas run in double and in multiprecision (see hyperbolic_fast.hpp).

#include <Eigen/Dense>

#include <cmath>

#include "horo/manifold.hpp"

namespace horo::hyperbolic {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Minkowski form  -x0 y0 + sum_i xi yi.
template <typename Scalar>
Scalar minkowski(const Vec<Scalar>& x, const Vec<Scalar>& y) {
  const auto n = x.size();
  return x.tail(n - 1).dot(y.tail(n - 1)) - x(0) * y(0);
}

template <typename Scalar>
Scalar tangent_norm(const Vec<Scalar>& v) {
  using std::sqrt;
  const Scalar s = minkowski(v, v);
  return s > Scalar(0) ? Scalar(sqrt(s)) : Scalar(0);
}

/// Puts x back on the upper sheet by recomputing x0 from the spatial part.
template <typename Scalar>
Vec<Scalar> renormalize(Vec<Scalar> x) {
  using std::sqrt;
  const auto n = x.size();
  x(0) = sqrt(Scalar(1) + x.tail(n - 1).squaredNorm());
  return x;
}

/// Orthogonal projection onto T_x H^n: v + <x,v> x.
template <typename Scalar>
Vec<Scalar> project_tangent(const Vec<Scalar>& x, const Vec<Scalar>& v) {
  return v + minkowski(x, v) * x;
}

/// Distance. -<x,y> below 1 by more than round-off (relative to x0 y0) is
/// invalid input; the rest is clamped.
/// Near the diagonal the difference form 2 asinh(|x-y|/2) avoids the
/// cancellation of arccosh at 1.
template <typename Scalar>
Scalar dist(const Vec<Scalar>& x, const Vec<Scalar>& y) {
  using std::acosh;
  using std::asinh;
  using std::sqrt;
  const Scalar a = -minkowski(x, y);
  if (a < Scalar(1) - Scalar(1e-12) * x(0) * y(0)) {
    throw ChartError("hyperbolic dist: -<x,y> < 1 (points off the sheet)");
  }
  if (a < Scalar(2)) {
    const Vec<Scalar> diff = x - y;
    const Scalar s = minkowski(diff, diff);
    if (s <= Scalar(0)) return Scalar(0);
    return Scalar(2) * asinh(sqrt(s) / Scalar(2));
  }
  return acosh(a);
}

template <typename Scalar>
Vec<Scalar> exp(const Vec<Scalar>& x, const Vec<Scalar>& v) {
  using std::cosh;
  using std::sinh;
  const Scalar n = tangent_norm(v);
  if (n == Scalar(0)) return x;
  Vec<Scalar> y = cosh(n) * x + (sinh(n) / n) * v;
  return renormalize<Scalar>(std::move(y));
}

template <typename Scalar>
Vec<Scalar> log(const Vec<Scalar>& x, const Vec<Scalar>& y) {
  const Scalar d = dist(x, y);
  if (d == Scalar(0)) return Vec<Scalar>::Zero(x.size());
  Vec<Scalar> u = project_tangent<Scalar>(x, y + minkowski(x, y) * x);
  const Scalar un = tangent_norm(u);
  if (un == Scalar(0)) return project_tangent<Scalar>(x, y - x);
  return (d / un) * u;
}

template <typename Scalar>
Vec<Scalar> transport(const Vec<Scalar>& x, const Vec<Scalar>& y,
                      const Vec<Scalar>& v) {
  const Scalar c = minkowski(y, v) / (Scalar(1) - minkowski(x, y));
  return project_tangent<Scalar>(y, v + c * (x + y));
}

/// Null vector w = p - u with <p, w> = -1 pointing at the end of the ray
/// t -> exp_p(-t u), ‖u‖ = 1.
template <typename Scalar>
Vec<Scalar> null_direction(const Vec<Scalar>& p, const Vec<Scalar>& u) {
  return p - u;
}

/// Busemann value log(-<x, w>) for a null vector w; with w = p - u this is
/// the unit-scale B_{p,u}(x).
template <typename Scalar>
Scalar busemann_null(const Vec<Scalar>& w, const Vec<Scalar>& x) {
  using std::log;
  return log(-minkowski(x, w));
}

/// Gradient of x -> log(-<x,w>):  x + w / <x,w>.
template <typename Scalar>
Vec<Scalar> busemann_null_gradient(const Vec<Scalar>& w,
                                   const Vec<Scalar>& x) {
  return project_tangent<Scalar>(x, x + w / minkowski(x, w));
}

/// Stereographic projection to the Poincaré ball: z = xs / (1 + x0).
template <typename Scalar>
Vec<Scalar> to_poincare(const Vec<Scalar>& x) {
  const auto n = x.size() - 1;
  return x.tail(n) / (Scalar(1) + x(0));
}

template <typename Scalar>
Vec<Scalar> from_poincare(const Vec<Scalar>& z) {
  const auto n = z.size();
  const Scalar r2 = z.squaredNorm();
  if (!(r2 < Scalar(1))) {
    throw ChartError("Poincaré coordinate outside the open unit ball");
  }
  Vec<Scalar> x(n + 1);
  const Scalar den = Scalar(1) - r2;
  x(0) = (Scalar(1) + r2) / den;
  x.tail(n) = (Scalar(2) / den) * z;
  return x;
}

/// Lorentz boost mapping the apex to x (an isometry of H^n).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> boost_to(
    const Vec<Scalar>& x) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto N = x.size();
  const auto n = N - 1;
  Mat B = Mat::Identity(N, N);
  const Vec<Scalar> s = x.tail(n);
  B(0, 0) = x(0);
  B.block(1, 0, n, 1) = s;
  B.block(0, 1, 1, n) = s.transpose();
  B.block(1, 1, n, n) += (s * s.transpose()) / (Scalar(1) + x(0));
  return B;
}

}  // namespace horo::hyperbolic
