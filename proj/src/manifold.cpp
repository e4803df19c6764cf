#include "horo/manifold.hpp"

#include <cmath>

namespace horo {

std::string to_string(const Backend& b) {
  switch (b.kind) {
    case Backend::Kind::hyperbolic:
      return "H^" + std::to_string(b.n);
    case Backend::Kind::spd:
      return "PD(" + std::to_string(b.n) + ")";
  }
  return "?";
}

double Manifold::norm(const Point& x, const Tangent& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

void Manifold::require_point(const Point& x) const {
  if (!(x.backend == backend()) || x.coords.size() != ambient_size()) {
    throw ContractViolation("point from " + to_string(x.backend) +
                            " used on " + to_string(backend()));
  }
}

void Manifold::require_tangent(const Tangent& v) const {
  if (v.coords.size() != ambient_size()) {
    throw ContractViolation("tangent of size " +
                            std::to_string(v.coords.size()) + " used on " +
                            to_string(backend()));
  }
}

double Manifold::ray_excess(const Point& p, const Tangent& u, double t,
                            const Point& x) const {
  return dist(exp(p, -t * u), x) - t;
}

Point Manifold::geodesic(const Point& x, const Point& y, double t) const {
  return exp(x, t * log(x, y));
}

Point geodesic_point(const Manifold& m, const Point& x, const Point& y,
                     double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw RangeError("geodesic_point: t = " + std::to_string(t) +
                     " outside [0, 1]");
  }
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  return m.geodesic(x, y, t);
}

Point project_ball(const Manifold& m, const Point& x,
                   const GeodesicBall& ball) {
  if (ball.radius < 0.0) throw RangeError("project_ball: negative radius");
  const double d = m.dist(ball.center, x);
  if (d <= ball.radius) return x;
  if (ball.radius == 0.0) return ball.center;
  return m.exp(ball.center, (ball.radius / d) * m.log(ball.center, x));
}

Tangent finite_diff_grad(const Manifold& m,
                         const std::function<double(const Point&)>& f,
                         const Point& x, double h) {
  if (!(h > 0.0)) throw RangeError("finite_diff_grad: h must be positive");
  Tangent g = m.zero_tangent();
  for (const Tangent& e : m.tangent_basis(x)) {
    const double fp = f(m.exp(x, h * e));
    const double fm = f(m.exp(x, -h * e));
    g += ((fp - fm) / (2.0 * h)) * e;
  }
  return g;
}

double triangle_comparison_residual(const Manifold& m, const Point& x,
                                    const Point& y, const Point& p) {
  const double dxy = m.dist(x, y);
  const double dxp = m.dist(x, p);
  const double dyp = m.dist(y, p);
  return dxy * dxy - dxp * dxp - dyp * dyp +
         2.0 * m.inner(p, m.log(p, x), m.log(p, y));
}

}  // namespace horo
