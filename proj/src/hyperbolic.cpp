#include "horo/hyperbolic.hpp"

#include <cmath>

#include "horo/hyperbolic_kernel.hpp"

namespace horo {

namespace hk = hyperbolic;
using Vd = Eigen::VectorXd;

namespace {

// The closed forms multiply coordinates of size e^r by cosh/sinh of the
// distance; the extra 11 bits of long double keep round trips at ~1e-12 for
// points a few units from the apex.
using Wide = long double;
using Vw = hk::Vec<Wide>;

Vw wide(const Vd& v) { return v.cast<Wide>(); }
Vd narrow(const Vw& v) { return v.cast<double>(); }

}  // namespace

Hyperbolic::Hyperbolic(int n) : n_(n) {
  if (n < 1) throw RangeError("Hyperbolic: dimension must be >= 1");
}

Point Hyperbolic::origin() const {
  Vd x = Vd::Zero(n_ + 1);
  x(0) = 1.0;
  return {backend(), x};
}

Point Hyperbolic::point(Eigen::VectorXd coords) const {
  Point x{backend(), std::move(coords)};
  require_point(x);
  if (!is_valid(x)) {
    throw ChartError("hyperboloid point violates <x,x> = -1, x0 > 0");
  }
  return x;
}

bool Hyperbolic::is_valid(const Point& x, double tol) const {
  if (!(x.backend == backend()) || x.coords.size() != n_ + 1) return false;
  if (!x.coords.allFinite() || x.coords(0) <= 0.0) return false;
  // Relative tolerance: coordinates grow like e^d far from the apex.
  const double q = hk::minkowski<double>(x.coords, x.coords);
  return std::abs(q + 1.0) <= tol * std::max(1.0, x.coords(0) * x.coords(0));
}

bool Hyperbolic::is_tangent(const Point& x, const Tangent& v,
                            double tol) const {
  if (v.coords.size() != n_ + 1 || !v.coords.allFinite()) return false;
  const double s = std::abs(hk::minkowski<double>(x.coords, v.coords));
  return s <= tol * std::max(1.0, x.coords.norm() * v.coords.norm());
}

Point Hyperbolic::normalize(const Point& x) const {
  return {backend(), hk::renormalize<double>(x.coords)};
}

Tangent Hyperbolic::project_tangent(const Point& x, const Tangent& v) const {
  return {hk::project_tangent<double>(x.coords, v.coords)};
}

double Hyperbolic::inner(const Point& x, const Tangent& u,
                         const Tangent& v) const {
  require_point(x);
  require_tangent(u);
  require_tangent(v);
  return hk::minkowski<double>(u.coords, v.coords);
}

double Hyperbolic::dist(const Point& x, const Point& y) const {
  require_point(x);
  require_point(y);
  return static_cast<double>(hk::dist<Wide>(wide(x.coords), wide(y.coords)));
}

Point Hyperbolic::exp(const Point& x, const Tangent& v) const {
  require_point(x);
  require_tangent(v);
  const Vw xw = wide(x.coords);
  Vd y = narrow(hk::exp<Wide>(xw, hk::project_tangent<Wide>(xw, wide(v.coords))));
  return {backend(), hk::renormalize<double>(std::move(y))};
}

Tangent Hyperbolic::log(const Point& x, const Point& y) const {
  require_point(x);
  require_point(y);
  return {narrow(hk::log<Wide>(wide(x.coords), wide(y.coords)))};
}

Tangent Hyperbolic::transport(const Point& from, const Point& to,
                              const Tangent& v) const {
  require_point(from);
  require_point(to);
  require_tangent(v);
  return {narrow(
      hk::transport<Wide>(wide(from.coords), wide(to.coords), wide(v.coords)))};
}

Point Hyperbolic::geodesic(const Point& x, const Point& y, double t) const {
  require_point(x);
  require_point(y);
  const Vw xw = wide(x.coords);
  const Vw yw = wide(y.coords);
  const Wide d = hk::dist<Wide>(xw, yw);
  if (d < Wide(1e-6)) {
    // Short segments: the tangent route has no cancellation to fear.
    return {backend(), narrow(hk::exp<Wide>(
                           xw, Wide(t) * hk::log<Wide>(xw, yw)))};
  }
  const Vw z = (std::sinh((Wide(1) - Wide(t)) * d) * xw +
                std::sinh(Wide(t) * d) * yw) /
               std::sinh(d);
  return {backend(), hk::renormalize<double>(narrow(z))};
}

std::vector<Tangent> Hyperbolic::tangent_basis(const Point& x) const {
  require_point(x);
  std::vector<Tangent> basis;
  basis.reserve(n_);
  for (int i = 0; i <= n_ && static_cast<int>(basis.size()) < n_; ++i) {
    Vd e = Vd::Zero(n_ + 1);
    e(i) = 1.0;
    Vd v = hk::project_tangent<double>(x.coords, e);
    for (const Tangent& b : basis) {
      v -= hk::minkowski<double>(v, b.coords) * b.coords;
    }
    const double nv = hk::tangent_norm<double>(v);
    if (nv < 1e-8) continue;
    v /= nv;
    // Second pass for orthogonality far from the apex.
    for (const Tangent& b : basis) {
      v -= hk::minkowski<double>(v, b.coords) * b.coords;
    }
    v /= hk::tangent_norm<double>(v);
    basis.push_back({v});
  }
  return basis;
}

double Hyperbolic::busemann(const Point& p, const Tangent& u,
                            const Point& x) const {
  require_point(p);
  require_point(x);
  require_tangent(u);
  return static_cast<double>(hk::busemann_null<Wide>(
      hk::null_direction<Wide>(wide(p.coords), wide(u.coords)), wide(x.coords)));
}

Tangent Hyperbolic::busemann_gradient(const Point& p, const Tangent& u,
                                      const Point& x) const {
  require_point(p);
  require_point(x);
  require_tangent(u);
  return {narrow(hk::busemann_null_gradient<Wide>(
      hk::null_direction<Wide>(wide(p.coords), wide(u.coords)),
      wide(x.coords)))};
}

double Hyperbolic::ray_excess(const Point& p, const Tangent& u, double t,
                              const Point& x) const {
  require_point(p);
  require_point(x);
  require_tangent(u);
  // -<γ(t), x> = cosh t · a + sinh t · c with a = -<p, x>, c = <u, x>.
  const Vw pw = wide(p.coords), uw = wide(u.coords), xw = wide(x.coords);
  const Wide a = -hk::minkowski<Wide>(pw, xw);
  const Wide c = hk::minkowski<Wide>(uw, xw);
  const Wide tw = t;
  if (t < 30.0) {
    const Wide z = std::max<Wide>(1, std::cosh(tw) * a + std::sinh(tw) * c);
    return static_cast<double>(std::acosh(z) - tw);
  }
  // e^{-t} (z + sqrt(z^2 - 1)) with z = -<γ(t), x>, never forming e^t.
  const Wide e2 = std::exp(-2 * tw);
  const Wide w = 0.5L * (a + c) + 0.5L * e2 * (a - c);
  return static_cast<double>(
      std::log(w + std::sqrt(std::max<Wide>(0, w * w - e2))));
}

double Hyperbolic::busemann(const IdealPoint& xi, const Point& x) const {
  require_point(x);
  return static_cast<double>(
      hk::busemann_null<Wide>(wide(xi.coords), wide(x.coords)));
}

Tangent Hyperbolic::busemann_gradient(const IdealPoint& xi,
                                      const Point& x) const {
  require_point(x);
  return {narrow(hk::busemann_null_gradient<Wide>(wide(xi.coords),
                                                  wide(x.coords)))};
}

IdealPoint Hyperbolic::ideal_from_direction(const Point& p,
                                            const Tangent& u) const {
  require_point(p);
  require_tangent(u);
  const double nu = norm(p, u);
  if (nu == 0.0) throw RangeError("ideal_from_direction: zero direction");
  if (std::abs(nu - 1.0) > 1e-9) {
    throw RangeError("ideal_from_direction: direction is not unit length");
  }
  Vd w = hk::null_direction<double>(p.coords, u.coords);
  w /= w(0);
  // Exact null normalization: spatial part on the unit sphere.
  w.tail(n_).normalize();
  w(0) = 1.0;
  return {w};
}

IdealPoint Hyperbolic::ideal_from_boundary(const Eigen::VectorXd& zeta) const {
  if (zeta.size() != n_) {
    throw ContractViolation("ideal_from_boundary: wrong dimension");
  }
  const double nz = zeta.norm();
  if (std::abs(nz - 1.0) > 1e-9) {
    throw ChartError("ideal_from_boundary: ζ must be a unit vector");
  }
  Vd b(n_ + 1);
  b(0) = 1.0;
  b.tail(n_) = zeta / nz;
  return {b};
}

Eigen::VectorXd Hyperbolic::boundary_of(const IdealPoint& xi) const {
  return xi.coords.tail(n_) / xi.coords(0);
}

bool Hyperbolic::is_valid(const IdealPoint& xi, double tol) const {
  return xi.coords.size() == n_ + 1 && xi.coords(0) == 1.0 &&
         std::abs(hk::minkowski<double>(xi.coords, xi.coords)) <= tol;
}

PoincareCoord Hyperbolic::to_poincare(const Point& x) const {
  require_point(x);
  return {hk::to_poincare<double>(x.coords)};
}

Point Hyperbolic::from_poincare(const PoincareCoord& z) const {
  if (z.coords.size() != n_) {
    throw ContractViolation("from_poincare: wrong dimension");
  }
  if (!(z.coords.norm() < 1.0 - 1e-12)) {
    throw ChartError("from_poincare: ‖z‖ >= 1");
  }
  return {backend(), hk::from_poincare<double>(z.coords)};
}

Tangent Hyperbolic::apex_direction(int axis) const {
  if (axis < 0 || axis >= n_) throw RangeError("apex_direction: bad axis");
  Vd v = Vd::Zero(n_ + 1);
  v(axis + 1) = 1.0;
  return {v};
}

double poincare_dist(const PoincareCoord& z, const PoincareCoord& w) {
  const double a = 1.0 - z.coords.squaredNorm();
  const double b = 1.0 - w.coords.squaredNorm();
  if (!(a > 0.0 && b > 0.0)) throw ChartError("poincare_dist: outside ball");
  const double q = 2.0 * (z.coords - w.coords).squaredNorm() / (a * b);
  // arccosh(1 + q) = 2 asinh(sqrt(q / 2))
  return 2.0 * std::asinh(std::sqrt(q / 2.0));
}

double poincare_busemann(const Eigen::VectorXd& zeta, const PoincareCoord& z) {
  return -std::log((1.0 - z.coords.squaredNorm()) /
                   (z.coords - zeta).squaredNorm());
}

}  // namespace horo
