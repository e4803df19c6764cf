#pragma once

#include "horo/manifold.hpp"

namespace horo {

/// Ideal point of H^n as a null vector b with b0 = 1.
struct IdealPoint {
  Eigen::VectorXd coords;
};

/// Coordinates in the Poincaré ball model, ‖z‖ < 1.
struct PoincareCoord {
  Eigen::VectorXd coords;
};

/// Hyperbolic space H^n in the hyperboloid model
///   { x in R^{n+1} : -x0^2 + |xs|^2 = -1, x0 > 0 }.
/// Tangent vectors at x are Minkowski-orthogonal to x; the metric is the
/// restriction of the Minkowski form.
class Hyperbolic final : public Manifold {
 public:
  explicit Hyperbolic(int n);

  Backend backend() const override {
    return {Backend::Kind::hyperbolic, n_};
  }
  int dimension() const override { return n_; }
  int ambient_size() const override { return n_ + 1; }
  Point origin() const override;

  /// Wraps hyperboloid coordinates; throws ChartError off the sheet.
  Point point(Eigen::VectorXd coords) const;

  bool is_valid(const Point& x, double tol = kChartTol) const override;
  bool is_tangent(const Point& x, const Tangent& v,
                  double tol = kChartTol) const override;
  Point normalize(const Point& x) const override;
  Tangent project_tangent(const Point& x, const Tangent& v) const override;

  double inner(const Point& x, const Tangent& u,
               const Tangent& v) const override;
  double dist(const Point& x, const Point& y) const override;
  Point exp(const Point& x, const Tangent& v) const override;
  Tangent log(const Point& x, const Point& y) const override;
  Tangent transport(const Point& from, const Point& to,
                    const Tangent& v) const override;
  /// (sinh((1-t)d) x + sinh(t d) y) / sinh(d), without a tangent round trip.
  Point geodesic(const Point& x, const Point& y, double t) const override;
  std::vector<Tangent> tangent_basis(const Point& x) const override;

  double busemann(const Point& p, const Tangent& u,
                  const Point& x) const override;
  Tangent busemann_gradient(const Point& p, const Tangent& u,
                            const Point& x) const override;
  double ray_excess(const Point& p, const Tangent& u, double t,
                    const Point& x) const override;

  // Ideal points and the Busemann function log(-<x, b>) normalized to vanish
  // at the apex.
  double busemann(const IdealPoint& xi, const Point& x) const;
  Tangent busemann_gradient(const IdealPoint& xi, const Point& x) const;
  /// End point of the ray t -> exp_p(-t u); requires ‖u‖ = 1 ± 1e-9.
  IdealPoint ideal_from_direction(const Point& p, const Tangent& u) const;
  /// Ideal point given as a unit vector on the boundary of the Poincaré ball.
  IdealPoint ideal_from_boundary(const Eigen::VectorXd& zeta) const;
  Eigen::VectorXd boundary_of(const IdealPoint& xi) const;
  bool is_valid(const IdealPoint& xi, double tol = kChartTol) const;

  PoincareCoord to_poincare(const Point& x) const;
  Point from_poincare(const PoincareCoord& z) const;

  /// Unit tangent at the apex pointing along spatial axis `axis` (0-based).
  Tangent apex_direction(int axis) const;

 private:
  int n_;
};

/// Distance evaluated directly in the Poincaré ball:
///   arccosh(1 + 2|z-w|^2 / ((1-|z|^2)(1-|w|^2))).
double poincare_dist(const PoincareCoord& z, const PoincareCoord& w);

/// The closed form -log((1-|z|^2)/|z-ζ|^2) for a boundary point ζ.
double poincare_busemann(const Eigen::VectorXd& zeta, const PoincareCoord& z);

}  // namespace horo
