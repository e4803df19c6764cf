#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace horo {

/// Chart-constraint tolerance shared by every backend.
inline constexpr double kChartTol = 1e-10;

// ---------------------------------------------------------------------------
// Errors

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs from different backends, wrong sizes, or tangents at the wrong base.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Coordinates that do not satisfy the backend chart constraint.
class ChartError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Floating-point breakdown: overflow, underflow, degenerate linear algebra.
class NumericError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Values

struct Backend {
  enum class Kind { hyperbolic, spd };
  Kind kind;
  int n;  // H^n or PD(n)

  friend bool operator==(const Backend&, const Backend&) = default;
};

std::string to_string(const Backend& b);

/// A point in the canonical chart of a backend (hyperboloid coordinates for
/// H^n, the column-major n*n matrix for PD(n)).
struct Point {
  Backend backend;
  Eigen::VectorXd coords;
};

/// Tangent coordinates in the backend's ambient representation. The base point
/// is always passed alongside.
struct Tangent {
  Eigen::VectorXd coords;

  Tangent& operator+=(const Tangent& o) {
    coords += o.coords;
    return *this;
  }
  Tangent& operator-=(const Tangent& o) {
    coords -= o.coords;
    return *this;
  }
  Tangent& operator*=(double s) {
    coords *= s;
    return *this;
  }
  friend Tangent operator+(Tangent a, const Tangent& b) { return a += b; }
  friend Tangent operator-(Tangent a, const Tangent& b) { return a -= b; }
  friend Tangent operator-(Tangent a) {
    a.coords = -a.coords;
    return a;
  }
  friend Tangent operator*(double s, Tangent a) { return a *= s; }
  friend Tangent operator*(Tangent a, double s) { return a *= s; }
  friend Tangent operator/(Tangent a, double s) { return a *= 1.0 / s; }
};

struct GeodesicBall {
  Point center;
  double radius = 0.0;
};

// ---------------------------------------------------------------------------
// Manifold contract

/// Computational contract of a Hadamard manifold backend. Implementations are
/// immutable; all methods are pure.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual Backend backend() const = 0;
  /// Intrinsic dimension.
  virtual int dimension() const = 0;
  /// Length of Point::coords / Tangent::coords.
  virtual int ambient_size() const = 0;

  /// Reference point: hyperboloid apex or the identity matrix.
  virtual Point origin() const = 0;

  virtual bool is_valid(const Point& x, double tol = kChartTol) const = 0;
  virtual bool is_tangent(const Point& x, const Tangent& v,
                          double tol = kChartTol) const = 0;
  /// Re-imposes the chart constraint (removes round-off drift).
  virtual Point normalize(const Point& x) const = 0;
  /// Orthogonal projection of an ambient vector onto T_x M.
  virtual Tangent project_tangent(const Point& x, const Tangent& v) const = 0;

  virtual double inner(const Point& x, const Tangent& u,
                       const Tangent& v) const = 0;
  double norm(const Point& x, const Tangent& v) const;

  virtual double dist(const Point& x, const Point& y) const = 0;
  virtual Point exp(const Point& x, const Tangent& v) const = 0;
  virtual Tangent log(const Point& x, const Point& y) const = 0;
  /// Parallel transport along the geodesic segment from `from` to `to`.
  virtual Tangent transport(const Point& from, const Point& to,
                            const Tangent& v) const = 0;

  /// Point at fraction t of the geodesic from x to y. The default goes
  /// through exp/log; backends may override with a direct formula.
  virtual Point geodesic(const Point& x, const Point& y, double t) const;

  /// Deterministic orthonormal basis of T_x M (Gram-Schmidt over the
  /// canonical ambient basis).
  virtual std::vector<Tangent> tangent_basis(const Point& x) const = 0;

  /// Unit-scale Busemann function B_{p,u}(x), ‖u‖ = 1: the limit of
  /// d(γ(t), x) - t along γ(t) = exp_p(-t u).
  virtual double busemann(const Point& p, const Tangent& u,
                          const Point& x) const = 0;
  /// Gradient of B_{p,u} at x (unit norm).
  virtual Tangent busemann_gradient(const Point& p, const Tangent& u,
                                    const Point& x) const = 0;
  /// d(exp_p(-t u), x) - t for unit u, which decreases to B_{p,u}(x) as
  /// t -> ∞. Backends override it to avoid forming the far point.
  virtual double ray_excess(const Point& p, const Tangent& u, double t,
                            const Point& x) const;

  Tangent zero_tangent() const {
    return Tangent{Eigen::VectorXd::Zero(ambient_size())};
  }

  /// Throws ContractViolation unless x belongs to this backend.
  void require_point(const Point& x) const;
  void require_tangent(const Tangent& v) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

// ---------------------------------------------------------------------------
// Generic geometry built on the contract

/// exp(x, t * log(x, y)) for t in [0, 1].
Point geodesic_point(const Manifold& m, const Point& x, const Point& y,
                     double t);

/// Metric projection onto a closed geodesic ball.
Point project_ball(const Manifold& m, const Point& x, const GeodesicBall& ball);

/// Central-difference Riemannian gradient of f at x over the orthonormal
/// frame returned by tangent_basis.
Tangent finite_diff_grad(const Manifold& m,
                         const std::function<double(const Point&)>& f,
                         const Point& x, double h = 1e-6);

/// Residual of the triangle comparison
///   d(x,y)^2 - d(x,p)^2 - d(y,p)^2 + 2 <log_p x, log_p y>  (>= 0 on Hadamard
///   manifolds).
double triangle_comparison_residual(const Manifold& m, const Point& x,
                                    const Point& y, const Point& p);

}  // namespace horo
