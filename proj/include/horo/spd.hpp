#pragma once

#include <functional>

#include "horo/manifold.hpp"

namespace horo {

namespace linalg {

/// Eigenvalues below this are treated as a loss of positive definiteness.
inline constexpr double kEigenFloor = 1e-14;

/// Applies a scalar function to the spectrum of a symmetric matrix.
Eigen::MatrixXd sym_function(const Eigen::MatrixXd& a,
                             const std::function<double(double)>& f);
Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& a);
/// Requires a positive definite argument (min eigenvalue >= kEigenFloor).
Eigen::MatrixXd sym_log(const Eigen::MatrixXd& a);
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a);
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& a);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

}  // namespace linalg

/// Direction of a flag ray t -> frame * mexp(-t diag(λ)) * frameᵀ, with λ
/// strictly decreasing. See Spd::busemann_flag.
struct FlagDirection {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd frame;  // orthogonal
};

/// Geodesic ray t -> exp(base, t * direction).
struct SpdRay {
  Point base;
  Tangent direction;  // unit length at base
};

struct NumericBusemann {
  double value = 0.0;       // limit estimate
  double bracket_lo = 0.0;  // h(T + Δ), h(t) = d(γ(t), x) - t
  double bracket_hi = 0.0;  // h(T); h is non-increasing with limit value
  bool converged = true;    // successive estimates agree to 1e-4
};

struct TylerTerm {
  double value = 0.0;
  Tangent grad;
};

/// Positive definite matrices PD(n) with the affine-invariant metric
/// <X, Y>_P = tr(P^-1 X P^-1 Y). Points and tangents store the column-major
/// n x n matrix.
class Spd final : public Manifold {
 public:
  explicit Spd(int n);

  Backend backend() const override { return {Backend::Kind::spd, n_}; }
  int dimension() const override { return n_ * (n_ + 1) / 2; }
  int ambient_size() const override { return n_ * n_; }
  int n() const { return n_; }
  Point origin() const override;

  /// Wraps a matrix; throws ChartError unless symmetric positive definite.
  Point point(const Eigen::MatrixXd& p) const;
  Tangent tangent(const Eigen::MatrixXd& v) const;
  Eigen::MatrixXd matrix(const Point& x) const;
  Eigen::MatrixXd matrix(const Tangent& v) const;

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
  /// V -> E V Eᵀ with E = (Q P^-1)^{1/2}.
  Tangent transport(const Point& from, const Point& to,
                    const Tangent& v) const override;
  std::vector<Tangent> tangent_basis(const Point& x) const override;

  double busemann(const Point& p, const Tangent& u,
                  const Point& x) const override;
  Tangent busemann_gradient(const Point& p, const Tangent& u,
                            const Point& x) const override;
  double ray_excess(const Point& p, const Tangent& u, double t,
                    const Point& x) const override;

  /// Scaled Busemann function of the flag ray: with A = frameᵀ P frame and
  /// A = L D Lᵀ (L unit lower triangular), returns Σ λ_i log D_ii. This is
  /// ‖λ‖ times the Busemann function of t -> frame mexp(-t λ/‖λ‖) frameᵀ;
  /// its gradient at the identity (identity frame) is diag(λ).
  /// Throws DegenerateFlag when consecutive λ differ by less than 1e-8.
  double busemann_flag(const FlagDirection& dir, const Point& p) const;

  /// Busemann function of a ray from its definition lim d(γ(t), x) - t,
  /// sampled at T, T + 10, T + 20 starting from T = d(base, x) + 20. The
  /// estimate is the slope of d^2 - t^2, which cancels the 1/t tail of
  /// h(t); T doubles until successive estimates agree.
  NumericBusemann busemann_numeric(const SpdRay& ray, const Point& x) const;

  /// log(xᵀ Σ^-1 x) and its Riemannian gradient -x xᵀ / (xᵀ Σ^-1 x).
  TylerTerm tyler_component(const Eigen::VectorXd& x, const Point& sigma) const;

  /// P / det(P)^{1/n}.
  Point det_normalize(const Point& p) const;
  double log_det(const Point& p) const;

 private:
  struct Frame;  // diagonalized ray data shared by busemann / gradient
  Frame ray_frame(const Point& p, const Tangent& u) const;

  int n_;
};

class DegenerateFlag : public Error {
 public:
  using Error::Error;
};

}  // namespace horo
