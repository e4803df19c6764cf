#include "horo/spd.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace horo {

using Md = Eigen::MatrixXd;
using Vd = Eigen::VectorXd;

namespace linalg {

namespace {

Eigen::SelfAdjointEigenSolver<Md> eig(const Md& a) {
  Eigen::SelfAdjointEigenSolver<Md> es(symmetrize(a));
  if (es.info() != Eigen::Success) {
    throw ChartError("symmetric eigendecomposition failed");
  }
  return es;
}

void require_pd(const Vd& ev) {
  if (!(ev.minCoeff() >= kEigenFloor)) {
    throw ChartError("matrix is not positive definite (min eigenvalue " +
                     std::to_string(ev.minCoeff()) + ")");
  }
}

}  // namespace

Md sym_function(const Md& a, const std::function<double(double)>& f) {
  const auto es = eig(a);
  Vd fv = es.eigenvalues().unaryExpr(f);
  return symmetrize(es.eigenvectors() * fv.asDiagonal() *
                    es.eigenvectors().transpose());
}

Md sym_exp(const Md& a) {
  return sym_function(a, [](double x) { return std::exp(x); });
}

Md sym_log(const Md& a) {
  const auto es = eig(a);
  require_pd(es.eigenvalues());
  Vd fv = es.eigenvalues().array().log();
  return symmetrize(es.eigenvectors() * fv.asDiagonal() *
                    es.eigenvectors().transpose());
}

Md sym_sqrt(const Md& a) {
  const auto es = eig(a);
  require_pd(es.eigenvalues());
  Vd fv = es.eigenvalues().array().sqrt();
  return symmetrize(es.eigenvectors() * fv.asDiagonal() *
                    es.eigenvectors().transpose());
}

Md sym_inv_sqrt(const Md& a) {
  const auto es = eig(a);
  require_pd(es.eigenvalues());
  Vd fv = es.eigenvalues().array().rsqrt();
  return symmetrize(es.eigenvectors() * fv.asDiagonal() *
                    es.eigenvectors().transpose());
}

}  // namespace linalg

using linalg::symmetrize;

struct Spd::Frame {
  Md sqrt_p;
  Md inv_sqrt_p;
  Md rotation;     // columns: eigenvectors of the whitened direction
  Vd lambda;       // decreasing
};

Spd::Spd(int n) : n_(n) {
  if (n < 1) throw RangeError("Spd: dimension must be >= 1");
}

Point Spd::origin() const {
  const Md id = Md::Identity(n_, n_);
  return {backend(), Eigen::Map<const Vd>(id.data(), n_ * n_)};
}

Point Spd::point(const Md& p) const {
  if (p.rows() != n_ || p.cols() != n_) {
    throw ContractViolation("Spd::point: expected " + std::to_string(n_) +
                            "x" + std::to_string(n_) + " matrix");
  }
  Point x{backend(), Eigen::Map<const Vd>(p.data(), n_ * n_)};
  if (!is_valid(x)) throw ChartError("matrix is not symmetric positive definite");
  return normalize(x);
}

Tangent Spd::tangent(const Md& v) const {
  if (v.rows() != n_ || v.cols() != n_) {
    throw ContractViolation("Spd::tangent: wrong matrix size");
  }
  const Md s = symmetrize(v);
  return {Eigen::Map<const Vd>(s.data(), n_ * n_)};
}

Md Spd::matrix(const Point& x) const {
  require_point(x);
  return Eigen::Map<const Md>(x.coords.data(), n_, n_);
}

Md Spd::matrix(const Tangent& v) const {
  require_tangent(v);
  return Eigen::Map<const Md>(v.coords.data(), n_, n_);
}

bool Spd::is_valid(const Point& x, double tol) const {
  if (!(x.backend == backend()) || x.coords.size() != n_ * n_) return false;
  if (!x.coords.allFinite()) return false;
  const Md p = Eigen::Map<const Md>(x.coords.data(), n_, n_);
  if ((p - p.transpose()).norm() > tol * std::max(1.0, p.norm())) return false;
  Eigen::SelfAdjointEigenSolver<Md> es(symmetrize(p), Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
}

bool Spd::is_tangent(const Point&, const Tangent& v, double tol) const {
  if (v.coords.size() != n_ * n_ || !v.coords.allFinite()) return false;
  const Md m = Eigen::Map<const Md>(v.coords.data(), n_, n_);
  return (m - m.transpose()).norm() <= tol * std::max(1.0, m.norm());
}

Point Spd::normalize(const Point& x) const {
  const Md p = symmetrize(Eigen::Map<const Md>(x.coords.data(), n_, n_));
  return {backend(), Eigen::Map<const Vd>(p.data(), n_ * n_)};
}

Tangent Spd::project_tangent(const Point&, const Tangent& v) const {
  return tangent(Eigen::Map<const Md>(v.coords.data(), n_, n_));
}

double Spd::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  const Md w = linalg::sym_inv_sqrt(matrix(x));
  const Md a = w * matrix(u) * w;
  const Md b = w * matrix(v) * w;
  return (a.array() * b.array()).sum();
}

double Spd::dist(const Point& x, const Point& y) const {
  const Md w = linalg::sym_inv_sqrt(matrix(x));
  Eigen::SelfAdjointEigenSolver<Md> es(symmetrize(w * matrix(y) * w),
                                       Eigen::EigenvaluesOnly);
  const Vd ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw ChartError("Spd::dist: non-PD argument");
  return ev.array().log().matrix().norm();
}

Point Spd::exp(const Point& x, const Tangent& v) const {
  const Md p = matrix(x);
  const Md s = linalg::sym_sqrt(p);
  const Md w = linalg::sym_inv_sqrt(p);
  const Md e = s * linalg::sym_exp(w * matrix(v) * w) * s;
  const Md r = symmetrize(e);
  return {backend(), Eigen::Map<const Vd>(r.data(), n_ * n_)};
}

Tangent Spd::log(const Point& x, const Point& y) const {
  const Md p = matrix(x);
  const Md s = linalg::sym_sqrt(p);
  const Md w = linalg::sym_inv_sqrt(p);
  return tangent(s * linalg::sym_log(w * matrix(y) * w) * s);
}

Tangent Spd::transport(const Point& from, const Point& to,
                       const Tangent& v) const {
  const Md p = matrix(from);
  const Md s = linalg::sym_sqrt(p);
  const Md w = linalg::sym_inv_sqrt(p);
  const Md e = s * linalg::sym_sqrt(w * matrix(to) * w) * w;
  return tangent(e * matrix(v) * e.transpose());
}

std::vector<Tangent> Spd::tangent_basis(const Point& x) const {
  const Md s = linalg::sym_sqrt(matrix(x));
  std::vector<Tangent> basis;
  basis.reserve(dimension());
  for (int j = 0; j < n_; ++j) {
    for (int i = j; i < n_; ++i) {
      Md e = Md::Zero(n_, n_);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(tangent(s * e * s));
    }
  }
  return basis;
}

Spd::Frame Spd::ray_frame(const Point& p, const Tangent& u) const {
  Frame f;
  const Md pm = matrix(p);
  f.sqrt_p = linalg::sym_sqrt(pm);
  f.inv_sqrt_p = linalg::sym_inv_sqrt(pm);
  Eigen::SelfAdjointEigenSolver<Md> es(
      symmetrize(f.inv_sqrt_p * matrix(u) * f.inv_sqrt_p));
  // Eigen sorts ascending; the flag formula wants decreasing entries.
  f.lambda = es.eigenvalues().reverse();
  f.rotation = es.eigenvectors().rowwise().reverse();
  return f;
}

namespace {

// Σ λ_i log D_ii for A = L D Lᵀ, via the Cholesky factor (D_ii = C_ii^2).
double ldl_busemann(const Vd& lambda, const Md& a, Md* chol = nullptr) {
  Eigen::LLT<Md> llt(symmetrize(a));
  if (llt.info() != Eigen::Success) {
    throw ChartError("busemann: argument is not positive definite");
  }
  const Md c = llt.matrixL();
  double b = 0.0;
  for (int i = 0; i < lambda.size(); ++i) {
    b += 2.0 * lambda(i) * std::log(c(i, i));
  }
  if (chol) *chol = c;
  return b;
}

}  // namespace

double Spd::busemann(const Point& p, const Tangent& u, const Point& x) const {
  const Frame f = ray_frame(p, u);
  const Md a = f.rotation.transpose() * f.inv_sqrt_p * matrix(x) *
               f.inv_sqrt_p * f.rotation;
  return ldl_busemann(f.lambda, a);
}

Tangent Spd::busemann_gradient(const Point& p, const Tangent& u,
                               const Point& x) const {
  const Frame f = ray_frame(p, u);
  const Md g = f.sqrt_p * f.rotation;
  const Md a = f.rotation.transpose() * f.inv_sqrt_p * matrix(x) *
               f.inv_sqrt_p * f.rotation;
  Md c;
  ldl_busemann(f.lambda, a, &c);
  // With A = C Cᵀ the isometry Y -> C Y Cᵀ carries I to A and the flag ray
  // through I to the gradient line through A, so grad = C Λ Cᵀ at A.
  const Md grad_a = c * f.lambda.asDiagonal() * c.transpose();
  return tangent(g * grad_a * g.transpose());
}

double Spd::ray_excess(const Point& p, const Tangent& u, double t,
                       const Point& x) const {
  // In the frame of the ray, γ(t) = mexp(-tΛ) and d(γ(t), x) = ‖2 log σ‖
  // with σ the singular values of K D, A = K^-1 K^-T, D = diag(e^{s_i}),
  // s_i = -tλ_i/2. Columns whose scales differ by more than e^20 decouple
  // (to relative e^-40), so σ is assembled cluster by cluster in log form
  // and e^{s_i} is only ever formed relative to its cluster.
  const Frame f = ray_frame(p, u);
  const Md a = symmetrize(f.rotation.transpose() * f.inv_sqrt_p * matrix(x) *
                          f.inv_sqrt_p * f.rotation);
  Eigen::LLT<Md> llt(a);
  if (llt.info() != Eigen::Success) {
    throw ChartError("ray_excess: argument is not positive definite");
  }
  const Md k = llt.matrixL().solve(Md::Identity(n_, n_));
  const Vd s = -0.5 * t * f.lambda;
  // λ is decreasing, so s is increasing: walk the columns from the back.
  std::vector<int> order(n_);
  for (int i = 0; i < n_; ++i) order[i] = n_ - 1 - i;
  Md basis(n_, 0);
  double cross = 0.0;  // Σ ℓ² - Σ (2 s)², ℓ = 2 log σ
  for (int start = 0; start < n_;) {
    int end = start + 1;
    while (end < n_ && s(order[end - 1]) - s(order[end]) < 20.0) ++end;
    const int size = end - start;
    Md cols(n_, size);
    for (int j = 0; j < size; ++j) cols.col(j) = k.col(order[start + j]);
    for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass) {
      cols -= basis * (basis.transpose() * cols);
    }
    const double ref = s(order[start]);
    Md block = cols;
    for (int j = 0; j < size; ++j) {
      block.col(j) *= std::exp(s(order[start + j]) - ref);
    }
    Eigen::JacobiSVD<Md, Eigen::FullPivHouseholderQRPreconditioner> svd(block);
    const Vd rho = svd.singularValues();
    for (int j = 0; j < size; ++j) {
      const double sj = s(order[start + j]);
      const double delta = 2.0 * (ref - sj) + 2.0 * std::log(rho(j));
      cross += 4.0 * sj * delta + delta * delta;
    }
    Eigen::HouseholderQR<Md> qr(cols);
    const Md q = qr.householderQ() * Md::Identity(n_, size);
    Md grown(n_, basis.cols() + size);
    grown << basis, q;
    basis = grown;
    start = end;
  }
  const double t2 = t * t;
  const double d2 = t2 * f.lambda.squaredNorm() + cross;
  if (d2 <= 0.0 && t == 0.0) return 0.0;
  return (d2 - t2) / (std::sqrt(std::max(d2, 0.0)) + t);
}

double Spd::busemann_flag(const FlagDirection& dir, const Point& p) const {
  if (dir.lambda.size() != n_ || dir.frame.rows() != n_ ||
      dir.frame.cols() != n_) {
    throw ContractViolation("busemann_flag: dimension mismatch");
  }
  for (int i = 0; i + 1 < n_; ++i) {
    if (!(dir.lambda(i) - dir.lambda(i + 1) >= 1e-8)) {
      throw DegenerateFlag(
          "busemann_flag: λ must be strictly decreasing with gaps >= 1e-8");
    }
  }
  if ((dir.frame.transpose() * dir.frame - Md::Identity(n_, n_)).norm() >
      1e-10) {
    throw ContractViolation("busemann_flag: frame is not orthogonal");
  }
  return ldl_busemann(dir.lambda,
                      dir.frame.transpose() * matrix(p) * dir.frame);
}

NumericBusemann Spd::busemann_numeric(const SpdRay& ray, const Point& x) const {
  const double un = norm(ray.base, ray.direction);
  if (std::abs(un - 1.0) > 1e-9) {
    throw RangeError("busemann_numeric: ray direction must be unit length");
  }
  const Md w = linalg::sym_inv_sqrt(matrix(ray.base));
  Eigen::SelfAdjointEigenSolver<Md> es(
      symmetrize(w * matrix(ray.direction) * w));
  const Md o = es.eigenvectors();
  const Vd nu = es.eigenvalues();
  // In the frame where the ray is t -> mexp(t diag(ν)):
  //   d(γ(t), x) = ‖log spec(D A D)‖, D = diag(e^{-tν/2}),
  // and spec(D C Cᵀ D) = σ(Cᵀ D)^2. Jacobi SVD keeps relative accuracy on the
  // column-graded factor, which the eigenvalues of D A D would not.
  const Md a = symmetrize(o.transpose() * w * matrix(x) * w * o);
  Eigen::LLT<Md> llt(a);
  if (llt.info() != Eigen::Success) {
    throw ChartError("busemann_numeric: argument is not positive definite");
  }
  const Md ct = llt.matrixL().transpose();
  auto h = [&](double t) {
    const Vd scale = (-0.5 * t * nu).array().exp();
    const Md g = ct * scale.asDiagonal();
    Eigen::JacobiSVD<Md, Eigen::FullPivHouseholderQRPreconditioner> svd(g);
    const Vd s = svd.singularValues();
    return (2.0 * s.array().log()).matrix().norm() - t;
  };
  // In the limit d(γ(t), x)^2 - t^2 = 2 t B + c + O(e^{-g t}) with g the
  // smallest eigenvalue gap of the direction, while h(t) - B itself only
  // decays like 1/t. The difference quotient of d^2 - t^2 over [T, T + Δ]
  // removes the 1/t tail; T doubles while successive quotients disagree.
  const double nu_max = std::max(nu.cwiseAbs().maxCoeff(), 1e-300);
  constexpr double kDelta = 10.0;
  auto sq_excess = [](double t, double ht) { return ht * (2.0 * t + ht); };
  double t = dist(ray.base, x) + 20.0;
  NumericBusemann out;
  double estimate = 0.0, previous = 0.0;
  for (;;) {
    const double h0 = h(t);
    const double h1 = h(t + kDelta);
    const double h2 = h(t + 2.0 * kDelta);
    previous = (sq_excess(t + kDelta, h1) - sq_excess(t, h0)) / (2.0 * kDelta);
    estimate = (sq_excess(t + 2.0 * kDelta, h2) - sq_excess(t + kDelta, h1)) /
               (2.0 * kDelta);
    out.bracket_hi = h0;
    out.bracket_lo = h1;
    if (std::abs(estimate - previous) <= 1e-11 * (1.0 + std::abs(estimate))) {
      break;
    }
    if (2.0 * t + 2.0 * kDelta > 600.0 / nu_max) break;
    t *= 2.0;
  }
  out.value = estimate;
  out.converged = std::abs(estimate - previous) <= 1e-4;
  return out;
}

TylerTerm Spd::tyler_component(const Vd& x, const Point& sigma) const {
  if (x.size() != n_) throw ContractViolation("tyler_component: wrong size");
  if (x.squaredNorm() == 0.0) throw RangeError("tyler_component: zero sample");
  const Md s = matrix(sigma);
  Eigen::LLT<Md> llt(s);
  if (llt.info() != Eigen::Success) {
    throw ChartError("tyler_component: Σ is not positive definite");
  }
  const double q = x.dot(llt.solve(x));
  return {std::log(q), tangent(-(x * x.transpose()) / q)};
}

double Spd::log_det(const Point& p) const {
  Eigen::SelfAdjointEigenSolver<Md> es(matrix(p), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw ChartError("log_det: non-PD argument");
  }
  return es.eigenvalues().array().log().sum();
}

Point Spd::det_normalize(const Point& p) const {
  const double scale = std::exp(-log_det(p) / n_);
  const Md r = scale * matrix(p);
  return {backend(), Eigen::Map<const Vd>(r.data(), n_ * n_)};
}

}  // namespace horo
