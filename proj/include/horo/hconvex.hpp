#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "horo/manifold.hpp"

namespace horo {

// ---------------------------------------------------------------------------
// Scaled Busemann functions and Q surrogates

/// B_{p,v}: ‖v‖ times the Busemann function of the ray exp_p(-t v/‖v‖).
/// v = 0 is the zero function.
struct ScaledBusemann {
  Point p;
  Tangent v;
};

double busemann_value(const Manifold& m, const ScaledBusemann& b,
                      const Point& x);
Tangent busemann_grad(const Manifold& m, const ScaledBusemann& b,
                      const Point& x);

/// Q^μ_{y,v}(x) = -‖v‖²/(2μ) + (μ/2) d(y⁺⁺, x)², y⁺⁺ = exp_y(-v/μ).
/// Evaluated as ‖v‖ e + (μ/2) e² with e = d(y⁺⁺, x) - ‖v‖/μ, which stays
/// accurate when y⁺⁺ is far away (μ -> 0).
struct QFunction {
  Point y;
  Tangent v;
  double mu = 1.0;
  std::optional<Point> ypp;  // absent when exp_y(-v/μ) leaves double range
};

QFunction make_q(const Manifold& m, const Point& y, const Tangent& v,
                 double mu);
double q_value(const Manifold& m, const QFunction& q, const Point& x);
Tangent q_grad(const Manifold& m, const QFunction& q, const Point& x);

// ---------------------------------------------------------------------------
// Inequality probes

struct LimitReport {
  std::vector<double> mus;
  std::vector<double> gaps;  // |Q^μ(x) - B(x)| per μ
  bool monotone = true;      // gaps non-increasing as μ decreases
  bool pass = true;          // monotone and final gap small
};

/// Q^μ_{y,v}(x) -> B_{y,v}(x) as μ -> 0. `mus` must be decreasing.
LimitReport q_limit_check(const Manifold& m, const Point& y, const Tangent& v,
                          const Point& x, const std::vector<double>& mus);

/// Residuals (rhs - lhs, >= 0 when the inequality holds) of
///   Q^L ≤ B + (L/2) d(x,y)²,
///   Q^L ≤ Q^μ + ((L-μ)/2) d(x,y)²,
///   d(p,x)² ≤ d(p,y)² + d(x,y)² + 2 B_{y,v}(x)   with p = exp_y(-v).
struct CosineResiduals {
  double uno = 0.0;
  double duo = 0.0;
  double p_form = 0.0;
  double min() const;
};

CosineResiduals law_of_cosines_check(const Manifold& m, const Point& y,
                                     const Tangent& v, const Point& x,
                                     double mu, double L);

/// B_{x',log x'(x)}(y') + ½d(y,y')² + ½d(x,x')² - B_{x',log x'(x)}(y).
double quadruple_inequality_check(const Manifold& m, const Point& x,
                                  const Point& xp, const Point& y,
                                  const Point& yp);

// ---------------------------------------------------------------------------
// Oracles

struct OracleValue {
  double value = 0.0;
  Tangent grad;  // an h-subgradient (the gradient where differentiable)
};

/// Point where f is not differentiable; the subdifferential there contains
/// the ball of `radius` around the reported h-subgradient.
struct Kink {
  Point at;
  double radius = 0.0;
};

struct HSubgradOracle {
  std::string name;
  std::function<OracleValue(const Point&)> eval;
  double mu = 0.0;                 // strong h-convexity modulus
  std::optional<double> lips;      // Lipschitz bound
  std::optional<double> hsmooth;   // h-smoothness constant
  bool differentiable = true;
  std::vector<Kink> kinks;

  OracleValue operator()(const Point& x) const { return eval(x); }
};

HSubgradOracle dist_oracle(ManifoldPtr m, const Point& p);
/// (c/2) d(·,p)²: c-strongly h-convex and c-h-smooth.
HSubgradOracle half_sq_dist_oracle(ManifoldPtr m, const Point& p,
                                   double c = 1.0);
HSubgradOracle busemann_oracle(ManifoldPtr m, const ScaledBusemann& b);
/// Pointwise maximum; the h-subgradient comes from the lowest-index component
/// within 1e-12 of the max.
HSubgradOracle max_oracle(std::vector<HSubgradOracle> parts);
HSubgradOracle scale_oracle(HSubgradOracle f, double r);
/// g ∘ f for g increasing and convex with subderivative `dg`.
HSubgradOracle compose_increasing_convex(HSubgradOracle f,
                                         std::function<double(double)> g,
                                         std::function<double(double)> dg,
                                         std::string name = "compose");

/// f = (1/m) Σ f_i.
struct SumObjective {
  ManifoldPtr manifold;
  std::vector<HSubgradOracle> components;

  std::size_t size() const { return components.size(); }
  double value(const Point& x) const;
  /// Mean of the component h-subgradients.
  Tangent grad(const Point& x) const;
  std::vector<OracleValue> eval_all(const Point& x) const;
  double mu() const;
  std::optional<double> lips() const;
  std::optional<double> hsmooth() const;
  /// Kinks of all components, radii divided by m; coincident kinks merge.
  std::vector<Kink> kinks() const;
};

SumObjective single(ManifoldPtr m, HSubgradOracle f);
/// The sum viewed as one oracle (for certification experiments).
HSubgradOracle as_oracle(const SumObjective& f, std::string name = "sum");

// ---------------------------------------------------------------------------
// Sampled certification

struct CertReport {
  bool pass = true;
  double worst_residual = 0.0;
  int worst_sample = -1;
  // h-smoothness only: descent condition f(y⁺) ≤ f(y) - ‖∇f(y)‖²/(2L).
  bool descent_pass = true;
  double worst_descent = 0.0;
};

using SamplePairs = std::vector<std::pair<Point, Point>>;  // (y, x)

/// `count` pairs drawn from B(center, radius) with a fixed seed.
SamplePairs sample_pairs(const Manifold& m, const Point& center, double radius,
                         int count, std::uint64_t seed);

/// Residual f(x) - f(y) - S(x), S = B_{y,g(y)} (μ = 0) or Q^μ_{y,g(y)};
/// passes iff every residual ≥ -tol (1 + |f(x)|).
CertReport certify_hconvex(const Manifold& m, const HSubgradOracle& f,
                           const SamplePairs& samples, double mu,
                           double tol = 1e-8);
/// Residual Q^L_{y,∇f(y)}(x) - (f(x) - f(y)) plus the descent condition at
/// every y.
CertReport certify_hsmooth(const Manifold& m, const HSubgradOracle& f,
                           const SamplePairs& samples, double L,
                           double tol = 1e-8);

// ---------------------------------------------------------------------------
// Moreau envelope

struct ProxResult {
  Point z;
  double gap_bound = 0.0;
  int iters = 0;
};

/// argmin_z f(z) + d(x,z)²/(2λ) to objective gap ≤ tol (certified through
/// the 1/λ strong convexity). Throws ConvergenceError after max_iters.
ProxResult moreau_prox(const SumObjective& f, const Point& x, double lambda,
                       double tol, int max_iters = 10000);
double moreau_value(const SumObjective& f, const Point& x, double lambda,
                    double tol);
Tangent moreau_grad(const SumObjective& f, const Point& x, double lambda,
                    double tol);
/// f_λ as an oracle: h-convex and (1/λ)-h-smooth.
HSubgradOracle moreau_oracle(SumObjective f, double lambda, double tol);

/// Thrown by iterative solvers that hit their cap; carries the best iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Point best, double gap_bound)
      : Error(what), best(std::move(best)), gap_bound(gap_bound) {}
  Point best;
  double gap_bound;
};

}  // namespace horo
