#pragma once

// Curvature-free subgradient methods on H^n: the localization method with
// normalized steps and the two-phase hyperbolic ellipsoid method. Points far
// from the origin have hyperboloid coordinates of size e^r, so these run in
// MPFR arithmetic with a precision chosen from the radius.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "horo/hyperbolic_kernel.hpp"
#include "horo/manifold.hpp"

namespace horo::fast {

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;
using RVec = hyperbolic::Vec<Real>;

/// Bits needed to resolve unit-scale distances among points within `radius`
/// of the origin: the Minkowski form cancels terms of size e^{2 radius}.
unsigned precision_bits_for(double radius);

/// Sets the MPFR default precision for its lifetime and restores it after.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

/// H^n in multiprecision hyperboloid coordinates (n+1 entries).
class Space {
 public:
  explicit Space(int n);
  int n() const { return n_; }

  RVec origin() const;
  RVec lift(const Point& p) const;
  /// Rounds to double; throws ChartError when a coordinate overflows.
  Point lower(const RVec& x) const;

  double dist(const RVec& x, const RVec& y) const;
  RVec exp(const RVec& x, const RVec& v) const;
  RVec log(const RVec& x, const RVec& y) const;
  double norm(const RVec& v) const;
  /// exp_x(t u / ‖u‖) for a direction u given in the apex frame
  /// (an n-vector, transported to x by the boost taking the apex to x).
  RVec shoot(const RVec& x, const Eigen::VectorXd& dir, double t) const;

 private:
  int n_;
};

struct FastValue {
  double value = 0.0;
  RVec grad;  // Riemannian h-subgradient in T_x, hyperboloid coordinates
};

/// An h-convex, L-Lipschitz objective on H^n evaluated in multiprecision.
struct FastObjective {
  std::string name;
  std::function<FastValue(const Space&, const RVec&)> eval;
  double lipschitz = 1.0;
};

FastObjective distance_to(RVec target);
/// max_i d(·, p_i); lowest active index supplies the subgradient.
FastObjective max_distance(std::vector<RVec> points);
/// (1/m) Σ d(·, p_i).
FastObjective mean_distance(std::vector<RVec> points);

enum class LocalizeMode { fixed, shrinking };

struct LocalizeRecord {
  int k = 0;
  double f = 0.0;
  double gnorm = 0.0;
  double step = 0.0;
  std::optional<double> dist_ref;
};

struct LocalizeResult {
  RVec x;  // best iterate (fixed) or x_N (shrinking)
  double f = 0.0;
  int iters = 0;
  int queries = 0;
  bool optimal = false;  // a zero subgradient ended the run
  std::vector<LocalizeRecord> records;
  // cosh d(x_{k+1},x*) ≤ cosh d(x_k,x*) / cosh δ whenever f(x_k) - f* > Lδ
  // (fixed mode, reference supplied); worst relative excess.
  std::optional<bool> monotone;
  double worst_monotone_excess = 0.0;
};

struct LocalizeConfig {
  LocalizeMode mode = LocalizeMode::shrinking;
  double r = 10.0;      // the argmin set meets B(p, r)
  double delta = 0.5;   // fixed-mode step length
  std::optional<RVec> reference;
  std::optional<double> f_star;
};

/// Iteration count of each mode: ⌈log cosh r / log cosh δ⌉ (fixed) and
/// ⌈4 log(r/4)⌉ (shrinking, r ≥ 4).
int localize_iterations(LocalizeMode mode, double r, double delta);

LocalizeResult run_hyperbolic_localize(const Space& h, const FastObjective& f,
                                       const RVec& p, const LocalizeConfig& cfg);

struct EllipsoidConfig {
  double r = 10.0;
  double delta = 0.01;
  double budget_constant = 64.0;
  std::optional<RVec> reference;
};

struct EllipsoidResult {
  RVec x;
  double f = 0.0;
  int queries = 0;
  int phase1_queries = 0;
  int phase2_queries = 0;
  double budget = 0.0;  // C (log r + n² log(1/δ))
  bool within_budget = false;
  std::optional<double> gap;  // f(x) - f(x*) when a reference is supplied
};

/// Phase 1: shrinking localization to B(x_N, 4). Phase 2: central-cut
/// ellipsoid method on f∘Φ over Φ⁻¹(B(x_N, 5)), Φ the Poincaré chart centred
/// at x_N; stops once the ellipsoid is too small to hold the image of a
/// δ-ball, so the best centre has f - f* ≤ Lδ.
EllipsoidResult run_hyperbolic_ellipsoid(const Space& h, const FastObjective& f,
                                         const RVec& p,
                                         const EllipsoidConfig& cfg);

/// Poincaré chart centred at c: Φ(u) = B_c · from_poincare(u).
struct Chart {
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> boost;
  RVec map(const Eigen::VectorXd& u) const;
  /// Euclidean gradient of f∘Φ at u from the Riemannian gradient at Φ(u).
  Eigen::VectorXd pullback(const Eigen::VectorXd& u, const RVec& grad) const;
};
Chart chart_at(const RVec& c);

/// Slope of log(f(x_k) - f*) against k over a localization run; a
/// diagnostic for the geometric phase of shrinking mode.
std::optional<double> log_gap_slope(const LocalizeResult& r, double f_star);

}  // namespace horo::fast
