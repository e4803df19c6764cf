#pragma once

#include <vector>

#include "horo/hconvex.hpp"
#include "horo/manifold.hpp"

namespace horo {

/// min_x Σ_j (w_j/2) d(x, q_j)²: (Σ w_j)-strongly g-convex.
struct WeightedMeanProblem {
  std::vector<Point> anchors;
  std::vector<double> weights;
};

/// min_z (ρ/2) d(z, anchor)² + coeff · (1/m) Σ_i B_i(z): ρ-strongly g-convex.
struct ProxBusemannProblem {
  Point anchor;
  double rho = 1.0;
  std::vector<ScaledBusemann> terms;
  double coeff = 1.0;
};

struct SubproblemResult {
  Point x;
  double gap_bound = 0.0;  // ‖∇F‖² / (2 × strong convexity modulus)
  int iters = 0;
};

/// Tolerances below this are raised to it.
inline constexpr double kSubTolFloor = 1e-12;
inline constexpr int kSubIterCap = 10000;

double weighted_mean_objective(const Manifold& m, const WeightedMeanProblem& p,
                               const Point& x);
Tangent weighted_mean_gradient(const Manifold& m, const WeightedMeanProblem& p,
                               const Point& x);
/// Armijo gradient descent from the heaviest anchor. Throws ConvergenceError
/// (with the best iterate) when the cap is reached.
SubproblemResult solve_weighted_mean(const Manifold& m,
                                     const WeightedMeanProblem& p, double tol);

double prox_busemann_objective(const Manifold& m, const ProxBusemannProblem& p,
                               const Point& z);
Tangent prox_busemann_gradient(const Manifold& m, const ProxBusemannProblem& p,
                               const Point& z);
/// Armijo gradient descent from the anchor; no terms returns the anchor.
SubproblemResult solve_prox_busemann(const Manifold& m,
                                     const ProxBusemannProblem& p, double tol);
/// One term, ρ = 1: exp_a(-coeff ∇B(a)). The gradient line of a Busemann
/// function is a geodesic, so this is the exact minimizer.
Point prox_busemann_closed_form(const Manifold& m,
                                const ProxBusemannProblem& p);

/// h(L) = min_x (1/m) Σ L² d(x, exp_y(-v_i/L))², to within tol.
double h_of_L(const Manifold& m, const Point& y, const std::vector<Tangent>& vs,
              double L, double tol);

}  // namespace horo
