#include "horo/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace horo {
namespace {

// Gradient descent on a `modulus`-strongly g-convex F: steps start at
// 1/modulus and halve until F drops by half the linear prediction; stops once
// ‖∇F‖²/(2 modulus) ≤ tol.
SubproblemResult armijo_descent(
    const Manifold& m, const std::function<double(const Point&)>& F,
    const std::function<Tangent(const Point&)>& grad, Point x, double modulus,
    double tol, const char* who) {
  tol = std::max(tol, kSubTolFloor);
  double fx = F(x);
  double gap = 0.0;
  for (int it = 0; it < kSubIterCap; ++it) {
    const Tangent g = grad(x);
    const double g2 = m.inner(x, g, g);
    gap = g2 / (2.0 * modulus);
    if (gap <= tol) return {x, gap, it};
    const double allowance =
        4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
    double step = 1.0 / modulus;
    for (;;) {
      const Point trial = m.exp(x, -step * g);
      const double ft = F(trial);
      if (ft <= fx - 0.5 * step * g2 + allowance) {
        x = trial;
        fx = ft;
        break;
      }
      step *= 0.5;
      if (step * modulus < 1e-30) {
        throw ConvergenceError(std::string(who) + ": line search failed", x,
                               gap);
      }
    }
  }
  const Tangent g = grad(x);
  throw ConvergenceError(std::string(who) + ": iteration cap reached", x,
                         m.inner(x, g, g) / (2.0 * modulus));
}

double total_weight(const WeightedMeanProblem& p) {
  double w = 0.0;
  for (double wj : p.weights) w += wj;
  return w;
}

void check(const WeightedMeanProblem& p) {
  if (p.anchors.empty() || p.anchors.size() != p.weights.size()) {
    throw ContractViolation(
        "weighted mean: anchors and weights must be non-empty and equal length");
  }
  for (double w : p.weights) {
    if (!(w > 0.0)) throw RangeError("weighted mean: weights must be positive");
  }
}

void check(const ProxBusemannProblem& p) {
  if (!(p.rho > 0.0)) throw RangeError("prox busemann: ρ must be positive");
  if (!(p.coeff > 0.0)) throw RangeError("prox busemann: coeff must be positive");
}

}  // namespace

double weighted_mean_objective(const Manifold& m, const WeightedMeanProblem& p,
                               const Point& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.anchors.size(); ++j) {
    const double d = m.dist(x, p.anchors[j]);
    s += 0.5 * p.weights[j] * d * d;
  }
  return s;
}

Tangent weighted_mean_gradient(const Manifold& m, const WeightedMeanProblem& p,
                               const Point& x) {
  Tangent g = m.zero_tangent();
  for (std::size_t j = 0; j < p.anchors.size(); ++j) {
    g -= p.weights[j] * m.log(x, p.anchors[j]);
  }
  return g;
}

SubproblemResult solve_weighted_mean(const Manifold& m,
                                     const WeightedMeanProblem& p, double tol) {
  check(p);
  if (!(tol > 0.0)) throw RangeError("solve_weighted_mean: tol must be positive");
  const auto heaviest = std::max_element(p.weights.begin(), p.weights.end()) -
                        p.weights.begin();
  return armijo_descent(
      m, [&](const Point& x) { return weighted_mean_objective(m, p, x); },
      [&](const Point& x) { return weighted_mean_gradient(m, p, x); },
      p.anchors[heaviest], total_weight(p), tol, "solve_weighted_mean");
}

double prox_busemann_objective(const Manifold& m, const ProxBusemannProblem& p,
                               const Point& z) {
  const double d = m.dist(z, p.anchor);
  double b = 0.0;
  for (const auto& t : p.terms) b += busemann_value(m, t, z);
  if (!p.terms.empty()) b *= p.coeff / static_cast<double>(p.terms.size());
  return 0.5 * p.rho * d * d + b;
}

Tangent prox_busemann_gradient(const Manifold& m, const ProxBusemannProblem& p,
                               const Point& z) {
  Tangent b = m.zero_tangent();
  for (const auto& t : p.terms) b += busemann_grad(m, t, z);
  if (!p.terms.empty()) b *= p.coeff / static_cast<double>(p.terms.size());
  return b - p.rho * m.log(z, p.anchor);
}

SubproblemResult solve_prox_busemann(const Manifold& m,
                                     const ProxBusemannProblem& p, double tol) {
  check(p);
  if (!(tol > 0.0)) throw RangeError("solve_prox_busemann: tol must be positive");
  if (p.terms.empty()) return {p.anchor, 0.0, 0};
  return armijo_descent(
      m, [&](const Point& z) { return prox_busemann_objective(m, p, z); },
      [&](const Point& z) { return prox_busemann_gradient(m, p, z); }, p.anchor,
      p.rho, tol, "solve_prox_busemann");
}

Point prox_busemann_closed_form(const Manifold& m,
                                const ProxBusemannProblem& p) {
  check(p);
  if (p.terms.size() != 1 || p.rho != 1.0) {
    throw ContractViolation(
        "prox_busemann_closed_form: needs exactly one term and ρ = 1");
  }
  return m.exp(p.anchor, -p.coeff * busemann_grad(m, p.terms[0], p.anchor));
}

double h_of_L(const Manifold& m, const Point& y, const std::vector<Tangent>& vs,
              double L, double tol) {
  if (!(L > 0.0)) throw RangeError("h_of_L: L must be positive");
  if (vs.empty()) throw ContractViolation("h_of_L: needs at least one tangent");
  WeightedMeanProblem p;
  const double w = 2.0 * L * L / static_cast<double>(vs.size());
  for (const auto& v : vs) {
    p.anchors.push_back(m.exp(y, (-1.0 / L) * v));
    p.weights.push_back(w);
  }
  const auto r = solve_weighted_mean(m, p, tol);
  return weighted_mean_objective(m, p, r.x);
}

}  // namespace horo
