#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "horo/hconvex.hpp"
#include "horo/manifold.hpp"
#include "horo/spd.hpp"

namespace horo {

/// max_i d(·, p_i) as a single component; 1-Lipschitz.
SumObjective make_meb(ManifoldPtr m, const std::vector<Point>& points);

/// Components c_i ½d(·,p_i)² with c_i = w_i m / Σw, so the uniform mean is
/// Σ_i (w_i/Σw) ½d(·,p_i)².
SumObjective make_frechet(ManifoldPtr m, const std::vector<Point>& points,
                          const std::vector<double>& weights);

/// Components d(·,p_i); 1-Lipschitz each.
SumObjective make_median(ManifoldPtr m, const std::vector<Point>& points);

/// Components d log(x_iᵀ Σ^-1 x_i) + log det Σ on PD(d): scaled Busemann
/// functions, scale invariant, Lipschitz √(d(d-1)). On det Σ = 1 the mean is
/// the Tyler negative log-likelihood.
SumObjective make_tyler(std::shared_ptr<const Spd> m,
                        const std::vector<Eigen::VectorXd>& samples);
/// (1/m) Σ d log(x_iᵀ Σ^-1 x_i).
double tyler_nll(const Spd& m, const std::vector<Eigen::VectorXd>& samples,
                 const Point& sigma);
/// Fixed-point iteration Σ <- (d/m) Σ x xᵀ / (xᵀ Σ^-1 x), det-normalized.
Point tyler_fixed_point(const Spd& m,
                        const std::vector<Eigen::VectorXd>& samples,
                        double tol = 1e-13, int max_iters = 100000);

/// Components ‖λ_i‖ B of the rays t -> mexp(-t U_i Λ_i U_iᵀ/‖λ_i‖): scaled
/// Busemann functions with gradient U_i Λ_i U_iᵀ at the identity. U_i are
/// seeded random orthogonal matrices. Spectra must be non-increasing.
SumObjective make_horn(std::shared_ptr<const Spd> m,
                       const std::vector<Eigen::VectorXd>& spectra,
                       std::uint64_t seed);
Eigen::MatrixXd random_orthogonal(int n, std::uint64_t seed);

struct SyntheticInstance {
  SumObjective objective;
  Point reference;
  double mu = 0.0;
  double L = 0.0;
};

/// Components c_i ½d(·,p_i)² with c_i in [μ, L] (the extremes are attained
/// when m ≥ 2) and anchors in B(origin, radius); the reference minimizer is
/// a 1e-12 weighted-mean solve.
SyntheticInstance make_synthetic(ManifoldPtr m, int count, double mu, double L,
                                 double radius, std::uint64_t seed);

/// Components B_i + ½d(·,p)²: 1-strongly h-convex, and h-smooth with
/// constant 1 + (any L > 0 of the Busemann part).
SumObjective make_anchored_busemann(ManifoldPtr m,
                                    const std::vector<ScaledBusemann>& terms,
                                    const Point& anchor);

/// Riemannian Weiszfeld iteration for the geometric median.
Point weiszfeld_median(const Manifold& m, const std::vector<Point>& points,
                       double tol = 1e-13, int max_iters = 100000);

// ---------------------------------------------------------------------------
// Instances from configuration

struct InstanceSpec {
  std::string kind;  // meb | frechet | median | tyler | horn | synthetic
  Backend backend{Backend::Kind::hyperbolic, 2};
  std::vector<Eigen::VectorXd> points;   // canonical coordinates
  std::vector<double> weights;           // frechet
  std::vector<Eigen::VectorXd> vectors;  // tyler samples / horn spectra
  // synthetic
  int count = 0;
  double mu = 1.0;
  double L = 1.0;
  double radius = 1.0;
  std::uint64_t seed = 0;
};

struct Instance {
  ManifoldPtr manifold;
  SumObjective objective;
  Point start;
  std::optional<Point> reference;
  double mu = 0.0;                 // strong h-convexity of every component
  std::optional<double> L;         // h-smoothness of every component
  std::optional<double> lipschitz;
};

ManifoldPtr make_manifold(const Backend& b);
/// Builds the objective, a start point (the origin) and, where cheap, a
/// reference minimizer.
Instance build_instance(const InstanceSpec& spec);

}  // namespace horo
