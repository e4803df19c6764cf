#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "horo/hconvex.hpp"
#include "horo/manifold.hpp"

namespace horo {

enum class StepSchedule {
  inv_L,            // s = 1/L
  dl_sqrt,          // s = D / (L √(N+1))
  strongly_convex,  // s_k = 2 / (μ (k+2))
  localize_fixed,   // normalized steps of length δ (hyperbolic)
  localize_shrinking,  // normalized steps of length r e^{-k/4} / 2
};

std::string to_string(StepSchedule s);
StepSchedule parse_schedule(const std::string& s);

struct SolveConfig {
  int max_iters = 100;  // N
  StepSchedule schedule = StepSchedule::inv_L;
  double L = 1.0;
  double mu = 0.0;
  double D = 0.0;      // diameter for dl_sqrt; 0 means 2 × constraint radius
  double delta = 0.5;  // localization step / accuracy
  double sub_tol = 1e-10;
  std::optional<GeodesicBall> constraint;
  std::uint64_t seed = 0;
  /// Reference minimizer x* (over the constraint, if any); enables the
  /// theorem-bound checks and energies.
  std::optional<Point> reference;
};

struct TraceRecord {
  int k = 0;
  Point x;
  double f = 0.0;
  double gnorm = 0.0;
  double step = 0.0;
  std::optional<double> f_avg;     // f at the geodesic average x̄_k
  std::optional<double> energy;    // Lyapunov energy E_k
  std::optional<double> dist_ref;  // d(x_k, x*)
};

/// One theorem bound evaluated along a run.
struct BoundCheck {
  std::string name;
  int k = 0;  // iteration at which the worst margin occurred
  double bound = 0.0;
  double achieved = 0.0;
  double slack = 0.0;
  bool pass = true;
};

struct Trace {
  std::string solver;
  std::vector<TraceRecord> records;
  Point final;                      // x_N (x̄_N for the subgradient method)
  std::optional<Point> averaged;    // x̄_N
  bool reference_available = false;
  std::vector<BoundCheck> bounds;   // worst-margin check per theorem bound
  bool energy_monotone = true;
  double worst_energy_increase = 0.0;
  /// m = 1 AGM-sc: largest gap between the closed-form and solved z-updates.
  std::optional<double> crosscheck;

  bool pass() const;
};

/// An algorithm hypothesis (e.g. the descent condition) failed at step k.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(const std::string& what, int k)
      : Error(what), k(k) {}
  int k;
};

/// Slack allowed on every theorem bound after k inexact steps.
double bound_slack(double bound, int k, double sub_tol);

/// argmin_x (1/m) Σ Q^{1/s}_{x, g_i}(y): the weighted mean of exp_x(-s g_i).
Point gd_step(const SumObjective& f, const Point& x, double s, double sub_tol);
Point gd_step(const Manifold& m, const Point& x,
              const std::vector<Tangent>& grads, double s, double sub_tol);

Trace run_gd(const SumObjective& f, const Point& x0, const SolveConfig& cfg);
Trace run_projected_subgradient(const SumObjective& f, const Point& x0,
                                const SolveConfig& cfg);
Trace run_agm_c(const SumObjective& f, const Point& x0, const SolveConfig& cfg);
Trace run_agm_sc(const SumObjective& f, const Point& x0,
                 const SolveConfig& cfg);

/// High-accuracy minimizer of a strongly g-convex differentiable objective by
/// Armijo gradient descent on f itself (reference solutions for the bound
/// checks). Stops when ‖∇f‖²/(2 μ_f) ≤ tol.
Point solve_reference(const SumObjective& f, const Point& x0, double mu_f,
                      double tol = 1e-12, int max_iters = 100000);

}  // namespace horo
