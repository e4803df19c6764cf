#include "horo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "horo/frechet.hpp"

namespace horo {
namespace {

// Keeps the worst-margin instance of one theorem bound.
class BoundTracker {
 public:
  explicit BoundTracker(std::string name) { check_.name = std::move(name); }

  void update(int k, double bound, double achieved, double slack) {
    const double margin = bound + slack - achieved;
    if (!seen_ || margin < margin_) {
      seen_ = true;
      margin_ = margin;
      check_.k = k;
      check_.bound = bound;
      check_.achieved = achieved;
      check_.slack = slack;
      check_.pass = margin >= 0.0;
    }
  }

  void flush(Trace& t) const {
    if (seen_) t.bounds.push_back(check_);
  }

 private:
  BoundCheck check_;
  bool seen_ = false;
  double margin_ = 0.0;
};

// Tracks E_{k+1} ≤ E_k + slack.
struct EnergyTracker {
  std::optional<double> prev;

  void update(Trace& t, double e, double slack) {
    if (prev) {
      const double inc = e - *prev;
      t.worst_energy_increase = std::max(t.worst_energy_increase, inc);
      if (inc > slack) t.energy_monotone = false;
    }
    prev = e;
  }
};

double resolve_L(const SumObjective& f, const SolveConfig& cfg) {
  if (cfg.L > 0.0) return cfg.L;
  if (auto l = f.hsmooth(); l && *l > 0.0) return *l;
  throw RangeError("solver: L must be positive");
}

void check_common(const SumObjective& f, const Point& x0,
                  const SolveConfig& cfg) {
  if (f.components.empty()) throw ContractViolation("solver: empty objective");
  f.manifold->require_point(x0);
  if (cfg.max_iters < 1) throw RangeError("solver: max_iters must be ≥ 1");
  if (!(cfg.sub_tol > 0.0)) throw RangeError("solver: sub_tol must be positive");
}

struct Reference {
  Point x;
  double f = 0.0;
};

std::optional<Reference> reference_of(const SumObjective& f,
                                      const SolveConfig& cfg) {
  if (!cfg.reference) return std::nullopt;
  return Reference{*cfg.reference, f.value(*cfg.reference)};
}

TraceRecord make_record(const Manifold& m, int k, const Point& x, double fx,
                        double gnorm, double step,
                        const std::optional<Reference>& ref) {
  TraceRecord r{k, x, fx, gnorm, step, std::nullopt, std::nullopt, std::nullopt};
  if (ref) r.dist_ref = m.dist(x, ref->x);
  return r;
}

double sq(double x) { return x * x; }

}  // namespace

std::string to_string(StepSchedule s) {
  switch (s) {
    case StepSchedule::inv_L: return "inv_L";
    case StepSchedule::dl_sqrt: return "dl_sqrt";
    case StepSchedule::strongly_convex: return "strongly_convex";
    case StepSchedule::localize_fixed: return "localize_fixed";
    case StepSchedule::localize_shrinking: return "localize_shrinking";
  }
  return "?";
}

StepSchedule parse_schedule(const std::string& s) {
  for (auto v : {StepSchedule::inv_L, StepSchedule::dl_sqrt,
                 StepSchedule::strongly_convex, StepSchedule::localize_fixed,
                 StepSchedule::localize_shrinking}) {
    if (to_string(v) == s) return v;
  }
  throw RangeError("unknown step schedule: " + s);
}

bool Trace::pass() const {
  for (const auto& b : bounds) {
    if (!b.pass) return false;
  }
  return energy_monotone;
}

double bound_slack(double bound, int k, double sub_tol) {
  return 1e-6 * std::abs(bound) + 2.0 * k * sub_tol;
}

Point gd_step(const Manifold& m, const Point& x,
              const std::vector<Tangent>& grads, double s, double sub_tol) {
  if (!(s > 0.0)) throw RangeError("gd_step: step must be positive");
  if (grads.empty()) throw ContractViolation("gd_step: no subgradients");
  if (grads.size() == 1) return m.exp(x, -s * grads[0]);
  WeightedMeanProblem p;
  const double w = 1.0 / (static_cast<double>(grads.size()) * s);
  for (const auto& g : grads) {
    p.anchors.push_back(m.exp(x, -s * g));
    p.weights.push_back(w);
  }
  return solve_weighted_mean(m, p, sub_tol).x;
}

Point gd_step(const SumObjective& f, const Point& x, double s, double sub_tol) {
  std::vector<Tangent> grads;
  for (auto& v : f.eval_all(x)) grads.push_back(std::move(v.grad));
  return gd_step(*f.manifold, x, grads, s, sub_tol);
}

Trace run_gd(const SumObjective& f, const Point& x0, const SolveConfig& cfg) {
  check_common(f, x0, cfg);
  const Manifold& m = *f.manifold;
  const double L = resolve_L(f, cfg);
  const double mu = cfg.mu;
  const int N = cfg.max_iters;
  const auto ref = reference_of(f, cfg);

  Trace t;
  t.solver = "gd";
  t.reference_available = ref.has_value();
  BoundTracker thm_c("gd_convex"), thm_sc1("gd_strong_energy"),
      thm_sc2("gd_strong_value");
  const bool check = ref && cfg.schedule == StepSchedule::inv_L;
  double gap0 = 0.0, d0 = 0.0;
  if (ref) {
    gap0 = f.value(x0) - ref->f;
    d0 = m.dist(x0, ref->x);
  }

  Point x = x0;
  for (int k = 0;; ++k) {
    const auto vals = f.eval_all(x);
    double fx = 0.0;
    Tangent g = m.zero_tangent();
    std::vector<Tangent> grads;
    for (const auto& v : vals) {
      fx += v.value;
      g += v.grad;
      grads.push_back(v.grad);
    }
    fx /= static_cast<double>(vals.size());
    g = g / static_cast<double>(vals.size());

    double s = 1.0 / L;
    if (cfg.schedule == StepSchedule::strongly_convex) {
      s = 2.0 / (mu * (k + 2));
    } else if (cfg.schedule == StepSchedule::dl_sqrt) {
      s = cfg.D / (L * std::sqrt(N + 1.0));
    }
    t.records.push_back(make_record(m, k, x, fx, m.norm(x, g), s, ref));

    if (check && k > 0) {
      const double gap = fx - ref->f;
      const double b = L / (2.0 * k) * sq(d0);
      thm_c.update(k, b, gap, bound_slack(b, k, cfg.sub_tol));
      if (mu > 0.0) {
        const double rho = std::pow(1.0 - mu / L, k);
        const double dk = m.dist(x, ref->x);
        const double b1 = rho * (gap0 + 0.5 * mu * sq(d0));
        thm_sc1.update(k, b1, gap + 0.5 * mu * sq(dk),
                       bound_slack(b1, k, cfg.sub_tol));
        const double b2 = rho * gap0;
        thm_sc2.update(k, b2, gap, bound_slack(b2, k, cfg.sub_tol));
      }
    }
    if (k == N) break;
    x = gd_step(m, x, grads, s, cfg.sub_tol);
  }
  t.final = x;
  thm_c.flush(t);
  thm_sc1.flush(t);
  thm_sc2.flush(t);
  return t;
}

Trace run_projected_subgradient(const SumObjective& f, const Point& x0,
                                const SolveConfig& cfg) {
  check_common(f, x0, cfg);
  if (!cfg.constraint) {
    throw ContractViolation("projected subgradient: needs a constraint ball");
  }
  const Manifold& m = *f.manifold;
  const GeodesicBall& C = *cfg.constraint;
  if (m.dist(x0, C.center) > C.radius * (1.0 + 1e-12) + 1e-12) {
    throw RangeError("projected subgradient: x0 outside the constraint ball");
  }
  const bool strong = cfg.schedule == StepSchedule::strongly_convex;
  if (!strong && cfg.schedule != StepSchedule::dl_sqrt) {
    throw RangeError("projected subgradient: schedule must be dl_sqrt or "
                     "strongly_convex");
  }
  if (strong && !(cfg.mu > 0.0)) {
    throw RangeError("projected subgradient: strongly_convex needs μ > 0");
  }
  const double L = cfg.L;
  if (!(L > 0.0)) throw RangeError("projected subgradient: L must be positive");
  const double D = cfg.D > 0.0 ? cfg.D : 2.0 * C.radius;
  const int N = cfg.max_iters;
  const auto ref = reference_of(f, cfg);

  Trace t;
  t.solver = "subgradient";
  t.reference_available = ref.has_value();
  BoundTracker thm(strong ? "subgradient_strong" : "subgradient_convex");

  Point x = x0, avg = x0;
  for (int k = 0;; ++k) {
    const auto vals = f.eval_all(x);
    double fx = 0.0;
    Tangent g = m.zero_tangent();
    std::vector<Tangent> grads;
    for (const auto& v : vals) {
      fx += v.value;
      g += v.grad;
      grads.push_back(v.grad);
    }
    fx /= static_cast<double>(vals.size());
    g = g / static_cast<double>(vals.size());
    const double s = strong ? 2.0 / (cfg.mu * (k + 2))
                            : D / (L * std::sqrt(N + 1.0));
    TraceRecord r = make_record(m, k, x, fx, m.norm(x, g), s, ref);
    r.f_avg = f.value(avg);
    if (ref) {
      const double gap = *r.f_avg - ref->f;
      if (strong) {
        const double b = 2.0 * L * L / (cfg.mu * (k + 2));
        thm.update(k, b, gap, bound_slack(b, k, cfg.sub_tol));
      } else if (k == N) {
        const double b = D * L / std::sqrt(N + 1.0);
        thm.update(k, b, gap, bound_slack(b, k, cfg.sub_tol));
      }
    }
    t.records.push_back(std::move(r));
    if (k == N) break;

    x = project_ball(m, gd_step(m, x, grads, s, cfg.sub_tol), C);
    const double w = strong ? 2.0 / (k + 3) : 1.0 / (k + 2);
    avg = m.geodesic(avg, x, w);
  }
  t.final = avg;
  t.averaged = avg;
  thm.flush(t);
  return t;
}

namespace {

// x_{k+1} = exp_y(-∇f(y)/L) with the descent condition verified inline.
struct AgmGradientStep {
  Point x_next;
  double f_next = 0.0;
  std::vector<Tangent> grads;
  Tangent g;
};

AgmGradientStep agm_gradient_step(const SumObjective& f, const Point& y,
                                  double L, int k) {
  const Manifold& m = *f.manifold;
  AgmGradientStep s;
  double fy = 0.0;
  s.g = m.zero_tangent();
  for (auto& v : f.eval_all(y)) {
    fy += v.value;
    s.g += v.grad;
    s.grads.push_back(std::move(v.grad));
  }
  const double mm = static_cast<double>(s.grads.size());
  fy /= mm;
  s.g = s.g / mm;
  s.x_next = m.exp(y, (-1.0 / L) * s.g);
  s.f_next = f.value(s.x_next);
  const double g2 = m.inner(y, s.g, s.g);
  const double slack = 1e-12 * (1.0 + std::abs(fy));
  if (s.f_next > fy - g2 / (2.0 * L) + slack) {
    throw AssumptionViolation(
        "descent condition fails at step " + std::to_string(k) + ": f(y+) = " +
            std::to_string(s.f_next) + " > f(y) - |g|^2/(2L) = " +
            std::to_string(fy - g2 / (2.0 * L)),
        k);
  }
  return s;
}

}  // namespace

Trace run_agm_c(const SumObjective& f, const Point& x0, const SolveConfig& cfg) {
  check_common(f, x0, cfg);
  const Manifold& m = *f.manifold;
  const double L = resolve_L(f, cfg);
  const int N = cfg.max_iters;
  const auto ref = reference_of(f, cfg);

  Trace t;
  t.solver = "agm_c";
  t.reference_available = ref.has_value();
  BoundTracker thm("agm_convex");
  EnergyTracker energy;
  const double d0 = ref ? m.dist(x0, ref->x) : 0.0;

  Point x = x0, z = x0;
  double fx = f.value(x0);
  for (int k = 0;; ++k) {
    TraceRecord r = make_record(m, k, x, fx, m.norm(x, f.grad(x)), 1.0 / L, ref);
    if (ref) {
      const double gap = fx - ref->f;
      r.energy = 0.5 * sq(m.dist(ref->x, z)) + sq(k) / (4.0 * L) * gap;
      energy.update(t, *r.energy, N * cfg.sub_tol + 1e-12 * (1.0 + *r.energy));
      if (k > 0) {
        const double b = 2.0 * L / sq(k) * sq(d0);
        thm.update(k, b, gap, bound_slack(b, k, cfg.sub_tol));
      }
    }
    t.records.push_back(std::move(r));
    if (k == N) break;

    const Point y = m.exp(x, (2.0 / (k + 1)) * m.log(x, z));
    const auto step = agm_gradient_step(f, y, L, k);
    ProxBusemannProblem prox{z, 1.0, {}, (k + 1) / (2.0 * L)};
    for (const auto& gi : step.grads) prox.terms.push_back({y, gi});
    z = prox.terms.size() == 1 ? prox_busemann_closed_form(m, prox)
                               : solve_prox_busemann(m, prox, cfg.sub_tol).x;
    x = step.x_next;
    fx = step.f_next;
  }
  t.final = x;
  thm.flush(t);
  return t;
}

Trace run_agm_sc(const SumObjective& f, const Point& x0,
                 const SolveConfig& cfg) {
  check_common(f, x0, cfg);
  const Manifold& m = *f.manifold;
  const double L = resolve_L(f, cfg);
  const double mu = cfg.mu;
  if (!(mu > 0.0) || mu > L) throw RangeError("agm_sc: need 0 < μ ≤ L");
  const double q = std::sqrt(mu / L);
  const int N = cfg.max_iters;
  const auto ref = reference_of(f, cfg);

  Trace t;
  t.solver = "agm_sc";
  t.reference_available = ref.has_value();
  BoundTracker thm("agm_strong");
  EnergyTracker energy;
  double base = 0.0;
  if (ref) base = f.value(x0) - ref->f + 0.5 * mu * sq(m.dist(x0, ref->x));

  Point x = x0, z = x0;
  double fx = f.value(x0);
  for (int k = 0;; ++k) {
    TraceRecord r = make_record(m, k, x, fx, m.norm(x, f.grad(x)), 1.0 / L, ref);
    if (ref) {
      const double gap = fx - ref->f;
      const double rho = std::pow(1.0 - q, k);
      const double inner = gap + 0.5 * mu * sq(m.dist(z, ref->x));
      if (rho > 0.0) {
        r.energy = inner / rho;
        energy.update(t, *r.energy,
                      (N * cfg.sub_tol + 1e-12 * (1.0 + inner)) / rho);
      }
      if (k > 0) {
        const double b = rho * base;
        thm.update(k, b, gap, bound_slack(b, k, cfg.sub_tol));
      }
    }
    t.records.push_back(std::move(r));
    if (k == N) break;

    const Point y = m.exp(x, (q / (1.0 + q)) * m.log(x, z));
    const auto step = agm_gradient_step(f, y, L, k);
    WeightedMeanProblem p;
    if (q < 1.0) {
      p.anchors.push_back(z);
      p.weights.push_back((1.0 - q) * mu);
    }
    const double w = q * mu / static_cast<double>(step.grads.size());
    for (const auto& gi : step.grads) {
      p.anchors.push_back(m.exp(y, (-1.0 / mu) * gi));
      p.weights.push_back(w);
    }
    const auto solved = solve_weighted_mean(m, p, cfg.sub_tol);
    if (step.grads.size() == 1) {
      const Point closed = q < 1.0 ? m.geodesic(z, p.anchors[1], q) : p.anchors[0];
      const double gap = m.dist(closed, solved.x);
      t.crosscheck = std::max(t.crosscheck.value_or(0.0), gap);
      z = closed;
    } else {
      z = solved.x;
    }
    x = step.x_next;
    fx = step.f_next;
  }
  t.final = x;
  thm.flush(t);
  return t;
}

Point solve_reference(const SumObjective& f, const Point& x0, double mu_f,
                      double tol, int max_iters) {
  if (!(mu_f > 0.0)) throw RangeError("solve_reference: μ must be positive");
  const Manifold& m = *f.manifold;
  Point x = x0;
  double fx = f.value(x);
  double step = 1.0;
  double gap = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    const Tangent g = f.grad(x);
    const double g2 = m.inner(x, g, g);
    gap = g2 / (2.0 * mu_f);
    if (gap <= tol) return x;
    const double allowance =
        4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
    step *= 2.0;
    for (;;) {
      const Point trial = m.exp(x, -step * g);
      const double ft = f.value(trial);
      if (ft <= fx - 0.5 * step * g2 + allowance) {
        x = trial;
        fx = ft;
        break;
      }
      step *= 0.5;
      if (step < 1e-30) {
        throw ConvergenceError("solve_reference: line search failed", x, gap);
      }
    }
  }
  throw ConvergenceError("solve_reference: iteration cap reached", x, gap);
}

}  // namespace horo
