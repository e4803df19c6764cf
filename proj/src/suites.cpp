#include "horo/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "horo/frechet.hpp"
#include "horo/hconvex.hpp"
#include "horo/hyperbolic.hpp"
#include "horo/hyperbolic_fast.hpp"
#include "horo/problems.hpp"
#include "horo/sampling.hpp"
#include "horo/solvers.hpp"
#include "horo/spd.hpp"

namespace horo {

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"geometry", "hconvex", "moreau",
                                              "rates", "hyperbolic-fast"};
  return names;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running extremes of a checked quantity.
struct Worst {
  double lo = kInf;
  double hi = -kInf;
  int n = 0;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++n;
  }
};

class Checks {
 public:
  explicit Checks(SuiteReport& r) : r_(r) {}

  void at_least(std::string name, int crit, const Worst& w, double limit,
                std::string note = "") {
    push(std::move(name), crit, w.n > 0 && w.lo >= limit, w.lo, ">=", limit,
         w.n, std::move(note));
  }
  void at_most(std::string name, int crit, const Worst& w, double limit,
               std::string note = "") {
    push(std::move(name), crit, w.n > 0 && w.hi <= limit, w.hi, "<=", limit,
         w.n, std::move(note));
  }
  void holds(std::string name, int crit, bool ok, int samples,
             std::string note = "") {
    push(std::move(name), crit, ok, ok ? 1.0 : 0.0, ">=", 1.0, samples,
         std::move(note));
  }

 private:
  void push(std::string name, int crit, bool pass, double worst,
            std::string rel, double limit, int samples, std::string note) {
    CheckResult c;
    c.name = std::move(name);
    c.criterion = crit;
    c.pass = pass;
    c.worst = worst;
    c.relation = std::move(rel);
    c.limit = limit;
    c.samples = samples;
    c.note = std::move(note);
    r_.checks.push_back(std::move(c));
  }
  SuiteReport& r_;
};

std::shared_ptr<Hyperbolic> hyp(int n) { return std::make_shared<Hyperbolic>(n); }
std::shared_ptr<Spd> spd(int n) { return std::make_shared<Spd>(n); }

Tangent random_scaled(const Manifold& m, const Point& y, Rng& rng, double max) {
  std::uniform_real_distribution<double> len(0.0, max);
  return random_direction(m, y, rng, len(rng));
}

struct Sized {
  ManifoldPtr m;
  int count;
};

// The criterion's sample sizes: 10³ on H³ and 200 on PD(2) and PD(3).
std::vector<Sized> inequality_cases() {
  return {{hyp(3), 1000}, {spd(2), 200}, {spd(3), 200}};
}

// ---------------------------------------------------------------------------

void geometry_suite(Checks& out, std::uint64_t seed) {
  {
    Worst w;
    for (const auto& c : inequality_cases()) {
      Rng rng(seed + 1);
      const Point o = c.m->origin();
      for (int i = 0; i < c.count; ++i) {
        const Point x = random_point(*c.m, o, 3.0, rng);
        const Point y = random_point(*c.m, o, 3.0, rng);
        const Point p = random_point(*c.m, o, 3.0, rng);
        w.add(triangle_comparison_residual(*c.m, x, y, p));
      }
    }
    out.at_least("triangle_comparison", 7, w, -1e-8);
  }
  {
    Worst w;
    for (ManifoldPtr m : {ManifoldPtr(hyp(3)), ManifoldPtr(spd(3))}) {
      Rng rng(seed + 2);
      for (int i = 0; i < 200; ++i) {
        const Point x = random_point(*m, m->origin(), 3.0, rng);
        const Point y = random_point(*m, m->origin(), 3.0, rng);
        w.add(m->dist(m->exp(x, m->log(x, y)), y) / (1.0 + m->dist(x, y)));
      }
    }
    out.at_most("exp_log_round_trip", 11, w, 1e-9, "relative to 1 + d(x,y)");
  }
  {
    const Hyperbolic h(3);
    Rng rng(seed + 3);
    Worst w;
    for (int i = 0; i < 500; ++i) {
      const Point x = random_point(h, h.origin(), 10.0, rng);
      const Point y = random_point(h, h.origin(), 10.0, rng);
      w.add(std::abs(h.dist(x, y) -
                     poincare_dist(h.to_poincare(x), h.to_poincare(y))));
    }
    out.at_most("hyperboloid_vs_poincare", 11, w, 1e-9, "pairwise distances up to 20");
  }
  {
    Worst w;
    bool converged = true;
    for (int n : {2, 3, 4}) {
      const Spd pd(n);
      Rng rng(seed + 10 + n);
      std::normal_distribution<double> g;
      for (int i = 0; i < 15; ++i) {
        Eigen::VectorXd lambda(n);
        for (;;) {
          for (int k = 0; k < n; ++k) lambda(k) = g(rng);
          std::sort(lambda.data(), lambda.data() + n, std::greater<double>());
          const Eigen::VectorXd gaps = lambda.head(n - 1) - lambda.tail(n - 1);
          if (gaps.minCoeff() >= 0.05 * lambda.norm()) break;
        }
        const Eigen::MatrixXd frame = random_orthogonal(n, seed + 100 * n + i);
        const Point p = random_point(pd, pd.origin(), 5.0, rng);
        const double s = lambda.norm();
        const Tangent down =
            pd.tangent(-frame * (lambda / s).asDiagonal() * frame.transpose());
        const NumericBusemann nb = pd.busemann_numeric({pd.origin(), down}, p);
        converged = converged && nb.converged;
        w.add(std::abs(pd.busemann_flag({lambda, frame}, p) - s * nb.value));
      }
    }
    out.at_most("busemann_flag_vs_numeric", 11, w, 1e-6, "PD(2), PD(3), PD(4)");
    out.holds("busemann_numeric_converged", 11, converged, w.n);
  }
  {
    Worst w;
    for (ManifoldPtr m : {ManifoldPtr(hyp(3)), ManifoldPtr(spd(2)), ManifoldPtr(spd(3))}) {
      Rng rng(seed + 20);
      const Point o = m->origin();
      for (int i = 0; i < 8; ++i) {
        const Point p = random_point(*m, o, 2.0, rng);
        const Point x = m->exp(p, random_direction(*m, p, rng, 0.5 + 2.0 * i / 8.0));
        const Tangent u = random_direction(*m, p, rng);
        std::vector<HSubgradOracle> oracles{
            dist_oracle(m, p), half_sq_dist_oracle(m, p, 1.7),
            busemann_oracle(m, {p, 1.3 * u})};
        for (const auto& f : oracles) {
          const Tangent fd =
              finite_diff_grad(*m, [&](const Point& y) { return f(y).value; }, x);
          w.add(m->norm(x, f(x).grad - fd));
        }
        const QFunction q = make_q(*m, p, u, 0.8);
        const Tangent fd =
            finite_diff_grad(*m, [&](const Point& y) { return q_value(*m, q, y); }, x);
        w.add(m->norm(x, q_grad(*m, q, x) - fd));
      }
    }
    for (int d : {2, 3}) {
      auto pd = spd(d);
      Rng rng(seed + 30 + d);
      std::normal_distribution<double> g;
      std::vector<Eigen::VectorXd> xs;
      for (int i = 0; i < 6; ++i) {
        Eigen::VectorXd v(d);
        for (int k = 0; k < d; ++k) v(k) = g(rng);
        xs.push_back(v);
      }
      const auto f = make_tyler(pd, xs);
      for (int i = 0; i < 5; ++i) {
        const Point x = random_point(*pd, pd->origin(), 2.0, rng);
        const Tangent fd = finite_diff_grad(*pd, [&](const Point& y) { return f.value(y); }, x);
        w.add(pd->norm(x, f.grad(x) - fd));
      }
    }
    out.at_most("gradient_oracles_vs_fd", 11, w, 1e-5,
                "distance, ½d², Busemann, Q^μ, Tyler");
  }
}

// ---------------------------------------------------------------------------

void hconvex_suite(Checks& out, std::uint64_t seed) {
  {
    Worst cos, quad, mono;
    for (const auto& c : inequality_cases()) {
      Rng rng(seed + 1);
      const Point o = c.m->origin();
      std::uniform_real_distribution<double> u(0.05, 3.0);
      for (int i = 0; i < c.count; ++i) {
        const Point y = random_point(*c.m, o, 3.0, rng);
        const Point x = random_point(*c.m, o, 3.0, rng);
        const Tangent v = random_scaled(*c.m, y, rng, 3.0);
        double mu = u(rng), L = u(rng);
        if (mu > L) std::swap(mu, L);
        cos.add(law_of_cosines_check(*c.m, y, v, x, mu, L).min());
        const Point xp = random_point(*c.m, o, 3.0, rng);
        const Point yp = random_point(*c.m, o, 3.0, rng);
        quad.add(quadruple_inequality_check(*c.m, x, xp, y, yp));
        double prev = -kInf;
        for (double m : {0.01, 0.1, 0.5, 1.0, 4.0}) {
          const double q = q_value(*c.m, make_q(*c.m, y, v, m), x);
          if (prev > -kInf) mono.add(q - prev);
          prev = q;
        }
      }
    }
    out.at_least("law_of_cosines_three_inequalities", 7, cos, -1e-8);
    out.at_least("quadruple_inequality", 7, quad, -1e-8);
    out.at_least("q_monotone_in_mu", 7, mono, -1e-8);
  }
  {
    const std::vector<double> mus{1.0, 0.1, 0.01, 1e-3, 1e-4};
    Worst final_gap;
    bool monotone = true;
    for (const auto& c : inequality_cases()) {
      Rng rng(seed + 2);
      for (int i = 0; i < c.count; ++i) {
        const Point y = random_point(*c.m, c.m->origin(), 1.5, rng);
        const Point x = c.m->exp(y, random_scaled(*c.m, y, rng, 3.0));
        const Tangent v = random_scaled(*c.m, y, rng, 2.0);
        const LimitReport r = q_limit_check(*c.m, y, v, x, mus);
        monotone = monotone && r.monotone;
        final_gap.add(r.gaps.back());
      }
    }
    out.holds("q_limit_gaps_decreasing", 7, monotone, final_gap.n);
    out.at_most("q_limit_final_gap", 7, final_gap, 1e-3, "μ = 1e-4");
  }
  {
    const auto m = hyp(3);
    const double tol = 1e-10;
    Rng rng(seed + 3);
    Worst increase;
    for (int trial = 0; trial < 20; ++trial) {
      const Point y = random_point(*m, m->origin(), 1.0, rng);
      std::vector<Tangent> vs;
      const int count = 1 + trial % 5;
      for (int i = 0; i < count; ++i) vs.push_back(random_scaled(*m, y, rng, 2.0));
      double prev = h_of_L(*m, y, vs, 0.5, tol);
      for (double L : {1.0, 2.0, 4.0, 8.0}) {
        const double h = h_of_L(*m, y, vs, L, tol);
        increase.add(h - prev);
        prev = h;
      }
    }
    out.at_most("h_of_L_non_increasing", 8, increase, 2.0 * tol);
    Worst spread;
    for (int trial = 0; trial < 5; ++trial) {
      const Point y = random_point(*m, m->origin(), 1.0, rng);
      const Tangent u = random_direction(*m, y, rng, 1.0);
      std::uniform_real_distribution<double> c(-2.0, 2.0);
      std::vector<Tangent> vs;
      for (int i = 0; i < 4; ++i) vs.push_back(c(rng) * u);
      double lo = kInf, hi = -kInf;
      for (double L : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double h = h_of_L(*m, y, vs, L, tol);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      spread.add(hi - lo);
    }
    out.at_most("h_of_L_constant_on_collinear_anchors", 8, spread, tol);
  }
  {
    const Hyperbolic h(2);
    const double s = 1.0 / std::sqrt(2.0);
    const Point x = h.from_poincare({Eigen::Vector2d(s, 0.0)});
    const IdealPoint xi1 = h.ideal_from_boundary(Eigen::Vector2d(1.0, 0.0));
    const IdealPoint xi2 = h.ideal_from_boundary(Eigen::Vector2d(0.0, 1.0));
    const IdealPoint xib = h.ideal_from_boundary(Eigen::Vector2d(s, s));
    Worst err;
    err.add(std::abs(h.busemann(xi1, x) - -1.76275));
    err.add(std::abs(h.busemann(xi2, x) - 1.09861));
    err.add(std::abs(h.busemann(xib, x) - 0.0));
    out.at_most("disk_busemann_constants", 10, err, 5e-6,
                "B1, B2, B̄ at z = 1/√2: -1.76275, 1.09861, 0");

    const auto hp = hyp(2);
    const Point o = hp->origin();
    SumObjective sum{hp,
                     {busemann_oracle(hp, {o, hp->busemann_gradient(xi1, o)}),
                      busemann_oracle(hp, {o, hp->busemann_gradient(xi2, o)})}};
    const auto f = scale_oracle(as_oracle(sum), 2.0);
    const CertReport r = certify_hconvex(*hp, f, {{o, x}}, 0.0);
    Worst dev;
    dev.add(std::abs(r.worst_residual - (-1.76275 + 1.09861)));
    out.holds("busemann_sum_certificate_fails", 10, !r.pass, 1,
              "residual " + std::to_string(r.worst_residual));
    out.at_most("busemann_sum_residual", 10, dev, 1e-5, "expected -0.66414");
  }
}

// ---------------------------------------------------------------------------

void moreau_suite(Checks& out, std::uint64_t seed) {
  Worst hconvex, hsmooth, descent, grad, min_gap, lower;
  for (ManifoldPtr m : {ManifoldPtr(hyp(2)), ManifoldPtr(spd(2))}) {
    Rng rng(seed + 1);
    const Point o = m->origin();
    const Point p = m->exp(o, m->tangent_basis(o)[1]);
    std::vector<Point> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(random_point(*m, o, 1.5, rng));
    struct Case {
      SumObjective f;
      Point xstar;
    };
    const std::vector<Case> cases{{single(m, dist_oracle(m, p)), p},
                                  {make_median(m, pts), weiszfeld_median(*m, pts)}};
    for (const auto& c : cases) {
      const double fstar = c.f.value(c.xstar);
      for (double lambda : {0.1, 1.0}) {
        const auto env = moreau_oracle(c.f, lambda, 1e-14);
        const auto samples = sample_pairs(*m, o, 3.0, 40, seed + 2);
        const CertReport hc = certify_hconvex(*m, env, samples, 0.0, 1e-6);
        const CertReport hs = certify_hsmooth(*m, env, samples, 1.0 / lambda, 1e-6);
        hconvex.add(hc.pass ? 0.0 : 1.0);
        hsmooth.add(hs.pass ? 0.0 : 1.0);
        descent.add(hs.descent_pass ? 0.0 : 1.0);
        for (int i = 0; i < 3; ++i) {
          const Point x = random_point(*m, o, 2.0, rng);
          const Tangent g = moreau_grad(c.f, x, lambda, 1e-15);
          const Tangent fd = finite_diff_grad(
              *m, [&](const Point& y) { return moreau_value(c.f, y, lambda, 1e-15); }, x);
          grad.add(m->norm(x, g - fd));
          lower.add(moreau_value(c.f, x, lambda, 1e-14) - fstar);
        }
        min_gap.add(std::abs(moreau_value(c.f, c.xstar, lambda, 1e-15) - fstar));
      }
    }
  }
  out.at_most("envelope_hconvex_certificate", 9, hconvex, 0.0, "failures; tol 1e-6");
  out.at_most("envelope_hsmooth_certificate", 9, hsmooth, 0.0, "failures; L = 1/λ, tol 1e-6");
  out.at_most("envelope_descent_condition", 9, descent, 0.0, "failures");
  out.at_most("moreau_grad_vs_fd", 9, grad, 1e-4);
  out.at_most("min_envelope_equals_min_f", 9, min_gap, 1e-8);
  out.at_least("envelope_above_min_f", 9, lower, -1e-8);
}

// ---------------------------------------------------------------------------

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Worst achieved/(bound + slack) over the trace's checks, and their verdict.
void record_bounds(const Trace& t, Worst& ratio, bool& ok) {
  ok = ok && t.reference_available && !t.bounds.empty();
  for (const auto& b : t.bounds) {
    ok = ok && b.pass;
    ratio.add(b.achieved - (b.bound + b.slack));
  }
}

void rates_suite(Checks& out, std::uint64_t seed) {
  const std::vector<ManifoldPtr> spaces{hyp(3), spd(2)};
  {
    Worst excess;
    bool ok = true;
    for (const auto& m : spaces) {
      for (int count : {1, 5}) {
        const auto s = make_synthetic(m, count, 0.2, 1.0, 3.0, seed + count);
        SolveConfig cfg;
        cfg.max_iters = 50;
        cfg.L = s.L;
        cfg.reference = s.reference;
        record_bounds(run_gd(s.objective, m->origin(), cfg), excess, ok);
      }
    }
    out.holds("gd_convex_bound", 1, ok, excess.n);
    out.at_most("gd_convex_excess", 1, excess, 0.0, "achieved - (bound + slack)");
  }
  {
    Worst excess, one_step;
    bool ok = true;
    for (const auto& m : spaces) {
      for (int count : {1, 5}) {
        for (double kappa : {1.0, 4.0, 25.0}) {
          const auto s = make_synthetic(m, count, 1.0 / kappa, 1.0, 3.0, seed + 10 + count);
          SolveConfig cfg;
          cfg.max_iters = 60;
          cfg.L = s.L;
          cfg.mu = s.mu;
          cfg.reference = s.reference;
          const Trace t = run_gd(s.objective, m->origin(), cfg);
          record_bounds(t, excess, ok);
          if (s.mu == s.L) one_step.add(t.records[1].f - s.objective.value(s.reference));
        }
      }
    }
    out.holds("gd_strong_bounds", 2, ok, excess.n);
    out.at_most("gd_strong_excess", 2, excess, 0.0, "achieved - (bound + slack)");
    out.at_most("gd_kappa_one_single_step_gap", 2, one_step, 1e-9);
  }
  {
    Worst excess;
    bool ok = true;
    for (ManifoldPtr m : {ManifoldPtr(hyp(2)), ManifoldPtr(spd(2))}) {
      Rng rng(seed + 20);
      const GeodesicBall C{m->origin(), 1.5};
      for (int k : {4, 8}) {
        std::vector<Point> pts;
        for (int i = 0; i < k; ++i) pts.push_back(random_point(*m, C.center, C.radius, rng));
        const auto f = make_median(m, pts);
        SolveConfig cfg;
        cfg.schedule = StepSchedule::dl_sqrt;
        cfg.L = 1.0;
        cfg.constraint = C;
        cfg.reference = weiszfeld_median(*m, pts);
        for (int N : {10, 100, 1000}) {
          cfg.max_iters = N;
          record_bounds(run_projected_subgradient(f, m->origin(), cfg), excess, ok);
        }
      }
      SumObjective f{m, {}};
      WeightedMeanProblem p;
      for (int i = 0; i < 5; ++i) {
        const Point a = random_point(*m, C.center, C.radius, rng);
        const double c = 0.5 + 0.25 * i;
        f.components.push_back(half_sq_dist_oracle(m, a, c));
        p.anchors.push_back(a);
        p.weights.push_back(c);
      }
      SolveConfig cfg;
      cfg.schedule = StepSchedule::strongly_convex;
      cfg.mu = 0.5;
      cfg.L = 1.5 * 2.0 * C.radius;
      cfg.constraint = C;
      cfg.reference = solve_weighted_mean(*m, p, kSubTolFloor).x;
      for (int N : {10, 100, 1000}) {
        cfg.max_iters = N;
        record_bounds(run_projected_subgradient(f, m->origin(), cfg), excess, ok);
      }
    }
    out.holds("subgradient_bounds", 3, ok, excess.n,
              "median (DL/√(N+1)) and anchored squares (2L²/(μ(N+2)))");
    out.at_most("subgradient_excess", 3, excess, 0.0, "achieved - (bound + slack)");
  }
  {
    Worst excess, energy, cross;
    bool ok = true, monotone = true;
    auto take = [&](const Trace& t) {
      record_bounds(t, excess, ok);
      monotone = monotone && t.energy_monotone;
      energy.add(t.worst_energy_increase);
      if (t.crosscheck) cross.add(*t.crosscheck);
    };
    for (ManifoldPtr m : {ManifoldPtr(hyp(3)), ManifoldPtr(spd(2))}) {
      Rng rng(seed + 30);
      const Point p = random_point(*m, m->origin(), 3.0, rng);
      SolveConfig cfg;
      cfg.max_iters = 30;
      cfg.L = 1.0;
      cfg.reference = p;
      take(run_agm_c(single(m, half_sq_dist_oracle(m, p)), m->origin(), cfg));
    }
    {
      const auto m = hyp(2);
      Rng rng(seed + 31);
      const Point p = random_point(*m, m->origin(), 1.0, rng);
      std::vector<ScaledBusemann> terms;
      for (int i = 0; i < 3; ++i) {
        const Point q = random_point(*m, m->origin(), 2.0, rng);
        terms.push_back({q, random_direction(*m, q, rng, 1.0)});
      }
      const auto f = make_anchored_busemann(m, terms, p);
      SolveConfig cfg;
      cfg.max_iters = 64;
      cfg.L = 2.0;
      cfg.reference = solve_reference(f, p, 1.0);
      take(run_agm_c(f, m->origin(), cfg));
    }
    {
      const auto m = hyp(3);
      Rng rng(seed + 32);
      const Point p = random_point(*m, m->origin(), 0.5, rng);
      SolveConfig cfg;
      cfg.max_iters = 60;
      cfg.L = 1.0;
      cfg.mu = 0.1;
      cfg.reference = p;
      take(run_agm_sc(single(m, half_sq_dist_oracle(m, p)), m->origin(), cfg));
    }
    for (ManifoldPtr m : {ManifoldPtr(hyp(3)), ManifoldPtr(spd(2))}) {
      const auto s = make_synthetic(m, 4, 1.0 / 25.0, 1.0, 0.3, seed + 33);
      SolveConfig cfg;
      cfg.max_iters = 60;
      cfg.L = s.L;
      cfg.mu = s.mu;
      cfg.reference = s.reference;
      take(run_agm_sc(s.objective, m->origin(), cfg));
    }
    out.holds("agm_bounds", 4, ok, excess.n);
    out.at_most("agm_excess", 4, excess, 0.0, "achieved - (bound + slack)");
    out.holds("agm_energy_non_increasing", 4, monotone, energy.n);
    out.at_most("agm_sc_closed_form_crosscheck", 4, cross, 1e-8);
  }
}

// ---------------------------------------------------------------------------

void fast_suite(Checks& out, std::uint64_t seed) {
  using namespace fast;
  auto dir = [](int n, Rng& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = g(rng);
    return d;
  };
  {
    Worst final_dist;
    for (int n : {2, 3}) {
      for (double r : {10.0, 100.0, 1000.0}) {
        const PrecisionScope scope(precision_bits_for(r + 2.0));
        const Space h(n);
        Rng rng(seed + n);
        for (int trial = 0; trial < 4; ++trial) {
          const RVec p = h.shoot(h.origin(), dir(n, rng), 2.0);
          std::uniform_real_distribution<double> frac(0.25, 1.0);
          const RVec xs = h.shoot(p, dir(n, rng), r * frac(rng));
          LocalizeConfig cfg;
          cfg.r = r;
          const auto res = run_hyperbolic_localize(h, distance_to(xs), p, cfg);
          final_dist.add(h.dist(res.x, xs));
        }
      }
    }
    out.at_most("localization_reaches_4_ball", 5, final_dist, 4.0,
                "d(x_N, x*) after ⌈4 log(r/4)⌉ steps, r ∈ {10, 100, 1000}");
  }
  {
    Worst gap, budget_use;
    for (int n : {2, 3}) {
      for (double r : {10.0, 100.0}) {
        for (double delta : {1e-2, 1e-3}) {
          const PrecisionScope scope(precision_bits_for(r + 2.0));
          const Space h(n);
          Rng rng(seed + 40 + n);
          const RVec p = h.shoot(h.origin(), dir(n, rng), 1.0);
          const RVec xs = h.shoot(p, dir(n, rng), 0.8 * r);
          EllipsoidConfig cfg;
          cfg.r = r;
          cfg.delta = delta;
          cfg.reference = xs;
          const auto res = run_hyperbolic_ellipsoid(h, distance_to(xs), p, cfg);
          gap.add(*res.gap / delta);
          budget_use.add(res.queries / res.budget);
        }
      }
    }
    out.at_most("ellipsoid_gap_over_L_delta", 6, gap, 1.0);
    out.at_most("ellipsoid_queries_over_budget", 6, budget_use, 1.0,
                "budget 64 (log r + n² log(1/δ))");
  }
  {
    // Monotone localization in fixed mode.
    const PrecisionScope scope(precision_bits_for(12.0));
    const Space h(2);
    Rng rng(seed + 50);
    bool ok = true;
    Worst gap;
    for (int trial = 0; trial < 5; ++trial) {
      const RVec xs = h.shoot(h.origin(), dir(2, rng), 10.0);
      LocalizeConfig cfg;
      cfg.mode = LocalizeMode::fixed;
      cfg.r = 10.0;
      cfg.delta = 0.5;
      cfg.reference = xs;
      const auto res = run_hyperbolic_localize(h, distance_to(xs), h.origin(), cfg);
      ok = ok && res.monotone.value_or(false);
      gap.add(res.f);
    }
    out.holds("fixed_mode_cosh_contraction", 5, ok, 5);
    out.at_most("fixed_mode_best_gap", 5, gap, 0.5, "L δ with δ = 0.5");
  }
}

}  // namespace

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport r;
  r.suite = name;
  r.seed = seed;
  Checks out(r);
  const auto t0 = std::chrono::steady_clock::now();
  if (name == "geometry") {
    geometry_suite(out, seed);
  } else if (name == "hconvex") {
    hconvex_suite(out, seed);
  } else if (name == "moreau") {
    moreau_suite(out, seed);
  } else if (name == "rates") {
    rates_suite(out, seed);
  } else if (name == "hyperbolic-fast") {
    fast_suite(out, seed);
  } else {
    throw RangeError("unknown suite: " + name);
  }
  r.seconds = elapsed(t0);
  return r;
}

}  // namespace horo
