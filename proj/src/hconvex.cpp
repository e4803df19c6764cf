#include "horo/hconvex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "horo/sampling.hpp"

namespace horo {

namespace {

// Beyond this distance hyperboloid / matrix coordinates overflow.
constexpr double kFarLimit = 300.0;

struct Unit {
  Tangent u;
  double scale = 0.0;
};

Unit split(const Manifold& m, const Point& p, const Tangent& v) {
  const double s = m.norm(p, v);
  if (s == 0.0) return {v, 0.0};
  return {v / s, s};
}

}  // namespace

// ---------------------------------------------------------------------------
// Busemann and Q

double busemann_value(const Manifold& m, const ScaledBusemann& b,
                      const Point& x) {
  const Unit d = split(m, b.p, b.v);
  if (d.scale == 0.0) return 0.0;
  return d.scale * m.busemann(b.p, d.u, x);
}

Tangent busemann_grad(const Manifold& m, const ScaledBusemann& b,
                      const Point& x) {
  const Unit d = split(m, b.p, b.v);
  if (d.scale == 0.0) return m.zero_tangent();
  return d.scale * m.busemann_gradient(b.p, d.u, x);
}

QFunction make_q(const Manifold& m, const Point& y, const Tangent& v,
                 double mu) {
  if (!(mu > 0.0)) throw RangeError("make_q: μ must be positive");
  QFunction q{y, v, mu, std::nullopt};
  if (m.norm(y, v) / mu <= kFarLimit) q.ypp = m.exp(y, (-1.0 / mu) * v);
  return q;
}

double q_value(const Manifold& m, const QFunction& q, const Point& x) {
  const Unit d = split(m, q.y, q.v);
  if (d.scale == 0.0) {
    const double r = m.dist(q.y, x);
    return 0.5 * q.mu * r * r;
  }
  const double e = m.ray_excess(q.y, d.u, d.scale / q.mu, x);
  return d.scale * e + 0.5 * q.mu * e * e;
}

Tangent q_grad(const Manifold& m, const QFunction& q, const Point& x) {
  if (!q.ypp) throw RangeError("q_grad: y⁺⁺ is out of range");
  return -q.mu * m.log(x, *q.ypp);
}

// ---------------------------------------------------------------------------
// Inequality probes

LimitReport q_limit_check(const Manifold& m, const Point& y, const Tangent& v,
                          const Point& x, const std::vector<double>& mus) {
  LimitReport r;
  r.mus = mus;
  const double b = busemann_value(m, {y, v}, x);
  const double slack = 1e-12 * (1.0 + std::abs(b));
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (i > 0 && !(mus[i] < mus[i - 1])) {
      throw RangeError("q_limit_check: μ sequence must decrease");
    }
    r.gaps.push_back(std::abs(q_value(m, make_q(m, y, v, mus[i]), x) - b));
    if (i > 0 && r.gaps[i] > r.gaps[i - 1] + slack) r.monotone = false;
  }
  r.pass = r.monotone;
  if (!mus.empty() && mus.back() <= 1e-4) {
    r.pass = r.pass && r.gaps.back() <= 1e-3 * (1.0 + std::abs(b));
  }
  return r;
}

double CosineResiduals::min() const { return std::min({uno, duo, p_form}); }

CosineResiduals law_of_cosines_check(const Manifold& m, const Point& y,
                                     const Tangent& v, const Point& x,
                                     double mu, double L) {
  if (!(mu > 0.0 && mu <= L)) {
    throw RangeError("law_of_cosines_check: need 0 < μ ≤ L");
  }
  const double b = busemann_value(m, {y, v}, x);
  const double d = m.dist(x, y);
  const double ql = q_value(m, make_q(m, y, v, L), x);
  const double qm = q_value(m, make_q(m, y, v, mu), x);
  CosineResiduals r;
  r.uno = b + 0.5 * L * d * d - ql;
  r.duo = qm + 0.5 * (L - mu) * d * d - ql;
  // With p = exp_y(-v), d(p,x) = ‖v‖ + e and d(p,y) = ‖v‖, so
  // rhs - lhs = d² + 2B - 2‖v‖e - e².
  const Unit dir = split(m, y, v);
  double e = d;
  if (dir.scale > 0.0) e = m.ray_excess(y, dir.u, dir.scale, x);
  r.p_form = d * d + 2.0 * b - 2.0 * dir.scale * e - e * e;
  return r;
}

double quadruple_inequality_check(const Manifold& m, const Point& x,
                                  const Point& xp, const Point& y,
                                  const Point& yp) {
  const ScaledBusemann b{xp, m.log(xp, x)};
  const double dyy = m.dist(y, yp);
  const double dxx = m.dist(x, xp);
  return busemann_value(m, b, yp) + 0.5 * dyy * dyy + 0.5 * dxx * dxx -
         busemann_value(m, b, y);
}

// ---------------------------------------------------------------------------
// Oracles

HSubgradOracle dist_oracle(ManifoldPtr m, const Point& p) {
  HSubgradOracle f;
  f.name = "dist";
  f.eval = [m, p](const Point& x) {
    const Tangent l = m->log(x, p);
    const double n = m->norm(x, l);
    // The zero tangent is an h-subgradient at p: d(·,p) ≥ 0 = B_{p,0}. Bit
    // identical points can still give a roundoff-sized log.
    if (n <= 1e-14 || x.coords == p.coords) {
      return OracleValue{n, m->zero_tangent()};
    }
    return OracleValue{m->dist(x, p), (-1.0 / n) * l};
  };
  f.lips = 1.0;
  f.differentiable = false;
  f.kinks = {{p, 1.0}};
  return f;
}

HSubgradOracle half_sq_dist_oracle(ManifoldPtr m, const Point& p, double c) {
  if (!(c > 0.0)) throw RangeError("half_sq_dist_oracle: c must be positive");
  HSubgradOracle f;
  f.name = "half_sq_dist";
  f.eval = [m, p, c](const Point& x) {
    const double d = m->dist(x, p);
    return OracleValue{0.5 * c * d * d, -c * m->log(x, p)};
  };
  f.mu = c;
  f.hsmooth = c;
  return f;
}

HSubgradOracle busemann_oracle(ManifoldPtr m, const ScaledBusemann& b) {
  HSubgradOracle f;
  f.name = "busemann";
  f.eval = [m, b](const Point& x) {
    return OracleValue{busemann_value(*m, b, x), busemann_grad(*m, b, x)};
  };
  f.lips = m->norm(b.p, b.v);
  f.hsmooth = 0.0;
  return f;
}

HSubgradOracle max_oracle(std::vector<HSubgradOracle> parts) {
  if (parts.empty()) throw RangeError("max_oracle: no components");
  if (parts.size() == 1) return parts.front();
  HSubgradOracle f;
  f.name = "max";
  f.mu = parts.front().mu;
  f.lips = parts.front().lips;
  for (const auto& p : parts) {
    f.mu = std::min(f.mu, p.mu);
    if (f.lips && p.lips) {
      f.lips = std::max(*f.lips, *p.lips);
    } else {
      f.lips.reset();
    }
  }
  f.differentiable = false;
  f.eval = [parts = std::move(parts)](const Point& x) {
    std::vector<OracleValue> vals;
    vals.reserve(parts.size());
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& p : parts) {
      vals.push_back(p(x));
      top = std::max(top, vals.back().value);
    }
    for (auto& v : vals) {
      if (v.value >= top - 1e-12) return OracleValue{top, std::move(v.grad)};
    }
    return vals.front();
  };
  return f;
}

HSubgradOracle scale_oracle(HSubgradOracle f, double r) {
  if (!(r >= 0.0)) throw RangeError("scale_oracle: r must be non-negative");
  HSubgradOracle g = f;
  g.name = "scaled_" + f.name;
  g.eval = [inner = std::move(f.eval), r](const Point& x) {
    OracleValue v = inner(x);
    return OracleValue{r * v.value, r * v.grad};
  };
  g.mu *= r;
  if (g.lips) *g.lips *= r;
  if (g.hsmooth) *g.hsmooth *= r;
  for (auto& k : g.kinks) k.radius *= r;
  return g;
}

HSubgradOracle compose_increasing_convex(HSubgradOracle f,
                                         std::function<double(double)> g,
                                         std::function<double(double)> dg,
                                         std::string name) {
  HSubgradOracle h;
  h.name = std::move(name);
  h.differentiable = f.differentiable;
  for (const auto& k : f.kinks) {
    h.kinks.push_back({k.at, k.radius * dg(f(k.at).value)});
  }
  h.eval = [inner = std::move(f.eval), g = std::move(g),
            dg = std::move(dg)](const Point& x) {
    OracleValue v = inner(x);
    return OracleValue{g(v.value), dg(v.value) * v.grad};
  };
  return h;
}

// ---------------------------------------------------------------------------
// Sums

std::vector<OracleValue> SumObjective::eval_all(const Point& x) const {
  std::vector<OracleValue> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c(x));
  return out;
}

double SumObjective::value(const Point& x) const {
  double s = 0.0;
  for (const auto& c : components) s += c(x).value;
  return s / static_cast<double>(components.size());
}

Tangent SumObjective::grad(const Point& x) const {
  Tangent g = manifold->zero_tangent();
  for (const auto& c : components) g += c(x).grad;
  return g / static_cast<double>(components.size());
}

double SumObjective::mu() const {
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& c : components) mu = std::min(mu, c.mu);
  return components.empty() ? 0.0 : mu;
}

std::optional<double> SumObjective::lips() const {
  double l = 0.0;
  for (const auto& c : components) {
    if (!c.lips) return std::nullopt;
    l = std::max(l, *c.lips);
  }
  return l;
}

std::optional<double> SumObjective::hsmooth() const {
  double l = 0.0;
  for (const auto& c : components) {
    if (!c.hsmooth) return std::nullopt;
    l = std::max(l, *c.hsmooth);
  }
  return l;
}

std::vector<Kink> SumObjective::kinks() const {
  std::vector<Kink> out;
  const double m = static_cast<double>(components.size());
  for (const auto& c : components) {
    for (const auto& k : c.kinks) {
      auto same = std::find_if(out.begin(), out.end(), [&](const Kink& o) {
        return (o.at.coords - k.at.coords).norm() == 0.0;
      });
      if (same != out.end()) {
        same->radius += k.radius / m;
      } else {
        out.push_back({k.at, k.radius / m});
      }
    }
  }
  return out;
}

SumObjective single(ManifoldPtr m, HSubgradOracle f) {
  return SumObjective{std::move(m), {std::move(f)}};
}

HSubgradOracle as_oracle(const SumObjective& f, std::string name) {
  HSubgradOracle o;
  o.name = std::move(name);
  o.eval = [f](const Point& x) {
    const auto vals = f.eval_all(x);
    OracleValue out{0.0, f.manifold->zero_tangent()};
    for (const auto& v : vals) {
      out.value += v.value;
      out.grad += v.grad;
    }
    const double m = static_cast<double>(vals.size());
    return OracleValue{out.value / m, out.grad / m};
  };
  o.lips = f.lips();
  o.differentiable = std::all_of(f.components.begin(), f.components.end(),
                                 [](const auto& c) { return c.differentiable; });
  o.kinks = f.kinks();
  return o;
}

// ---------------------------------------------------------------------------
// Certification

SamplePairs sample_pairs(const Manifold& m, const Point& center, double radius,
                         int count, std::uint64_t seed) {
  Rng rng(seed);
  SamplePairs out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Point y = random_point(m, center, radius, rng);
    Point x = random_point(m, center, radius, rng);
    out.emplace_back(std::move(y), std::move(x));
  }
  return out;
}

namespace {

void record(CertReport& r, double residual, double scale, double tol, int i) {
  if (residual < -tol * (1.0 + std::abs(scale))) r.pass = false;
  if (r.worst_sample < 0 || residual < r.worst_residual) {
    r.worst_residual = residual;
    r.worst_sample = i;
  }
}

}  // namespace

CertReport certify_hconvex(const Manifold& m, const HSubgradOracle& f,
                           const SamplePairs& samples, double mu, double tol) {
  CertReport r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [y, x] = samples[i];
    const OracleValue fy = f(y);
    const double fx = f(x).value;
    const double s = mu == 0.0 ? busemann_value(m, {y, fy.grad}, x)
                               : q_value(m, make_q(m, y, fy.grad, mu), x);
    record(r, fx - fy.value - s, fx, tol, static_cast<int>(i));
  }
  return r;
}

CertReport certify_hsmooth(const Manifold& m, const HSubgradOracle& f,
                           const SamplePairs& samples, double L, double tol) {
  if (!(L > 0.0)) throw RangeError("certify_hsmooth: L must be positive");
  CertReport r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [y, x] = samples[i];
    const OracleValue fy = f(y);
    const double fx = f(x).value;
    const double q = q_value(m, make_q(m, y, fy.grad, L), x);
    record(r, q - (fx - fy.value), fx, tol, static_cast<int>(i));

    const double g2 = m.inner(y, fy.grad, fy.grad);
    const double fplus = f(m.exp(y, (-1.0 / L) * fy.grad)).value;
    const double slack = fy.value - g2 / (2.0 * L) - fplus;
    if (slack < -tol * (1.0 + std::abs(fy.value))) r.descent_pass = false;
    if (i == 0 || slack < r.worst_descent) r.worst_descent = slack;
  }
  r.pass = r.pass && r.descent_pass;
  return r;
}

// ---------------------------------------------------------------------------
// Moreau envelope

namespace {

struct ProxModel {
  const SumObjective& f;
  const Point& x;
  double lambda;
  std::vector<Kink> kinks;

  double value(const Point& z) const {
    const double d = f.manifold->dist(x, z);
    return f.value(z) + d * d / (2.0 * lambda);
  }

  // Minimum-norm element of the subdifferential we know about at z.
  Tangent subgrad(const Point& z) const {
    const Manifold& m = *f.manifold;
    Tangent g = f.grad(z) - (1.0 / lambda) * m.log(z, x);
    for (const auto& k : kinks) {
      if ((k.at.coords - z.coords).norm() != 0.0) continue;
      const double n = m.norm(z, g);
      g = n <= k.radius ? m.zero_tangent() : (1.0 - k.radius / n) * g;
    }
    return g;
  }
};

}  // namespace

ProxResult moreau_prox(const SumObjective& f, const Point& x, double lambda,
                       double tol, int max_iters) {
  if (!(lambda > 0.0) || !(tol > 0.0)) {
    throw RangeError("moreau_prox: λ and tol must be positive");
  }
  const Manifold& m = *f.manifold;
  const ProxModel model{f, x, lambda, f.kinks()};
  auto gap_of = [&](const Point& z) {
    const Tangent g = model.subgrad(z);
    return 0.5 * lambda * m.inner(z, g, g);
  };

  // Start from the best of x and the kinks; a kink that is already optimal
  // is returned as is (descent cannot land on it exactly).
  Point z = x;
  double fz = model.value(z);
  for (const auto& k : model.kinks) {
    const double gap = gap_of(k.at);
    if (gap <= tol) return {k.at, gap, 0};
    const double fk = model.value(k.at);
    if (fk < fz) {
      z = k.at;
      fz = fk;
    }
  }

  double step = lambda;
  for (int it = 0; it < max_iters; ++it) {
    const Tangent g = model.subgrad(z);
    const double g2 = m.inner(z, g, g);
    const double gap = 0.5 * lambda * g2;
    if (gap <= tol) return {z, gap, it};
    // Armijo backtracking; the roundoff allowance keeps the gradient-driven
    // progress going once value differences fall below machine precision.
    const double allowance = 4.0 * std::numeric_limits<double>::epsilon() *
                             (1.0 + std::abs(fz));
    step = std::min(lambda, 2.0 * step);
    for (;;) {
      const Point trial = m.exp(z, -step * g);
      const double ft = model.value(trial);
      if (ft <= fz - 0.5 * step * g2 + allowance) {
        z = trial;
        fz = ft;
        break;
      }
      step *= 0.5;
      if (step < 1e-30 * lambda) {
        throw ConvergenceError("moreau_prox: line search failed", z, gap);
      }
    }
  }
  throw ConvergenceError("moreau_prox: iteration cap reached", z, gap_of(z));
}

double moreau_value(const SumObjective& f, const Point& x, double lambda,
                    double tol) {
  const Point z = moreau_prox(f, x, lambda, tol).z;
  const double d = f.manifold->dist(x, z);
  return f.value(z) + d * d / (2.0 * lambda);
}

Tangent moreau_grad(const SumObjective& f, const Point& x, double lambda,
                    double tol) {
  const Point z = moreau_prox(f, x, lambda, tol).z;
  return (-1.0 / lambda) * f.manifold->log(x, z);
}

HSubgradOracle moreau_oracle(SumObjective f, double lambda, double tol) {
  HSubgradOracle o;
  o.name = "moreau";
  o.lips = f.lips();
  o.hsmooth = 1.0 / lambda;
  o.eval = [f = std::move(f), lambda, tol](const Point& x) {
    const Point z = moreau_prox(f, x, lambda, tol).z;
    const double d = f.manifold->dist(x, z);
    return OracleValue{f.value(z) + d * d / (2.0 * lambda),
                       (-1.0 / lambda) * f.manifold->log(x, z)};
  };
  return o;
}

}  // namespace horo
