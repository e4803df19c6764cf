#include "horo/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "horo/frechet.hpp"
#include "horo/hyperbolic.hpp"
#include "horo/sampling.hpp"

namespace horo {

SumObjective make_meb(ManifoldPtr m, const std::vector<Point>& points) {
  if (points.empty()) throw ContractViolation("make_meb: no points");
  std::vector<HSubgradOracle> parts;
  for (const auto& p : points) parts.push_back(dist_oracle(m, p));
  HSubgradOracle f = points.size() == 1 ? parts[0] : max_oracle(std::move(parts));
  f.name = "meb";
  f.lips = 1.0;
  return single(std::move(m), std::move(f));
}

SumObjective make_frechet(ManifoldPtr m, const std::vector<Point>& points,
                          const std::vector<double>& weights) {
  if (points.empty() || points.size() != weights.size()) {
    throw ContractViolation("make_frechet: points and weights must match");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw RangeError("make_frechet: weights must be positive");
    total += w;
  }
  SumObjective f{m, {}};
  const double k = static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    f.components.push_back(half_sq_dist_oracle(m, points[i], weights[i] * k / total));
  }
  return f;
}

SumObjective make_median(ManifoldPtr m, const std::vector<Point>& points) {
  if (points.empty()) throw ContractViolation("make_median: no points");
  SumObjective f{m, {}};
  for (const auto& p : points) f.components.push_back(dist_oracle(m, p));
  return f;
}

SumObjective make_tyler(std::shared_ptr<const Spd> m,
                        const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw ContractViolation("make_tyler: no samples");
  const int d = m->n();
  SumObjective f{m, {}};
  for (const auto& x : samples) {
    if (x.size() != d) throw ContractViolation("make_tyler: sample dimension");
    if (x.norm() == 0.0) throw RangeError("make_tyler: zero sample vector");
    HSubgradOracle o;
    o.name = "tyler";
    o.eval = [m, x, d](const Point& sigma) {
      const TylerTerm t = m->tyler_component(x, sigma);
      return OracleValue{d * t.value + m->log_det(sigma),
                         d * t.grad + Tangent{sigma.coords}};
    };
    o.lips = std::sqrt(static_cast<double>(d) * (d - 1));
    o.hsmooth = 0.0;
    f.components.push_back(std::move(o));
  }
  return f;
}

double tyler_nll(const Spd& m, const std::vector<Eigen::VectorXd>& samples,
                 const Point& sigma) {
  double s = 0.0;
  for (const auto& x : samples) s += m.tyler_component(x, sigma).value;
  return m.n() * s / static_cast<double>(samples.size());
}

Point tyler_fixed_point(const Spd& m,
                        const std::vector<Eigen::VectorXd>& samples,
                        double tol, int max_iters) {
  const int d = m.n();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(d, d);
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(d, d);
    for (const auto& x : samples) {
      next += x * x.transpose() / x.dot(llt.solve(x));
    }
    next *= static_cast<double>(d) / samples.size();
    next = linalg::symmetrize(next);
    next /= std::pow(next.determinant(), 1.0 / d);
    const double change = (next - sigma).norm();
    sigma = next;
    if (change <= tol) return m.point(sigma);
  }
  throw ConvergenceError("tyler_fixed_point: iteration cap reached",
                         m.point(sigma), 0.0);
}

Eigen::MatrixXd random_orthogonal(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = g(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

SumObjective make_horn(std::shared_ptr<const Spd> m,
                       const std::vector<Eigen::VectorXd>& spectra,
                       std::uint64_t seed) {
  if (spectra.size() < 3) throw RangeError("make_horn: needs m ≥ 3 spectra");
  const int n = m->n();
  SumObjective f{m, {}};
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const Eigen::VectorXd& lam = spectra[i];
    if (lam.size() != n) throw ContractViolation("make_horn: spectrum size");
    for (int j = 1; j < n; ++j) {
      if (lam(j) > lam(j - 1)) {
        throw RangeError("make_horn: spectra must be non-increasing");
      }
    }
    const Eigen::MatrixXd u = random_orthogonal(n, seed + 7919 * i);
    const Eigen::MatrixXd v = u * lam.asDiagonal() * u.transpose();
    HSubgradOracle o = busemann_oracle(m, {m->origin(), m->tangent(v)});
    o.name = "horn";
    f.components.push_back(std::move(o));
  }
  return f;
}

SyntheticInstance make_synthetic(ManifoldPtr m, int count, double mu, double L,
                                 double radius, std::uint64_t seed) {
  if (count < 1) throw RangeError("make_synthetic: count must be ≥ 1");
  if (!(mu > 0.0) || mu > L) throw RangeError("make_synthetic: need 0 < μ ≤ L");
  Rng rng(seed);
  std::uniform_real_distribution<double> c(mu, L);
  SyntheticInstance s{SumObjective{m, {}}, m->origin(), 0.0, 0.0};
  WeightedMeanProblem p;
  for (int i = 0; i < count; ++i) {
    const Point a = random_point(*m, m->origin(), radius, rng);
    double ci = c(rng);
    if (count == 1 || i == count - 1) ci = L;
    if (count > 1 && i == 0) ci = mu;
    s.objective.components.push_back(half_sq_dist_oracle(m, a, ci));
    p.anchors.push_back(a);
    p.weights.push_back(ci);
  }
  s.mu = count == 1 ? L : mu;
  s.L = L;
  s.reference = solve_weighted_mean(*m, p, kSubTolFloor).x;
  return s;
}

SumObjective make_anchored_busemann(ManifoldPtr m,
                                    const std::vector<ScaledBusemann>& terms,
                                    const Point& anchor) {
  if (terms.empty()) throw ContractViolation("make_anchored_busemann: no terms");
  SumObjective f{m, {}};
  const auto fa = half_sq_dist_oracle(m, anchor);
  for (const auto& b : terms) {
    const auto fb = busemann_oracle(m, b);
    HSubgradOracle o;
    o.name = "anchored_busemann";
    o.eval = [fb, fa](const Point& x) {
      const auto u = fb(x), v = fa(x);
      return OracleValue{u.value + v.value, u.grad + v.grad};
    };
    o.mu = 1.0;
    o.hsmooth = 1.0;
    f.components.push_back(std::move(o));
  }
  return f;
}

Point weiszfeld_median(const Manifold& m, const std::vector<Point>& points,
                       double tol, int max_iters) {
  if (points.empty()) throw ContractViolation("weiszfeld_median: no points");
  // Start at the best data point; stop there if it is optimal (the sum of
  // unit pulls from the others lies in its unit subdifferential ball).
  auto value = [&](const Point& x) {
    double s = 0.0;
    for (const auto& p : points) s += m.dist(x, p);
    return s;
  };
  std::size_t best = 0;
  double fbest = value(points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double fi = value(points[i]);
    if (fi < fbest) best = i, fbest = fi;
  }
  {
    const Point& x = points[best];
    Tangent pull = m.zero_tangent();
    int at = 0;
    for (const auto& p : points) {
      const double d = m.dist(x, p);
      if (d <= 1e-14) {
        ++at;
        continue;
      }
      pull += m.log(x, p) / d;
    }
    if (m.norm(x, pull) <= at) return x;
  }
  Point x = points[best];
  // Nudge off the data point along the pull so every distance is positive.
  {
    Tangent pull = m.zero_tangent();
    for (const auto& p : points) {
      const double d = m.dist(x, p);
      if (d > 1e-14) pull += m.log(x, p) / d;
    }
    const double n = m.norm(x, pull);
    if (n > 0.0) x = m.exp(x, (1e-3 / n) * pull);
  }
  for (int it = 0; it < max_iters; ++it) {
    Tangent num = m.zero_tangent();
    double den = 0.0;
    for (const auto& p : points) {
      const double d = std::max(m.dist(x, p), 1e-300);
      num += m.log(x, p) / d;
      den += 1.0 / d;
    }
    const Tangent step = num / den;
    x = m.exp(x, step);
    if (m.norm(x, step) <= tol) return x;
  }
  throw ConvergenceError("weiszfeld_median: iteration cap reached", x, 0.0);
}

ManifoldPtr make_manifold(const Backend& b) {
  if (b.n < 1) throw RangeError("backend dimension must be ≥ 1");
  if (b.kind == Backend::Kind::hyperbolic) return std::make_shared<Hyperbolic>(b.n);
  return std::make_shared<Spd>(b.n);
}

Instance build_instance(const InstanceSpec& spec) {
  ManifoldPtr m = make_manifold(spec.backend);
  auto points = [&] {
    std::vector<Point> out;
    for (const auto& c : spec.points) {
      Point p{m->backend(), c};
      if (c.size() != m->ambient_size() || !m->is_valid(p, 1e-8)) {
        throw ContractViolation("instance: point is not on the " +
                                to_string(m->backend()) + " chart");
      }
      out.push_back(m->normalize(p));
    }
    return out;
  };
  auto spd = [&] {
    auto s = std::dynamic_pointer_cast<const Spd>(m);
    if (!s) throw ContractViolation("instance: " + spec.kind + " needs an spd backend");
    return s;
  };

  Instance in{m, SumObjective{m, {}}, m->origin(), std::nullopt, 0.0,
              std::nullopt, std::nullopt};
  if (spec.kind == "meb") {
    in.objective = make_meb(m, points());
    in.lipschitz = 1.0;
  } else if (spec.kind == "frechet") {
    const auto pts = points();
    std::vector<double> w = spec.weights;
    if (w.empty()) w.assign(pts.size(), 1.0);
    in.objective = make_frechet(m, pts, w);
    double total = 0.0, lo = w[0], hi = w[0];
    for (double x : w) total += x, lo = std::min(lo, x), hi = std::max(hi, x);
    const double k = static_cast<double>(pts.size());
    in.mu = lo * k / total;
    in.L = hi * k / total;
    in.reference = solve_weighted_mean(*m, {pts, w}, kSubTolFloor).x;
  } else if (spec.kind == "median") {
    const auto pts = points();
    in.objective = make_median(m, pts);
    in.lipschitz = 1.0;
    in.reference = weiszfeld_median(*m, pts);
  } else if (spec.kind == "tyler") {
    auto s = spd();
    in.objective = make_tyler(s, spec.vectors);
    in.lipschitz = *in.objective.lips();
    in.L = 0.0;
    in.reference = tyler_fixed_point(*s, spec.vectors);
  } else if (spec.kind == "horn") {
    in.objective = make_horn(spd(), spec.vectors, spec.seed);
    in.lipschitz = in.objective.lips();
    in.L = 0.0;
  } else if (spec.kind == "synthetic") {
    auto s = make_synthetic(m, spec.count, spec.mu, spec.L, spec.radius, spec.seed);
    in.objective = std::move(s.objective);
    in.reference = s.reference;
    in.mu = s.mu;
    in.L = s.L;
  } else {
    throw ContractViolation("unknown instance kind: " + spec.kind);
  }
  return in;
}

}  // namespace horo
