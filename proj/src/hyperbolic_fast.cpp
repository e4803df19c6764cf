#include "horo/hyperbolic_fast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace horo::fast {

namespace hk = hyperbolic;

namespace {

using RMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// log cosh t without overflow.
double log_cosh(double t) {
  t = std::abs(t);
  return t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
}

// The Lorentz inverse J Bᵀ J of a boost.
RVec lorentz_inverse_apply(const RMat& b, const RVec& v) {
  RVec jv = v;
  jv(0) = -jv(0);
  RVec out = b.transpose() * jv;
  out(0) = -out(0);
  return out;
}

}  // namespace

unsigned precision_bits_for(double radius) {
  const double r = std::max(radius, 1.0);
  return 128u + static_cast<unsigned>(std::ceil(7.0 * r / std::log(2.0)));
}

PrecisionScope::PrecisionScope(unsigned bits)
    : saved_digits10_(Real::default_precision()) {
  const auto digits = static_cast<unsigned>(std::ceil(bits * std::log10(2.0)));
  Real::default_precision(std::max(digits, saved_digits10_));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

Space::Space(int n) : n_(n) {
  if (n < 1) throw RangeError("fast::Space: dimension must be ≥ 1");
}

RVec Space::origin() const {
  RVec x = RVec::Zero(n_ + 1);
  x(0) = Real(1);
  return x;
}

RVec Space::lift(const Point& p) const {
  if (p.backend != Backend{Backend::Kind::hyperbolic, n_} || p.coords.size() != n_ + 1) {
    throw ContractViolation("fast::Space: point is not on this hyperboloid");
  }
  RVec x(n_ + 1);
  for (int i = 0; i <= n_; ++i) x(i) = Real(p.coords(i));
  return hk::renormalize<Real>(std::move(x));
}

Point Space::lower(const RVec& x) const {
  Eigen::VectorXd c(n_ + 1);
  for (int i = 0; i <= n_; ++i) {
    c(i) = static_cast<double>(x(i));
    if (!std::isfinite(c(i))) {
      throw ChartError("fast::Space: point too far from the origin for double");
    }
  }
  return Point{Backend{Backend::Kind::hyperbolic, n_}, c};
}

double Space::dist(const RVec& x, const RVec& y) const {
  return static_cast<double>(hk::dist<Real>(x, y));
}

RVec Space::exp(const RVec& x, const RVec& v) const {
  return hk::exp<Real>(x, hk::project_tangent<Real>(x, v));
}

RVec Space::log(const RVec& x, const RVec& y) const {
  return hk::log<Real>(x, y);
}

double Space::norm(const RVec& v) const {
  return static_cast<double>(hk::tangent_norm<Real>(v));
}

RVec Space::shoot(const RVec& x, const Eigen::VectorXd& dir, double t) const {
  if (dir.size() != n_) throw ContractViolation("fast::Space::shoot: direction size");
  const double dn = dir.norm();
  if (dn == 0.0) throw RangeError("fast::Space::shoot: zero direction");
  RVec u = RVec::Zero(n_ + 1);
  for (int i = 0; i < n_; ++i) u(i + 1) = Real(t * dir(i) / dn);
  return exp(x, hk::boost_to<Real>(x) * u);
}

FastObjective distance_to(RVec target) {
  FastObjective f;
  f.name = "distance";
  f.eval = [t = std::move(target)](const Space& h, const RVec& x) {
    const Real d = hk::dist<Real>(x, t);
    if (d == Real(0)) return FastValue{0.0, RVec::Zero(x.size())};
    return FastValue{static_cast<double>(d), RVec(-h.log(x, t) / d)};
  };
  return f;
}

FastObjective max_distance(std::vector<RVec> points) {
  if (points.empty()) throw ContractViolation("max_distance: no points");
  FastObjective f;
  f.name = "max_distance";
  f.eval = [ps = std::move(points)](const Space& h, const RVec& x) {
    std::vector<double> d(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) d[i] = h.dist(x, ps[i]);
    const double hi = *std::max_element(d.begin(), d.end());
    std::size_t i = 0;
    while (d[i] < hi - 1e-12) ++i;
    if (d[i] == 0.0) return FastValue{hi, RVec::Zero(x.size())};
    return FastValue{hi, RVec(-h.log(x, ps[i]) / Real(d[i]))};
  };
  return f;
}

FastObjective mean_distance(std::vector<RVec> points) {
  if (points.empty()) throw ContractViolation("mean_distance: no points");
  FastObjective f;
  f.name = "mean_distance";
  f.eval = [ps = std::move(points)](const Space& h, const RVec& x) {
    FastValue out{0.0, RVec::Zero(x.size())};
    for (const auto& p : ps) {
      const Real d = hk::dist<Real>(x, p);
      out.value += static_cast<double>(d);
      if (d > Real(0)) out.grad -= h.log(x, p) / d;
    }
    const double m = static_cast<double>(ps.size());
    out.value /= m;
    out.grad /= Real(m);
    return out;
  };
  return f;
}

int localize_iterations(LocalizeMode mode, double r, double delta) {
  if (!(r > 0.0)) throw RangeError("localize: r must be positive");
  if (mode == LocalizeMode::fixed) {
    if (!(delta > 0.0)) throw RangeError("localize: δ must be positive");
    return std::max(1, static_cast<int>(std::ceil(log_cosh(r) / log_cosh(delta))));
  }
  if (r < 4.0) throw RangeError("localize: shrinking mode needs r ≥ 4");
  return std::max(0, static_cast<int>(std::ceil(4.0 * std::log(r / 4.0))));
}

LocalizeResult run_hyperbolic_localize(const Space& h, const FastObjective& f,
                                       const RVec& p, const LocalizeConfig& cfg) {
  const int N = localize_iterations(cfg.mode, cfg.r, cfg.delta);
  const PrecisionScope scope(precision_bits_for(cfg.r + h.dist(h.origin(), p)));
  std::optional<double> f_star = cfg.f_star;
  if (!f_star && cfg.reference) f_star = f.eval(h, *cfg.reference).value;
  const bool fixed = cfg.mode == LocalizeMode::fixed;

  LocalizeResult res;
  res.x = p;
  res.f = std::numeric_limits<double>::infinity();
  if (fixed && cfg.reference && f_star) res.monotone = true;
  const double threshold = f.lipschitz * cfg.delta;
  RVec x = p;
  std::optional<double> prev_lc;  // log cosh d(x_k, x*) when the gap exceeded Lδ
  for (int k = 0;; ++k) {
    const FastValue v = f.eval(h, x);
    ++res.queries;
    LocalizeRecord rec{k, v.value, h.norm(v.grad), 0.0, std::nullopt};
    if (cfg.reference) rec.dist_ref = h.dist(x, *cfg.reference);

    if (res.monotone && prev_lc) {
      const double lc = log_cosh(*rec.dist_ref);
      const double excess = lc - (*prev_lc - log_cosh(cfg.delta));
      res.worst_monotone_excess = std::max(res.worst_monotone_excess, excess);
      if (excess > 1e-9 * (1.0 + lc)) *res.monotone = false;
    }
    prev_lc.reset();
    if (res.monotone && v.value - *f_star > threshold) {
      prev_lc = log_cosh(*rec.dist_ref);
    }

    if (!fixed || v.value < res.f) {
      res.x = x;
      res.f = v.value;
    }
    res.iters = k;
    if (rec.gnorm == 0.0) {
      res.optimal = true;
      res.x = x;
      res.f = v.value;
      res.records.push_back(rec);
      break;
    }
    if (k == N) {
      res.records.push_back(rec);
      break;
    }
    rec.step = fixed ? cfg.delta : 0.5 * cfg.r * std::exp(-k / 4.0);
    res.records.push_back(rec);
    x = h.exp(x, v.grad * Real(-rec.step / rec.gnorm));
  }
  return res;
}

RVec Chart::map(const Eigen::VectorXd& u) const {
  RVec z(u.size());
  for (int i = 0; i < u.size(); ++i) z(i) = Real(u(i));
  return hk::renormalize<Real>(RVec(boost * hk::from_poincare<Real>(z)));
}

Eigen::VectorXd Chart::pullback(const Eigen::VectorXd& u,
                                const RVec& grad) const {
  // ⟨grad, B dP(e_i)⟩ = ⟨B⁻¹ grad, dP(e_i)⟩; B⁻¹ grad lives at P(u), where
  // coordinates are moderate and double suffices.
  const RVec h = lorentz_inverse_apply(boost, grad);
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd hd(n + 1);
  for (int i = 0; i <= n; ++i) hd(i) = static_cast<double>(h(i));
  const double den = 1.0 - u.squaredNorm();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd d(n + 1);
    d(0) = 4.0 * u(i) / (den * den);
    d.tail(n) = (4.0 * u(i) / (den * den)) * u;
    d(i + 1) += 2.0 / den;
    out(i) = hd.tail(n).dot(d.tail(n)) - hd(0) * d(0);
  }
  return out;
}

Chart chart_at(const RVec& c) { return Chart{hk::boost_to<Real>(c)}; }

EllipsoidResult run_hyperbolic_ellipsoid(const Space& h, const FastObjective& f,
                                         const RVec& p,
                                         const EllipsoidConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw RangeError("ellipsoid: δ must lie in (0, 1)");
  }
  if (!(cfg.r > 0.0)) throw RangeError("ellipsoid: r must be positive");
  const PrecisionScope scope(precision_bits_for(cfg.r + h.dist(h.origin(), p)));
  const int n = h.n();

  EllipsoidResult res;
  res.budget = cfg.budget_constant *
               (std::max(std::log(cfg.r), 0.0) + n * n * std::log(1.0 / cfg.delta));

  // Phase 1: the minimizers lie in B(c, 4).
  RVec c = p;
  if (cfg.r > 4.0) {
    LocalizeConfig lc;
    lc.mode = LocalizeMode::shrinking;
    lc.r = cfg.r;
    const auto loc = run_hyperbolic_localize(h, f, p, lc);
    res.phase1_queries = loc.queries;
    if (loc.optimal) {
      res.x = loc.x;
      res.f = loc.f;
      res.queries = loc.queries;
      res.within_budget = res.queries <= res.budget;
      if (cfg.reference) res.gap = res.f - f.eval(h, *cfg.reference).value;
      return res;
    }
    c = loc.x;
  }

  // Phase 2 in the chart centred at c. E_0 is the image of B(c, 5), which
  // holds B(x*, δ); that ball contains a Euclidean ball of radius ρ because
  // the conformal factor 2/(1-|u|²) is at most 2 cosh²(5/2) there.
  const Chart chart = chart_at(c);
  const double R0 = std::tanh(2.5);
  const double rho = cfg.delta / (2.0 * std::cosh(2.5) * std::cosh(2.5));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd P = R0 * R0 * Eigen::MatrixXd::Identity(n, n);
  double log_vol = n * std::log(R0);  // log √det P
  const double log_target = n * std::log(rho);
  const double dn = n;
  const double shrink = n == 1 ? std::log(0.5)
                               : std::log(dn / (dn + 1.0)) +
                                     0.5 * (dn - 1.0) * std::log(dn * dn / (dn * dn - 1.0));

  res.f = std::numeric_limits<double>::infinity();
  int guard = 0;
  while (log_vol >= log_target) {
    if (++guard > 1000000) {
      throw NumericError("ellipsoid: iteration guard exceeded");
    }
    Eigen::VectorXd g;
    if (u.norm() >= R0) {
      g = u;  // feasibility cut, no oracle query
    } else {
      const RVec y = chart.map(u);
      const FastValue v = f.eval(h, y);
      ++res.phase2_queries;
      if (v.value < res.f) {
        res.f = v.value;
        res.x = y;
      }
      if (h.norm(v.grad) == 0.0) break;
      g = chart.pullback(u, v.grad);
    }
    const double gpg = g.dot(P * g);
    if (!(gpg > 0.0) || !std::isfinite(gpg)) {
      throw NumericError("ellipsoid: degenerate cut (volume underflow)");
    }
    const Eigen::VectorXd pg = P * g / std::sqrt(gpg);
    if (n == 1) {
      u -= 0.5 * pg;
      P /= 4.0;
    } else {
      u -= pg / (dn + 1.0);
      P = (dn * dn / (dn * dn - 1.0)) * (P - (2.0 / (dn + 1.0)) * pg * pg.transpose());
      P = 0.5 * (P + P.transpose());
    }
    log_vol += shrink;
  }
  res.queries = res.phase1_queries + res.phase2_queries;
  res.within_budget = res.queries <= res.budget;
  if (cfg.reference) res.gap = res.f - f.eval(h, *cfg.reference).value;
  return res;
}

std::optional<double> log_gap_slope(const LocalizeResult& r, double f_star) {
  std::vector<double> ks, ys;
  for (const auto& rec : r.records) {
    const double gap = rec.f - f_star;
    if (gap > 0.0) {
      ks.push_back(rec.k);
      ys.push_back(std::log(gap));
    }
  }
  if (ks.size() < 2) return std::nullopt;
  const double m = ks.size();
  double sk = 0, sy = 0, skk = 0, sky = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sk += ks[i], sy += ys[i], skk += ks[i] * ks[i], sky += ks[i] * ys[i];
  }
  return (m * sky - sk * sy) / (m * skk - sk * sk);
}

}  // namespace horo::fast
