// horoconvex: solve, verify, demo-local and bench subcommands.
// Exit codes: 0 success, 1 bad config / usage, 2 assumption violation or a
// failed verification, 3 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <queue>

#include "CLI11.hpp"
#include "json.hpp"

#include "horo/hyperbolic.hpp"
#include "horo/hyperbolic_fast.hpp"
#include "horo/problems.hpp"
#include "horo/serialize.hpp"
#include "horo/solvers.hpp"
#include "horo/suites.hpp"

using namespace horo;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<double> sub_tol;
  int parallel = 1;
  // verify
  std::string suite = "all";
  // demo-local
  double step = 0.005;
  double ray_max = 40.0;
};

/// SEED_OVERRIDE takes precedence over --seed.
std::optional<std::uint64_t> effective_seed(const Options& o) {
  if (const char* env = std::getenv("SEED_OVERRIDE"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("SEED_OVERRIDE is not an unsigned integer: ") + env);
    }
  }
  return o.seed;
}

/// Stream to --out, or stdout when absent.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write output file: " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

/// Runs tasks on up to `k` threads; results keep submission order.
template <typename T>
std::vector<T> run_parallel(std::vector<std::function<T()>> tasks, int k) {
  std::vector<T> out;
  out.reserve(tasks.size());
  if (k <= 1) {
    for (auto& t : tasks) out.push_back(t());
    return out;
  }
  std::deque<std::future<T>> running;
  std::size_t next = 0;
  while (next < tasks.size() || !running.empty()) {
    while (next < tasks.size() && static_cast<int>(running.size()) < k) {
      running.push_back(std::async(std::launch::async, tasks[next++]));
    }
    out.push_back(running.front().get());
    running.pop_front();
  }
  return out;
}

json failure_summary(const std::string& solver, const std::string& status,
                     const std::string& message) {
  return {{"summary", true}, {"solver", solver}, {"status", status},
          {"message", message}, {"bound", nullptr}, {"achieved", nullptr},
          {"pass", false}};
}

// ---------------------------------------------------------------------------
// solve

Point start_point(const RunConfig& c, const Instance& in) {
  if (!c.start) return in.start;
  const Point p{in.manifold->backend(), *c.start};
  if (c.start->size() != in.manifold->ambient_size() || !in.manifold->is_valid(p, 1e-8)) {
    throw ConfigError("start: point is not on the " + to_string(in.manifold->backend()) +
                      " chart");
  }
  return in.manifold->normalize(p);
}

/// Fills solver constants the config left out from the instance.
SolveConfig complete_config(const RunConfig& c, const Instance& in, const Point& x0) {
  SolveConfig cfg = c.solve;
  cfg.reference = in.reference;
  if (!c.mu_given) cfg.mu = in.mu;
  if (!c.L_given) {
    if (c.solver == "subgradient") {
      if (!in.lipschitz) {
        throw ConfigError("subgradient: instance has no Lipschitz constant; set solver.L");
      }
      cfg.L = *in.lipschitz;
    } else if (in.L && *in.L > 0.0) {
      cfg.L = *in.L;
    } else {
      throw ConfigError(c.solver + ": instance has no smoothness constant; set solver.L");
    }
  }
  if (c.solver == "subgradient" && !cfg.constraint) {
    // Smallest ball around the start holding the data and the reference.
    double R = 0.0;
    for (const auto& p : c.instance.points) {
      R = std::max(R, in.manifold->dist(x0, in.manifold->normalize(
                                                Point{in.manifold->backend(), p})));
    }
    if (in.reference) R = std::max(R, in.manifold->dist(x0, *in.reference));
    cfg.constraint = GeodesicBall{x0, R + 0.5};
  }
  return cfg;
}

json fast_summary(const std::string& solver, double bound, std::optional<double> achieved,
                  json extra) {
  json j{{"summary", true}, {"solver", solver}};
  if (achieved) {
    j["status"] = "checked";
    j["bound"] = bound;
    j["achieved"] = *achieved;
    j["pass"] = *achieved <= bound;
  } else {
    j["status"] = "skipped";
    j["bound"] = bound;
    j["achieved"] = nullptr;
    j["pass"] = nullptr;
  }
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

void solve_fast(const RunConfig& c, const Instance& in, const Point& x0,
                std::ostream& os, const std::string& format) {
  if (c.instance.kind != "meb" && c.instance.kind != "median") {
    throw ConfigError(c.solver + ": supports meb and median instances only");
  }
  double reach = 0.0;
  for (const auto& p : c.instance.points) {
    reach = std::max(reach, in.manifold->dist(in.manifold->origin(),
                                              Point{in.manifold->backend(), p}));
  }
  reach = std::max(reach, in.manifold->dist(in.manifold->origin(), x0));
  const fast::PrecisionScope scope(fast::precision_bits_for(c.fast.r + reach + 2.0));
  const fast::Space h(in.manifold->dimension());
  std::vector<fast::RVec> pts;
  for (const auto& p : c.instance.points) pts.push_back(h.lift(Point{in.manifold->backend(), p}));
  const auto f = c.instance.kind == "meb" ? fast::max_distance(pts) : fast::mean_distance(pts);
  std::optional<fast::RVec> ref;
  std::optional<double> f_star;
  if (in.reference) {
    ref = h.lift(*in.reference);
    f_star = f.eval(h, *ref).value;
  }
  const fast::RVec p = h.lift(x0);

  if (c.solver == "localize") {
    fast::LocalizeConfig cfg;
    cfg.mode = c.fast.mode;
    cfg.r = c.fast.r;
    cfg.delta = c.fast.delta;
    cfg.reference = ref;
    cfg.f_star = f_star;
    const auto res = fast::run_hyperbolic_localize(h, f, p, cfg);
    std::vector<json> rows;
    for (const auto& r : res.records) rows.push_back(record_json(r));
    json extra{{"mode", cfg.mode == fast::LocalizeMode::fixed ? "fixed" : "shrinking"},
               {"iterations", res.iters},
               {"queries", res.queries},
               {"optimal", res.optimal},
               {"final_f", res.f}};
    if (res.monotone) extra["cosh_contraction"] = *res.monotone;
    if (cfg.mode == fast::LocalizeMode::shrinking) {
      std::optional<double> d;
      if (ref) d = h.dist(res.x, *ref);
      extra["bound_name"] = "dist_to_minimizer";
      write_rows(os, rows, fast_summary("localize", 4.0, d, extra), format);
    } else {
      std::optional<double> gap;
      if (f_star) gap = res.f - *f_star;
      extra["bound_name"] = "gap";
      write_rows(os, rows, fast_summary("localize", f.lipschitz * cfg.delta, gap, extra),
                 format);
    }
    return;
  }
  fast::EllipsoidConfig cfg;
  cfg.r = c.fast.r;
  cfg.delta = c.fast.delta;
  cfg.budget_constant = c.fast.budget_constant;
  cfg.reference = ref;
  const auto res = fast::run_hyperbolic_ellipsoid(h, f, p, cfg);
  json extra{{"queries", res.queries},
             {"phase1_queries", res.phase1_queries},
             {"phase2_queries", res.phase2_queries},
             {"budget", res.budget},
             {"within_budget", res.within_budget},
             {"final_f", res.f},
             {"bound_name", "gap"}};
  auto s = fast_summary("ellipsoid", f.lipschitz * cfg.delta, res.gap, extra);
  if (!s["pass"].is_null()) s["pass"] = s["pass"].get<bool>() && res.within_budget;
  write_rows(os, {}, s, format);
}

int cmd_solve(const Options& o) {
  if (o.config.empty()) throw ConfigError("solve: --config is required");
  RunConfig c = load_run_config(o.config);
  if (const auto seed = effective_seed(o)) {
    c.instance.seed = *seed;
    c.solve.seed = *seed;
  }
  if (o.sub_tol) {
    if (!(*o.sub_tol > 0.0)) throw ConfigError("--sub-tol must be positive");
    c.solve.sub_tol = *o.sub_tol;
  }
  const std::string format = o.format.empty() ? c.format : o.format;
  if (format != "jsonl" && format != "csv") throw ConfigError("--format: jsonl or csv");
  Output out(o.out);
  std::ostream& os = out.get();

  Instance in;
  Point x0;
  SolveConfig cfg;
  try {
    in = build_instance(c.instance);
    x0 = start_point(c, in);
    if (!is_hyperbolic_only(c.solver)) cfg = complete_config(c, in, x0);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  try {
    if (is_hyperbolic_only(c.solver)) {
      solve_fast(c, in, x0, os, format);
      return kExitOk;
    }
    Trace t;
    if (c.solver == "gd") {
      t = run_gd(in.objective, x0, cfg);
    } else if (c.solver == "subgradient") {
      t = run_projected_subgradient(in.objective, x0, cfg);
    } else if (c.solver == "agm_c") {
      t = run_agm_c(in.objective, x0, cfg);
    } else {
      t = run_agm_sc(in.objective, x0, cfg);
    }
    write_trace(os, t, format);
    return kExitOk;
  } catch (const AssumptionViolation& e) {
    auto s = failure_summary(c.solver, "assumption_violation", e.what());
    s["k"] = e.k;
    write_rows(os, {}, s, format);
    std::cerr << "assumption violation at k=" << e.k << ": " << e.what() << '\n';
    return kExitAssumption;
  } catch (const RangeError& e) {
    // Out-of-range parameters (e.g. a start outside the constraint ball).
    write_rows(os, {}, failure_summary(c.solver, "config_error", e.what()), format);
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    write_rows(os, {}, failure_summary(c.solver, "config_error", e.what()), format);
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    write_rows(os, {}, failure_summary(c.solver, "numeric_failure", e.what()), format);
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const Options& o) {
  std::vector<std::string> names;
  if (o.suite == "all") {
    names = suite_names();
  } else {
    const auto& all = suite_names();
    if (std::find(all.begin(), all.end(), o.suite) == all.end()) {
      throw ConfigError("unknown suite: " + o.suite);
    }
    names = {o.suite};
  }
  const std::uint64_t seed = effective_seed(o).value_or(0);
  std::vector<std::function<SuiteReport()>> tasks;
  for (const auto& n : names) tasks.push_back([n, seed] { return run_suite(n, seed); });
  const auto reports = run_parallel(std::move(tasks), o.parallel);

  Output out(o.out);
  bool pass = true;
  for (const auto& r : reports) {
    for (const auto& c : r.checks) {
      json j = check_json(c);
      j["suite"] = r.suite;
      out.get() << j.dump() << '\n';
    }
    out.get() << json{{"suite", r.suite}, {"seed", r.seed}, {"pass", r.pass()},
                      {"summary", true}}.dump()
              << '\n';
    std::cerr << r.suite << ": " << (r.pass() ? "pass" : "FAIL") << " (" << r.checks.size()
              << " checks, " << r.seconds << " s)\n";
    pass = pass && r.pass();
  }
  return pass ? kExitOk : kExitAssumption;
}

// ---------------------------------------------------------------------------
// demo-local: {B3 + ε ≥ max(B1, B2)} on the Poincaré disk.

constexpr double kEpsilon = 0.1;

struct Busemanns {
  double b1, b2, b3;
  double margin() const { return b3 + kEpsilon - std::max(b1, b2); }
};

const Eigen::Vector2d kZeta3 = Eigen::Vector2d(1.0, 2.0) / std::sqrt(5.0);

Busemanns busemanns_at(const Eigen::Vector2d& z) {
  const PoincareCoord p{z};
  return {2.0 * poincare_busemann(Eigen::Vector2d(1, 0), p),
          4.0 * poincare_busemann(Eigen::Vector2d(0, 1), p),
          std::sqrt(5.0) * poincare_busemann(kZeta3, p)};
}

/// Along γ(t) = i tanh(t/2): log|γ-ζ|² + 2 log cosh(t/2), exact for large t.
Busemanns busemanns_on_ray(double t) {
  const double y = std::tanh(t / 2.0);
  const double log_cosh = t / 2.0 + std::log1p(std::exp(-t)) - std::log(2.0);
  auto b = [&](const Eigen::Vector2d& zeta) {
    return std::log((Eigen::Vector2d(0, y) - zeta).squaredNorm()) + 2.0 * log_cosh;
  };
  // |γ - i|² = (1 - y)² underflows; use 1 - tanh(t/2) = 2/(e^t + 1).
  const double b_i = 2.0 * std::log(2.0 / (std::exp(t) + 1.0)) + 2.0 * log_cosh;
  return {2.0 * b(Eigen::Vector2d(1, 0)), 4.0 * b_i, std::sqrt(5.0) * b(kZeta3)};
}

json busemann_json(const Busemanns& b) {
  return {{"B1", b.b1}, {"B2", b.b2}, {"B3", b.b3},
          {"margin", b.margin()}, {"indicator", b.margin() >= 0.0}};
}

int cmd_demo_local(const Options& o) {
  if (!(o.step > 0.0 && o.step < 0.5)) throw ConfigError("--step must lie in (0, 0.5)");
  const std::string grid_path = o.out.empty() ? "demo_local.csv" : o.out;
  std::ofstream csv(grid_path);
  if (!csv) throw ConfigError("cannot write output file: " + grid_path);

  const int half = static_cast<int>(std::floor(1.0 / o.step));
  const int side = 2 * half + 1;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j + half) * side + (i + half); };
  std::vector<signed char> inside(side * side, 0), ind(side * side, 0);
  csv << "x,y,B1,B2,B3,indicator\n";
  csv.precision(10);
  for (int j = -half; j <= half; ++j) {
    for (int i = -half; i <= half; ++i) {
      const Eigen::Vector2d z(i * o.step, j * o.step);
      if (z.squaredNorm() >= 1.0) continue;
      const auto b = busemanns_at(z);
      inside[idx(i, j)] = 1;
      ind[idx(i, j)] = b.margin() >= 0.0;
      csv << z.x() << ',' << z.y() << ',' << b.b1 << ',' << b.b2 << ',' << b.b3 << ','
          << int(ind[idx(i, j)]) << '\n';
    }
  }

  // Grid component of the origin (4-neighbour flood fill).
  std::vector<signed char> seen(side * side, 0);
  std::queue<std::pair<int, int>> todo;
  int cells = 0;
  double max_abs = 0.0, min_dist_i = 2.0;
  if (ind[idx(0, 0)]) {
    todo.push({0, 0});
    seen[idx(0, 0)] = 1;
  }
  while (!todo.empty()) {
    const auto [i, j] = todo.front();
    todo.pop();
    ++cells;
    const Eigen::Vector2d z(i * o.step, j * o.step);
    max_abs = std::max(max_abs, z.norm());
    min_dist_i = std::min(min_dist_i, (z - Eigen::Vector2d(0, 1)).norm());
    for (const auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const int a = i + di, b = j + dj;
      if (std::abs(a) > half || std::abs(b) > half) continue;
      if (!inside[idx(a, b)] || !ind[idx(a, b)] || seen[idx(a, b)]) continue;
      seen[idx(a, b)] = 1;
      todo.push({a, b});
    }
  }

  // Ray toward i: intervals on which the indicator holds.
  json intervals = json::array();
  const double dt = 0.01;
  const int steps = static_cast<int>(std::lround(o.ray_max / dt));
  std::optional<double> open;
  std::optional<double> crossing;
  bool prev = false;
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    const bool now = busemanns_on_ray(t).margin() >= 0.0;
    if (now && !open) open = t;
    if (!now && open) {
      intervals.push_back({*open, t - dt});
      open.reset();
    }
    if (k > 0 && now && !prev) {
      // Bisect the re-entry point.
      double lo = t - dt, hi = t;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (busemanns_on_ray(mid).margin() >= 0.0 ? hi : lo) = mid;
      }
      crossing = hi;
    }
    prev = now;
  }
  if (open) intervals.push_back({*open, o.ray_max});
  const bool tail_true = busemanns_on_ray(o.ray_max).margin() >= 0.0;

  const json report{
      {"epsilon", kEpsilon},
      {"grid", grid_path},
      {"step", o.step},
      {"origin", busemann_json(busemanns_at(Eigen::Vector2d::Zero()))},
      {"z_0.99i", busemann_json(busemanns_at(Eigen::Vector2d(0, 0.99)))},
      {"z_1/sqrt2", busemann_json(busemanns_at(Eigen::Vector2d(std::sqrt(0.5), 0)))},
      {"origin_component",
       {{"cells", cells},
        {"max_abs_z", max_abs},
        {"min_dist_to_i", min_dist_i},
        {"bounded_away_from_i", cells > 0 && min_dist_i > 10.0 * o.step}}},
      {"ray",
       {{"t_max", o.ray_max},
        {"dt", dt},
        {"true_intervals", intervals},
        {"reentry_t", crossing ? json(*crossing) : json(nullptr)},
        {"reentry_abs_z", crossing ? json(std::tanh(*crossing / 2.0)) : json(nullptr)},
        {"true_at_t_max", tail_true},
        {"second_component_reaches_i", crossing.has_value() && tail_true}}}};
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench: GD, AGM and subgradient gaps on one synthetic instance, plus
// localization from increasing radii.

int cmd_bench(const Options& o) {
  const std::uint64_t seed = effective_seed(o).value_or(0);
  const std::string format = o.format.empty() ? "jsonl" : o.format;
  if (format != "jsonl" && format != "csv") throw ConfigError("--format: jsonl or csv");
  const auto m = make_manifold({Backend::Kind::hyperbolic, 3});
  const auto inst = make_synthetic(m, 5, 1.0, 10.0, 0.5, seed);
  const double f_star = inst.objective.value(inst.reference);
  const Point x0 = m->origin();

  struct Row {
    std::string solver;
    std::vector<std::pair<int, double>> gaps;
    double seconds = 0.0;
  };
  auto timed = [&](std::string name, std::function<Trace()> run) {
    return std::function<Row()>([name, run, f_star] {
      const auto t0 = std::chrono::steady_clock::now();
      const Trace t = run();
      Row r{name, {}, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
      for (const auto& rec : t.records) r.gaps.push_back({rec.k, rec.f - f_star});
      return r;
    });
  };
  SolveConfig base;
  base.max_iters = 60;
  base.L = inst.L;
  base.reference = inst.reference;
  if (o.sub_tol) base.sub_tol = *o.sub_tol;
  SolveConfig sc = base;
  sc.mu = inst.mu;
  SolveConfig sub = base;
  sub.schedule = StepSchedule::dl_sqrt;
  sub.constraint = GeodesicBall{x0, 1.0};
  sub.L = inst.L * 2.0;  // gradient bound of the components on B(0, 1)
  std::vector<std::function<Row()>> tasks{
      timed("gd", [&] { return run_gd(inst.objective, x0, base); }),
      timed("agm_c", [&] { return run_agm_c(inst.objective, x0, base); }),
      timed("agm_sc", [&] { return run_agm_sc(inst.objective, x0, sc); }),
      timed("subgradient", [&] { return run_projected_subgradient(inst.objective, x0, sub); }),
  };
  const auto rows = run_parallel(std::move(tasks), o.parallel);

  Output out(o.out);
  std::ostream& os = out.get();
  if (format == "csv") os << "solver,k,gap\n";
  for (const auto& r : rows) {
    for (const auto& [k, g] : r.gaps) {
      if (format == "csv") {
        os << r.solver << ',' << k << ',' << json(g).dump() << '\n';
      } else {
        os << json{{"solver", r.solver}, {"k", k}, {"gap", g}}.dump() << '\n';
      }
    }
    std::cerr << r.solver << ": final gap " << (r.gaps.empty() ? 0.0 : r.gaps.back().second)
              << ", " << r.seconds << " s\n";
  }
  for (double r : {10.0, 100.0, 1000.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const fast::PrecisionScope scope(fast::precision_bits_for(r + 1.0));
    const fast::Space h(2);
    const auto xs = h.shoot(h.origin(), Eigen::Vector2d(1.0, 0.5), 0.9 * r);
    fast::LocalizeConfig cfg;
    cfg.r = r;
    cfg.reference = xs;
    const auto res = fast::run_hyperbolic_localize(h, fast::distance_to(xs), h.origin(), cfg);
    std::cerr << "localize r=" << r << ": " << res.iters << " iterations, d(x_N, x*) = "
              << h.dist(res.x, xs) << ", "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
              << " s\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"h-convex optimization on Hadamard manifolds"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", o.out, "Output path (default stdout)");
    s->add_option("--seed", o.seed, "Seed (SEED_OVERRIDE takes precedence)");
    s->add_option("--parallel", o.parallel, "Independent runs in flight")
        ->check(CLI::PositiveNumber);
  };
  auto* solve = app.add_subcommand("solve", "Run one solver on one instance");
  add_common(solve);
  solve->add_option("--config", o.config, "JSON run configuration")->required();
  solve->add_option("--format", o.format, "jsonl | csv");
  solve->add_option("--sub-tol", o.sub_tol, "Subproblem tolerance");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  add_common(verify);
  verify->add_option("suite", o.suite, "geometry | hconvex | moreau | rates | hyperbolic-fast | all");

  auto* demo = app.add_subcommand("demo-local", "Local-to-global counterexample grid");
  demo->add_option("--out", o.out, "Grid CSV path (default demo_local.csv)");
  demo->add_option("--step", o.step, "Grid step");
  demo->add_option("--ray-max", o.ray_max, "Largest t sampled along the ray toward i");

  auto* bench = app.add_subcommand("bench", "Gap-versus-iteration comparison data");
  add_common(bench);
  bench->add_option("--format", o.format, "jsonl | csv");
  bench->add_option("--sub-tol", o.sub_tol, "Subproblem tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*verify) return cmd_verify(o);
    if (*demo) return cmd_demo_local(o);
    return cmd_bench(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}
