#include "horo/serialize.hpp"

#include <fstream>
#include <ostream>
#include <regex>
#include <sstream>

namespace horo {

using nlohmann::json;

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{"gd",     "subgradient", "agm_c",
                                              "agm_sc", "localize",    "ellipsoid"};
  return names;
}

bool is_hyperbolic_only(const std::string& solver) {
  return solver == "localize" || solver == "ellipsoid";
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

Eigen::VectorXd parse_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  // A nested array is a matrix, flattened column-major.
  if (!j.empty() && j.front().is_array()) {
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Eigen::VectorXd v(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        throw ConfigError(what + ": ragged matrix");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[r][c].is_number()) throw ConfigError(what + ": non-numeric entry");
        v(c * rows + r) = j[r][c].get<double>();
      }
    }
    return v;
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": non-numeric entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

std::vector<Eigen::VectorXd> parse_vectors(const json& j, const char* key) {
  std::vector<Eigen::VectorXd> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw ConfigError(std::string(key) + ": expected an array");
  for (const auto& e : j.at(key)) out.push_back(parse_vector(e, key));
  return out;
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

Backend parse_backend(const json& j) {
  if (j.is_string()) {
    static const std::regex re(R"((H|PD)(\d+))");
    std::smatch m;
    const std::string s = j.get<std::string>();
    if (!std::regex_match(s, m, re)) throw ConfigError("backend: expected H<n> or PD<n>");
    const int n = std::stoi(m[2]);
    if (n < 1) throw ConfigError("backend: dimension must be ≥ 1");
    return {m[1] == "H" ? Backend::Kind::hyperbolic : Backend::Kind::spd, n};
  }
  if (!j.is_object()) throw ConfigError("backend: expected a string or object");
  const auto type = get_or<std::string>(j, "type", "");
  const int n = get_or<int>(j, "n", 0);
  if (n < 1) throw ConfigError("backend: dimension must be ≥ 1");
  if (type == "hyperbolic") return {Backend::Kind::hyperbolic, n};
  if (type == "spd") return {Backend::Kind::spd, n};
  throw ConfigError("backend: unknown type '" + type + "'");
}

InstanceSpec parse_instance(const json& j) {
  if (!j.is_object()) throw ConfigError("instance: expected an object");
  InstanceSpec s;
  s.kind = get_or<std::string>(j, "kind", "");
  if (s.kind.empty()) throw ConfigError("instance: missing kind");
  if (j.contains("backend")) s.backend = parse_backend(j.at("backend"));
  s.points = parse_vectors(j, "points");
  s.vectors = parse_vectors(j, "vectors");
  s.weights = get_or<std::vector<double>>(j, "weights", {});
  s.count = get_or<int>(j, "count", 0);
  s.mu = get_or<double>(j, "mu", 1.0);
  s.L = get_or<double>(j, "L", 1.0);
  s.radius = get_or<double>(j, "radius", 1.0);
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  return s;
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("instance")) throw ConfigError("config: missing instance");
  if (!j.contains("solver")) throw ConfigError("config: missing solver");
  RunConfig c;
  c.instance = parse_instance(j.at("instance"));
  const json& s = j.at("solver");
  if (s.is_string()) {
    c.solver = s.get<std::string>();
  } else if (s.is_object()) {
    c.solver = get_or<std::string>(s, "name", "");
  } else {
    throw ConfigError("solver: expected a string or object");
  }
  const auto& names = solver_names();
  if (std::find(names.begin(), names.end(), c.solver) == names.end()) {
    throw ConfigError("solver: unknown name '" + c.solver + "'");
  }
  if (is_hyperbolic_only(c.solver) &&
      c.instance.backend.kind != Backend::Kind::hyperbolic) {
    throw ConfigError("solver '" + c.solver + "' runs on hyperbolic backends only");
  }
  c.solve.schedule =
      c.solver == "subgradient" ? StepSchedule::dl_sqrt : StepSchedule::inv_L;
  if (s.is_object()) {
    c.solve.max_iters = get_or<int>(s, "max_iters", c.solve.max_iters);
    if (s.contains("schedule")) {
      try {
        c.solve.schedule = parse_schedule(s.at("schedule").get<std::string>());
      } catch (const RangeError& e) {
        throw ConfigError(e.what());
      }
    }
    c.L_given = s.contains("L");
    c.mu_given = s.contains("mu");
    c.solve.L = get_or<double>(s, "L", c.solve.L);
    c.solve.mu = get_or<double>(s, "mu", c.solve.mu);
    c.solve.D = get_or<double>(s, "D", c.solve.D);
    c.solve.sub_tol = get_or<double>(s, "sub_tol", c.solve.sub_tol);
    c.solve.seed = get_or<std::uint64_t>(s, "seed", c.solve.seed);
    if (s.contains("constraint")) {
      const json& b = s.at("constraint");
      if (!b.is_object() || !b.contains("center")) {
        throw ConfigError("constraint: expected {center, radius}");
      }
      c.solve.constraint = GeodesicBall{
          Point{c.instance.backend, parse_vector(b.at("center"), "constraint.center")},
          get_or<double>(b, "radius", 0.0)};
    }
    const auto mode = get_or<std::string>(s, "mode", "shrinking");
    if (mode == "fixed") {
      c.fast.mode = fast::LocalizeMode::fixed;
    } else if (mode != "shrinking") {
      throw ConfigError("solver.mode: expected fixed or shrinking");
    }
    c.fast.r = get_or<double>(s, "r", c.fast.r);
    c.fast.delta = get_or<double>(s, "delta", c.fast.delta);
    c.fast.budget_constant = get_or<double>(s, "budget_constant", c.fast.budget_constant);
  }
  if (c.solve.max_iters < 1) throw ConfigError("solver.max_iters must be ≥ 1");
  if (!(c.solve.sub_tol > 0.0)) throw ConfigError("solver.sub_tol must be positive");
  if (j.contains("start")) c.start = parse_vector(j.at("start"), "start");
  c.format = get_or<std::string>(j, "format", c.format);
  if (c.format != "jsonl" && c.format != "csv") {
    throw ConfigError("format: expected jsonl or csv");
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

json record_json(const TraceRecord& r) {
  json j{{"k", r.k}, {"f", r.f}, {"gnorm", r.gnorm}, {"step", r.step}};
  if (r.f_avg) j["f_avg"] = *r.f_avg;
  if (r.energy) j["energy"] = *r.energy;
  if (r.dist_ref) j["dist_ref"] = *r.dist_ref;
  return j;
}

json record_json(const fast::LocalizeRecord& r) {
  json j{{"k", r.k}, {"f", r.f}, {"gnorm", r.gnorm}, {"step", r.step}};
  if (r.dist_ref) j["dist_ref"] = *r.dist_ref;
  return j;
}

json summary_json(const Trace& t) {
  json j{{"summary", true}, {"solver", t.solver}};
  json bounds = json::array();
  for (const auto& b : t.bounds) {
    bounds.push_back({{"name", b.name},
                      {"k", b.k},
                      {"bound", b.bound},
                      {"achieved", b.achieved},
                      {"slack", b.slack},
                      {"pass", b.pass}});
  }
  j["bounds"] = bounds;
  if (t.reference_available && !t.bounds.empty()) {
    // Headline: the bound with the smallest margin.
    const auto* worst = &t.bounds.front();
    for (const auto& b : t.bounds) {
      if (b.bound + b.slack - b.achieved < worst->bound + worst->slack - worst->achieved) {
        worst = &b;
      }
    }
    j["status"] = "checked";
    j["bound"] = worst->bound;
    j["achieved"] = worst->achieved;
    j["pass"] = t.pass();
  } else {
    j["status"] = "skipped";
    j["bound"] = nullptr;
    j["achieved"] = nullptr;
    j["pass"] = nullptr;
  }
  j["energy_monotone"] = t.energy_monotone;
  j["worst_energy_increase"] = t.worst_energy_increase;
  j["crosscheck"] = opt(t.crosscheck);
  j["iterations"] = t.records.empty() ? 0 : t.records.back().k;
  j["final_f"] = t.records.empty() ? json(nullptr) : json(t.records.back().f);
  j["final_x"] = vec_json(t.final.coords);
  return j;
}

void write_rows(std::ostream& os, const std::vector<json>& records,
                const json& summary, const std::string& format) {
  if (format == "jsonl") {
    for (const auto& r : records) os << r.dump() << '\n';
    os << summary.dump() << '\n';
    return;
  }
  if (format != "csv") throw ConfigError("format: expected jsonl or csv");
  static const std::vector<std::string> cols{"k",      "f",      "gnorm", "step",
                                             "f_avg", "energy", "dist_ref"};
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ',';
      if (r.contains(cols[i])) os << r.at(cols[i]).dump();
    }
    os << '\n';
  }
  os << "# " << summary.dump() << '\n';
}

void write_trace(std::ostream& os, const Trace& t, const std::string& format) {
  std::vector<json> rows;
  rows.reserve(t.records.size());
  for (const auto& r : t.records) rows.push_back(record_json(r));
  write_rows(os, rows, summary_json(t), format);
}

json check_json(const CheckResult& c) {
  return {{"check", c.name},     {"criterion", c.criterion}, {"pass", c.pass},
          {"worst", c.worst},    {"relation", c.relation},   {"limit", c.limit},
          {"samples", c.samples}, {"note", c.note}};
}

json report_json(const SuiteReport& r, bool timing) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  json j{{"suite", r.suite}, {"seed", r.seed}, {"pass", r.pass()}, {"checks", checks}};
  if (timing) j["seconds"] = r.seconds;
  return j;
}

}  // namespace horo
