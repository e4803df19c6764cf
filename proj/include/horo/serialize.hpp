#pragma once

// JSON configuration and trace/report output. Schemas are documented in
// docs/format.md.

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "horo/hyperbolic_fast.hpp"
#include "horo/problems.hpp"
#include "horo/solvers.hpp"
#include "horo/suites.hpp"

namespace horo {

/// Malformed or inconsistent configuration (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct FastSettings {
  fast::LocalizeMode mode = fast::LocalizeMode::shrinking;
  double r = 10.0;
  double delta = 0.01;
  double budget_constant = 64.0;
};

struct RunConfig {
  InstanceSpec instance;
  std::string solver;  // gd | subgradient | agm_c | agm_sc | localize | ellipsoid
  SolveConfig solve;
  bool L_given = false;
  bool mu_given = false;
  std::optional<Eigen::VectorXd> start;
  FastSettings fast;
  std::string format = "jsonl";
};

const std::vector<std::string>& solver_names();
bool is_hyperbolic_only(const std::string& solver);

Backend parse_backend(const nlohmann::json& j);
InstanceSpec parse_instance(const nlohmann::json& j);
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json record_json(const TraceRecord& r);
nlohmann::json record_json(const fast::LocalizeRecord& r);
/// Final summary: {summary, solver, status, bound, achieved, pass, bounds…}.
nlohmann::json summary_json(const Trace& t);

/// JSONL: one record per line, then the summary. CSV: header and one row per
/// record, then the summary as a trailing `# ` comment line.
void write_trace(std::ostream& os, const Trace& t, const std::string& format);
void write_rows(std::ostream& os, const std::vector<nlohmann::json>& records,
                const nlohmann::json& summary, const std::string& format);

nlohmann::json check_json(const CheckResult& c);
/// Suite summary line; `timing` adds the wall time (not deterministic).
nlohmann::json report_json(const SuiteReport& r, bool timing);

}  // namespace horo
