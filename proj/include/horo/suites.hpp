#pragma once

// Verification suites: sampled inequality checks, theorem-bound runs and
// closed-form constants, each reported with its worst residual.

#include <cstdint>
#include <string>
#include <vector>

namespace horo {

struct CheckResult {
  std::string name;
  int criterion = 0;        // acceptance criterion this check feeds
  bool pass = true;
  double worst = 0.0;       // worst observed value of the checked quantity
  std::string relation;     // ">=" (worst ≥ limit) or "<=" (worst ≤ limit)
  double limit = 0.0;
  int samples = 0;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  double seconds = 0.0;  // wall time; excluded from determinism comparisons
  bool pass() const;
};

/// geometry | hconvex | moreau | rates | hyperbolic-fast
const std::vector<std::string>& suite_names();

/// Runs one suite; throws RangeError for an unknown name. Deterministic for
/// a fixed seed.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

}  // namespace horo
