// Cross-route validation: analytic coefficients against the operator-chain
// oracle, operator reordering identities, ladder relations, route-equivalent
// dynamics, the counter-rotating recursion residual, and the revival
// phenomenology checks. The CLI validate command and the acceptance suite
// both run through here.

#pragma once

#include <string>
#include <vector>

namespace sqjcm::validation {

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;   // measured value of the check metric
  double tolerance = 0.0;  // pinned acceptance threshold
  std::string note;        // context (parameter set, conjecture labeling, ...)
  double seconds = 0.0;
};

struct Defects {
  bool flip_sinh_sign = false;  // corrupt the transformed-mode construction
  bool drop_chi_phase = false;  // drop the initial-phase factor in the coefficients
  bool any() const { return flip_sinh_sign || drop_chi_phase; }
};

struct Options {
  bool quick = false;  // no-squeeze subset, runs in seconds
  Defects defects;
  // When nonempty, only checks whose name contains one of these tokens run.
  std::vector<std::string> filter;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

Report run_validation(const Options& opt = {});

}  // namespace sqjcm::validation
