#pragma once

#include "stickyflow/stepper.hpp"

#include <string>
#include <vector>

namespace stickyflow {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// The verification checklist for a completed run: conservation laws,
/// monotone energies, the eta_x envelope, the exact log identity, terminal
/// domain, decay-rate fits, the Poincare monitor, and the closure monitors of
/// the heat-conductive flow. Which checks apply depends on the flow kind.
std::vector<CheckResult> verify_run(const RunConfig& config, const RunResult& result);

std::string format_check_line(const CheckResult& check);

}  // namespace stickyflow
