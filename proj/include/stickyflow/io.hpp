#pragma once

#include "stickyflow/diagnostics.hpp"
#include "stickyflow/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stickyflow {

struct StepControl {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 1e-3;
  double cfl_coeff = 0.5;
  double t_end = 0.0;

  bool operator==(const StepControl&) const = default;
};

struct RunConfig {
  Params params;  // params.flow_kind is the [run] flow key
  InitialSpec profile;
  int n_cells = 256;
  StepControl step;
  int record_every = 10;
  double snapshot_dt = 0.0;  // > 0: clip steps to multiples and store states
  std::string output_dir = "out";
  double bound_factor = 100.0;
  std::optional<double> frak_c1;  // default: half the fitted decay rate
  double fit_t0 = 2.0;
  double fit_t1 = 20.0;

  bool operator==(const RunConfig&) const = default;
};

/// Parse failure; key is the dotted path ("grid.n_cells"), line the 1-based
/// line number in the document (0 when the failure is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);  // applies STICKYFLOW_OUT

/// Canonical rendering of a fully resolved config; parsing it reproduces the
/// identical RunConfig.
std::string render_config(const RunConfig& config);
void write_config_echo(const RunConfig& config, const std::string& path);

extern const char* const kTrajectoryHeader;

/// Shortest round-trip-exact decimal rendering (17 significant digits).
std::string format_double(double v);

/// Writes the diagnostics CSV: fixed header, 17 significant digits, LF line
/// endings, fields that do not apply to the flow kind left empty.
void write_trajectory(const std::vector<DiagnosticsRecord>& records, FlowKind flow,
                      const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace stickyflow
