#pragma once

#include "stickyflow/diagnostics.hpp"
#include "stickyflow/io.hpp"
#include "stickyflow/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace stickyflow {

/// Manufactured-solution hooks: interior forcing terms and the exact viscous
/// boundary fluxes. Physical runs leave all of these empty (stress-free
/// boundary, no forcing).
struct Forcing {
  std::function<double(double, double)> momentum;  // F_v(x, t)
  std::function<double(double, double)> heat;      // F_Theta(x, t)
  std::function<double(double)> stress_left;       // mu v_x/eta_x at x=-1
  std::function<double(double)> stress_right;
};

enum class StepStatus { Accepted, RejectedEtaX, RejectedTheta };

struct StepStats {
  double dissipation_rate = 0.0;  // h sum mu (v_x^new)^2 / eta_x^old
  double be_defect = 0.0;         // 1/2 |v_new - v_old|^2 in the lumped mass norm
  double pressure_work_rate = 0.0;
  double theta_min = 0.0;
  double theta_boundary_abs = 0.0;  // max |Theta| at the endpoints after the step
};

struct StepResult {
  StepStatus status = StepStatus::Accepted;
  LagrangianState state;
  StepStats stats;
};

/// One backward-Euler step of the pressureless flow: implicit viscous solve
/// with eta_x frozen, then eta += dt v_new and eta_x recomputed. Momentum is
/// conserved to round-off and the lumped kinetic energy cannot increase.
StepResult step_pressureless(const LagrangianState& state, const InitialData& data,
                             const Params& params, const Grid& grid, double dt,
                             const Forcing* forcing = nullptr);

/// Operator-split step of the almost pressureless flow: (a) implicit viscous
/// solve with the explicit pressure gradient source, (b) eta update, (c)
/// implicit heat solve with Dirichlet ends and explicit heating/compression
/// sources. The source quadrature matches the velocity substep exactly, so the
/// total energy budget closes to round-off per step.
StepResult step_nsf(const LagrangianState& state, const InitialData& data, const Params& params,
                    const Grid& grid, double dt, const Forcing* forcing = nullptr);

/// Pressureless step with cell-wise viscosity mu = (rho0/eta_x)^alpha frozen
/// at the old state. Cells with rho0 = 0 carry zero flux.
StepResult step_degenerate(const LagrangianState& state, const InitialData& data,
                           const Params& params, const Grid& grid, double dt,
                           const Forcing* forcing = nullptr);

struct Event {
  double t = 0.0;
  std::string kind;
  std::string detail;
};

struct Snapshot {
  double t = 0.0;
  Array eta;
  Array v;
  Array theta;
};

struct RunResult {
  Grid grid;
  InitialData data;
  Params params;
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<Event> events;
  LagrangianState final_state;

  long steps_accepted = 0;
  long steps_rejected = 0;
  bool aborted = false;
  std::string abort_reason;

  // Cross-step monitors, updated at every accepted step.
  double momentum_drift = 0.0;          // max |int rho0 v - initial|
  double kinetic_increase_max = 0.0;    // max single-step increase of the kinetic energy
  double energy_budget_residual = 0.0;  // |K(t) + dissipated - K(0)| / K(0), pressureless
  double total_energy_increase_max = 0.0;  // max single-step increase of K + thermal (Nsf)
  double theta_min_global = 0.0;
  double theta_boundary_max = 0.0;
  double apriori_sup = 0.0;
  double nsf_etax_identity_sup = 0.0;  // residual of the eta_x ODE solution (Nsf)
};

/// Drives the configured stepper from t = 0 to t_end with adaptive dt
/// (proposal cfl/max|v_x/eta_x| clamped to [dt_min, dt_max]; rejected steps
/// halve dt). Deterministic for a fixed config.
RunResult run(const RunConfig& config);

/// As run(), but with externally built data (used by cross-checks that need
/// non-normalized or exact sampled initial data).
RunResult run_with_data(const RunConfig& config, const Grid& grid, const InitialData& data);

}  // namespace stickyflow
