#pragma once

#include "stickyflow/model.hpp"

#include <vector>

namespace stickyflow {

/// Per-record scalar diagnostics. Fields that do not apply to a flow kind are
/// left NaN and written as empty CSV fields. h1_vt and h1_thetat are carried
/// for the exponentially weighted energy functional and are not part of the
/// CSV schema.
struct DiagnosticsRecord {
  double t = 0.0;
  double kinetic = 0.0;      // 1/2 int rho0 v^2
  double thermal = 0.0;      // int rho0 Theta
  double thermal_sq = 0.0;   // int rho0 Theta^2
  double momentum = 0.0;     // int rho0 v
  double domain_size = 0.0;  // int eta_x
  double etax_min = 0.0;
  double etax_max = 0.0;
  double log_identity_residual = 0.0;
  double h1_v = 0.0;     // ||v_x||_L2
  double linf_vx = 0.0;  // ||v_x||_Linf
  double h1_theta = 0.0;
  double l2_vt = 0.0;     // int rho0 v_t^2
  double l2_thetat = 0.0;
  double h2_eta = 0.0;  // ||eta_xx||_L2
  double h2_v = 0.0;    // ||v_xx||_L2
  double apriori_nsf = 0.0;

  double h1_vt = 0.0;  // ||v_xt||_L2 (not in CSV)
  double h1_thetat = 0.0;
};

struct ConstantsLedger {
  double c1_envelope = 1.0;  // two-sided eta_x bound from the initial data
  double c2_fit = 0.0;       // fitted exponential decay rate of int rho0 v^2
  double frak_c1 = 0.0;      // exponential weight used in the energy functional
};

/// Fills a record from a state. prev (with dt_prev, the step that produced
/// state from it) supplies backward-difference time derivatives; at t = 0 pass
/// nullptr and v1/theta1 from the initial data are used instead.
DiagnosticsRecord record(const LagrangianState& state, const InitialData& data,
                         const Params& params, const Grid& grid, const LagrangianState* prev,
                         double dt_prev, double apriori_sup);

/// sup over cells of |mu log eta_x - int_{-1}^x rho0 v(t) + int_{-1}^x rho0 v0|.
/// An exact identity of the constant-viscosity pressureless flow; the value
/// measures discretization error only. Zero at t = 0 by construction.
double log_identity_residual(const LagrangianState& state, const InitialData& data,
                             const Params& params, const Grid& grid);

/// Explicit Hoelder envelope constant: 1/c1 <= eta_x <= c1 for all time,
/// c1 = exp(2 sqrt(int rho0) sqrt(int rho0 v0^2) / mu). Requires normalized
/// momentum.
double etax_envelope(const InitialData& data, const Params& params, const Grid& grid);

/// Closed-form terminal domain size of the pressureless flow,
/// int_{-1}^{1} exp(-(1/mu) int_{-1}^{x} rho0 v0) dx, evaluated with the
/// solver's staggering-consistent composite quadrature.
double terminal_domain(const InitialData& data, const Params& params, const Grid& grid);

/// Least-squares slope of log(value) against t over [t_begin, t_end], negated.
/// Throws if fewer than two samples fall in the window or any value is
/// non-positive there.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                      double t_begin, double t_end);

/// Best constant in int rho0 v^2 <= C_P int v_x^2 over discrete node fields
/// with zero weighted mean: largest eigenvalue of the weighted eigenproblem,
/// by power iteration on the inverse stiffness.
double poincare_constant(const Array& rho0, const Grid& grid);

/// Running a priori closure monitor sup_x (1/(mu M^2)) int_0^t rho0 Theta ds,
/// accumulated per accepted step (rectangle rule, right endpoint).
class NsfAprioriMonitor {
 public:
  NsfAprioriMonitor() = default;
  NsfAprioriMonitor(int n_cells, double mu, double mach);
  void accumulate(const Array& rho0, const Array& theta_cells, double dt);
  double sup() const { return sup_; }

 private:
  Array acc_;
  double inv_mu_m2_ = 0.0;
  double sup_ = 0.0;
};

struct NsfEnergySeries {
  std::vector<double> t;
  std::vector<double> value;  // script-E(t)
  double sup = 0.0;
  double e0 = 0.0;  // initial energy: int rho0 (v0^2 + v1^2 + Theta0^2 + Theta1^2)
};

/// Exponentially weighted energy functional
///   E(t) = e^{c1 t} [int rho0 v^2 + int rho0 v_t^2 + int rho0 Theta^2 + int rho0 Theta_t^2]
///        + int_0^t e^{c1 s} [||v_x||^2 + ||v_xt||^2 + ||Theta_x||^2 + ||Theta_xt||^2] ds
/// over the record series (trapezoid accumulation of the dissipation part).
NsfEnergySeries nsf_energy_functional(const std::vector<DiagnosticsRecord>& records,
                                      double frak_c1);

}  // namespace stickyflow
