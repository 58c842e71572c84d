#include "stickyflow/stepper.hpp"

#include "stickyflow/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stickyflow {

namespace {

// Forcing lift: full weight at interior nodes, half at the boundary nodes
// (half control volumes).
Array forcing_nodes(const std::function<double(double, double)>& f, const Grid& grid, double t) {
  Array out(grid.n_nodes());
  for (int i = 0; i <= grid.n_cells; ++i) out[i] = f(grid.nodes[i], t);
  out[0] *= 0.5;
  out[grid.n_cells] *= 0.5;
  return out;
}

struct ViscousSubstep {
  Array v_new;
  Array vx_new;
  double dissipation_rate = 0.0;
  double be_defect = 0.0;
};

ViscousSubstep viscous_solve(const LagrangianState& state, const InitialData& data,
                             const Array& mu_cells, const Grid& grid, double dt,
                             const Array* source, const Forcing* forcing) {
  double gl = 0.0, gr = 0.0;
  const double t_new = state.t + dt;
  Array src;
  const Array* src_ptr = source;
  if (forcing) {
    if (forcing->momentum) {
      src = forcing_nodes(forcing->momentum, grid, t_new);
      if (source) src += *source;
      src_ptr = &src;
    }
    if (forcing->stress_left) gl = forcing->stress_left(t_new);
    if (forcing->stress_right) gr = forcing->stress_right(t_new);
  }
  const TridiagonalSystem sys =
      assemble_viscous_system(state.eta_x, data.rho0, dt, mu_cells, state.v, grid, src_ptr, gl, gr);

  ViscousSubstep out;
  out.v_new = solve(sys);
  out.vx_new = grad_node_to_cell(out.v_new, grid);
  out.dissipation_rate = grid.h * (mu_cells * out.vx_new.square() / state.eta_x).sum();
  const Array mbar = lumped_mass(data.rho0);
  out.be_defect = 0.5 * grid.h * (mbar * (out.v_new - state.v).square()).sum();
  return out;
}

StepResult advance_map(const LagrangianState& state, const Grid& grid, double dt,
                       ViscousSubstep&& sub) {
  StepResult res;
  res.state.t = state.t + dt;
  res.state.eta = state.eta + dt * sub.v_new;
  res.state.eta_x = grad_node_to_cell(res.state.eta, grid);
  res.state.v = std::move(sub.v_new);
  res.stats.dissipation_rate = sub.dissipation_rate;
  res.stats.be_defect = sub.be_defect;
  if (res.state.eta_x.minCoeff() <= 0.0) res.status = StepStatus::RejectedEtaX;
  return res;
}

}  // namespace

StepResult step_pressureless(const LagrangianState& state, const InitialData& data,
                             const Params& params, const Grid& grid, double dt,
                             const Forcing* forcing) {
  ViscousSubstep sub = viscous_solve(state, data, Array::Constant(grid.n_cells, params.mu), grid,
                                     dt, nullptr, forcing);
  return advance_map(state, grid, dt, std::move(sub));
}

StepResult step_degenerate(const LagrangianState& state, const InitialData& data,
                           const Params& params, const Grid& grid, double dt,
                           const Forcing* forcing) {
  // coefficient lag: mu = (rho0/eta_x)^alpha frozen at the old state
  const Array mu_cells = (data.rho0 / state.eta_x).pow(params.alpha);
  ViscousSubstep sub = viscous_solve(state, data, mu_cells, grid, dt, nullptr, forcing);
  return advance_map(state, grid, dt, std::move(sub));
}

StepResult step_nsf(const LagrangianState& state, const InitialData& data, const Params& params,
                    const Grid& grid, double dt, const Forcing* forcing) {
  const double inv_m2 = 1.0 / (params.mach * params.mach);
  const Array theta_cells_old = node_to_cell_avg(state.theta);
  // cell pressure rho0 Theta / (M^2 eta_x); zero at the free boundary since
  // Theta vanishes there
  const Array pc = inv_m2 * data.rho0 * theta_cells_old / state.eta_x;
  const Array press_source = -div_cell_to_node(pc, grid, 0.0, 0.0);

  ViscousSubstep sub = viscous_solve(state, data, Array::Constant(grid.n_cells, params.mu), grid,
                                     dt, &press_source, forcing);
  StepResult res = advance_map(state, grid, dt, std::move(sub));
  if (res.status != StepStatus::Accepted) return res;

  const Array vx_new = grad_node_to_cell(res.state.v, grid);
  // Heating and compression-work sources use the post-update velocity with the
  // coefficient state the velocity substep saw (eta_x and Theta of the old
  // state), which makes the discrete energy exchange exact: heating equals the
  // viscous dissipation and the compression sink equals the pressure work.
  const Array heating = params.mu * vx_new.square() / state.eta_x;
  const Array compression = pc * vx_new;
  res.stats.pressure_work_rate = grid.h * compression.sum();
  Array source = cell_source_to_nodes(heating - compression, grid, true);
  if (forcing && forcing->heat) {
    Array f = forcing_nodes(forcing->heat, grid, res.state.t);
    f[0] = 0.0;
    f[grid.n_cells] = 0.0;
    source += f;
  }

  const TridiagonalSystem heat = assemble_heat_system(res.state.eta_x, data.rho0, dt,
                                                      params.kappa, state.theta, grid, source);
  res.state.theta = solve(heat);
  res.stats.theta_min = res.state.theta.minCoeff();
  res.stats.theta_boundary_abs =
      std::max(std::abs(res.state.theta[0]), std::abs(res.state.theta[grid.n_cells]));

  const double theta_scale = std::max(state.theta.maxCoeff(), 0.0);
  if (res.stats.theta_min < -1e-6 * theta_scale) res.status = StepStatus::RejectedTheta;
  return res;
}

namespace {

// per-cell state of the eta_x ODE identity (the heat-conductive analogue of
// the pressureless log identity):
//   eta_x(t) = e^{(P(t)-P(0))/mu} + (1/(mu M^2)) int_0^t rho0 Theta(s)
//              e^{(P(t)-P(s))/mu} ds
struct NsfEtaxIdentity {
  Array j_acc;
  Array p0;
  double inv_mu = 0.0, inv_mu_m2 = 0.0;

  void init(const InitialData& data, const Params& params, const Grid& grid) {
    p0 = partial_momentum_cells(data.v0, data.rho0, grid.h);
    j_acc = Array::Zero(grid.n_cells);
    inv_mu = 1.0 / params.mu;
    inv_mu_m2 = inv_mu / (params.mach * params.mach);
  }

  void accumulate(const Array& p_now, const Array& rho0, const Array& theta_cells, double dt) {
    j_acc += dt * rho0 * theta_cells * (-inv_mu * p_now).exp();
  }

  double residual(const Array& eta_x, const Array& p_now) const {
    const Array predicted =
        (inv_mu * p_now).exp() * ((-inv_mu * p0).exp() + inv_mu_m2 * j_acc);
    return (eta_x - predicted).abs().maxCoeff();
  }
};

double max_strain_rate(const LagrangianState& s, const Grid& grid) {
  return (grad_node_to_cell(s.v, grid) / s.eta_x).abs().maxCoeff();
}

}  // namespace

RunResult run_with_data(const RunConfig& config, const Grid& grid, const InitialData& data) {
  const Params& params = config.params;
  params.validate();
  const StepControl& sc = config.step;
  if (!(sc.dt_min > 0) || sc.dt_min > sc.dt_init || sc.dt_init > sc.dt_max)
    throw std::invalid_argument("step control requires 0 < dt_min <= dt_init <= dt_max");
  if (!(sc.cfl_coeff > 0) || sc.cfl_coeff > 1.0)
    throw std::invalid_argument("cfl_coeff must be in (0,1]");

  RunResult out;
  out.grid = grid;
  out.data = data;
  out.params = params;

  const bool nsf = params.flow_kind == FlowKind::Nsf;
  const double h = grid.h;
  const Array mbar = lumped_mass(data.rho0);

  LagrangianState state = initial_state(data, grid, params);
  LagrangianState prev;
  double dt_prev = 0.0;

  NsfAprioriMonitor apriori;
  NsfEtaxIdentity etax_identity;
  if (nsf) {
    apriori = NsfAprioriMonitor(grid.n_cells, params.mu, params.mach);
    etax_identity.init(data, params, grid);
  }

  auto kinetic_of = [&](const LagrangianState& s) {
    return 0.5 * h * (mbar * s.v.square()).sum();
  };
  auto thermal_of = [&](const LagrangianState& s) {
    return nsf ? h * (mbar * s.theta).sum() : 0.0;
  };

  const double kinetic0 = kinetic_of(state);
  const double momentum0 = h * (mbar * state.v).sum();
  double kinetic_prev = kinetic0;
  double total_energy_prev = kinetic0 + thermal_of(state);
  double dissipated = 0.0;  // time integral of the viscous dissipation + defects

  out.records.push_back(record(state, data, params, grid, nullptr, 0.0, apriori.sup()));
  if (config.snapshot_dt > 0.0)
    out.snapshots.push_back({state.t, state.eta, state.v, state.theta});
  long next_snapshot = 1;

  const double t_eps = 1e-12 * std::max(1.0, sc.t_end);

  auto diagnostic_dump = [&](const std::string& reason) {
    out.aborted = true;
    out.abort_reason = reason;
    out.events.push_back({state.t, "abort", reason});
    if (std::abs(out.records.back().t - state.t) > t_eps)
      out.records.push_back(record(state, data, params, grid, dt_prev > 0 ? &prev : nullptr,
                                   dt_prev, apriori.sup()));
    out.final_state = state;
  };

  double dt = std::clamp(sc.dt_init, sc.dt_min, sc.dt_max);
  int consecutive_rejections = 0;

  while (state.t < sc.t_end - t_eps) {
    double dt_try = std::min(dt, sc.t_end - state.t);
    if (config.snapshot_dt > 0.0) {
      const double t_snap = next_snapshot * config.snapshot_dt;
      if (t_snap < sc.t_end && t_snap > state.t + t_eps)
        dt_try = std::min(dt_try, t_snap - state.t);
    }

    StepResult step;
    switch (params.flow_kind) {
      case FlowKind::Pressureless:
        step = step_pressureless(state, data, params, grid, dt_try);
        break;
      case FlowKind::Nsf:
        step = step_nsf(state, data, params, grid, dt_try);
        break;
      case FlowKind::DegeneratePressureless:
        step = step_degenerate(state, data, params, grid, dt_try);
        break;
    }

    if (step.status != StepStatus::Accepted) {
      ++out.steps_rejected;
      ++consecutive_rejections;
      out.events.push_back({state.t,
                            step.status == StepStatus::RejectedEtaX ? "reject_eta_x"
                                                                    : "reject_theta",
                            "dt = " + std::to_string(dt_try)});
      dt = 0.5 * dt_try;
      if (dt < sc.dt_min) {
        diagnostic_dump("dt underflow below dt_min after repeated rejections");
        return out;
      }
      if (consecutive_rejections > 200) {
        diagnostic_dump("persistent step rejection");
        return out;
      }
      continue;
    }
    consecutive_rejections = 0;

    if (nsf) {
      const double theta_scale = std::max(state.theta.maxCoeff(), 0.0);
      if (step.stats.theta_min < -1e-10 * theta_scale)
        out.events.push_back({step.state.t, "theta_undershoot",
                              "min Theta = " + std::to_string(step.stats.theta_min)});
    }

    prev = std::move(state);
    state = std::move(step.state);
    dt_prev = dt_try;
    ++out.steps_accepted;

    // cross-step monitors
    const double kinetic_now = kinetic_of(state);
    out.kinetic_increase_max = std::max(out.kinetic_increase_max, kinetic_now - kinetic_prev);
    const double momentum_now = h * (mbar * state.v).sum();
    out.momentum_drift = std::max(out.momentum_drift, std::abs(momentum_now - momentum0));
    dissipated += dt_try * step.stats.dissipation_rate + step.stats.be_defect;
    if (nsf) {
      const double total_now = kinetic_now + thermal_of(state);
      out.total_energy_increase_max =
          std::max(out.total_energy_increase_max, total_now - total_energy_prev);
      total_energy_prev = total_now;
      out.theta_min_global = std::min(out.theta_min_global, step.stats.theta_min);
      out.theta_boundary_max = std::max(out.theta_boundary_max, step.stats.theta_boundary_abs);

      const Array theta_cells = node_to_cell_avg(state.theta);
      apriori.accumulate(data.rho0, theta_cells, dt_try);
      if (out.apriori_sup < 1.0 && apriori.sup() >= 1.0)
        out.events.push_back({state.t, "closure_failure", "a priori monitor crossed 1"});
      out.apriori_sup = apriori.sup();

      const Array p_now = partial_momentum_cells(state.v, data.rho0, grid.h);
      etax_identity.accumulate(p_now, data.rho0, theta_cells, dt_try);
      out.nsf_etax_identity_sup =
          std::max(out.nsf_etax_identity_sup, etax_identity.residual(state.eta_x, p_now));
    } else {
      const double budget = std::abs(kinetic_now + dissipated - kinetic0) /
                            std::max(kinetic0, 1e-300);
      out.energy_budget_residual = std::max(out.energy_budget_residual, budget);
    }
    kinetic_prev = kinetic_now;

    while (config.snapshot_dt > 0.0 &&
           next_snapshot * config.snapshot_dt <= state.t + t_eps) {
      out.snapshots.push_back({state.t, state.eta, state.v, state.theta});
      ++next_snapshot;
    }
    if (out.steps_accepted % config.record_every == 0 || state.t >= sc.t_end - t_eps)
      out.records.push_back(record(state, data, params, grid, &prev, dt_prev, apriori.sup()));

    const double strain = max_strain_rate(state, grid);
    const double proposal = strain > 0.0 ? sc.cfl_coeff / strain : sc.dt_max;
    dt = std::clamp(proposal, sc.dt_min, sc.dt_max);
  }

  if (out.records.back().t < state.t - t_eps)
    out.records.push_back(record(state, data, params, grid, dt_prev > 0 ? &prev : nullptr,
                                 dt_prev, apriori.sup()));
  out.final_state = std::move(state);
  return out;
}

RunResult run(const RunConfig& config) {
  const Grid grid = Grid::uniform(config.n_cells);
  const InitialData data = build_initial_data(config.profile, grid, config.params);
  return run_with_data(config, grid, data);
}

}  // namespace stickyflow
