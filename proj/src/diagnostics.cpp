#include "stickyflow/diagnostics.hpp"

#include "stickyflow/discretize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stickyflow {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double l2_cells(const Array& cells, double h) { return std::sqrt(h * cells.square().sum()); }

// ||d/dx of a cell field||_L2 over interior nodes
double l2_interior_gradient(const Array& cells, const Grid& grid) {
  double acc = 0.0;
  for (int i = 1; i < grid.n_cells; ++i) {
    const double d = (cells[i] - cells[i - 1]) / grid.h;
    acc += d * d;
  }
  return std::sqrt(grid.h * acc);
}
}  // namespace

DiagnosticsRecord record(const LagrangianState& state, const InitialData& data,
                         const Params& params, const Grid& grid, const LagrangianState* prev,
                         double dt_prev, double apriori_sup) {
  if (state.eta_x.minCoeff() <= 0.0)
    throw std::domain_error("diagnostics::record: state has non-positive eta_x");
  const double h = grid.h;
  const Array mbar = lumped_mass(data.rho0);
  const bool nsf = params.flow_kind == FlowKind::Nsf;

  DiagnosticsRecord r;
  r.t = state.t;
  r.kinetic = 0.5 * h * (mbar * state.v.square()).sum();
  r.momentum = h * (mbar * state.v).sum();
  r.domain_size = h * state.eta_x.sum();
  r.etax_min = state.eta_x.minCoeff();
  r.etax_max = state.eta_x.maxCoeff();

  const Array vx = grad_node_to_cell(state.v, grid);
  r.h1_v = l2_cells(vx, h);
  r.linf_vx = vx.abs().maxCoeff();
  r.h2_eta = l2_interior_gradient(state.eta_x, grid);
  r.h2_v = l2_interior_gradient(vx, grid);

  const Array vt = prev ? Array((state.v - prev->v) / dt_prev) : data.v1;
  r.l2_vt = h * (mbar * vt.square()).sum();
  r.h1_vt = l2_cells(grad_node_to_cell(vt, grid), h);

  if (nsf) {
    r.thermal = h * (mbar * state.theta).sum();
    r.thermal_sq = h * (mbar * state.theta.square()).sum();
    r.h1_theta = l2_cells(grad_node_to_cell(state.theta, grid), h);
    const Array tht = prev ? Array((state.theta - prev->theta) / dt_prev) : data.theta1;
    r.l2_thetat = h * (mbar * tht.square()).sum();
    r.h1_thetat = l2_cells(grad_node_to_cell(tht, grid), h);
    r.apriori_nsf = apriori_sup;
    r.log_identity_residual = kNaN;
  } else {
    r.thermal = kNaN;
    r.thermal_sq = kNaN;
    r.h1_theta = kNaN;
    r.l2_thetat = kNaN;
    r.h1_thetat = kNaN;
    r.apriori_nsf = kNaN;
    r.log_identity_residual = params.flow_kind == FlowKind::Pressureless
                                  ? log_identity_residual(state, data, params, grid)
                                  : kNaN;
  }
  return r;
}

double log_identity_residual(const LagrangianState& state, const InitialData& data,
                             const Params& params, const Grid& grid) {
  const Array p_now = partial_momentum_cells(state.v, data.rho0, grid.h);
  const Array p_init = partial_momentum_cells(data.v0, data.rho0, grid.h);
  return (params.mu * state.eta_x.log() - p_now + p_init).abs().maxCoeff();
}

double etax_envelope(const InitialData& data, const Params& params, const Grid& grid) {
  const double mass = grid.h * lumped_mass(data.rho0).sum();
  const double energy = integrate_weighted(data.v0.square(), data.rho0, grid.h);
  return std::exp(2.0 * std::sqrt(mass) * std::sqrt(energy) / params.mu);
}

double terminal_domain(const InitialData& data, const Params& params, const Grid& grid) {
  const int n = grid.n_cells;
  // running integral of rho0 v0 at nodes (trapezoid in v on each cell)
  Array p(n + 1);
  p[0] = 0.0;
  for (int i = 0; i < n; ++i)
    p[i + 1] = p[i] + grid.h * data.rho0[i] * 0.5 * (data.v0[i] + data.v0[i + 1]);
  const Array g = (-p / params.mu).exp();
  return grid.h * (g.sum() - 0.5 * (g[0] + g[n]));
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                      double t_begin, double t_end) {
  if (t.size() != value.size())
    throw std::invalid_argument("fit_decay_rate: series length mismatch");
  double st = 0, sy = 0, stt = 0, sty = 0;
  long n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_begin || t[i] > t_end) continue;
    if (!(value[i] > 0.0))
      throw std::invalid_argument("fit_decay_rate: non-positive value in fit window");
    const double y = std::log(value[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_decay_rate: fewer than two samples in window");
  const double denom = n * stt - st * st;
  if (denom == 0.0) throw std::invalid_argument("fit_decay_rate: degenerate window");
  return -(n * sty - st * sy) / denom;
}

double poincare_constant(const Array& rho0, const Grid& grid) {
  const int n = grid.n_cells;
  const Array mbar = lumped_mass(rho0);
  const double mass = mbar.sum();

  auto deflate = [&](Array& u) { u -= (mbar * u).sum() / mass; };

  // Ku = -div(grad u), zero-flux; rows sum to zero. Solve K y = r with y[0]
  // pinned (reduced system is the one-end Dirichlet matrix); the dropped row
  // is satisfied automatically because sum(r) = 0.
  const double w = 1.0 / (grid.h * grid.h);
  auto stiffness_solve = [&](const Array& r) {
    Array sub = Array::Zero(n + 1), diag = Array::Zero(n + 1), super = Array::Zero(n + 1),
          rhs = Array::Zero(n + 1);
    diag[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
      sub[i] = -w;
      diag[i] = (i < n) ? 2.0 * w : w;
      if (i < n) super[i] = -w;
      rhs[i] = r[i];
    }
    return thomas_solve(sub, diag, super, rhs);
  };

  Array u = grid.nodes + 0.25 * grid.nodes.pow(3) + 0.1 * grid.nodes.square();
  deflate(u);
  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Array r = mbar * u;
    r -= mbar * (r.sum() / mass);  // enforce sum(r) = 0 exactly
    Array y = stiffness_solve(r);
    deflate(y);
    double vx_sq = 0.0;
    for (int c = 0; c < n; ++c) {
      const double d = (y[c + 1] - y[c]) / grid.h;
      vx_sq += d * d;
    }
    const double next = (mbar * y.square()).sum() / vx_sq;
    y /= std::sqrt((mbar * y.square()).sum());
    const bool converged = std::abs(next - lambda) <= 1e-13 * std::abs(next);
    lambda = next;
    u = y;
    if (converged && iter > 3) break;
  }
  return lambda;
}

NsfAprioriMonitor::NsfAprioriMonitor(int n_cells, double mu, double mach)
    : acc_(Array::Zero(n_cells)), inv_mu_m2_(1.0 / (mu * mach * mach)) {}

void NsfAprioriMonitor::accumulate(const Array& rho0, const Array& theta_cells, double dt) {
  acc_ += (dt * inv_mu_m2_) * rho0 * theta_cells;
  sup_ = acc_.maxCoeff();
}

NsfEnergySeries nsf_energy_functional(const std::vector<DiagnosticsRecord>& records,
                                      double frak_c1) {
  NsfEnergySeries out;
  if (records.empty()) throw std::invalid_argument("nsf_energy_functional: empty record series");
  auto instantaneous = [&](const DiagnosticsRecord& r) {
    if (std::isnan(r.l2_thetat) || std::isnan(r.thermal_sq))
      throw std::invalid_argument("nsf_energy_functional: record lacks temperature fields");
    return 2.0 * r.kinetic + r.l2_vt + r.thermal_sq + r.l2_thetat;
  };
  auto dissipation = [&](const DiagnosticsRecord& r) {
    return r.h1_v * r.h1_v + r.h1_vt * r.h1_vt + r.h1_theta * r.h1_theta +
           r.h1_thetat * r.h1_thetat;
  };

  out.e0 = instantaneous(records.front());
  double acc = 0.0;
  double prev_t = records.front().t;
  double prev_g = std::exp(frak_c1 * prev_t) * dissipation(records.front());
  for (const auto& r : records) {
    const double g = std::exp(frak_c1 * r.t) * dissipation(r);
    acc += 0.5 * (r.t - prev_t) * (g + prev_g);
    prev_t = r.t;
    prev_g = g;
    const double e = std::exp(frak_c1 * r.t) * instantaneous(r) + acc;
    out.t.push_back(r.t);
    out.value.push_back(e);
    out.sup = std::max(out.sup, e);
  }
  return out;
}

}  // namespace stickyflow
