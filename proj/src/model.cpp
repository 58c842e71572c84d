#include "stickyflow/model.hpp"

#include "stickyflow/discretize.hpp"

#include <cmath>
#include <stdexcept>

namespace stickyflow {

const char* to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::Pressureless: return "pressureless";
    case FlowKind::Nsf: return "nsf";
    case FlowKind::DegeneratePressureless: return "degenerate";
  }
  return "?";
}

FlowKind flow_kind_from_string(const std::string& name) {
  if (name == "pressureless") return FlowKind::Pressureless;
  if (name == "nsf") return FlowKind::Nsf;
  if (name == "degenerate") return FlowKind::DegeneratePressureless;
  throw std::invalid_argument("unknown flow kind '" + name + "'");
}

void Params::validate() const {
  switch (flow_kind) {
    case FlowKind::Pressureless:
      if (!(mu > 0)) throw std::invalid_argument("params.mu must be > 0");
      break;
    case FlowKind::Nsf:
      if (!(mu > 0)) throw std::invalid_argument("params.mu must be > 0");
      if (!(kappa > 0)) throw std::invalid_argument("params.kappa must be > 0 for flow=nsf");
      if (!(mach >= 1)) throw std::invalid_argument("params.mach must be >= 1 for flow=nsf");
      break;
    case FlowKind::DegeneratePressureless:
      if (!(alpha > 0)) throw std::invalid_argument("params.alpha must be > 0 for flow=degenerate");
      break;
  }
}

Grid Grid::uniform(int n_cells) {
  if (n_cells < 2) throw std::invalid_argument("grid.n_cells must be >= 2");
  Grid g;
  g.n_cells = n_cells;
  g.h = 2.0 / n_cells;
  g.nodes = Array::LinSpaced(n_cells + 1, -1.0, 1.0);
  g.nodes[0] = -1.0;
  g.nodes[n_cells] = 1.0;
  g.cells = Array(n_cells);
  for (int i = 0; i < n_cells; ++i) g.cells[i] = -1.0 + (i + 0.5) * g.h;
  return g;
}

double alpha_profile(double x, double alpha) {
  if (alpha > 1.0) {
    const double base = (alpha - 1.0) * (1.0 - x * x) / 2.0;
    return base <= 0.0 ? 0.0 : std::pow(base, 1.0 / (alpha - 1.0));
  }
  if (alpha == 1.0) return std::exp(-x * x / 2.0);
  // 0 < alpha < 1, rho0(0) = 1, truncated to the reference interval
  return std::pow(1.0 + (1.0 - alpha) * x * x / 2.0, -1.0 / (1.0 - alpha));
}

double eval_profile(const Profile& p, double x, const Params& params) {
  switch (p.kind) {
    case Profile::Kind::Zero:
      return 0.0;
    case Profile::Kind::Constant:
      return p.coeff.empty() ? 1.0 : p.coeff[0];
    case Profile::Kind::Poly: {
      double acc = 0.0;
      for (auto it = p.coeff.rbegin(); it != p.coeff.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Profile::Kind::Gauss: {
      if (p.coeff.size() < 3) throw std::invalid_argument("gauss profile needs amp,center,width");
      const double amp = p.coeff[0], center = p.coeff[1], width = p.coeff[2];
      const double offset = p.coeff.size() > 3 ? p.coeff[3] : 0.0;
      const double z = (x - center) / width;
      return offset + amp * std::exp(-0.5 * z * z);
    }
    case Profile::Kind::Sine: {
      if (p.coeff.size() < 2) throw std::invalid_argument("sine profile needs amp,k");
      return p.coeff[0] * std::sin(p.coeff[1] * M_PI * x);
    }
    case Profile::Kind::Alpha:
      if (!(params.alpha > 0)) throw std::invalid_argument("alpha profile requires params.alpha > 0");
      return alpha_profile(x, params.alpha);
  }
  return 0.0;
}

Array sample_profile(const Profile& p, const Array& x, const Params& params) {
  Array out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = eval_profile(p, x[i], params);
  return out;
}

Array lumped_mass(const Array& rho0_cells) {
  const Eigen::Index n = rho0_cells.size();
  Array m(n + 1);
  // Boundary nodes own half a cell; their mass is the half-cell value sampled
  // at the half-cell centroid (linear extrapolation from the two adjacent
  // cells, clamped positive). For constant density this equals rho0/2; for a
  // density vanishing linearly at the boundary it is the exact half-cell
  // average, which the cell-midpoint value would overestimate by 2.
  m[0] = std::max(0.125 * (5.0 * rho0_cells[0] - rho0_cells[1]), 0.125 * rho0_cells[0]);
  for (Eigen::Index i = 1; i < n; ++i) m[i] = 0.5 * (rho0_cells[i - 1] + rho0_cells[i]);
  m[n] = std::max(0.125 * (5.0 * rho0_cells[n - 1] - rho0_cells[n - 2]),
                  0.125 * rho0_cells[n - 1]);
  return m;
}

double integrate_weighted(const Array& node_field, const Array& rho0_cells, double h) {
  return h * (lumped_mass(rho0_cells) * node_field).sum();
}

Array partial_momentum_cells(const Array& v_nodes, const Array& rho0_cells, double h) {
  const Eigen::Index n = rho0_cells.size();
  const Array m = lumped_mass(rho0_cells);
  Array p(n);
  double acc = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    acc += h * m[c] * v_nodes[c];
    p[c] = acc;
  }
  return p;
}

InitialData build_initial_data(const InitialSpec& spec, const Grid& grid, const Params& params) {
  InitialData data;
  data.rho0 = sample_profile(spec.rho0, grid.cells, params);
  for (int i = 0; i < grid.n_cells; ++i) {
    if (!(data.rho0[i] > 0.0))
      throw std::invalid_argument("rho0 profile non-positive at cell " + std::to_string(i) +
                                  " (x = " + std::to_string(grid.cells[i]) + ")");
  }
  data.v0 = sample_profile(spec.v0, grid.nodes, params);

  if (params.flow_kind == FlowKind::Nsf) {
    if (!spec.theta0) throw std::invalid_argument("flow=nsf requires a theta0 profile");
    data.theta0 = sample_profile(*spec.theta0, grid.nodes, params);
    double theta_max = data.theta0.maxCoeff();
    for (int i = 0; i <= grid.n_cells; ++i) {
      if (data.theta0[i] < 0.0)
        throw std::invalid_argument("theta0 negative at node " + std::to_string(i));
    }
    const double end_tol = 1e-12 * std::max(1.0, theta_max);
    if (std::abs(data.theta0[0]) > end_tol || std::abs(data.theta0[grid.n_cells]) > end_tol)
      throw std::invalid_argument("theta0 must vanish at x = -1 and x = 1 for flow=nsf");
    data.theta0[0] = 0.0;
    data.theta0[grid.n_cells] = 0.0;
  }

  if (spec.normalize) data = normalize_momentum(std::move(data), grid);
  initial_time_derivatives(data, params, grid);
  return data;
}

InitialData normalize_momentum(InitialData data, const Grid& grid) {
  const double mass = grid.h * lumped_mass(data.rho0).sum();
  if (!(mass > 0.0)) throw std::invalid_argument("normalize_momentum: total mass is zero");
  const double mom = integrate_weighted(data.v0, data.rho0, grid.h);
  data.v0 -= mom / mass;
  return data;
}

void initial_time_derivatives(InitialData& data, const Params& params, const Grid& grid) {
  const Array mbar = lumped_mass(data.rho0);
  if (mbar.minCoeff() <= 0.0)
    throw std::invalid_argument("initial_time_derivatives: vanishing density");
  const Array v0x = grad_node_to_cell(data.v0, grid);

  Array mu_cells;
  if (params.flow_kind == FlowKind::DegeneratePressureless)
    mu_cells = data.rho0.pow(params.alpha);  // eta_x == 1 at t = 0
  else
    mu_cells = Array::Constant(grid.n_cells, params.mu);

  Array rhs = div_cell_to_node(mu_cells * v0x, grid, 0.0, 0.0);
  if (params.flow_kind == FlowKind::Nsf) {
    const double inv_m2 = 1.0 / (params.mach * params.mach);
    const Array pc = inv_m2 * data.rho0 * node_to_cell_avg(data.theta0);
    rhs -= div_cell_to_node(pc, grid, 0.0, 0.0);  // Theta vanishes at the endpoints
  }
  data.v1 = rhs / mbar;

  if (params.flow_kind == FlowKind::Nsf) {
    const double inv_m2 = 1.0 / (params.mach * params.mach);
    const Array th_x = grad_node_to_cell(data.theta0, grid);
    data.theta1 = Array::Zero(grid.n_nodes());
    // interior nodes only; Theta_t = 0 at the Dirichlet endpoints
    for (int i = 1; i < grid.n_cells; ++i) {
      const double diff = params.kappa * (th_x[i] - th_x[i - 1]) / grid.h;
      const double vx_node = 0.5 * (v0x[i - 1] + v0x[i]);
      const double vx_sq_node = 0.5 * (v0x[i - 1] * v0x[i - 1] + v0x[i] * v0x[i]);
      const double heating = params.mu * vx_sq_node;
      const double compression = inv_m2 * mbar[i] * data.theta0[i] * vx_node;
      data.theta1[i] = (diff + heating - compression) / mbar[i];
    }
  } else {
    data.theta1 = Array();
  }
}

LagrangianState initial_state(const InitialData& data, const Grid& grid, const Params& params) {
  LagrangianState s;
  s.t = 0.0;
  s.eta = grid.nodes;
  s.eta_x = Array::Ones(grid.n_cells);
  s.v = data.v0;
  if (params.flow_kind == FlowKind::Nsf) s.theta = data.theta0;
  return s;
}

EulerianSample eulerian_reconstruct(const LagrangianState& state, const InitialData& data,
                                    const Grid& grid, double x) {
  if (x < -1.0 || x > 1.0)
    throw std::invalid_argument("eulerian_reconstruct: x outside [-1,1]");
  const int n = grid.n_cells;
  int c = static_cast<int>((x + 1.0) / grid.h);
  if (c >= n) c = n - 1;
  if (state.eta_x[c] <= 0.0)
    throw std::domain_error("eulerian_reconstruct: eta_x <= 0 at cell " + std::to_string(c));
  const double lam = (x - grid.nodes[c]) / grid.h;

  // rho0 interpolated linearly between cell midpoints, clamped at the ends
  double rho0x;
  const double pos = (x + 1.0) / grid.h - 0.5;
  if (pos <= 0.0)
    rho0x = data.rho0[0];
  else if (pos >= n - 1)
    rho0x = data.rho0[n - 1];
  else {
    const int j = static_cast<int>(pos);
    const double w = pos - j;
    rho0x = (1.0 - w) * data.rho0[j] + w * data.rho0[j + 1];
  }

  EulerianSample out;
  out.y = (1.0 - lam) * state.eta[c] + lam * state.eta[c + 1];
  out.u = (1.0 - lam) * state.v[c] + lam * state.v[c + 1];
  out.rho = rho0x / state.eta_x[c];
  out.theta_e = state.theta.size() > 0
                    ? (1.0 - lam) * state.theta[c] + lam * state.theta[c + 1]
                    : 0.0;
  out.a = state.eta[0];
  out.b = state.eta[n];
  return out;
}

}  // namespace stickyflow
