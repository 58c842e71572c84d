#include "stickyflow/discretize.hpp"

#include <stdexcept>
#include <string>

namespace stickyflow {

namespace {
void expect_size(const Array& a, Eigen::Index n, const char* what) {
  if (a.size() != n)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " entries, got " + std::to_string(a.size()));
}
}  // namespace

Array grad_node_to_cell(const Array& field, const Grid& grid) {
  expect_size(field, grid.n_nodes(), "grad_node_to_cell");
  return (field.tail(grid.n_cells) - field.head(grid.n_cells)) / grid.h;
}

Array div_cell_to_node(const Array& flux, const Grid& grid, double left_bc, double right_bc) {
  expect_size(flux, grid.n_cells, "div_cell_to_node");
  const int n = grid.n_cells;
  Array out(n + 1);
  out[0] = (flux[0] - left_bc) / grid.h;
  for (int i = 1; i < n; ++i) out[i] = (flux[i] - flux[i - 1]) / grid.h;
  out[n] = (right_bc - flux[n - 1]) / grid.h;
  return out;
}

Array node_to_cell_avg(const Array& field) {
  const Eigen::Index n = field.size() - 1;
  return 0.5 * (field.head(n) + field.tail(n));
}

Array cell_source_to_nodes(const Array& cells, const Grid& grid, bool dirichlet_ends) {
  expect_size(cells, grid.n_cells, "cell_source_to_nodes");
  const int n = grid.n_cells;
  Array out(n + 1);
  out[0] = 0.5 * cells[0];
  for (int i = 1; i < n; ++i) out[i] = 0.5 * (cells[i - 1] + cells[i]);
  out[n] = 0.5 * cells[n - 1];
  if (dirichlet_ends) {
    out[1] += out[0];
    out[n - 1] += out[n];
    out[0] = 0.0;
    out[n] = 0.0;
  }
  return out;
}

Array solve(const TridiagonalSystem& sys) {
  return thomas_solve(sys.sub, sys.diag, sys.super, sys.rhs);
}

TridiagonalSystem assemble_viscous_system(const Array& eta_x, const Array& rho0, double dt,
                                          const Array& mu_cells, const Array& v_old,
                                          const Grid& grid, const Array* source,
                                          double left_flux, double right_flux) {
  const int n = grid.n_cells;
  expect_size(eta_x, n, "assemble_viscous_system: eta_x");
  expect_size(mu_cells, n, "assemble_viscous_system: mu");
  expect_size(v_old, n + 1, "assemble_viscous_system: v_old");
  if (!(dt > 0)) throw std::invalid_argument("assemble_viscous_system: dt must be > 0");
  if (eta_x.minCoeff() <= 0.0)
    throw std::invalid_argument("assemble_viscous_system: eta_x must be positive");

  const Array mbar = lumped_mass(rho0);
  const Array w = mu_cells / (grid.h * grid.h * eta_x);  // per-cell flux coefficient

  TridiagonalSystem sys;
  sys.sub = Array::Zero(n + 1);
  sys.diag = Array::Zero(n + 1);
  sys.super = Array::Zero(n + 1);
  sys.rhs = Array::Zero(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double wl = i > 0 ? w[i - 1] : 0.0;
    const double wr = i < n ? w[i] : 0.0;
    sys.diag[i] = mbar[i] / dt + wl + wr;
    if (i > 0) sys.sub[i] = -wl;
    if (i < n) sys.super[i] = -wr;
    sys.rhs[i] = mbar[i] / dt * v_old[i];
  }
  if (source) sys.rhs += *source;
  sys.rhs[0] -= left_flux / grid.h;
  sys.rhs[n] += right_flux / grid.h;
  return sys;
}

TridiagonalSystem assemble_viscous_system(const Array& eta_x, const Array& rho0, double dt,
                                          double mu, const Array& v_old, const Grid& grid,
                                          const Array* source, double left_flux,
                                          double right_flux) {
  return assemble_viscous_system(eta_x, rho0, dt, Array::Constant(grid.n_cells, mu), v_old, grid,
                                 source, left_flux, right_flux);
}

TridiagonalSystem assemble_heat_system(const Array& eta_x, const Array& rho0, double dt,
                                       double kappa, const Array& theta_old, const Grid& grid,
                                       const Array& source) {
  const int n = grid.n_cells;
  expect_size(eta_x, n, "assemble_heat_system: eta_x");
  expect_size(theta_old, n + 1, "assemble_heat_system: theta_old");
  expect_size(source, n + 1, "assemble_heat_system: source");
  if (!(dt > 0)) throw std::invalid_argument("assemble_heat_system: dt must be > 0");

  const Array mbar = lumped_mass(rho0);
  const Array w = kappa / (grid.h * grid.h * eta_x);

  TridiagonalSystem sys;
  sys.sub = Array::Zero(n + 1);
  sys.diag = Array::Zero(n + 1);
  sys.super = Array::Zero(n + 1);
  sys.rhs = Array::Zero(n + 1);
  sys.diag[0] = 1.0;  // Dirichlet rows
  sys.diag[n] = 1.0;
  for (int i = 1; i < n; ++i) {
    sys.sub[i] = -w[i - 1];
    sys.diag[i] = mbar[i] / dt + w[i - 1] + w[i];
    sys.super[i] = -w[i];
    sys.rhs[i] = mbar[i] / dt * theta_old[i] + source[i];
  }
  return sys;
}

}  // namespace stickyflow
