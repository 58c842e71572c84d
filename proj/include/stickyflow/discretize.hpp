#pragma once

#include "stickyflow/model.hpp"

namespace stickyflow {

/// Forward difference of a node field to cell midpoints: (f_{i+1} - f_i)/h.
/// Exact derivative at the midpoint for linear and quadratic fields.
Array grad_node_to_cell(const Array& field, const Grid& grid);

/// Divergence of a cell flux at nodes: interior (flux_i - flux_{i-1})/h,
/// boundary nodes use the supplied flux values in place of the missing cell
/// (zero for the stress-free condition). Telescoping gives
/// h * sum(div) == right_bc - left_bc exactly.
Array div_cell_to_node(const Array& flux, const Grid& grid, double left_bc, double right_bc);

/// Arithmetic average of a node field onto cell midpoints.
Array node_to_cell_avg(const Array& field);

/// Distributes a cell-density source onto nodes so that
/// h * sum(nodes) == h * sum(cells) exactly. With dirichlet_ends the shares
/// that would land on the pinned boundary nodes are re-routed to the first
/// interior node on each side (those rows are replaced by boundary
/// conditions and would otherwise drop their share from the budget).
Array cell_source_to_nodes(const Array& cells, const Grid& grid, bool dirichlet_ends);

/// Tridiagonal system over nodes. sub[i] multiplies x[i-1], super[i]
/// multiplies x[i+1]; sub[0] and super[n] are ignored.
struct TridiagonalSystem {
  Array sub, diag, super, rhs;
};

/// Thomas algorithm, no pivoting. Assembled systems here are strictly
/// diagonally dominant with positive diagonal.
template <typename Derived>
Eigen::ArrayXd thomas_solve(const Eigen::ArrayBase<Derived>& sub,
                            const Eigen::ArrayBase<Derived>& diag,
                            const Eigen::ArrayBase<Derived>& super,
                            const Eigen::ArrayBase<Derived>& rhs) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = diag.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> c(n), d(n);
  c[0] = super[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar denom = diag[i] - sub[i] * c[i - 1];
    c[i] = super[i] / denom;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
  }
  Eigen::Array<Scalar, Eigen::Dynamic, 1> x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

Array solve(const TridiagonalSystem& sys);

/// Backward-Euler system for rho0 v_t = (mu v_x / eta_x)_x with prescribed
/// boundary fluxes (zero for stress-free):
///   (mbar/dt) v - div(mu grad(v)/eta_x) = (mbar/dt) v_old + source.
/// mu_cells may vary per cell (degenerate viscosity). The system is symmetric
/// positive definite and its flux part annihilates constants, so constants
/// are preserved and the lumped momentum is conserved for zero boundary flux.
TridiagonalSystem assemble_viscous_system(const Array& eta_x, const Array& rho0, double dt,
                                          const Array& mu_cells, const Array& v_old,
                                          const Grid& grid, const Array* source = nullptr,
                                          double left_flux = 0.0, double right_flux = 0.0);

TridiagonalSystem assemble_viscous_system(const Array& eta_x, const Array& rho0, double dt,
                                          double mu, const Array& v_old, const Grid& grid,
                                          const Array* source = nullptr, double left_flux = 0.0,
                                          double right_flux = 0.0);

/// Backward-Euler system for rho0 Theta_t = (kappa Theta_x / eta_x)_x + source
/// with homogeneous Dirichlet rows at both endpoints.
TridiagonalSystem assemble_heat_system(const Array& eta_x, const Array& rho0, double dt,
                                       double kappa, const Array& theta_old, const Grid& grid,
                                       const Array& source);

}  // namespace stickyflow
