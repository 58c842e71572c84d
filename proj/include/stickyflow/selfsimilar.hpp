#pragma once

#include "stickyflow/model.hpp"

#include <vector>

namespace stickyflow {

enum class EnergyClass { LargeEnergy, SmallEnergy };

/// Self-similar scaling solution eta = sigma(t) x of the degenerate-viscosity
/// pressureless flow. sigma solves sigma' = sigma^{-alpha} + Gamma with
/// Gamma = sigma'(0) - sigma(0)^{-alpha}; the sign of Gamma separates
/// unbounded expansion from convergence to a finite domain.
struct SelfSimilarSolution {
  double alpha = 1.0;
  double sigma0 = 1.0;
  double dsigma0 = 0.0;
  double gamma = 0.0;
  EnergyClass classification = EnergyClass::LargeEnergy;
  double limit = 0.0;  // (-Gamma)^{-1/alpha} for SmallEnergy, +inf otherwise
  bool collapsed = false;

  std::vector<double> t, sigma, dsigma;

  double sigma_at(double time) const;   // cubic Hermite on the stored samples
  double dsigma_at(double time) const;  // linear interpolation
};

double gamma_parameter(double sigma0, double dsigma0, double alpha);

std::pair<EnergyClass, double> classify(double gamma, double alpha);

/// Integrates sigma' = sigma^{-alpha} + Gamma with an embedded adaptive
/// Dormand-Prince 5(4) pair to local tolerance tol (absolute and relative).
/// Stops with collapsed = true if sigma falls below sigma_floor (numerical
/// overshoot guard; the exact solution stays positive).
SelfSimilarSolution integrate_sigma(double alpha, double sigma0, double dsigma0, double t_end,
                                    double tol = 1e-10, double sigma_floor = 1e-8);

/// Lagrangian state eta = sigma(t) x, v = sigma'(t) x. Rejects initial data
/// whose density does not satisfy the defining profile ODE for solution.alpha.
LagrangianState selfsimilar_state(const SelfSimilarSolution& solution, double t, const Grid& grid,
                                  const InitialData& data);

/// sup over interior nodes of |x rho0 + (1/alpha) d/dx rho0^alpha| under
/// discrete differentiation of the cell samples. O(h^2) for a matching
/// profile, O(1) otherwise.
double alpha_profile_ode_residual(const Array& rho0_cells, const Grid& grid, double alpha);

}  // namespace stickyflow
