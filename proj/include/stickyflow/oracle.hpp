#pragma once

#include "stickyflow/model.hpp"

#include <functional>

namespace stickyflow {
namespace oracle {

// Reference computations kept independent of the solver path: Simpson
// quadrature here against trapezoid/midpoint composites there, so agreement
// between the two is evidence rather than tautology.

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // Richardson estimate |S(n) - S(n/2)| / 15
};

QuadratureResult quadrature(const std::function<double(double)>& f, double a, double b, int n);
double quadrature(const Array& samples, double a, double b);  // odd sample count

/// Terminal domain formula evaluated on analytic profiles with Simpson
/// quadrature and an analytically accumulated inner integral on a fine grid.
double terminal_domain(const std::function<double(double)>& rho0,
                       const std::function<double(double)>& v0, double mu, int n = 20000);

struct MmsErrors {
  double l2_v = 0.0;
  double linf_v = 0.0;
  double l2_theta = 0.0;
  double linf_theta = 0.0;
};

/// Runs the configured stepper at fixed dt against a smooth exact family with
/// analytically injected forcing and exact boundary fluxes, and returns the
/// final-time errors. scheme is Pressureless or Nsf.
MmsErrors manufactured_residual(FlowKind scheme, int n_cells, double dt, double t_end,
                                const Params& params);

}  // namespace oracle
}  // namespace stickyflow
