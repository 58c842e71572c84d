#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace stickyflow {

using Array = Eigen::ArrayXd;

enum class FlowKind { Pressureless, Nsf, DegeneratePressureless };

const char* to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& name);

/// Physical parameters of a run. Which members are meaningful depends on
/// flow_kind: mu for the constant-viscosity flows, kappa and mach for the
/// heat-conductive flow, alpha for the density-dependent viscosity mu = rho^alpha.
struct Params {
  FlowKind flow_kind = FlowKind::Pressureless;
  double mu = 1.0;
  double kappa = 0.0;
  double mach = 0.0;
  double alpha = 0.0;

  void validate() const;  // throws std::invalid_argument

  bool operator==(const Params&) const = default;
};

/// Uniform staggered grid on the reference interval (-1,1).
/// Node i sits at -1 + i*h; cell i is the interval between nodes i and i+1,
/// represented by its midpoint. Velocities, the flow map and the temperature
/// live at nodes; the initial density and the stretch eta_x live at cells.
struct Grid {
  int n_cells = 0;
  double h = 0.0;
  Array nodes;  // n_cells + 1 entries, endpoints exactly -1 and 1
  Array cells;  // n_cells midpoints

  static Grid uniform(int n_cells);
  int n_nodes() const { return n_cells + 1; }
};

/// Analytic field profile on [-1,1], used to sample initial data.
struct Profile {
  enum class Kind { Zero, Constant, Poly, Gauss, Sine, Alpha };
  Kind kind = Kind::Zero;
  // Constant: {c}; Poly: {c0, c1, ...} coefficients in x;
  // Gauss: {amp, center, width[, offset]}; Sine: {amp, k} meaning amp*sin(k*pi*x);
  // Alpha: no arguments, evaluates the degenerate-viscosity density profile
  // for the run's alpha.
  std::vector<double> coeff;

  bool operator==(const Profile&) const = default;
};

double eval_profile(const Profile& p, double x, const Params& params);
Array sample_profile(const Profile& p, const Array& x, const Params& params);

/// Density profile solving x*rho0 = -(1/alpha) d/dx rho0^alpha.
/// Compactly supported on (-1,1) for alpha > 1; for alpha <= 1 the profile is
/// positive on all of R and is truncated to the reference interval here.
double alpha_profile(double x, double alpha);

/// Description of the initial data as named profiles.
struct InitialSpec {
  Profile rho0;
  Profile v0;
  std::optional<Profile> theta0;  // required for Nsf
  bool normalize = true;          // subtract the mean momentum from v0

  bool operator==(const InitialSpec&) const = default;
};

/// Sampled initial data on the staggered grid, plus the initial time
/// derivatives v1 = v_t(0) and (for Nsf) theta1 = Theta_t(0) obtained by
/// evaluating the evolution equations at t = 0.
struct InitialData {
  Array rho0;    // cells, strictly positive
  Array v0;      // nodes
  Array theta0;  // nodes (empty unless Nsf)
  Array v1;      // nodes
  Array theta1;  // nodes (empty unless Nsf)
};

struct LagrangianState {
  double t = 0.0;
  Array eta;    // nodes, strictly increasing
  Array eta_x;  // cells, strictly positive; always grad_node_to_cell(eta)
  Array v;      // nodes
  Array theta;  // nodes (empty unless Nsf)
};

struct EulerianSample {
  double y = 0.0;        // physical position eta(x,t)
  double rho = 0.0;      // rho0(x)/eta_x(x,t)
  double u = 0.0;        // velocity
  double theta_e = 0.0;  // temperature (0 for flows without one)
  double a = 0.0;        // left endpoint eta(-1,t)
  double b = 0.0;        // right endpoint eta(1,t)
};

InitialData build_initial_data(const InitialSpec& spec, const Grid& grid, const Params& params);

/// Shifts v0 by the weighted mean so that the discrete momentum of the output
/// vanishes to round-off. Idempotent. Throws on zero total mass.
InitialData normalize_momentum(InitialData data, const Grid& grid);

/// Fills data.v1 (and data.theta1 for Nsf) from the evolution equations at
/// t = 0, where eta_x == 1.
void initial_time_derivatives(InitialData& data, const Params& params, const Grid& grid);

LagrangianState initial_state(const InitialData& data, const Grid& grid, const Params& params);

EulerianSample eulerian_reconstruct(const LagrangianState& state, const InitialData& data,
                                    const Grid& grid, double x);

// Staggering-consistent quadrature helpers.

/// Node-lumped mass: average of the two adjacent cell densities, half a cell
/// at the boundaries. h * (lumped_mass(rho0) * f).sum() is the discrete
/// integral of rho0 * f.
Array lumped_mass(const Array& rho0_cells);

/// Discrete integral of rho0 * f for a node field f.
double integrate_weighted(const Array& node_field, const Array& rho0_cells, double h);

/// Running integral of rho0 * v from -1 up to the midpoint of each cell.
/// Lumped-node partial sums; cumulative trapezoid plus a midpoint half-cell.
Array partial_momentum_cells(const Array& v_nodes, const Array& rho0_cells, double h);

}  // namespace stickyflow
