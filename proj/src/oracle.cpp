#include "stickyflow/oracle.hpp"

#include "stickyflow/discretize.hpp"
#include "stickyflow/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace stickyflow {
namespace oracle {

namespace {
double simpson_value(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < n; i += 2) odd += f(a + i * h);
  for (int i = 2; i < n; i += 2) even += f(a + i * h);
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}
}  // namespace

QuadratureResult quadrature(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("quadrature: n must be >= 2");
  n = ((n + 3) / 4) * 4;  // multiple of 4 so the half-resolution rule is valid
  QuadratureResult out;
  out.value = simpson_value(f, a, b, n);
  out.error_estimate = std::abs(out.value - simpson_value(f, a, b, n / 2)) / 15.0;
  return out;
}

double quadrature(const Array& samples, double a, double b) {
  const Eigen::Index n = samples.size() - 1;
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("quadrature: sample count must be odd and >= 3");
  const double h = (b - a) / n;
  double odd = 0.0, even = 0.0;
  for (Eigen::Index i = 1; i < n; i += 2) odd += samples[i];
  for (Eigen::Index i = 2; i < n; i += 2) even += samples[i];
  return h / 3.0 * (samples[0] + 4.0 * odd + 2.0 * even + samples[n]);
}

double terminal_domain(const std::function<double(double)>& rho0,
                       const std::function<double(double)>& v0, double mu, int n) {
  n = ((n + 3) / 4) * 4;
  const double h = 2.0 / n;
  Array f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + i * h;
    f[i] = rho0(x) * v0(x);
  }
  // cumulative integral of rho0 v0, fourth order: Simpson panels plus the
  // cubic half-panel rule for odd nodes
  Array p(n + 1);
  p[0] = 0.0;
  for (int i = 0; i + 2 <= n; i += 2) {
    p[i + 1] = p[i] + h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
    p[i + 2] = p[i] + h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  }
  Array g = (-p / mu).exp();
  return quadrature(g, -1.0, 1.0);
}

namespace {

// Exact family for the manufactured runs:
//   v(x,t)     = e^{-t} cos(pi x / 2)
//   eta(x,t)   = x + (1 - e^{-t}) cos(pi x / 2)
//   Theta(x,t) = e^{-t} sin(pi (x+1) / 2)
// The velocity is not stress-free, so the exact viscous boundary fluxes are
// injected; the temperature vanishes at the endpoints, matching the Dirichlet
// rows exactly. eta_x stays positive for t <= ~1.
struct ExactFamily {
  double mu, kappa, inv_m2;

  static constexpr double q = M_PI / 2.0;

  static double v(double x, double t) { return std::exp(-t) * std::cos(q * x); }
  static double theta(double x, double t) { return std::exp(-t) * std::sin(q * (x + 1.0)); }
  static double eta_x(double x, double t) {
    return 1.0 - q * (1.0 - std::exp(-t)) * std::sin(q * x);
  }

  double momentum_force(double x, double t, bool with_pressure) const {
    const double E = std::exp(-t);
    const double c = std::cos(q * x), s = std::sin(q * x);
    const double vx = -q * E * s, vxx = -q * q * E * c, vt = -E * c;
    const double ex = 1.0 - q * (1.0 - E) * s, exx = -q * q * (1.0 - E) * c;
    double force = vt - mu * (vxx * ex - vx * exx) / (ex * ex);
    if (with_pressure) {
      const double th = E * c, thx = -q * E * s;  // sin(q(x+1)) == cos(qx)
      force += inv_m2 * (thx * ex - th * exx) / (ex * ex);
    }
    return force;
  }

  double heat_force(double x, double t) const {
    const double E = std::exp(-t);
    const double c = std::cos(q * x), s = std::sin(q * x);
    const double vx = -q * E * s;
    const double th = E * c, thx = -q * E * s, thxx = -q * q * E * c, tht = -E * c;
    const double ex = 1.0 - q * (1.0 - E) * s, exx = -q * q * (1.0 - E) * c;
    return tht + inv_m2 * th * vx / ex - kappa * (thxx * ex - thx * exx) / (ex * ex) -
           mu * vx * vx / ex;
  }

  double stress_left(double t) const {
    const double E = std::exp(-t);
    return mu * q * E / (1.0 + q * (1.0 - E));
  }
  double stress_right(double t) const {
    const double E = std::exp(-t);
    return -mu * q * E / (1.0 - q * (1.0 - E));
  }
};

}  // namespace

MmsErrors manufactured_residual(FlowKind scheme, int n_cells, double dt, double t_end,
                                const Params& params) {
  if (scheme == FlowKind::DegeneratePressureless)
    throw std::invalid_argument("manufactured_residual: pressureless or nsf only");
  const bool nsf = scheme == FlowKind::Nsf;
  const Grid grid = Grid::uniform(n_cells);

  ExactFamily ex{params.mu, params.kappa,
                 nsf ? 1.0 / (params.mach * params.mach) : 0.0};

  InitialData data;
  data.rho0 = Array::Ones(n_cells);
  data.v0 = Array(grid.n_nodes());
  for (int i = 0; i <= n_cells; ++i) data.v0[i] = ExactFamily::v(grid.nodes[i], 0.0);
  data.v1 = Array::Zero(grid.n_nodes());
  if (nsf) {
    data.theta0 = Array(grid.n_nodes());
    for (int i = 0; i <= n_cells; ++i) data.theta0[i] = ExactFamily::theta(grid.nodes[i], 0.0);
    data.theta1 = Array::Zero(grid.n_nodes());
  }

  Forcing forcing;
  forcing.momentum = [&ex, nsf](double x, double t) { return ex.momentum_force(x, t, nsf); };
  forcing.stress_left = [&ex](double t) { return ex.stress_left(t); };
  forcing.stress_right = [&ex](double t) { return ex.stress_right(t); };
  if (nsf) forcing.heat = [&ex](double x, double t) { return ex.heat_force(x, t); };

  LagrangianState state = initial_state(data, grid, params);
  const long steps = std::lround(t_end / dt);
  const double dt_exact = t_end / steps;
  for (long k = 0; k < steps; ++k) {
    StepResult res = nsf ? step_nsf(state, data, params, grid, dt_exact, &forcing)
                         : step_pressureless(state, data, params, grid, dt_exact, &forcing);
    if (res.status != StepStatus::Accepted)
      throw std::runtime_error("manufactured_residual: step rejected");
    state = std::move(res.state);
  }

  MmsErrors err;
  double l2v = 0.0, l2t = 0.0;
  for (int i = 0; i <= n_cells; ++i) {
    const double w = (i == 0 || i == n_cells) ? 0.5 : 1.0;
    const double dv = state.v[i] - ExactFamily::v(grid.nodes[i], state.t);
    l2v += w * dv * dv;
    err.linf_v = std::max(err.linf_v, std::abs(dv));
    if (nsf) {
      const double dth = state.theta[i] - ExactFamily::theta(grid.nodes[i], state.t);
      l2t += w * dth * dth;
      err.linf_theta = std::max(err.linf_theta, std::abs(dth));
    }
  }
  err.l2_v = std::sqrt(grid.h * l2v);
  err.l2_theta = std::sqrt(grid.h * l2t);
  return err;
}

}  // namespace oracle
}  // namespace stickyflow
