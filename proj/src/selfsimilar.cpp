#include "stickyflow/selfsimilar.hpp"

#include "stickyflow/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stickyflow {

double gamma_parameter(double sigma0, double dsigma0, double alpha) {
  if (!(sigma0 > 0)) throw std::invalid_argument("gamma_parameter: sigma0 must be > 0");
  return dsigma0 - std::pow(sigma0, -alpha);
}

std::pair<EnergyClass, double> classify(double gamma, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("classify: alpha must be > 0");
  if (gamma >= 0.0)
    return {EnergyClass::LargeEnergy, std::numeric_limits<double>::infinity()};
  return {EnergyClass::SmallEnergy, std::pow(-gamma, -1.0 / alpha)};
}

namespace {
// Dormand-Prince 5(4) for the scalar autonomous ODE sigma' = f(sigma).
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
}  // namespace

SelfSimilarSolution integrate_sigma(double alpha, double sigma0, double dsigma0, double t_end,
                                    double tol, double sigma_floor) {
  if (!(sigma0 > 0)) throw std::invalid_argument("integrate_sigma: sigma0 must be > 0");
  if (!(alpha > 0)) throw std::invalid_argument("integrate_sigma: alpha must be > 0");
  if (!(tol > 0)) throw std::invalid_argument("integrate_sigma: tol must be > 0");

  SelfSimilarSolution sol;
  sol.alpha = alpha;
  sol.sigma0 = sigma0;
  sol.dsigma0 = dsigma0;
  sol.gamma = gamma_parameter(sigma0, dsigma0, alpha);
  std::tie(sol.classification, sol.limit) = classify(sol.gamma, alpha);

  const double gamma = sol.gamma;
  auto f = [alpha, gamma](double s) { return std::pow(s, -alpha) + gamma; };

  double t = 0.0, y = sigma0;
  sol.t.push_back(0.0);
  sol.sigma.push_back(y);
  sol.dsigma.push_back(f(y));

  const double h_max = std::max(1e-2, t_end / 20000.0);
  const double h_min = 1e-14 * std::max(1.0, t_end);
  double h = std::min(h_max, std::max(h_min, 1e-4));
  double k1 = f(y);

  while (t < t_end) {
    h = std::min(h, t_end - t);
    const double k2 = f(y + h * kA21 * k1);
    const double k3 = f(y + h * (kA31 * k1 + kA32 * k2));
    const double k4 = f(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const double k5 = f(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const double k6 = f(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const double y_new = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const double k7 = f(y_new);
    const double err_raw =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    const double scale = tol + tol * std::max(std::abs(y), std::abs(y_new));
    const double err = std::abs(err_raw) / scale;

    if (!std::isfinite(err)) {  // a stage left the positive half-line
      h *= 0.2;
      if (h < h_min) throw std::runtime_error("integrate_sigma: step size underflow");
      continue;
    }
    if (err <= 1.0) {
      t += h;
      y = y_new;
      k1 = k7;
      sol.t.push_back(t);
      sol.sigma.push_back(y);
      sol.dsigma.push_back(k7);
      if (y <= sigma_floor) {
        sol.collapsed = true;
        break;
      }
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::min(h, h_max);
    if (h < h_min) throw std::runtime_error("integrate_sigma: tolerance not met at minimal step");
  }
  return sol;
}

double SelfSimilarSolution::sigma_at(double time) const {
  if (t.empty()) throw std::logic_error("sigma_at: empty solution");
  if (time <= t.front()) return sigma.front();
  if (time >= t.back()) {
    if (time > t.back() + 1e-9 * std::max(1.0, t.back()))
      throw std::invalid_argument("sigma_at: time beyond the integrated horizon");
    return sigma.back();
  }
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const size_t j = static_cast<size_t>(it - t.begin());
  const double t0 = t[j - 1], t1 = t[j];
  const double dt = t1 - t0;
  const double s = (time - t0) / dt;
  const double s2 = s * s, s3 = s2 * s;
  // cubic Hermite with the stored derivatives
  return (2 * s3 - 3 * s2 + 1) * sigma[j - 1] + (s3 - 2 * s2 + s) * dt * dsigma[j - 1] +
         (-2 * s3 + 3 * s2) * sigma[j] + (s3 - s2) * dt * dsigma[j];
}

double SelfSimilarSolution::dsigma_at(double time) const {
  // sigma' = sigma^{-alpha} + Gamma holds exactly along the solution; evaluate
  // the first integral at the interpolated sigma.
  return std::pow(sigma_at(time), -alpha) + gamma;
}

double alpha_profile_ode_residual(const Array& rho0_cells, const Grid& grid, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha_profile_ode_residual: alpha must be > 0");
  const Array powed = rho0_cells.pow(alpha);
  double sup = 0.0;
  for (int i = 1; i < grid.n_cells; ++i) {
    const double x = grid.nodes[i];
    const double rho_node = 0.5 * (rho0_cells[i - 1] + rho0_cells[i]);
    const double d = (powed[i] - powed[i - 1]) / grid.h;
    sup = std::max(sup, std::abs(x * rho_node + d / alpha));
  }
  return sup;
}

LagrangianState selfsimilar_state(const SelfSimilarSolution& solution, double t, const Grid& grid,
                                  const InitialData& data) {
  const double residual = alpha_profile_ode_residual(data.rho0, grid, solution.alpha);
  const double res_tol = 1e-9 + 5.0 * grid.h * grid.h * std::max(1.0, data.rho0.maxCoeff());
  if (residual > res_tol)
    throw std::invalid_argument(
        "selfsimilar_state: rho0 does not satisfy the alpha = " + std::to_string(solution.alpha) +
        " profile equation (residual " + std::to_string(residual) + ")");

  const double sigma = solution.sigma_at(t);
  const double dsigma = solution.dsigma_at(t);
  LagrangianState s;
  s.t = t;
  s.eta = sigma * grid.nodes;
  s.eta_x = Array::Constant(grid.n_cells, sigma);
  s.v = dsigma * grid.nodes;
  return s;
}

}  // namespace stickyflow
