#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stickyflow/discretize.hpp"
#include "stickyflow/oracle.hpp"
#include "stickyflow/selfsimilar.hpp"

#include <cmath>

using namespace stickyflow;

TEST_CASE("Gamma parameter") {
  CHECK(gamma_parameter(1.0, 1.0, 0.7) == 0.0);
  CHECK(gamma_parameter(1.0, 0.0, 2.0) == -1.0);
  CHECK(gamma_parameter(2.0, 0.5, 1.0) == 0.0);
  CHECK_THROWS_AS(gamma_parameter(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sigma(t) = sqrt(1 + 2t) for alpha = 1, Gamma = 0") {
  const SelfSimilarSolution sol = integrate_sigma(1.0, 1.0, 1.0, 4.0);
  CHECK(std::abs(sol.sigma.back() - 3.0) <= 1e-8);
  CHECK(sol.classification == EnergyClass::LargeEnergy);
  for (double t : {0.3, 1.1, 2.7})
    CHECK(sol.sigma_at(t) == doctest::Approx(std::sqrt(1.0 + 2.0 * t)).epsilon(1e-9));
}

TEST_CASE("the fixed point sigma' (0) = 0 with sigma0 = 1 never moves") {
  const SelfSimilarSolution sol = integrate_sigma(1.7, 1.0, 0.0, 10.0);
  CHECK(sol.gamma == -1.0);
  for (double s : sol.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("small-energy solution converges to (-Gamma)^(-1/alpha)") {
  const SelfSimilarSolution sol = integrate_sigma(1.0, 1.0, 0.5, 70.0);
  CHECK(sol.gamma == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(sol.classification == EnergyClass::SmallEnergy);
  CHECK(sol.limit == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(sol.sigma.back() - 2.0) <= 1e-6);
  CHECK(std::abs(sol.dsigma.back()) < 1e-7);
}

TEST_CASE("first integral cross-checked through the time quadrature") {
  // t = int dsigma / (sigma^-alpha + Gamma) along the trajectory
  const double alpha = 2.0, sigma0 = 1.0, dsigma0 = 1.3;
  const SelfSimilarSolution sol = integrate_sigma(alpha, sigma0, dsigma0, 6.0);
  const double gamma = sol.gamma;
  const double t_check =
      oracle::quadrature(
          [&](double s) { return 1.0 / (std::pow(s, -alpha) + gamma); }, sigma0,
          sol.sigma.back(), 20000)
          .value;
  CHECK(t_check == doctest::Approx(6.0).epsilon(1e-8));
}

TEST_CASE("classification table over Gamma and alpha") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double gamma : {-1.0, -0.5, -0.1, 0.0, 0.1, 1.0}) {
      const auto [cls, limit] = classify(gamma, alpha);
      if (gamma >= 0.0) {
        CHECK(cls == EnergyClass::LargeEnergy);
        CHECK(std::isinf(limit));
      } else {
        CHECK(cls == EnergyClass::SmallEnergy);
        CHECK(limit == doctest::Approx(std::pow(-gamma, -1.0 / alpha)).epsilon(1e-15));
      }
    }
  }
  CHECK(classify(-0.25, 2.0).second == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("energy dichotomy: sign of Gamma decides boundedness") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double gamma : {-1.0, -0.5, -0.1, 0.0, 0.1, 1.0}) {
      // choose sigma'(0) to hit the prescribed Gamma with sigma0 = 1
      const double dsigma0 = gamma + 1.0;
      const SelfSimilarSolution sol = integrate_sigma(alpha, 1.0, dsigma0, 25.0);
      CHECK(!sol.collapsed);
      if (gamma >= 0.0) {
        CHECK(sol.sigma.back() >= 2.0);  // unbounded growth
        CHECK(sol.dsigma.back() >= gamma);
      } else {
        const double limit = std::pow(-gamma, -1.0 / alpha);
        CHECK(std::abs(sol.sigma.back() - limit) <= std::abs(1.0 - limit) + 1e-9);
        CHECK(sol.sigma.back() <= std::max(1.0, limit) + 1e-9);
      }
    }
  }
}

TEST_CASE("positivity floor flags collapse instead of extrapolating") {
  const SelfSimilarSolution sol = integrate_sigma(1.0, 1.0, -0.5, 50.0, 1e-10, 0.9);
  CHECK(sol.collapsed);
  CHECK(sol.sigma.back() <= 0.9);
}

TEST_CASE("self-similar state construction and profile guard") {
  const Grid g = Grid::uniform(128);
  Params p;
  p.flow_kind = FlowKind::DegeneratePressureless;
  p.alpha = 2.0;
  const InitialData d = build_initial_data(
      {{Profile::Kind::Alpha, {}}, {Profile::Kind::Poly, {0.0, 0.5}}, {}, false}, g, p);
  const SelfSimilarSolution sol = integrate_sigma(2.0, 1.0, 0.5, 8.0);

  const LagrangianState s0 = selfsimilar_state(sol, 0.0, g, d);
  CHECK((s0.eta - g.nodes).abs().maxCoeff() <= 1e-12);
  CHECK((s0.v - 0.5 * g.nodes).abs().maxCoeff() <= 1e-12);

  const LagrangianState s = selfsimilar_state(sol, 5.0, g, d);
  CHECK((s.eta_x - sol.sigma_at(5.0)).abs().maxCoeff() <= 1e-12);

  InitialData wrong = d;
  wrong.rho0 = Array::Ones(128);
  CHECK_THROWS_AS(selfsimilar_state(sol, 1.0, g, wrong), std::invalid_argument);
}

TEST_CASE("discrete momentum residual of the self-similar state is second order") {
  // rho0 sigma'' x - div((rho0/eta_x)^alpha v_x / eta_x) measured discretely
  const double alpha = 2.0;
  const SelfSimilarSolution sol = integrate_sigma(alpha, 1.0, 1.0, 3.0);
  double residual[2];
  int k = 0;
  for (int n : {128, 256}) {
    const Grid g = Grid::uniform(n);
    Params p;
    p.flow_kind = FlowKind::DegeneratePressureless;
    p.alpha = alpha;
    const InitialData d = build_initial_data(
        {{Profile::Kind::Alpha, {}}, {Profile::Kind::Poly, {0.0, 1.0}}, {}, false}, g, p);
    const LagrangianState s = selfsimilar_state(sol, 2.0, g, d);
    const double sigma = sol.sigma_at(2.0);
    const double dsigma = sol.dsigma_at(2.0);
    const double ddsigma = -alpha * dsigma * std::pow(sigma, -alpha - 1.0);

    const Array mu_cells = (d.rho0 / s.eta_x).pow(alpha);
    const Array flux = mu_cells * grad_node_to_cell(s.v, g) / s.eta_x;
    const Array div = div_cell_to_node(flux, g, 0.0, 0.0);
    const Array mbar = lumped_mass(d.rho0);
    residual[k++] = (mbar * ddsigma * g.nodes - div).abs().maxCoeff();
  }
  CHECK(residual[0] <= 0.05);
  CHECK(residual[0] / residual[1] >= 3.0);
}
