#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stickyflow/model.hpp"
#include "stickyflow/oracle.hpp"

#include <cmath>

using namespace stickyflow;

// High-precision references for the terminal-domain integrals with
// rho0 = 1, v0 = -/+ x, mu = 1 (independent multiprecision quadrature).
static constexpr double kTerminalCompressing = 1.4495569180141527;
static constexpr double kTerminalExpanding = 2.8213722692848960;

TEST_CASE("simpson is exact through cubics") {
  auto one = [](double) { return 1.0; };
  auto sq = [](double x) { return x * x; };
  auto cube = [](double x) { return x * x * x + 0.5 * x * x; };
  CHECK(oracle::quadrature(one, -1.0, 1.0, 16).value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(oracle::quadrature(sq, -1.0, 1.0, 16).value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(oracle::quadrature(cube, -1.0, 1.0, 16).value ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("simpson refinement self-consistency on the terminal integrand") {
  auto f = [](double x) { return std::exp(-(1.0 - x * x) / 2.0); };
  const auto coarse = oracle::quadrature(f, -1.0, 1.0, 10000);
  const auto fine = oracle::quadrature(f, -1.0, 1.0, 20000);
  CHECK(std::abs(coarse.value - fine.value) <= 1e-10);
  CHECK(coarse.value == doctest::Approx(kTerminalCompressing).epsilon(1e-12));
  CHECK(coarse.error_estimate <= 1e-10);
}

TEST_CASE("sampled simpson matches the callable path") {
  const int n = 64;
  Array samples(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + 2.0 * i / n;
    samples[i] = std::cos(x);
  }
  const double expected = 2.0 * std::sin(1.0);
  CHECK(oracle::quadrature(samples, -1.0, 1.0) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("terminal domain oracle reproduces the frozen references") {
  auto rho = [](double) { return 1.0; };
  CHECK(oracle::terminal_domain(rho, [](double x) { return -x; }, 1.0) ==
        doctest::Approx(kTerminalCompressing).epsilon(1e-10));
  const double expanding = oracle::terminal_domain(rho, [](double x) { return x; }, 1.0);
  CHECK(expanding == doctest::Approx(kTerminalExpanding).epsilon(1e-10));
  CHECK(expanding > 2.0);
  CHECK(oracle::terminal_domain(rho, [](double) { return 0.0; }, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("oracle and solver quadrature agree where both are exact") {
  // with a constant weight the staggered composite is the trapezoid rule,
  // exact on linears; for genuinely coupled products the two routes agree to
  // O(h^2) only
  const Grid g = Grid::uniform(128);
  const Array rho = Array::Ones(g.n_cells);
  const Array v = 2.0 * g.nodes - 0.25;
  const double solver = integrate_weighted(v, rho, g.h);
  const double simpson =
      oracle::quadrature([](double x) { return 2.0 * x - 0.25; }, -1.0, 1.0, 64).value;
  CHECK(solver == doctest::Approx(simpson).epsilon(1e-13));

  Array rho_sq(g.n_cells);
  for (int i = 0; i < g.n_cells; ++i) rho_sq[i] = 1.0 + g.cells[i] * g.cells[i];
  const double solver_q = integrate_weighted(g.nodes.square(), rho_sq, g.h);
  const double simpson_q =
      oracle::quadrature([](double x) { return (1.0 + x * x) * x * x; }, -1.0, 1.0, 64).value;
  CHECK(std::abs(solver_q - simpson_q) <= 4.0 * g.h * g.h);
}

TEST_CASE("manufactured errors shrink under refinement") {
  Params p;
  p.flow_kind = FlowKind::Pressureless;
  p.mu = 1.0;
  const auto coarse = oracle::manufactured_residual(FlowKind::Pressureless, 32, 2e-3, 0.25, p);
  const auto fine = oracle::manufactured_residual(FlowKind::Pressureless, 64, 5e-4, 0.25, p);
  CHECK(fine.l2_v < coarse.l2_v);
  CHECK(coarse.l2_v <= 0.05);
}
