#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stickyflow/diagnostics.hpp"
#include "stickyflow/discretize.hpp"
#include "stickyflow/model.hpp"

#include <cmath>

using namespace stickyflow;

// independently computed (multiprecision quadrature)
static constexpr double kTerminalCompressing = 1.4495569180141527;
static constexpr double kTerminalExpanding = 2.8213722692848960;
static constexpr double kEnvelopeLinear = 10.068392654475957;  // exp(4/sqrt(3))

namespace {
Params pressureless() {
  Params p;
  p.flow_kind = FlowKind::Pressureless;
  p.mu = 1.0;
  return p;
}

InitialData linear_compression(const Grid& g) {
  return build_initial_data(
      {{Profile::Kind::Constant, {1.0}}, {Profile::Kind::Poly, {0.0, -1.0}}, {}, true}, g,
      pressureless());
}
}  // namespace

TEST_CASE("t = 0 record of the compressing data") {
  const Grid g = Grid::uniform(256);
  const InitialData d = linear_compression(g);
  const LagrangianState s = initial_state(d, g, pressureless());
  const DiagnosticsRecord r = record(s, d, pressureless(), g, nullptr, 0.0, 0.0);
  CHECK(r.kinetic == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(std::abs(r.momentum) <= 1e-15);
  CHECK(r.domain_size == 2.0);
  CHECK(r.etax_min == 1.0);
  CHECK(r.etax_max == 1.0);
  CHECK(r.h1_v == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.linf_vx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.log_identity_residual == 0.0);
  CHECK(std::isnan(r.thermal));
}

TEST_CASE("stationary record is all zeros") {
  const Grid g = Grid::uniform(32);
  const InitialData d = build_initial_data(
      {{Profile::Kind::Constant, {1.0}}, {Profile::Kind::Zero, {}}, {}, true}, g, pressureless());
  const LagrangianState s = initial_state(d, g, pressureless());
  const DiagnosticsRecord r = record(s, d, pressureless(), g, nullptr, 0.0, 0.0);
  CHECK(r.kinetic == 0.0);
  CHECK(r.h1_v == 0.0);
  CHECK(r.log_identity_residual == 0.0);
  CHECK(r.l2_vt == 0.0);
}

TEST_CASE("t = 0 thermal energy of 1 - x^2") {
  const Grid g = Grid::uniform(256);
  Params p;
  p.flow_kind = FlowKind::Nsf;
  p.mu = p.kappa = 1.0;
  p.mach = 10.0;
  const InitialData d = build_initial_data({{Profile::Kind::Constant, {1.0}},
                                            {Profile::Kind::Zero, {}},
                                            Profile{Profile::Kind::Poly, {1.0, 0.0, -1.0}},
                                            true},
                                           g, p);
  const LagrangianState s = initial_state(d, g, p);
  const DiagnosticsRecord r = record(s, d, p, g, nullptr, 0.0, 0.0);
  CHECK(r.thermal == doctest::Approx(4.0 / 3.0).epsilon(1e-4));
  CHECK(std::isnan(r.log_identity_residual));
}

TEST_CASE("log identity vanishes at t = 0 and sees pure discretization error later") {
  const Grid g = Grid::uniform(128);
  const InitialData d = linear_compression(g);
  LagrangianState s = initial_state(d, g, pressureless());
  CHECK(log_identity_residual(s, d, pressureless(), g) == 0.0);

  // a state consistent with the identity up to the interpolation of exp:
  // eta_x = exp(-(P0)/mu) with v = 0 is the exact terminal state
  s.v.setZero();
  const Array p0 = partial_momentum_cells(d.v0, d.rho0, g.h);
  s.eta_x = (-p0).exp();
  CHECK(log_identity_residual(s, d, pressureless(), g) <= 1e-13);
}

TEST_CASE("envelope constant: stationary, linear, and stiff limits") {
  const Grid g = Grid::uniform(256);
  Params p = pressureless();
  const InitialData still = build_initial_data(
      {{Profile::Kind::Constant, {1.0}}, {Profile::Kind::Zero, {}}, {}, true}, g, p);
  CHECK(etax_envelope(still, p, g) == 1.0);

  const InitialData lin = linear_compression(g);
  CHECK(etax_envelope(lin, p, g) == doctest::Approx(kEnvelopeLinear).epsilon(1e-4));

  p.mu = 1e9;
  CHECK(etax_envelope(lin, p, g) <= 1.0 + 1e-8);
  CHECK(etax_envelope(lin, p, g) >= 1.0);
}

TEST_CASE("terminal domain quadrature against the oracle values") {
  const Grid g = Grid::uniform(512);
  Params p = pressureless();
  const InitialData still = build_initial_data(
      {{Profile::Kind::Constant, {1.0}}, {Profile::Kind::Zero, {}}, {}, true}, g, p);
  CHECK(terminal_domain(still, p, g) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(terminal_domain(linear_compression(g), p, g) ==
        doctest::Approx(kTerminalCompressing).epsilon(1e-5));

  const InitialData expanding = build_initial_data(
      {{Profile::Kind::Constant, {1.0}}, {Profile::Kind::Poly, {0.0, 1.0}}, {}, true}, g, p);
  const double out = terminal_domain(expanding, p, g);
  CHECK(out > 2.0);
  CHECK(out == doctest::Approx(kTerminalExpanding).epsilon(1e-5));
}

TEST_CASE("decay-rate fit on synthetic series") {
  std::vector<double> t, y, c;
  for (int i = 0; i < 100; ++i) {
    t.push_back(0.05 * i);
    y.push_back(std::exp(-3.0 * 0.05 * i));
    c.push_back(0.7);
  }
  CHECK(fit_decay_rate(t, y, 0.0, 5.0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::abs(fit_decay_rate(t, c, 0.0, 5.0)) <= 1e-12);
  y[50] = -1.0;
  CHECK_THROWS_AS(fit_decay_rate(t, y, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate(t, c, 90.0, 95.0), std::invalid_argument);
}

TEST_CASE("discrete weighted Poincare constant") {
  const Grid g = Grid::uniform(256);
  const double cp = poincare_constant(Array::Ones(256), g);
  CHECK(cp == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(1e-3));

  // the constant is the discrete optimum: no zero-mean field may violate it
  Array rho(256);
  for (int i = 0; i < 256; ++i) rho[i] = 1.0 + g.cells[i] * g.cells[i];
  const double cp_w = poincare_constant(rho, g);
  const Array mbar = lumped_mass(rho);
  const double mass = mbar.sum();
  for (auto f : {+[](double x) { return x; }, +[](double x) { return std::sin(M_PI * x); },
                 +[](double x) { return x * x * x - 0.2 * x; }}) {
    Array v(g.n_nodes());
    for (int i = 0; i <= g.n_cells; ++i) v[i] = f(g.nodes[i]);
    v -= (mbar * v).sum() / mass;
    const double num = (mbar * v.square()).sum();
    double den = 0.0;
    for (int c = 0; c < g.n_cells; ++c) {
      const double d = (v[c + 1] - v[c]) / g.h;
      den += d * d;
    }
    CHECK(num <= cp_w * den * (1.0 + 1e-10));
  }
}

TEST_CASE("a priori monitor stays at zero without temperature") {
  NsfAprioriMonitor monitor(16, 1.0, 10.0);
  for (int k = 0; k < 5; ++k) monitor.accumulate(Array::Ones(16), Array::Zero(16), 0.1);
  CHECK(monitor.sup() == 0.0);

  NsfAprioriMonitor warm(16, 2.0, 10.0);
  warm.accumulate(Array::Ones(16), Array::Constant(16, 3.0), 0.5);
  CHECK(warm.sup() == doctest::Approx(0.5 * 3.0 / (2.0 * 100.0)).epsilon(1e-14));
}

TEST_CASE("energy functional of zero data is identically zero") {
  std::vector<DiagnosticsRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[k].t = 0.5 * k;
    recs[k].thermal_sq = 0.0;
    recs[k].l2_thetat = 0.0;
  }
  const NsfEnergySeries e = nsf_energy_functional(recs, 1.0);
  CHECK(e.sup == 0.0);
  CHECK(e.e0 == 0.0);
}

TEST_CASE("energy functional rejects records without temperature fields") {
  std::vector<DiagnosticsRecord> recs(2);
  recs[0].t = 0.0;
  recs[1].t = 1.0;
  recs[1].thermal_sq = std::numeric_limits<double>::quiet_NaN();
  recs[0].thermal_sq = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nsf_energy_functional(recs, 0.5), std::invalid_argument);
}

TEST_CASE("weight-free energy functional reduces to the plain budget") {
  std::vector<DiagnosticsRecord> recs(2);
  recs[0].t = 0.0;
  recs[0].kinetic = 0.5;
  recs[0].l2_vt = 0.25;
  recs[0].thermal_sq = 0.5;
  recs[0].l2_thetat = 0.25;
  recs[0].h1_v = 1.0;
  recs[1] = recs[0];
  recs[1].t = 2.0;
  const NsfEnergySeries e = nsf_energy_functional(recs, 0.0);
  CHECK(e.e0 == doctest::Approx(2.0).epsilon(1e-14));
  // instantaneous part plus the trapezoid of ||v_x||^2 = 1 over [0,2]
  CHECK(e.value.back() == doctest::Approx(2.0 + 2.0).epsilon(1e-14));
}
