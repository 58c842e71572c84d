#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stickyflow/diagnostics.hpp"
#include "stickyflow/discretize.hpp"
#include "stickyflow/io.hpp"
#include "stickyflow/stepper.hpp"

#include <cmath>

using namespace stickyflow;

namespace {

RunConfig pressureless_config(const Profile& rho0, const Profile& v0) {
  RunConfig cfg;
  cfg.params.flow_kind = FlowKind::Pressureless;
  cfg.params.mu = 1.0;
  cfg.profile.rho0 = rho0;
  cfg.profile.v0 = v0;
  return cfg;
}

RunConfig nsf_config(double mach) {
  RunConfig cfg;
  cfg.params.flow_kind = FlowKind::Nsf;
  cfg.params.mu = 1.0;
  cfg.params.kappa = 1.0;
  cfg.params.mach = mach;
  cfg.profile.rho0 = {Profile::Kind::Constant, {1.0}};
  cfg.profile.v0 = {Profile::Kind::Poly, {0.0, -1.0}};
  cfg.profile.theta0 = Profile{Profile::Kind::Poly, {1.0, 0.0, -1.0}};
  return cfg;
}

const Profile kOne{Profile::Kind::Constant, {1.0}};
const Profile kZero{Profile::Kind::Zero, {}};
const Profile kCompress{Profile::Kind::Poly, {0.0, -1.0}};

}  // namespace

TEST_CASE("stationary state only advances time") {
  const Grid g = Grid::uniform(32);
  Params p;
  p.flow_kind = FlowKind::Pressureless;
  const InitialData d = build_initial_data({kOne, kZero, {}, true}, g, p);
  const LagrangianState s = initial_state(d, g, p);
  const StepResult r = step_pressureless(s, d, p, g, 0.05);
  REQUIRE(r.status == StepStatus::Accepted);
  CHECK(r.state.t == doctest::Approx(0.05));
  CHECK(r.state.v.abs().maxCoeff() == 0.0);
  CHECK((r.state.eta - g.nodes).abs().maxCoeff() == 0.0);
}

TEST_CASE("a vanishing step is the identity") {
  const Grid g = Grid::uniform(64);
  Params p;
  p.flow_kind = FlowKind::Pressureless;
  const InitialData d = build_initial_data({kOne, kCompress, {}, true}, g, p);
  const LagrangianState s = initial_state(d, g, p);
  const StepResult r = step_pressureless(s, d, p, g, 1e-12);
  CHECK((r.state.v - s.v).abs().maxCoeff() <= 1e-10 * s.v.abs().maxCoeff());
}

TEST_CASE("strong compression with a large step is rejected, the driver recovers") {
  const Grid g = Grid::uniform(32);
  Params p;
  p.flow_kind = FlowKind::Pressureless;
  const InitialData d = build_initial_data(
      {kOne, {Profile::Kind::Poly, {0.0, -10.0}}, {}, true}, g, p);
  const LagrangianState s = initial_state(d, g, p);
  const StepResult r = step_pressureless(s, d, p, g, 0.2);
  CHECK(r.status == StepStatus::RejectedEtaX);

  RunConfig cfg = pressureless_config(kOne, {Profile::Kind::Poly, {0.0, -10.0}});
  cfg.n_cells = 32;
  cfg.step = {0.2, 1e-12, 0.2, 0.5, 1.0};
  cfg.record_every = 10;
  const RunResult out = run(cfg);
  CHECK(!out.aborted);
  CHECK(out.steps_rejected >= 1);
  CHECK(out.final_state.t == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("compressing run: domain shrinks monotonically toward the terminal value") {
  RunConfig cfg = pressureless_config(kOne, kCompress);
  cfg.n_cells = 128;
  cfg.step = {1e-3, 1e-12, 1e-3, 0.5, 30.0};
  cfg.record_every = 50;
  const RunResult out = run(cfg);
  REQUIRE(!out.aborted);
  for (size_t k = 1; k < out.records.size(); ++k)
    CHECK(out.records[k].domain_size <= out.records[k - 1].domain_size + 1e-12);
  const double target = terminal_domain(out.data, out.params, out.grid);
  CHECK(out.records.back().domain_size == doctest::Approx(target).epsilon(2e-3));
}

TEST_CASE("pressureless conservation monitors on a desk run") {
  RunConfig cfg = pressureless_config(kOne, kCompress);
  cfg.n_cells = 128;
  cfg.step = {1e-3, 1e-12, 1e-3, 0.5, 5.0};
  cfg.record_every = 25;
  const RunResult out = run(cfg);
  REQUIRE(!out.aborted);
  CHECK(out.momentum_drift <= 1e-13);
  CHECK(out.kinetic_increase_max <= 0.0);
  CHECK(out.energy_budget_residual <= 1e-12);
}

TEST_CASE("t_end = 0 yields the single initial record") {
  RunConfig cfg = pressureless_config(kOne, kCompress);
  cfg.n_cells = 16;
  cfg.step.t_end = 0.0;
  const RunResult out = run(cfg);
  CHECK(out.records.size() == 1);
  CHECK(out.records.front().t == 0.0);
  CHECK(out.final_state.t == 0.0);
}

TEST_CASE("identical configs give byte-identical trajectories") {
  RunConfig cfg = pressureless_config(kOne, kCompress);
  cfg.n_cells = 64;
  cfg.step = {1e-3, 1e-12, 2e-3, 0.5, 2.0};
  cfg.record_every = 10;
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  const std::string pa = "/tmp/stickyflow_det_a.csv", pb = "/tmp/stickyflow_det_b.csv";
  write_trajectory(a.records, a.params.flow_kind, pa);
  write_trajectory(b.records, b.params.flow_kind, pb);
  std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().size() > 0);
}

TEST_CASE("nsf stationary state stays put") {
  const Grid g = Grid::uniform(32);
  Params p;
  p.flow_kind = FlowKind::Nsf;
  p.mu = p.kappa = 1.0;
  p.mach = 10.0;
  const InitialData d = build_initial_data({kOne, kZero, Profile{Profile::Kind::Zero, {}}, true},
                                           g, p);
  const LagrangianState s = initial_state(d, g, p);
  const StepResult r = step_nsf(s, d, p, g, 0.01);
  REQUIRE(r.status == StepStatus::Accepted);
  CHECK(r.state.v.abs().maxCoeff() == 0.0);
  CHECK(r.state.theta.abs().maxCoeff() == 0.0);
}

TEST_CASE("Dirichlet temperature mode decays at the heat rate") {
  // theta0 = sin(pi (x+1)/2) is an exact eigenvector of the Dirichlet stencil;
  // with v = 0 the temperature decays by the exact scalar factor every step.
  const int n = 256;
  const Grid g = Grid::uniform(n);
  Params p;
  p.flow_kind = FlowKind::Nsf;
  p.mu = 1.0;
  p.kappa = 1.0;
  p.mach = 1e6;
  InitialData d;
  d.rho0 = Array::Ones(n);
  d.v0 = Array::Zero(n + 1);
  d.theta0 = Array(n + 1);
  for (int i = 0; i <= n; ++i) d.theta0[i] = std::sin(M_PI * (g.nodes[i] + 1.0) / 2.0);
  d.v1 = Array::Zero(n + 1);
  d.theta1 = Array::Zero(n + 1);

  LagrangianState s = initial_state(d, g, p);
  const double dt = 1e-4, t_end = 0.1;
  const long steps = std::lround(t_end / dt);
  for (long k = 0; k < steps; ++k) {
    const StepResult r = step_nsf(s, d, p, g, dt);
    REQUIRE(r.status == StepStatus::Accepted);
    s = std::move(r.state);
  }
  CHECK(s.v.abs().maxCoeff() <= 1e-9);  // pressure force is O(M^-2)

  const double mid = s.theta[n / 2] / d.theta0[n / 2];
  const double exact = std::exp(-p.kappa * (M_PI / 2.0) * (M_PI / 2.0) * t_end);
  CHECK(std::abs(mid / exact - 1.0) <= 1e-3);

  const double lambda_h = 2.0 * (1.0 - std::cos(M_PI * g.h / 2.0)) / (g.h * g.h);
  const double factor = std::pow(1.0 + dt * p.kappa * lambda_h, -double(steps));
  for (int i = 1; i < n; ++i)
    CHECK(s.theta[i] == doctest::Approx(factor * d.theta0[i]).epsilon(1e-8));
}

TEST_CASE("nsf energy accounting closes to round-off per step") {
  RunConfig cfg = nsf_config(10.0);
  cfg.n_cells = 128;
  cfg.step = {1e-3, 1e-12, 1e-3, 0.5, 3.0};
  cfg.record_every = 20;
  const RunResult out = run(cfg);
  REQUIRE(!out.aborted);
  CHECK(out.total_energy_increase_max <= 1e-14);
  CHECK(out.theta_boundary_max == 0.0);
  CHECK(out.theta_min_global >= -1e-12);
  CHECK(out.apriori_sup < 1.0);
  CHECK(out.nsf_etax_identity_sup <= 5e-3);
}

TEST_CASE("doubling M quarters the a priori monitor") {
  auto monitor_for = [](double mach) {
    RunConfig cfg = nsf_config(mach);
    cfg.n_cells = 128;
    cfg.step = {1e-3, 1e-12, 1e-3, 0.5, 2.0};
    cfg.record_every = 100;
    return run(cfg).apriori_sup;
  };
  const double ratio = monitor_for(10.0) / monitor_for(20.0);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("velocity converges to the pressureless trajectory as M grows") {
  // sup_t of the weighted L2 distance scales like M^-2, so the norm ratio
  // between M = 10 and M = 10^4 sits near (10^4/10)^2 = 10^6.
  const int n = 128;
  auto snapshots_for = [&](double mach, bool nsf_kind) {
    RunConfig cfg = nsf_kind ? nsf_config(mach) : pressureless_config(kOne, kCompress);
    cfg.n_cells = n;
    cfg.step = {1e-3, 1e-3, 1e-3, 0.5, 2.0};  // fixed dt: identical sequences
    cfg.snapshot_dt = 0.25;
    cfg.record_every = 500;
    return run(cfg);
  };
  const RunResult base = snapshots_for(0, false);
  auto deviation = [&](const RunResult& r) {
    const Array mbar = lumped_mass(base.data.rho0);
    double sup = 0.0;
    for (size_t k = 0; k < r.snapshots.size(); ++k) {
      const Array dv = r.snapshots[k].v - base.snapshots[k].v;
      sup = std::max(sup, base.grid.h * (mbar * dv.square()).sum());
    }
    return std::sqrt(sup);
  };
  const double near = deviation(snapshots_for(10.0, true));
  const double far = deviation(snapshots_for(1e4, true));
  CHECK(near / far >= 1e5);
  CHECK(near / far <= 1e7);
}

TEST_CASE("degenerate stationary and small-energy terminal domain") {
  const Grid g = Grid::uniform(64);
  Params p;
  p.flow_kind = FlowKind::DegeneratePressureless;
  p.alpha = 2.0;
  const InitialData still =
      build_initial_data({{Profile::Kind::Alpha, {}}, kZero, {}, false}, g, p);
  const LagrangianState s0 = initial_state(still, g, p);
  const StepResult r = step_degenerate(s0, still, p, g, 0.01);
  CHECK(r.state.v.abs().maxCoeff() == 0.0);

  // Gamma = -1/2: the domain tends to 2 (-Gamma)^{-1/alpha} = 2 sqrt(2)
  RunConfig cfg;
  cfg.params = p;
  cfg.profile.rho0 = {Profile::Kind::Alpha, {}};
  cfg.profile.v0 = {Profile::Kind::Poly, {0.0, 0.5}};
  cfg.profile.normalize = false;
  cfg.n_cells = 256;
  cfg.step = {1e-3, 1e-12, 1e-3, 0.5, 12.0};
  cfg.record_every = 100;
  const RunResult out = run(cfg);
  REQUIRE(!out.aborted);
  const double target = 2.0 * std::sqrt(2.0);
  CHECK(std::abs(out.records.back().domain_size - target) / target <= 0.01);
}

TEST_CASE("snapshots land exactly on the requested grid") {
  RunConfig cfg = pressureless_config(kOne, kCompress);
  cfg.n_cells = 32;
  cfg.step = {3e-3, 1e-12, 3e-3, 0.5, 1.0};
  cfg.snapshot_dt = 0.25;
  const RunResult out = run(cfg);
  REQUIRE(out.snapshots.size() == 5);
  for (size_t k = 0; k < out.snapshots.size(); ++k)
    CHECK(out.snapshots[k].t == doctest::Approx(0.25 * k).epsilon(1e-10));
}
