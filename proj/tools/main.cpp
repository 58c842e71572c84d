#include "stickyflow/io.hpp"
#include "stickyflow/oracle.hpp"
#include "stickyflow/selfsimilar.hpp"
#include "stickyflow/stepper.hpp"
#include "stickyflow/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <atomic>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace stickyflow;

void write_outputs(const RunConfig& cfg, const RunResult& result, const std::string& dir) {
  write_trajectory(result.records, result.params.flow_kind,
                   (std::filesystem::path(dir) / "trajectory.csv").string());
  RunConfig echoed = cfg;
  echoed.output_dir = dir;
  write_config_echo(echoed, (std::filesystem::path(dir) / "config_echo.ini").string());
}

void print_summary(const RunResult& r) {
  std::printf("t_end reached      %s\n", format_double(r.final_state.t).c_str());
  std::printf("steps accepted     %ld (rejected %ld)\n", r.steps_accepted, r.steps_rejected);
  std::printf("records            %zu\n", r.records.size());
  if (!r.records.empty()) {
    const auto& last = r.records.back();
    std::printf("kinetic energy     %s\n", format_double(last.kinetic).c_str());
    std::printf("domain size        %s\n", format_double(last.domain_size).c_str());
  }
  for (const auto& ev : r.events)
    std::printf("event t=%-12g %s %s\n", ev.t, ev.kind.c_str(), ev.detail.c_str());
  if (r.aborted) std::printf("ABORTED: %s\n", r.abort_reason.c_str());
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg = load_config_file(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const RunResult result = run(cfg);
  write_outputs(cfg, result, cfg.output_dir);
  print_summary(result);
  return result.aborted ? 1 : 0;
}

int cmd_verify(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg = load_config_file(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const RunResult result = run(cfg);
  write_outputs(cfg, result, cfg.output_dir);
  const auto checks = verify_run(cfg, result);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::printf("%s\n", format_check_line(c).c_str());
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}

// one value of a --vary key applied onto a config
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  // round-trip through the parser so range checks and key names stay in one place
  std::string text = render_config(cfg);
  const std::string section = key.substr(0, key.find('.'));
  const std::string name = key.substr(key.find('.') + 1);
  std::string out;
  bool replaced = false;
  std::string current;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[') current = line.substr(1, line.size() - 2);
    if (current == section && line.rfind(name + " =", 0) == 0) {
      out += name + " = " + value + "\n";
      replaced = true;
    } else {
      out += line + "\n";
    }
  }
  if (!replaced) {  // key not present in the echo (optional key); append to its section
    out.clear();
    bool injected = false;
    std::istringstream in2(text);
    while (std::getline(in2, line)) {
      out += line + "\n";
      if (!injected && line == "[" + section + "]") {
        out += name + " = " + value + "\n";
        injected = true;
      }
    }
    if (!injected) throw ConfigError(key, 0, "unknown section in --vary key");
  }
  cfg = parse_config(out);
}

int cmd_sweep(const std::string& config_path, const std::string& vary,
              const std::string& out_override, int jobs) {
  const RunConfig base = [&] {
    RunConfig c = load_config_file(config_path);
    if (!out_override.empty()) c.output_dir = out_override;
    return c;
  }();
  const auto eq = vary.find('=');
  if (eq == std::string::npos || vary.find('.') == std::string::npos)
    throw ConfigError(vary, 0, "--vary expects section.key=v1,v2,...");
  const std::string key = vary.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream ss(vary.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(item);
  if (values.empty()) throw ConfigError(vary, 0, "--vary needs at least one value");

  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    RunConfig cfg = base;
    apply_override(cfg, key, v);
    cfg.output_dir =
        (std::filesystem::path(base.output_dir) / (key + "=" + v)).string();
    configs.push_back(std::move(cfg));
  }

  std::mutex io_mutex;
  std::vector<int> status(configs.size(), 0);
  std::atomic<size_t> next{0};
  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      try {
        const RunResult result = run(configs[i]);
        write_outputs(configs[i], result, configs[i].output_dir);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::printf("%s = %-14s final kinetic %-14g domain %-14g -> %s\n", key.c_str(),
                    values[i].c_str(), result.records.back().kinetic,
                    result.records.back().domain_size, configs[i].output_dir.c_str());
        status[i] = result.aborted ? 1 : 0;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::fprintf(stderr, "%s = %s failed: %s\n", key.c_str(), values[i].c_str(), e.what());
        status[i] = 2;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  int rc = 0;
  for (int s : status) rc = std::max(rc, s);
  return rc;
}

int cmd_selfsimilar(double alpha, double sigma0, double dsigma0, double t_end, double tol,
                    bool compare, int n_cells, const std::string& out_dir) {
  const SelfSimilarSolution sol = integrate_sigma(alpha, sigma0, dsigma0, t_end, tol);
  std::printf("Gamma          = %s\n", format_double(sol.gamma).c_str());
  std::printf("classification = %s\n",
              sol.classification == EnergyClass::LargeEnergy ? "large-energy" : "small-energy");
  if (sol.classification == EnergyClass::SmallEnergy)
    std::printf("sigma limit    = %s\n", format_double(sol.limit).c_str());
  if (sol.collapsed) std::printf("COLLAPSE: sigma reached the positivity floor\n");
  std::printf("sigma(%g) = %.9f\n", sol.t.back(), sol.sigma.back());
  std::printf("dsigma(%g) = %.9f\n", sol.t.back(), sol.dsigma.back());

  if (!out_dir.empty()) {
    std::string csv = "t,sigma,dsigma\n";
    for (size_t i = 0; i < sol.t.size(); ++i)
      csv += format_double(sol.t[i]) + "," + format_double(sol.sigma[i]) + "," +
             format_double(sol.dsigma[i]) + "\n";
    write_text_file((std::filesystem::path(out_dir) / "selfsimilar.csv").string(), csv);
  }

  if (!compare) return sol.collapsed ? 1 : 0;

  // PDE cross-check: launch the degenerate stepper from the matching
  // self-similar data and compare eta against sigma(t) x.
  RunConfig cfg;
  cfg.params.flow_kind = FlowKind::DegeneratePressureless;
  cfg.params.alpha = alpha;
  cfg.profile.rho0 = {Profile::Kind::Alpha, {}};
  cfg.profile.v0 = {Profile::Kind::Poly, {0.0, dsigma0}};
  cfg.profile.normalize = false;
  cfg.n_cells = n_cells;
  cfg.step.t_end = std::min(t_end, 5.0);
  cfg.step.dt_max = 5e-4;
  cfg.step.dt_init = 5e-4;
  cfg.snapshot_dt = 0.05;
  cfg.record_every = 200;
  const RunResult result = run(cfg);
  double sup = 0.0;
  for (const auto& snap : result.snapshots)
    sup = std::max(sup, (snap.eta - sol.sigma_at(snap.t) * result.grid.nodes).abs().maxCoeff());
  const bool pass = !result.aborted && sup <= 1e-2;
  std::printf("[%s] pde-tracking             measured %11.4e  threshold %11.4e\n",
              pass ? "PASS" : "FAIL", sup, 1e-2);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-dimensional free-boundary viscous flow simulator and verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_override, vary;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 2;

  auto* run_cmd = app.add_subcommand("run", "execute one simulation");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_override, "override output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "execute independent runs in parallel");
  sweep_cmd->add_option("config", config_path, "config file")->required();
  sweep_cmd->add_option("--vary", vary, "section.key=v1,v2,...")->required();
  sweep_cmd->add_option("--out", out_override, "override output directory");
  sweep_cmd->add_option("--jobs", jobs, "worker threads");

  auto* verify_cmd = app.add_subcommand("verify", "run and check the full harness checklist");
  verify_cmd->add_option("config", config_path, "config file")->required();
  verify_cmd->add_option("--out", out_override, "override output directory");

  double alpha = 1.0, sigma0 = 1.0, dsigma0 = 0.0, t_end = 10.0, tol = 1e-10;
  bool compare = false;
  int n_cells = 512;
  std::string ss_out;
  auto* ss_cmd = app.add_subcommand("selfsimilar", "integrate the sigma ODE");
  ss_cmd->add_option("--alpha", alpha, "viscosity exponent")->required();
  ss_cmd->add_option("--sigma0", sigma0, "sigma(0)");
  ss_cmd->add_option("--dsigma0", dsigma0, "sigma'(0)")->required();
  ss_cmd->add_option("--t-end", t_end, "horizon")->required();
  ss_cmd->add_option("--tol", tol, "ODE tolerance");
  ss_cmd->add_flag("--compare", compare, "run the PDE cross-check");
  ss_cmd->add_option("--n-cells", n_cells, "grid for the cross-check");
  ss_cmd->add_option("--out", ss_out, "write selfsimilar.csv here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(config_path, out_override);
    if (*verify_cmd) return cmd_verify(config_path, out_override);
    if (*sweep_cmd) return cmd_sweep(config_path, vary, out_override, jobs);
    if (*ss_cmd) return cmd_selfsimilar(alpha, sigma0, dsigma0, t_end, tol, compare, n_cells,
                                        ss_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
