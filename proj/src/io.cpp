#include "stickyflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace stickyflow {

const char* const kTrajectoryHeader =
    "t,kinetic,thermal,thermal_sq,momentum,domain_size,etax_min,etax_max,"
    "log_identity_residual,h1_v,linf_vx,h1_theta,l2_vt,l2_thetat,h2_eta,h2_v,apriori_nsf";

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : std::runtime_error(line > 0 ? "config error at line " + std::to_string(line) + " (" + key +
                                        "): " + what
                                  : "config error (" + key + "): " + what),
      key_(std::move(key)),
      line_(line) {}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, int line, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError(key, line, "expected a number, got '" + value + "'");
  return v;
}

int parse_int(const std::string& key, int line, const std::string& value) {
  const double v = parse_number(key, line, value);
  if (v != std::floor(v)) throw ConfigError(key, line, "expected an integer, got '" + value + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, int line, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key, line, "expected true or false, got '" + value + "'");
}

Profile parse_profile(const std::string& key, int line, const std::string& value) {
  Profile p;
  std::string name = value;
  std::string args;
  if (const auto colon = value.find(':'); colon != std::string::npos) {
    name = value.substr(0, colon);
    args = value.substr(colon + 1);
  }
  if (name == "zero")
    p.kind = Profile::Kind::Zero;
  else if (name == "constant")
    p.kind = Profile::Kind::Constant;
  else if (name == "poly")
    p.kind = Profile::Kind::Poly;
  else if (name == "gauss")
    p.kind = Profile::Kind::Gauss;
  else if (name == "sine")
    p.kind = Profile::Kind::Sine;
  else if (name == "alpha")
    p.kind = Profile::Kind::Alpha;
  else
    throw ConfigError(key, line, "unknown profile '" + name + "'");

  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ','))
    p.coeff.push_back(parse_number(key, line, trim(item)));

  switch (p.kind) {
    case Profile::Kind::Constant:
      if (p.coeff.size() != 1) throw ConfigError(key, line, "constant profile takes one value");
      break;
    case Profile::Kind::Poly:
      if (p.coeff.empty()) throw ConfigError(key, line, "poly profile needs coefficients");
      break;
    case Profile::Kind::Gauss:
      if (p.coeff.size() != 3 && p.coeff.size() != 4)
        throw ConfigError(key, line, "gauss profile takes amp,center,width[,offset]");
      if (!(p.coeff[2] > 0)) throw ConfigError(key, line, "gauss width must be > 0");
      break;
    case Profile::Kind::Sine:
      if (p.coeff.size() != 2) throw ConfigError(key, line, "sine profile takes amp,k");
      break;
    case Profile::Kind::Zero:
    case Profile::Kind::Alpha:
      if (!p.coeff.empty()) throw ConfigError(key, line, "profile takes no arguments");
      break;
  }
  return p;
}

std::string render_profile(const Profile& p) {
  std::string name;
  switch (p.kind) {
    case Profile::Kind::Zero: name = "zero"; break;
    case Profile::Kind::Constant: name = "constant"; break;
    case Profile::Kind::Poly: name = "poly"; break;
    case Profile::Kind::Gauss: name = "gauss"; break;
    case Profile::Kind::Sine: name = "sine"; break;
    case Profile::Kind::Alpha: name = "alpha"; break;
  }
  if (p.coeff.empty()) return name;
  std::string out = name + ":";
  for (size_t i = 0; i < p.coeff.size(); ++i) {
    if (i) out += ",";
    out += format_double(p.coeff[i]);
  }
  return out;
}

void apply_preset(const std::string& key, int line, const std::string& name, InitialSpec& spec) {
  if (name == "linear-compression") {
    spec.rho0 = {Profile::Kind::Constant, {1.0}};
    spec.v0 = {Profile::Kind::Poly, {0.0, -1.0}};
  } else if (name == "linear-expansion") {
    spec.rho0 = {Profile::Kind::Constant, {1.0}};
    spec.v0 = {Profile::Kind::Poly, {0.0, 1.0}};
  } else if (name == "oscillatory") {
    spec.rho0 = {Profile::Kind::Constant, {1.0}};
    spec.v0 = {Profile::Kind::Sine, {1.0, 1.0}};
  } else if (name == "selfsimilar") {
    spec.rho0 = {Profile::Kind::Alpha, {}};
    spec.v0 = {Profile::Kind::Poly, {0.0, 1.0}};
    spec.normalize = false;
  } else {
    throw ConfigError(key, line, "unknown preset '" + name + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  bool flow_seen = false, t_end_seen = false, theta0_seen = false, dt_init_seen = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line, line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"run",      "grid",        "params",
                                                  "profile",  "stepping",    "diagnostics"};
      if (!known.count(section)) throw ConfigError(section, line_no, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    if (!seen.insert(path).second) throw ConfigError(path, line_no, "duplicate key");

    if (path == "run.flow") {
      try {
        cfg.params.flow_kind = flow_kind_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path, line_no, e.what());
      }
      flow_seen = true;
    } else if (path == "run.record_every") {
      cfg.record_every = parse_int(path, line_no, value);
      if (cfg.record_every < 1) throw ConfigError(path, line_no, "must be >= 1");
    } else if (path == "run.snapshot_dt") {
      cfg.snapshot_dt = parse_number(path, line_no, value);
      if (cfg.snapshot_dt < 0) throw ConfigError(path, line_no, "must be >= 0");
    } else if (path == "run.output_dir") {
      cfg.output_dir = value;
    } else if (path == "grid.n_cells") {
      cfg.n_cells = parse_int(path, line_no, value);
      if (cfg.n_cells < 2) throw ConfigError(path, line_no, "must be >= 2");
    } else if (path == "params.mu") {
      cfg.params.mu = parse_number(path, line_no, value);
      if (!(cfg.params.mu > 0)) throw ConfigError(path, line_no, "must be > 0");
    } else if (path == "params.kappa") {
      cfg.params.kappa = parse_number(path, line_no, value);
      if (cfg.params.kappa < 0) throw ConfigError(path, line_no, "must be >= 0");
    } else if (path == "params.mach") {
      cfg.params.mach = parse_number(path, line_no, value);
      if (!(cfg.params.mach >= 1)) throw ConfigError(path, line_no, "must be >= 1");
    } else if (path == "params.alpha") {
      cfg.params.alpha = parse_number(path, line_no, value);
      if (!(cfg.params.alpha > 0)) throw ConfigError(path, line_no, "must be > 0");
    } else if (path == "profile.preset") {
      apply_preset(path, line_no, value, cfg.profile);
    } else if (path == "profile.rho0") {
      cfg.profile.rho0 = parse_profile(path, line_no, value);
    } else if (path == "profile.v0") {
      cfg.profile.v0 = parse_profile(path, line_no, value);
    } else if (path == "profile.theta0") {
      cfg.profile.theta0 = parse_profile(path, line_no, value);
      theta0_seen = true;
    } else if (path == "profile.normalize") {
      cfg.profile.normalize = parse_bool(path, line_no, value);
    } else if (path == "stepping.dt_init") {
      cfg.step.dt_init = parse_number(path, line_no, value);
      if (!(cfg.step.dt_init > 0)) throw ConfigError(path, line_no, "must be > 0");
      dt_init_seen = true;
    } else if (path == "stepping.dt_min") {
      cfg.step.dt_min = parse_number(path, line_no, value);
      if (!(cfg.step.dt_min > 0)) throw ConfigError(path, line_no, "must be > 0");
    } else if (path == "stepping.dt_max") {
      cfg.step.dt_max = parse_number(path, line_no, value);
      if (!(cfg.step.dt_max > 0)) throw ConfigError(path, line_no, "must be > 0");
    } else if (path == "stepping.cfl") {
      cfg.step.cfl_coeff = parse_number(path, line_no, value);
      if (!(cfg.step.cfl_coeff > 0 && cfg.step.cfl_coeff <= 1))
        throw ConfigError(path, line_no, "must be in (0,1]");
    } else if (path == "stepping.t_end") {
      cfg.step.t_end = parse_number(path, line_no, value);
      if (cfg.step.t_end < 0) throw ConfigError(path, line_no, "must be >= 0");
      t_end_seen = true;
    } else if (path == "diagnostics.bound_factor") {
      cfg.bound_factor = parse_number(path, line_no, value);
      if (!(cfg.bound_factor > 0)) throw ConfigError(path, line_no, "must be > 0");
    } else if (path == "diagnostics.frak_c1") {
      cfg.frak_c1 = parse_number(path, line_no, value);
    } else if (path == "diagnostics.fit_t0") {
      cfg.fit_t0 = parse_number(path, line_no, value);
    } else if (path == "diagnostics.fit_t1") {
      cfg.fit_t1 = parse_number(path, line_no, value);
    } else {
      throw ConfigError(path, line_no, "unknown key");
    }
  }

  if (!flow_seen) throw ConfigError("run.flow", 0, "missing required key");
  if (!t_end_seen) throw ConfigError("stepping.t_end", 0, "missing required key");
  if (cfg.params.flow_kind == FlowKind::Nsf) {
    if (cfg.params.mach == 0.0)
      throw ConfigError("params.mach", 0, "required for flow=nsf");
    if (cfg.params.kappa == 0.0)
      throw ConfigError("params.kappa", 0, "required for flow=nsf");
    if (!cfg.profile.theta0 && !theta0_seen)
      throw ConfigError("profile.theta0", 0, "required for flow=nsf");
  }
  if (cfg.params.flow_kind == FlowKind::DegeneratePressureless && cfg.params.alpha == 0.0)
    throw ConfigError("params.alpha", 0, "required for flow=degenerate");
  if (!dt_init_seen)  // default tracks the configured bounds
    cfg.step.dt_init = std::min(std::max(cfg.step.dt_init, cfg.step.dt_min), cfg.step.dt_max);
  if (!(cfg.step.dt_min <= cfg.step.dt_init && cfg.step.dt_init <= cfg.step.dt_max))
    throw ConfigError("stepping.dt_init", 0, "require dt_min <= dt_init <= dt_max");
  if (!(cfg.fit_t0 < cfg.fit_t1))
    throw ConfigError("diagnostics.fit_t0", 0, "require fit_t0 < fit_t1");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  if (const char* env = std::getenv("STICKYFLOW_OUT")) cfg.output_dir = env;
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::string s;
  s += "[run]\n";
  s += "flow = " + std::string(to_string(cfg.params.flow_kind)) + "\n";
  s += "record_every = " + std::to_string(cfg.record_every) + "\n";
  s += "snapshot_dt = " + format_double(cfg.snapshot_dt) + "\n";
  s += "output_dir = " + cfg.output_dir + "\n";
  s += "\n[grid]\n";
  s += "n_cells = " + std::to_string(cfg.n_cells) + "\n";
  s += "\n[params]\n";
  s += "mu = " + format_double(cfg.params.mu) + "\n";
  if (cfg.params.kappa != 0.0) s += "kappa = " + format_double(cfg.params.kappa) + "\n";
  if (cfg.params.mach != 0.0) s += "mach = " + format_double(cfg.params.mach) + "\n";
  if (cfg.params.alpha != 0.0) s += "alpha = " + format_double(cfg.params.alpha) + "\n";
  s += "\n[profile]\n";
  s += "rho0 = " + render_profile(cfg.profile.rho0) + "\n";
  s += "v0 = " + render_profile(cfg.profile.v0) + "\n";
  if (cfg.profile.theta0) s += "theta0 = " + render_profile(*cfg.profile.theta0) + "\n";
  s += std::string("normalize = ") + (cfg.profile.normalize ? "true" : "false") + "\n";
  s += "\n[stepping]\n";
  s += "dt_init = " + format_double(cfg.step.dt_init) + "\n";
  s += "dt_min = " + format_double(cfg.step.dt_min) + "\n";
  s += "dt_max = " + format_double(cfg.step.dt_max) + "\n";
  s += "cfl = " + format_double(cfg.step.cfl_coeff) + "\n";
  s += "t_end = " + format_double(cfg.step.t_end) + "\n";
  s += "\n[diagnostics]\n";
  s += "bound_factor = " + format_double(cfg.bound_factor) + "\n";
  if (cfg.frak_c1) s += "frak_c1 = " + format_double(*cfg.frak_c1) + "\n";
  s += "fit_t0 = " + format_double(cfg.fit_t0) + "\n";
  s += "fit_t1 = " + format_double(cfg.fit_t1) + "\n";
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_config_echo(const RunConfig& config, const std::string& path) {
  write_text_file(path, render_config(config));
}

namespace {
// Flow-kind column presence; fields that do not apply are written empty.
bool column_present(FlowKind flow, int col) {
  enum {
    kT, kKinetic, kThermal, kThermalSq, kMomentum, kDomain, kEtaxMin, kEtaxMax,
    kLogIdent, kH1v, kLinfVx, kH1Theta, kL2Vt, kL2ThetaT, kH2Eta, kH2V, kApriori
  };
  const bool thermal = flow == FlowKind::Nsf;
  switch (col) {
    case kThermal:
    case kThermalSq:
    case kH1Theta:
    case kL2ThetaT:
    case kApriori:
      return thermal;
    case kLogIdent:
      return flow == FlowKind::Pressureless;
    default:
      return true;
  }
}
}  // namespace

void write_trajectory(const std::vector<DiagnosticsRecord>& records, FlowKind flow,
                      const std::string& path) {
  if (records.empty()) throw std::invalid_argument("write_trajectory: no records");
  std::string s(kTrajectoryHeader);
  s += "\n";
  for (const auto& r : records) {
    const double cols[17] = {r.t,       r.kinetic,  r.thermal, r.thermal_sq,
                             r.momentum, r.domain_size, r.etax_min, r.etax_max,
                             r.log_identity_residual, r.h1_v, r.linf_vx, r.h1_theta,
                             r.l2_vt,   r.l2_thetat, r.h2_eta, r.h2_v, r.apriori_nsf};
    for (int c = 0; c < 17; ++c) {
      if (c) s += ",";
      if (column_present(flow, c)) s += format_double(cols[c]);
    }
    s += "\n";
  }
  write_text_file(path, s);
}

}  // namespace stickyflow
