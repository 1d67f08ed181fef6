#include "qbmm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qbmm/errors.hpp"

namespace qbmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || std::isnan(out))
    throw ConfigError("config key '" + key + "': expected a real number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "closure") {
    if (v == "qmom") cfg.closure = ClosureKind::kQmom;
    else if (v == "eqmom") cfg.closure = ClosureKind::kEqmom;
    else throw ConfigError("config key 'closure': expected qmom or eqmom, got '" + v + "'");
  } else if (key == "n") cfg.n = parse_int(key, v);
  else if (key == "x_lo") cfg.x_lo = parse_real(key, v);
  else if (key == "x_hi") cfg.x_hi = parse_real(key, v);
  else if (key == "cells") cfg.cells = parse_int(key, v);
  else if (key == "cfl") cfg.cfl = parse_real(key, v);
  else if (key == "t_end") cfg.t_end = parse_real(key, v);
  else if (key == "kappa") cfg.kappa = parse_real(key, v);
  else if (key == "left.rho") cfg.left.rho = parse_real(key, v);
  else if (key == "left.u") cfg.left.u = parse_real(key, v);
  else if (key == "left.theta") cfg.left.theta = parse_real(key, v);
  else if (key == "right.rho") cfg.right.rho = parse_real(key, v);
  else if (key == "right.u") cfg.right.u = parse_real(key, v);
  else if (key == "right.theta") cfg.right.theta = parse_real(key, v);
  else if (key == "snapshot_interval") cfg.snapshot_interval = parse_real(key, v);
  else if (key == "output_dir") cfg.output_dir = v;
  else if (key == "tag") cfg.tag = v;
  else throw ConfigError("unknown config key '" + key + "'");
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  set_config_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

SimConfig parse_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg) {
  return {
      {"closure", to_string(cfg.closure)},
      {"n", std::to_string(cfg.n)},
      {"x_lo", fmt(cfg.x_lo)},
      {"x_hi", fmt(cfg.x_hi)},
      {"cells", std::to_string(cfg.cells)},
      {"cfl", fmt(cfg.cfl)},
      {"t_end", fmt(cfg.t_end)},
      {"kappa", fmt(cfg.kappa)},
      {"left.rho", fmt(cfg.left.rho)},
      {"left.u", fmt(cfg.left.u)},
      {"left.theta", fmt(cfg.left.theta)},
      {"right.rho", fmt(cfg.right.rho)},
      {"right.u", fmt(cfg.right.u)},
      {"right.theta", fmt(cfg.right.theta)},
      {"snapshot_interval", fmt(cfg.snapshot_interval)},
      {"output_dir", cfg.output_dir},
      {"tag", cfg.tag},
  };
}

std::string format_config(const SimConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : config_entries(cfg)) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace qbmm
