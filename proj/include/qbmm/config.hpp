#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qbmm/solver.hpp"

namespace qbmm {

// Flat `key = value` documents, one entry per line, `#` starts a comment.
//
//   closure            qmom | eqmom
//   n                  number of nodes
//   x_lo, x_hi         domain
//   cells              number of cells
//   cfl                Courant number in (0, 1)
//   t_end              final time
//   kappa              nu = kappa * rho; `inf` projects to equilibrium
//   left.rho, left.u, left.theta, right.rho, right.u, right.theta
//   snapshot_interval  0 writes only the initial and final fields
//   output_dir, tag    where CSV snapshots and the manifest go
//
// Keys not listed keep their defaults. Unknown keys and unparsable values
// throw ConfigError.

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value);

// `key=value`, as given on the command line.
void apply_override(SimConfig& cfg, const std::string& assignment);

SimConfig parse_config(std::istream& in);

// Throws IoError when the file cannot be opened.
SimConfig load_config(const std::string& path);

// Every key with its resolved value, printed so that parse_config reproduces
// the configuration exactly.
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg);
std::string format_config(const SimConfig& cfg);

}  // namespace qbmm
