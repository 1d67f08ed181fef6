#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "qbmm/solver.hpp"

namespace qbmm {

// Column names of a snapshot CSV: x, M_0..M_{K-1}, rho, U, theta, q.
std::vector<std::string> snapshot_columns(int moment_count);

// One row per cell at its centre. Values are written with 17 significant
// digits.
void write_snapshot_csv(std::ostream& os, const FieldState& f, const SimConfig& cfg);

// The same schema for the free-streaming solution on the configuration grid.
void write_reference_csv(std::ostream& os, double t, const SimConfig& cfg);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Index of a column; throws IoError when absent.
  std::size_t column(const std::string& name) const;
};

// Throws IoError on ragged rows or unparsable numbers.
CsvTable read_csv(std::istream& is);

struct SnapshotFile {
  double time = 0.0;
  std::string file;  // relative to the manifest
};

// Config echo, step count, wall time, diagnostics and the snapshot list.
nlohmann::json run_manifest(const SimConfig& cfg, const RunResult& run,
                            const std::vector<SnapshotFile>& files);

// Writes <tag>_NNNN.csv for every snapshot and <tag>_manifest.json into
// cfg.output_dir (created when missing). Returns the manifest path. Throws
// IoError on failure.
std::string write_run(const SimConfig& cfg, const RunResult& run);

}  // namespace qbmm
