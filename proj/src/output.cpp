#include "qbmm/output.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbmm/config.hpp"
#include "qbmm/errors.hpp"

namespace qbmm {

namespace {

void write_row(std::ostream& os, double x, const MomentVector& m) {
  char buf[32];
  auto put = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    os.write(buf, ptr - buf);
  };
  put(x);
  for (double v : m) {
    os << ',';
    put(v);
  }
  const MacroState s = macro_from_moments(m);
  for (double v : {s.rho, s.u, s.theta, s.q}) {
    os << ',';
    put(v);
  }
  os << '\n';
}

void write_header(std::ostream& os, int k) {
  const auto cols = snapshot_columns(k);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

}  // namespace

std::vector<std::string> snapshot_columns(int moment_count) {
  std::vector<std::string> cols{"x"};
  for (int j = 0; j < moment_count; ++j) cols.push_back("M_" + std::to_string(j));
  for (const char* c : {"rho", "U", "theta", "q"}) cols.emplace_back(c);
  return cols;
}

void write_snapshot_csv(std::ostream& os, const FieldState& f, const SimConfig& cfg) {
  write_header(os, cfg.moment_count());
  for (int i = 0; i < static_cast<int>(f.cells.size()); ++i) write_row(os, cfg.x_center(i), f.cells[i]);
}

void write_reference_csv(std::ostream& os, double t, const SimConfig& cfg) {
  const int k = cfg.moment_count();
  write_header(os, k);
  for (int i = 0; i < cfg.cells; ++i) {
    const double x = cfg.x_center(i);
    write_row(os, x, free_streaming_moments(x, t, cfg.left, cfg.right, std::max(k, 4)).head(k));
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw IoError("csv: no column '" + name + "'");
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw IoError("csv: empty input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw IoError("csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw IoError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                    " fields, got " + std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::json run_manifest(const SimConfig& cfg, const RunResult& run,
                            const std::vector<SnapshotFile>& files) {
  using nlohmann::json;
  const RunDiagnostics& d = run.diagnostics;
  json config = json::object();
  for (const auto& [k, v] : config_entries(cfg)) config[k] = v;

  json diag = {
      {"max_cfl", d.max_cfl},
      {"max_spectral_radius", d.max_radius},
      {"collision_conservation_defect", d.collision_defect},
      {"transport_conservation_defect", d.transport_defect},
      {"boundary_inversions", d.boundary_inversions},
      {"l1_rho", d.has_reference ? json(d.l1_rho) : json(nullptr)},
      {"delta_shock_metric", d.has_reference ? json(d.delta_shock) : json(nullptr)},
  };
  json snaps = json::array();
  for (const SnapshotFile& s : files) snaps.push_back({{"time", s.time}, {"file", s.file}});

  return {
      {"schema", "qbmm.run/1"},
      {"config", config},
      {"columns", snapshot_columns(cfg.moment_count())},
      {"steps", d.steps},
      {"final_time", run.snapshots.empty() ? 0.0 : run.snapshots.back().time},
      {"wall_seconds", d.wall_seconds},
      {"diagnostics", diag},
      {"snapshots", snaps},
  };
}

std::string write_run(const SimConfig& cfg, const RunResult& run) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());

  std::vector<SnapshotFile> files;
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "_%04zu.csv", i);
    const std::string file = cfg.tag + name;
    std::ofstream os(dir / file);
    if (!os) throw IoError("cannot write '" + (dir / file).string() + "'");
    write_snapshot_csv(os, run.snapshots[i], cfg);
    if (!os) throw IoError("write failed for '" + (dir / file).string() + "'");
    files.push_back({run.snapshots[i].time, file});
  }

  const fs::path manifest = dir / (cfg.tag + "_manifest.json");
  std::ofstream os(manifest);
  if (!os) throw IoError("cannot write '" + manifest.string() + "'");
  os << run_manifest(cfg, run, files).dump(2) << '\n';
  if (!os) throw IoError("write failed for '" + manifest.string() + "'");
  return manifest.string();
}

}  // namespace qbmm
