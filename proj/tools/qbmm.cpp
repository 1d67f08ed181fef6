#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qbmm/closure.hpp"
#include "qbmm/config.hpp"
#include "qbmm/errors.hpp"
#include "qbmm/inversion.hpp"
#include "qbmm/output.hpp"
#include "qbmm/solver.hpp"
#include "qbmm/spectral.hpp"
#include "qbmm/stability.hpp"

using nlohmann::json;
using namespace qbmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRealizability = 2;
constexpr int kExitStability = 3;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 66;
constexpr int kExitInternal = 70;

// Finite JSON number, or null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct MomentArgs {
  std::string method = "eqmom";
  int n = 1;
  std::vector<double> moments;
  std::string file;
};

void add_moment_args(CLI::App* sub, MomentArgs& a) {
  sub->add_option("--method", a.method, "Closure family")->check(CLI::IsMember({"qmom", "eqmom"}));
  sub->add_option("--n", a.n, "Number of nodes")->required()->check(CLI::PositiveNumber);
  sub->add_option("moments", a.moments, "Moments M_0, M_1, ...");
  sub->add_option("--file", a.file, "Read whitespace or comma separated moments from a file");
}

MomentVector read_moments(const MomentArgs& a) {
  std::vector<double> m = a.moments;
  if (!a.file.empty()) {
    if (!m.empty()) throw ConfigError("give moments inline or with --file, not both");
    std::ifstream in(a.file);
    if (!in) throw IoError("cannot open moments file '" + a.file + "'");
    std::string tok;
    while (in >> tok) {
      std::stringstream ss(tok);
      std::string part;
      while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(part, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != part.size()) throw ConfigError("bad number '" + part + "' in " + a.file);
        m.push_back(v);
      }
    }
  }
  const std::size_t want = a.method == "qmom" ? 2 * static_cast<std::size_t>(a.n) : 2 * static_cast<std::size_t>(a.n) + 1;
  if (m.size() != want)
    throw ConfigError(a.method + " with n=" + std::to_string(a.n) + " needs " + std::to_string(want) +
                      " moments, got " + std::to_string(m.size()));
  return MomentVector(std::move(m));
}

json nodes_json(const NodeSet& ns) {
  json out = json::array();
  for (const Node& nd : ns) out.push_back({{"weight", nd.weight}, {"abscissa", nd.abscissa}});
  return out;
}

double scaled_residual(const MomentVector& fw, const MomentVector& m) {
  const auto scale = moment_scale(m);
  double r = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) r = std::max(r, std::abs(fw[j] - m[j]) / scale[j]);
  return r;
}

struct Inverted {
  json doc;
  NodeSet nodes;
  EqmomState state;
};

Inverted invert(const MomentArgs& a) {
  const MomentVector m = read_moments(a);
  Inverted out;
  out.doc = {{"method", a.method}, {"n", a.n}, {"moments", m.values()}};
  if (a.method == "qmom") {
    const QmomInversion inv = qmom_invert(m);
    out.nodes = inv.nodes;
    out.doc["nodes"] = nodes_json(inv.nodes);
    out.doc["near_degenerate"] = inv.near_degenerate;
    out.doc["residual"] = scaled_residual(qmom_forward(inv.nodes, m.max_order()), m);
  } else {
    const EqmomInversion inv = eqmom_invert(m);
    out.state = inv.state;
    out.nodes = inv.state.nodes;
    out.doc["nodes"] = nodes_json(inv.state.nodes);
    out.doc["sigma2"] = inv.state.sigma2;
    out.doc["theta"] = inv.theta;
    out.doc["boundary"] = inv.boundary;
    out.doc["residual"] = inv.residual;
  }
  return out;
}

json closure_json(const Inverted& inv, const std::string& method) {
  json c;
  if (method == "qmom") {
    const ClosureCoefficients a = closure_coeffs_qmom(inv.nodes);
    c["coefficients"] = a.a;
    c["characteristic"] = a.characteristic().coeffs();
    c["closed_moment"] = closed_moment_qmom(inv.nodes);
  } else {
    const ClosureCoefficients a = closure_coeffs_eqmom(inv.state);
    c["coefficients"] = a.a;
    c["characteristic"] = a.characteristic().coeffs();
    c["closed_moment"] = closed_moment_eqmom(inv.state);
    c["u_tilde"] = num(u_tilde(inv.state.nodes));
    c["g"] = g_polynomial(inv.state).coeffs();
  }
  return c;
}

json spectrum_json(const SpectralReport& r) {
  json complex = json::array();
  for (const auto& z : r.complex_eigenvalues) complex.push_back({{"re", z.real()}, {"im", z.imag()}});
  json defects = json::array();
  for (const Defect& d : r.defects)
    defects.push_back({{"eigenvalue", d.eigenvalue}, {"algebraic", d.algebraic}, {"geometric", d.geometric}});
  return {{"eigenvalues", r.eigenvalues},
          {"complex_eigenvalues", complex},
          {"min_gap", num(r.min_gap)},
          {"gap_tol", r.gap_tol},
          {"all_real", r.all_real},
          {"strictly_hyperbolic", r.strictly_hyperbolic},
          {"defects", defects}};
}

struct StabilityArgs {
  std::string model = "bgk";
  double pr = 1.0;
  int n = 2;
  double rho = 1.0;
  double u = 0.0;
  double theta = 1.0;
};

int cmd_stability(const StabilityArgs& a) {
  const SourceModel model = a.model == "shakhov" ? SourceModel::shakhov(a.pr) : SourceModel::bgk();
  if (a.n < 2) throw ConfigError("stability-check needs n >= 2");
  if (a.model == "shakhov" && !(a.pr > 0.0 && a.pr <= 1.0)) throw ConfigError("--pr must lie in (0, 1]");
  const StabilityReport rep = check_stability(a.rho, a.u, a.theta, a.n, model);
  const double rel_off = rep.cond_iii.k_norm > 0.0 ? rep.cond_iii.off_block_norm / rep.cond_iii.k_norm : 0.0;
  json failed = json::array();
  if (!rep.cond_i.pass) failed.push_back("condition_i");
  if (!rep.cond_ii.pass) failed.push_back("condition_ii");
  if (!rep.cond_iii.pass) failed.push_back("condition_iii");
  std::vector<double> diag(rep.cond_i.diagonal.data(), rep.cond_i.diagonal.data() + rep.cond_i.diagonal.size());
  const json doc = {
      {"model", to_string(model.kind)},
      {"pr", model.pr},
      {"n", rep.n},
      {"r", rep.r},
      {"macro", {{"rho", rep.macro.rho}, {"u", rep.macro.u}, {"theta", rep.macro.theta}, {"q", rep.macro.q}}},
      {"condition_i", {{"pass", rep.cond_i.pass}, {"residual", rep.cond_i.residual}, {"diagonal", diag}}},
      {"condition_ii",
       {{"pass", rep.cond_ii.pass},
        {"symmetry_residual", rep.cond_ii.symmetry_residual},
        {"min_eigenvalue", rep.cond_ii.min_eigenvalue}}},
      {"condition_iii",
       {{"pass", rep.cond_iii.pass},
        {"off_block_norm", rep.cond_iii.off_block_norm},
        {"k_norm", rep.cond_iii.k_norm},
        {"relative_off_block", rel_off},
        {"block_diagonal", rep.cond_iii.block_diagonal},
        {"epsilon_found", rep.cond_iii.epsilon_found},
        {"epsilon", rep.cond_iii.epsilon},
        {"max_eigenvalue", rep.cond_iii.max_eigenvalue}}},
      {"pass", rep.pass()},
      {"failed", failed},
  };
  std::cout << doc.dump(2) << '\n';
  if (!rep.pass()) {
    std::cerr << "stability check failed:";
    if (!rep.cond_i.pass) std::cerr << " condition_i residual=" << rep.cond_i.residual;
    if (!rep.cond_ii.pass)
      std::cerr << " condition_ii symmetry_residual=" << rep.cond_ii.symmetry_residual
                << " min_eigenvalue=" << rep.cond_ii.min_eigenvalue;
    if (!rep.cond_iii.pass)
      std::cerr << " condition_iii relative_off_block=" << rel_off << " epsilon_found=" << std::boolalpha
                << rep.cond_iii.epsilon_found;
    std::cerr << '\n';
    return kExitStability;
  }
  return kExitOk;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string output_dir;
  double t = -1.0;
  double x = std::nan("");
  std::string out;
};

SimConfig resolve_config(const RunArgs& a) {
  SimConfig cfg = a.config.empty() ? SimConfig{} : load_config(a.config);
  for (const std::string& s : a.overrides) apply_override(cfg, s);
  if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
  validate(cfg);
  return cfg;
}

int cmd_riemann(const RunArgs& a) {
  const SimConfig cfg = resolve_config(a);
  const RunResult run = run_riemann(cfg);
  const std::string manifest = write_run(cfg, run);
  const RunDiagnostics& d = run.diagnostics;
  std::cerr << "riemann " << to_string(cfg.closure) << " n=" << cfg.n << " cells=" << cfg.cells
            << " steps=" << d.steps << " wall=" << d.wall_seconds << "s";
  if (d.has_reference) std::cerr << " l1_rho=" << d.l1_rho << " delta_shock=" << d.delta_shock;
  std::cerr << " manifest=" << manifest << '\n';
  json doc;
  std::ifstream(manifest) >> doc;
  doc["manifest"] = manifest;
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_oracle(const RunArgs& a) {
  const SimConfig cfg = resolve_config(a);
  const double t = a.t >= 0.0 ? a.t : cfg.t_end;
  if (!std::isnan(a.x)) {
    const MacroState s = free_streaming_reference(a.x, t, cfg.left, cfg.right);
    std::cout << json{{"x", a.x}, {"t", t}, {"rho", s.rho}, {"u", s.u}, {"theta", s.theta}, {"q", s.q}}.dump(2)
              << '\n';
    return kExitOk;
  }
  if (a.out.empty()) {
    write_reference_csv(std::cout, t, cfg);
    return kExitOk;
  }
  std::ofstream os(a.out);
  if (!os) throw IoError("cannot write '" + a.out + "'");
  write_reference_csv(os, t, cfg);
  return kExitOk;
}

int fail(int code, const std::string& kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  if (code == kExitRealizability) std::cout << extra.dump(2) << '\n';
  std::cerr << "error: " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QMOM and Gaussian-EQMOM moment closures for the 1-D BGK equation"};
  app.require_subcommand(1);

  MomentArgs inv_args, clo_args, spec_args;
  auto* inv = app.add_subcommand("invert", "Recover nodes (and sigma2) from moments");
  add_moment_args(inv, inv_args);
  auto* clo = app.add_subcommand("closure", "Closure coefficients of the recovered state");
  add_moment_args(clo, clo_args);
  auto* spec = app.add_subcommand("spectrum", "Eigenstructure of the closed moment system");
  add_moment_args(spec, spec_args);

  StabilityArgs st;
  auto* stab = app.add_subcommand("stability-check", "Structural stability conditions at an equilibrium");
  stab->add_option("--model", st.model)->check(CLI::IsMember({"bgk", "shakhov"}));
  stab->add_option("--pr", st.pr, "Prandtl number (shakhov)");
  stab->add_option("--n", st.n);
  stab->add_option("--rho", st.rho);
  stab->add_option("--u", st.u);
  stab->add_option("--theta", st.theta);

  RunArgs rr, orc;
  auto* rie = app.add_subcommand("riemann", "Run the shock-tube problem and write CSV snapshots");
  rie->add_option("config", rr.config, "Config file");
  rie->add_option("--set", rr.overrides, "Override a config entry, key=value");
  rie->add_option("--output-dir", rr.output_dir);
  auto* ora = app.add_subcommand("oracle", "Free-streaming reference solution");
  ora->add_option("config", orc.config, "Config file");
  ora->add_option("--set", orc.overrides, "Override a config entry, key=value");
  ora->add_option("--t", orc.t, "Time (default t_end)");
  ora->add_option("--x", orc.x, "Single point; prints the macro state as JSON");
  ora->add_option("--out", orc.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (inv->parsed()) {
      std::cout << invert(inv_args).doc.dump(2) << '\n';
    } else if (clo->parsed()) {
      Inverted r = invert(clo_args);
      r.doc["closure"] = closure_json(r, clo_args.method);
      std::cout << r.doc.dump(2) << '\n';
    } else if (spec->parsed()) {
      Inverted r = invert(spec_args);
      r.doc["spectrum"] =
          spectrum_json(spec_args.method == "qmom" ? analyze_qmom(r.nodes) : analyze_eqmom(r.state));
      std::cout << r.doc.dump(2) << '\n';
    } else if (stab->parsed()) {
      return cmd_stability(st);
    } else if (rie->parsed()) {
      return cmd_riemann(rr);
    } else if (ora->parsed()) {
      return cmd_oracle(orc);
    }
  } catch (const RealizabilityError& e) {
    return fail(kExitRealizability, "realizability", e.what(),
                {{"minor_order", e.minor_order()}, {"pivot", num(e.pivot())}});
  } catch (const InversionError& e) {
    return fail(kExitRealizability, "inversion", e.what(),
                {{"residual", num(e.residual())}, {"bracket", {num(e.bracket_lo()), num(e.bracket_hi())}}});
  } catch (const SolverAbort& e) {
    return fail(kExitRealizability, "solver_abort", e.what(),
                {{"cell", e.cell()}, {"time", e.time()}, {"moments", e.moments()}});
  } catch (const IoError& e) {
    return fail(kExitIo, "io", e.what());
  } catch (const ConfigError& e) {
    return fail(kExitUsage, "usage", e.what());
  } catch (const DomainError& e) {
    return fail(kExitUsage, "domain", e.what());
  } catch (const UnsupportedInput& e) {
    return fail(kExitUsage, "unsupported", e.what());
  } catch (const std::exception& e) {
    return fail(kExitInternal, "internal", e.what());
  }
  return kExitOk;
}
