#include "fraclab/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fraclab/config.hpp"
#include "fraclab/constants.hpp"
#include "fraclab/errors.hpp"
#include "format.hpp"
#include "json.hpp"

namespace fraclab::cli {
namespace {

using detail::shortest;
using ordered = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

int run_constants(int N, double s, std::optional<double> q, std::ostream& out) {
  const auto report = constants::make_report(constants::DimensionParams{N, s, q});
  out << constants::to_json(report) << '\n';
  return success;
}

int run_check_model(const std::string& config_path, std::size_t samples, double u_range, std::uint64_t seed,
                    std::ostream& out) {
  const ExperimentConfig cfg = load_config(config_path);
  CheckOptions options;
  options.samples = samples;
  options.u_range = u_range;
  options.seed = seed;
  options.dimension = cfg.grid.dim();
  const AssumptionReport report = check_assumptions(cfg.V, cfg.f, cfg.grid, options);
  ordered j = ordered::parse(to_json(report));
  j["config_hash"] = cfg.hash;
  out << j.dump(2) << '\n';
  return report.all_passed() ? success : validation_failure;
}

int run_solve(const std::string& config_path, const std::string& out_arg, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_config(config_path);
  const fs::path csv = out_arg.empty() ? fs::path(cfg.output.dir) / "solution.csv" : fs::path(out_arg);

  const EnergyContext ctx(assemble_operator(cfg.grid, cfg.solve_s), cfg.V, cfg.f);
  const GroundState gs = solve_ground_state(ctx, cfg.solver);

  {
    auto file = open_for_write(csv);
    const auto& grid = cfg.grid;
    file << (grid.dim() == 1 ? "x,u\n" : "x,y,u\n");
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const Point x = grid.node(i);
      file << shortest(x[0]) << ',';
      if (grid.dim() == 2) file << shortest(x[1]) << ',';
      file << shortest(gs.u[i]) << '\n';
    }
    if (!file) throw IoError("write failed for " + csv.string());
  }

  ordered j;
  j["version"] = version_string();
  j["config_hash"] = cfg.hash;
  j["config"] = ordered::parse(cfg.canonical_json);
  j["solution"] = csv.filename().string();
  j["s"] = gs.s;
  j["energy"] = gs.energy;
  j["norm_s"] = gs.norm_s;
  j["el_residual"] = gs.el_residual;
  j["nehari_residual"] = gs.nehari_residual;
  j["iterations"] = gs.iterations;
  j["descent_iterations"] = gs.descent_iterations;
  j["newton_iterations"] = gs.newton_iterations;
  j["converged"] = gs.converged;
  {
    const fs::path side = sidecar_path(csv);
    auto file = open_for_write(side);
    file << j.dump(2) << '\n';
    if (!file) throw IoError("write failed for " + side.string());
  }

  out << "s=" << shortest(gs.s) << " energy=" << shortest(gs.energy) << " el_residual=" << shortest(gs.el_residual)
      << " iterations=" << gs.iterations << " converged=" << (gs.converged ? "true" : "false") << '\n';
  if (!gs.converged) {
    err << "solve: no convergence after " << gs.iterations << " iterations (residual " << shortest(gs.el_residual)
        << "); partial result written to " << csv.string() << '\n';
    return non_convergence;
  }
  return success;
}

int run_sweep_command(const std::string& config_path, const std::string& out_arg, bool allow_partial,
                      std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_config(config_path);
  const fs::path dir = out_arg.empty() ? fs::path(cfg.output.dir) : fs::path(out_arg);
  if (allow_partial) cfg.sweep.allow_partial = true;

  const SweepResult result = run_sweep(cfg.sweep);
  ReportMeta meta;
  meta.config_json = cfg.canonical_json;
  meta.config_hash = cfg.hash;
  meta.seeds = "solver.seed=" + std::to_string(cfg.solver.seed);
  emit_report(result, dir, meta);

  out << "sweep: " << result.rows.size() << " rows written to " << dir.string() << '\n';
  if (!result.all_converged()) {
    err << "sweep: some rows did not converge (flagged in sweep.csv)\n";
    return cfg.sweep.allow_partial ? success : non_convergence;
  }
  return success;
}

}  // namespace

std::string usage() {
  return "usage: fraclab <subcommand> [options]\n"
         "\n"
         "subcommands:\n"
         "  constants   --N <int> --s <real> [--q <real>]\n"
         "  check-model --config <file> [--samples <int>] [--u-range <real>] [--seed <int>]\n"
         "  solve       --config <file> --out <csv>\n"
         "  sweep       --config <file> --out <dir> [--allow-partial]\n"
         "\n"
         "exit status: 0 success, 1 invalid input, 2 non-convergence\n";
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> known{"constants", "check-model", "solve", "sweep"};
  if (args.empty() || std::find(known.begin(), known.end(), args.front()) == known.end()) {
    if (!args.empty() && (args.front() == "-h" || args.front() == "--help")) {
      out << usage();
      return success;
    }
    if (!args.empty()) err << "fraclab: unknown subcommand '" << args.front() << "'\n";
    err << usage();
    return validation_failure;
  }

  CLI::App app{"Fractional Schrodinger ground states and the s -> 1 transition", "fraclab"};
  app.require_subcommand(1);

  int N = 3;
  double s = 0.75;
  std::optional<double> q;
  auto* constants_cmd = app.add_subcommand("constants", "Print the normalization constants as JSON");
  constants_cmd->add_option("--N", N, "Dimension N >= 2")->required();
  constants_cmd->add_option("--s", s, "Order s in (0, 1)")->required();
  constants_cmd->add_option("--q", q, "Lebesgue exponent for the interpolation parameter");

  std::string config_path;
  std::size_t samples = 10000;
  double u_range = 10.0;
  std::uint64_t seed = 0;
  auto* check_cmd = app.add_subcommand("check-model", "Sample-check the model assumptions");
  check_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  check_cmd->add_option("--samples", samples, "Number of sample points");
  check_cmd->add_option("--u-range", u_range, "Amplitude range of the u samples");
  check_cmd->add_option("--seed", seed, "Sampling seed");

  std::string out_path;
  auto* solve_cmd = app.add_subcommand("solve", "Compute one ground state");
  solve_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  solve_cmd->add_option("--out", out_path, "Output CSV; a JSON sidecar is written next to it");

  bool allow_partial = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the s-sweep and write sweep.csv, meta.json, plotdata.csv");
  sweep_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep_cmd->add_option("--out", out_path, "Output directory");
  sweep_cmd->add_flag("--allow-partial", allow_partial, "Keep non-converged rows instead of failing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return validation_failure;
  }

  try {
    if (constants_cmd->parsed()) return run_constants(N, s, q, out);
    if (check_cmd->parsed()) return run_check_model(config_path, samples, u_range, seed, out);
    if (solve_cmd->parsed()) return run_solve(config_path, out_path, out, err);
    return run_sweep_command(config_path, out_path, allow_partial, out, err);
  } catch (const NonConvergence& e) {
    err << "fraclab: " << e.what() << '\n';
    return non_convergence;
  } catch (const Error& e) {
    err << "fraclab: " << e.what() << '\n';
    return validation_failure;
  }
}

}  // namespace fraclab::cli
