#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fraclab/solver.hpp"

namespace fraclab {

struct SweepConfig {
  /// Ascending orders strictly inside (1/2, 1).
  std::vector<double> s_grid;
  bool include_local = true;
  /// Exponents in [2, 2N/(N-1)).
  std::vector<double> nu_list{2.0};
  /// Dimension used for the exponent window of nu_list.
  int N = 3;
  bool warm_start = true;
  bool allow_partial = false;
  /// Worker cap for cold-started sweeps; 0 reads FRAC_LAB_THREADS.
  int threads = 0;

  GridSpec grid = GridSpec::interval(-1.0, 1.0, 256);
  Potential V = Potential::constant(1.0);
  Nonlinearity f = Nonlinearity::power(4.0);
  SolverConfig solver;
};

/// Throws RangeError when the s-grid or nu_list leave their windows.
void validate(const SweepConfig& cfg);

struct SweepRow {
  double s = 0.0;
  double energy = 0.0;  // c_s
  double l2_norm = 0.0;
  double norm_s = 0.0;
  /// ||u_s - u_1||_{L^nu}, one entry per nu_list exponent.
  std::vector<double> distances;
  /// t_s with m_s(u_1) = t_s u_1.
  double fiber_t = 0.0;
  /// J_s(m_s(u_1)), an upper bound of c_s.
  double reference_upper = 0.0;
  double el_residual = 0.0;
  double nehari_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Analytic floor rho of ||u||_s on the Nehari set of this order.
  double rho_floor = 0.0;
  double wall_time = 0.0;
};

struct SweepResult {
  std::vector<double> nu_list;
  std::vector<SweepRow> rows;
  bool has_reference = false;
  SweepRow reference;
  /// Minimizers, parallel to rows; the reference minimizer is `reference_u`.
  std::vector<Field> fields;
  Field reference_u;

  bool all_converged() const;
};

/// Computes the local reference (s = 1) first, then every order of the
/// grid in ascending order, warm-started from the previous row when
/// `warm_start` is set. Without warm starts the rows run concurrently.
/// A row that fails to converge raises NonConvergence unless
/// `allow_partial` is set, in which case it is kept and flagged.
SweepResult run_sweep(const SweepConfig& cfg);

struct UniformBound {
  double M_hat = 0.0;
  bool finite = false;
  /// Max over the last quarter of the rows <= 1.1 x max over the earlier rows.
  bool non_drifting = true;
};

/// M_hat = max over rows of ||u_s||_{L^2} + ||u_s||_s.
UniformBound uniform_bound_check(const SweepResult& result);

struct LowerBound {
  double rho_hat = 0.0;
  /// Smallest analytic floor over the rows.
  double floor = 0.0;
  bool passed = false;
};

/// rho_hat = min over rows of ||u_s||_s, compared with the analytic floor.
LowerBound lower_bound_check(const SweepResult& result);

struct FiberDiagnostic {
  std::vector<double> s;
  std::vector<double> t;
  /// |t_s - 1| nonincreasing along the ascending grid.
  bool monotone = false;
};

FiberDiagnostic fiber_scaling_diagnostic(const SweepResult& result);

/// Provenance recorded in meta.json next to the tables.
struct ReportMeta {
  std::string config_json = "{}";
  std::string config_hash;
  std::string seeds;
};

/// Writes sweep.csv, meta.json and plotdata.csv into `dir` (created if
/// missing). Numbers use the shortest round-trip decimal form, so the CSV
/// round-trips exactly and is byte-identical across identical runs.
void emit_report(const SweepResult& result, const std::filesystem::path& dir, const ReportMeta& meta = {});

/// Parses a sweep.csv written by emit_report (numerics only; no fields).
SweepResult read_sweep_csv(const std::filesystem::path& path);

/// Library version with the git description of the build tree.
std::string version_string();

/// Worker count from FRAC_LAB_THREADS, defaulting to the hardware count.
int worker_threads();

}  // namespace fraclab
