#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fraclab/transition.hpp"

namespace fraclab {

struct OutputConfig {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json"};
};

/// A validated experiment description with every default filled in.
///
/// Recognized document (all sections but grid and model optional):
///
///   {
///     "grid":   {"dim": 1, "bounds": [[-1, 1]], "n": 256},
///     "model":  {"V": {"kind": "constant", "value": 1.0},
///                "f": {"kind": "power", "p": 4.0, "lambda": 1.0}},
///     "solver": {"s": 1.0, "tol_residual": 1e-8, "tol_nehari": 1e-10,
///                "max_iters": 2000, "shrink": 0.5, "sufficient_decrease": 1e-4,
///                "newton_threshold": 1e-4, "init": "bump", "continuation": true,
///                "seed": 0},
///     "sweep":  {"s_grid": [0.6, 0.7, 0.8, 0.9, 0.95, 0.99], "include_local": true,
///                "nu_list": [2.0], "N": 3, "warm_start": true, "threads": 0,
///                "allow_partial": false},
///     "output": {"dir": "out", "formats": ["csv", "json"]}
///   }
///
/// V kinds: constant {value}, quadratic {base, curvature}.
/// f kinds: power {p, lambda}, power_sum {terms: [{p, lambda}, ...]}.
struct ExperimentConfig {
  GridSpec grid = GridSpec::interval(-1.0, 1.0, 256);
  Potential V = Potential::constant(1.0);
  Nonlinearity f = Nonlinearity::power(4.0);
  SolverConfig solver;
  /// Order used by the `solve` subcommand.
  double solve_s = 1.0;
  SweepConfig sweep;
  OutputConfig output;

  /// Fully defaulted document in canonical key order.
  std::string canonical_json;
  /// FNV-1a 64-bit hash of canonical_json, as 16 hex digits.
  std::string hash;
};

/// Parses and validates a JSON document. Throws SchemaError (with the field
/// path) for unknown keys, wrong types and malformed JSON, and RangeError for
/// values outside their admissible windows: s outside (1/2, 1), p outside
/// (2, 2d/(d-1)), inf V <= 0, nu outside [2, 2N/(N-1)).
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a file; a missing file raises IoError.
ExperimentConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(std::string_view text);

}  // namespace fraclab
