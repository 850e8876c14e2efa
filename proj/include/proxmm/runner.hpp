#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "proxmm/outer.hpp"
#include "proxmm/types.hpp"

namespace proxmm {

// Error in the run configuration (unknown key, malformed value, missing file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Batch run description, parsed from `key = value` lines ('#' starts a
// comment, unknown keys are rejected).
struct RunConfig {
  std::string task;     // "denoise" | "lasso"
  std::string solver;   // "pmm" | "alm" | "admm" | "fbn"
  std::string input;    // PGM path (denoise)
  std::string output_prefix;
  double alpha = 1.0;
  double c0 = 1.0;
  double c_factor = 1.0;
  // Penalties far beyond 1e6 make the inner tolerances unrealizable in double
  // precision (the multiplier update amplifies rounding noise by c), so the
  // growth cap defaults to that range.
  double c_cap = 1e6;
  double eps0 = 1e-2;
  double kappa = 0.5;
  int r = 0;
  double kkt_tol = 1e-8;
  int max_outer = 100;
  int max_inner = 100;
  std::uint64_t seed = 0;
  double noise_density = 0.0;
  Matrix lasso_a;  // key "A": rows separated by ';', entries by whitespace
  Vector lasso_b;  // key "b"
  bool has_a = false;
  bool has_b = false;
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config(const std::string& path);

// Exit status contract: 0 solved to tolerance, 1 configuration or I/O error,
// 2 solver finished without reaching its tolerance (artifacts still written).
inline constexpr int kExitSolved = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

// Execute a parsed run: builds the problem, runs the requested solver, writes
// `<prefix>.trace.csv` (and for denoising `<prefix>.out.pgm`, plus
// `<prefix>.noisy.pgm` when noise was applied), reports a one-line summary on
// `out` and errors on `err`. Missing parent directories of the prefix are
// created. Never throws; failures map to kExitError.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Convenience: parse a config file and run it.
int run_config_file(const std::string& path, std::ostream& out, std::ostream& err);

// CSV serialization of a trace (header row plus one line per iteration).
std::string trace_csv(const ConvergenceTrace& trace);

}  // namespace proxmm
