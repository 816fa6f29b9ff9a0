#pragma once

#include <string>

#include "config.hpp"

namespace blocksd::cli {

struct RunStats {
  int iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
  double final_rel_error = 0.0;  // vs x* (quadratic) or y_target (control)
  double control_energy = 0.0;   // control mode only
};

/// Formats with 17 significant digits (round-trip safe).
std::string format_double(double v);

/// Executes one run and writes history.csv, meta.txt, summary.txt (and the
/// control/state dumps in control mode) under cfg.out_dir.
RunStats execute_run(const RunConfig& cfg);

/// Single run entry point: 0 on success, 1 on solver failure.
int run(const RunConfig& cfg);

/// One run per entry of cfg.sweep_blocks (each in out_dir/n<blocks>/),
/// aggregated into out_dir/sweep.csv. Per-run errors are recorded and the
/// sweep continues.
int sweep(const RunConfig& cfg);

}  // namespace blocksd::cli
