#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace blocksd::cli {

struct RunConfig {
  std::string mode;               // "quadratic" | "control"
  std::string problem = "";      // p1|p2|p3|p4|random (default depends on mode)
  std::string kind = "distributed";  // distributed|dirichlet (control mode)
  double alpha = 1e-2;
  int n_blocks = 1;
  int nx = 32;
  double tau = 0.05;
  double T = 6.4;
  double sigma = 0.01;
  double tol = 1e-6;
  int max_iter = 200;
  bool max_iter_only = false;
  int m = 64;            // quadratic mode: problem size
  double spd_alpha = 0.5;
  double spd_gamma = 2.0;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  int threads = 1;
  bool p3_exponent_T = true;
  std::vector<int> sweep_blocks;  // empty: single run
};

/// Parses flags (and an optional `key = value` config file via --config).
/// Flags override file values override defaults. Throws std::runtime_error
/// on invalid input; --help exits with status 0.
RunConfig parse_config(int argc, const char* const* argv);

}  // namespace blocksd::cli
