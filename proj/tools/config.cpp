#include "config.hpp"

#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

namespace blocksd::cli {

RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Block steepest descent with Newton vector step-lengths"};

  app.add_option("--mode", cfg.mode, "quadratic | control")
      ->required()
      ->check(CLI::IsMember({"quadratic", "control"}));
  app.add_option("--problem", cfg.problem, "p1|p2|p3|p4 (control) or random (quadratic)")
      ->check(CLI::IsMember({"p1", "p2", "p3", "p4", "random"}));
  app.add_option("--kind", cfg.kind, "distributed | dirichlet")
      ->check(CLI::IsMember({"distributed", "dirichlet"}));
  app.add_option("--alpha", cfg.alpha, "Tikhonov weight");
  app.add_option("--blocks", cfg.n_blocks, "number of blocks / time windows");
  app.add_option("--nx", cfg.nx, "interior grid points per axis");
  app.add_option("--tau", cfg.tau, "time step");
  app.add_option("--T", cfg.T, "time horizon");
  app.add_option("--sigma", cfg.sigma, "diffusion coefficient");
  app.add_option("--tol", cfg.tol, "relative gradient-norm stopping tolerance");
  app.add_option("--max-iter", cfg.max_iter, "iteration cap");
  app.add_flag("--max-iter-only", cfg.max_iter_only,
               "run exactly max-iter iterations (fixed-budget protocol)");
  app.add_option("--m", cfg.m, "quadratic mode: problem dimension");
  app.add_option("--spd-alpha", cfg.spd_alpha, "SPD generator alpha in (0,1)");
  app.add_option("--spd-gamma", cfg.spd_gamma, "SPD generator gamma > 1");
  app.add_option("--seed", cfg.seed, "PRNG seed");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  app.add_flag("--p3-exponent-T,!--no-p3-exponent-T", cfg.p3_exponent_T,
               "use exp(2 pi^2 sigma T) in the p3 target (default on)");
  app.add_option("--sweep", cfg.sweep_blocks,
                 "comma-separated block counts; runs one job per entry")
      ->delimiter(',');
  app.set_config("--config", "", "flat `key = value` config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    std::exit(0);
  } catch (const CLI::ParseError& e) {
    throw std::runtime_error(std::string("config error: ") + e.what());
  }

  if (cfg.problem.empty()) {
    cfg.problem = cfg.mode == "quadratic" ? "random" : "p1";
  }
  if (cfg.mode == "quadratic" && cfg.problem != "random") {
    throw std::runtime_error("config error: quadratic mode requires --problem random");
  }
  if (cfg.mode == "control" && cfg.problem == "random") {
    throw std::runtime_error("config error: control mode requires --problem p1..p4");
  }
  if (cfg.threads == 0) {
    cfg.threads = static_cast<int>(std::thread::hardware_concurrency());
    if (cfg.threads < 1) cfg.threads = 1;
  }
  if (cfg.threads < 1) throw std::runtime_error("config error: threads must be >= 0");
  if (cfg.n_blocks < 1) throw std::runtime_error("config error: blocks must be >= 1");
  return cfg;
}

}  // namespace blocksd::cli
