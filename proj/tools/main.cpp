#include <exception>
#include <iostream>

#include "config.hpp"
#include "run.hpp"

int main(int argc, char** argv) {
  blocksd::cli::RunConfig cfg;
  try {
    cfg = blocksd::cli::parse_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return cfg.sweep_blocks.empty() ? blocksd::cli::run(cfg)
                                  : blocksd::cli::sweep(cfg);
}
