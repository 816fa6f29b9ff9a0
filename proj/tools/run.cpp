#include "run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <Eigen/Cholesky>

#include "blocksd/ocp.hpp"
#include "blocksd/quadform.hpp"

#ifndef BLOCKSD_GIT_REVISION
#define BLOCKSD_GIT_REVISION "unknown"
#endif

namespace blocksd::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kHistoryHeader =
    "iter,cost,grad_norm,kappa_H,theta_min,theta_max,predicted_decrease,"
    "actual_decrease,prop2_bound,wall_ms\n";

ProblemLabel label_from(const std::string& s) {
  if (s == "p1") return ProblemLabel::P1;
  if (s == "p2") return ProblemLabel::P2;
  if (s == "p3") return ProblemLabel::P3;
  if (s == "p4") return ProblemLabel::P4;
  throw std::runtime_error("unknown control problem: " + s);
}

void write_meta(const RunConfig& cfg, const fs::path& dir) {
  std::ofstream out(dir / "meta.txt");
  out << "mode=" << cfg.mode << "\n"
      << "problem=" << cfg.problem << "\n"
      << "kind=" << cfg.kind << "\n"
      << "alpha=" << format_double(cfg.alpha) << "\n"
      << "blocks=" << cfg.n_blocks << "\n"
      << "nx=" << cfg.nx << "\n"
      << "tau=" << format_double(cfg.tau) << "\n"
      << "T=" << format_double(cfg.T) << "\n"
      << "sigma=" << format_double(cfg.sigma) << "\n"
      << "tol=" << format_double(cfg.tol) << "\n"
      << "max_iter=" << cfg.max_iter << "\n"
      << "max_iter_only=" << (cfg.max_iter_only ? 1 : 0) << "\n"
      << "m=" << cfg.m << "\n"
      << "spd_alpha=" << format_double(cfg.spd_alpha) << "\n"
      << "spd_gamma=" << format_double(cfg.spd_gamma) << "\n"
      << "seed=" << cfg.seed << "\n"
      << "threads=" << cfg.threads << "\n"
      << "p3_exponent_T=" << (cfg.p3_exponent_T ? 1 : 0) << "\n"
      << "prng=mt19937_64\n"
      << "git=" << BLOCKSD_GIT_REVISION << "\n";
}

template <typename Record>
void write_history_row(std::ofstream& out, const Record& r, double prop2) {
  out << r.iter << ',' << format_double(r.cost) << ','
      << format_double(r.grad_norm) << ',' << format_double(r.kappa_H) << ','
      << format_double(r.theta.minCoeff()) << ','
      << format_double(r.theta.maxCoeff()) << ','
      << format_double(r.predicted_decrease) << ','
      << format_double(r.actual_decrease) << ',' << format_double(prop2) << ','
      << format_double(r.wall_ms) << '\n';
}

void write_summary(const RunConfig& cfg, const RunStats& st,
                   const fs::path& dir) {
  std::ofstream out(dir / "summary.txt");
  out << "iterations=" << st.iterations << "\n"
      << "converged=" << (st.converged ? 1 : 0) << "\n"
      << "final_cost=" << format_double(st.final_cost) << "\n"
      << "final_rel_error=" << format_double(st.final_rel_error) << "\n";
  if (cfg.mode == "control") {
    out << "control_energy=" << format_double(st.control_energy) << "\n";
  }
}

RunStats run_quadratic(const RunConfig& cfg, const fs::path& dir) {
  QuadraticProblem prob = random_spd(cfg.m, cfg.spd_alpha, cfg.spd_gamma, cfg.seed);
  BlockPartition part = make_partition(cfg.m, cfg.n_blocks);
  QuadSolveResult res = enhanced_sd_solve(
      prob, part, Eigen::VectorXd::Zero(cfg.m), cfg.tol, cfg.max_iter);

  std::ofstream hist(dir / "history.csv");
  hist << kHistoryHeader;
  for (const auto& r : res.history) write_history_row(hist, r, r.prop2_lower_bound);

  const Eigen::VectorXd xstar = prob.A().llt().solve(prob.b());
  RunStats st;
  st.iterations = static_cast<int>(res.history.size());
  st.converged = res.converged;
  st.final_cost = prob.cost(res.x);
  st.final_rel_error = (res.x - xstar).norm() / xstar.norm();
  return st;
}

RunStats run_control(const RunConfig& cfg, const fs::path& dir) {
  const ControlKind kind = cfg.kind == "dirichlet" ? ControlKind::Dirichlet
                                                   : ControlKind::Distributed;
  ControlProblem prob =
      make_problem(label_from(cfg.problem), kind, cfg.alpha, cfg.nx, cfg.sigma,
                   cfg.T, cfg.tau, cfg.p3_exponent_T);
  OcpOptions opts;
  opts.threads = cfg.threads;
  opts.max_iter_only = cfg.max_iter_only;
  OcpSolveResult res =
      run_algorithm3(prob, cfg.n_blocks, cfg.tol, cfg.max_iter, opts);

  std::ofstream hist(dir / "history.csv");
  hist << kHistoryHeader;
  for (const auto& r : res.history) write_history_row(hist, r, r.prop2_lower_bound);

  {
    std::ofstream out(dir / "control_final.csv");
    out << "time_level,node_index,value\n";
    const auto& v = res.v.total.values;
    for (int j = 1; j <= prob.disc.Nt(); ++j) {
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        out << j << ',' << i << ',' << format_double(v(i, j - 1)) << '\n';
      }
    }
  }
  {
    std::ofstream out(dir / "state_T.csv");
    out << "ix,iy,value\n";
    const int nx = prob.disc.nx();
    for (int iy = 1; iy <= nx; ++iy) {
      for (int ix = 1; ix <= nx; ++ix) {
        out << ix << ',' << iy << ','
            << format_double(res.yT((iy - 1) * nx + (ix - 1))) << '\n';
      }
    }
  }

  RunStats st;
  st.iterations = static_cast<int>(res.history.size());
  st.converged = res.converged;
  st.final_cost = res.final_cost;
  st.final_rel_error = (res.yT - prob.y_target).norm() / prob.y_target.norm();
  st.control_energy = control_energy(prob, res.v.total);
  return st;
}

}  // namespace

RunStats execute_run(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_meta(cfg, dir);
  RunStats st = cfg.mode == "quadratic" ? run_quadratic(cfg, dir)
                                        : run_control(cfg, dir);
  write_summary(cfg, st, dir);
  return st;
}

int run(const RunConfig& cfg) {
  try {
    RunStats st = execute_run(cfg);
    std::cout << "iterations=" << st.iterations
              << " converged=" << st.converged
              << " final_cost=" << format_double(st.final_cost)
              << " final_rel_error=" << format_double(st.final_rel_error)
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  }
}

int sweep(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  std::ofstream out(dir / "sweep.csv");
  out << "blocks,iters,final_cost,final_err,energy\n";
  int failures = 0;
  for (int b : cfg.sweep_blocks) {
    RunConfig sub = cfg;
    sub.n_blocks = b;
    sub.sweep_blocks.clear();
    sub.out_dir = (dir / ("n" + std::to_string(b))).string();
    try {
      RunStats st = execute_run(sub);
      out << b << ',' << st.iterations << ',' << format_double(st.final_cost)
          << ',' << format_double(st.final_rel_error) << ','
          << format_double(st.control_energy) << '\n';
    } catch (const std::exception& e) {
      std::cerr << "sweep: blocks=" << b << " failed: " << e.what() << "\n";
      out << b << ",-1,nan,nan,nan\n";
      ++failures;
    }
  }
  return failures == static_cast<int>(cfg.sweep_blocks.size()) && failures > 0
             ? 1
             : 0;
}

}  // namespace blocksd::cli
