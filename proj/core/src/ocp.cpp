#include "blocksd/ocp.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

namespace blocksd {

namespace {

constexpr double kGaussianWidth = 10.0;  // keeps the P1 bumps inside Omega

Eigen::VectorXd gaussian_bump(const HeatDiscretization& d, double cx,
                              double cy) {
  const Eigen::VectorXd x1 = d.node_x1();
  const Eigen::VectorXd x2 = d.node_x2();
  Eigen::VectorXd out(d.n_state());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double r2 = (x1(i) - cx) * (x1(i) - cx) + (x2(i) - cy) * (x2(i) - cy);
    out(i) = std::exp(-kGaussianWidth * 2.0 * std::numbers::pi * r2);
  }
  return out;
}

Eigen::VectorXd sine_product(const HeatDiscretization& d) {
  const Eigen::VectorXd x1 = d.node_x1();
  const Eigen::VectorXd x2 = d.node_x2();
  Eigen::VectorXd out(d.n_state());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = std::sin(std::numbers::pi * x1(i)) * std::sin(std::numbers::pi * x2(i));
  }
  return out;
}

Eigen::VectorXd sine_sum(const HeatDiscretization& d) {
  const Eigen::VectorXd x1 = d.node_x1();
  const Eigen::VectorXd x2 = d.node_x2();
  Eigen::VectorXd out(d.n_state());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = std::sin(std::numbers::pi * x1(i)) + std::sin(std::numbers::pi * x2(i));
  }
  return out;
}

// f and the three lifted sides for the P3 manufactured solution
// y = pi exp(2 pi^2 sigma t)(sin pi x1 + sin pi x2).
Eigen::MatrixXd p3_extra_rhs(const HeatDiscretization& d) {
  const double pi = std::numbers::pi;
  const double sg = d.sigma();
  const int nx = d.nx();
  const double h = d.h();
  const double lift_w = sg / (h * h);
  Eigen::MatrixXd extra = Eigen::MatrixXd::Zero(d.n_state(), d.Nt());
  const Eigen::VectorXd base = sine_sum(d);
  auto idx = [nx](int ix, int iy) { return (iy - 1) * nx + (ix - 1); };
  for (int j = 1; j <= d.Nt(); ++j) {
    const double t = j * d.tau();
    const double et = std::exp(2.0 * pi * pi * sg * t);
    // source f = 3 pi^3 sigma exp(2 pi^2 sigma t)(sin pi x1 + sin pi x2)
    extra.col(j - 1) = (3.0 * pi * pi * pi * sg * et) * base;
    // lift g = trace of the exact solution on the three uncontrolled sides
    auto g = [&](double x1, double x2) {
      return pi * et * (std::sin(pi * x1) + std::sin(pi * x2));
    };
    for (int iy = 1; iy <= nx; ++iy) {
      extra(idx(1, iy), j - 1) += lift_w * g(0.0, iy * h);
      extra(idx(nx, iy), j - 1) += lift_w * g(1.0, iy * h);
    }
    for (int ix = 1; ix <= nx; ++ix) {
      extra(idx(ix, nx), j - 1) += lift_w * g(ix * h, 1.0);
    }
  }
  return extra;
}

}  // namespace

ControlProblem make_problem(ProblemLabel label, ControlKind kind, double alpha,
                            int nx, double sigma, double T, double tau,
                            bool p3_exponent_T) {
  const double pi = std::numbers::pi;
  ControlProblem prob{HeatDiscretization(nx, sigma, T, tau), kind, alpha,
                      {},  {},   std::nullopt,               label};
  const auto& d = prob.disc;
  switch (label) {
    case ProblemLabel::P1:
      prob.y0 = gaussian_bump(d, 0.7, 0.7);
      prob.y_target = gaussian_bump(d, 0.3, 0.3);
      break;
    case ProblemLabel::P2:
      prob.y0 = sine_product(d);
      prob.y_target = std::exp(-2.0 * pi * pi * sigma * T) * sine_product(d);
      break;
    case ProblemLabel::P3: {
      prob.kind = ControlKind::Dirichlet;
      prob.y0 = pi * sine_sum(d);
      const double expo = 2.0 * pi * pi * sigma * (p3_exponent_T ? T : 1.0);
      prob.y_target = (pi * std::exp(expo)) * sine_sum(d);
      prob.extra_rhs = p3_extra_rhs(d);
      break;
    }
    case ProblemLabel::P4: {
      prob.y0 = pi * sine_sum(d);
      const Eigen::VectorXd x1 = d.node_x1();
      const Eigen::VectorXd x2 = d.node_x2();
      prob.y_target.resize(d.n_state());
      for (Eigen::Index i = 0; i < prob.y_target.size(); ++i) {
        prob.y_target(i) = std::min(std::min(x1(i), x2(i)),
                                    std::min(1.0 - x1(i), 1.0 - x2(i)));
      }
      break;
    }
    case ProblemLabel::Custom:
      prob.y0 = Eigen::VectorXd::Zero(d.n_state());
      prob.y_target = Eigen::VectorXd::Zero(d.n_state());
      break;
  }
  return prob;
}

DecomposedControl zero_control(const ControlProblem& prob,
                               Eigen::Index n_blocks) {
  DecomposedControl v;
  v.partition = make_partition(prob.disc.Nt(), n_blocks);
  v.total = ControlField::zero(prob.disc, prob.kind);
  return v;
}

ControlField window_restrict(const BlockPartition& part, const ControlField& c,
                             Eigen::Index b) {
  if (part.total_len != c.values.cols()) {
    throw GeometryError("window_restrict: partition does not cover the time grid");
  }
  if (b < 0 || b >= part.num_blocks) throw std::out_of_range("window_restrict: block");
  ControlField out;
  out.kind = c.kind;
  out.values = Eigen::MatrixXd::Zero(c.values.rows(), c.values.cols());
  out.values.middleCols(part.block_begin(b), part.block_len) =
      c.values.middleCols(part.block_begin(b), part.block_len);
  return out;
}

CostResult evaluate_cost(const ControlProblem& prob, const ControlField& v) {
  const Eigen::MatrixXd traj =
      forward_solve(prob.disc, prob.y0, &v,
                    prob.extra_rhs ? &*prob.extra_rhs : nullptr);
  CostResult out;
  out.yT = traj.col(prob.disc.Nt());
  const Eigen::VectorXd misfit = out.yT - prob.y_target;
  out.J = 0.5 * state_inner(prob.disc, misfit, misfit) +
          0.5 * prob.alpha * control_inner(prob.disc, v, v);
  return out;
}

GradientResult evaluate_gradient(const ControlProblem& prob,
                                 const ControlField& v) {
  const Eigen::MatrixXd traj =
      forward_solve(prob.disc, prob.y0, &v,
                    prob.extra_rhs ? &*prob.extra_rhs : nullptr);
  GradientResult out;
  out.yT = traj.col(prob.disc.Nt());
  const Eigen::VectorXd misfit = out.yT - prob.y_target;
  out.J = 0.5 * state_inner(prob.disc, misfit, misfit) +
          0.5 * prob.alpha * control_inner(prob.disc, v, v);
  const Eigen::MatrixXd adj = adjoint_solve(prob.disc, misfit);
  out.g = extract_gradient(prob.disc, prob.kind, prob.alpha, v, adj);
  return out;
}

StepSystem assemble_Dk_Hk(const ControlProblem& prob,
                          const BlockPartition& part, const ControlField& g,
                          int threads) {
  const Eigen::Index n = part.num_blocks;
  std::vector<ControlField> wins;
  wins.reserve(static_cast<size_t>(n));
  for (Eigen::Index b = 0; b < n; ++b) wins.push_back(window_restrict(part, g, b));

  Eigen::VectorXd D(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    D(b) = control_inner(prob.disc, wins[b], wins[b]);
  }
  const double gnorm = std::sqrt(D.sum());
  if (gnorm == 0.0) throw ZeroGradientError();

  // Hessian columns S(pi_b g): independent forward solves, gathered in
  // block order so the result is identical for any thread count.
  std::vector<Eigen::VectorXd> sT(static_cast<size_t>(n));
  const int nw = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nw == 1) {
    for (Eigen::Index b = 0; b < n; ++b) {
      sT[b] = control_to_terminal(prob.disc, wins[b]);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&, w] {
        for (Eigen::Index b = w; b < n; b += nw) {
          sT[b] = control_to_terminal(prob.disc, wins[b]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  StepSystem ss;
  ss.D = D;
  ss.H.resize(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index c = 0; c <= b; ++c) {
      double v = state_inner(prob.disc, sT[b], sT[c]);
      if (b == c) v += prob.alpha * D(b);  // disjoint supports: alpha-term is diagonal
      ss.H(b, c) = v;
      ss.H(c, b) = v;
    }
  }
  ss.theta = solve_step_lengths(ss.H, ss.D, D.cwiseSqrt(), gnorm);
  ss.predicted_decrease = -0.5 * ss.D.dot(ss.theta);
  return ss;
}

double control_energy(const ControlProblem& prob, const ControlField& v) {
  return control_inner(prob.disc, v, v);
}

OcpSolveResult run_algorithm3(const ControlProblem& prob,
                              Eigen::Index n_blocks, double tol, int max_iter,
                              const OcpOptions& opts) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw std::invalid_argument("run_algorithm3: need tol > 0 and max_iter >= 1");
  }
  OcpSolveResult out;
  out.v = zero_control(prob, n_blocks);
  const BlockPartition& part = out.v.partition;

  GradientResult gr = evaluate_gradient(prob, out.v.total);
  const double g0norm = std::sqrt(control_inner(prob.disc, gr.g, gr.g));
  if (g0norm == 0.0) {
    out.converged = true;
    out.final_cost = gr.J;
    out.yT = gr.yT;
    return out;
  }

  for (int k = 0; k < max_iter; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const double gnorm = std::sqrt(control_inner(prob.disc, gr.g, gr.g));
    if (!opts.max_iter_only && gnorm <= tol * g0norm) {
      out.converged = true;
      break;
    }
    StepSystem ss = assemble_Dk_Hk(prob, part, gr.g, opts.threads);

    OcpIterationRecord rec;
    rec.iter = k;
    rec.cost = gr.J;
    rec.grad_norm = gnorm;
    rec.theta = ss.theta;
    rec.kappa_H = spectral_condition(ss.H);
    rec.predicted_decrease = ss.predicted_decrease;
    const double sumH = ss.H.sum();  // == ||g||^2 in the Hessian metric
    rec.prop2_lower_bound =
        gnorm * gnorm * gnorm * gnorm / (2.0 * rec.kappa_H * sumH);
    if (std::isfinite(opts.kappa_underbar)) {
      const double ku = opts.kappa_underbar;
      rec.rate_bound_r = 1.0 - 4.0 * ku / (rec.kappa_H * (ku + 1.0) * (ku + 1.0));
    }

    for (Eigen::Index b = 0; b < part.num_blocks; ++b) {
      out.v.total.values.middleCols(part.block_begin(b), part.block_len) +=
          ss.theta(b) *
          gr.g.values.middleCols(part.block_begin(b), part.block_len);
    }
    const double prev_J = gr.J;
    gr = evaluate_gradient(prob, out.v.total);
    rec.actual_decrease = prev_J - gr.J;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out.history.push_back(std::move(rec));
  }
  if (!out.converged && !opts.max_iter_only) {
    out.converged =
        std::sqrt(control_inner(prob.disc, gr.g, gr.g)) <= tol * g0norm;
  }
  out.final_cost = gr.J;
  out.yT = gr.yT;
  return out;
}

}  // namespace blocksd
