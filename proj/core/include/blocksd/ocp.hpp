#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blocksd/heat.hpp"
#include "blocksd/partition.hpp"
#include "blocksd/quadform.hpp"

namespace blocksd {

enum class ProblemLabel { P1, P2, P3, P4, Custom };

/// Terminal-tracking optimal control of the heat equation:
/// J(v) = 1/2 ||y(T) - y_target||^2_{L2} + alpha/2 * integral ||v||^2 dt.
struct ControlProblem {
  HeatDiscretization disc;
  ControlKind kind = ControlKind::Distributed;
  double alpha = 1e-2;
  Eigen::VectorXd y0;
  Eigen::VectorXd y_target;
  /// Source + boundary-lift contribution per time level (n_state x Nt),
  /// already scaled per forward_solve's extra_rhs convention.
  std::optional<Eigen::MatrixXd> extra_rhs;
  ProblemLabel label = ProblemLabel::Custom;
};

/// Problem bank. P1/P2/P4 are distributed by default; P3 is Dirichlet
/// boundary control with a manufactured exact solution. When
/// p3_exponent_T is false the target's exponential uses exp(2 pi^2 sigma)
/// instead of exp(2 pi^2 sigma T).
ControlProblem make_problem(ProblemLabel label, ControlKind kind, double alpha,
                            int nx, double sigma, double T, double tau,
                            bool p3_exponent_T = true);

/// Control split into n_blocks contiguous time windows. The blocks are
/// stored concatenated; window restrictions are materialized on demand.
struct DecomposedControl {
  BlockPartition partition;  // over the Nt control levels
  ControlField total;
};

DecomposedControl zero_control(const ControlProblem& prob,
                               Eigen::Index n_blocks);

/// Zero-extended restriction of a control to time window b.
ControlField window_restrict(const BlockPartition& part, const ControlField& c,
                             Eigen::Index b);

struct CostResult {
  double J = 0.0;
  Eigen::VectorXd yT;
};

/// One forward solve with the concatenated control.
CostResult evaluate_cost(const ControlProblem& prob, const ControlField& v);

struct GradientResult {
  double J = 0.0;
  Eigen::VectorXd yT;
  ControlField g;
};

/// One forward + one adjoint solve.
GradientResult evaluate_gradient(const ControlProblem& prob,
                                 const ControlField& v);

/// D_b = ||pi_b(g)||^2_{c,I};
/// H_{b,c} = alpha <pi_b g, pi_c g>_{c,I} + <S pi_b g, S pi_c g>_{L2},
/// built from n_blocks independent forward solves (run on `threads`
/// workers, gathered in block order). Theta solves H Theta = -D with the
/// same null-block/damping guard as the algebraic path.
StepSystem assemble_Dk_Hk(const ControlProblem& prob,
                          const BlockPartition& part, const ControlField& g,
                          int threads = 1);

struct OcpIterationRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  Eigen::VectorXd theta;
  double kappa_H = 0.0;
  double predicted_decrease = 0.0;
  double actual_decrease = 0.0;
  double prop2_lower_bound = 0.0;
  double rate_bound_r = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

struct OcpOptions {
  int threads = 1;
  /// Run exactly max_iter iterations, ignoring the gradient test
  /// (fixed-budget protocol).
  bool max_iter_only = false;
  /// Condition number of the full Hessian, when known (desk-scale
  /// estimation); enables the per-iteration rate bound monitor.
  double kappa_underbar = std::numeric_limits<double>::quiet_NaN();
};

struct OcpSolveResult {
  DecomposedControl v;
  std::vector<OcpIterationRecord> history;
  bool converged = false;
  double final_cost = 0.0;
  Eigen::VectorXd yT;
};

/// Block steepest descent on the control problem: per iteration one
/// forward + one adjoint solve plus n_blocks forward solves for the
/// Hessian columns; update v_b += theta_b * pi_b(g). Starts from v = 0
/// and stops on ||g|| <= tol * ||g0|| or max_iter.
OcpSolveResult run_algorithm3(const ControlProblem& prob,
                              Eigen::Index n_blocks, double tol, int max_iter,
                              const OcpOptions& opts = {});

/// integral ||v||^2 dt (reported alongside terminal errors).
double control_energy(const ControlProblem& prob, const ControlField& v);

}  // namespace blocksd
