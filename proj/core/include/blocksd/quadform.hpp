#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "blocksd/errors.hpp"
#include "blocksd/partition.hpp"

namespace blocksd {

/// q(x) = 1/2 x^T A x - x^T b with A symmetric positive definite.
/// Symmetry is checked exactly as stored; definiteness via a dense
/// factorization up to m = 512 and a diagonal-dominance certificate above.
class QuadraticProblem {
 public:
  QuadraticProblem(Eigen::MatrixXd A, Eigen::VectorXd b);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  Eigen::Index dim() const { return b_.size(); }

  double cost(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
};

/// A = (alpha + gamma*m) I + (R0 + R0^T)/2 with R0 uniform on [0,1],
/// b uniform on [-1,1], both drawn from one mt19937_64 stream.
/// Identical seeds give bit-identical problems.
QuadraticProblem random_spd(Eigen::Index m, double alpha, double gamma,
                            std::uint64_t seed);

Eigen::VectorXd gradient(const QuadraticProblem& p, const Eigen::VectorXd& x);

struct ClassicalStep {
  Eigen::VectorXd x_next;
  double theta;
};

/// One exact-line-search steepest-descent step: theta = -(r^T r)/(r^T A r).
ClassicalStep classical_sd_step(const QuadraticProblem& p,
                                const Eigen::VectorXd& x);

/// Per-iteration block Newton system: H theta = -D with
/// D_j = ||g_j||^2 and H_ij = g~_i^T A g~_j (g~ = zero-extended block of g).
struct StepSystem {
  Eigen::MatrixXd H;
  Eigen::VectorXd D;
  Eigen::VectorXd theta;
  double predicted_decrease = 0.0;  // 1/2 D^T H^{-1} D
};

/// Solves H theta = -D restricted to blocks with ||g_b|| >= 1e-14 ||g||
/// (block_norms/grad_norm drive the drop rule; dropped thetas are zero).
/// A singular active system gets one Levenberg-damped retry with
/// mu = 1e-12 trace(H)/n before SingularStepSystemError.
Eigen::VectorXd solve_step_lengths(const Eigen::MatrixXd& H,
                                   const Eigen::VectorXd& D,
                                   const Eigen::VectorXd& block_norms,
                                   double grad_norm);

StepSystem assemble_step_system(const QuadraticProblem& p,
                                const BlockPartition& part,
                                const Eigen::VectorXd& x);

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  Eigen::VectorXd theta;
  double kappa_H = 0.0;
  double predicted_decrease = 0.0;
  double actual_decrease = 0.0;
  double prop2_lower_bound = 0.0;
  double wall_ms = 0.0;
};

struct QuadSolveResult {
  Eigen::VectorXd x;
  std::vector<IterationRecord> history;
  bool converged = false;  // false means max_iter was reached
};

/// Spectral condition number of a symmetric matrix (dense eigensolve,
/// logging only). Returns NaN above n = 64.
double spectral_condition(const Eigen::MatrixXd& H);

/// Block steepest descent with Newton-computed vector step-lengths.
/// Stops when ||g|| <= tol * ||g0|| or after max_iter iterations.
QuadSolveResult enhanced_sd_solve(const QuadraticProblem& p,
                                  const BlockPartition& part,
                                  const Eigen::VectorXd& x0, double tol,
                                  int max_iter);

}  // namespace blocksd
