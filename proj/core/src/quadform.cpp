#include "blocksd/quadform.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace blocksd {

namespace {
constexpr double kNullBlockRel = 1e-14;
constexpr double kResidualRel = 1e-10;
}  // namespace

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  const Eigen::Index m = b_.size();
  if (A_.rows() != m || A_.cols() != m) {
    throw std::invalid_argument("QuadraticProblem: A/b dimension mismatch");
  }
  if (A_ != A_.transpose()) {
    throw std::invalid_argument("QuadraticProblem: A is not symmetric as stored");
  }
  if (m <= 512) {
    Eigen::LLT<Eigen::MatrixXd> llt(A_);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("QuadraticProblem: A is not positive definite");
    }
  } else {
    // Diagonal-dominance certificate for large matrices.
    for (Eigen::Index i = 0; i < m; ++i) {
      double off = A_.row(i).cwiseAbs().sum() - std::abs(A_(i, i));
      if (A_(i, i) <= off) {
        throw std::invalid_argument(
            "QuadraticProblem: no diagonal-dominance certificate for m > 512");
      }
    }
  }
}

double QuadraticProblem::cost(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(A_ * x) - x.dot(b_);
}

QuadraticProblem random_spd(Eigen::Index m, double alpha, double gamma,
                            std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("random_spd: alpha must lie in (0,1)");
  }
  if (!(gamma > 1.0)) {
    throw std::invalid_argument("random_spd: gamma must exceed 1");
  }
  if (m < 1) throw std::invalid_argument("random_spd: m must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd R0(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) R0(i, j) = unit(rng);
  }
  Eigen::MatrixXd A = 0.5 * (R0 + R0.transpose());
  A.diagonal().array() += alpha + gamma * static_cast<double>(m);

  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) b(i) = sym(rng);

  return QuadraticProblem(std::move(A), std::move(b));
}

Eigen::VectorXd gradient(const QuadraticProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.dim()) throw std::invalid_argument("gradient: dimension mismatch");
  return p.A() * x - p.b();
}

ClassicalStep classical_sd_step(const QuadraticProblem& p,
                                const Eigen::VectorXd& x) {
  Eigen::VectorXd r = gradient(p, x);
  const double rr = r.squaredNorm();
  if (rr == 0.0) throw ZeroGradientError();
  const double rAr = r.dot(p.A() * r);
  const double theta = -rr / rAr;
  return ClassicalStep{x + theta * r, theta};
}

Eigen::VectorXd solve_step_lengths(const Eigen::MatrixXd& H,
                                   const Eigen::VectorXd& D,
                                   const Eigen::VectorXd& block_norms,
                                   double grad_norm) {
  const Eigen::Index n = D.size();
  if (grad_norm == 0.0) throw ZeroGradientError();

  std::vector<Eigen::Index> active;
  active.reserve(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    if (block_norms(b) >= kNullBlockRel * grad_norm) active.push_back(b);
  }
  if (active.empty()) throw ZeroGradientError();

  const Eigen::Index na = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd Ha(na, na);
  Eigen::VectorXd Da(na);
  for (Eigen::Index i = 0; i < na; ++i) {
    Da(i) = D(active[i]);
    for (Eigen::Index j = 0; j < na; ++j) Ha(i, j) = H(active[i], active[j]);
  }

  auto try_solve = [&](const Eigen::MatrixXd& M) -> std::pair<bool, Eigen::VectorXd> {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success) return {false, {}};
    Eigen::VectorXd t = ldlt.solve(-Da);
    double res = (Ha * t + Da).norm();
    return {res <= kResidualRel * Da.norm(), std::move(t)};
  };

  auto [ok, ta] = try_solve(Ha);
  if (!ok) {
    const double mu = 1e-12 * Ha.trace() / static_cast<double>(na);
    Eigen::MatrixXd damped = Ha;
    damped.diagonal().array() += mu;
    std::tie(ok, ta) = try_solve(damped);
    if (!ok) throw SingularStepSystemError();
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < na; ++i) theta(active[i]) = ta(i);
  return theta;
}

StepSystem assemble_step_system(const QuadraticProblem& p,
                                const BlockPartition& part,
                                const Eigen::VectorXd& x) {
  if (part.total_len != p.dim()) {
    throw std::invalid_argument("assemble_step_system: partition does not match problem");
  }
  const Eigen::Index n = part.num_blocks;
  Eigen::VectorXd g = gradient(p, x);
  const double gnorm = g.norm();
  if (gnorm == 0.0) throw ZeroGradientError();

  // A g~_j only touches the columns of block j.
  Eigen::MatrixXd Ag(p.dim(), n);
  Eigen::VectorXd block_norms(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto gj = g.segment(part.block_begin(j), part.block_len);
    block_norms(j) = gj.norm();
    Ag.col(j) = p.A().middleCols(part.block_begin(j), part.block_len) * gj;
  }

  StepSystem ss;
  ss.D.resize(n);
  ss.H.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) ss.D(j) = block_norms(j) * block_norms(j);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto gi = g.segment(part.block_begin(i), part.block_len);
    for (Eigen::Index j = 0; j < n; ++j) {
      ss.H(i, j) = gi.dot(Ag.col(j).segment(part.block_begin(i), part.block_len));
    }
  }
  ss.theta = solve_step_lengths(ss.H, ss.D, block_norms, gnorm);
  ss.predicted_decrease = -0.5 * ss.D.dot(ss.theta);
  return ss;
}

double spectral_condition(const Eigen::MatrixXd& H) {
  if (H.rows() > 64) return std::numeric_limits<double>::quiet_NaN();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev(0) <= 0.0) return std::numeric_limits<double>::infinity();
  return ev(ev.size() - 1) / ev(0);
}

QuadSolveResult enhanced_sd_solve(const QuadraticProblem& p,
                                  const BlockPartition& part,
                                  const Eigen::VectorXd& x0, double tol,
                                  int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw std::invalid_argument("enhanced_sd_solve: need tol > 0 and max_iter >= 1");
  }
  QuadSolveResult out;
  out.x = x0;
  double g0norm = gradient(p, x0).norm();
  if (g0norm == 0.0) {
    out.converged = true;
    return out;
  }

  double cost_prev = p.cost(out.x);
  for (int k = 0; k < max_iter; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd g = gradient(p, out.x);
    const double gnorm = g.norm();
    if (gnorm <= tol * g0norm) {
      out.converged = true;
      break;
    }
    StepSystem ss = assemble_step_system(p, part, out.x);
    for (Eigen::Index b = 0; b < part.num_blocks; ++b) {
      out.x.segment(part.block_begin(b), part.block_len) +=
          ss.theta(b) * g.segment(part.block_begin(b), part.block_len);
    }
    const double cost_next = p.cost(out.x);

    IterationRecord rec;
    rec.iter = k;
    rec.cost = cost_prev;
    rec.grad_norm = gnorm;
    rec.theta = ss.theta;
    rec.kappa_H = spectral_condition(ss.H);
    rec.predicted_decrease = ss.predicted_decrease;
    rec.actual_decrease = cost_prev - cost_next;
    // Sum of H entries equals ||g||^2 in the A metric.
    rec.prop2_lower_bound =
        gnorm * gnorm * gnorm * gnorm / (2.0 * rec.kappa_H * ss.H.sum());
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out.history.push_back(std::move(rec));
    cost_prev = cost_next;
  }
  if (!out.converged) {
    out.converged = gradient(p, out.x).norm() <= tol * g0norm;
  }
  return out;
}

}  // namespace blocksd
