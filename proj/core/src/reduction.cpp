#include "blocksd/reduction.hpp"

#include <Eigen/Cholesky>

namespace blocksd {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> reduce_once(
    const Eigen::MatrixXd& H, const Eigen::VectorXd& D) {
  const Eigen::Index n = D.size();
  if (H.rows() != n || H.cols() != n) {
    throw std::invalid_argument("reduce_once: H/D dimension mismatch");
  }
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("reduce_once: block count must be even and >= 2");
  }
  const Eigen::Index half = n / 2;
  Eigen::MatrixXd Hh(half, half);
  Eigen::VectorXd Dh(half);
  for (Eigen::Index i = 0; i < half; ++i) {
    Dh(i) = D(2 * i) + D(2 * i + 1);
    for (Eigen::Index j = 0; j < half; ++j) {
      Hh(i, j) = H(2 * i, 2 * j) + H(2 * i, 2 * j + 1) + H(2 * i + 1, 2 * j) +
                 H(2 * i + 1, 2 * j + 1);
    }
  }
  return {std::move(Hh), std::move(Dh)};
}

double predict_cost(double J_current, const Eigen::MatrixXd& H,
                    const Eigen::VectorXd& D) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  if (ldlt.info() != Eigen::Success) throw SingularStepSystemError();
  const Eigen::VectorXd x = ldlt.solve(D);
  if ((H * x - D).norm() > 1e-8 * (D.norm() + 1e-300)) {
    throw SingularStepSystemError();
  }
  return J_current - 0.5 * D.dot(x);
}

PartitionSelection select_partition(double J_current, Eigen::MatrixXd H,
                                    Eigen::VectorXd D, double J_prev) {
  PartitionSelection sel;
  Eigen::Index n = D.size();
  double pred = predict_cost(J_current, H, D);
  sel.chain.levels.push_back({n, H, D, pred});
  while (pred > J_prev && n > 1 && n % 2 == 0) {
    std::tie(H, D) = reduce_once(H, D);
    n /= 2;
    pred = predict_cost(J_current, H, D);
    sel.chain.levels.push_back({n, H, D, pred});
  }
  sel.n_selected = n;
  return sel;
}

}  // namespace blocksd
