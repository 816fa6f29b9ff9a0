#pragma once

#include <vector>

#include <Eigen/Core>

#include "blocksd/errors.hpp"

namespace blocksd {

/// One level of the partition-halving chain.
struct ReductionLevel {
  Eigen::Index n = 0;
  Eigen::MatrixXd H;
  Eigen::VectorXd D;
  double predicted_J_next = 0.0;
};

struct ReductionChain {
  std::vector<ReductionLevel> levels;
};

/// Pairwise aggregation: H_half = E H E^T, D_half = E D, where E sums
/// adjacent index pairs (2i, 2i+1). Throws on odd n.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> reduce_once(
    const Eigen::MatrixXd& H, const Eigen::VectorXd& D);

/// Quadratic-model prediction of the post-step cost:
/// J_next = J_current - 1/2 D^T H^{-1} D.
double predict_cost(double J_current, const Eigen::MatrixXd& H,
                    const Eigen::VectorXd& D);

struct PartitionSelection {
  Eigen::Index n_selected = 0;
  ReductionChain chain;
};

/// Partition-halving loop: while the current level's predicted next cost
/// still exceeds J_prev (the step would not descend), halve the
/// partition by pairwise aggregation. Stops at the first descending
/// level, at n = 1, or at the first odd block count. Predictions are
/// taken from J_current; the full chain is returned for logging.
PartitionSelection select_partition(double J_current, Eigen::MatrixXd H,
                                    Eigen::VectorXd D, double J_prev);

}  // namespace blocksd
