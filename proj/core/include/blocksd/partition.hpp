#pragma once

#include <Eigen/Core>

#include "blocksd/errors.hpp"

namespace blocksd {

/// Uniform partition of an index range [0, total_len) into num_blocks
/// contiguous blocks of equal length. Immutable after construction.
///
/// Block indices are 0-based in code; block b covers
/// [b * block_len, (b+1) * block_len).
struct BlockPartition {
  Eigen::Index total_len = 0;
  Eigen::Index num_blocks = 0;
  Eigen::Index block_len = 0;

  Eigen::Index block_begin(Eigen::Index b) const { return b * block_len; }
};

/// Throws NonDivisibleError unless num_blocks divides total_len exactly.
BlockPartition make_partition(Eigen::Index total_len, Eigen::Index num_blocks);

/// Entries of x belonging to block b.
Eigen::VectorXd project(const BlockPartition& p, const Eigen::VectorXd& x,
                        Eigen::Index b);

/// Full-length vector with block b equal to xb and zeros elsewhere.
Eigen::VectorXd extend_by_zero(const BlockPartition& p,
                               const Eigen::VectorXd& xb, Eigen::Index b);

}  // namespace blocksd
