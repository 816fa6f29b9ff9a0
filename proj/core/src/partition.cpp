#include "blocksd/partition.hpp"

namespace blocksd {

BlockPartition make_partition(Eigen::Index total_len, Eigen::Index num_blocks) {
  if (total_len < 1 || num_blocks < 1 || total_len < num_blocks) {
    throw std::invalid_argument("make_partition: need 1 <= num_blocks <= total_len");
  }
  if (total_len % num_blocks != 0) {
    throw NonDivisibleError(total_len, num_blocks);
  }
  return BlockPartition{total_len, num_blocks, total_len / num_blocks};
}

Eigen::VectorXd project(const BlockPartition& p, const Eigen::VectorXd& x,
                        Eigen::Index b) {
  if (x.size() != p.total_len) throw std::invalid_argument("project: length mismatch");
  if (b < 0 || b >= p.num_blocks) throw std::out_of_range("project: block index");
  return x.segment(p.block_begin(b), p.block_len);
}

Eigen::VectorXd extend_by_zero(const BlockPartition& p,
                               const Eigen::VectorXd& xb, Eigen::Index b) {
  if (xb.size() != p.block_len) throw std::invalid_argument("extend_by_zero: length mismatch");
  if (b < 0 || b >= p.num_blocks) throw std::out_of_range("extend_by_zero: block index");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.total_len);
  out.segment(p.block_begin(b), p.block_len) = xb;
  return out;
}

}  // namespace blocksd
