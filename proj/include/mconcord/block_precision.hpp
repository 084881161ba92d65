#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>

#include "mconcord/partition.hpp"

namespace mconcord {

/// Block-sparse precision estimate: positive diagonal entries sigma^{ik}
/// and off-diagonal node blocks Omega_ij stored for i<j only (Omega_ji is
/// the transpose by symmetry). Absent blocks are exactly zero.
/// Off-diagonal entries within a node's own diagonal block are not part of
/// the parameterization.
class BlockPrecision {
public:
    using BlockKey = std::pair<int, int>;
    using BlockMap = std::map<BlockKey, Eigen::MatrixXd>;

    BlockPrecision(NodePartition partition, Eigen::VectorXd sigma);

    const NodePartition& partition() const { return partition_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }
    double sigma_at(int i, int k) const { return sigma_(partition_.flat_index(i, k)); }
    void set_sigma_at(int i, int k, double value);
    void set_sigma(Eigen::VectorXd sigma);

    bool has_block(int i, int j) const;
    /// K_i x K_j block; zero matrix when absent. Requires i < j.
    Eigen::MatrixXd block(int i, int j) const;
    /// Stores the block (i < j); exact-zero blocks are dropped from storage.
    void set_block(int i, int j, const Eigen::MatrixXd& value);
    void erase_block(int i, int j);
    const BlockMap& blocks() const { return blocks_; }

    /// Dense D x D symmetric assembly with zero off-diagonals inside
    /// diagonal blocks.
    Eigen::MatrixXd to_dense() const;

private:
    void check_pair(int i, int j) const;

    NodePartition partition_;
    Eigen::VectorXd sigma_;
    BlockMap blocks_;
};

/// Row-major flattening: entry (k,l) of a K_i x K_j block lands at
/// position k*K_j + l.
Eigen::VectorXd vectorize_block(const Eigen::MatrixXd& block);
Eigen::MatrixXd unvectorize_block(const Eigen::VectorXd& v, int rows, int cols);

}  // namespace mconcord
