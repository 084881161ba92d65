#include "mconcord/block_precision.hpp"

#include <string>

namespace mconcord {

BlockPrecision::BlockPrecision(NodePartition partition, Eigen::VectorXd sigma)
    : partition_(std::move(partition)), sigma_(std::move(sigma)) {
    if (sigma_.size() != partition_.total_dim()) {
        throw std::invalid_argument("BlockPrecision: sigma length " +
                                    std::to_string(sigma_.size()) + " != total dimension " +
                                    std::to_string(partition_.total_dim()));
    }
    if (!(sigma_.minCoeff() > 0.0)) {
        throw std::invalid_argument("BlockPrecision: all sigma entries must be > 0");
    }
}

void BlockPrecision::set_sigma_at(int i, int k, double value) {
    if (!(value > 0.0)) {
        throw std::invalid_argument("BlockPrecision: sigma must be > 0");
    }
    sigma_(partition_.flat_index(i, k)) = value;
}

void BlockPrecision::set_sigma(Eigen::VectorXd sigma) {
    if (sigma.size() != partition_.total_dim() || !(sigma.minCoeff() > 0.0)) {
        throw std::invalid_argument("BlockPrecision: invalid sigma vector");
    }
    sigma_ = std::move(sigma);
}

void BlockPrecision::check_pair(int i, int j) const {
    if (i < 0 || j < 0 || i >= partition_.node_count() || j >= partition_.node_count()) {
        throw std::invalid_argument("BlockPrecision: node index out of range");
    }
    if (i >= j) {
        throw std::invalid_argument("BlockPrecision: blocks are keyed by i < j");
    }
}

bool BlockPrecision::has_block(int i, int j) const {
    check_pair(i, j);
    return blocks_.count({i, j}) > 0;
}

Eigen::MatrixXd BlockPrecision::block(int i, int j) const {
    check_pair(i, j);
    auto it = blocks_.find({i, j});
    if (it != blocks_.end()) return it->second;
    return Eigen::MatrixXd::Zero(partition_.dim(i), partition_.dim(j));
}

void BlockPrecision::set_block(int i, int j, const Eigen::MatrixXd& value) {
    check_pair(i, j);
    if (value.rows() != partition_.dim(i) || value.cols() != partition_.dim(j)) {
        throw std::invalid_argument("BlockPrecision: block (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") has wrong shape");
    }
    if (value.isZero(0.0)) {
        blocks_.erase({i, j});
    } else {
        blocks_[{i, j}] = value;
    }
}

void BlockPrecision::erase_block(int i, int j) {
    check_pair(i, j);
    blocks_.erase({i, j});
}

Eigen::MatrixXd BlockPrecision::to_dense() const {
    const int d = partition_.total_dim();
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(d, d);
    full.diagonal() = sigma_;
    for (const auto& [key, block] : blocks_) {
        const int ri = partition_.offset(key.first);
        const int cj = partition_.offset(key.second);
        full.block(ri, cj, block.rows(), block.cols()) = block;
        full.block(cj, ri, block.cols(), block.rows()) = block.transpose();
    }
    return full;
}

Eigen::VectorXd vectorize_block(const Eigen::MatrixXd& block) {
    Eigen::VectorXd v(block.size());
    Eigen::Index pos = 0;
    for (Eigen::Index k = 0; k < block.rows(); ++k) {
        for (Eigen::Index l = 0; l < block.cols(); ++l) {
            v(pos++) = block(k, l);
        }
    }
    return v;
}

Eigen::MatrixXd unvectorize_block(const Eigen::VectorXd& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
        throw std::invalid_argument("unvectorize_block: vector length does not match shape");
    }
    Eigen::MatrixXd block(rows, cols);
    Eigen::Index pos = 0;
    for (int k = 0; k < rows; ++k) {
        for (int l = 0; l < cols; ++l) {
            block(k, l) = v(pos++);
        }
    }
    return block;
}

}  // namespace mconcord
