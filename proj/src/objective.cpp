#include "mconcord/objective.hpp"

#include <stdexcept>
#include <string>

namespace mconcord {

namespace {

void require_same_partition(const BlockPrecision& est, const Dataset& data) {
    if (est.partition() != data.partition()) {
        throw std::invalid_argument("objective: estimate and data use different partitions");
    }
}

}  // namespace

Eigen::MatrixXd assemble_residuals(const BlockPrecision& est, const Dataset& data) {
    require_same_partition(est, data);
    const NodePartition& part = data.partition();
    const Eigen::MatrixXd& values = data.values();

    Eigen::MatrixXd residuals = values * est.sigma().asDiagonal();
    for (const auto& [key, block] : est.blocks()) {
        const auto y_i = data.node_columns(key.first);
        const auto y_j = data.node_columns(key.second);
        const int off_i = part.offset(key.first);
        const int off_j = part.offset(key.second);
        residuals.middleCols(off_i, part.dim(key.first)).noalias() += y_j * block.transpose();
        residuals.middleCols(off_j, part.dim(key.second)).noalias() += y_i * block;
    }
    return residuals;
}

double smooth_loss(const BlockPrecision& est, const Dataset& data) {
    require_same_partition(est, data);
    Eigen::MatrixXd residuals = assemble_residuals(est, data);
    double quadratic = residuals.squaredNorm() / static_cast<double>(data.sample_count());
    double log_part = est.sigma().array().log().sum();
    return 0.5 * (quadratic - log_part);
}

double group_penalty(const BlockPrecision& est, double lambda) {
    if (lambda < 0.0) {
        throw std::invalid_argument("group_penalty: lambda must be nonnegative, got " +
                                    std::to_string(lambda));
    }
    double sum = 0.0;
    for (const auto& [key, block] : est.blocks()) {
        sum += block.norm();
    }
    return lambda * sum;
}

ObjectiveValue objective_value(const BlockPrecision& est, const Dataset& data,
                               double lambda) {
    ObjectiveValue value;
    value.loss = smooth_loss(est, data);
    value.penalty = group_penalty(est, lambda);
    value.total = value.loss + value.penalty;
    return value;
}

Eigen::MatrixXd block_gradient_from_residuals(const Eigen::MatrixXd& residuals,
                                              const Dataset& data, int i, int j) {
    const NodePartition& part = data.partition();
    if (i == j) {
        throw std::invalid_argument("block_gradient: diagonal blocks are not parameters");
    }
    if (i < 0 || j >= part.node_count() || i >= j) {
        throw std::invalid_argument("block_gradient: need 0 <= i < j < p");
    }
    const auto y_i = data.node_columns(i);
    const auto y_j = data.node_columns(j);
    const auto r_i = residuals.middleCols(part.offset(i), part.dim(i));
    const auto r_j = residuals.middleCols(part.offset(j), part.dim(j));
    double n = static_cast<double>(data.sample_count());
    return (r_i.transpose() * y_j + y_i.transpose() * r_j) / n;
}

Eigen::MatrixXd block_gradient(const BlockPrecision& est, const Dataset& data,
                               int i, int j) {
    require_same_partition(est, data);
    return block_gradient_from_residuals(assemble_residuals(est, data), data, i, j);
}

double sigma_gradient(const BlockPrecision& est, const Dataset& data, int i, int k) {
    require_same_partition(est, data);
    const NodePartition& part = data.partition();
    const int flat = part.flat_index(i, k);
    const double sigma = est.sigma_at(i, k);
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("sigma_gradient: sigma must be positive");
    }

    // r_{ik} touches only the blocks incident to node i.
    const auto y_col = data.values().col(flat);
    Eigen::VectorXd residual = sigma * y_col;
    for (const auto& [key, block] : est.blocks()) {
        if (key.first == i) {
            residual.noalias() +=
                data.node_columns(key.second) * block.row(k).transpose();
        } else if (key.second == i) {
            residual.noalias() += data.node_columns(key.first) * block.col(k);
        }
    }
    double n = static_cast<double>(data.sample_count());
    return -0.5 / sigma + residual.dot(y_col) / n;
}

double weighted_smooth_loss(const BlockPrecision& est, const Dataset& data,
                            const Eigen::VectorXd& weights) {
    require_same_partition(est, data);
    if (weights.size() != data.total_dim()) {
        throw std::invalid_argument("weighted_smooth_loss: weight vector has wrong length");
    }
    if (weights.minCoeff() < 0.0 || !weights.allFinite()) {
        throw std::invalid_argument("weighted_smooth_loss: weights must be finite and nonnegative");
    }

    // ||Y_{ik} + sum (omega/sigma) Y_{jl}||^2 = ||r_{ik}||^2 / (sigma^{ik})^2.
    Eigen::MatrixXd residuals = assemble_residuals(est, data);
    const Eigen::VectorXd& sigma = est.sigma();
    double n = static_cast<double>(data.sample_count());
    double sum = 0.0;
    for (int d = 0; d < data.total_dim(); ++d) {
        double scaled = residuals.col(d).squaredNorm() / (sigma(d) * sigma(d));
        sum += -std::log(sigma(d)) + weights(d) / n * scaled;
    }
    return 0.5 * sum;
}

}  // namespace mconcord
