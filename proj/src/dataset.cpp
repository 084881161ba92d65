#include "mconcord/dataset.hpp"

#include <cmath>
#include <string>

namespace mconcord {

namespace {

// Detection threshold for the centered flag: |mean| <= 1e-12 * column sd.
bool columns_are_centered(const Eigen::MatrixXd& values) {
    const double n = static_cast<double>(values.rows());
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        const double mean = values.col(c).mean();
        const double sd = std::sqrt(
            (values.col(c).array() - mean).square().sum() / (n - 1.0));
        if (std::abs(mean) > 1e-12 * sd) return false;
    }
    return true;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd values, NodePartition partition, bool center)
    : values_(std::move(values)), partition_(std::move(partition)) {
    if (values_.rows() < 2) {
        throw std::invalid_argument("Dataset: need at least 2 samples");
    }
    if (values_.cols() != partition_.total_dim()) {
        throw std::invalid_argument("Dataset: matrix has " + std::to_string(values_.cols()) +
                                    " columns but partition expects " +
                                    std::to_string(partition_.total_dim()));
    }
    if (!values_.allFinite()) {
        throw std::invalid_argument("Dataset: non-finite value in data");
    }
    if (center) {
        values_.rowwise() -= values_.colwise().mean();
        centered_ = true;
    }
    const double n = static_cast<double>(values_.rows());
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
        const double mean = values_.col(c).mean();
        const double var = (values_.col(c).array() - mean).square().sum() / (n - 1.0);
        if (!(var > 0.0)) {
            throw std::invalid_argument("Dataset: column " + std::to_string(c + 1) +
                                        " has zero sample variance");
        }
    }
    if (!center) {
        centered_ = columns_are_centered(values_);
    }
}

Eigen::Ref<const Eigen::MatrixXd> Dataset::node_columns(int i) const {
    return values_.middleCols(partition_.offset(i), partition_.dim(i));
}

Eigen::Ref<const Eigen::VectorXd> Dataset::column(int flat) const {
    return values_.col(flat);
}

Dataset Dataset::subset_rows(const std::vector<int>& rows) const {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] < 0 || rows[r] >= sample_count()) {
            throw std::invalid_argument("Dataset: subset row index out of range");
        }
        sub.row(static_cast<Eigen::Index>(r)) = values_.row(rows[r]);
    }
    return Dataset(std::move(sub), partition_, /*center=*/false);
}

Dataset Dataset::flattened() const {
    Dataset flat(values_, partition_.flattened(), /*center=*/false);
    return flat;
}

Dataset center_columns(const Dataset& data) {
    return Dataset(data.values(), data.partition(), /*center=*/true);
}

Dataset standardize_columns(const Dataset& data) {
    Eigen::MatrixXd scaled = data.values();
    const Eigen::VectorXd sd = column_variances(data).array().sqrt();
    scaled.array().rowwise() /= sd.transpose().array();
    return Dataset(std::move(scaled), data.partition(), /*center=*/false);
}

Eigen::VectorXd column_variances(const Dataset& data) {
    const Eigen::MatrixXd& values = data.values();
    const double n = static_cast<double>(values.rows());
    Eigen::VectorXd var(values.cols());
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        const double mean = values.col(c).mean();
        var(c) = (values.col(c).array() - mean).square().sum() / (n - 1.0);
    }
    return var;
}

}  // namespace mconcord
