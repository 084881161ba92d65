#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mconcord/partition.hpp"

namespace mconcord {

/// n samples of the concatenated vector, columns flat-indexed per the
/// partition. Every column must be finite with strictly positive sample
/// variance (the 1/variance initialization is undefined otherwise).
/// Immutable after construction; safe to share across threads.
class Dataset {
public:
    /// With center=true, column means are subtracted on ingestion.
    /// Otherwise the centered flag is detected from the data.
    Dataset(Eigen::MatrixXd values, NodePartition partition, bool center = true);

    const Eigen::MatrixXd& values() const { return values_; }
    const NodePartition& partition() const { return partition_; }
    int sample_count() const { return static_cast<int>(values_.rows()); }
    int total_dim() const { return static_cast<int>(values_.cols()); }
    bool centered() const { return centered_; }

    /// n x K_i view of node i's columns.
    Eigen::Ref<const Eigen::MatrixXd> node_columns(int i) const;
    Eigen::Ref<const Eigen::VectorXd> column(int flat) const;

    /// Row subset (e.g. a cross-validation fold). Re-validates; the centered
    /// flag is re-detected, so subsets of centered data are usually flagged
    /// uncentered.
    Dataset subset_rows(const std::vector<int>& rows) const;

    /// Same values viewed with every component as its own singleton node.
    Dataset flattened() const;

private:
    Eigen::MatrixXd values_;
    NodePartition partition_;
    bool centered_ = false;
};

Dataset center_columns(const Dataset& data);

/// Divides each (centered) column by its sample standard deviation.
Dataset standardize_columns(const Dataset& data);

/// Unbiased per-column sample variances.
Eigen::VectorXd column_variances(const Dataset& data);

}  // namespace mconcord
