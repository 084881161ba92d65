#pragma once

#include <stdexcept>
#include <vector>

namespace mconcord {

/// Column layout of the concatenated observation vector: p nodes, node i
/// carrying dims[i] components. Flat column index of component k of node i
/// is offset(i) + k. Immutable after construction.
class NodePartition {
public:
    explicit NodePartition(std::vector<int> dims);

    int node_count() const { return static_cast<int>(dims_.size()); }
    int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
    int max_dim() const { return max_dim_; }
    int total_dim() const { return offsets_.back(); }
    const std::vector<int>& dims() const { return dims_; }

    /// First flat column belonging to node i.
    int offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
    /// Flat column of component k (0-based) of node i.
    int flat_index(int i, int k) const;
    /// Node owning flat column d.
    int node_of(int flat) const;

    /// Partition with every component its own node (all dims 1).
    NodePartition flattened() const;

    bool operator==(const NodePartition& other) const { return dims_ == other.dims_; }
    bool operator!=(const NodePartition& other) const { return !(*this == other); }

private:
    std::vector<int> dims_;
    std::vector<int> offsets_;  // prefix sums, size p+1
    int max_dim_ = 0;
};

}  // namespace mconcord
