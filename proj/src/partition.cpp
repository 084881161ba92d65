#include "mconcord/partition.hpp"

#include <algorithm>
#include <string>

namespace mconcord {

NodePartition::NodePartition(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw std::invalid_argument("NodePartition: need at least one node");
    }
    offsets_.reserve(dims_.size() + 1);
    offsets_.push_back(0);
    for (int k : dims_) {
        if (k < 1) {
            throw std::invalid_argument("NodePartition: node dimensions must be >= 1");
        }
        offsets_.push_back(offsets_.back() + k);
        max_dim_ = std::max(max_dim_, k);
    }
}

int NodePartition::flat_index(int i, int k) const {
    if (i < 0 || i >= node_count() || k < 0 || k >= dim(i)) {
        throw std::invalid_argument("NodePartition: component index (" + std::to_string(i) +
                                    "," + std::to_string(k) + ") out of range");
    }
    return offset(i) + k;
}

int NodePartition::node_of(int flat) const {
    if (flat < 0 || flat >= total_dim()) {
        throw std::invalid_argument("NodePartition: flat column " + std::to_string(flat) +
                                    " out of range");
    }
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
    return static_cast<int>(it - offsets_.begin()) - 1;
}

NodePartition NodePartition::flattened() const {
    return NodePartition(std::vector<int>(static_cast<std::size_t>(total_dim()), 1));
}

}  // namespace mconcord
