#pragma once

#include <map>
#include <utility>

#include "mconcord/block_precision.hpp"
#include "mconcord/partition.hpp"

namespace mconcord {

/// Undirected node-level graph with Frobenius-norm edge weights.
/// Edges are keyed (i,j) with i < j, 0-based; no self-loops.
class EdgeGraph {
public:
    using EdgeKey = std::pair<int, int>;
    using EdgeMap = std::map<EdgeKey, double>;

    explicit EdgeGraph(int node_count);

    int node_count() const { return p_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const EdgeMap& edges() const { return edges_; }

    void add_edge(int i, int j, double weight);
    bool has_edge(int i, int j) const;
    double weight(int i, int j) const;

    bool operator==(const EdgeGraph& other) const {
        return p_ == other.p_ && edges_ == other.edges_;
    }

private:
    EdgeKey key(int i, int j) const;

    int p_ = 0;
    EdgeMap edges_;
};

/// Selected edge set of an estimate: one edge per stored nonzero block,
/// weighted by the block's Frobenius norm.
EdgeGraph edge_graph_of(const BlockPrecision& est);

}  // namespace mconcord
