#include "mconcord/edge_graph.hpp"

#include <stdexcept>
#include <string>

namespace mconcord {

EdgeGraph::EdgeGraph(int node_count) : p_(node_count) {
    if (node_count < 1) {
        throw std::invalid_argument("EdgeGraph: node count must be at least 1, got " +
                                    std::to_string(node_count));
    }
}

EdgeGraph::EdgeKey EdgeGraph::key(int i, int j) const {
    if (i == j) {
        throw std::invalid_argument("EdgeGraph: self-loops are not allowed (node " +
                                    std::to_string(i + 1) + ")");
    }
    if (i < 0 || j < 0 || i >= p_ || j >= p_) {
        throw std::invalid_argument("EdgeGraph: node index out of range for p=" +
                                    std::to_string(p_));
    }
    return i < j ? EdgeKey{i, j} : EdgeKey{j, i};
}

void EdgeGraph::add_edge(int i, int j, double weight) {
    EdgeKey k = key(i, j);
    if (!(weight > 0.0)) {
        throw std::invalid_argument("EdgeGraph: edge weight must be positive, got " +
                                    std::to_string(weight));
    }
    edges_[k] = weight;
}

bool EdgeGraph::has_edge(int i, int j) const {
    return edges_.count(key(i, j)) > 0;
}

double EdgeGraph::weight(int i, int j) const {
    auto it = edges_.find(key(i, j));
    return it == edges_.end() ? 0.0 : it->second;
}

EdgeGraph edge_graph_of(const BlockPrecision& est) {
    EdgeGraph graph(est.partition().node_count());
    for (const auto& [key, block] : est.blocks()) {
        double norm = block.norm();
        if (norm > 0.0) {
            graph.add_edge(key.first, key.second, norm);
        }
    }
    return graph;
}

}  // namespace mconcord
