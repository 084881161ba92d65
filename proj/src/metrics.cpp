#include "mconcord/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace mconcord {

ConfusionCounts confusion(const EdgeGraph& est, const EdgeGraph& truth) {
    if (est.node_count() != truth.node_count()) {
        throw std::invalid_argument("confusion: graphs disagree on node count");
    }
    const int p = est.node_count();
    ConfusionCounts counts;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            bool in_est = est.has_edge(i, j);
            bool in_truth = truth.has_edge(i, j);
            if (in_est && in_truth) {
                ++counts.tp;
            } else if (in_est) {
                ++counts.fp;
            } else if (in_truth) {
                ++counts.fn;
            } else {
                ++counts.tn;
            }
        }
    }
    return counts;
}

EdgeScores scores(const ConfusionCounts& counts) {
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    EdgeScores result;
    double tp = static_cast<double>(counts.tp);
    double tn = static_cast<double>(counts.tn);
    double fp = static_cast<double>(counts.fp);
    double fn = static_cast<double>(counts.fn);
    result.tpr = ratio(tp, tp + fn);
    result.ppv = ratio(tp, tp + fp);
    double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    result.mcc = ratio(tp * tn - fp * fn, denom);
    return result;
}

EdgeGraph aggregate_univariate_blocks(const EdgeGraph& flat_graph,
                                      const NodePartition& partition) {
    if (flat_graph.node_count() != partition.total_dim()) {
        throw std::invalid_argument(
            "aggregate_univariate_blocks: flat graph does not match the partition's "
            "total dimension");
    }
    std::map<std::pair<int, int>, double> squared;
    for (const auto& [key, weight] : flat_graph.edges()) {
        int i = partition.node_of(key.first);
        int j = partition.node_of(key.second);
        if (i == j) {
            continue;
        }
        squared[{std::min(i, j), std::max(i, j)}] += weight * weight;
    }
    EdgeGraph node_graph(partition.node_count());
    for (const auto& [key, sum] : squared) {
        node_graph.add_edge(key.first, key.second, std::sqrt(sum));
    }
    return node_graph;
}

}  // namespace mconcord
