#pragma once

#include "mconcord/edge_graph.hpp"
#include "mconcord/partition.hpp"

namespace mconcord {

/// Pairwise edge confusion over the C(p,2) unordered node pairs.
struct ConfusionCounts {
    long long tp = 0;
    long long tn = 0;
    long long fp = 0;
    long long fn = 0;
};

struct EdgeScores {
    double tpr = 0.0;
    double ppv = 0.0;
    double mcc = 0.0;
};

ConfusionCounts confusion(const EdgeGraph& est, const EdgeGraph& truth);

/// TPR = TP/(TP+FN), PPV = TP/(TP+FP), MCC with the product denominator.
/// Any zero denominator yields a score of 0.
EdgeScores scores(const ConfusionCounts& counts);

/// Collapses an edge graph over the D flat variables to the p nodes: a node
/// pair is connected iff some flat edge crosses the two nodes' column
/// ranges.  Flat edges inside a single node are ignored.  The node edge
/// weight is the root of the sum of squared crossing flat weights.
EdgeGraph aggregate_univariate_blocks(const EdgeGraph& flat_graph,
                                      const NodePartition& partition);

}  // namespace mconcord
