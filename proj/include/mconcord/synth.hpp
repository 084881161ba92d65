#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mconcord/dataset.hpp"
#include "mconcord/edge_graph.hpp"

namespace mconcord {

/// Recipe for a random block-sparse precision matrix: an Erdős–Rényi edge
/// set, uniform diagonal blocks, five-valued off-diagonal blocks, and a
/// diagonal shift that forces positive definiteness.
struct GeneratorConfig {
    int p = 10;
    int k = 2;
    double density = 0.1;
    int n = 100;
    std::uint64_t seed = 0;
    double diag_lo = 0.5;
    double diag_hi = 1.0;
    std::vector<double> offdiag_values = {0.0, 0.05, -0.05, -0.2, 0.2};
    double shift_margin = 0.5;
};

struct GroundTruth {
    Eigen::MatrixXd omega;       // pk x pk, symmetric positive definite
    EdgeGraph graph;             // true edges, weighted by block Frobenius norm
    Eigen::VectorXd sigma_true;  // diagonal of omega
    double rho = 0.0;            // applied diagonal shift
    GeneratorConfig config;
};

/// Draws a truth deterministically from cfg.seed.  Each matrix block has its
/// own derived random substream, so individual blocks are reproducible too.
/// An edge whose block happens to draw all zeros is redrawn; the edge set and
/// the nonzero block pattern always agree exactly.
GroundTruth generate_truth(const GeneratorConfig& cfg);

/// n i.i.d. rows from N(0, omega^{-1}), deterministic per seed.  The rows
/// are returned as drawn: not centered.
Dataset sample(const GroundTruth& truth, int n, std::uint64_t seed);

}  // namespace mconcord
