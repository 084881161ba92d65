#pragma once

#include <cstdint>
#include <vector>

#include "mconcord/dataset.hpp"
#include "mconcord/optimizer.hpp"

namespace mconcord {

/// Log-spaced penalty grid from lambda_max down to ratio * lambda_max.
struct LambdaGrid {
    std::vector<double> values;  // strictly decreasing
    double lambda_max = 0.0;
    double ratio = 0.01;
    int count = 30;

    static LambdaGrid make(double lambda_max, int count = 30, double ratio = 0.01);
};

struct CvConfig {
    int folds = 5;
    std::uint64_t seed = 0;
    LambdaGrid grid;
};

struct CvResult {
    LambdaGrid grid;
    std::vector<double> mean_loss;  // validation loss per grid value, mean over folds
    std::vector<double> sd_loss;
    int best_index = 0;
    double best_lambda = 0.0;
    int folds = 0;
    std::uint64_t seed = 0;
};

/// Smallest penalty at which the all-zero block solution is optimal: the
/// largest block-gradient norm at omega = 0, sigma = initial_sigma.
double lambda_max(const Dataset& data);

/// Deterministic balanced fold labels for rows 0..n-1, a pure function of
/// (n, folds, seed).
std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed);

/// K-fold cross-validation over cfg.grid.  Each fold sweeps the grid in
/// descending order with warm starts and scores the unpenalized loss on the
/// held-out rows.  Ties prefer the larger (sparser) lambda.  jobs > 1 runs
/// folds concurrently; results do not depend on jobs.
CvResult cross_validate(const Dataset& data, const CvConfig& cfg,
                        const FitConfig& fit_cfg, int jobs = 1);

/// Reporting utility only: 2n * loss + log(n) * (entries in active blocks).
/// Not used for selection anywhere; BIC is known to misbehave when nodes
/// carry more than one variable, so cross_validate is the selector.
double bic(const BlockPrecision& est, const Dataset& data);

}  // namespace mconcord
