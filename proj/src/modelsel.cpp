#include "mconcord/modelsel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "mconcord/objective.hpp"
#include "mconcord/rng.hpp"

namespace mconcord {

LambdaGrid LambdaGrid::make(double lambda_max, int count, double ratio) {
    if (!(lambda_max > 0.0)) {
        throw std::invalid_argument("LambdaGrid: lambda_max must be positive");
    }
    if (count < 1) {
        throw std::invalid_argument("LambdaGrid: need at least 1 grid point");
    }
    if (!(ratio > 0.0) || ratio >= 1.0) {
        throw std::invalid_argument("LambdaGrid: ratio must lie in (0, 1)");
    }

    LambdaGrid grid;
    grid.lambda_max = lambda_max;
    grid.ratio = ratio;
    grid.count = count;
    grid.values.resize(count);
    if (count == 1) {
        grid.values.front() = lambda_max;
        return grid;
    }
    for (int t = 0; t < count; ++t) {
        double frac = static_cast<double>(t) / static_cast<double>(count - 1);
        grid.values[t] = lambda_max * std::pow(ratio, frac);
    }
    // Pin the endpoints exactly; pow can be off in the last bit.
    grid.values.front() = lambda_max;
    grid.values.back() = lambda_max * ratio;
    return grid;
}

double lambda_max(const Dataset& data) {
    BlockPrecision empty(data.partition(), initial_sigma(data));
    Eigen::MatrixXd residuals = assemble_residuals(empty, data);
    const int p = data.partition().node_count();
    double best = 0.0;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            best = std::max(best,
                            block_gradient_from_residuals(residuals, data, i, j).norm());
        }
    }
    return best;
}

std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) {
        throw std::invalid_argument("fold_assignment: need 2 <= folds <= n");
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int t = n - 1; t > 0; --t) {
        std::swap(order[t], order[rng.pick(t + 1)]);
    }
    std::vector<int> labels(n);
    for (int t = 0; t < n; ++t) {
        labels[order[t]] = t % folds;
    }
    return labels;
}

namespace {

// Losses for every grid value on one held-out fold.
std::vector<double> fold_losses(const Dataset& data, const std::vector<int>& labels,
                                int fold, const LambdaGrid& grid,
                                const FitConfig& base_cfg) {
    std::vector<int> train_rows;
    std::vector<int> val_rows;
    for (int r = 0; r < data.sample_count(); ++r) {
        (labels[r] == fold ? val_rows : train_rows).push_back(r);
    }
    if (static_cast<int>(val_rows.size()) < 2 || static_cast<int>(train_rows.size()) < 2) {
        throw std::invalid_argument("cross_validate: fold " + std::to_string(fold + 1) +
                                    " leaves fewer than 2 rows on one side");
    }
    Dataset train = data.subset_rows(train_rows);
    Dataset validation = data.subset_rows(val_rows);

    // Row subsets of centered data are no longer exactly centered; that is
    // expected here, not a data problem.
    FitConfig cfg = base_cfg;
    cfg.accept_uncentered = true;

    std::vector<double> losses(grid.values.size());
    std::optional<BlockPrecision> warm;
    for (std::size_t t = 0; t < grid.values.size(); ++t) {
        cfg.lambda = grid.values[t];
        FitResult result = fit(train, cfg, warm);
        losses[t] = smooth_loss(result.estimate, validation);
        warm = result.estimate;
    }
    return losses;
}

}  // namespace

CvResult cross_validate(const Dataset& data, const CvConfig& cfg,
                        const FitConfig& fit_cfg, int jobs) {
    if (jobs < 1) {
        throw std::invalid_argument("cross_validate: jobs must be positive");
    }
    if (cfg.grid.values.empty()) {
        throw std::invalid_argument("cross_validate: empty lambda grid");
    }
    const int n = data.sample_count();
    std::vector<int> labels = fold_assignment(n, cfg.folds, cfg.seed);

    const std::size_t grid_size = cfg.grid.values.size();
    std::vector<std::vector<double>> per_fold(cfg.folds);

    if (jobs == 1) {
        for (int f = 0; f < cfg.folds; ++f) {
            per_fold[f] = fold_losses(data, labels, f, cfg.grid, fit_cfg);
        }
    } else {
        // One fold per worker; each fold writes only its own slot, so the
        // result cannot depend on scheduling.
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(cfg.folds);
        std::atomic<int> next{0};
        int worker_count = std::min(jobs, cfg.folds);
        for (int w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    int f = next.fetch_add(1);
                    if (f >= cfg.folds) {
                        return;
                    }
                    try {
                        per_fold[f] = fold_losses(data, labels, f, cfg.grid, fit_cfg);
                    } catch (...) {
                        errors[f] = std::current_exception();
                    }
                }
            });
        }
        for (auto& worker : workers) {
            worker.join();
        }
        for (const auto& err : errors) {
            if (err) {
                std::rethrow_exception(err);
            }
        }
    }

    CvResult result;
    result.grid = cfg.grid;
    result.folds = cfg.folds;
    result.seed = cfg.seed;
    result.mean_loss.resize(grid_size);
    result.sd_loss.resize(grid_size);
    for (std::size_t t = 0; t < grid_size; ++t) {
        double mean = 0.0;
        for (int f = 0; f < cfg.folds; ++f) {
            mean += per_fold[f][t];
        }
        mean /= cfg.folds;
        double var = 0.0;
        for (int f = 0; f < cfg.folds; ++f) {
            double diff = per_fold[f][t] - mean;
            var += diff * diff;
        }
        result.mean_loss[t] = mean;
        result.sd_loss[t] = cfg.folds > 1 ? std::sqrt(var / (cfg.folds - 1)) : 0.0;
    }

    // Grid is descending, so keeping the first strict minimum breaks ties
    // toward the larger, sparser lambda.
    result.best_index = 0;
    for (std::size_t t = 1; t < grid_size; ++t) {
        if (result.mean_loss[t] < result.mean_loss[result.best_index]) {
            result.best_index = static_cast<int>(t);
        }
    }
    result.best_lambda = cfg.grid.values[result.best_index];
    return result;
}

double bic(const BlockPrecision& est, const Dataset& data) {
    double n = static_cast<double>(data.sample_count());
    long long active_entries = 0;
    for (const auto& [key, block] : est.blocks()) {
        active_entries += block.size();
    }
    return 2.0 * n * smooth_loss(est, data) +
           std::log(n) * static_cast<double>(active_entries);
}

}  // namespace mconcord
