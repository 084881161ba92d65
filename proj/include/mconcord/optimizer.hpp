#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mconcord/block_precision.hpp"
#include "mconcord/dataset.hpp"

namespace mconcord {

/// Knobs for a single penalized fit.
struct FitConfig {
    double lambda = 0.0;
    double tol = 1e-6;
    int max_sweeps = 500;
    int max_prox_iters = 100;
    double sigma_floor = 1e-8;
    double kkt_tol = 1e-4;
    /// The loss assumes column means of zero; fitting uncentered data is
    /// almost always a mistake, so it must be acknowledged explicitly.
    bool accept_uncentered = false;
};

/// First-order optimality certificate.  A point solves the problem iff the
/// gradient of every zero block has norm at most lambda and the gradient of
/// every active block equals -lambda * block / ||block||.
struct KktReport {
    double max_inactive_violation = 0.0;  // max over zero blocks of ||grad|| - lambda
    double max_active_residual = 0.0;     // max entry of grad + lambda * block/||block||
    double max_sigma_residual = 0.0;      // max |d loss / d sigma|, informational
    double tol = 0.0;
    bool satisfied = false;
};

struct FitResult {
    BlockPrecision estimate;
    std::vector<double> objective_trace;  // initial value, then one per sweep
    int sweeps = 0;
    bool converged = false;
    KktReport kkt;
};

/// Proximal map of t * ||.||_2: shrink z toward zero by t in norm, or to
/// exactly zero if ||z|| <= t.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& z, double t);

/// Starting diagonal: sigma^{ik} = 1 / sample variance of column (i,k).
Eigen::VectorXd initial_sigma(const Dataset& data);

/// One proximal-gradient solve of the subproblem for block (i, j), holding
/// everything else fixed.  Returns the updated block; est is not modified.
Eigen::MatrixXd block_prox_step(int i, int j, const BlockPrecision& est,
                                const Dataset& data, const FitConfig& cfg);

/// Closed-form minimizer of the objective in sigma^{ik} alone:
/// [-c + sqrt(c^2 + 2nq)] / (2q) with q = Y'Y and c = Y' (cross terms).
double sigma_update(int i, int k, const BlockPrecision& est, const Dataset& data,
                    double sigma_floor = 1e-8);

/// Cyclic block coordinate descent: per sweep, a proximal step for every
/// pair i < j in lexicographic order, then the closed-form sigma updates.
/// Stops when both the relative objective change and the largest parameter
/// change fall below cfg.tol.  Non-convergence is reported, not thrown.
FitResult fit(const Dataset& data, const FitConfig& cfg,
              const std::optional<BlockPrecision>& init = std::nullopt);

KktReport kkt_certificate(const BlockPrecision& est, const Dataset& data,
                          double lambda, double kkt_tol);

namespace detail {

/// Backtracking proximal gradient on the block subproblem in Gram form:
///   minimize <g0, W> + (tr(W s_jj W') + tr(W' s_ii W)) / 2 + lambda ||W||_F.
/// g0 is the smooth gradient at W = 0.  Iterates from start until the
/// largest entry change of one step is below tol.
Eigen::MatrixXd solve_block_subproblem(const Eigen::MatrixXd& g0,
                                       const Eigen::MatrixXd& s_ii,
                                       const Eigen::MatrixXd& s_jj,
                                       const Eigen::MatrixXd& start, double lambda,
                                       double tol, int max_iters);

}  // namespace detail

}  // namespace mconcord
