#pragma once

#include <Eigen/Dense>

#include "mconcord/block_precision.hpp"
#include "mconcord/dataset.hpp"

namespace mconcord {

/// Value of the penalized objective, split into its smooth and group parts.
struct ObjectiveValue {
    double loss = 0.0;
    double penalty = 0.0;
    double total = 0.0;
};

/// Residual matrix R with columns r_{ik} = sigma^{ik} Y_{ik} +
/// sum_{j != i} sum_l omega_{ijkl} Y_{jl}; equivalently Y * W for the dense
/// symmetric parameter matrix W.
Eigen::MatrixXd assemble_residuals(const BlockPrecision& est, const Dataset& data);

/// Smooth part of the objective:
/// (1/2) sum_{ik} (-log sigma^{ik} + (1/n) ||r_{ik}||^2).
double smooth_loss(const BlockPrecision& est, const Dataset& data);

/// Group penalty lambda * sum_{i<j} ||Omega_ij||_F over stored blocks.
double group_penalty(const BlockPrecision& est, double lambda);

ObjectiveValue objective_value(const BlockPrecision& est, const Dataset& data,
                               double lambda);

/// Gradient of smooth_loss with respect to block (i, j), as a K_i x K_j
/// matrix: (1/n) (R_i' Y_j + Y_i' R_j).  Requires i < j.
Eigen::MatrixXd block_gradient(const BlockPrecision& est, const Dataset& data,
                               int i, int j);

/// Same, but reusing a residual matrix already produced by
/// assemble_residuals for the same estimate.
Eigen::MatrixXd block_gradient_from_residuals(const Eigen::MatrixXd& residuals,
                                              const Dataset& data, int i, int j);

/// Partial derivative of smooth_loss with respect to sigma^{ik}:
/// -1/(2 sigma^{ik}) + (1/n) r_{ik}' Y_{ik}.
double sigma_gradient(const BlockPrecision& est, const Dataset& data, int i, int k);

/// General-weight pseudo-likelihood loss
/// (1/2) sum_{ik} (-log sigma^{ik} + (w_{ik}/n) ||Y_{ik} +
/// sum_{j != i} sum_l (omega_{ijkl}/sigma^{ik}) Y_{jl}||^2).
/// With w_{ik} = (sigma^{ik})^2 this equals smooth_loss.  Diagnostic only;
/// the solver always uses the squared-sigma weights.
double weighted_smooth_loss(const BlockPrecision& est, const Dataset& data,
                            const Eigen::VectorXd& weights);

}  // namespace mconcord
