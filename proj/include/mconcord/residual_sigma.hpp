#pragma once

#include <Eigen/Dense>

#include "mconcord/dataset.hpp"

namespace mconcord {

/// Unpenalized estimate of the diagonal entries sigma^{ik}: each variable is
/// regressed on every variable of the other nodes, and the result is the
/// reciprocal of the residual variance e'e / (n - sum_{j != i} K_j).
/// Throws if any node's regression design is rank deficient or if n is too
/// small for the divisor to be positive.
Eigen::VectorXd estimate_residual_sigma(const Dataset& data);

}  // namespace mconcord
