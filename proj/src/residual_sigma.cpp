#include "mconcord/residual_sigma.hpp"

#include <stdexcept>
#include <string>

namespace mconcord {

Eigen::VectorXd estimate_residual_sigma(const Dataset& data) {
    const NodePartition& part = data.partition();
    const Eigen::MatrixXd& values = data.values();
    const int n = data.sample_count();
    const int total = part.total_dim();
    const int p = part.node_count();

    Eigen::VectorXd sigma(total);
    for (int i = 0; i < p; ++i) {
        const int k_i = part.dim(i);
        const int other = total - k_i;
        const int divisor = n - other;
        if (divisor <= 0) {
            throw std::invalid_argument(
                "estimate_residual_sigma: node " + std::to_string(i + 1) + " needs n > " +
                std::to_string(other) + " samples, got n = " + std::to_string(n));
        }

        // Design shared by all variables of node i: the columns of every
        // other node, in flat order.
        Eigen::MatrixXd design(n, other);
        int col = 0;
        for (int j = 0; j < p; ++j) {
            if (j == i) continue;
            design.middleCols(col, part.dim(j)) = data.node_columns(j);
            col += part.dim(j);
        }

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < other) {
            throw std::runtime_error(
                "estimate_residual_sigma: regression design for node " + std::to_string(i + 1) +
                " is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                std::to_string(other) + ")");
        }

        for (int k = 0; k < k_i; ++k) {
            const auto target = values.col(part.flat_index(i, k));
            Eigen::VectorXd residual = target - design * qr.solve(target);
            double variance = residual.squaredNorm() / static_cast<double>(divisor);
            if (!(variance > 0.0)) {
                throw std::runtime_error(
                    "estimate_residual_sigma: zero residual variance for node " +
                    std::to_string(i + 1) + ", coordinate " + std::to_string(k + 1));
            }
            sigma(part.flat_index(i, k)) = 1.0 / variance;
        }
    }
    return sigma;
}

}  // namespace mconcord
