#include "mconcord/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "mconcord/rng.hpp"

namespace mconcord {

namespace {

void validate(const GeneratorConfig& cfg) {
    if (cfg.p < 2 || cfg.k < 1) {
        throw std::invalid_argument("generate_truth: need p >= 2 and k >= 1");
    }
    double pairs = 0.5 * cfg.p * (cfg.p - 1);
    if (!(cfg.density > 0.0) || cfg.density > 1.0 || cfg.density * pairs < 1.0) {
        throw std::invalid_argument(
            "generate_truth: density must lie in (0, 1] with density * C(p,2) >= 1");
    }
    if (!(cfg.diag_lo < cfg.diag_hi) || !(cfg.shift_margin > 0.0)) {
        throw std::invalid_argument("generate_truth: invalid diagonal range or shift margin");
    }
    if (cfg.offdiag_values.empty()) {
        throw std::invalid_argument("generate_truth: empty off-diagonal value set");
    }
}

}  // namespace

GroundTruth generate_truth(const GeneratorConfig& cfg) {
    validate(cfg);
    const int p = cfg.p;
    const int k = cfg.k;
    const int total = p * k;
    Rng master(cfg.seed);

    // Substream layout: 0 decides edge presence, 1..p the diagonal blocks,
    // then one stream per node pair in lexicographic order.
    Rng edge_rng = master.derive(0);
    std::vector<std::pair<int, int>> edges;
    int pair_rank = 0;
    std::vector<int> edge_rank;  // rank of each drawn edge's pair stream
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (edge_rng.bernoulli(cfg.density)) {
                edges.emplace_back(i, j);
                edge_rank.push_back(pair_rank);
            }
            ++pair_rank;
        }
    }

    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(total, total);
    for (int i = 0; i < p; ++i) {
        Rng block_rng = master.derive(1 + static_cast<std::uint64_t>(i));
        Eigen::MatrixXd block(k, k);
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) {
                block(r, c) = block_rng.uniform(cfg.diag_lo, cfg.diag_hi);
            }
        }
        omega.block(i * k, i * k, k, k) = 0.5 * (block + block.transpose());
    }

    EdgeGraph graph(p);
    const int value_count = static_cast<int>(cfg.offdiag_values.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [i, j] = edges[e];
        Rng block_rng = master.derive(1 + static_cast<std::uint64_t>(p) +
                                      static_cast<std::uint64_t>(edge_rank[e]));
        Eigen::MatrixXd block(k, k);
        do {
            for (int r = 0; r < k; ++r) {
                for (int c = 0; c < k; ++c) {
                    block(r, c) = cfg.offdiag_values[block_rng.pick(value_count)];
                }
            }
        } while (block.isZero(0.0));
        omega.block(i * k, j * k, k, k) = block;
        omega.block(j * k, i * k, k, k) = block.transpose();
        graph.add_edge(i, j, block.norm());
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(omega,
                                                         Eigen::EigenvaluesOnly);
    if (eigen.info() != Eigen::Success) {
        throw std::runtime_error("generate_truth: eigenvalue computation failed");
    }
    double rho = std::abs(eigen.eigenvalues().minCoeff()) + cfg.shift_margin;
    omega.diagonal().array() += rho;

    GroundTruth truth{std::move(omega), std::move(graph), {}, rho, cfg};
    truth.sigma_true = truth.omega.diagonal();
    return truth;
}

Dataset sample(const GroundTruth& truth, int n, std::uint64_t seed) {
    const int total = static_cast<int>(truth.omega.rows());
    if (n < 2) {
        throw std::invalid_argument("sample: need n >= 2");
    }

    // Sigma = omega^{-1}; rows are z M' with M M' = Sigma.
    Eigen::LLT<Eigen::MatrixXd> omega_llt(truth.omega);
    if (omega_llt.info() != Eigen::Success) {
        throw std::runtime_error("sample: truth precision matrix is not positive definite");
    }
    Eigen::MatrixXd covariance =
        omega_llt.solve(Eigen::MatrixXd::Identity(total, total));
    Eigen::LLT<Eigen::MatrixXd> cov_llt(covariance);
    if (cov_llt.info() != Eigen::Success) {
        throw std::runtime_error("sample: covariance factorization failed");
    }
    Eigen::MatrixXd factor = cov_llt.matrixL();

    Rng rng(seed);
    Eigen::MatrixXd draws(n, total);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < total; ++c) {
            draws(r, c) = rng.normal();
        }
    }
    Eigen::MatrixXd values = draws * factor.transpose();

    std::vector<int> dims(truth.config.p, truth.config.k);
    return Dataset(std::move(values), NodePartition(dims), /*center=*/false);
}

}  // namespace mconcord
