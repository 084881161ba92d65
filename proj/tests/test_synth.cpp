#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "mconcord/synth.hpp"

using namespace mconcord;

TEST_CASE("generate_truth keeps the spectrum clear of zero") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GeneratorConfig cfg;
        cfg.p = 6 + static_cast<int>(seed % 3);
        cfg.k = 1 + static_cast<int>(seed % 4);
        cfg.density = 0.2;
        cfg.seed = seed;
        GroundTruth truth = generate_truth(cfg);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            truth.omega, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() >= cfg.shift_margin - 1e-8);
        CHECK((truth.omega - truth.omega.transpose()).cwiseAbs().maxCoeff() ==
              0.0);
    }
}

TEST_CASE("generate_truth smallest case: one edge, nonzero entry") {
    GeneratorConfig cfg;
    cfg.p = 2;
    cfg.k = 1;
    cfg.density = 1.0;
    cfg.seed = 3;
    GroundTruth truth = generate_truth(cfg);
    CHECK(truth.graph.edge_count() == 1);
    CHECK(truth.graph.has_edge(0, 1));
    double entry = truth.omega(0, 1);
    std::set<double> legal = {0.05, -0.05, 0.2, -0.2};
    CHECK(legal.count(entry) == 1);
    CHECK(truth.omega(1, 0) == entry);
}

TEST_CASE("generate_truth is bit-identical across calls") {
    GeneratorConfig cfg;
    cfg.p = 8;
    cfg.k = 3;
    cfg.density = 0.25;
    cfg.seed = 77;
    GroundTruth a = generate_truth(cfg);
    GroundTruth b = generate_truth(cfg);
    CHECK((a.omega - b.omega).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.graph == b.graph);
    CHECK(a.rho == b.rho);

    cfg.seed = 78;
    GroundTruth c = generate_truth(cfg);
    CHECK((a.omega - c.omega).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("off-diagonal blocks vanish exactly off the edge set") {
    GeneratorConfig cfg;
    cfg.p = 7;
    cfg.k = 2;
    cfg.density = 0.3;
    cfg.seed = 13;
    GroundTruth truth = generate_truth(cfg);
    for (int i = 0; i < cfg.p; ++i) {
        for (int j = i + 1; j < cfg.p; ++j) {
            Eigen::MatrixXd block =
                truth.omega.block(i * cfg.k, j * cfg.k, cfg.k, cfg.k);
            if (truth.graph.has_edge(i, j)) {
                CHECK(block.cwiseAbs().maxCoeff() > 0.0);
                CHECK(truth.graph.weight(i, j) ==
                      doctest::Approx(block.norm()).epsilon(1e-12));
            } else {
                CHECK(block.cwiseAbs().maxCoeff() == 0.0);
            }
        }
    }
    CHECK((truth.sigma_true - truth.omega.diagonal()).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(truth.sigma_true.minCoeff() > 0.0);
}

TEST_CASE("diagonal blocks sit in the configured range plus the shift") {
    GeneratorConfig cfg;
    cfg.p = 5;
    cfg.k = 3;
    cfg.density = 0.2;
    cfg.seed = 29;
    GroundTruth truth = generate_truth(cfg);
    for (int i = 0; i < cfg.p; ++i) {
        Eigen::MatrixXd block =
            truth.omega.block(i * cfg.k, i * cfg.k, cfg.k, cfg.k);
        CHECK((block - block.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int k = 0; k < cfg.k; ++k) {
            for (int l = 0; l < cfg.k; ++l) {
                double raw = block(k, l) - (k == l ? truth.rho : 0.0);
                CHECK(raw >= cfg.diag_lo - 1e-12);
                CHECK(raw <= cfg.diag_hi + 1e-12);
            }
        }
    }
    CHECK(truth.rho > 0.0);
}

TEST_CASE("generate_truth rejects unusable configurations") {
    GeneratorConfig cfg;
    cfg.p = 1;
    CHECK_THROWS_AS(generate_truth(cfg), std::invalid_argument);
    cfg = GeneratorConfig{};
    cfg.k = 0;
    CHECK_THROWS_AS(generate_truth(cfg), std::invalid_argument);
    cfg = GeneratorConfig{};
    cfg.density = 0.0;
    CHECK_THROWS_AS(generate_truth(cfg), std::invalid_argument);
    cfg = GeneratorConfig{};
    cfg.p = 3;
    cfg.density = 0.1;  // 0.1 * 3 pairs < 1 expected edge
    CHECK_THROWS_AS(generate_truth(cfg), std::invalid_argument);
    cfg = GeneratorConfig{};
    cfg.diag_lo = 1.0;
    cfg.diag_hi = 0.5;
    CHECK_THROWS_AS(generate_truth(cfg), std::invalid_argument);
    cfg = GeneratorConfig{};
    cfg.offdiag_values.clear();
    CHECK_THROWS_AS(generate_truth(cfg), std::invalid_argument);
}

TEST_CASE("sample draws from the intended Gaussian") {
    GeneratorConfig cfg;
    cfg.p = 2;
    cfg.k = 1;
    cfg.density = 1.0;
    cfg.seed = 31;
    GroundTruth truth = generate_truth(cfg);
    Eigen::MatrixXd covariance = truth.omega.inverse();

    const int n = 100000;
    Dataset data = sample(truth, n, 5);
    CHECK(data.sample_count() == n);
    CHECK(data.partition() == NodePartition({1, 1}));

    const Eigen::MatrixXd& values = data.values();
    Eigen::RowVectorXd mean = values.colwise().mean();
    // CLT bound: each mean is within 4 standard errors almost surely.
    for (int c = 0; c < 2; ++c) {
        double se = std::sqrt(covariance(c, c) / n);
        CHECK(std::abs(mean(c)) < 4.0 * se);
    }
    Eigen::MatrixXd centered = values.rowwise() - mean;
    Eigen::MatrixXd sample_cov = centered.transpose() * centered / (n - 1);
    CHECK((sample_cov - covariance).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample is deterministic in its seed") {
    GeneratorConfig cfg;
    cfg.p = 3;
    cfg.k = 2;
    cfg.density = 0.5;
    cfg.seed = 37;
    GroundTruth truth = generate_truth(cfg);
    Dataset a = sample(truth, 25, 9);
    Dataset b = sample(truth, 25, 9);
    CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() == 0.0);
    Dataset c = sample(truth, 25, 10);
    CHECK((a.values() - c.values()).cwiseAbs().maxCoeff() > 0.0);

    CHECK_THROWS_AS(sample(truth, 1, 9), std::invalid_argument);
}
