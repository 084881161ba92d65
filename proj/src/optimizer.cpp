#include "mconcord/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mconcord/objective.hpp"

namespace mconcord {

namespace {

void validate_config(const FitConfig& cfg) {
    if (cfg.lambda < 0.0) {
        throw std::invalid_argument("fit: lambda must be nonnegative");
    }
    if (!(cfg.tol > 0.0) || cfg.max_sweeps < 1 || cfg.max_prox_iters < 1 ||
        !(cfg.sigma_floor > 0.0) || !(cfg.kkt_tol > 0.0)) {
        throw std::invalid_argument("fit: tol, max_sweeps, max_prox_iters, sigma_floor and "
                                    "kkt_tol must all be positive");
    }
}

std::string block_name(int i, int j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

// Shrink a matrix toward zero by t in Frobenius norm, or to zero entirely.
Eigen::MatrixXd shrink(const Eigen::MatrixXd& z, double t) {
    double norm = z.norm();
    if (norm > t) {
        return (1.0 - t / norm) * z;
    }
    return Eigen::MatrixXd::Zero(z.rows(), z.cols());
}

}  // namespace

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& z, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("group_soft_threshold: threshold must be nonnegative");
    }
    return shrink(z, t);
}

Eigen::VectorXd initial_sigma(const Dataset& data) {
    return column_variances(data).cwiseInverse();
}

namespace detail {

Eigen::MatrixXd solve_block_subproblem(const Eigen::MatrixXd& g0,
                                       const Eigen::MatrixXd& s_ii,
                                       const Eigen::MatrixXd& s_jj,
                                       const Eigen::MatrixXd& start, double lambda,
                                       double tol, int max_iters) {
    Eigen::MatrixXd w = start;
    for (int iter = 0; iter < max_iters; ++iter) {
        Eigen::MatrixXd grad = g0 + s_ii * w + w * s_jj;
        if (!grad.allFinite()) {
            throw std::runtime_error("block subproblem gradient is not finite");
        }

        // Backtracking line search: halve the step until the quadratic upper
        // model at step s dominates the smooth part.  The smooth part is an
        // exact quadratic, so the sufficient-decrease test
        //   f(w') <= f(w) + <grad, w' - w> + ||w' - w||^2 / (2s)
        // reduces to comparing the curvature term against ||w' - w||^2 / (2s);
        // testing it in that difference form avoids cancellation near the
        // solution.
        double s = 1.0;
        Eigen::MatrixXd w_new;
        while (true) {
            w_new = shrink(w - s * grad, lambda * s);
            Eigen::MatrixXd diff = w_new - w;
            double curvature = 0.5 * (diff.cwiseProduct(s_ii * diff).sum() +
                                      diff.cwiseProduct(diff * s_jj).sum());
            double model = diff.squaredNorm() / (2.0 * s);
            if (std::isfinite(curvature) && curvature <= model * (1.0 + 1e-12)) {
                break;
            }
            s *= 0.5;
            if (s < 1e-30) {
                throw std::runtime_error("block subproblem line search step underflow");
            }
        }

        double change = (w_new - w).cwiseAbs().maxCoeff();
        w = w_new;
        if (change < tol) {
            break;
        }
    }
    return w;
}

}  // namespace detail

namespace {

// Shared state for one fit: data views, Gram diagonal blocks, and the
// incrementally maintained residual matrix.
struct Workspace {
    const Dataset& data;
    const NodePartition& part;
    double n;
    std::vector<Eigen::MatrixXd> gram;  // gram[i] = Y_i' Y_i / n
    Eigen::VectorXd column_sq;          // column_sq(d) = Y_d' Y_d
    Eigen::MatrixXd residuals;          // n x D, columns r_{ik}

    explicit Workspace(const Dataset& d, const BlockPrecision& est)
        : data(d), part(d.partition()), n(static_cast<double>(d.sample_count())) {
        gram.reserve(part.node_count());
        for (int i = 0; i < part.node_count(); ++i) {
            const auto y_i = data.node_columns(i);
            gram.push_back(y_i.transpose() * y_i / n);
        }
        column_sq = data.values().colwise().squaredNorm();
        residuals = assemble_residuals(est, data);
    }

    Eigen::MatrixXd full_gradient(int i, int j) const {
        const auto y_i = data.node_columns(i);
        const auto y_j = data.node_columns(j);
        const auto r_i = residuals.middleCols(part.offset(i), part.dim(i));
        const auto r_j = residuals.middleCols(part.offset(j), part.dim(j));
        return (r_i.transpose() * y_j + y_i.transpose() * r_j) / n;
    }

    void apply_block_delta(int i, int j, const Eigen::MatrixXd& delta) {
        const auto y_i = data.node_columns(i);
        const auto y_j = data.node_columns(j);
        residuals.middleCols(part.offset(i), part.dim(i)).noalias() +=
            y_j * delta.transpose();
        residuals.middleCols(part.offset(j), part.dim(j)).noalias() += y_i * delta;
    }

    void apply_sigma_delta(int flat, double delta) {
        residuals.col(flat) += delta * data.values().col(flat);
    }

    // Smooth loss read off the maintained residuals.
    double smooth(const Eigen::VectorXd& sigma) const {
        return 0.5 * (residuals.squaredNorm() / n - sigma.array().log().sum());
    }
};

}  // namespace

Eigen::MatrixXd block_prox_step(int i, int j, const BlockPrecision& est,
                                const Dataset& data, const FitConfig& cfg) {
    validate_config(cfg);
    if (est.partition() != data.partition()) {
        throw std::invalid_argument("block_prox_step: estimate and data use different partitions");
    }
    Workspace ws(data, est);
    Eigen::MatrixXd current = est.block(i, j);
    Eigen::MatrixXd g0 = ws.full_gradient(i, j) - ws.gram[i] * current - current * ws.gram[j];
    Eigen::MatrixXd updated;
    try {
        updated = detail::solve_block_subproblem(g0, ws.gram[i], ws.gram[j], current,
                                                 cfg.lambda, cfg.tol, cfg.max_prox_iters);
    } catch (const std::runtime_error& err) {
        throw std::runtime_error("block " + block_name(i, j) + ": " + err.what());
    }
    if (!updated.allFinite()) {
        throw std::runtime_error("block " + block_name(i, j) + ": update is not finite");
    }
    return updated;
}

double sigma_update(int i, int k, const BlockPrecision& est, const Dataset& data,
                    double sigma_floor) {
    if (est.partition() != data.partition()) {
        throw std::invalid_argument("sigma_update: estimate and data use different partitions");
    }
    const NodePartition& part = data.partition();
    const int flat = part.flat_index(i, k);
    const auto y_col = data.values().col(flat);
    const double q = y_col.squaredNorm();
    if (!(q > 0.0)) {
        throw std::invalid_argument("sigma_update: column " + std::to_string(flat + 1) +
                                    " has zero norm");
    }

    // c = Y_{ik}' (cross terms) where the cross terms are r_{ik} minus the
    // sigma part.
    double c = 0.0;
    for (const auto& [key, block] : est.blocks()) {
        if (key.first == i) {
            c += y_col.dot(data.node_columns(key.second) * block.row(k).transpose());
        } else if (key.second == i) {
            c += y_col.dot(data.node_columns(key.first) * block.col(k));
        }
    }
    double n = static_cast<double>(data.sample_count());
    double root = (-c + std::sqrt(c * c + 2.0 * n * q)) / (2.0 * q);
    return std::max(root, sigma_floor);
}

KktReport kkt_certificate(const BlockPrecision& est, const Dataset& data,
                          double lambda, double kkt_tol) {
    if (lambda < 0.0 || !(kkt_tol > 0.0)) {
        throw std::invalid_argument("kkt_certificate: need lambda >= 0 and kkt_tol > 0");
    }
    const NodePartition& part = data.partition();
    Eigen::MatrixXd residuals = assemble_residuals(est, data);
    double n = static_cast<double>(data.sample_count());

    KktReport report;
    report.tol = kkt_tol;
    report.max_inactive_violation = -lambda;  // floor: a zero gradient has ||g|| - lambda = -lambda
    for (int i = 0; i < part.node_count(); ++i) {
        for (int j = i + 1; j < part.node_count(); ++j) {
            Eigen::MatrixXd grad = block_gradient_from_residuals(residuals, data, i, j);
            if (est.has_block(i, j)) {
                const Eigen::MatrixXd& block = est.block(i, j);
                double norm = block.norm();
                double residual =
                    (grad + (lambda / norm) * block).cwiseAbs().maxCoeff();
                report.max_active_residual = std::max(report.max_active_residual, residual);
            } else {
                report.max_inactive_violation =
                    std::max(report.max_inactive_violation, grad.norm() - lambda);
            }
        }
    }
    for (int d = 0; d < part.total_dim(); ++d) {
        double grad = -0.5 / est.sigma()(d) +
                      residuals.col(d).dot(data.values().col(d)) / n;
        report.max_sigma_residual = std::max(report.max_sigma_residual, std::fabs(grad));
    }
    report.satisfied = report.max_inactive_violation <= kkt_tol &&
                       report.max_active_residual <= kkt_tol;
    return report;
}

FitResult fit(const Dataset& data, const FitConfig& cfg,
              const std::optional<BlockPrecision>& init) {
    validate_config(cfg);
    if (!data.centered() && !cfg.accept_uncentered) {
        throw std::invalid_argument(
            "fit: data columns are not centered; set accept_uncentered to proceed anyway");
    }

    const NodePartition& part = data.partition();
    BlockPrecision est = [&] {
        if (init) {
            if (init->partition() != part) {
                throw std::invalid_argument("fit: warm start uses a different partition");
            }
            return *init;
        }
        return BlockPrecision(part, initial_sigma(data));
    }();

    Workspace ws(data, est);
    const int p = part.node_count();

    FitResult result{est, {}, 0, false, {}};
    result.objective_trace.push_back(ws.smooth(est.sigma()) +
                                     group_penalty(est, cfg.lambda));

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_change = 0.0;

        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                Eigen::MatrixXd current = est.block(i, j);
                Eigen::MatrixXd g0 =
                    ws.full_gradient(i, j) - ws.gram[i] * current - current * ws.gram[j];
                Eigen::MatrixXd updated;
                try {
                    updated = detail::solve_block_subproblem(
                        g0, ws.gram[i], ws.gram[j], current, cfg.lambda, cfg.tol,
                        cfg.max_prox_iters);
                } catch (const std::runtime_error& err) {
                    throw std::runtime_error("fit: block " + block_name(i, j) + ": " +
                                             err.what());
                }
                if (!updated.allFinite()) {
                    throw std::runtime_error("fit: block " + block_name(i, j) +
                                             ": update is not finite");
                }
                Eigen::MatrixXd delta = updated - current;
                if (!delta.isZero(0.0)) {
                    ws.apply_block_delta(i, j, delta);
                    est.set_block(i, j, updated);
                    max_change = std::max(max_change, delta.cwiseAbs().maxCoeff());
                }
            }
        }

        for (int i = 0; i < p; ++i) {
            for (int k = 0; k < part.dim(i); ++k) {
                const int flat = part.flat_index(i, k);
                const double old_sigma = est.sigma()(flat);
                const double q = ws.column_sq(flat);
                // Cross terms read off the maintained residual: c = Y'r - sigma q.
                const double c =
                    data.values().col(flat).dot(ws.residuals.col(flat)) - old_sigma * q;
                double updated =
                    std::max((-c + std::sqrt(c * c + 2.0 * ws.n * q)) / (2.0 * q),
                             cfg.sigma_floor);
                if (updated != old_sigma) {
                    ws.apply_sigma_delta(flat, updated - old_sigma);
                    est.set_sigma_at(i, k, updated);
                    max_change = std::max(max_change, std::fabs(updated - old_sigma));
                }
            }
        }

        // Incremental residual updates drift; wash the error out periodically.
        if (sweep % 50 == 0) {
            ws.residuals = assemble_residuals(est, data);
        }

        double objective = ws.smooth(est.sigma()) + group_penalty(est, cfg.lambda);
        double previous = result.objective_trace.back();
        result.objective_trace.push_back(objective);
        result.sweeps = sweep;

        double relative = std::fabs(previous - objective) /
                          std::max(1e-12, std::fabs(previous));
        if (relative < cfg.tol && max_change < cfg.tol) {
            result.converged = true;
            break;
        }
    }

    result.estimate = est;
    result.kkt = kkt_certificate(est, data, cfg.lambda, cfg.kkt_tol);
    return result;
}

}  // namespace mconcord
