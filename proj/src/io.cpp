#include "mconcord/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "mconcord/objective.hpp"
#include "mconcord/version.hpp"

namespace mconcord {

std::string format_double(double value) {
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buffer, end);
}

double parse_double(std::string_view token) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || token.empty()) {
        throw FileParseError("cannot parse number '" + std::string(token) + "'");
    }
    return value;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& values,
               const NodePartition& partition) {
    if (values.cols() != partition.total_dim()) {
        throw std::invalid_argument("write_csv: column count does not match partition");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (int i = 0; i < partition.node_count(); ++i) {
        for (int k = 0; k < partition.dim(i); ++k) {
            if (i > 0 || k > 0) {
                out << ',';
            }
            out << 'v' << (i + 1) << '.' << (k + 1);
        }
    }
    out << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c > 0) {
                out << ',';
            }
            out << format_double(values(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

// Header tokens must read v1.1, v1.2, ..., v2.1, ... with coordinates
// starting at 1 and advancing one at a time.
NodePartition partition_from_header(const std::vector<std::string>& tokens,
                                    const std::string& path) {
    std::vector<int> dims;
    int expect_node = 1;
    int expect_coord = 1;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const std::string& token = tokens[t];
        int node = 0;
        int coord = 0;
        std::size_t dot = token.find('.');
        bool ok = token.size() >= 4 && token[0] == 'v' && dot != std::string::npos &&
                  dot > 1 && dot + 1 < token.size();
        if (ok) {
            try {
                std::size_t used = 0;
                node = std::stoi(token.substr(1, dot - 1), &used);
                ok = used == dot - 1;
                coord = std::stoi(token.substr(dot + 1), &used);
                ok = ok && used == token.size() - dot - 1;
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) {
            throw FileParseError(path + ": header column " + std::to_string(t + 1) +
                                 ": expected v<node>.<coord>, got '" + token + "'");
        }
        if (node == expect_node + 1 && coord == 1) {
            dims.push_back(expect_coord - 1);
            expect_node = node;
            expect_coord = 1;
        }
        if (node != expect_node || coord != expect_coord) {
            throw FileParseError(path + ": header column " + std::to_string(t + 1) +
                                 ": expected v" + std::to_string(expect_node) + "." +
                                 std::to_string(expect_coord) + ", got '" + token + "'");
        }
        ++expect_coord;
    }
    dims.push_back(expect_coord - 1);
    return NodePartition(dims);
}

}  // namespace

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FileParseError(path + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) {
        throw FileParseError(path + ": empty header");
    }
    NodePartition partition = partition_from_header(header, path);

    std::vector<double> entries;
    const std::size_t width = header.size();
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        ++row;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != width) {
            throw FileParseError(path + ": line " + std::to_string(row + 1) + ": expected " +
                                 std::to_string(width) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            try {
                entries.push_back(parse_double(fields[c]));
            } catch (const FileParseError& err) {
                throw FileParseError(path + ": line " + std::to_string(row + 1) +
                                     ", column " + std::to_string(c + 1) + ": " + err.what());
            }
        }
    }
    if (row == 0) {
        throw FileParseError(path + ": no data rows");
    }

    CsvData data{Eigen::MatrixXd(row, static_cast<int>(width)), partition};
    for (int r = 0; r < row; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            data.values(r, static_cast<int>(c)) = entries[r * width + c];
        }
    }
    return data;
}

void write_json_file(const std::string& path, const nlohmann::json& value) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << value.dump(2) << '\n';
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        throw FileParseError(path + ": " + err.what());
    }
}

nlohmann::json partition_json(const NodePartition& partition) {
    return nlohmann::json{{"dims", partition.dims()}};
}

NodePartition partition_from_json(const nlohmann::json& value) {
    if (!value.is_object() || !value.contains("dims") || !value["dims"].is_array()) {
        throw FileParseError("partition JSON must be an object with a 'dims' array");
    }
    std::vector<int> dims;
    for (const auto& d : value["dims"]) {
        if (!d.is_number_integer()) {
            throw FileParseError("partition dims must be integers");
        }
        dims.push_back(d.get<int>());
    }
    try {
        return NodePartition(dims);
    } catch (const std::invalid_argument& err) {
        throw FileParseError(std::string("invalid partition: ") + err.what());
    }
}

nlohmann::json edge_graph_json(const EdgeGraph& graph) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [key, weight] : graph.edges()) {
        edges.push_back({{"i", key.first + 1},
                         {"j", key.second + 1},
                         {"frobenius", weight}});
    }
    return nlohmann::json{{"p", graph.node_count()}, {"edges", std::move(edges)}};
}

EdgeGraph edge_graph_from_json(const nlohmann::json& value) {
    if (!value.is_object() || !value.contains("p") || !value.contains("edges")) {
        throw FileParseError("edge graph JSON must carry 'p' and 'edges'");
    }
    try {
        EdgeGraph graph(value["p"].get<int>());
        for (const auto& edge : value["edges"]) {
            graph.add_edge(edge.at("i").get<int>() - 1, edge.at("j").get<int>() - 1,
                           edge.at("frobenius").get<double>());
        }
        return graph;
    } catch (const std::exception& err) {
        throw FileParseError(std::string("invalid edge graph: ") + err.what());
    }
}

nlohmann::json block_precision_json(const BlockPrecision& est) {
    const NodePartition& part = est.partition();
    nlohmann::json blocks = nlohmann::json::object();
    for (const auto& [key, block] : est.blocks()) {
        std::vector<double> values;
        values.reserve(block.size());
        for (int r = 0; r < block.rows(); ++r) {
            for (int c = 0; c < block.cols(); ++c) {
                values.push_back(block(r, c));
            }
        }
        std::string name =
            std::to_string(key.first + 1) + "," + std::to_string(key.second + 1);
        blocks[name] = {{"rows", block.rows()},
                        {"cols", block.cols()},
                        {"values", std::move(values)}};
    }
    std::vector<double> sigma(est.sigma().data(), est.sigma().data() + est.sigma().size());
    return nlohmann::json{
        {"dims", part.dims()}, {"sigma", std::move(sigma)}, {"blocks", std::move(blocks)}};
}

BlockPrecision block_precision_from_json(const nlohmann::json& value) {
    try {
        NodePartition part = partition_from_json(
            nlohmann::json{{"dims", value.at("dims")}});
        std::vector<double> sigma_values = value.at("sigma").get<std::vector<double>>();
        Eigen::VectorXd sigma =
            Eigen::Map<Eigen::VectorXd>(sigma_values.data(), sigma_values.size());
        BlockPrecision est(part, sigma);
        for (const auto& [name, entry] : value.at("blocks").items()) {
            std::size_t comma = name.find(',');
            if (comma == std::string::npos) {
                throw FileParseError("block key '" + name + "' is not 'i,j'");
            }
            int i = std::stoi(name.substr(0, comma)) - 1;
            int j = std::stoi(name.substr(comma + 1)) - 1;
            int rows = entry.at("rows").get<int>();
            int cols = entry.at("cols").get<int>();
            std::vector<double> flat = entry.at("values").get<std::vector<double>>();
            if (static_cast<int>(flat.size()) != rows * cols) {
                throw FileParseError("block " + name + " has wrong value count");
            }
            Eigen::MatrixXd block(rows, cols);
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    block(r, c) = flat[static_cast<std::size_t>(r) * cols + c];
                }
            }
            est.set_block(i, j, block);
        }
        return est;
    } catch (const FileParseError&) {
        throw;
    } catch (const std::exception& err) {
        throw FileParseError(std::string("invalid estimate JSON: ") + err.what());
    }
}

nlohmann::json fit_result_json(const FitResult& result, double lambda) {
    nlohmann::json value = block_precision_json(result.estimate);
    value["version"] = kVersion;
    value["lambda"] = lambda;
    value["converged"] = result.converged;
    value["sweeps"] = result.sweeps;
    value["objective"] = result.objective_trace.empty() ? 0.0 : result.objective_trace.back();
    value["kkt"] = {{"max_inactive_violation", result.kkt.max_inactive_violation},
                    {"max_active_residual", result.kkt.max_active_residual},
                    {"max_sigma_residual", result.kkt.max_sigma_residual},
                    {"tol", result.kkt.tol},
                    {"satisfied", result.kkt.satisfied}};
    return value;
}

nlohmann::json cv_result_json(const CvResult& result) {
    return nlohmann::json{{"version", kVersion},
                          {"grid", result.grid.values},
                          {"lambda_max", result.grid.lambda_max},
                          {"mean_loss", result.mean_loss},
                          {"sd_loss", result.sd_loss},
                          {"best_index", result.best_index},
                          {"best_lambda", result.best_lambda},
                          {"folds", result.folds},
                          {"seed", result.seed}};
}

nlohmann::json eval_json(const ConfusionCounts& counts, const EdgeScores& scores) {
    return nlohmann::json{{"version", kVersion},
                          {"tp", counts.tp},
                          {"tn", counts.tn},
                          {"fp", counts.fp},
                          {"fn", counts.fn},
                          {"n_t", counts.tp + counts.fp},
                          {"n_c", counts.tp},
                          {"tpr", scores.tpr},
                          {"ppv", scores.ppv},
                          {"mcc", scores.mcc}};
}

nlohmann::json generator_config_json(const GeneratorConfig& cfg) {
    return nlohmann::json{{"p", cfg.p},
                          {"k", cfg.k},
                          {"density", cfg.density},
                          {"n", cfg.n},
                          {"seed", cfg.seed},
                          {"diag_lo", cfg.diag_lo},
                          {"diag_hi", cfg.diag_hi},
                          {"offdiag_values", cfg.offdiag_values},
                          {"shift_margin", cfg.shift_margin}};
}

nlohmann::json truth_json(const GroundTruth& truth) {
    const int dim = static_cast<int>(truth.omega.rows());
    std::vector<double> omega;
    omega.reserve(static_cast<std::size_t>(dim) * dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            omega.push_back(truth.omega(r, c));
        }
    }
    std::vector<double> sigma(truth.sigma_true.data(),
                              truth.sigma_true.data() + truth.sigma_true.size());
    nlohmann::json value = edge_graph_json(truth.graph);
    value["version"] = kVersion;
    value["config"] = generator_config_json(truth.config);
    value["rho"] = truth.rho;
    value["omega"] = {{"dim", dim}, {"values", std::move(omega)}};
    value["sigma_true"] = std::move(sigma);
    return value;
}

GroundTruth truth_from_json(const nlohmann::json& value) {
    try {
        GeneratorConfig cfg;
        const auto& config = value.at("config");
        cfg.p = config.at("p").get<int>();
        cfg.k = config.at("k").get<int>();
        cfg.density = config.at("density").get<double>();
        cfg.n = config.at("n").get<int>();
        cfg.seed = config.at("seed").get<std::uint64_t>();
        cfg.diag_lo = config.at("diag_lo").get<double>();
        cfg.diag_hi = config.at("diag_hi").get<double>();
        cfg.offdiag_values = config.at("offdiag_values").get<std::vector<double>>();
        cfg.shift_margin = config.at("shift_margin").get<double>();

        const auto& omega_node = value.at("omega");
        int dim = omega_node.at("dim").get<int>();
        std::vector<double> flat = omega_node.at("values").get<std::vector<double>>();
        if (static_cast<int>(flat.size()) != dim * dim) {
            throw FileParseError("truth omega has wrong value count");
        }
        Eigen::MatrixXd omega(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                omega(r, c) = flat[static_cast<std::size_t>(r) * dim + c];
            }
        }

        std::vector<double> sigma_values = value.at("sigma_true").get<std::vector<double>>();
        Eigen::VectorXd sigma =
            Eigen::Map<Eigen::VectorXd>(sigma_values.data(), sigma_values.size());

        GroundTruth truth{std::move(omega), edge_graph_from_json(value), std::move(sigma),
                          value.at("rho").get<double>(), cfg};
        return truth;
    } catch (const FileParseError&) {
        throw;
    } catch (const std::exception& err) {
        throw FileParseError(std::string("invalid truth JSON: ") + err.what());
    }
}

}  // namespace mconcord
