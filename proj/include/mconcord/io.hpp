#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mconcord/block_precision.hpp"
#include "mconcord/dataset.hpp"
#include "mconcord/edge_graph.hpp"
#include "mconcord/modelsel.hpp"
#include "mconcord/metrics.hpp"
#include "mconcord/optimizer.hpp"
#include "mconcord/synth.hpp"

namespace mconcord {

/// File could not be opened or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File opened but its content does not parse; the message names the spot.
struct FileParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

/// Strict parse of a full token; anything trailing is an error.
double parse_double(std::string_view token);

struct CsvData {
    Eigen::MatrixXd values;
    NodePartition partition;  // derived from the v<i>.<k> header
};

/// Matrix CSV with header v1.1, v1.2, ..., one sample per row, exact
/// round-trip values.
void write_csv(const std::string& path, const Eigen::MatrixXd& values,
               const NodePartition& partition);
CsvData read_csv(const std::string& path);

void write_json_file(const std::string& path, const nlohmann::json& value);
nlohmann::json read_json_file(const std::string& path);

nlohmann::json partition_json(const NodePartition& partition);
NodePartition partition_from_json(const nlohmann::json& value);

nlohmann::json edge_graph_json(const EdgeGraph& graph);
/// Reads any JSON object carrying "p" and "edges" (edge files and truth
/// files both qualify).
EdgeGraph edge_graph_from_json(const nlohmann::json& value);

nlohmann::json block_precision_json(const BlockPrecision& est);
BlockPrecision block_precision_from_json(const nlohmann::json& value);

nlohmann::json fit_result_json(const FitResult& result, double lambda);
nlohmann::json cv_result_json(const CvResult& result);
nlohmann::json eval_json(const ConfusionCounts& counts, const EdgeScores& scores);

nlohmann::json generator_config_json(const GeneratorConfig& cfg);
nlohmann::json truth_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& value);

}  // namespace mconcord
