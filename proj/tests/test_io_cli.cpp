#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mconcord/io.hpp"
#include "mconcord/modelsel.hpp"
#include "mconcord/objective.hpp"
#include "mconcord/optimizer.hpp"
#include "mconcord/rng.hpp"
#include "mconcord/synth.hpp"

using namespace mconcord;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "mconcord_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd =
        std::string(MCONCORD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

}  // namespace

TEST_CASE("format_double and parse_double round-trip exactly") {
    Rng rng(3);
    std::vector<double> values = {0.0,  1.0,     -1.0,       0.1,   1.0 / 3.0,
                                  1e17, 1.5e-17, -2.75e300, 5e-324, 0.4187403671277209};
    for (int trial = 0; trial < 200; ++trial) {
        values.push_back(rng.normal() * std::pow(10.0, rng.uniform(-12, 12)));
    }
    for (double v : values) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("1.5x"), FileParseError);
    CHECK_THROWS_AS(parse_double(""), FileParseError);
    CHECK_THROWS_AS(parse_double("nan?"), FileParseError);
}

TEST_CASE("CSV round-trips values bit for bit") {
    fs::path dir = scratch_dir("csv_roundtrip");
    NodePartition part({2, 1, 3});
    Rng rng(7);
    Eigen::MatrixXd values(9, 6);
    for (int r = 0; r < values.rows(); ++r) {
        for (int c = 0; c < values.cols(); ++c) {
            values(r, c) = rng.normal();
        }
    }
    fs::path file = dir / "data.csv";
    write_csv(file.string(), values, part);
    CsvData loaded = read_csv(file.string());
    CHECK(loaded.partition == part);
    REQUIRE(loaded.values.rows() == values.rows());
    CHECK((loaded.values - values).cwiseAbs().maxCoeff() == 0.0);

    std::string first_line = read_file(file).substr(0, read_file(file).find('\n'));
    CHECK(first_line == "v1.1,v1.2,v2.1,v3.1,v3.2,v3.3");
}

TEST_CASE("read_csv reports the exact location of a problem") {
    fs::path dir = scratch_dir("csv_errors");

    fs::path bad_header = dir / "bad_header.csv";
    write_file(bad_header, "v1.1,v1.3\n0.5,0.5\n");
    try {
        read_csv(bad_header.string());
        FAIL("expected FileParseError");
    } catch (const FileParseError& err) {
        std::string msg = err.what();
        CHECK(msg.find("header column 2") != std::string::npos);
        CHECK(msg.find("v1.2") != std::string::npos);
    }

    fs::path bad_cell = dir / "bad_cell.csv";
    write_file(bad_cell, "v1.1,v2.1\n0.5,0.25\n0.125,oops\n");
    try {
        read_csv(bad_cell.string());
        FAIL("expected FileParseError");
    } catch (const FileParseError& err) {
        std::string msg = err.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }

    fs::path short_row = dir / "short_row.csv";
    write_file(short_row, "v1.1,v2.1\n0.5\n");
    CHECK_THROWS_AS(read_csv(short_row.string()), FileParseError);
    CHECK_THROWS_AS(read_csv((dir / "missing.csv").string()), IoError);

    // Windows line endings and blank lines are tolerated.
    fs::path crlf = dir / "crlf.csv";
    write_file(crlf, "v1.1,v2.1\r\n0.5,1.5\r\n\r\n2.5,3.5\r\n");
    CsvData loaded = read_csv(crlf.string());
    CHECK(loaded.values.rows() == 2);
    CHECK(loaded.values(1, 1) == 3.5);
}

TEST_CASE("partition and edge graph JSON round-trip") {
    NodePartition part({3, 1, 2});
    CHECK(partition_from_json(partition_json(part)) == part);
    CHECK_THROWS_AS(partition_from_json(nlohmann::json{{"dims", "x"}}),
                    FileParseError);

    EdgeGraph graph(4);
    graph.add_edge(0, 2, 1.5);
    graph.add_edge(1, 3, 0.25);
    nlohmann::json encoded = edge_graph_json(graph);
    CHECK(encoded["p"] == 4);
    CHECK(encoded["edges"][0]["i"] == 1);  // 1-based on disk
    CHECK(encoded["edges"][0]["j"] == 3);
    EdgeGraph decoded = edge_graph_from_json(encoded);
    CHECK(decoded == graph);
    CHECK_THROWS_AS(edge_graph_from_json(nlohmann::json::object()), FileParseError);
}

TEST_CASE("block precision JSON round-trips the full estimate") {
    NodePartition part({2, 2, 1});
    Eigen::VectorXd sigma(5);
    sigma << 1.25, 0.5, 2.0, 1.0 / 3.0, 0.75;
    BlockPrecision est(part, sigma);
    Eigen::MatrixXd block(2, 2);
    block << 0.1, -0.2, 0.3, 1.0 / 7.0;
    est.set_block(0, 1, block);
    Eigen::MatrixXd thin(2, 1);
    thin << -0.05, 0.0125;
    est.set_block(1, 2, thin);

    BlockPrecision decoded = block_precision_from_json(block_precision_json(est));
    CHECK(decoded.partition() == part);
    CHECK((decoded.sigma() - sigma).cwiseAbs().maxCoeff() == 0.0);
    CHECK((decoded.to_dense() - est.to_dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truth JSON carries the matrix and doubles as an edge list") {
    GeneratorConfig cfg;
    cfg.p = 4;
    cfg.k = 2;
    cfg.density = 0.5;
    cfg.seed = 11;
    GroundTruth truth = generate_truth(cfg);
    nlohmann::json encoded = truth_json(truth);

    GroundTruth decoded = truth_from_json(encoded);
    CHECK((decoded.omega - truth.omega).cwiseAbs().maxCoeff() == 0.0);
    CHECK(decoded.graph == truth.graph);
    CHECK(decoded.rho == truth.rho);

    // The same file is valid input anywhere an edge graph is expected.
    EdgeGraph as_edges = edge_graph_from_json(encoded);
    CHECK(as_edges == truth.graph);
}

TEST_CASE("cli: simulate then fit then eval") {
    fs::path dir = scratch_dir("cli_pipeline");
    std::string sim_out = (dir / "sim").string();
    CHECK(run_cli("simulate --p 5 --k 2 --density 0.3 --n 120 --seed 7 --out " +
                  sim_out) == 0);
    CHECK(fs::exists(dir / "sim" / "truth.json"));
    CHECK(fs::exists(dir / "sim" / "data.csv"));
    CHECK(fs::exists(dir / "sim" / "partition.json"));

    std::string fit_out = (dir / "fit").string();
    CHECK(run_cli("fit --data " + sim_out + "/data.csv --lambda 0.4 --out " +
                  fit_out) == 0);
    nlohmann::json fit_json = read_json_file((dir / "fit" / "fit.json").string());
    CHECK(fit_json["converged"] == true);
    CHECK(fit_json["lambda"] == 0.4);
    CHECK(fit_json["config"].contains("mode"));
    CHECK_FALSE(fit_json["config"].contains("out"));
    CHECK_FALSE(fit_json["config"].contains("jobs"));

    std::string eval_out = (dir / "eval").string();
    CHECK(run_cli("eval --est " + fit_out + "/edges.json --truth " + sim_out +
                  "/truth.json --out " + eval_out) == 0);
    nlohmann::json eval = read_json_file((dir / "eval" / "eval.json").string());
    long long tp = eval["tp"].get<long long>();
    long long fp = eval["fp"].get<long long>();
    long long fn = eval["fn"].get<long long>();
    long long tn = eval["tn"].get<long long>();
    CHECK(tp + fp + fn + tn == 10);  // C(5,2) pairs
    CHECK(eval["n_t"] == tp + fp);   // edges detected
    CHECK(eval["n_c"] == tp);        // detected and true

    // Evaluating an estimate against itself is a perfect score.
    std::string self_out = (dir / "self").string();
    CHECK(run_cli("eval --est " + sim_out + "/truth.json --truth " + sim_out +
                  "/truth.json --out " + self_out) == 0);
    nlohmann::json self = read_json_file((dir / "self" / "eval.json").string());
    CHECK(self["mcc"] == 1.0);
}

TEST_CASE("cli: usage and parse failures exit with code 2") {
    fs::path dir = scratch_dir("cli_errors");
    CHECK(run_cli("simulate --k 2 --density 0.3 --n 50") == 2);  // missing --p
    CHECK(run_cli("bogus-subcommand") == 2);
    CHECK(run_cli("fit --data " + (dir / "absent.csv").string() +
                  " --lambda 0.5") == 1);

    fs::path corrupt = dir / "corrupt.csv";
    write_file(corrupt, "v1.1,v2.1\n1.0,junk\n");
    CHECK(run_cli("fit --data " + corrupt.string() + " --lambda 0.5") == 2);

    fs::path ok_csv = dir / "ok.csv";
    write_file(ok_csv, "v1.1,v2.1\n1,2\n-1,0.5\n0,-2.5\n");
    CHECK(run_cli("fit --data " + ok_csv.string() +
                  " --lambda 0.5 --mode nonsense") == 2);

    fs::path wrong_part = dir / "part.json";
    write_file(wrong_part, "{\"dims\": [3]}\n");
    CHECK(run_cli("fit --data " + ok_csv.string() + " --partition " +
                  wrong_part.string() + " --lambda 0.5") == 2);
}

TEST_CASE("cli: reruns are byte-identical, including parallel cv") {
    fs::path dir = scratch_dir("cli_determinism");
    std::string sim = (dir / "sim").string();
    REQUIRE(run_cli("simulate --p 4 --k 2 --density 0.5 --n 80 --seed 3 --out " +
                    sim) == 0);

    for (int round = 0; round < 2; ++round) {
        std::string out = (dir / ("fit" + std::to_string(round))).string();
        REQUIRE(run_cli("fit --data " + sim + "/data.csv --lambda 0.3 --out " +
                        out) == 0);
    }
    CHECK(read_file(dir / "fit0" / "fit.json") ==
          read_file(dir / "fit1" / "fit.json"));
    CHECK(read_file(dir / "fit0" / "edges.json") ==
          read_file(dir / "fit1" / "edges.json"));

    std::string cv1 = (dir / "cv_serial").string();
    std::string cv2 = (dir / "cv_parallel").string();
    REQUIRE(run_cli("cv --data " + sim + "/data.csv --lambda-grid 8:0.05 "
                    "--folds 4 --seed 5 --jobs 1 --out " + cv1) == 0);
    REQUIRE(run_cli("cv --data " + sim + "/data.csv --lambda-grid 8:0.05 "
                    "--folds 4 --seed 5 --jobs 3 --out " + cv2) == 0);
    CHECK(read_file(dir / "cv_serial" / "cv.json") ==
          read_file(dir / "cv_parallel" / "cv.json"));

    std::string sim2 = (dir / "sim2").string();
    REQUIRE(run_cli("simulate --p 4 --k 2 --density 0.5 --n 80 --seed 3 --out " +
                    sim2) == 0);
    CHECK(read_file(dir / "sim" / "data.csv") ==
          read_file(dir / "sim2" / "data.csv"));
    CHECK(read_file(dir / "sim" / "truth.json") ==
          read_file(dir / "sim2" / "truth.json"));
}

TEST_CASE("cli: a one-point path is a single fit at lambda_max") {
    fs::path dir = scratch_dir("cli_path");
    std::string sim = (dir / "sim").string();
    REQUIRE(run_cli("simulate --p 4 --k 2 --density 0.5 --n 100 --seed 9 --out " +
                    sim) == 0);

    std::string path_out = (dir / "path").string();
    REQUIRE(run_cli("path --data " + sim + "/data.csv --lambda-grid 1:0.01 "
                    "--out " + path_out) == 0);
    CHECK(fs::exists(dir / "path" / "path.csv"));
    CHECK(fs::exists(dir / "path" / "edges_001.json"));
    CHECK_FALSE(fs::exists(dir / "path" / "edges_002.json"));

    std::string path_text = read_file(dir / "path" / "path.csv");
    std::istringstream lines(path_text);
    std::string header, row;
    REQUIRE(std::getline(lines, header));
    CHECK(header == "lambda,n_t,objective");
    REQUIRE(std::getline(lines, row));
    double lambda_used = parse_double(row.substr(0, row.find(',')));

    std::string fit_out = (dir / "fit").string();
    REQUIRE(run_cli("fit --data " + sim + "/data.csv --lambda " +
                    format_double(lambda_used) + " --out " + fit_out) == 0);
    CHECK(read_file(dir / "path" / "edges_001.json") ==
          read_file(dir / "fit" / "edges.json"));

    // At lambda_max nothing enters.
    EdgeGraph at_max =
        edge_graph_from_json(read_json_file((dir / "fit" / "edges.json").string()));
    CHECK(at_max.edge_count() == 0);
}

TEST_CASE("cli: a longer path grows monotonically as lambda falls") {
    fs::path dir = scratch_dir("cli_path_grid");
    std::string sim = (dir / "sim").string();
    REQUIRE(run_cli("simulate --p 4 --k 2 --density 0.5 --n 200 --seed 21 --out " +
                    sim) == 0);
    std::string path_out = (dir / "path").string();
    REQUIRE(run_cli("path --data " + sim + "/data.csv --lambda-grid 8:0.05 "
                    "--out " + path_out) == 0);

    std::istringstream lines(read_file(dir / "path" / "path.csv"));
    std::string line;
    REQUIRE(std::getline(lines, line));  // header
    int previous = -1;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::size_t first = line.find(',');
        std::size_t second = line.find(',', first + 1);
        int n_t = std::stoi(line.substr(first + 1, second - first - 1));
        CHECK(n_t >= previous);
        previous = n_t;
        ++rows;
    }
    CHECK(rows == 8);
}

TEST_CASE("cli: concord mode reports node-level edges") {
    fs::path dir = scratch_dir("cli_concord");
    std::string sim = (dir / "sim").string();
    REQUIRE(run_cli("simulate --p 4 --k 2 --density 0.5 --n 150 --seed 13 --out " +
                    sim) == 0);
    std::string out = (dir / "fit").string();
    REQUIRE(run_cli("fit --data " + sim + "/data.csv --lambda 0.15 "
                    "--mode concord --out " + out) == 0);
    EdgeGraph edges =
        edge_graph_from_json(read_json_file((dir / "fit" / "edges.json").string()));
    CHECK(edges.node_count() == 4);  // collapsed back to nodes, not 8 variables
    nlohmann::json fit_json = read_json_file((dir / "fit" / "fit.json").string());
    CHECK(fit_json["config"]["mode"] == "concord");
    CHECK(fit_json["dims"].size() == 8);  // the fit itself ran per variable
}

TEST_CASE("golden fit stays reproducible") {
    fs::path data_dir(MCONCORD_TEST_DATA_DIR);
    CsvData csv = read_csv((data_dir / "tiny.csv").string());
    Dataset data(csv.values, csv.partition, true);
    FitConfig cfg;
    cfg.lambda = 0.3;
    FitResult result = fit(data, cfg);
    REQUIRE(result.converged);

    nlohmann::json golden = read_json_file((data_dir / "tiny_fit.json").string());
    BlockPrecision expected = block_precision_from_json(golden);
    CHECK((result.estimate.to_dense() - expected.to_dense()).cwiseAbs().maxCoeff() <
          1e-8);
    double objective = objective_value(result.estimate, data, cfg.lambda).total;
    CHECK(objective == doctest::Approx(golden["objective"].get<double>()).epsilon(1e-10));
}
