// Command-line front end: simulate / fit / cv / path / eval.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or parse error,
// 3 solver did not converge.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mconcord/io.hpp"
#include "mconcord/metrics.hpp"
#include "mconcord/modelsel.hpp"
#include "mconcord/objective.hpp"
#include "mconcord/optimizer.hpp"
#include "mconcord/residual_sigma.hpp"
#include "mconcord/synth.hpp"
#include "mconcord/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SimulateArgs {
    int p = 0;
    int k = 0;
    double density = 0.0;
    int n = 0;
    std::uint64_t seed = 0;
    double shift_margin = 0.5;
    std::string out = ".";
};

struct FitArgs {
    std::string data;
    std::string partition;
    double lambda = 0.0;
    std::string mode = "mconcord";
    double tol = 1e-6;
    int max_sweeps = 500;
    bool standardize = false;
    std::string out = ".";
};

struct CvArgs {
    std::string data;
    std::string partition;
    std::string grid = "30:0.01";
    int folds = 5;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string mode = "mconcord";
    double tol = 1e-6;
    int max_sweeps = 500;
    bool standardize = false;
    std::string out = ".";
};

struct PathArgs {
    std::string data;
    std::string partition;
    std::string grid = "30:0.01";
    std::string mode = "mconcord";
    double tol = 1e-6;
    int max_sweeps = 500;
    bool standardize = false;
    std::string out = ".";
};

struct EvalArgs {
    std::string est;
    std::string truth;
    std::string out = ".";
};

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw mconcord::IoError("cannot create output directory '" + out + "'");
    }
    return dir;
}

// The partition comes from the CSV header unless a partition file overrides
// the grouping; the column count must agree either way.
struct LoadedData {
    Eigen::MatrixXd values;           // raw file contents
    mconcord::NodePartition partition;
};

LoadedData load_data(const std::string& data_path, const std::string& partition_path) {
    mconcord::CsvData csv = mconcord::read_csv(data_path);
    if (partition_path.empty()) {
        return {std::move(csv.values), std::move(csv.partition)};
    }
    mconcord::NodePartition part =
        mconcord::partition_from_json(mconcord::read_json_file(partition_path));
    if (part.total_dim() != csv.partition.total_dim()) {
        throw std::invalid_argument("partition file declares " +
                                    std::to_string(part.total_dim()) +
                                    " variables but the CSV has " +
                                    std::to_string(csv.partition.total_dim()));
    }
    return {std::move(csv.values), std::move(part)};
}

mconcord::Dataset make_dataset(const LoadedData& loaded, bool standardize,
                               const mconcord::NodePartition& partition) {
    mconcord::Dataset data(loaded.values, partition, /*center=*/true);
    if (standardize) {
        data = mconcord::standardize_columns(data);
    }
    return data;
}

std::pair<int, double> parse_grid_spec(const std::string& spec) {
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("--lambda-grid expects count:ratio, got '" + spec + "'");
    }
    try {
        std::size_t used = 0;
        int count = std::stoi(spec.substr(0, colon), &used);
        if (used != colon) {
            throw std::invalid_argument("");
        }
        double ratio = mconcord::parse_double(spec.substr(colon + 1));
        return {count, ratio};
    } catch (const std::exception&) {
        throw std::invalid_argument("--lambda-grid expects count:ratio, got '" + spec + "'");
    }
}

void require_mode(const std::string& mode) {
    if (mode != "mconcord" && mode != "concord") {
        throw std::invalid_argument("--mode must be 'mconcord' or 'concord'");
    }
}

int run_simulate(const SimulateArgs& args) {
    fs::path dir = prepare_out_dir(args.out);
    mconcord::GeneratorConfig cfg;
    cfg.p = args.p;
    cfg.k = args.k;
    cfg.density = args.density;
    cfg.n = args.n;
    cfg.seed = args.seed;
    cfg.shift_margin = args.shift_margin;

    mconcord::GroundTruth truth = mconcord::generate_truth(cfg);
    mconcord::Dataset data = mconcord::sample(truth, cfg.n, cfg.seed);

    mconcord::write_json_file((dir / "truth.json").string(), mconcord::truth_json(truth));
    mconcord::write_csv((dir / "data.csv").string(), data.values(), data.partition());
    mconcord::write_json_file((dir / "partition.json").string(),
                              mconcord::partition_json(data.partition()));
    std::cout << "simulate: wrote truth.json, data.csv, partition.json to " << dir.string()
              << " (" << truth.graph.edge_count() << " edges)\n";
    return 0;
}

int run_fit(const FitArgs& args) {
    require_mode(args.mode);
    fs::path dir = prepare_out_dir(args.out);
    LoadedData loaded = load_data(args.data, args.partition);
    mconcord::NodePartition node_part = loaded.partition;
    mconcord::NodePartition fit_part =
        args.mode == "concord" ? node_part.flattened() : node_part;
    mconcord::Dataset data = make_dataset(loaded, args.standardize, fit_part);

    mconcord::FitConfig cfg;
    cfg.lambda = args.lambda;
    cfg.tol = args.tol;
    cfg.max_sweeps = args.max_sweeps;
    mconcord::FitResult result = mconcord::fit(data, cfg);

    mconcord::EdgeGraph edges = mconcord::edge_graph_of(result.estimate);
    if (args.mode == "concord") {
        edges = mconcord::aggregate_univariate_blocks(edges, node_part);
    }

    json fit_json = mconcord::fit_result_json(result, cfg.lambda);
    fit_json["config"] = {{"command", "fit"},
                          {"data", args.data},
                          {"partition", args.partition},
                          {"lambda", args.lambda},
                          {"mode", args.mode},
                          {"tol", args.tol},
                          {"max_sweeps", args.max_sweeps},
                          {"standardize", args.standardize}};
    mconcord::write_json_file((dir / "fit.json").string(), fit_json);
    mconcord::write_json_file((dir / "edges.json").string(), mconcord::edge_graph_json(edges));

    std::cout << "fit: lambda=" << mconcord::format_double(cfg.lambda) << " edges="
              << edges.edge_count() << " converged=" << (result.converged ? "yes" : "no")
              << "\n";
    return result.converged ? 0 : 3;
}

int run_cv(const CvArgs& args) {
    require_mode(args.mode);
    fs::path dir = prepare_out_dir(args.out);
    auto [grid_count, grid_ratio] = parse_grid_spec(args.grid);
    LoadedData loaded = load_data(args.data, args.partition);
    mconcord::NodePartition fit_part =
        args.mode == "concord" ? loaded.partition.flattened() : loaded.partition;
    mconcord::Dataset data = make_dataset(loaded, args.standardize, fit_part);

    mconcord::CvConfig cv_cfg;
    cv_cfg.folds = args.folds;
    cv_cfg.seed = args.seed;
    cv_cfg.grid =
        mconcord::LambdaGrid::make(mconcord::lambda_max(data), grid_count, grid_ratio);

    mconcord::FitConfig fit_cfg;
    fit_cfg.tol = args.tol;
    fit_cfg.max_sweeps = args.max_sweeps;

    mconcord::CvResult result =
        mconcord::cross_validate(data, cv_cfg, fit_cfg, args.jobs);

    json cv_json = mconcord::cv_result_json(result);
    cv_json["config"] = {{"command", "cv"},
                         {"data", args.data},
                         {"partition", args.partition},
                         {"lambda_grid", args.grid},
                         {"folds", args.folds},
                         {"seed", args.seed},
                         {"mode", args.mode},
                         {"tol", args.tol},
                         {"max_sweeps", args.max_sweeps},
                         {"standardize", args.standardize}};
    mconcord::write_json_file((dir / "cv.json").string(), cv_json);
    std::cout << "cv: best lambda=" << mconcord::format_double(result.best_lambda)
              << " (grid position " << result.best_index + 1 << " of "
              << result.grid.values.size() << ")\n";
    return 0;
}

int run_path(const PathArgs& args) {
    require_mode(args.mode);
    fs::path dir = prepare_out_dir(args.out);
    auto [grid_count, grid_ratio] = parse_grid_spec(args.grid);
    LoadedData loaded = load_data(args.data, args.partition);
    mconcord::NodePartition node_part = loaded.partition;
    mconcord::NodePartition fit_part =
        args.mode == "concord" ? node_part.flattened() : node_part;
    mconcord::Dataset data = make_dataset(loaded, args.standardize, fit_part);

    mconcord::LambdaGrid grid =
        mconcord::LambdaGrid::make(mconcord::lambda_max(data), grid_count, grid_ratio);
    mconcord::FitConfig cfg;
    cfg.tol = args.tol;
    cfg.max_sweeps = args.max_sweeps;

    std::ofstream path_csv(dir / "path.csv");
    if (!path_csv) {
        throw mconcord::IoError("cannot open path.csv for writing");
    }
    path_csv << "lambda,n_t,objective\n";

    bool all_converged = true;
    std::optional<mconcord::BlockPrecision> warm;
    for (std::size_t t = 0; t < grid.values.size(); ++t) {
        cfg.lambda = grid.values[t];
        mconcord::FitResult result = mconcord::fit(data, cfg, warm);
        warm = result.estimate;
        all_converged = all_converged && result.converged;

        mconcord::EdgeGraph edges = mconcord::edge_graph_of(result.estimate);
        if (args.mode == "concord") {
            edges = mconcord::aggregate_univariate_blocks(edges, node_part);
        }
        path_csv << mconcord::format_double(cfg.lambda) << ',' << edges.edge_count() << ','
                 << mconcord::format_double(result.objective_trace.back()) << '\n';

        char name[32];
        std::snprintf(name, sizeof(name), "edges_%03zu.json", t + 1);
        mconcord::write_json_file((dir / name).string(), mconcord::edge_graph_json(edges));
    }
    if (!path_csv) {
        throw mconcord::IoError("failed while writing path.csv");
    }
    path_csv.close();
    std::cout << "path: " << grid.values.size() << " grid points written to "
              << dir.string() << "\n";
    return all_converged ? 0 : 3;
}

int run_eval(const EvalArgs& args) {
    fs::path dir = prepare_out_dir(args.out);
    mconcord::EdgeGraph est =
        mconcord::edge_graph_from_json(mconcord::read_json_file(args.est));
    mconcord::EdgeGraph truth =
        mconcord::edge_graph_from_json(mconcord::read_json_file(args.truth));
    mconcord::ConfusionCounts counts = mconcord::confusion(est, truth);
    mconcord::EdgeScores sc = mconcord::scores(counts);

    json report = mconcord::eval_json(counts, sc);
    report["config"] = {{"command", "eval"}, {"est", args.est}, {"truth", args.truth}};
    mconcord::write_json_file((dir / "eval.json").string(), report);
    std::cout << "eval: tp=" << counts.tp << " fp=" << counts.fp << " fn=" << counts.fn
              << " mcc=" << mconcord::format_double(sc.mcc) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-sparse precision matrix estimation for vector-valued nodes"};
    app.set_version_flag("--version", mconcord::kVersion);
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "Draw a random truth and sample data");
    sim->add_option("--p", sim_args.p, "Number of nodes")->required();
    sim->add_option("--k", sim_args.k, "Variables per node")->required();
    sim->add_option("--density", sim_args.density, "Edge probability")->required();
    sim->add_option("--n", sim_args.n, "Sample count")->required();
    sim->add_option("--seed", sim_args.seed, "Random seed");
    sim->add_option("--shift-margin", sim_args.shift_margin,
                    "Diagonal margin beyond |min eigenvalue|");
    sim->add_option("--out", sim_args.out, "Output directory");

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit one penalized estimate");
    fit_cmd->add_option("--data", fit_args.data, "Data CSV")->required();
    fit_cmd->add_option("--partition", fit_args.partition, "Partition JSON override");
    fit_cmd->add_option("--lambda", fit_args.lambda, "Penalty level")->required();
    fit_cmd->add_option("--mode", fit_args.mode, "mconcord or concord");
    fit_cmd->add_option("--tol", fit_args.tol, "Convergence tolerance");
    fit_cmd->add_option("--max-sweeps", fit_args.max_sweeps, "Sweep cap");
    fit_cmd->add_flag("--standardize", fit_args.standardize, "Scale columns to unit variance");
    fit_cmd->add_option("--out", fit_args.out, "Output directory");

    CvArgs cv_args;
    CLI::App* cv_cmd = app.add_subcommand("cv", "Cross-validate the penalty level");
    cv_cmd->add_option("--data", cv_args.data, "Data CSV")->required();
    cv_cmd->add_option("--partition", cv_args.partition, "Partition JSON override");
    cv_cmd->add_option("--lambda-grid", cv_args.grid, "Grid as count:ratio");
    cv_cmd->add_option("--folds", cv_args.folds, "Fold count");
    cv_cmd->add_option("--seed", cv_args.seed, "Fold assignment seed");
    cv_cmd->add_option("--jobs", cv_args.jobs, "Concurrent fold workers");
    cv_cmd->add_option("--mode", cv_args.mode, "mconcord or concord");
    cv_cmd->add_option("--tol", cv_args.tol, "Convergence tolerance");
    cv_cmd->add_option("--max-sweeps", cv_args.max_sweeps, "Sweep cap");
    cv_cmd->add_flag("--standardize", cv_args.standardize, "Scale columns to unit variance");
    cv_cmd->add_option("--out", cv_args.out, "Output directory");

    PathArgs path_args;
    CLI::App* path_cmd = app.add_subcommand("path", "Fit along a descending lambda grid");
    path_cmd->add_option("--data", path_args.data, "Data CSV")->required();
    path_cmd->add_option("--partition", path_args.partition, "Partition JSON override");
    path_cmd->add_option("--lambda-grid", path_args.grid, "Grid as count:ratio");
    path_cmd->add_option("--mode", path_args.mode, "mconcord or concord");
    path_cmd->add_option("--tol", path_args.tol, "Convergence tolerance");
    path_cmd->add_option("--max-sweeps", path_args.max_sweeps, "Sweep cap");
    path_cmd->add_flag("--standardize", path_args.standardize,
                       "Scale columns to unit variance");
    path_cmd->add_option("--out", path_args.out, "Output directory");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score estimated edges against truth");
    eval_cmd->add_option("--est", eval_args.est, "Estimated edge JSON")->required();
    eval_cmd->add_option("--truth", eval_args.truth, "Truth JSON (edge list)")->required();
    eval_cmd->add_option("--out", eval_args.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            return run_simulate(sim_args);
        }
        if (fit_cmd->parsed()) {
            return run_fit(fit_args);
        }
        if (cv_cmd->parsed()) {
            return run_cv(cv_args);
        }
        if (path_cmd->parsed()) {
            return run_path(path_args);
        }
        if (eval_cmd->parsed()) {
            return run_eval(eval_args);
        }
    } catch (const mconcord::FileParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const mconcord::IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
