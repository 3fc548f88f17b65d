#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "rig/fit.hpp"
#include "rig/io.hpp"
#include "rig/ranking.hpp"

namespace fs = std::filesystem;
using namespace rig;

namespace {

int default_threads() {
    if (const char* env = std::getenv("RIG_INVERSE_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> parse_alphas(const std::string& csv) {
    std::vector<double> alphas;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) alphas.push_back(std::stod(item));
    return alphas;
}

PairwiseMatrix load_pairwise_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pairwise csv: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty pairwise csv");
    PairwiseMatrix matrix;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) matrix.labels.push_back(cell);
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        rows.emplace_back();
        while (std::getline(ss, cell, ',')) rows.back().push_back(cell);
    }
    // Accept a corner cell + row-label column (rows are labels.size()-1 long
    // after stripping) as well as the bare matrix layout.
    const bool corner = rows.size() + 1 == matrix.labels.size();
    if (corner) {
        matrix.labels.erase(matrix.labels.begin());
        for (auto& row : rows) {
            if (row.empty()) throw std::runtime_error("pairwise csv: empty row");
            row.erase(row.begin());
        }
    }
    const auto N = static_cast<Index>(matrix.labels.size());
    if (static_cast<Index>(rows.size()) != N)
        throw std::runtime_error("pairwise csv: expected " + std::to_string(N) + " rows, got " +
                                 std::to_string(rows.size()));
    matrix.wins = Eigen::MatrixXi::Zero(N, N);
    for (Index i = 0; i < N; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Index>(row.size()) != N)
            throw std::runtime_error("pairwise csv: row " + std::to_string(i) + " has " +
                                     std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(N));
        for (Index j = 0; j < N; ++j) {
            const auto& cell = row[static_cast<std::size_t>(j)];
            try {
                matrix.wins(i, j) = std::stoi(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("pairwise csv: cell '" + cell + "' at row " +
                                         std::to_string(i) + " is not an integer");
            }
        }
    }
    return matrix;
}

std::string metrics_csv(const std::string& solver, double alpha, const SequenceMetrics& metrics) {
    std::ostringstream out;
    out.precision(17);
    out << "solver,alpha,frame,rmse,p95,cardinality,l1,seconds\n";
    for (std::size_t f = 0; f < metrics.per_frame.size(); ++f) {
        const auto& fm = metrics.per_frame[f];
        out << solver << ',' << alpha << ',' << f << ',' << fm.rmse_coord << ','
            << fm.err_p95_vertex << ',' << fm.cardinality << ',' << fm.l1_norm << ','
            << fm.seconds << '\n';
    }
    return out.str();
}

std::string summary_csv(const std::string& solver, double alpha, const SequenceMetrics& metrics) {
    std::ostringstream out;
    out.precision(17);
    out << "solver,alpha,rmse_mean,p95_mean,cardinality_mean,l1_mean,seconds_mean,"
           "smoothness_mean\n";
    out << solver << ',' << alpha << ',' << metrics.mean_rmse() << ',' << metrics.mean_p95()
        << ',' << metrics.mean_cardinality() << ',' << metrics.mean_l1() << ','
        << metrics.mean_seconds() << ',' << metrics.mean_smoothness() << '\n';
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inverse rig solver and benchmark harness for quadratic blendshape models"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic rig and animation");
    SynthConfig synth_config;
    std::string synth_out = "synth";
    synth->add_option("--m", synth_config.m, "Number of blendshapes");
    synth->add_option("--vertices", synth_config.n, "Number of mesh vertices");
    synth->add_option("--pairs", synth_config.pair_count, "Number of corrective pairs");
    synth->add_option("--frames", synth_config.frames, "Number of animation frames");
    synth->add_option("--seed", synth_config.seed, "RNG seed");
    synth->add_option("--noise", synth_config.noise_std, "Target noise std (cm)");
    synth->add_option("--sparsity", synth_config.activation_sparsity,
                      "Expected active-weight fraction");
    synth->add_option("--corrective-scale", synth_config.corrective_scale,
                      "Corrective magnitude relative to base deltas");
    synth->add_option("--out-dir", synth_out, "Output directory");

    // precompute
    auto* precompute = app.add_subcommand("precompute", "Build the spectral cache for a model");
    std::string pre_model, pre_out = "cache.rigspect";
    precompute->add_option("--model", pre_model, "Path to model.json")->required();
    precompute->add_option("--out", pre_out, "Output cache path");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit weights for every target frame");
    std::string fit_model, fit_cache, fit_targets, fit_solver = "mm-psd",
                fit_out = "weights.csv";
    double fit_alpha = 5.0;
    MMConfig fit_config;
    int fit_threads = default_threads();
    fit->add_option("--model", fit_model, "Path to model.json")->required();
    fit->add_option("--cache", fit_cache, "Path to spectral cache (mm/pgd solvers)");
    fit->add_option("--targets", fit_targets, "Path to targets .rigframe")->required();
    fit->add_option("--solver", fit_solver, "mm-0|mm-psd|cet|cet-loc|seol|pgd");
    fit->add_option("--alpha", fit_alpha, "Regularization weight");
    fit->add_option("--max-iters", fit_config.max_outer_iterations, "Outer iteration cap");
    fit->add_option("--tol", fit_config.tolerance, "Surrogate-gap tolerance");
    fit->add_option("--threads", fit_threads, "Worker threads over frames");
    fit->add_option("--out", fit_out, "Output weights CSV");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Evaluate fitted weights against targets");
    std::string met_model, met_targets, met_weights, met_truth, met_out = "metrics.csv";
    metrics->add_option("--model", met_model, "Path to model.json")->required();
    metrics->add_option("--targets", met_targets, "Path to targets .rigframe")->required();
    metrics->add_option("--weights", met_weights, "Path to fitted weights .rigframe")->required();
    metrics->add_option("--truth", met_truth, "Optional ground-truth weights .rigframe");
    metrics->add_option("--out", met_out, "Output metrics CSV (summary written alongside)");

    // compare
    auto* compare = app.add_subcommand("compare", "Sweep solvers x alphas into a trade-off table");
    std::string cmp_model, cmp_cache, cmp_targets, cmp_out = "tradeoff.csv";
    std::string cmp_alphas = "0,0.001,0.01,0.1,1,10,100";
    std::vector<std::string> cmp_solvers = {"mm-0", "mm-psd", "cet", "cet-loc", "seol", "pgd"};
    int cmp_threads = default_threads(), cmp_gap = 1;
    MMConfig cmp_config;
    compare->add_option("--model", cmp_model, "Path to model.json")->required();
    compare->add_option("--cache", cmp_cache, "Path to spectral cache")->required();
    compare->add_option("--targets", cmp_targets, "Path to targets .rigframe")->required();
    compare->add_option("--alphas", cmp_alphas, "Comma-separated alpha grid");
    compare->add_option("--solvers", cmp_solvers, "Solvers to run");
    compare->add_option("--subsample-gap", cmp_gap, "Keep every k-th frame");
    compare->add_option("--threads", cmp_threads, "Worker threads over frames");
    compare->add_option("--max-iters", cmp_config.max_outer_iterations, "Outer iteration cap");
    compare->add_option("--out", cmp_out, "Output trade-off CSV");

    // rank
    auto* rank = app.add_subcommand("rank", "Bradley-Terry strengths from a pairwise win matrix");
    std::string rank_in, rank_out = "strengths.csv";
    rank->add_option("--pairwise", rank_in, "Input pairwise win-count CSV")->required();
    rank->add_option("--out", rank_out, "Output label,strength CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            const SyntheticProblem problem = generate_synthetic(synth_config);
            fs::create_directories(synth_out);
            save_model(problem.model, fs::path(synth_out) / "model.json");
            save_frames(problem.ground_truth, fs::path(synth_out) / "truth_weights.rigframe");
            save_frames(problem.targets, fs::path(synth_out) / "targets.rigframe");
            std::cout << "wrote model (m=" << problem.model.num_blendshapes()
                      << ", n=" << problem.model.num_vertices()
                      << ", pairs=" << problem.model.corrective_pairs().size() << ") and "
                      << problem.targets.rows() << " frames to " << synth_out << "\n";
        } else if (*precompute) {
            const BlendshapeModel model = load_model(pre_model);
            const auto t0 = std::chrono::steady_clock::now();
            const SpectralCache cache = build_cache(model);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            save_cache(cache, pre_out);
            std::cout << "s coefficient: " << cache.s_coefficient << "\n"
                      << "precompute time: " << seconds << " s\n";
        } else if (*fit) {
            const BlendshapeModel model = load_model(fit_model);
            const Solver solver = parse_solver(fit_solver);
            SpectralCache cache;
            if (solver == Solver::MM0 || solver == Solver::MMPsd || solver == Solver::Pgd) {
                if (fit_cache.empty())
                    throw std::runtime_error("--cache is required for solver " + fit_solver);
                cache = load_cache(fit_cache);
            }
            const Matrix targets = load_frames(fit_targets);
            const FitResult result =
                fit_sequence(model, cache, targets, solver, fit_alpha, fit_config, fit_threads);
            write_text_file(weights_csv(result.weights, model.names(), result.seconds), fit_out);
            save_frames(result.weights, fs::path(fit_out).replace_extension(".rigframe"));
            std::cout << "fitted " << targets.rows() << " frames with " << fit_solver << " to "
                      << fit_out << "\n";
        } else if (*metrics) {
            const BlendshapeModel model = load_model(met_model);
            const Matrix targets = load_frames(met_targets);
            const Matrix weights = load_frames(met_weights);
            const SequenceMetrics seq =
                sequence_metrics(model, weights, targets, Vector::Zero(weights.rows()));
            write_text_file(metrics_csv("fit", 0.0, seq), met_out);
            const fs::path summary =
                fs::path(met_out).replace_extension("") += "_summary.csv";
            write_text_file(summary_csv("fit", 0.0, seq), summary);
            std::cout << "rmse_mean " << seq.mean_rmse() << "  p95_mean " << seq.mean_p95()
                      << "  cardinality_mean " << seq.mean_cardinality() << "  smoothness_mean "
                      << seq.mean_smoothness() << "\n";
            if (!met_truth.empty()) {
                const Matrix truth = load_frames(met_truth);
                std::cout << "weight RMSE vs truth: "
                          << std::sqrt((weights - truth).squaredNorm() /
                                       double(weights.size()))
                          << "\n";
            }
        } else if (*compare) {
            const BlendshapeModel model = load_model(cmp_model);
            const SpectralCache cache = load_cache(cmp_cache);
            Matrix targets = load_frames(cmp_targets);
            if (cmp_gap > 1) {
                const Index kept = (targets.rows() + cmp_gap - 1) / cmp_gap;
                Matrix thinned(kept, targets.cols());
                for (Index f = 0; f < kept; ++f) thinned.row(f) = targets.row(f * cmp_gap);
                targets = std::move(thinned);
            }
            std::vector<std::tuple<std::string, double, SequenceMetrics>> results;
            for (const auto& solver_str : cmp_solvers) {
                const Solver solver = parse_solver(solver_str);
                const bool has_alpha = solver != Solver::Seol;
                const std::vector<double> alphas =
                    has_alpha ? parse_alphas(cmp_alphas) : std::vector<double>{0.0};
                for (const double alpha : alphas) {
                    const FitResult result = fit_sequence(model, cache, targets, solver, alpha,
                                                          cmp_config, cmp_threads);
                    results.emplace_back(solver_str, alpha, evaluate_fit(model, result, targets));
                    std::cout << solver_str << " alpha=" << alpha << " done\n";
                }
            }
            write_text_file(tradeoff_csv(tradeoff_table(results)), cmp_out);
            std::cout << "wrote " << cmp_out << "\n";
        } else if (*rank) {
            const StrengthVector strengths = bradley_terry(load_pairwise_csv(rank_in));
            std::ostringstream out;
            out.precision(17);
            out << "label,strength\n";
            std::vector<Index> order(strengths.labels.size());
            std::iota(order.begin(), order.end(), Index{0});
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
                return strengths.strengths[a] > strengths.strengths[b];
            });
            for (const Index i : order)
                out << strengths.labels[std::size_t(i)] << ',' << strengths.strengths[i] << '\n';
            write_text_file(out.str(), rank_out);
            std::cout << out.str();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
