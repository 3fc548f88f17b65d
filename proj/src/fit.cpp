#include "rig/fit.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>
#include <thread>

namespace rig {

Solver parse_solver(const std::string& name) {
    if (name == "mm-0") return Solver::MM0;
    if (name == "mm-psd") return Solver::MMPsd;
    if (name == "cet") return Solver::Cet;
    if (name == "cet-loc") return Solver::CetLoc;
    if (name == "seol") return Solver::Seol;
    if (name == "pgd") return Solver::Pgd;
    throw std::invalid_argument("unknown solver: " + name +
                                " (expected mm-0|mm-psd|cet|cet-loc|seol|pgd)");
}

std::string solver_name(Solver solver) {
    switch (solver) {
        case Solver::MM0: return "mm-0";
        case Solver::MMPsd: return "mm-psd";
        case Solver::Cet: return "cet";
        case Solver::CetLoc: return "cet-loc";
        case Solver::Seol: return "seol";
        case Solver::Pgd: return "pgd";
    }
    throw std::logic_error("unreachable");
}

FitResult fit_sequence(const BlendshapeModel& model, const SpectralCache& cache,
                       const Matrix& targets, Solver solver, double alpha,
                       const MMConfig& config, int threads) {
    if (targets.cols() != model.dim())
        throw std::invalid_argument("fit_sequence: target dim != 3n");
    if (solver == Solver::MM0 || solver == Solver::MMPsd || solver == Solver::Pgd)
        check_cache(cache, model);
    if (threads < 1) threads = 1;

    const Index frames = targets.rows();
    FitResult result;
    result.weights = Matrix::Zero(frames, model.num_blendshapes());
    result.seconds = Vector::Zero(frames);

    // Ridge factorizations shared across frames.
    std::unique_ptr<RidgeSolveContext> ridge;
    std::unique_ptr<RidgeSolveContext> ridge_loc;
    Matrix loc_deltas;
    if (solver == Solver::Cet || solver == Solver::MMPsd)
        ridge = std::make_unique<RidgeSolveContext>(model.deltas(), alpha);
    if (solver == Solver::CetLoc) {
        loc_deltas = localize_deltas(model, 0.05);
        ridge_loc = std::make_unique<RidgeSolveContext>(loc_deltas, alpha);
    }

    auto solve_frame = [&](Index f) {
        const auto t0 = std::chrono::steady_clock::now();
        const Vector target = targets.row(f);
        Vector w;
        switch (solver) {
            case Solver::MM0: {
                MMConfig c = config;
                c.alpha = alpha;
                c.initialization = Initialization::Zero;
                w = solve_mm(model, cache, target, c).weights;
                break;
            }
            case Solver::MMPsd: {
                MMConfig c = config;
                c.alpha = alpha;
                c.initialization = Initialization::Provided;
                const WeightVector w0 = ridge->solve(target);
                w = solve_mm(model, cache, target, c, &w0).weights;
                break;
            }
            case Solver::Cet:
                w = ridge->solve(target).values();
                break;
            case Solver::CetLoc:
                w = ridge_loc->solve(target).values();
                break;
            case Solver::Seol:
                w = solve_seol(model, target).values();
                break;
            case Solver::Pgd: {
                MMConfig c = config;
                c.alpha = alpha;
                w = solve_projected_descent(model, cache, target, alpha, c).weights;
                break;
            }
        }
        result.weights.row(f) = w;
        result.seconds[f] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (threads == 1 || frames <= 1) {
        for (Index f = 0; f < frames; ++f) solve_frame(f);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        for (int c = 0; c < threads; ++c) {
            pool.emplace_back([&, c] {
                try {
                    for (Index f = c; f < frames; f += threads) solve_frame(f);
                } catch (...) {
                    errors[static_cast<std::size_t>(c)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
    return result;
}

SequenceMetrics evaluate_fit(const BlendshapeModel& model, const FitResult& fit,
                             const Matrix& targets) {
    return sequence_metrics(model, fit.weights, targets, fit.seconds);
}

}  // namespace rig
