#pragma once

#include <optional>
#include <string>

#include "rig/baselines.hpp"
#include "rig/metrics.hpp"
#include "rig/mm.hpp"

namespace rig {

enum class Solver { MM0, MMPsd, Cet, CetLoc, Seol, Pgd };

Solver parse_solver(const std::string& name);
std::string solver_name(Solver solver);

struct FitResult {
    Matrix weights;  // frames x m
    Vector seconds;  // per frame
};

/// Solves every row of targets (delta form) with the requested solver.
/// Frames are distributed over `threads` workers writing disjoint rows, so
/// results are bit-identical for any thread count.
FitResult fit_sequence(const BlendshapeModel& model, const SpectralCache& cache,
                       const Matrix& targets, Solver solver, double alpha,
                       const MMConfig& config, int threads = 1);

/// Per-frame metrics for one fitted sequence.
SequenceMetrics evaluate_fit(const BlendshapeModel& model, const FitResult& fit,
                             const Matrix& targets);

}  // namespace rig
