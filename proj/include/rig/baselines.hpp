#pragma once

#include "rig/mm.hpp"
#include "rig/model.hpp"
#include "rig/spectral.hpp"

namespace rig {

/// Ridge solve in the linear model: w = clip((B^T B + alpha I)^-1 B^T target, 0, 1).
WeightVector solve_cet(const BlendshapeModel& model, const Vector& target, double alpha);

/// Factorization of (B^T B + alpha I), reused across frames of a sequence.
class RidgeSolveContext {
public:
    RidgeSolveContext(const Matrix& blend_deltas, double alpha);
    WeightVector solve(const Vector& target) const;
    /// Ridge solution before clipping to [0,1].
    Vector solve_raw(const Vector& target) const;

private:
    const Matrix& deltas_;
    Eigen::LDLT<Matrix> factorization_;
    double alpha_;
};

/// solve_cet on a localized matrix: per column, vertex blocks whose
/// displacement norm falls below threshold * (column max) are zeroed.
WeightVector solve_cet_loc(const BlendshapeModel& model, const Vector& target, double alpha,
                           double threshold = 0.05);

/// Localized copy of the delta matrix (exposed for inspection/tests).
Matrix localize_deltas(const BlendshapeModel& model, double threshold);

/// Sequential single-blendshape projections in descending order of mean
/// per-vertex displacement, residual updated after each clipped weight.
WeightVector solve_seol(const BlendshapeModel& model, const Vector& target);

/// Projected gradient descent with backtracking on the full quadratic-rig
/// objective; dense-activation, high-fidelity reference solver.
SolveReport solve_projected_descent(const BlendshapeModel& model, const SpectralCache& cache,
                                    const Vector& target, double alpha, const MMConfig& config);

}  // namespace rig
