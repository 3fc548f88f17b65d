#include "rig/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace rig {

namespace {

Vector clip01(Vector w) {
    for (Index j = 0; j < w.size(); ++j) w[j] = std::clamp(w[j], 0.0, 1.0);
    return w;
}

}  // namespace

RidgeSolveContext::RidgeSolveContext(const Matrix& blend_deltas, double alpha)
    : deltas_(blend_deltas), alpha_(alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("ridge: alpha must be nonnegative");
    const Index m = deltas_.cols();
    Matrix gram = deltas_.transpose() * deltas_;
    gram.diagonal().array() += alpha;
    if (alpha == 0.0) {
        // LDLT silently accepts a singular PSD matrix; rank-check up front.
        Eigen::ColPivHouseholderQR<Matrix> qr(deltas_);
        if (qr.rank() < m)
            throw std::runtime_error("solve_cet: singular system (rank-deficient B at alpha=0)");
    }
    factorization_.compute(gram);
    if (factorization_.info() != Eigen::Success)
        throw std::runtime_error("solve_cet: factorization failed");
}

Vector RidgeSolveContext::solve_raw(const Vector& target) const {
    if (target.size() != deltas_.rows())
        throw std::invalid_argument("solve_cet: target length mismatch");
    return factorization_.solve(deltas_.transpose() * target);
}

WeightVector RidgeSolveContext::solve(const Vector& target) const {
    return WeightVector(clip01(solve_raw(target)));
}

WeightVector solve_cet(const BlendshapeModel& model, const Vector& target, double alpha) {
    return RidgeSolveContext(model.deltas(), alpha).solve(target);
}

Matrix localize_deltas(const BlendshapeModel& model, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("solve_cet_loc: threshold must be in (0,1)");
    Matrix loc = model.deltas();
    const Index n = model.num_vertices();
    for (Index j = 0; j < loc.cols(); ++j) {
        double max_norm = 0.0;
        for (Index v = 0; v < n; ++v)
            max_norm = std::max(max_norm, loc.col(j).segment(3 * v, 3).norm());
        const double cutoff = threshold * max_norm;
        for (Index v = 0; v < n; ++v)
            if (loc.col(j).segment(3 * v, 3).norm() < cutoff)
                loc.col(j).segment(3 * v, 3).setZero();
    }
    return loc;
}

WeightVector solve_cet_loc(const BlendshapeModel& model, const Vector& target, double alpha,
                           double threshold) {
    return RidgeSolveContext(localize_deltas(model, threshold), alpha).solve(target);
}

WeightVector solve_seol(const BlendshapeModel& model, const Vector& target) {
    if (target.size() != model.dim())
        throw std::invalid_argument("solve_seol: target length != 3n");
    const Matrix& B = model.deltas();
    const Index m = model.num_blendshapes();
    const Index n = model.num_vertices();

    // Descending mean per-vertex displacement norm, ties by column index.
    Vector magnitude(m);
    for (Index j = 0; j < m; ++j) {
        double acc = 0.0;
        for (Index v = 0; v < n; ++v) acc += B.col(j).segment(3 * v, 3).norm();
        magnitude[j] = acc / static_cast<double>(n);
    }
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return magnitude[a] > magnitude[b]; });

    Vector w = Vector::Zero(m);
    Vector residual = target;
    for (Index j : order) {
        const double denom = B.col(j).squaredNorm();
        if (denom == 0.0) {
            std::cerr << "solve_seol: skipping zero-norm blendshape " << j << "\n";
            continue;
        }
        w[j] = std::clamp(B.col(j).dot(residual) / denom, 0.0, 1.0);
        residual -= B.col(j) * w[j];
    }
    return WeightVector(w);
}

SolveReport solve_projected_descent(const BlendshapeModel& model, const SpectralCache& cache,
                                    const Vector& target, double alpha, const MMConfig& config) {
    check_cache(cache, model);
    if (target.size() != model.dim())
        throw std::invalid_argument("solve_projected_descent: target length != 3n");
    const auto start = std::chrono::steady_clock::now();
    const Index m = model.num_blendshapes();
    const int max_iters = std::max(1000, 10 * config.max_outer_iterations);

    Vector w = Vector::Zero(m);
    double value = objective(model, WeightVector(w), target, alpha);
    SolveReport report;
    report.objective_trace.push_back(value);

    double step = 1.0;
    for (int t = 0; t < max_iters; ++t) {
        const ResidualTerms terms = residual_terms(model, WeightVector(w), target);
        const Vector grad = 2.0 * (terms.h.transpose() * terms.g) + Vector::Constant(m, alpha);

        Vector cand;
        double cand_value = value;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            cand = clip01(w - step * grad);
            cand_value = objective(model, WeightVector(cand), target, alpha);
            const double move = (cand - w).squaredNorm();
            if (cand_value <= value - 1e-4 * move / std::max(step, 1e-300)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const double move_norm = (cand - w).lpNorm<Eigen::Infinity>();
        w = cand;
        value = cand_value;
        report.objective_trace.push_back(value);
        report.iterations_used = t + 1;
        step = std::min(step * 2.0, 1e6);
        if (move_norm < 1e-10) {
            report.converged = true;
            break;
        }
    }

    report.weights = w;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace rig
