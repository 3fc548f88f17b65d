#pragma once

#include "rig/model.hpp"
#include "rig/spectral.hpp"

namespace rig {

/// min q*v + r*v^2 + s*v^4 over [lower, upper], with lower <= 0 <= upper.
struct QuarticSubproblem {
    double q = 0.0;
    double r = 0.0;
    double s = 0.0;  // >= 0
    double lower = 0.0;
    double upper = 0.0;
};

enum class Initialization { Zero, Pseudoinverse, Provided };

struct MMConfig {
    double alpha = 5.0;
    int max_outer_iterations = 100;
    double tolerance = 1e-6;
    Initialization initialization = Initialization::Zero;
};

struct SolveReport {
    Vector weights;                     // final iterate, feasible
    std::vector<double> objective_trace;      // full objective per outer iteration
    std::vector<double> surrogate_gap_trace;  // |psi(v_hat) - psi(0)| per iteration
    int iterations_used = 0;
    bool converged = false;  // tolerance met before the iteration cap
    double wall_time_seconds = 0.0;
};

/// ||f_Q(w) - target||^2 + alpha * sum_j w_j, target in delta form.
double objective(const BlendshapeModel& model, const WeightVector& w, const Vector& target,
                 double alpha);

/// Separable upper bound on the increment objective, tangent at v = 0:
/// sum_i (g_i^2 + 2 g_i h_i.v + 2(g_i lam_M + |h_i|^2)|v|^2) + s * sum_j v_j^4
/// + alpha * sum_j v_j.
double surrogate_value(const ResidualTerms& terms, const SpectralCache& cache, const Vector& v,
                       double alpha);

/// Global minimizer over the box; ties broken toward smallest |v|.
double minimize_quartic(const QuarticSubproblem& p);

/// One pass of the coordinate-wise surrogate minimization: shared r and s,
/// per-blendshape q_j, independent box-constrained quartic solves.
Vector inner_iteration(const ResidualTerms& terms, const SpectralCache& cache,
                       const WeightVector& w, double alpha);

/// Outer majorization-minimization loop. w0 is required when
/// config.initialization == Provided and ignored otherwise except as a check.
SolveReport solve_mm(const BlendshapeModel& model, const SpectralCache& cache,
                     const Vector& target, const MMConfig& config,
                     const WeightVector* w0 = nullptr);

}  // namespace rig
