#include "rig/mm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "rig/baselines.hpp"

namespace rig {

namespace {

double quartic_value(const QuarticSubproblem& p, double v) {
    const double v2 = v * v;
    return p.q * v + p.r * v2 + p.s * v2 * v2;
}

// Real roots of 4s v^3 + 2r v + q = 0 (s > 0), Cardano followed by a
// safeguarded Newton polish.
void stationary_points(double q, double r, double s, std::vector<double>& roots) {
    roots.clear();
    const double p = r / (2.0 * s);        // depressed cubic v^3 + p v + qt = 0
    const double qt = q / (4.0 * s);
    const double disc = 0.25 * qt * qt + p * p * p / 27.0;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        roots.push_back(std::cbrt(-0.5 * qt + sq) + std::cbrt(-0.5 * qt - sq));
    } else if (p == 0.0) {
        roots.push_back(std::cbrt(-qt));
    } else {
        const double rad = std::sqrt(-p / 3.0);
        double arg = 1.5 * qt / (p * rad);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots.push_back(2.0 * rad * std::cos((theta - 2.0 * M_PI * k) / 3.0));
    }
    // Polish: closed form is fragile near repeated roots.
    for (double& v : roots) {
        for (int it = 0; it < 8; ++it) {
            const double f = 4.0 * s * v * v * v + 2.0 * r * v + q;
            const double df = 12.0 * s * v * v + 2.0 * r;
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step) || std::abs(step) > 1.0 + std::abs(v)) break;
            v -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(v))) break;
        }
    }
}

}  // namespace

double objective(const BlendshapeModel& model, const WeightVector& w, const Vector& target,
                 double alpha) {
    if (target.size() != model.dim())
        throw std::invalid_argument("objective: target length != 3n");
    const Vector res = eval_quadratic_delta(model, w.values()) - target;
    return res.squaredNorm() + alpha * w.values().sum();
}

double surrogate_value(const ResidualTerms& terms, const SpectralCache& cache, const Vector& v,
                       double alpha) {
    const Vector& g = terms.g;
    double g_lambda = 0.0;
    for (Index i = 0; i < g.size(); ++i)
        g_lambda += g[i] * (g[i] < 0.0 ? cache.lambda_min[i] : cache.lambda_max[i]);
    const double linear = 2.0 * g.dot(terms.h * v);
    const double quadratic = 2.0 * (g_lambda + terms.h.squaredNorm()) * v.squaredNorm();
    const double quartic = cache.s_coefficient * v.array().pow(4).sum();
    return g.squaredNorm() + linear + quadratic + quartic + alpha * v.sum();
}

double minimize_quartic(const QuarticSubproblem& p) {
    if (!std::isfinite(p.q) || !std::isfinite(p.r) || !std::isfinite(p.s))
        throw std::invalid_argument("minimize_quartic: non-finite coefficients");
    if (p.s < 0.0) throw std::invalid_argument("minimize_quartic: s must be nonnegative");
    if (!(p.lower <= 0.0 && 0.0 <= p.upper))
        throw std::invalid_argument("minimize_quartic: box must contain 0");
    if (p.q == 0.0 && p.r == 0.0 && p.s == 0.0) return 0.0;

    std::vector<double> candidates = {p.lower, p.upper};
    if (p.s == 0.0) {
        if (p.r != 0.0) candidates.push_back(-p.q / (2.0 * p.r));
    } else {
        static thread_local std::vector<double> roots;
        stationary_points(p.q, p.r, p.s, roots);
        candidates.insert(candidates.end(), roots.begin(), roots.end());
    }

    double best_v = 0.0;
    double best_f = std::numeric_limits<double>::infinity();
    for (double v : candidates) {
        if (!std::isfinite(v)) continue;
        v = std::clamp(v, p.lower, p.upper);
        const double f = quartic_value(p, v);
        if (f < best_f || (f == best_f && std::abs(v) < std::abs(best_v))) {
            best_f = f;
            best_v = v;
        }
    }
    return best_v;
}

Vector inner_iteration(const ResidualTerms& terms, const SpectralCache& cache,
                       const WeightVector& w, double alpha) {
    const Index m = w.size();
    const Vector& g = terms.g;
    const Vector q = 2.0 * (terms.h.transpose() * g) + Vector::Constant(m, alpha);
    double g_lambda = 0.0;
    for (Index i = 0; i < g.size(); ++i)
        g_lambda += g[i] * (g[i] < 0.0 ? cache.lambda_min[i] : cache.lambda_max[i]);
    const double r = 2.0 * (g_lambda + terms.h.squaredNorm());
    const double s = cache.s_coefficient;

    Vector v(m);
    for (Index j = 0; j < m; ++j)
        v[j] = minimize_quartic({q[j], r, s, -w[j], 1.0 - w[j]});
    return v;
}

SolveReport solve_mm(const BlendshapeModel& model, const SpectralCache& cache,
                     const Vector& target, const MMConfig& config, const WeightVector* w0) {
    check_cache(cache, model);
    if (target.size() != model.dim())
        throw std::invalid_argument("solve_mm: target length != 3n");
    if (config.max_outer_iterations <= 0 || !(config.tolerance > 0.0) ||
        !(config.alpha >= 0.0) || !std::isfinite(config.alpha))
        throw std::invalid_argument("solve_mm: invalid config");

    const auto start = std::chrono::steady_clock::now();

    Vector w;
    switch (config.initialization) {
        case Initialization::Zero:
            w = Vector::Zero(model.num_blendshapes());
            break;
        case Initialization::Pseudoinverse:
            w = solve_cet(model, target, config.alpha).values();
            break;
        case Initialization::Provided:
            if (w0 == nullptr)
                throw std::invalid_argument("solve_mm: initialization Provided requires w0");
            w = w0->values();
            break;
    }

    SolveReport report;
    report.objective_trace.push_back(objective(model, WeightVector(w), target, config.alpha));

    for (int t = 0; t < config.max_outer_iterations; ++t) {
        const WeightVector wv(w);
        const ResidualTerms terms = residual_terms(model, wv, target);
        const Vector v = inner_iteration(terms, cache, wv, config.alpha);

        const double psi_zero = terms.g.squaredNorm();
        const double psi_v = surrogate_value(terms, cache, v, config.alpha);
        const double gap = std::abs(psi_v - psi_zero);

        for (Index j = 0; j < w.size(); ++j) {
            // Snap exact box-face increments; the clamp only guards 1-ulp
            // rounding of the sum.
            if (v[j] == 1.0 - w[j])
                w[j] = 1.0;
            else if (v[j] == -w[j])
                w[j] = 0.0;
            else
                w[j] = std::clamp(w[j] + v[j], 0.0, 1.0);
        }

        report.iterations_used = t + 1;
        report.surrogate_gap_trace.push_back(gap);
        report.objective_trace.push_back(objective(model, WeightVector(w), target, config.alpha));

        if (gap < config.tolerance) {
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
