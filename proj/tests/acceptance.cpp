// Acceptance suite: each criterion runs standalone (`acceptance N`) or all
// together (`acceptance`), printing one pass/fail line per criterion.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rig/baselines.hpp"
#include "rig/fit.hpp"
#include "rig/io.hpp"
#include "rig/metrics.hpp"
#include "rig/mm.hpp"
#include "rig/ranking.hpp"

using namespace rig;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

bool criterion_majorization() {
    Timer timer;
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<Index> pick_m(5, 40), pick_n(20, 300);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double alpha = 0.5;

    int violations = 0;
    double worst_gap = 0.0, worst_tangency = 0.0;
    const int models = 50, triples_per_model = 20;
    for (int mi = 0; mi < models; ++mi) {
        const Index m = pick_m(rng), n = pick_n(rng);
        const Index pairs = std::min<Index>(60, m * (m - 1) / 2);
        auto model = oracles::random_model(m, n, pairs, 9000 + std::uint64_t(mi));
        const auto cache = build_cache(model);
        for (int t = 0; t < triples_per_model; ++t) {
            Vector w(m), v(m), target(model.dim());
            for (Index j = 0; j < m; ++j) {
                w[j] = unit(rng);
                v[j] = unit(rng) * (1.0 - w[j]) - unit(rng) * w[j];
            }
            for (Index i = 0; i < target.size(); ++i) target[i] = gauss(rng);

            const auto terms = residual_terms(model, WeightVector(w), target);
            const double psi = surrogate_value(terms, cache, v, alpha);
            Vector wv = w + v;
            for (Index j = 0; j < m; ++j) wv[j] = std::clamp(wv[j], 0.0, 1.0);
            const double obj = objective(model, WeightVector(wv), target, alpha);
            const double gap = (obj - alpha * w.sum()) - psi;  // must be <= 1e-9
            worst_gap = std::max(worst_gap, gap);
            if (gap > 1e-9) ++violations;

            const double fidelity = objective(model, WeightVector(w), target, 0.0);
            const double psi0 = surrogate_value(terms, cache, Vector::Zero(m), alpha);
            const double rel = std::abs(psi0 - fidelity) / std::max(1.0, fidelity);
            worst_tangency = std::max(worst_tangency, rel);
            if (rel > 1e-12) ++violations;
        }
    }
    std::cout << "  majorization: 1000 triples, worst slack " << worst_gap
              << ", worst tangency " << worst_tangency << ", " << timer.seconds() << " s\n";
    return violations == 0 && timer.seconds() < 60.0;
}

bool criterion_descent() {
    Timer timer;
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        SynthConfig config;
        config.m = 15;
        config.n = 120;
        config.pair_count = 25;
        config.frames = 1;
        config.seed = 7000 + std::uint64_t(trial);
        config.noise_std = 0.01;
        const auto problem = generate_synthetic(config);
        const auto cache = build_cache(problem.model);
        for (const auto init : {Initialization::Zero, Initialization::Pseudoinverse}) {
            MMConfig mm;
            mm.alpha = 0.1;
            mm.max_outer_iterations = 40;
            mm.initialization = init;
            const auto report = solve_mm(problem.model, cache, problem.targets.row(0), mm);
            for (std::size_t t = 1; t < report.objective_trace.size(); ++t)
                if (report.objective_trace[t] > report.objective_trace[t - 1] + 1e-10) ok = false;
            if (report.weights.minCoeff() < 0.0 || report.weights.maxCoeff() > 1.0) ok = false;
        }
    }
    std::cout << "  descent: 50 problems x {mm-0, mm-psd}, " << timer.seconds() << " s\n";
    return ok && timer.seconds() < 300.0;
}

bool criterion_quartic() {
    Timer timer;
    std::mt19937_64 rng(3003);
    std::normal_distribution<double> gauss(0.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int bad = 0;
    double worst_arg = 0.0, worst_val = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        QuarticSubproblem p;
        p.q = gauss(rng);
        p.r = gauss(rng);  // negative r included
        p.s = trial % 4 == 0 ? 0.0 : std::abs(gauss(rng));
        if (trial % 7 == 0) p.q *= 20.0;  // push the optimum onto an endpoint
        const double w = unit(rng);
        p.lower = -w;
        p.upper = 1.0 - w;
        const double got = minimize_quartic(p);
        const double want = oracles::quartic_minimizer(p.q, p.r, p.s, p.lower, p.upper);
        auto f = [&](double x) { return p.q * x + p.r * x * x + p.s * x * x * x * x; };
        const double dval = std::abs(f(got) - f(want));
        const double darg = std::abs(got - want);
        worst_val = std::max(worst_val, f(got) - f(want));
        if (f(got) - f(want) > 1e-10) ++bad;
        if (darg > 1e-6) {
            worst_arg = std::max(worst_arg, darg);
            if (dval > 1e-10) ++bad;  // genuine ties excluded
        }
    }
    std::cout << "  quartic: 1000 instances, worst value excess " << worst_val << ", "
              << timer.seconds() << " s\n";
    return bad == 0 && timer.seconds() < 10.0;
}

bool criterion_spectral() {
    Timer timer;
    std::mt19937_64 rng(4004);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick_m(4, 60);
    bool ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = pick_m(rng);
        std::uniform_int_distribution<int> pick_idx(0, m - 1);
        CorrectiveMatrixView view;
        view.m = m;
        std::set<std::pair<int, int>> used;
        const int want_pairs = std::min(m * (m - 1) / 2, 3 * m / 2);
        while (int(used.size()) < want_pairs) {
            int j = pick_idx(rng), k = pick_idx(rng);
            if (j == k) continue;
            if (j > k) std::swap(j, k);
            if (used.insert({j, k}).second) view.entries.push_back({j, k, gauss(rng)});
        }
        const auto ext = extreme_eigenvalues(view);
        const auto eig = oracles::jacobi_eigenvalues(view.to_dense());
        const double want_min = *std::min_element(eig.begin(), eig.end());
        const double want_max = *std::max_element(eig.begin(), eig.end());
        if (std::abs(ext.lambda_min - want_min) > 1e-8) ok = false;
        if (std::abs(ext.lambda_max - want_max) > 1e-8) ok = false;
        if (std::abs(ext.sigma - std::max(std::abs(want_min), std::abs(want_max))) > 1e-8)
            ok = false;
        // Rayleigh sampling
        const Matrix dense = view.to_dense();
        for (int s = 0; s < 25; ++s) {
            Vector u(m);
            for (int j = 0; j < m; ++j) u[j] = gauss(rng);
            u.normalize();
            const double q = u.dot(dense * u);
            if (q < ext.lambda_min - 1e-8 || q > ext.lambda_max + 1e-8) ok = false;
        }
    }
    std::cout << "  spectral: 200 matrices vs Jacobi oracle, " << timer.seconds() << " s\n";
    return ok;
}

SyntheticProblem benchmark_problem() {
    SynthConfig config;
    config.m = 60;
    config.n = 1000;
    config.pair_count = 90;
    config.frames = 80;
    config.seed = 2024;
    config.noise_std = 0.002;
    config.corrective_scale = 0.3;
    return generate_synthetic(config);
}

bool criterion_benchmark() {
    Timer timer;
    const auto problem = benchmark_problem();
    const auto cache = build_cache(problem.model);
    const std::vector<double> alphas = {0, 0.001, 0.01, 0.1, 1, 10, 100};
    MMConfig mm;
    mm.max_outer_iterations = 100;

    auto sweep = [&](Solver solver) {
        std::vector<TradeoffRow> rows;
        for (const double alpha : alphas) {
            const auto fit = fit_sequence(problem.model, cache, problem.targets, solver, alpha,
                                          mm, 8);
            const auto metrics = evaluate_fit(problem.model, fit, problem.targets);
            TradeoffRow row;
            row.solver = solver_name(solver);
            row.alpha = alpha;
            row.p95_mean = metrics.mean_p95();
            row.cardinality_mean = metrics.mean_cardinality();
            rows.push_back(row);
        }
        return rows;
    };

    const auto mm_rows = sweep(Solver::MMPsd);
    const auto cet_rows = sweep(Solver::Cet);
    const double mm_alpha = pick_elbow_alpha(mm_rows);
    const double cet_alpha = pick_elbow_alpha(cet_rows);

    auto row_at = [](const std::vector<TradeoffRow>& rows, double alpha) {
        for (const auto& r : rows)
            if (r.alpha == alpha) return r;
        throw std::logic_error("alpha not in sweep");
    };
    const auto mm_best = row_at(mm_rows, mm_alpha);
    const auto cet_best = row_at(cet_rows, cet_alpha);

    const auto seol_fit =
        fit_sequence(problem.model, cache, problem.targets, Solver::Seol, 0.0, mm, 8);
    const double seol_card =
        evaluate_fit(problem.model, seol_fit, problem.targets).mean_cardinality();

    const double improvement = 1.0 - mm_best.p95_mean / cet_best.p95_mean;
    std::cout << "  benchmark: mm-psd p95 " << mm_best.p95_mean << " (alpha " << mm_alpha
              << ") vs cet p95 " << cet_best.p95_mean << " (alpha " << cet_alpha
              << "), improvement " << 100.0 * improvement << "%\n"
              << "  cardinality: mm-psd " << mm_best.cardinality_mean << " vs seol "
              << seol_card << ", " << timer.seconds() << " s\n";
    return improvement >= 0.15 && mm_best.cardinality_mean <= 1.2 * seol_card &&
           timer.seconds() < 900.0;
}

bool criterion_baseline_oracles() {
    std::mt19937_64 rng(6006);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool ok = true;

    // ridge vs dense normal-equation oracle, pre-clip
    auto model = oracles::random_model(8, 10, 0, 66);
    RidgeSolveContext ridge(model.deltas(), 0.1);
    for (int trial = 0; trial < 50; ++trial) {
        Vector target(model.dim());
        for (Index i = 0; i < target.size(); ++i) target[i] = gauss(rng);
        Matrix lhs = model.deltas().transpose() * model.deltas();
        lhs.diagonal().array() += 0.1;
        const Vector want = lhs.fullPivLu().solve(model.deltas().transpose() * target);
        if ((ridge.solve_raw(target) - want).lpNorm<Eigen::Infinity>() > 1e-8) ok = false;
    }

    // hand-computed single-blendshape projections
    {
        Matrix deltas = Matrix::Zero(3, 1);
        deltas(0, 0) = 1.0;
        BlendshapeModel single(1, Vector::Zero(3), deltas, {}, {"a"});
        Vector target = Vector::Zero(3);
        target[0] = 0.5;
        if (solve_seol(single, target)[0] != 0.5) ok = false;
        target[0] = 2.0;
        if (solve_seol(single, target)[0] != 1.0) ok = false;
    }
    // two orthogonal blendshapes, exact recovery
    {
        Matrix deltas = Matrix::Zero(6, 2);
        deltas(0, 0) = 1.0;
        deltas(4, 1) = 1.0;
        BlendshapeModel two(2, Vector::Zero(6), deltas, {}, {"a", "b"});
        Vector w_true(2);
        w_true << 0.6, 0.3;
        const auto w = solve_seol(two, deltas * w_true);
        if (std::abs(w[0] - 0.6) > 1e-12 || std::abs(w[1] - 0.3) > 1e-12) ok = false;
        const auto wc = solve_cet(two, deltas * w_true, 0.0);
        if ((wc.values() - w_true).lpNorm<Eigen::Infinity>() > 1e-12) ok = false;
    }
    std::cout << "  baseline oracles checked\n";
    return ok;
}

bool criterion_bradley_terry() {
    bool ok = true;
    PairwiseMatrix study;
    study.labels = {"mm", "sqp", "cet", "cet-loc", "seol"};
    study.wins = Eigen::MatrixXi::Zero(5, 5);
    const int rows[5][5] = {{0, 5, 12, 12, 11},
                            {6, 0, 9, 9, 12},
                            {0, 3, 0, 3, 3},
                            {0, 2, 2, 0, 3},
                            {2, 3, 5, 5, 0}};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) study.wins(i, j) = rows[i][j];
    const auto s = bradley_terry(study);
    for (int i = 1; i < 5; ++i)
        if (s.strengths[0] <= s.strengths[i]) ok = false;  // mm strictly largest
    for (int i = 2; i < 5; ++i)
        if (s.strengths[1] <= s.strengths[i]) ok = false;  // sqp-analog second

    PairwiseMatrix duel;
    duel.labels = {"a", "b"};
    duel.wins = Eigen::MatrixXi::Zero(2, 2);
    duel.wins(0, 1) = 3;
    duel.wins(1, 0) = 1;
    const auto d = bradley_terry(duel);
    if (std::abs(d.strengths[0] - 0.75) > 1e-9 || std::abs(d.strengths[1] - 0.25) > 1e-9)
        ok = false;

    auto scaled = study;
    scaled.wins *= 5;
    if ((bradley_terry(scaled).strengths - s.strengths).lpNorm<Eigen::Infinity>() > 1e-9)
        ok = false;
    const int perm[5] = {4, 2, 0, 1, 3};
    PairwiseMatrix permuted;
    permuted.labels.resize(5);
    permuted.wins = Eigen::MatrixXi::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
        permuted.labels[std::size_t(perm[i])] = study.labels[std::size_t(i)];
        for (int j = 0; j < 5; ++j) permuted.wins(perm[i], perm[j]) = study.wins(i, j);
    }
    const auto ps = bradley_terry(permuted);
    for (int i = 0; i < 5; ++i)
        if (std::abs(ps.strengths[perm[i]] - s.strengths[i]) > 1e-9) ok = false;

    std::cout << "  bradley-terry: strengths";
    for (int i = 0; i < 5; ++i) std::cout << ' ' << s.labels[std::size_t(i)] << '=' << s.strengths[i];
    std::cout << "\n";
    return ok;
}

bool criterion_metric_units() {
    std::mt19937_64 rng(8008);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const Index T = 3 + trial % 30;
        const double c0 = unit(rng), c1 = unit(rng) - 0.5;
        Vector constant = Vector::Constant(T, c0);
        Vector affine(T);
        for (Index t = 0; t < T; ++t) affine[t] = c0 + c1 * double(t);
        if (smoothness_factor(constant) > 1e-18) ok = false;
        if (smoothness_factor(affine) > 1e-18) ok = false;
    }
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 20 + trial % 50;
        Vector pred(3 * n), ref(3 * n);
        for (Index i = 0; i < 3 * n; ++i) {
            pred[i] = gauss(rng);
            ref[i] = gauss(rng);
        }
        const double c = 0.1 + 5.0 * unit(rng);
        const double scaled = err_p95(Vector(c * pred), Vector(c * ref), n);
        if (std::abs(scaled - c * err_p95(pred, ref, n)) > 1e-12) ok = false;

        Vector w(10);
        for (Index j = 0; j < 10; ++j) w[j] = unit(rng);
        int prev = 11;
        for (const double eps : {0.0, 1e-4, 1e-2, 0.3, 1.0}) {
            const int card = cardinality(WeightVector(w), eps);
            if (card > prev) ok = false;
            prev = card;
        }
    }
    std::cout << "  metric units checked\n";
    return ok;
}

bool criterion_performance() {
    SynthConfig config;
    config.m = 130;
    config.n = 4000;
    config.pair_count = 200;
    config.frames = 1;
    config.seed = 99;
    config.noise_std = 0.002;
    const auto problem = generate_synthetic(config);

    Timer cache_timer;
    const auto cache = build_cache(problem.model);
    const double cache_seconds = cache_timer.seconds();

    MMConfig mm;
    mm.alpha = 5.0;
    mm.max_outer_iterations = 100;
    mm.initialization = Initialization::Pseudoinverse;
    Timer solve_timer;
    const auto report = solve_mm(problem.model, cache, problem.targets.row(0), mm);
    const double solve_seconds = solve_timer.seconds();

    std::cout << "  performance: mm-psd frame " << solve_seconds << " s ("
              << report.iterations_used << " iterations), precompute " << cache_seconds
              << " s\n";
    return solve_seconds < 60.0 && cache_seconds < 300.0;
}

bool criterion_determinism() {
    Timer timer;
    const auto problem = benchmark_problem();
    const auto cache = build_cache(problem.model);
    MMConfig mm;
    mm.max_outer_iterations = 100;
    bool ok = true;
    for (const auto solver : {Solver::MMPsd, Solver::Cet, Solver::Seol}) {
        const auto one =
            fit_sequence(problem.model, cache, problem.targets, solver, 0.1, mm, 1);
        const auto eight =
            fit_sequence(problem.model, cache, problem.targets, solver, 0.1, mm, 8);
        if (one.weights != eight.weights) ok = false;
        // weight CSV bytes, timing column excluded (it is wall-clock noise)
        const Vector zero_secs = Vector::Zero(one.weights.rows());
        if (weights_csv(one.weights, problem.model.names(), zero_secs) !=
            weights_csv(eight.weights, problem.model.names(), zero_secs))
            ok = false;
    }
    std::cout << "  determinism: threads 1 vs 8 identical, " << timer.seconds() << " s\n";
    return ok;
}

struct Criterion {
    const char* name;
    bool (*run)();
};

const Criterion kCriteria[] = {
    {"majorization suite", criterion_majorization},
    {"descent suite", criterion_descent},
    {"quartic oracle", criterion_quartic},
    {"spectral oracle", criterion_spectral},
    {"scaled benchmark analog", criterion_benchmark},
    {"baseline oracles", criterion_baseline_oracles},
    {"bradley-terry", criterion_bradley_terry},
    {"metric units", criterion_metric_units},
    {"performance envelope", criterion_performance},
    {"determinism", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    bool all_ok = true;
    for (int i = 0; i < 10; ++i) {
        if (only != 0 && only != i + 1) continue;
        bool ok = false;
        try {
            ok = kCriteria[i].run();
        } catch (const std::exception& e) {
            std::cout << "  exception: " << e.what() << "\n";
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << (i + 1) << ": "
                  << kCriteria[i].name << "\n";
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
