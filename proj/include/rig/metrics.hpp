#pragma once

#include <string>
#include <vector>

#include "rig/model.hpp"

namespace rig {

struct FrameMetrics {
    double rmse_coord = 0.0;     // over all 3n coordinates
    double err_p95_vertex = 0.0; // 95th percentile of per-vertex Euclidean errors
    int cardinality = 0;
    double l1_norm = 0.0;
    double seconds = 0.0;
};

struct SequenceMetrics {
    std::vector<FrameMetrics> per_frame;
    Vector smoothness;  // per blendshape curve

    double mean_rmse() const;
    double mean_p95() const;
    double mean_cardinality() const;
    double mean_l1() const;
    double mean_seconds() const;
    double mean_smoothness() const;
};

double rmse(const Vector& predicted, const Vector& reference);

/// Nearest-rank (no interpolation) 95th percentile of per-vertex errors.
double err_p95(const Vector& predicted, const Vector& reference, Index num_vertices);

int cardinality(const WeightVector& w, double epsilon = 1e-4);

/// Sum of squared second-order differences; 0 for fewer than 3 samples.
double smoothness_factor(const Vector& curve);

/// weights: frames x m, delta-form predictions compared against delta targets.
SequenceMetrics sequence_metrics(const BlendshapeModel& model, const Matrix& weights,
                                 const Matrix& targets, const Vector& seconds_per_frame,
                                 double cardinality_epsilon = 1e-4);

struct TradeoffRow {
    std::string solver;
    double alpha = 0.0;
    double rmse_mean = 0.0;
    double p95_mean = 0.0;
    double cardinality_mean = 0.0;
    double l1_mean = 0.0;
    double smoothness_mean = 0.0;
    double seconds_mean = 0.0;
};

/// One row per (solver, alpha); rows for one solver ordered by ascending alpha.
std::vector<TradeoffRow> tradeoff_table(
    const std::vector<std::tuple<std::string, double, SequenceMetrics>>& results);

/// Elbow pick over one solver's alpha sweep: alpha minimizing the sum of
/// min-max normalized p95 error and cardinality; ties toward smaller alpha.
double pick_elbow_alpha(const std::vector<TradeoffRow>& rows_for_one_solver);

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);

}  // namespace rig
