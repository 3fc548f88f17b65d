#include "rig/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rig {

namespace {

double mean_of(const std::vector<FrameMetrics>& frames, double (*get)(const FrameMetrics&)) {
    if (frames.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& f : frames) acc += get(f);
    return acc / static_cast<double>(frames.size());
}

}  // namespace

double SequenceMetrics::mean_rmse() const {
    return mean_of(per_frame, [](const FrameMetrics& f) { return f.rmse_coord; });
}
double SequenceMetrics::mean_p95() const {
    return mean_of(per_frame, [](const FrameMetrics& f) { return f.err_p95_vertex; });
}
double SequenceMetrics::mean_cardinality() const {
    return mean_of(per_frame, [](const FrameMetrics& f) { return double(f.cardinality); });
}
double SequenceMetrics::mean_l1() const {
    return mean_of(per_frame, [](const FrameMetrics& f) { return f.l1_norm; });
}
double SequenceMetrics::mean_seconds() const {
    return mean_of(per_frame, [](const FrameMetrics& f) { return f.seconds; });
}
double SequenceMetrics::mean_smoothness() const {
    return smoothness.size() == 0 ? 0.0 : smoothness.mean();
}

double rmse(const Vector& predicted, const Vector& reference) {
    if (predicted.size() != reference.size())
        throw std::invalid_argument("rmse: length mismatch");
    if (predicted.size() == 0) return 0.0;
    return std::sqrt((predicted - reference).squaredNorm() /
                     static_cast<double>(predicted.size()));
}

double err_p95(const Vector& predicted, const Vector& reference, Index num_vertices) {
    if (predicted.size() != reference.size() || predicted.size() != 3 * num_vertices)
        throw std::invalid_argument("err_p95: length must be 3*num_vertices");
    std::vector<double> errors(static_cast<std::size_t>(num_vertices));
    for (Index v = 0; v < num_vertices; ++v)
        errors[static_cast<std::size_t>(v)] =
            (predicted.segment(3 * v, 3) - reference.segment(3 * v, 3)).norm();
    // Nearest-rank percentile: element at rank ceil(0.95 n), 1-indexed.
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(num_vertices)));
    std::nth_element(errors.begin(), errors.begin() + (rank - 1), errors.end());
    return errors[rank - 1];
}

int cardinality(const WeightVector& w, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("cardinality: epsilon must be >= 0");
    int count = 0;
    for (Index j = 0; j < w.size(); ++j)
        if (w[j] > epsilon) ++count;
    return count;
}

double smoothness_factor(const Vector& curve) {
    const Index T = curve.size();
    if (T < 3) return 0.0;
    double acc = 0.0;
    for (Index t = 1; t + 1 < T; ++t) {
        const double d = curve[t - 1] - 2.0 * curve[t] + curve[t + 1];
        acc += d * d;
    }
    return acc;
}

SequenceMetrics sequence_metrics(const BlendshapeModel& model, const Matrix& weights,
                                 const Matrix& targets, const Vector& seconds_per_frame,
                                 double cardinality_epsilon) {
    const Index frames = weights.rows();
    if (targets.rows() != frames || seconds_per_frame.size() != frames)
        throw std::invalid_argument("sequence_metrics: inconsistent frame counts");
    if (weights.cols() != model.num_blendshapes() || targets.cols() != model.dim())
        throw std::invalid_argument("sequence_metrics: dimension mismatch");

    SequenceMetrics out;
    out.per_frame.reserve(static_cast<std::size_t>(frames));
    for (Index f = 0; f < frames; ++f) {
        const WeightVector w{Vector(weights.row(f))};
        const Vector predicted = eval_quadratic_delta(model, w.values());
        const Vector reference = targets.row(f);
        FrameMetrics fm;
        fm.rmse_coord = rmse(predicted, reference);
        fm.err_p95_vertex = err_p95(predicted, reference, model.num_vertices());
        fm.cardinality = cardinality(w, cardinality_epsilon);
        fm.l1_norm = w.values().sum();
        fm.seconds = seconds_per_frame[f];
        out.per_frame.push_back(fm);
    }
    out.smoothness = Vector::Zero(model.num_blendshapes());
    for (Index j = 0; j < model.num_blendshapes(); ++j)
        out.smoothness[j] = smoothness_factor(weights.col(j));
    return out;
}

std::vector<TradeoffRow> tradeoff_table(
    const std::vector<std::tuple<std::string, double, SequenceMetrics>>& results) {
    std::size_t frame_count = 0;
    bool first = true;
    std::vector<TradeoffRow> rows;
    for (const auto& [solver, alpha, metrics] : results) {
        if (first) {
            frame_count = metrics.per_frame.size();
            first = false;
        } else if (metrics.per_frame.size() != frame_count) {
            throw std::invalid_argument("tradeoff_table: inconsistent frame sets");
        }
        TradeoffRow row;
        row.solver = solver;
        row.alpha = alpha;
        row.rmse_mean = metrics.mean_rmse();
        row.p95_mean = metrics.mean_p95();
        row.cardinality_mean = metrics.mean_cardinality();
        row.l1_mean = metrics.mean_l1();
        row.smoothness_mean = metrics.mean_smoothness();
        row.seconds_mean = metrics.mean_seconds();
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TradeoffRow& a, const TradeoffRow& b) {
        if (a.solver != b.solver) return a.solver < b.solver;
        return a.alpha < b.alpha;
    });
    return rows;
}

double pick_elbow_alpha(const std::vector<TradeoffRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("pick_elbow_alpha: empty sweep");
    double err_lo = rows[0].p95_mean, err_hi = rows[0].p95_mean;
    double card_lo = rows[0].cardinality_mean, card_hi = rows[0].cardinality_mean;
    for (const auto& r : rows) {
        err_lo = std::min(err_lo, r.p95_mean);
        err_hi = std::max(err_hi, r.p95_mean);
        card_lo = std::min(card_lo, r.cardinality_mean);
        card_hi = std::max(card_hi, r.cardinality_mean);
    }
    const double err_span = std::max(err_hi - err_lo, 1e-300);
    const double card_span = std::max(card_hi - card_lo, 1e-300);
    double best_alpha = rows[0].alpha;
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        const double score =
            (r.p95_mean - err_lo) / err_span + (r.cardinality_mean - card_lo) / card_span;
        if (score < best_score || (score == best_score && r.alpha < best_alpha)) {
            best_score = score;
            best_alpha = r.alpha;
        }
    }
    return best_alpha;
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "solver,alpha,rmse_mean,p95_mean,cardinality_mean,l1_mean,smoothness_mean,"
           "seconds_mean\n";
    for (const auto& r : rows)
        out << r.solver << ',' << r.alpha << ',' << r.rmse_mean << ',' << r.p95_mean << ','
            << r.cardinality_mean << ',' << r.l1_mean << ',' << r.smoothness_mean << ','
            << r.seconds_mean << '\n';
    return out.str();
}

}  // namespace rig
