#include "rig/model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace rig {

namespace {

// FNV-1a, 64 bit
struct Hasher {
    std::uint64_t h = 1469598103934665603ULL;
    void bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void vec(const Vector& v) { bytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size())); }
};

}  // namespace

BlendshapeModel::BlendshapeModel(Index num_vertices, Vector neutral, Matrix deltas,
                                 std::vector<CorrectivePair> pairs,
                                 std::vector<std::string> names)
    : n_(num_vertices),
      neutral_(std::move(neutral)),
      deltas_(std::move(deltas)),
      pairs_(std::move(pairs)),
      names_(std::move(names)) {
    if (n_ <= 0) throw std::invalid_argument("model: num_vertices must be positive");
    const Index dim = 3 * n_;
    const Index m = deltas_.cols();
    if (m <= 0) throw std::invalid_argument("model: num_blendshapes must be positive");
    if (neutral_.size() != dim) throw std::invalid_argument("model: neutral length != 3n");
    if (deltas_.rows() != dim) throw std::invalid_argument("model: deltas rows != 3n");
    if (!deltas_.allFinite()) throw std::invalid_argument("model: deltas contain non-finite entries");
    if (!neutral_.allFinite()) throw std::invalid_argument("model: neutral contains non-finite entries");
    if (names_.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("model: names size != num_blendshapes");

    std::set<std::pair<int, int>> seen;
    for (const auto& p : pairs_) {
        if (!(0 <= p.j && p.j < p.k && p.k < m))
            throw std::invalid_argument("model: corrective pair indices must satisfy 0 <= j < k < m");
        if (!seen.insert({p.j, p.k}).second)
            throw std::invalid_argument("model: duplicate corrective pair");
        if (p.shape.size() != dim)
            throw std::invalid_argument("model: corrective shape length != 3n");
        if (!p.shape.allFinite())
            throw std::invalid_argument("model: corrective shape contains non-finite entries");
    }
}

std::uint64_t BlendshapeModel::fingerprint() const {
    Hasher hash;
    hash.u64(static_cast<std::uint64_t>(n_));
    hash.u64(static_cast<std::uint64_t>(deltas_.cols()));
    hash.vec(neutral_);
    hash.bytes(deltas_.data(), sizeof(double) * static_cast<std::size_t>(deltas_.size()));
    for (const auto& p : pairs_) {
        hash.u64(static_cast<std::uint64_t>(p.j));
        hash.u64(static_cast<std::uint64_t>(p.k));
        hash.vec(p.shape);
    }
    for (const auto& name : names_) hash.bytes(name.data(), name.size());
    return hash.h;
}

WeightVector::WeightVector(Vector values) : values_(std::move(values)) {
    for (Index j = 0; j < values_.size(); ++j) {
        const double v = values_[j];
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("weights: entry " + std::to_string(j) +
                                        " outside [0,1]: " + std::to_string(v));
    }
}

Matrix CorrectiveMatrixView::to_dense() const {
    Matrix d = Matrix::Zero(m, m);
    for (const auto& e : entries) {
        d(e.j, e.k) = e.value;
        d(e.k, e.j) = e.value;
    }
    return d;
}

double CorrectiveMatrixView::quad_form(const Vector& w) const {
    double acc = 0.0;
    for (const auto& e : entries) acc += 2.0 * e.value * w[e.j] * w[e.k];
    return acc;
}

Vector eval_linear_delta(const BlendshapeModel& model, const Vector& w) {
    if (w.size() != model.num_blendshapes())
        throw std::invalid_argument("eval_linear: weight size != num_blendshapes");
    return model.deltas() * w;
}

Vector eval_quadratic_delta(const BlendshapeModel& model, const Vector& w) {
    Vector mesh = eval_linear_delta(model, w);
    for (const auto& p : model.corrective_pairs()) {
        const double c = w[p.j] * w[p.k];
        if (c != 0.0) mesh += c * p.shape;
    }
    return mesh;
}

Vector eval_linear(const BlendshapeModel& model, const WeightVector& w) {
    return model.neutral() + eval_linear_delta(model, w.values());
}

Vector eval_quadratic(const BlendshapeModel& model, const WeightVector& w) {
    return model.neutral() + eval_quadratic_delta(model, w.values());
}

CorrectiveMatrixView corrective_matrix(const BlendshapeModel& model, Index coordinate) {
    if (coordinate < 0 || coordinate >= model.dim())
        throw std::out_of_range("corrective_matrix: coordinate out of range");
    CorrectiveMatrixView view;
    view.coordinate = coordinate;
    view.m = model.num_blendshapes();
    for (const auto& p : model.corrective_pairs()) {
        const double v = 0.5 * p.shape[coordinate];
        if (v != 0.0) view.entries.push_back({p.j, p.k, v});
    }
    return view;
}

ResidualTerms residual_terms(const BlendshapeModel& model, const WeightVector& w,
                             const Vector& target) {
    if (target.size() != model.dim())
        throw std::invalid_argument("residual_terms: target length != 3n");
    const Vector& wv = w.values();
    ResidualTerms terms;
    terms.g = model.deltas() * wv - target;
    terms.h = model.deltas();
    // Stream over P: pair (j,k) contributes w_j w_k b^{j,k} to g,
    // w_k b^{j,k} to column j of h and w_j b^{j,k} to column k.
    for (const auto& p : model.corrective_pairs()) {
        const double wj = wv[p.j], wk = wv[p.k];
        if (wj * wk != 0.0) terms.g += (wj * wk) * p.shape;
        if (wk != 0.0) terms.h.col(p.j) += wk * p.shape;
        if (wj != 0.0) terms.h.col(p.k) += wj * p.shape;
    }
    return terms;
}

}  // namespace rig
