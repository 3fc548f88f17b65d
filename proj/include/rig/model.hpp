#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rig {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// One quadratic corrective term: activated with weight w_j * w_k.
struct CorrectivePair {
    int j = 0;  // j < k always
    int k = 0;
    Vector shape;  // length 3n, delta form
};

/// Delta-form blendshape model: neutral mesh, per-blendshape offset columns,
/// and a set of pairwise corrective shapes. Immutable after construction.
class BlendshapeModel {
public:
    BlendshapeModel(Index num_vertices, Vector neutral, Matrix deltas,
                    std::vector<CorrectivePair> pairs,
                    std::vector<std::string> names);

    Index num_vertices() const { return n_; }
    Index num_blendshapes() const { return deltas_.cols(); }
    Index dim() const { return 3 * n_; }  // coordinate dimension 3n

    const Vector& neutral() const { return neutral_; }
    const Matrix& deltas() const { return deltas_; }
    const std::vector<CorrectivePair>& corrective_pairs() const { return pairs_; }
    const std::vector<std::string>& names() const { return names_; }

    /// Content hash over all arrays, pairs and names; pins caches to a model.
    std::uint64_t fingerprint() const;

private:
    Index n_;
    Vector neutral_;
    Matrix deltas_;
    std::vector<CorrectivePair> pairs_;
    std::vector<std::string> names_;
};

/// Activation weights, each entry in [0,1]. Out-of-range input is an error,
/// never clipped silently.
class WeightVector {
public:
    explicit WeightVector(Vector values);
    static WeightVector zeros(Index m) { return WeightVector(Vector::Zero(m)); }

    const Vector& values() const { return values_; }
    Index size() const { return values_.size(); }
    double operator[](Index j) const { return values_[j]; }

private:
    Vector values_;
};

/// Sparse symmetric view of D^(i) for one mesh coordinate:
/// D_{jk} = D_{kj} = b^{j,k}_i / 2, zero diagonal.
struct CorrectiveMatrixView {
    Index coordinate = 0;
    Index m = 0;
    struct Entry {
        int j, k;
        double value;  // the (j,k) and (k,j) entry
    };
    std::vector<Entry> entries;

    Matrix to_dense() const;
    /// w^T D w
    double quad_form(const Vector& w) const;
};

/// Per-coordinate residual g_i = [f_Q(w)]_i - target_i (delta form) and its
/// linearization h_i = B_i + 2 D^(i) w, stacked over all 3n coordinates.
struct ResidualTerms {
    Vector g;  // 3n
    Matrix h;  // 3n x m
};

/// f_L(w) = neutral + B w (absolute mesh).
Vector eval_linear(const BlendshapeModel& model, const WeightVector& w);

/// f_Q(w) = neutral + B w + sum_{(j,k)} w_j w_k b^{j,k} (absolute mesh).
Vector eval_quadratic(const BlendshapeModel& model, const WeightVector& w);

/// Delta-form rig evaluations (offset from neutral).
Vector eval_linear_delta(const BlendshapeModel& model, const Vector& w);
Vector eval_quadratic_delta(const BlendshapeModel& model, const Vector& w);

CorrectiveMatrixView corrective_matrix(const BlendshapeModel& model, Index coordinate);

/// target must be in delta form.
ResidualTerms residual_terms(const BlendshapeModel& model, const WeightVector& w,
                             const Vector& target);

}  // namespace rig
