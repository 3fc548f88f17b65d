#pragma once

#include <filesystem>

#include "rig/model.hpp"

namespace rig {

/// Per-coordinate eigenvalue extremes and largest singular value of D^(i),
/// plus the constant quartic coefficient s = 2m * sum_i sigma^2(D^(i)).
struct SpectralCache {
    Vector lambda_min;  // 3n
    Vector lambda_max;  // 3n
    Vector sigma;       // 3n
    double s_coefficient = 0.0;
    std::uint64_t model_fingerprint = 0;

    Index dim() const { return lambda_min.size(); }
    Index num_blendshapes = 0;
    Index num_vertices = 0;
};

struct SpectralExtremes {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double sigma = 0.0;
};

/// Extremes of the full m x m matrix. Rows/columns outside the pair support
/// are zero; their eigenvalue 0 is included whenever the support is not all
/// of {0..m-1}.
SpectralExtremes extreme_eigenvalues(const CorrectiveMatrixView& view);

SpectralCache build_cache(const BlendshapeModel& model);

/// Bounding eigenvalue for the residual sign: lambda_min when g_i < 0,
/// lambda_max otherwise.
double lambda_selector(const SpectralCache& cache, Index coordinate, double g_i);

void save_cache(const SpectralCache& cache, const std::filesystem::path& path);
SpectralCache load_cache(const std::filesystem::path& path);

/// Throws when cache.model_fingerprint does not match the model.
void check_cache(const SpectralCache& cache, const BlendshapeModel& model);

}  // namespace rig
