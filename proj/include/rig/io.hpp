#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rig/model.hpp"

namespace rig {

/// model.json plus sidecar little-endian float64 binaries in its directory.
void save_model(const BlendshapeModel& model, const std::filesystem::path& json_path);
BlendshapeModel load_model(const std::filesystem::path& json_path);

/// "RIGFRAME" binary: header {magic, version u32, frames u32, dim u32},
/// then frames x dim float64 row-major.
void save_frames(const Matrix& frames, const std::filesystem::path& path);
Matrix load_frames(const std::filesystem::path& path);

/// Subtracts the neutral mesh from every row.
Matrix import_absolute_meshes(const Matrix& absolute, const BlendshapeModel& model);

struct SynthConfig {
    Index m = 40;
    Index n = 500;
    Index pair_count = 60;
    Index frames = 20;
    std::uint64_t seed = 42;
    double noise_std = 0.0;             // cm
    double activation_sparsity = 0.35;  // expected fraction of active weights per frame
    double corrective_scale = 0.3;      // |b^{j,k}| relative to base deltas
};

struct SyntheticProblem {
    BlendshapeModel model;
    Matrix ground_truth;  // frames x m, in [0,1]
    Matrix targets;       // frames x 3n, delta form
};

/// Deterministic from seed. Blendshapes displace contiguous overlapping
/// vertex blocks; corrective shapes live on pair-block intersections;
/// ground-truth weights are piecewise-smooth sparse curves.
SyntheticProblem generate_synthetic(const SynthConfig& config);

/// Weight CSV: header frame,<names...>,seconds ; one row per frame.
std::string weights_csv(const Matrix& weights, const std::vector<std::string>& names,
                        const Vector& seconds_per_frame);
void write_text_file(const std::string& content, const std::filesystem::path& path);

}  // namespace rig
