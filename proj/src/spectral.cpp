#include "rig/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace rig {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'G', 'S', 'P', 'E', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;

SpectralExtremes extremes_from_entries(const std::vector<CorrectiveMatrixView::Entry>& entries,
                                       Index m) {
    SpectralExtremes out;
    if (entries.empty()) return out;

    // Map support indices to a dense sub-block.
    std::vector<int> local(static_cast<std::size_t>(m), -1);
    std::vector<int> support;
    auto local_of = [&](int idx) {
        if (local[idx] < 0) {
            local[idx] = static_cast<int>(support.size());
            support.push_back(idx);
        }
        return local[idx];
    };
    for (const auto& e : entries) {
        local_of(e.j);
        local_of(e.k);
    }
    const int p = static_cast<int>(support.size());
    Matrix block = Matrix::Zero(p, p);
    for (const auto& e : entries) {
        if (!std::isfinite(e.value))
            throw std::invalid_argument("extreme_eigenvalues: non-finite entry");
        block(local[e.j], local[e.k]) = e.value;
        block(local[e.k], local[e.j]) = e.value;
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(block, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("extreme_eigenvalues: eigensolver failed");
    out.lambda_min = solver.eigenvalues().minCoeff();
    out.lambda_max = solver.eigenvalues().maxCoeff();
    if (p < m) {
        // Inactive rows/columns contribute eigenvalue 0.
        out.lambda_min = std::min(out.lambda_min, 0.0);
        out.lambda_max = std::max(out.lambda_max, 0.0);
    }
    out.sigma = std::max(std::abs(out.lambda_min), std::abs(out.lambda_max));
    return out;
}

}  // namespace

SpectralExtremes extreme_eigenvalues(const CorrectiveMatrixView& view) {
    return extremes_from_entries(view.entries, view.m);
}

SpectralCache build_cache(const BlendshapeModel& model) {
    const Index dim = model.dim();
    const Index m = model.num_blendshapes();
    SpectralCache cache;
    cache.lambda_min = Vector::Zero(dim);
    cache.lambda_max = Vector::Zero(dim);
    cache.sigma = Vector::Zero(dim);
    cache.num_blendshapes = m;
    cache.num_vertices = model.num_vertices();
    cache.model_fingerprint = model.fingerprint();

    const auto& pairs = model.corrective_pairs();

    auto worker = [&](Index begin, Index end, std::exception_ptr& error) {
        try {
            std::vector<CorrectiveMatrixView::Entry> entries;
            for (Index i = begin; i < end; ++i) {
                entries.clear();
                for (const auto& p : pairs) {
                    const double v = 0.5 * p.shape[i];
                    if (v != 0.0) entries.push_back({p.j, p.k, v});
                }
                try {
                    const SpectralExtremes ext = extremes_from_entries(entries, m);
                    cache.lambda_min[i] = ext.lambda_min;
                    cache.lambda_max[i] = ext.lambda_max;
                    cache.sigma[i] = ext.sigma;
                } catch (const std::exception& e) {
                    throw std::runtime_error("build_cache: coordinate " + std::to_string(i) +
                                             ": " + e.what());
                }
            }
        } catch (...) {
            error = std::current_exception();
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const Index chunks = std::min<Index>(dim, static_cast<Index>(hw));
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
    for (Index c = 0; c < chunks; ++c) {
        const Index begin = dim * c / chunks;
        const Index end = dim * (c + 1) / chunks;
        threads.emplace_back(worker, begin, end, std::ref(errors[static_cast<std::size_t>(c)]));
    }
    for (auto& t : threads) t.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);

    cache.s_coefficient = 2.0 * static_cast<double>(m) * cache.sigma.squaredNorm();
    return cache;
}

double lambda_selector(const SpectralCache& cache, Index coordinate, double g_i) {
    if (coordinate < 0 || coordinate >= cache.dim())
        throw std::out_of_range("lambda_selector: coordinate out of range");
    return g_i < 0.0 ? cache.lambda_min[coordinate] : cache.lambda_max[coordinate];
}

void save_cache(const SpectralCache& cache, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_cache: cannot open " + path.string());
    out.write(kMagic, sizeof kMagic);
    const std::uint32_t version = kVersion;
    const std::uint32_t n = static_cast<std::uint32_t>(cache.num_vertices);
    const std::uint32_t m = static_cast<std::uint32_t>(cache.num_blendshapes);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&m), sizeof m);
    out.write(reinterpret_cast<const char*>(&cache.model_fingerprint),
              sizeof cache.model_fingerprint);
    for (Index i = 0; i < cache.dim(); ++i) {
        const double rec[3] = {cache.lambda_min[i], cache.lambda_max[i], cache.sigma[i]};
        out.write(reinterpret_cast<const char*>(rec), sizeof rec);
    }
    out.write(reinterpret_cast<const char*>(&cache.s_coefficient), sizeof(double));
    if (!out) throw std::runtime_error("save_cache: write failed for " + path.string());
}

SpectralCache load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_cache: cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("load_cache: bad magic in " + path.string());
    std::uint32_t version = 0, n = 0, m = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&m), sizeof m);
    if (version != kVersion)
        throw std::runtime_error("load_cache: unsupported version in " + path.string());
    SpectralCache cache;
    cache.num_vertices = n;
    cache.num_blendshapes = m;
    in.read(reinterpret_cast<char*>(&cache.model_fingerprint), sizeof cache.model_fingerprint);
    const Index dim = 3 * static_cast<Index>(n);
    cache.lambda_min = Vector::Zero(dim);
    cache.lambda_max = Vector::Zero(dim);
    cache.sigma = Vector::Zero(dim);
    for (Index i = 0; i < dim; ++i) {
        double rec[3];
        in.read(reinterpret_cast<char*>(rec), sizeof rec);
        cache.lambda_min[i] = rec[0];
        cache.lambda_max[i] = rec[1];
        cache.sigma[i] = rec[2];
    }
    in.read(reinterpret_cast<char*>(&cache.s_coefficient), sizeof(double));
    if (!in) throw std::runtime_error("load_cache: truncated file " + path.string());
    return cache;
}

void check_cache(const SpectralCache& cache, const BlendshapeModel& model) {
    if (cache.model_fingerprint != model.fingerprint())
        throw std::runtime_error("spectral cache fingerprint does not match model");
    if (cache.dim() != model.dim())
        throw std::runtime_error("spectral cache dimension does not match model");
}

}  // namespace rig
