#include "rig/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rig {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kFrameMagic[8] = {'R', 'I', 'G', 'F', 'R', 'A', 'M', 'E'};
constexpr std::uint32_t kFrameVersion = 1;

void write_f64(const double* data, std::size_t count, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_f64(const fs::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("missing sidecar: " + path.string());
    const auto size = static_cast<std::size_t>(in.tellg());
    if (size != expected * sizeof(double))
        throw std::runtime_error("sidecar " + path.string() + ": expected " +
                                 std::to_string(expected * sizeof(double)) + " bytes, found " +
                                 std::to_string(size));
    in.seekg(0);
    std::vector<double> data(expected);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(size));
    if (!in) throw std::runtime_error("read failed: " + path.string());
    return data;
}

std::string pair_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pair_%04zu.f64", index);
    return buf;
}

}  // namespace

void save_model(const BlendshapeModel& model, const fs::path& json_path) {
    const fs::path dir = json_path.parent_path();
    if (!dir.empty()) fs::create_directories(dir);

    json doc;
    doc["version"] = 1;
    doc["n"] = model.num_vertices();
    doc["m"] = model.num_blendshapes();
    doc["names"] = model.names();
    doc["units"] = "cm";
    doc["neutral_ref"] = "neutral.f64";
    doc["deltas_ref"] = "deltas.f64";  // column-major, 3n*m values
    write_f64(model.neutral().data(), static_cast<std::size_t>(model.dim()),
              dir / "neutral.f64");
    write_f64(model.deltas().data(), static_cast<std::size_t>(model.deltas().size()),
              dir / "deltas.f64");

    json pairs = json::array();
    for (std::size_t p = 0; p < model.corrective_pairs().size(); ++p) {
        const auto& cp = model.corrective_pairs()[p];
        const std::string ref = pair_file_name(p);
        write_f64(cp.shape.data(), static_cast<std::size_t>(cp.shape.size()), dir / ref);
        pairs.push_back({{"j", cp.j}, {"k", cp.k}, {"vector_ref", ref}});
    }
    doc["pairs"] = std::move(pairs);

    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + json_path.string());
    out << doc.dump(2) << '\n';
}

BlendshapeModel load_model(const fs::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot open model file: " + json_path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("model json parse error in " + json_path.string() + ": " +
                                 e.what());
    }
    if (doc.at("version").get<int>() != 1)
        throw std::runtime_error("model file " + json_path.string() + ": unsupported version");
    const auto n = doc.at("n").get<Index>();
    const auto m = doc.at("m").get<Index>();
    const fs::path dir = json_path.parent_path();

    const auto neutral_raw =
        read_f64(dir / doc.at("neutral_ref").get<std::string>(), static_cast<std::size_t>(3 * n));
    const auto deltas_raw = read_f64(dir / doc.at("deltas_ref").get<std::string>(),
                                     static_cast<std::size_t>(3 * n * m));
    Vector neutral = Eigen::Map<const Vector>(neutral_raw.data(), 3 * n);
    Matrix deltas = Eigen::Map<const Matrix>(deltas_raw.data(), 3 * n, m);

    std::vector<CorrectivePair> pairs;
    for (const auto& entry : doc.at("pairs")) {
        CorrectivePair cp;
        cp.j = entry.at("j").get<int>();
        cp.k = entry.at("k").get<int>();
        if (cp.j > cp.k) std::swap(cp.j, cp.k);  // canonicalize to j < k
        const auto raw = read_f64(dir / entry.at("vector_ref").get<std::string>(),
                                  static_cast<std::size_t>(3 * n));
        cp.shape = Eigen::Map<const Vector>(raw.data(), 3 * n);
        pairs.push_back(std::move(cp));
    }
    return BlendshapeModel(n, std::move(neutral), std::move(deltas), std::move(pairs),
                           doc.at("names").get<std::vector<std::string>>());
}

void save_frames(const Matrix& frames, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(kFrameMagic, sizeof kFrameMagic);
    const std::uint32_t version = kFrameVersion;
    const std::uint32_t rows = static_cast<std::uint32_t>(frames.rows());
    const std::uint32_t dim = static_cast<std::uint32_t>(frames.cols());
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    for (Index f = 0; f < frames.rows(); ++f) {
        const Vector row = frames.row(f);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(sizeof(double) * row.size()));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Matrix load_frames(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open frame file: " + path.string());
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    char magic[8];
    std::uint32_t version = 0, rows = 0, dim = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!in || std::string(magic, 8) != std::string(kFrameMagic, 8))
        throw std::runtime_error("bad frame file magic: " + path.string());
    if (version != kFrameVersion)
        throw std::runtime_error("unsupported frame file version: " + path.string());
    const std::size_t expected = 20 + sizeof(double) * std::size_t(rows) * dim;
    if (size != expected)
        throw std::runtime_error("frame file " + path.string() + ": size " +
                                 std::to_string(size) + " does not match header (expected " +
                                 std::to_string(expected) + ")");
    Matrix frames(rows, dim);
    std::vector<double> row(dim);
    for (std::uint32_t f = 0; f < rows; ++f) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * dim));
        frames.row(f) = Eigen::Map<const Vector>(row.data(), dim);
    }
    if (!in) throw std::runtime_error("truncated frame file: " + path.string());
    return frames;
}

Matrix import_absolute_meshes(const Matrix& absolute, const BlendshapeModel& model) {
    if (absolute.cols() != model.dim())
        throw std::invalid_argument("import_absolute_meshes: dim != 3n");
    return absolute.rowwise() - model.neutral().transpose();
}

SyntheticProblem generate_synthetic(const SynthConfig& config) {
    if (config.m <= 0 || config.n <= 0 || config.frames <= 0)
        throw std::invalid_argument("generate_synthetic: m, n, frames must be positive");
    if (config.pair_count < 0 || config.pair_count > config.m * (config.m - 1) / 2)
        throw std::invalid_argument("generate_synthetic: pair_count out of range");
    if (!(config.noise_std >= 0.0) || !(config.corrective_scale >= 0.0) ||
        !(config.activation_sparsity > 0.0 && config.activation_sparsity <= 1.0))
        throw std::invalid_argument("generate_synthetic: invalid config");

    const Index m = config.m, n = config.n;
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Vector neutral(3 * n);
    for (Index i = 0; i < 3 * n; ++i) neutral[i] = 5.0 * gauss(rng);

    // Contiguous overlapping vertex blocks, one per blendshape; block length
    // is widened until enough overlapping pairs exist for pair_count.
    const double per_pair = config.m > 0 ? double(config.pair_count) / double(m) : 0.0;
    Index block = std::max<Index>(
        6, static_cast<Index>(std::ceil(double(n) / double(m) * (per_pair + 1.5))));
    block = std::min(block, n);
    std::vector<Index> start(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j)
        start[static_cast<std::size_t>(j)] =
            m == 1 ? 0 : (n - block) * j / (m - 1);

    Matrix deltas = Matrix::Zero(3 * n, m);
    std::vector<std::string> names;
    for (Index j = 0; j < m; ++j) {
        const double amp = 0.5 + unit(rng);
        for (Index v = start[std::size_t(j)]; v < start[std::size_t(j)] + block; ++v)
            for (int c = 0; c < 3; ++c) deltas(3 * v + c, j) = amp * gauss(rng);
        names.push_back("shape_" + std::to_string(j));
    }

    // All overlapping-block pairs, shuffled, first pair_count taken.
    std::vector<std::pair<int, int>> candidates;
    for (Index j = 0; j < m; ++j)
        for (Index k = j + 1; k < m; ++k) {
            const Index lo = std::max(start[std::size_t(j)], start[std::size_t(k)]);
            const Index hi = std::min(start[std::size_t(j)], start[std::size_t(k)]) + block;
            if (hi - lo >= 3) candidates.push_back({int(j), int(k)});
        }
    if (static_cast<Index>(candidates.size()) < config.pair_count)
        throw std::runtime_error("generate_synthetic: not enough overlapping blocks for " +
                                 std::to_string(config.pair_count) + " pairs");
    std::shuffle(candidates.begin(), candidates.end(), rng);

    std::vector<CorrectivePair> pairs;
    for (Index p = 0; p < config.pair_count; ++p) {
        const auto [j, k] = candidates[static_cast<std::size_t>(p)];
        CorrectivePair cp;
        cp.j = j;
        cp.k = k;
        cp.shape = Vector::Zero(3 * n);
        const Index lo = std::max(start[std::size_t(j)], start[std::size_t(k)]);
        const Index hi = std::min(start[std::size_t(j)], start[std::size_t(k)]) + block;
        for (Index v = lo; v < hi; ++v)
            for (int c = 0; c < 3; ++c)
                cp.shape[3 * v + c] = config.corrective_scale * gauss(rng);
        pairs.push_back(std::move(cp));
    }
    std::sort(pairs.begin(), pairs.end(), [](const CorrectivePair& a, const CorrectivePair& b) {
        return std::tie(a.j, a.k) < std::tie(b.j, b.k);
    });

    BlendshapeModel model(n, std::move(neutral), std::move(deltas), std::move(pairs),
                          std::move(names));

    // Piecewise-smooth sparse ground-truth curves: inactive weights stay 0,
    // active ones follow a raised two-harmonic sinusoid in [0,1]. Corrective
    // shapes only contribute when both pair members are nonzero, so members of
    // a pair are co-activated often enough to exercise the quadratic terms.
    const Index T = config.frames;
    std::vector<bool> active(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j)
        active[static_cast<std::size_t>(j)] = unit(rng) <= config.activation_sparsity;
    for (const auto& cp : model.corrective_pairs()) {
        const bool aj = active[std::size_t(cp.j)], ak = active[std::size_t(cp.k)];
        if (aj != ak && unit(rng) < 0.5) {
            active[std::size_t(cp.j)] = true;
            active[std::size_t(cp.k)] = true;
        }
    }
    Matrix truth = Matrix::Zero(T, m);
    for (Index j = 0; j < m; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        const double amp = 0.3 + 0.7 * unit(rng);
        const double f1 = 0.5 + 1.5 * unit(rng);
        const double f2 = 1.0 + 2.0 * unit(rng);
        const double ph1 = 2.0 * M_PI * unit(rng);
        const double ph2 = 2.0 * M_PI * unit(rng);
        for (Index t = 0; t < T; ++t) {
            const double x = T > 1 ? double(t) / double(T - 1) : 0.0;
            const double base = 0.5 + 0.35 * std::sin(2.0 * M_PI * f1 * x + ph1) +
                                0.15 * std::sin(2.0 * M_PI * f2 * x + ph2);
            truth(t, j) = std::clamp(amp * base, 0.0, 1.0);
        }
    }

    Matrix targets(T, 3 * n);
    for (Index t = 0; t < T; ++t) {
        Vector mesh = eval_quadratic_delta(model, truth.row(t));
        if (config.noise_std > 0.0)
            for (Index i = 0; i < mesh.size(); ++i) mesh[i] += config.noise_std * gauss(rng);
        targets.row(t) = mesh;
    }

    return {std::move(model), std::move(truth), std::move(targets)};
}

std::string weights_csv(const Matrix& weights, const std::vector<std::string>& names,
                        const Vector& seconds_per_frame) {
    if (names.size() != static_cast<std::size_t>(weights.cols()))
        throw std::invalid_argument("weights_csv: names size mismatch");
    if (seconds_per_frame.size() != weights.rows())
        throw std::invalid_argument("weights_csv: seconds size mismatch");
    std::ostringstream out;
    out.precision(17);
    out << "frame";
    for (const auto& name : names) out << ',' << name;
    out << ",seconds\n";
    for (Index f = 0; f < weights.rows(); ++f) {
        out << f;
        for (Index j = 0; j < weights.cols(); ++j) out << ',' << weights(f, j);
        out << ',' << seconds_per_frame[f] << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& content, const fs::path& path) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
}

}  // namespace rig
