#include "rig/ranking.hpp"

#include <cmath>
#include <stdexcept>

namespace rig {

namespace {

void validate(const PairwiseMatrix& matrix) {
    const Index N = matrix.wins.rows();
    if (N == 0 || matrix.wins.cols() != N)
        throw std::invalid_argument("bradley_terry: wins matrix must be square and nonempty");
    if (matrix.labels.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("bradley_terry: labels size mismatch");
    for (Index i = 0; i < N; ++i) {
        if (matrix.wins(i, i) != 0)
            throw std::invalid_argument("bradley_terry: diagonal must be zero (" +
                                        matrix.labels[i] + ")");
        for (Index j = 0; j < N; ++j)
            if (matrix.wins(i, j) < 0)
                throw std::invalid_argument("bradley_terry: negative win count");
    }

    // Every method needs at least one comparison and the comparison graph
    // (edges where S_ij + S_ji > 0) must be connected.
    std::vector<bool> reached(static_cast<std::size_t>(N), false);
    std::vector<Index> stack = {0};
    reached[0] = true;
    while (!stack.empty()) {
        const Index i = stack.back();
        stack.pop_back();
        for (Index j = 0; j < N; ++j)
            if (!reached[static_cast<std::size_t>(j)] &&
                matrix.wins(i, j) + matrix.wins(j, i) > 0) {
                reached[static_cast<std::size_t>(j)] = true;
                stack.push_back(j);
            }
    }
    std::string missing;
    for (Index i = 0; i < N; ++i)
        if (!reached[static_cast<std::size_t>(i)]) missing += " " + matrix.labels[i];
    if (!missing.empty())
        throw std::invalid_argument(
            "bradley_terry: degenerate comparison graph, disconnected methods:" + missing);
}

}  // namespace

StrengthVector bradley_terry(const PairwiseMatrix& matrix, int max_iters, double tol) {
    validate(matrix);
    const Index N = matrix.wins.rows();
    Vector s = Vector::Constant(N, 1.0 / static_cast<double>(N));

    for (int it = 0; it < max_iters; ++it) {
        Vector next(N);
        for (Index i = 0; i < N; ++i) {
            double wins = 0.0, denom = 0.0;
            for (Index j = 0; j < N; ++j) {
                if (j == i) continue;
                wins += matrix.wins(i, j);
                const double games = matrix.wins(i, j) + matrix.wins(j, i);
                if (games > 0.0) denom += games / (s[i] + s[j]);
            }
            if (denom == 0.0)
                throw std::invalid_argument("bradley_terry: method with no comparisons: " +
                                            matrix.labels[i]);
            next[i] = wins / denom;
        }
        next /= next.sum();
        const double change = (next - s).lpNorm<Eigen::Infinity>();
        s = next;
        if (change < tol) break;
    }
    return {matrix.labels, s};
}

}  // namespace rig
