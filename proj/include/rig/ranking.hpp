#pragma once

#include <string>
#include <vector>

#include "rig/model.hpp"

namespace rig {

/// wins[i][j] = number of times method i ranked better than method j.
struct PairwiseMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXi wins;  // zero diagonal, nonnegative
};

struct StrengthVector {
    std::vector<std::string> labels;
    Vector strengths;  // nonnegative, sums to 1
};

/// Zermelo fixed-point iteration for the Bradley-Terry model, synchronous
/// updates from the uniform start, renormalized to sum 1 each sweep.
StrengthVector bradley_terry(const PairwiseMatrix& matrix, int max_iters = 1000,
                             double tol = 1e-10);

}  // namespace rig
