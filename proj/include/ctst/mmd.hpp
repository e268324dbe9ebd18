#pragma once

#include <vector>

#include "ctst/kernel.hpp"

namespace ctst {

// Unbiased squared-MMD U-statistic with a Gaussian kernel:
//   mean_{i != j} k(x_i, x_j) + mean_{i != j} k(x'_i, x'_j)
//   - 2 mean_{i,j} k(x_i, x'_j).
// Symmetric in its two samples and may be negative.
double mmd_statistic(const Matrix& X, const Matrix& Xp, double sigma);

// Per-node bandwidth convention: median heuristic over the pooled X_v u X'_v.
// Pooling makes the bandwidth invariant under the permutation test's column
// reshuffles, so it is effectively frozen across replicates.
double mmd_median_sigma(const Matrix& X, const Matrix& Xp);

// Precomputed Gram matrix over the pooled rows (X rows first, then X' rows),
// so permutation replicates only re-slice indices.
struct MmdGram {
    Matrix K;
    double sigma = 0.0;
};

MmdGram mmd_gram(const Matrix& X, const Matrix& Xp, double sigma);

// U-statistic evaluated on the row split (x_idx | xp_idx) of the pooled set.
double mmd_from_gram(const MmdGram& gram, const std::vector<int>& x_idx,
                     const std::vector<int>& xp_idx);

} // namespace ctst
