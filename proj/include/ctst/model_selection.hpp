#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ctst/estimators.hpp"
#include "ctst/graph.hpp"
#include "ctst/samples.hpp"

namespace ctst {

struct HyperGrid {
    std::vector<double> sigmas;
    std::vector<double> gammas;
    std::vector<double> lambdas;

    void validate() const;
};

// Collaborative-fit grid: sigmas are {min, (min+med)/2, med, (med+max)/2, max}
// of the per-node median heuristics over X_v (duplicates collapsed); gammas
// {1e-5, 1e-3, 0.1, 1}; lambdas {1e-3, 1e-2, 0.1, 1, 10} scaled by 1/mean
// degree, or unscaled on an edgeless graph where that is undefined.
HyperGrid default_grid_grulsif(const Graph& g, const NodeSampleSet& samples);

// Same sigma/gamma grids with the coupling strength pinned to 1 (no graph
// term to trade off against).
HyperGrid default_grid_pool(const NodeSampleSet& samples);

struct CvResult {
    Hyperparams best;
    double best_score = 0.0;
    std::vector<std::pair<Hyperparams, double>> scores; // grid point -> mean held-out score
    int folds = 0;
};

// K-fold cross-validation over the grid. Folds are per-node independent
// shuffles of the X and X' index sets (keyed by seed) and are shared across
// grid points, so the comparison is paired. Fits run on the train folds; the
// score is the mean over nodes of
//   (1-alpha)/2 theta^T H theta + alpha/2 theta^T H' theta - h'^T theta
// evaluated with held-out-fold sufficient statistics, averaged over folds.
// Ties are broken toward smaller gamma, then lambda, then sigma. The anchor
// set is fixed by the caller (it is chosen once per test, before selection).
// Pass an edgeless graph to select for the pooled variant.
CvResult cv_select(const Graph& g, const NodeSampleSet& samples,
                   const Matrix& anchors, const HyperGrid& grid, double alpha,
                   int folds, std::uint64_t seed, double eigen_floor = 1e-9,
                   double tol = 1e-6, int max_iter = 1000, int threads = 0);

// Per-node leave-one-out selection for the single-task baseline over
// sigma in {0.6, 0.8, 1.0, 1.2, 1.4} x median heuristic of X'_v and
// gamma in {1e-5, 1e-3, 0.1, 10}. Pairs (x_i, x'_i), i < min(n, n'), are left
// out together; the basis (anchors from X'_v, keyed by seed) stays fixed
// across refits. Returns hyperparams with lambda unused (set to 1).
Hyperparams loocv_select_rulsif(const Matrix& X, const Matrix& Xp, double alpha,
                                std::uint64_t seed, int L_max = 100);

} // namespace ctst
