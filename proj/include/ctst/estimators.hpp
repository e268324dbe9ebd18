#pragma once

#include <cstdint>
#include <vector>

#include "ctst/graph.hpp"
#include "ctst/kernel.hpp"
#include "ctst/samples.hpp"

namespace ctst {

struct Hyperparams {
    double alpha = 0.1;  // relative-ratio parameter, in [0,1)
    double lambda = 1.0; // graph coupling strength, > 0
    double gamma = 1.0;  // ridge penalty, > 0
    double sigma = 1.0;  // kernel width, > 0

    void validate() const;
};

// Per-node empirical moments of the feature map: H[v] and Hp[v] are the mean
// outer products of psi over X_v and X'_v, hp[v] the mean of psi over X'_v.
struct SufficientStats {
    std::vector<Matrix> H;
    std::vector<Matrix> Hp;
    std::vector<Vector> hp;
    int n = 0;       // observations per node behind each H[v]
    int n_prime = 0; // observations per node behind each Hp[v] / hp[v]

    int num_nodes() const { return static_cast<int>(H.size()); }
    int dim() const { return H.empty() ? 0 : static_cast<int>(H[0].rows()); }
};

SufficientStats compute_sufficient_stats(const FeatureMap& fm,
                                         const NodeSampleSet& samples);

// psi rows for the pooled observation columns of every node (X_v rows first,
// then X'_v rows). Permutation replicates and CV folds only reshuffle row
// indices, so features are computed once per (feature map, data) pair and
// stats are re-assembled from row subsets.
struct FeatureCache {
    std::vector<Matrix> psi; // node v: (n + n') x L
    int n = 0;
    int n_prime = 0;

    int num_nodes() const { return static_cast<int>(psi.size()); }
    int dim() const { return psi.empty() ? 0 : static_cast<int>(psi[0].cols()); }
};

FeatureCache cache_features(const FeatureMap& fm, const NodeSampleSet& samples);

// Stats for an arbitrary split of the pooled rows: x_rows play the X role,
// xp_rows the X' role. With reverse=true the roles are exchanged (the
// reverse-direction estimate ratio p/q instead of q/p).
SufficientStats stats_from_rows(const FeatureCache& cache,
                                const std::vector<int>& x_rows,
                                const std::vector<int>& xp_rows,
                                bool reverse = false);

// Stacked per-node coefficient vectors (row v is theta_v) plus the
// hyperparameters and solver diagnostics that produced them.
struct ThetaMatrix {
    Matrix theta;
    Hyperparams hp;
    bool converged = false;
    int iterations = 0;
    double final_objective = 0.0;
};

// Value of the collaborative least-squares objective: per-node quadratic fit
// terms averaged over nodes, plus the lambda/4 double-counted smoothness
// penalty and the lambda*gamma/2 ridge.
double objective_value(const Graph& g, const SufficientStats& stats,
                       const Hyperparams& hp, const Matrix& theta);

// Exact minimizer over block v with every other block fixed:
//   A_v = (1/N)((1-alpha) H_v + alpha H'_v) + lambda (d_v + gamma) I
//   b_v = (1/N) h'_v + lambda sum_u W_uv theta_u
Vector block_update(int v, const Graph& g, const SufficientStats& stats,
                    const Hyperparams& hp, const Matrix& theta);

// Cyclic block coordinate descent from Theta = 0. The objective is strongly
// convex for gamma > 0, so the fixed point is unique. Stops when
// max_v ||theta_v_new - theta_v_old|| / (1 + ||theta_v_old||) < tol or at
// max_iter sweeps. A_v never changes during a fit, so its factorization is
// computed once per node. If objective_trace is non-null the objective value
// after every sweep is appended (used by the monotonicity checks).
ThetaMatrix grulsif_fit(const Graph& g, const SufficientStats& stats,
                        const Hyperparams& hp, double tol = 1e-6,
                        int max_iter = 1000,
                        std::vector<double>* objective_trace = nullptr);

// Graph coupling removed: every block decouples and one exact solve per node
// suffices. Agrees entrywise with grulsif_fit on an edgeless graph.
ThetaMatrix pool_fit(const SufficientStats& stats, const Hyperparams& hp,
                     double tol = 1e-6, int max_iter = 1000);

// Single-task baseline: per-node anchors are min(L_max, n') points of X'_v,
// theta_v = ((1-alpha) H_v + alpha H'_v + gamma I)^{-1} h'_v. ULSIF is the
// alpha = 0 case. The feature map used is returned through fm_out when given
// (the caller needs it to evaluate statistics on permuted data).
Vector rulsif_fit_node(const Matrix& X, const Matrix& Xp, double alpha,
                       double sigma, double gamma, int L_max,
                       std::uint64_t seed, FeatureMap* fm_out = nullptr);

// Plug-in Pearson-divergence statistic
//   h'^T theta - (1-alpha)/2 theta^T H theta - alpha/2 theta^T H' theta - 1/2.
// May be negative for finite samples; never clamped, because the permutation
// test compares raw values.
double pe_divergence_stat(const Vector& theta_v, const Matrix& H,
                          const Matrix& Hp, const Vector& hp, double alpha);

} // namespace ctst
