#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctst/config.hpp"
#include "ctst/estimators.hpp"
#include "ctst/graph.hpp"
#include "ctst/samples.hpp"

namespace ctst {

// Outcome of a max-statistic permutation test. For symmetric statistics
// (MMD) the reverse fields duplicate the forward ones.
struct TestResult {
    std::vector<double> S;      // per-node forward statistic
    std::vector<double> S_rev;  // per-node reverse statistic
    std::vector<double> pi;     // pi-hat, forward
    std::vector<double> pi_rev; // pi-hat, reverse
    std::vector<double> perm_max_forward; // n_perm max statistics
    std::vector<double> perm_max_reverse;
    std::vector<int> rejected; // sorted node ids
    double pi_star = 0.05;
    int n_perm = 0;
    std::uint64_t seed = 0;
    std::string method;
    bool symmetric = false;
    // Selected hyperparameters per direction (meaningful for the
    // likelihood-ratio methods; MMD reports only per-node bandwidths).
    Hyperparams hp_forward, hp_reverse;
    bool has_hyperparams = false;
    // Final objective of the observed collaborative fit per direction, for
    // audit logs; 0 for methods without a joint objective.
    double objective_forward = 0.0;
    double objective_reverse = 0.0;
};

// How pi-values turn into rejections. The collaborative test uses <= pi*/2
// in both directions; the directional baselines use strict < pi*/2; a
// symmetric statistic has one pi-value per node, thresholded strictly at pi*.
enum class RejectRule { CollabBothDirections, DirectionalStrict, SymmetricStrict };

// Computes per-node statistics for an arbitrary split of the pooled
// observation columns: x_rows take the X role, xp_rows the X' role, both as
// indices into {0,...,n+n'-1}. Fills S (forward) and, unless the statistic is
// symmetric, S_rev (reverse). Must be safe to call concurrently.
using NodeStatFn = std::function<void(const std::vector<int>& x_rows,
                                      const std::vector<int>& xp_rows,
                                      std::vector<double>& S,
                                      std::vector<double>& S_rev)>;

// The permutation engine: evaluates the observed statistics, then n_perm
// joint column permutations (one Fisher-Yates draw per replicate, keyed by
// (seed, replicate)), records both max statistics per replicate, estimates
//   pi_v = (1/n_perm) sum_i 1{S_v <= max-stat_i}
// per direction, and applies the rejection rule. Replicates are independent
// and may run on several threads; results are merged in replicate order.
TestResult max_stat_test(int num_nodes, int n, int n_prime, const NodeStatFn& fn,
                         RejectRule rule, int n_perm, double pi_star,
                         std::uint64_t seed, int threads = 0);

// Empirical upper quantile: smallest s with F(s) >= level, i.e. the
// ceil(level * M)-th order statistic.
double empirical_quantile(const std::vector<double>& values, double level);

// The collaborative test end to end: anchors from the pooled data, per-
// direction hyperparameter selection by cross-validation on the observed
// split, collaborative (or pooled, per cfg.method) fits, and the permutation
// max-statistic test with hyperparameters frozen across replicates.
// cfg.method must be Ctst or Pool.
TestResult ctst_test(const Graph& g, const NodeSampleSet& samples,
                     const RunConfig& cfg);

// Shared harness for the baselines: same permutation scheme around a caller-
// supplied statistic.
TestResult baseline_max_test(const Graph& g, const NodeSampleSet& samples,
                             const NodeStatFn& fn, bool symmetric, int n_perm,
                             double pi_star, std::uint64_t seed, int threads = 0);

// Per-node single-task baseline (RULSIF, or ULSIF via cfg.method): per-node
// leave-one-out hyperparameter selection per direction on the observed data,
// then the permutation test with those choices frozen.
TestResult rulsif_test(const Graph& g, const NodeSampleSet& samples,
                       const RunConfig& cfg);

// Per-node MMD with median-heuristic bandwidths (symmetric statistic).
TestResult mmd_test(const Graph& g, const NodeSampleSet& samples,
                    const RunConfig& cfg);

// Dispatch on cfg.method.
TestResult run_test(const Graph& g, const NodeSampleSet& samples,
                    const RunConfig& cfg);

// Observed-data node statistics only (no permutations): max(S_v, S'_v) for
// the directional methods, the MMD value for the symmetric one. This is what
// the benchmark curves threshold.
std::vector<double> node_statistics(const Graph& g, const NodeSampleSet& samples,
                                    const RunConfig& cfg);

} // namespace ctst
