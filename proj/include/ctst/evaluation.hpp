#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctst/config.hpp"
#include "ctst/scenarios.hpp"

namespace ctst {

// One point of an AFROC or ROC curve: at this threshold, x is the FWER
// (AFROC) or FPR (ROC) and y is the TPR.
struct CurvePoint {
    double threshold;
    double x;
    double y;
};

// Node statistics of one alternative instance plus its ground truth.
struct AltRun {
    std::vector<double> stats;
    std::vector<int> affected; // sorted node ids
};

// AFROC: for every threshold in the sorted union of all observed statistic
// values (plus +-inf endpoints), x = fraction of null instances whose max
// node statistic exceeds the threshold, y = mean over alternative instances
// of the fraction of affected nodes exceeding it. Points come out sorted by
// descending threshold, hence non-decreasing in x and y.
std::vector<CurvePoint> afroc_curve(const std::vector<std::vector<double>>& null_stats,
                                    const std::vector<AltRun>& alt_runs);

// Pooled ROC over node-level (statistic, affected?) pairs across all
// alternative instances.
std::vector<CurvePoint> roc_curve(const std::vector<AltRun>& alt_runs);

// Trapezoidal area of the curve restricted to x in [0, 0.05] (linear
// interpolation at the right boundary), divided by 0.05.
double afroc_auc(const std::vector<CurvePoint>& curve);

// Trapezoidal area over the full x range (ties split diagonally).
double roc_auc(const std::vector<CurvePoint>& curve);

struct BenchReport {
    std::string method;
    std::string scenario;
    int n = 0;
    int n_prime = 0;
    double afroc_auc = 0.0;
    double roc_auc = 0.0;
    int num_null_instances = 0;
    int num_alt_instances = 0;
    double runtime_seconds = 0.0;
};

struct BenchOutput {
    BenchReport report;
    std::vector<CurvePoint> afroc;
    std::vector<CurvePoint> roc;
    // Raw per-instance statistics, kept so curves can be recomputed later
    // without rerunning the methods.
    std::vector<std::vector<double>> null_stats;
    std::vector<AltRun> alt_runs;
};

// Benchmark protocol: draw the scenario graph once, then num_null instances
// with q = p and num_alt instances with the scenario's change, compute the
// chosen method's node statistics on each (no permutations involved), and
// assemble the curves. Deterministic given seed.
BenchOutput run_benchmark(const ScenarioSpec& scenario, const RunConfig& cfg,
                          int num_null, int num_alt, std::uint64_t seed);

} // namespace ctst
