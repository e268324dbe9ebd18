#include "ctst/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ctst/errors.hpp"
#include "ctst/permutation.hpp"
#include "ctst/random.hpp"

namespace ctst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Descending thresholds: +inf, every observed value once, -inf. Walking this
// list makes x and y non-decreasing.
std::vector<double> threshold_grid(const std::vector<std::vector<double>>& null_stats,
                                   const std::vector<AltRun>& alt_runs) {
    std::vector<double> values;
    for (const auto& s : null_stats) values.insert(values.end(), s.begin(), s.end());
    for (const auto& run : alt_runs)
        values.insert(values.end(), run.stats.begin(), run.stats.end());
    std::sort(values.begin(), values.end(), std::greater<double>());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> grid;
    grid.reserve(values.size() + 2);
    grid.push_back(kInf);
    grid.insert(grid.end(), values.begin(), values.end());
    grid.push_back(-kInf);
    return grid;
}

} // namespace

std::vector<CurvePoint> afroc_curve(const std::vector<std::vector<double>>& null_stats,
                                    const std::vector<AltRun>& alt_runs) {
    if (null_stats.empty() || alt_runs.empty())
        throw InputError("curve estimation needs at least one null and one alternative instance");
    for (const auto& run : alt_runs) {
        if (run.affected.empty())
            throw InputError("alternative instance without affected nodes");
        for (int v : run.affected)
            if (v < 0 || static_cast<std::size_t>(v) >= run.stats.size())
                throw InputError("affected node id out of range");
    }

    std::vector<double> null_max(null_stats.size());
    for (std::size_t i = 0; i < null_stats.size(); ++i) {
        if (null_stats[i].empty()) throw InputError("empty statistic vector");
        null_max[i] = *std::max_element(null_stats[i].begin(), null_stats[i].end());
    }

    const auto grid = threshold_grid(null_stats, alt_runs);
    std::vector<CurvePoint> curve;
    curve.reserve(grid.size());
    for (double thd : grid) {
        int fw = 0;
        for (double m : null_max)
            if (m > thd) ++fw;
        double tpr_sum = 0.0;
        for (const auto& run : alt_runs) {
            int hits = 0;
            for (int v : run.affected)
                if (run.stats[static_cast<std::size_t>(v)] > thd) ++hits;
            tpr_sum += static_cast<double>(hits) / static_cast<double>(run.affected.size());
        }
        curve.push_back({thd, static_cast<double>(fw) / static_cast<double>(null_max.size()),
                         tpr_sum / static_cast<double>(alt_runs.size())});
    }
    return curve;
}

std::vector<CurvePoint> roc_curve(const std::vector<AltRun>& alt_runs) {
    if (alt_runs.empty()) throw InputError("ROC needs at least one alternative instance");
    // Pool (statistic, label) across instances.
    std::vector<double> pos, neg;
    for (const auto& run : alt_runs) {
        std::vector<char> is_affected(run.stats.size(), 0);
        for (int v : run.affected) {
            if (v < 0 || static_cast<std::size_t>(v) >= run.stats.size())
                throw InputError("affected node id out of range");
            is_affected[static_cast<std::size_t>(v)] = 1;
        }
        for (std::size_t v = 0; v < run.stats.size(); ++v)
            (is_affected[v] ? pos : neg).push_back(run.stats[v]);
    }
    if (pos.empty() || neg.empty())
        throw InputError("ROC needs both affected and unaffected nodes");

    const auto grid = threshold_grid({pos, neg}, {});
    std::vector<CurvePoint> curve;
    curve.reserve(grid.size());
    for (double thd : grid) {
        int fp = 0, tp = 0;
        for (double s : neg)
            if (s > thd) ++fp;
        for (double s : pos)
            if (s > thd) ++tp;
        curve.push_back({thd, static_cast<double>(fp) / static_cast<double>(neg.size()),
                         static_cast<double>(tp) / static_cast<double>(pos.size())});
    }
    return curve;
}

namespace {

double trapezoid(const std::vector<CurvePoint>& curve, double x_max) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        double x0 = curve[i - 1].x, y0 = curve[i - 1].y;
        double x1 = curve[i].x, y1 = curve[i].y;
        if (x0 >= x_max) break;
        if (x1 > x_max) {
            // Linear interpolation at the window boundary.
            const double t = (x_max - x0) / (x1 - x0);
            y1 = y0 + t * (y1 - y0);
            x1 = x_max;
        }
        area += 0.5 * (y0 + y1) * (x1 - x0);
    }
    return area;
}

} // namespace

double afroc_auc(const std::vector<CurvePoint>& curve) {
    if (curve.empty()) throw InputError("AUC of an empty curve");
    return trapezoid(curve, 0.05) / 0.05;
}

double roc_auc(const std::vector<CurvePoint>& curve) {
    if (curve.empty()) throw InputError("AUC of an empty curve");
    return trapezoid(curve, 1.0);
}

BenchOutput run_benchmark(const ScenarioSpec& scenario, const RunConfig& cfg,
                          int num_null, int num_alt, std::uint64_t seed) {
    if (num_null < 1 || num_alt < 1)
        throw InputError("benchmark needs at least one null and one alternative instance");
    scenario.validate();
    cfg.validate();

    const auto t0 = std::chrono::steady_clock::now();
    ScenarioSpec graph_spec = scenario;
    graph_spec.seed = seed;
    const ScenarioGraph sg = scenario_graph(graph_spec);

    std::vector<std::vector<double>> null_stats(static_cast<std::size_t>(num_null));
    for (int i = 0; i < num_null; ++i) {
        const auto inst = scenario_instance(
            sg, graph_spec, derive_seed(seed, streams::kBenchNullBase + static_cast<std::uint64_t>(i)),
            /*null_mode=*/true);
        null_stats[static_cast<std::size_t>(i)] = node_statistics(inst.graph, inst.samples, cfg);
    }
    std::vector<AltRun> alt_runs(static_cast<std::size_t>(num_alt));
    for (int i = 0; i < num_alt; ++i) {
        const auto inst = scenario_instance(
            sg, graph_spec, derive_seed(seed, streams::kBenchAltBase + static_cast<std::uint64_t>(i)),
            /*null_mode=*/false);
        alt_runs[static_cast<std::size_t>(i)] = {
            node_statistics(inst.graph, inst.samples, cfg), inst.affected};
    }

    BenchOutput out;
    out.null_stats = std::move(null_stats);
    out.alt_runs = std::move(alt_runs);
    out.afroc = afroc_curve(out.null_stats, out.alt_runs);
    out.roc = roc_curve(out.alt_runs);
    out.report.method = method_name(cfg.method);
    out.report.scenario = scenario_name(scenario.name);
    out.report.n = scenario.n;
    out.report.n_prime = scenario.n_prime;
    out.report.afroc_auc = afroc_auc(out.afroc);
    out.report.roc_auc = roc_auc(out.roc);
    out.report.num_null_instances = num_null;
    out.report.num_alt_instances = num_alt;
    out.report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace ctst
