// Command-line front end: test / bench / simulate / seismic / curves.
// Exit codes: 0 success, 2 input error, 3 numerical failure; failures also
// print one machine-readable JSON record to stderr.

#include <algorithm>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctst/errors.hpp"
#include "ctst/evaluation.hpp"
#include "ctst/io.hpp"
#include "ctst/permutation.hpp"
#include "ctst/scenarios.hpp"
#include "ctst/spatiotemporal.hpp"

namespace {

using namespace ctst;

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// Values for the flags that override config-file fields; presence is checked
// through the subcommand's count() so file values survive unset flags.
struct ConfigFlags {
    std::string config_path;
    std::string method;
    double alpha = 0.0;
    int n_perm = 0;
    double pi_star = 0.0;
    std::uint64_t seed = 0;
    int anchors_max = 0;
    double tol = 0.0;
    int max_iter = 0;
    double eigen_floor = 0.0;
    int cv_folds = 0;
    int threads = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override its values)");
    cmd->add_option("--method", f.method, "ctst | pool | rulsif | ulsif | mmd_median");
    cmd->add_option("--alpha", f.alpha, "relative likelihood-ratio parameter in [0,1)");
    cmd->add_option("--n-perm", f.n_perm, "number of permutation replicates");
    cmd->add_option("--pi-star", f.pi_star, "target family-wise error level in (0,1)");
    cmd->add_option("--seed", f.seed, "master seed; every random choice derives from it");
    cmd->add_option("--anchors-max", f.anchors_max, "kernel dictionary size cap");
    cmd->add_option("--tol", f.tol, "block-descent convergence tolerance");
    cmd->add_option("--max-iter", f.max_iter, "block-descent sweep cap");
    cmd->add_option("--eigen-floor", f.eigen_floor, "relative eigenvalue floor for the whitener");
    cmd->add_option("--cv-folds", f.cv_folds, "cross-validation folds");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
}

RunConfig resolve_config(const CLI::App* cmd, const ConfigFlags& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = config_from_json(read_text_file(f.config_path));
    if (cmd->count("--method")) cfg.method = method_from_string(f.method);
    if (cmd->count("--alpha")) cfg.alpha = f.alpha;
    if (cmd->count("--n-perm")) cfg.n_perm = f.n_perm;
    if (cmd->count("--pi-star")) cfg.pi_star = f.pi_star;
    if (cmd->count("--seed")) cfg.seed = f.seed;
    if (cmd->count("--anchors-max")) cfg.anchors_max = f.anchors_max;
    if (cmd->count("--tol")) cfg.tol = f.tol;
    if (cmd->count("--max-iter")) cfg.max_iter = f.max_iter;
    if (cmd->count("--eigen-floor")) cfg.eigen_floor = f.eigen_floor;
    if (cmd->count("--cv-folds")) cfg.cv_folds = f.cv_folds;
    if (cmd->count("--threads")) cfg.threads = f.threads;
    cfg.validate();
    return cfg;
}

// Scenario shape knobs shared by bench and simulate.
struct ScenarioFlags {
    std::string scenario = "Ia";
    int n = 50;
    int n_prime = 50;
    int clusters = 4;
    int nodes_per_cluster = 25;
    double p_in = 0.5;
    double p_out = 0.01;
    int rows = 10;
    int cols = 10;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
    cmd->add_option("--scenario", f.scenario, "Ia | Ib | IIa | IIb")->required();
    cmd->add_option("--n", f.n, "observations per node from p");
    cmd->add_option("--n-prime", f.n_prime, "observations per node from q");
    cmd->add_option("--clusters", f.clusters, "SBM cluster count");
    cmd->add_option("--nodes-per-cluster", f.nodes_per_cluster, "SBM cluster size");
    cmd->add_option("--p-in", f.p_in, "SBM within-cluster edge probability");
    cmd->add_option("--p-out", f.p_out, "SBM between-cluster edge probability");
    cmd->add_option("--rows", f.rows, "grid rows");
    cmd->add_option("--cols", f.cols, "grid columns");
}

ScenarioSpec resolve_scenario(const ScenarioFlags& f, std::uint64_t seed, bool null_mode) {
    ScenarioSpec spec;
    spec.name = scenario_from_string(f.scenario);
    spec.n = f.n;
    spec.n_prime = f.n_prime;
    spec.seed = seed;
    spec.null_mode = null_mode;
    spec.clusters = f.clusters;
    spec.nodes_per_cluster = f.nodes_per_cluster;
    spec.p_in = f.p_in;
    spec.p_out = f.p_out;
    spec.rows = f.rows;
    spec.cols = f.cols;
    spec.validate();
    return spec;
}

NodeSampleSet load_samples(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return samples_from_csv(text);
    return samples_from_json(text);
}

void log_result(const TestResult& r) {
    if (r.has_hyperparams) {
        std::cout << "selected forward: sigma=" << format_double(r.hp_forward.sigma)
                  << " gamma=" << format_double(r.hp_forward.gamma)
                  << " lambda=" << format_double(r.hp_forward.lambda)
                  << " objective=" << format_double(r.objective_forward) << "\n";
        std::cout << "selected reverse: sigma=" << format_double(r.hp_reverse.sigma)
                  << " gamma=" << format_double(r.hp_reverse.gamma)
                  << " lambda=" << format_double(r.hp_reverse.lambda)
                  << " objective=" << format_double(r.objective_reverse) << "\n";
    }
    std::cout << "rejected " << r.rejected.size() << " of " << r.S.size() << " nodes\n";
}

int cmd_test(const CLI::App* cmd, const std::string& graph_path,
             const std::string& samples_path, const std::string& output,
             const ConfigFlags& flags) {
    const RunConfig cfg = resolve_config(cmd, flags);
    const Graph g = graph_from_json(read_text_file(graph_path));
    const NodeSampleSet samples = load_samples(samples_path);
    if (g.num_nodes() != samples.num_nodes())
        throw InputError("graph has " + std::to_string(g.num_nodes()) +
                         " nodes but samples cover " + std::to_string(samples.num_nodes()));
    const TestResult r = run_test(g, samples, cfg);
    write_text_file(output, test_result_to_json(r));
    log_result(r);
    std::cout << "wrote " << output << "\n";
    return 0;
}

int cmd_bench(const CLI::App* cmd, const ScenarioFlags& sf, int num_null, int num_alt,
              const std::string& prefix, const ConfigFlags& flags) {
    const RunConfig cfg = resolve_config(cmd, flags);
    const ScenarioSpec spec = resolve_scenario(sf, cfg.seed, false);
    const BenchOutput out = run_benchmark(spec, cfg, num_null, num_alt, cfg.seed);
    write_text_file(prefix + "_report.json", bench_report_to_json(out.report));
    write_text_file(prefix + "_report.csv", bench_report_to_csv(out.report));
    write_text_file(prefix + "_afroc.csv", curve_to_csv(out.afroc));
    write_text_file(prefix + "_roc.csv", curve_to_csv(out.roc));
    write_text_file(prefix + "_stats.json", bench_stats_to_json(out.null_stats, out.alt_runs));
    std::cout << "method=" << out.report.method << " scenario=" << out.report.scenario
              << " afroc_auc=" << format_double(out.report.afroc_auc)
              << " roc_auc=" << format_double(out.report.roc_auc) << "\n";
    std::cout << "wrote " << prefix << "_{report.json,report.csv,afroc.csv,roc.csv,stats.json}\n";
    return 0;
}

int cmd_simulate(const ScenarioFlags& sf, std::uint64_t seed, bool null_mode,
                 const std::string& output) {
    const ScenarioSpec spec = resolve_scenario(sf, seed, null_mode);
    const LabeledInstance inst = generate(spec);
    write_text_file(output, instance_to_json(inst));
    std::cout << "wrote " << output << " (" << inst.graph.num_nodes() << " nodes, "
              << inst.affected.size() << " affected)\n";
    return 0;
}

// Largest connected component of the rejected set inside the multiplex
// graph; ties go to the earliest component found (smallest leading node id).
std::vector<int> largest_rejected_component(const Graph& g, const std::vector<int>& rejected) {
    std::vector<char> in_set(static_cast<std::size_t>(g.num_nodes()), 0);
    for (int v : rejected) in_set[static_cast<std::size_t>(v)] = 1;
    std::vector<char> seen(static_cast<std::size_t>(g.num_nodes()), 0);
    std::vector<int> best;
    for (int s : rejected) {
        if (seen[static_cast<std::size_t>(s)]) continue;
        std::vector<int> comp;
        std::deque<int> queue{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            comp.push_back(v);
            for (const auto& [u, w] : g.neighbors(v)) {
                (void)w;
                if (in_set[static_cast<std::size_t>(u)] && !seen[static_cast<std::size_t>(u)]) {
                    seen[static_cast<std::size_t>(u)] = 1;
                    queue.push_back(u);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        if (comp.size() > best.size()) best = std::move(comp);
    }
    return best;
}

int cmd_seismic(const CLI::App* cmd, const std::string& stations_path,
                const std::string& waveforms_dir, long event_index_flag, int num_windows,
                int window_len, int k, const std::string& output, const ConfigFlags& flags) {
    const RunConfig cfg = resolve_config(cmd, flags);
    const auto all_stations = stations_from_csv(read_text_file(stations_path));

    // Stations without a waveform file are dropped with a notice rather than
    // failing the whole run.
    std::vector<Station> kept;
    std::vector<Waveform> waves;
    for (const auto& st : all_stations) {
        const std::string path = waveforms_dir + "/" + st.id + ".json";
        if (!std::filesystem::exists(path)) {
            std::cout << "dropping station " << st.id << " (no waveform file)\n";
            continue;
        }
        Waveform w = waveform_from_json(read_text_file(path));
        kept.push_back(st);
        waves.push_back(std::move(w));
    }
    if (kept.empty()) throw InputError("no stations with waveform data");
    for (std::size_t i = 1; i < waves.size(); ++i) {
        if (waves[i].channels.size() != waves[0].channels.size())
            throw InputError("stations disagree on channel count");
        if (waves[i].fs != waves[0].fs)
            throw InputError("stations disagree on sampling rate");
    }

    long event_index = event_index_flag;
    for (const auto& w : waves) {
        if (w.event_index < 0) continue;
        if (event_index < 0) event_index = w.event_index;
        else if (cmd->count("--event-index") == 0 && w.event_index != event_index)
            throw InputError("waveform files disagree on event_index; pass --event-index");
    }
    if (event_index < 0)
        throw InputError("no event index: pass --event-index or declare it in waveform files");

    // Condition every channel, then stack to channels x samples per station.
    std::vector<Matrix> series;
    series.reserve(waves.size());
    for (const auto& w : waves) {
        Matrix m(static_cast<long>(w.channels.size()),
                 static_cast<long>(w.channels.front().size()));
        for (std::size_t c = 0; c < w.channels.size(); ++c) {
            const auto processed = preprocess_channel(w.channels[c], w.fs);
            for (std::size_t t = 0; t < processed.size(); ++t)
                m(static_cast<long>(c), static_cast<long>(t)) = processed[t];
        }
        series.push_back(std::move(m));
    }

    const Graph base = knn_spatial_graph(kept, k);
    const MultiplexGraph mg = build_multiplex(base, num_windows);
    const NodeSampleSet samples =
        segment_windows(series, static_cast<int>(event_index), num_windows, window_len);
    const TestResult r = run_test(mg.product, samples, cfg);
    const std::vector<int> cluster = largest_rejected_component(mg.product, r.rejected);

    std::string json = "{\n\"stations\": [";
    for (std::size_t i = 0; i < kept.size(); ++i) {
        json += (i ? "," : "");
        json += "\"" + json_escape(kept[i].id) + "\"";
    }
    json += "],\n\"num_windows\": " + std::to_string(num_windows) + ",\n";
    json += "\"window_len\": " + std::to_string(window_len) + ",\n";
    json += "\"event_index\": " + std::to_string(event_index) + ",\n";
    json += "\"largest_rejected_component\": ";
    {
        std::string arr = "[";
        for (std::size_t i = 0; i < cluster.size(); ++i) {
            if (i) arr += ',';
            arr += std::to_string(cluster[i]);
        }
        arr += ']';
        json += arr;
    }
    json += ",\n\"result\": ";
    std::string res = test_result_to_json(r);
    res.pop_back();
    json += res;
    json += "\n}\n";
    write_text_file(output, json);
    log_result(r);
    std::cout << "largest rejected component: " << cluster.size() << " nodes\n";
    std::cout << "wrote " << output << "\n";
    return 0;
}

int cmd_curves(const std::string& stats_path, const std::string& prefix) {
    std::vector<std::vector<double>> null_stats;
    std::vector<AltRun> alt_runs;
    bench_stats_from_json(read_text_file(stats_path), null_stats, alt_runs);
    const auto afroc = afroc_curve(null_stats, alt_runs);
    const auto roc = roc_curve(alt_runs);
    const double a_auc = afroc_auc(afroc);
    const double r_auc = roc_auc(roc);
    write_text_file(prefix + "_afroc.csv", curve_to_csv(afroc));
    write_text_file(prefix + "_roc.csv", curve_to_csv(roc));
    write_text_file(prefix + "_summary.json", "{\n\"afroc_auc\": " + format_double(a_auc) +
                                                  ",\n\"roc_auc\": " + format_double(r_auc) +
                                                  "\n}\n");
    std::cout << "afroc_auc=" << format_double(a_auc) << " roc_auc=" << format_double(r_auc)
              << "\n";
    std::cout << "wrote " << prefix << "_{afroc.csv,roc.csv,summary.json}\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-structured multiple two-sample testing"};
    app.require_subcommand(1);

    // test
    auto* test = app.add_subcommand("test", "run a two-sample test on given graph + samples");
    std::string graph_path, samples_path, test_output = "result.json";
    ConfigFlags test_flags;
    test->add_option("--graph", graph_path, "graph JSON file")->required();
    test->add_option("--samples", samples_path, "samples JSON or CSV file")->required();
    test->add_option("--output", test_output, "result JSON path");
    add_config_flags(test, test_flags);

    // bench
    auto* bench = app.add_subcommand("bench", "synthetic benchmark: curves and AUCs");
    ScenarioFlags bench_sf;
    int num_null = 200, num_alt = 200;
    std::string bench_prefix = "bench";
    ConfigFlags bench_flags;
    add_scenario_flags(bench, bench_sf);
    bench->add_option("--num-null", num_null, "instances with q = p");
    bench->add_option("--num-alt", num_alt, "instances with the scenario change");
    bench->add_option("--out-prefix", bench_prefix, "output file prefix");
    add_config_flags(bench, bench_flags);

    // simulate
    auto* sim = app.add_subcommand("simulate", "emit one labeled synthetic instance");
    ScenarioFlags sim_sf;
    std::uint64_t sim_seed = 0;
    bool sim_null = false;
    std::string sim_output = "instance.json";
    add_scenario_flags(sim, sim_sf);
    sim->add_option("--seed", sim_seed, "instance seed");
    sim->add_flag("--null", sim_null, "force q = p everywhere");
    sim->add_option("--output", sim_output, "instance JSON path");

    // seismic
    auto* seis = app.add_subcommand("seismic", "spatiotemporal test on station waveforms");
    std::string stations_path, waveforms_dir, seis_output = "seismic_result.json";
    long event_index = -1;
    int num_windows = 10, window_len = 100, knn_k = 3;
    ConfigFlags seis_flags;
    seis->add_option("--stations", stations_path, "stations CSV (id,lat,lon)")->required();
    seis->add_option("--waveforms", waveforms_dir, "directory of <id>.json waveforms")->required();
    seis->add_option("--event-index", event_index, "event sample index (overrides files)");
    seis->add_option("--num-windows", num_windows, "windows on each side of the event");
    seis->add_option("--window-len", window_len, "samples per window");
    seis->add_option("--knn", knn_k, "spatial nearest-neighbor count");
    seis->add_option("--output", seis_output, "result JSON path");
    add_config_flags(seis, seis_flags);

    // curves
    auto* curves = app.add_subcommand("curves", "recompute AFROC/ROC from saved statistics");
    std::string stats_path, curves_prefix = "curves";
    curves->add_option("--stats", stats_path, "saved statistics JSON (from bench)")->required();
    curves->add_option("--out-prefix", curves_prefix, "output file prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (test->parsed())
            return cmd_test(test, graph_path, samples_path, test_output, test_flags);
        if (bench->parsed())
            return cmd_bench(bench, bench_sf, num_null, num_alt, bench_prefix, bench_flags);
        if (sim->parsed()) return cmd_simulate(sim_sf, sim_seed, sim_null, sim_output);
        if (seis->parsed())
            return cmd_seismic(seis, stations_path, waveforms_dir, event_index, num_windows,
                               window_len, knn_k, seis_output, seis_flags);
        if (curves->parsed()) return cmd_curves(stats_path, curves_prefix);
    } catch (const InputError& e) {
        std::cerr << "{\"error\": {\"type\": \"input\", \"message\": \"" << json_escape(e.what())
                  << "\"}}\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "{\"error\": {\"type\": \"numerical\", \"message\": \""
                  << json_escape(e.what()) << "\"}}\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": {\"type\": \"internal\", \"message\": \"" << json_escape(e.what())
                  << "\"}}\n";
        return 3;
    }
    return 0;
}
