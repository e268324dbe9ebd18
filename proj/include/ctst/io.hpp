#pragma once

#include <string>
#include <vector>

#include "ctst/config.hpp"
#include "ctst/evaluation.hpp"
#include "ctst/graph.hpp"
#include "ctst/permutation.hpp"
#include "ctst/samples.hpp"
#include "ctst/scenarios.hpp"
#include "ctst/spatiotemporal.hpp"

// Serialization lives here so every artifact is emitted the same way:
// deterministic key order, floats at 17 significant digits (full double
// round-trip), one record per line for the big arrays. Reruns with the same
// seed must produce byte-identical files. Parsing accepts any valid JSON
// layout of the documented schemas (see FORMATS.md).

namespace ctst {

std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

std::string samples_to_json(const NodeSampleSet& s);
NodeSampleSet samples_from_json(const std::string& text);

// CSV with header node,set,idx,x1,..,xd; set is "p" (X) or "q" (X'). Rows
// may come in any order; (node, set, idx) must tile a full rectangle.
std::string samples_to_csv(const NodeSampleSet& s);
NodeSampleSet samples_from_csv(const std::string& text);

std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);

std::string test_result_to_json(const TestResult& r);
TestResult test_result_from_json(const std::string& text);

// Simulated instance bundle: graph + samples + ground truth.
std::string instance_to_json(const LabeledInstance& inst);
LabeledInstance instance_from_json(const std::string& text);

std::string bench_report_to_json(const BenchReport& r);
std::string bench_report_to_csv(const BenchReport& r);

std::string curve_to_csv(const std::vector<CurvePoint>& curve);

// Saved per-instance node statistics, enough to rebuild both curves.
std::string bench_stats_to_json(const std::vector<std::vector<double>>& null_stats,
                                const std::vector<AltRun>& alt_runs);
void bench_stats_from_json(const std::string& text,
                           std::vector<std::vector<double>>& null_stats,
                           std::vector<AltRun>& alt_runs);

// Station table CSV with header id,lat,lon; row order fixes node ids.
std::vector<Station> stations_from_csv(const std::string& text);

// Per-station waveform file: {"fs": .., "event_index": .. (optional),
// "channels": [[..], ..]}. Channels must share one length.
struct Waveform {
    double fs = 0.0;
    long event_index = -1; // -1 when the file does not declare one
    std::vector<std::vector<double>> channels;
};
Waveform waveform_from_json(const std::string& text);

} // namespace ctst
