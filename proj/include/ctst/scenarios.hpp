#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctst/graph.hpp"
#include "ctst/samples.hpp"

namespace ctst {

enum class Scenario { Ia, Ib, IIa, IIb };

Scenario scenario_from_string(const std::string& name);
std::string scenario_name(Scenario s);

// Synthetic experiment description. Ia/Ib live on a stochastic block model
// with cluster-level changes of measure; IIa/IIb live on a grid where the
// change hits a 2-hop ego network around a degree-proportionally drawn
// center. null_mode forces q_v = p_v everywhere (the null instances of the
// benchmark protocol).
struct ScenarioSpec {
    Scenario name = Scenario::Ia;
    int n = 50;
    int n_prime = 50;
    std::uint64_t seed = 0;
    bool null_mode = false;
    // Graph-shape knobs (defaults match the reference setup; the scaled
    // acceptance runs shrink them).
    int clusters = 4;
    int nodes_per_cluster = 25;
    double p_in = 0.5;
    double p_out = 0.01;
    int rows = 10;
    int cols = 10;

    void validate() const;
};

struct LabeledInstance {
    Graph graph;
    NodeSampleSet samples;
    std::vector<int> affected; // sorted ground-truth node ids (empty under null)
};

// Undirected SBM draw: nodes u < v connected with probability p_in inside a
// cluster and p_out across, unit weights. Returns the graph and the cluster
// id per node (node v belongs to cluster v / nodes_per_cluster).
std::pair<Graph, std::vector<int>> sbm_graph(int clusters, int nodes_per_cluster,
                                             double p_in, double p_out,
                                             std::uint64_t seed);

// 4-neighbor lattice with unit weights; 2*rows*cols - rows - cols edges.
Graph grid_graph(int rows, int cols);

// Center u drawn with probability proportional to degree, plus its 2-hop
// neighborhood {v : dist(u, v) <= 2} (u included).
std::pair<int, std::vector<int>> ego_2hop(const Graph& g, std::uint64_t seed);

// The fixed part of a benchmark: the graph (and cluster labels for the SBM
// scenarios), drawn once from spec.seed and reused across instances.
struct ScenarioGraph {
    Graph graph;
    std::vector<int> cluster; // empty for the grid scenarios
};

ScenarioGraph scenario_graph(const ScenarioSpec& spec);

// One data draw on a fixed graph. The ego center for IIa/IIb is part of the
// per-instance randomness.
LabeledInstance scenario_instance(const ScenarioGraph& sg, const ScenarioSpec& spec,
                                  std::uint64_t data_seed, bool null_mode);

// Graph + one instance from the spec seed alone.
LabeledInstance generate(const ScenarioSpec& spec);

} // namespace ctst
