#include "ctst/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "ctst/errors.hpp"
#include "ctst/random.hpp"

namespace ctst {

Scenario scenario_from_string(const std::string& name) {
    if (name == "Ia" || name == "ia") return Scenario::Ia;
    if (name == "Ib" || name == "ib") return Scenario::Ib;
    if (name == "IIa" || name == "iia") return Scenario::IIa;
    if (name == "IIb" || name == "iib") return Scenario::IIb;
    throw InputError("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Ia: return "Ia";
        case Scenario::Ib: return "Ib";
        case Scenario::IIa: return "IIa";
        case Scenario::IIb: return "IIb";
    }
    throw InputError("unknown scenario enum value");
}

void ScenarioSpec::validate() const {
    if (n < 2 || n_prime < 2) throw InputError("scenario needs n, n_prime >= 2");
    if (name == Scenario::Ia || name == Scenario::Ib) {
        if (clusters < 1 || nodes_per_cluster < 1)
            throw InputError("SBM scenario needs clusters, nodes_per_cluster >= 1");
        if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
            throw InputError("SBM probabilities must lie in [0, 1]");
    } else {
        if (rows < 1 || cols < 1) throw InputError("grid scenario needs rows, cols >= 1");
        if (static_cast<long long>(rows) * cols < 2)
            throw InputError("grid scenario needs at least 2 nodes");
    }
}

std::pair<Graph, std::vector<int>> sbm_graph(int clusters, int nodes_per_cluster,
                                             double p_in, double p_out,
                                             std::uint64_t seed) {
    const int n_nodes = clusters * nodes_per_cluster;
    std::vector<int> cluster(n_nodes);
    for (int v = 0; v < n_nodes; ++v) cluster[v] = v / nodes_per_cluster;

    Rng rng(seed);
    std::vector<Edge> edges;
    for (int u = 0; u < n_nodes; ++u) {
        for (int v = u + 1; v < n_nodes; ++v) {
            const double p = (cluster[u] == cluster[v]) ? p_in : p_out;
            if (rng.uniform() < p) edges.push_back({u, v, 1.0});
        }
    }
    return {Graph::build(n_nodes, edges), std::move(cluster)};
}

Graph grid_graph(int rows, int cols) {
    const int n_nodes = rows * cols;
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2LL * rows * cols - rows - cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int v = r * cols + c;
            if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
            if (r + 1 < rows) edges.push_back({v, v + cols, 1.0});
        }
    }
    return Graph::build(n_nodes, edges);
}

std::pair<int, std::vector<int>> ego_2hop(const Graph& g, std::uint64_t seed) {
    const int n_nodes = g.num_nodes();
    double total = 0.0;
    for (int v = 0; v < n_nodes; ++v) total += g.degree(v);
    if (total <= 0.0) throw InputError("ego network needs a graph with edges");

    Rng rng(seed);
    const double u01 = rng.uniform() * total;
    int center = n_nodes - 1;
    double acc = 0.0;
    for (int v = 0; v < n_nodes; ++v) {
        acc += g.degree(v);
        if (u01 < acc) { center = v; break; }
    }

    // BFS out to distance 2.
    std::vector<int> dist(n_nodes, -1);
    std::deque<int> queue;
    dist[center] = 0;
    queue.push_back(center);
    std::vector<int> members;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        members.push_back(v);
        if (dist[v] == 2) continue;
        for (const auto& [nb, w] : g.neighbors(v)) {
            (void)w;
            if (dist[nb] < 0) {
                dist[nb] = dist[v] + 1;
                queue.push_back(nb);
            }
        }
    }
    std::sort(members.begin(), members.end());
    return {center, std::move(members)};
}

namespace {

// Correlated bivariate normal, zero mean, unit variances, correlation rho.
inline void bivariate(Rng& rng, double rho, double& x1, double& x2) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    x1 = z1;
    x2 = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
}

// Observations are rows throughout (count x d matrices).
Matrix draw_ia(Rng& rng, int count, bool changed_uniform, bool changed_shift) {
    Matrix out(count, 1);
    if (changed_uniform) {
        const double half = std::sqrt(3.0); // Uniform(-sqrt3, sqrt3): mean 0, var 1
        for (int i = 0; i < count; ++i) out(i, 0) = rng.uniform(-half, half);
    } else {
        const double shift = changed_shift ? 1.0 : 0.0;
        for (int i = 0; i < count; ++i) out(i, 0) = shift + rng.normal();
    }
    return out;
}

Matrix draw_ib(Rng& rng, int count, double rho, double mean) {
    Matrix out(count, 2);
    for (int i = 0; i < count; ++i) {
        double x1, x2;
        bivariate(rng, rho, x1, x2);
        out(i, 0) = mean + x1;
        out(i, 1) = mean + x2;
    }
    return out;
}

Matrix draw_iia(Rng& rng, int count, double rho12) {
    Matrix out(count, 3);
    for (int i = 0; i < count; ++i) {
        double x1, x2;
        bivariate(rng, rho12, x1, x2);
        out(i, 0) = x1;
        out(i, 1) = x2;
        out(i, 2) = rng.normal();
    }
    return out;
}

Matrix draw_iib_null(Rng& rng, int count) {
    Matrix out(count, 2);
    const double sd = std::sqrt(10.0);
    for (int i = 0; i < count; ++i) {
        out(i, 0) = sd * rng.normal();
        out(i, 1) = sd * rng.normal();
    }
    return out;
}

Matrix draw_iib_mixture(Rng& rng, int count) {
    static const double means[5][2] = {
        {0.0, 0.0}, {0.0, 5.0}, {0.0, -5.0}, {5.0, 0.0}, {-5.0, 0.0}};
    Matrix out(count, 2);
    const double sd = std::sqrt(5.0);
    for (int i = 0; i < count; ++i) {
        const int k = rng.uniform_int(5);
        out(i, 0) = means[k][0] + sd * rng.normal();
        out(i, 1) = means[k][1] + sd * rng.normal();
    }
    return out;
}

} // namespace

ScenarioGraph scenario_graph(const ScenarioSpec& spec) {
    spec.validate();
    ScenarioGraph sg;
    if (spec.name == Scenario::Ia || spec.name == Scenario::Ib) {
        auto [g, cl] = sbm_graph(spec.clusters, spec.nodes_per_cluster, spec.p_in,
                                 spec.p_out, derive_seed(spec.seed, streams::kScenarioGraph));
        sg.graph = std::move(g);
        sg.cluster = std::move(cl);
    } else {
        sg.graph = grid_graph(spec.rows, spec.cols);
    }
    return sg;
}

LabeledInstance scenario_instance(const ScenarioGraph& sg, const ScenarioSpec& spec,
                                  std::uint64_t data_seed, bool null_mode) {
    const int n_nodes = sg.graph.num_nodes();
    LabeledInstance inst;
    inst.graph = sg.graph;
    inst.samples.X.resize(n_nodes);
    inst.samples.Xp.resize(n_nodes);

    Rng rng(derive_seed(data_seed, streams::kScenarioData));

    // Which nodes carry a changed q. SBM scenarios change whole clusters;
    // grid scenarios change a per-instance 2-hop ego network.
    std::vector<char> changed(n_nodes, 0);
    if (!null_mode) {
        if (spec.name == Scenario::Ia) {
            for (int v = 0; v < n_nodes; ++v)
                if (sg.cluster[v] == 0 || sg.cluster[v] == 3) changed[v] = 1;
        } else if (spec.name == Scenario::Ib) {
            for (int v = 0; v < n_nodes; ++v)
                if (sg.cluster[v] == 2 || sg.cluster[v] == 3) changed[v] = 1;
        } else {
            auto [center, members] =
                ego_2hop(sg.graph, derive_seed(data_seed, streams::kEgoCenter));
            (void)center;
            for (int v : members) changed[v] = 1;
        }
    }

    for (int v = 0; v < n_nodes; ++v) {
        switch (spec.name) {
            case Scenario::Ia: {
                // p: N(0,1) everywhere. q: cluster 1 -> Uniform(-sqrt3, sqrt3),
                // cluster 4 -> N(1,1), middle clusters unchanged.
                inst.samples.X[v] = draw_ia(rng, spec.n, false, false);
                const bool unif = changed[v] && sg.cluster[v] == 0;
                const bool shift = changed[v] && sg.cluster[v] == 3;
                inst.samples.Xp[v] = draw_ia(rng, spec.n_prime, unif, shift);
                break;
            }
            case Scenario::Ib: {
                // p: corr -4/5 on clusters 1-2, +4/5 on cluster 3, independent
                // on cluster 4. q: cluster 3 decorrelates, cluster 4 shifts
                // mean to (1,1).
                double rho_p = 0.0;
                if (sg.cluster[v] == 0 || sg.cluster[v] == 1) rho_p = -0.8;
                else if (sg.cluster[v] == 2) rho_p = 0.8;
                inst.samples.X[v] = draw_ib(rng, spec.n, rho_p, 0.0);
                double rho_q = rho_p;
                double mean_q = 0.0;
                if (changed[v]) {
                    if (sg.cluster[v] == 2) rho_q = 0.0;
                    else mean_q = 1.0;
                }
                inst.samples.Xp[v] = draw_ib(rng, spec.n_prime, rho_q, mean_q);
                break;
            }
            case Scenario::IIa: {
                // p: 3-d normal with corr(x1,x2)=4/5, x3 independent.
                // q inside the ego network: x1, x2 decorrelate.
                inst.samples.X[v] = draw_iia(rng, spec.n, 0.8);
                inst.samples.Xp[v] = draw_iia(rng, spec.n_prime, changed[v] ? 0.0 : 0.8);
                break;
            }
            case Scenario::IIb: {
                // p: N(0, 10 I2). q inside the ego network: 5-component
                // equal-weight mixture, means at 0 and +-5 on each axis,
                // component covariance 5 I2.
                inst.samples.X[v] = draw_iib_null(rng, spec.n);
                inst.samples.Xp[v] = changed[v] ? draw_iib_mixture(rng, spec.n_prime)
                                                : draw_iib_null(rng, spec.n_prime);
                break;
            }
        }
    }

    for (int v = 0; v < n_nodes; ++v)
        if (changed[v]) inst.affected.push_back(v);
    inst.samples.validate();
    return inst;
}

LabeledInstance generate(const ScenarioSpec& spec) {
    const ScenarioGraph sg = scenario_graph(spec);
    return scenario_instance(sg, spec, spec.seed, spec.null_mode);
}

} // namespace ctst
