#include "ctst/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "ctst/errors.hpp"

namespace ctst {

Graph Graph::build(int num_nodes, const std::vector<Edge>& edges) {
    if (num_nodes <= 0)
        throw InputError("graph must have a positive number of nodes");
    Graph g;
    g.num_nodes_ = num_nodes;
    g.adj_.resize(num_nodes);
    g.degree_.assign(num_nodes, 0.0);
    g.edges_.reserve(edges.size());
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= num_nodes || e.v < 0 || e.v >= num_nodes)
            throw InputError("edge (" + std::to_string(e.u) + "," +
                             std::to_string(e.v) + ") has a node id outside [0," +
                             std::to_string(num_nodes) + ")");
        if (e.u == e.v)
            throw InputError("self-loop at node " + std::to_string(e.u));
        if (!(e.w > 0.0))
            throw InputError("edge (" + std::to_string(e.u) + "," +
                             std::to_string(e.v) + ") has non-positive weight");
        const int a = std::min(e.u, e.v);
        const int b = std::max(e.u, e.v);
        if (!seen.insert({a, b}).second)
            throw InputError("duplicate edge (" + std::to_string(a) + "," +
                             std::to_string(b) + ")");
        g.edges_.push_back({a, b, e.w});
        g.adj_[a].push_back({b, e.w});
        g.adj_[b].push_back({a, e.w});
        g.degree_[a] += e.w;
        g.degree_[b] += e.w;
    }
    for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

Graph Graph::edgeless(int num_nodes) { return build(num_nodes, {}); }

const std::vector<std::pair<int, double>>& Graph::neighbors(int v) const {
    if (v < 0 || v >= num_nodes_)
        throw InputError("node id " + std::to_string(v) + " out of range");
    return adj_[v];
}

double Graph::degree(int v) const {
    if (v < 0 || v >= num_nodes_)
        throw InputError("node id " + std::to_string(v) + " out of range");
    return degree_[v];
}

double Graph::mean_degree() const {
    double total = 0.0;
    for (double d : degree_) total += d;
    return num_nodes_ > 0 ? total / num_nodes_ : 0.0;
}

double Graph::weight(int u, int v) const {
    for (const auto& [nbr, w] : neighbors(u))
        if (nbr == v) return w;
    return 0.0;
}

double smoothness(const Graph& g, const std::vector<double>& signal) {
    if (static_cast<int>(signal.size()) != g.num_nodes())
        throw InputError("signal length " + std::to_string(signal.size()) +
                         " does not match node count " +
                         std::to_string(g.num_nodes()));
    double total = 0.0;
    for (const Edge& e : g.edges()) {
        const double diff = signal[e.u] - signal[e.v];
        total += e.w * diff * diff;
    }
    return total;
}

} // namespace ctst
