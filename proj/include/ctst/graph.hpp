#pragma once

#include <utility>
#include <vector>

namespace ctst {

struct Edge {
    int u;
    int v;
    double w;
};

// Fixed undirected positive-weighted graph. Immutable after construction,
// so concurrent reads are safe. Edges are canonicalized to u < v; adjacency
// is stored as sorted neighbor lists because the block solver iterates
// neighborhoods in its inner loop.
class Graph {
public:
    static Graph build(int num_nodes, const std::vector<Edge>& edges);
    static Graph edgeless(int num_nodes);

    int num_nodes() const { return num_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::pair<int, double>>& neighbors(int v) const;
    double degree(int v) const;
    const std::vector<double>& degree_vector() const { return degree_; }
    double mean_degree() const;

    // Symmetric weight lookup; 0.0 when (u,v) is not an edge.
    double weight(int u, int v) const;

private:
    int num_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::vector<double> degree_;
};

// Graph-smoothness functional sum_{(u,v) in E} w_uv (s_u - s_v)^2 of a
// one-scalar-per-node signal.
double smoothness(const Graph& g, const std::vector<double>& signal);

} // namespace ctst
