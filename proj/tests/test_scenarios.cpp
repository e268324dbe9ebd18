#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "ctst/errors.hpp"
#include "ctst/scenarios.hpp"

using namespace ctst;

namespace {

// Absolute-tolerance comparison; doctest echoes both sides on failure.
bool near(double x, double target, double tol) {
    return std::abs(x - target) <= tol;
}

// Stack the per-node matrices of the listed nodes into one tall matrix.
Matrix stack_nodes(const std::vector<Matrix>& mats, const std::vector<int>& nodes) {
    Eigen::Index rows = 0;
    for (int v : nodes) rows += mats[v].rows();
    Matrix out(rows, mats[nodes[0]].cols());
    Eigen::Index at = 0;
    for (int v : nodes) {
        out.middleRows(at, mats[v].rows()) = mats[v];
        at += mats[v].rows();
    }
    return out;
}

double corr(const Matrix& X, int a, int b) {
    const Vector xa = X.col(a).array() - X.col(a).mean();
    const Vector xb = X.col(b).array() - X.col(b).mean();
    return xa.dot(xb) / std::sqrt(xa.squaredNorm() * xb.squaredNorm());
}

double variance(const Matrix& X, int c) {
    const Vector xc = X.col(c).array() - X.col(c).mean();
    return xc.squaredNorm() / (X.rows() - 1.0);
}

std::vector<int> range_vec(int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

// Independent breadth-first distances for the ego-network cross-check.
std::vector<int> bfs_dist(const Graph& g, int src) {
    std::vector<int> dist(g.num_nodes(), -1);
    std::deque<int> q{src};
    dist[src] = 0;
    while (!q.empty()) {
        const int v = q.front();
        q.pop_front();
        for (const auto& [nb, w] : g.neighbors(v)) {
            (void)w;
            if (dist[nb] < 0) {
                dist[nb] = dist[v] + 1;
                q.push_back(nb);
            }
        }
    }
    return dist;
}

bool same_edges(const Graph& a, const Graph& b) {
    if (a.num_nodes() != b.num_nodes() || a.edges().size() != b.edges().size())
        return false;
    for (std::size_t i = 0; i < a.edges().size(); ++i) {
        const Edge &ea = a.edges()[i], &eb = b.edges()[i];
        if (ea.u != eb.u || ea.v != eb.v || ea.w != eb.w) return false;
    }
    return true;
}

} // namespace

TEST_CASE("scenario names round-trip") {
    for (Scenario s : {Scenario::Ia, Scenario::Ib, Scenario::IIa, Scenario::IIb})
        CHECK(scenario_from_string(scenario_name(s)) == s);
    CHECK(scenario_from_string("iib") == Scenario::IIb);
    CHECK_THROWS_AS(scenario_from_string("III"), InputError);
}

TEST_CASE("lattice graph has the 4-neighbor structure") {
    const Graph g = grid_graph(3, 4);
    CHECK(g.num_nodes() == 12);
    CHECK(static_cast<int>(g.edges().size()) == 2 * 12 - 3 - 4);

    // Corners touch 2 nodes, border middles 3, interior 4.
    CHECK(g.degree(0) == 2.0);   // (0,0)
    CHECK(g.degree(3) == 2.0);   // (0,3)
    CHECK(g.degree(8) == 2.0);   // (2,0)
    CHECK(g.degree(11) == 2.0);  // (2,3)
    CHECK(g.degree(1) == 3.0);   // (0,1)
    CHECK(g.degree(5) == 4.0);   // (1,1)
    CHECK(g.weight(0, 1) == 1.0);
    CHECK(g.weight(0, 4) == 1.0);
    CHECK(g.weight(0, 5) == 0.0); // no diagonals

    const Graph tiny = grid_graph(2, 2);
    REQUIRE(tiny.edges().size() == 4);
    CHECK(tiny.weight(0, 1) == 1.0);
    CHECK(tiny.weight(0, 2) == 1.0);
    CHECK(tiny.weight(1, 3) == 1.0);
    CHECK(tiny.weight(2, 3) == 1.0);

    // A path is the 1 x k special case.
    const Graph path = grid_graph(1, 5);
    CHECK(path.edges().size() == 4);
    CHECK(path.degree(0) == 1.0);
    CHECK(path.degree(2) == 2.0);
}

TEST_CASE("block-model graph respects cluster structure at the extremes") {
    auto [g, cl] = sbm_graph(3, 4, 1.0, 0.0, 7);
    CHECK(g.num_nodes() == 12);
    REQUIRE(cl.size() == 12);
    for (int v = 0; v < 12; ++v) CHECK(cl[v] == v / 4);
    // p_in = 1: complete within clusters; p_out = 0: nothing across.
    CHECK(static_cast<int>(g.edges().size()) == 3 * 6);
    for (const Edge& e : g.edges()) {
        CHECK(cl[e.u] == cl[e.v]);
        CHECK(e.w == 1.0);
    }
    for (int v = 0; v < 12; ++v) CHECK(g.degree(v) == 3.0);

    auto [empty, cl2] = sbm_graph(3, 4, 0.0, 0.0, 7);
    CHECK(empty.edges().empty());

    // Same seed, same graph; different seed, (almost surely) different edges.
    auto [g2, c2] = sbm_graph(4, 10, 0.4, 0.05, 123);
    auto [g3, c3] = sbm_graph(4, 10, 0.4, 0.05, 123);
    auto [g4, c4] = sbm_graph(4, 10, 0.4, 0.05, 124);
    CHECK(same_edges(g2, g3));
    CHECK_FALSE(same_edges(g2, g4));
}

TEST_CASE("two-hop ego networks match independent breadth-first search") {
    // Path graph: the ego set is a window of width <= 5 around the center.
    const Graph path = grid_graph(1, 7);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto [center, members] = ego_2hop(path, seed);
        std::vector<int> want;
        for (int v = std::max(0, center - 2); v <= std::min(6, center + 2); ++v)
            want.push_back(v);
        CHECK(members == want);
    }

    // Random-ish graphs: members are exactly the nodes within distance 2.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto [g, cl] = sbm_graph(3, 5, 0.5, 0.1, 1000 + seed);
        if (g.edges().empty()) continue;
        auto [center, members] = ego_2hop(g, seed);
        const std::vector<int> dist = bfs_dist(g, center);
        std::vector<int> want;
        for (int v = 0; v < g.num_nodes(); ++v)
            if (dist[v] >= 0 && dist[v] <= 2) want.push_back(v);
        CHECK(members == want);
        CHECK(std::is_sorted(members.begin(), members.end()));
        CHECK(std::find(members.begin(), members.end(), center) != members.end());
    }

    // Centers are drawn proportionally to degree: on a star with 5 leaves the
    // hub carries half the total degree, so about half of many draws hit it.
    std::vector<Edge> star_edges;
    for (int leaf = 1; leaf <= 5; ++leaf) star_edges.push_back({0, leaf, 1.0});
    const Graph star = Graph::build(6, star_edges);
    int hub_hits = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        hub_hits += ego_2hop(star, seed).first == 0;
    CHECK(hub_hits > 65);
    CHECK(hub_hits < 135);

    CHECK_THROWS_AS(ego_2hop(Graph::edgeless(4), 1), InputError);
}

TEST_CASE("spec validation") {
    ScenarioSpec spec;
    spec.name = Scenario::Ia;
    spec.n = 1;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec.n = 10;
    spec.p_in = 1.5;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec.p_in = 0.5;
    CHECK_NOTHROW(spec.validate());
    spec.name = Scenario::IIa;
    spec.rows = 1;
    spec.cols = 1;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec.cols = 2;
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("mean-and-spread changes land on the right clusters") {
    ScenarioSpec spec;
    spec.name = Scenario::Ia;
    spec.clusters = 4;
    spec.nodes_per_cluster = 5;
    spec.n = 4000;
    spec.n_prime = 4000;
    spec.seed = 31;
    const LabeledInstance inst = generate(spec);

    REQUIRE(inst.samples.num_nodes() == 20);
    CHECK(inst.samples.dim() == 1);
    // Clusters 1 and 4 carry the change.
    std::vector<int> want = range_vec(0, 5);
    for (int v = 15; v < 20; ++v) want.push_back(v);
    CHECK(inst.affected == want);
    CHECK(std::is_sorted(inst.affected.begin(), inst.affected.end()));

    // Reference sample: standard normal at every node.
    const Matrix all_x = stack_nodes(inst.samples.X, range_vec(0, 20));
    CHECK(near(all_x.col(0).mean(), 0.0, 0.05));
    CHECK(near(variance(all_x, 0), 1.0, 0.08));

    // Cluster 1: uniform on (-sqrt3, sqrt3) -- mean 0, variance 1, bounded.
    const Matrix q1 = stack_nodes(inst.samples.Xp, range_vec(0, 5));
    CHECK(near(q1.col(0).mean(), 0.0, 0.05));
    CHECK(near(variance(q1, 0), 1.0, 0.08));
    CHECK(q1.cwiseAbs().maxCoeff() <= std::sqrt(3.0));

    // Middle clusters: unchanged standard normal (unbounded in practice).
    const Matrix q_mid = stack_nodes(inst.samples.Xp, range_vec(5, 15));
    CHECK(near(q_mid.col(0).mean(), 0.0, 0.05));
    CHECK(q_mid.cwiseAbs().maxCoeff() > std::sqrt(3.0));

    // Cluster 4: unit shift.
    const Matrix q4 = stack_nodes(inst.samples.Xp, range_vec(15, 20));
    CHECK(near(q4.col(0).mean(), 1.0, 0.05));
    CHECK(near(variance(q4, 0), 1.0, 0.08));
}

TEST_CASE("correlation changes land on the right clusters") {
    ScenarioSpec spec;
    spec.name = Scenario::Ib;
    spec.clusters = 4;
    spec.nodes_per_cluster = 5;
    spec.n = 4000;
    spec.n_prime = 4000;
    spec.seed = 77;
    const LabeledInstance inst = generate(spec);

    CHECK(inst.samples.dim() == 2);
    // Clusters 3 and 4 are affected.
    CHECK(inst.affected == range_vec(10, 20));

    // Reference correlations per cluster: -0.8, -0.8, +0.8, 0.
    const double tol = 0.03;
    CHECK(near(corr(stack_nodes(inst.samples.X, range_vec(0, 5)), 0, 1), -0.8, tol));
    CHECK(near(corr(stack_nodes(inst.samples.X, range_vec(5, 10)), 0, 1), -0.8, tol));
    CHECK(near(corr(stack_nodes(inst.samples.X, range_vec(10, 15)), 0, 1), 0.8, tol));
    CHECK(near(corr(stack_nodes(inst.samples.X, range_vec(15, 20)), 0, 1), 0.0, tol));

    // Comparison sample: clusters 1-2 keep their correlation, cluster 3
    // decorrelates, cluster 4 shifts its mean to (1,1).
    CHECK(near(corr(stack_nodes(inst.samples.Xp, range_vec(0, 10)), 0, 1), -0.8, tol));
    CHECK(near(corr(stack_nodes(inst.samples.Xp, range_vec(10, 15)), 0, 1), 0.0, tol));
    const Matrix q4 = stack_nodes(inst.samples.Xp, range_vec(15, 20));
    CHECK(near(q4.col(0).mean(), 1.0, 0.05));
    CHECK(near(q4.col(1).mean(), 1.0, 0.05));
    const Matrix q3 = stack_nodes(inst.samples.Xp, range_vec(10, 15));
    CHECK(near(q3.col(0).mean(), 0.0, 0.05));
}

TEST_CASE("localized decorrelation hits exactly the ego network") {
    ScenarioSpec spec;
    spec.name = Scenario::IIa;
    spec.rows = 4;
    spec.cols = 4;
    spec.n = 3000;
    spec.n_prime = 3000;
    spec.seed = 5;
    const LabeledInstance inst = generate(spec);

    CHECK(inst.samples.dim() == 3);
    CHECK(inst.graph.num_nodes() == 16);
    REQUIRE(!inst.affected.empty());

    // The affected set is a full 2-hop ball around one of its members.
    bool covered = false;
    for (int c : inst.affected) {
        const std::vector<int> dist = bfs_dist(inst.graph, c);
        std::vector<int> ball;
        for (int v = 0; v < 16; ++v)
            if (dist[v] >= 0 && dist[v] <= 2) ball.push_back(v);
        if (ball == inst.affected) covered = true;
    }
    CHECK(covered);

    const double tol = 0.06;
    for (int v = 0; v < 16; ++v) {
        CHECK(near(corr(inst.samples.X[v], 0, 1), 0.8, tol));
        CHECK(near(corr(inst.samples.X[v], 0, 2), 0.0, tol));
        const bool hit = std::find(inst.affected.begin(), inst.affected.end(),
                                   v) != inst.affected.end();
        CHECK(near(corr(inst.samples.Xp[v], 0, 1), hit ? 0.0 : 0.8, tol));
        // The third coordinate never couples.
        CHECK(near(corr(inst.samples.Xp[v], 1, 2), 0.0, tol));
    }
}

TEST_CASE("mixture change raises the per-coordinate variance to 15") {
    ScenarioSpec spec;
    spec.name = Scenario::IIb;
    spec.rows = 4;
    spec.cols = 4;
    spec.n = 4000;
    spec.n_prime = 4000;
    spec.seed = 9;
    const LabeledInstance inst = generate(spec);

    CHECK(inst.samples.dim() == 2);
    REQUIRE(!inst.affected.empty());
    for (int v = 0; v < 16; ++v) {
        const bool hit = std::find(inst.affected.begin(), inst.affected.end(),
                                   v) != inst.affected.end();
        // Reference: N(0, 10 I) everywhere.
        CHECK(near(variance(inst.samples.X[v], 0), 10.0, 1.2));
        // Comparison: mixture variance 5 + 10 = 15 per coordinate inside the
        // ego network, untouched outside.
        for (int c = 0; c < 2; ++c) {
            CHECK(near(variance(inst.samples.Xp[v], c), hit ? 15.0 : 10.0,
                       hit ? 2.0 : 1.2));
            CHECK(near(inst.samples.Xp[v].col(c).mean(), 0.0, hit ? 0.35 : 0.25));
        }
    }
}

TEST_CASE("null mode keeps both samples identically distributed") {
    for (Scenario name : {Scenario::Ia, Scenario::Ib, Scenario::IIa, Scenario::IIb}) {
        ScenarioSpec spec;
        spec.name = name;
        spec.clusters = 2;
        spec.nodes_per_cluster = 3;
        spec.rows = 3;
        spec.cols = 3;
        spec.n = 500;
        spec.n_prime = 500;
        spec.seed = 13;
        spec.null_mode = true;
        const LabeledInstance inst = generate(spec);
        CHECK(inst.affected.empty());
        CHECK(inst.samples.n() == 500);
    }

    // Null-mode IIb keeps the base variance on the comparison sample.
    ScenarioSpec spec;
    spec.name = Scenario::IIb;
    spec.rows = 3;
    spec.cols = 3;
    spec.n = 4000;
    spec.n_prime = 4000;
    spec.seed = 21;
    spec.null_mode = true;
    const LabeledInstance inst = generate(spec);
    for (int v = 0; v < 9; ++v)
        CHECK(near(variance(inst.samples.Xp[v], 0), 10.0, 1.2));
}

TEST_CASE("graph is frozen by the spec seed while data redraws per instance") {
    ScenarioSpec spec;
    spec.name = Scenario::Ib;
    spec.clusters = 3;
    spec.nodes_per_cluster = 4;
    spec.n = 20;
    spec.n_prime = 20;
    spec.seed = 55;

    const ScenarioGraph sg1 = scenario_graph(spec);
    const ScenarioGraph sg2 = scenario_graph(spec);
    CHECK(same_edges(sg1.graph, sg2.graph));
    CHECK(sg1.cluster == sg2.cluster);

    const LabeledInstance a = scenario_instance(sg1, spec, 100, false);
    const LabeledInstance b = scenario_instance(sg1, spec, 100, false);
    const LabeledInstance c = scenario_instance(sg1, spec, 101, false);
    REQUIRE(a.samples.num_nodes() == b.samples.num_nodes());
    for (int v = 0; v < a.samples.num_nodes(); ++v) {
        CHECK(a.samples.X[v] == b.samples.X[v]);
        CHECK(a.samples.Xp[v] == b.samples.Xp[v]);
    }
    CHECK(a.affected == b.affected);
    CHECK(a.samples.X[0] != c.samples.X[0]);

    // The data stream ignores the graph seed: a spec differing only in seed
    // produces the same samples for the same data seed. This is what lets a
    // benchmark fix the graph once and vary instances.
    ScenarioSpec other = spec;
    other.seed = 999;
    const LabeledInstance d = scenario_instance(sg1, other, 100, false);
    for (int v = 0; v < a.samples.num_nodes(); ++v)
        CHECK(a.samples.X[v] == d.samples.X[v]);

    // generate() is scenario_graph + scenario_instance at the spec seed.
    const LabeledInstance whole = generate(spec);
    const LabeledInstance manual = scenario_instance(sg1, spec, spec.seed, false);
    for (int v = 0; v < whole.samples.num_nodes(); ++v)
        CHECK(whole.samples.X[v] == manual.samples.X[v]);
    CHECK(whole.affected == manual.affected);
}
