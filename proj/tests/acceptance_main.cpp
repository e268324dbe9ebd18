// End-to-end acceptance checks for the collaborative two-sample testing
// library. Each check prints one PASS/FAIL line with its measured numbers and
// the binary exits nonzero if any check fails. The benchmark-style checks
// take minutes and stream coarse progress to stderr.
//
// Usage: acceptance_tests [check-number ...]   (default: run all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ctst/config.hpp"
#include "ctst/estimators.hpp"
#include "ctst/evaluation.hpp"
#include "ctst/graph.hpp"
#include "ctst/kernel.hpp"
#include "ctst/model_selection.hpp"
#include "ctst/permutation.hpp"
#include "ctst/random.hpp"
#include "ctst/samples.hpp"
#include "ctst/scenarios.hpp"
#include "ctst/spatiotemporal.hpp"

using namespace ctst;

namespace {

bool g_all_pass = true;

std::string sfmt(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[1024];
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

void report(int k, bool pass, const char* name, const std::string& detail) {
    std::printf("[%d/10] %s %s: %s\n", k, pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) g_all_pass = false;
}

void progress(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
    std::fflush(stderr);
}

// ---------------------------------------------------------------------------
// 1. Family-wise error under the global null: with identical distributions at
// every node of a 5x5 lattice, the probability of rejecting anything must stay
// at the nominal level (0.05 plus three binomial standard errors of slack).

void check_fwer_control() {
    const Graph g = grid_graph(5, 5);
    const int reps = 200, n = 50;
    const std::uint64_t master = 4242;

    RunConfig cfg;
    cfg.method = Method::Ctst;
    cfg.alpha = 0.1;
    cfg.n_perm = 200;
    cfg.pi_star = 0.05;
    cfg.anchors_max = 16;
    cfg.cv_folds = 3;
    cfg.tol = 1e-5;
    cfg.max_iter = 500;
    cfg.threads = 1;
    HyperGrid grid;
    grid.sigmas = {1.0, 2.0};
    grid.gammas = {1e-3, 0.1};
    grid.lambdas = {0.1, 1.0};
    cfg.grid_override = grid;

    int false_rejections = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(master, 2 * static_cast<std::uint64_t>(r)));
        NodeSampleSet s;
        s.X.resize(static_cast<std::size_t>(g.num_nodes()));
        s.Xp.resize(static_cast<std::size_t>(g.num_nodes()));
        for (int v = 0; v < g.num_nodes(); ++v) {
            Matrix X(n, 1), Xp(n, 1);
            for (int i = 0; i < n; ++i) X(i, 0) = rng.normal();
            for (int i = 0; i < n; ++i) Xp(i, 0) = rng.normal();
            s.X[static_cast<std::size_t>(v)] = std::move(X);
            s.Xp[static_cast<std::size_t>(v)] = std::move(Xp);
        }
        cfg.seed = derive_seed(master, 2 * static_cast<std::uint64_t>(r) + 1);
        const TestResult res = run_test(g, s, cfg);
        if (!res.rejected.empty()) ++false_rejections;
        if ((r + 1) % 20 == 0)
            progress("  [1/10] replicate %d/%d, runs with a false rejection so far: %d",
                     r + 1, reps, false_rejections);
    }
    const double fwer = static_cast<double>(false_rejections) / reps;
    report(1, fwer <= 0.08, "family-wise error under the global null",
           sfmt("%d/%d replicates rejected at least one node (rate %.3f, limit 0.08)",
                false_rejections, reps, fwer));
}

// ---------------------------------------------------------------------------
// 2. Divergence value against numerical integration: the single-node ratio
// estimator (alpha = 0, 100 anchors, n = n' = 5000) on N(0,1) vs N(1,1) must
// land within 0.15 of the Pearson divergence computed by Simpson integration
// of (1/2) (q/p - 1)^2 p, whose closed form is (e - 1) / 2.

double simpson_pearson_divergence() {
    const double a = -12.0, b = 14.0;
    const int m = 26000; // even
    const double h = (b - a) / m;
    auto f = [](double x) {
        const double p = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        const double ratio = std::exp(x - 0.5); // N(1,1) density over N(0,1) density
        return 0.5 * (ratio - 1.0) * (ratio - 1.0) * p;
    };
    double s = f(a) + f(b);
    for (int i = 1; i < m; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

void check_divergence_oracle() {
    const double oracle = simpson_pearson_divergence();
    const double closed_form = (std::numbers::e - 1.0) / 2.0;
    const bool oracle_sane = std::abs(oracle - closed_form) < 1e-9;

    const int n = 5000;
    Rng rng(7919);
    Matrix X(n, 1), Xp(n, 1);
    for (int i = 0; i < n; ++i) X(i, 0) = rng.normal();
    for (int i = 0; i < n; ++i) Xp(i, 0) = 1.0 + rng.normal();
    Matrix pooled(2 * n, 1);
    pooled << X, Xp;
    const double sigma = 3.0 * median_heuristic(pooled);

    FeatureMap fm;
    const Vector theta = rulsif_fit_node(X, Xp, 0.0, sigma, 1e-5, 100, derive_seed(1, 1), &fm);
    const Matrix psi_x = fm.apply_rows(X), psi_q = fm.apply_rows(Xp);
    const Matrix H = psi_x.transpose() * psi_x / n;
    const Matrix Hp = psi_q.transpose() * psi_q / n;
    const Vector hp = psi_q.colwise().mean();
    const double estimate = pe_divergence_stat(theta, H, Hp, hp, 0.0);

    const double err = std::abs(estimate - oracle);
    report(2, oracle_sane && err <= 0.15, "divergence against numerical integration",
           sfmt("estimate %.4f vs integral %.6f (|err| %.4f, tol 0.15; integral vs closed form %.1e)",
                estimate, oracle, err, std::abs(oracle - closed_form)));
}

// ---------------------------------------------------------------------------
// 3. Block solver equivalence: on tiny instances the cyclic block solver must
// reach the same coefficients as one dense solve of the full stacked linear
// system (the first-order conditions of the joint objective).

void fill_random_stats(Rng& rng, int num_nodes, int L, int rows, SufficientStats& st) {
    st.n = st.n_prime = rows;
    st.H.clear();
    st.Hp.clear();
    st.hp.clear();
    for (int v = 0; v < num_nodes; ++v) {
        Matrix P(rows, L), Q(rows, L);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < L; ++j) P(i, j) = rng.normal();
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < L; ++j) Q(i, j) = rng.normal();
        st.H.push_back(P.transpose() * P / rows);
        st.Hp.push_back(Q.transpose() * Q / rows);
        st.hp.push_back(Q.colwise().mean());
    }
}

Graph random_graph(Rng& rng, int num_nodes, double edge_prob) {
    std::vector<Edge> edges;
    for (int u = 0; u < num_nodes; ++u)
        for (int v = u + 1; v < num_nodes; ++v)
            if (rng.uniform() < edge_prob) edges.push_back({u, v, rng.uniform(0.2, 2.0)});
    return Graph::build(num_nodes, edges);
}

void check_solver_equivalence() {
    Rng rng(31137);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int N = 1 + static_cast<int>(rng.uniform_int(3));
        const int L = 1 + static_cast<int>(rng.uniform_int(3));
        const Graph g = random_graph(rng, N, 0.7);
        SufficientStats st;
        fill_random_stats(rng, N, L, 8, st);
        Hyperparams hp;
        hp.alpha = rng.uniform(0.0, 0.9);
        hp.lambda = rng.uniform(0.05, 2.0);
        hp.gamma = rng.uniform(0.05, 2.0);
        hp.sigma = 1.0;

        const ThetaMatrix tm = grulsif_fit(g, st, hp, 1e-13, 50000);

        Matrix A = Matrix::Zero(N * L, N * L);
        Vector rhs = Vector::Zero(N * L);
        for (int v = 0; v < N; ++v) {
            A.block(v * L, v * L, L, L) =
                ((1.0 - hp.alpha) * st.H[static_cast<std::size_t>(v)] +
                 hp.alpha * st.Hp[static_cast<std::size_t>(v)]) / N +
                hp.lambda * (g.degree(v) + hp.gamma) * Matrix::Identity(L, L);
            for (const auto& [u, w] : g.neighbors(v))
                A.block(v * L, u * L, L, L) = -hp.lambda * w * Matrix::Identity(L, L);
            rhs.segment(v * L, L) = st.hp[static_cast<std::size_t>(v)] / N;
        }
        const Vector direct = A.ldlt().solve(rhs);
        for (int v = 0; v < N; ++v)
            for (int l = 0; l < L; ++l)
                worst = std::max(worst, std::abs(tm.theta(v, l) - direct(v * L + l)));
    }
    report(3, worst <= 1e-8, "block solver matches the dense stacked solve",
           sfmt("worst coefficient gap %.3e over 20 instances (tol 1e-8)", worst));
}

// ---------------------------------------------------------------------------
// 4. Objective monotonicity: every sweep of the block solver must not
// increase the joint objective (each block update is an exact minimization,
// so any rise beyond floating-point drift is a defect).

void check_objective_monotonicity() {
    Rng rng(41841);
    int violations = 0, sweeps = 0;
    double worst_rise = -1e300;
    for (int inst = 0; inst < 50; ++inst) {
        const int N = 2 + static_cast<int>(rng.uniform_int(5));
        const int L = 1 + static_cast<int>(rng.uniform_int(6));
        const int rows = 6 + static_cast<int>(rng.uniform_int(10));
        const Graph g = random_graph(rng, N, 0.5);
        SufficientStats st;
        fill_random_stats(rng, N, L, rows, st);
        Hyperparams hp;
        hp.alpha = rng.uniform(0.0, 0.9);
        hp.lambda = rng.uniform(0.01, 3.0);
        hp.gamma = rng.uniform(0.01, 3.0);
        hp.sigma = 1.0;

        std::vector<double> trace;
        grulsif_fit(g, st, hp, 1e-9, 400, &trace);
        for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
            const double rise = trace[i + 1] - trace[i];
            worst_rise = std::max(worst_rise, rise);
            if (rise > 1e-12 * std::max(1.0, std::abs(trace[i]))) ++violations;
            ++sweeps;
        }
    }
    report(4, violations == 0, "objective non-increasing at every sweep",
           sfmt("%d violations over %d sweeps in 50 instances (largest rise %.3e, allowance 1e-12)",
                violations, sweeps, worst_rise));
}

// ---------------------------------------------------------------------------
// Shared benchmark configuration for checks 5, 6 and 8. The grids are small
// absolute grids spanning the data scales of the synthetic scenarios
// (unit-variance, dimension 1-3), sized so a check finishes in minutes. The
// coupling-strength values sit around the degree-scaled defaults: stronger
// coupling than ~1/mean-degree over-smooths the per-node ratios and costs
// detection power on the clustered scenarios.

RunConfig bench_cfg(Method method, double alpha) {
    RunConfig cfg;
    cfg.method = method;
    cfg.alpha = alpha;
    cfg.n_perm = 200;
    cfg.pi_star = 0.05;
    cfg.anchors_max = 32;
    cfg.cv_folds = 3;
    cfg.tol = 1e-5;
    cfg.max_iter = 500;
    cfg.threads = 1;
    HyperGrid grid;
    grid.sigmas = {1.0, 2.0, 4.0};
    grid.gammas = {1e-3, 0.1};
    grid.lambdas = method == Method::Pool ? std::vector<double>{1.0}
                                          : std::vector<double>{0.005, 0.05, 0.5};
    cfg.grid_override = grid;
    return cfg;
}

BenchOutput timed_benchmark(const char* tag, const ScenarioSpec& spec, const RunConfig& cfg,
                            int num_null, int num_alt, std::uint64_t seed) {
    progress("  %s: %s on %d+%d instances...", tag, method_name(cfg.method).c_str(),
             num_null, num_alt);
    const BenchOutput out = run_benchmark(spec, cfg, num_null, num_alt, seed);
    progress("  %s: %s AFROC-AUC %.4f (ROC-AUC %.4f) in %.0f s", tag,
             method_name(cfg.method).c_str(), out.report.afroc_auc, out.report.roc_auc,
             out.report.runtime_seconds);
    return out;
}

// 5. Clustered-change benchmark: on a four-block stochastic block model where
// two blocks change (one decorrelates, one shifts), the collaborative method
// must detect well in absolute terms and beat its graph-free variant.

void check_sbm_benchmark() {
    ScenarioSpec spec;
    spec.name = Scenario::Ib;
    spec.n = spec.n_prime = 50;
    spec.clusters = 4;
    spec.nodes_per_cluster = 10;
    spec.p_in = 0.5;
    spec.p_out = 0.01;

    const BenchOutput ctst = timed_benchmark("[5/10]", spec, bench_cfg(Method::Ctst, 0.1),
                                             100, 100, 971);
    const BenchOutput pool = timed_benchmark("[5/10]", spec, bench_cfg(Method::Pool, 0.1),
                                             100, 100, 971);
    const double c = ctst.report.afroc_auc, p = pool.report.afroc_auc;
    report(5, c >= 0.85 && c >= p, "clustered-change detection benchmark",
           sfmt("collaborative AFROC-AUC %.4f (floor 0.85), graph-free %.4f", c, p));
}

// 6. Lattice-change benchmark: on a 6x6 lattice with a 2-hop ego-network
// change, the collaborative method must be at least as good as the graph-free
// variant.

void check_grid_benchmark() {
    ScenarioSpec spec;
    spec.name = Scenario::IIa;
    spec.n = spec.n_prime = 50;
    spec.rows = 6;
    spec.cols = 6;

    const BenchOutput ctst = timed_benchmark("[6/10]", spec, bench_cfg(Method::Ctst, 0.1),
                                             50, 50, 1303);
    const BenchOutput pool = timed_benchmark("[6/10]", spec, bench_cfg(Method::Pool, 0.1),
                                             50, 50, 1303);
    const double c = ctst.report.afroc_auc, p = pool.report.afroc_auc;
    report(6, c >= p, "lattice-change detection benchmark",
           sfmt("collaborative AFROC-AUC %.4f, graph-free %.4f", c, p));
}

// ---------------------------------------------------------------------------
// 7. Feature-map exactness: the whitened anchor features must reproduce the
// kernel exactly on the anchors themselves (psi(a_i)^T psi(a_j) = k(a_i,a_j)).

void check_feature_map_exactness() {
    Rng rng(2024);
    double worst = 0.0;
    for (int set = 0; set < 10; ++set) {
        const int d = 1 + static_cast<int>(rng.uniform_int(5));
        const int L = 2 + static_cast<int>(rng.uniform_int(127));
        Matrix anchors(L, d);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < d; ++j) anchors(i, j) = 2.0 * rng.normal();
        const double sigma = median_heuristic(anchors);
        const FeatureMap fm = build_feature_map(anchors, sigma);
        const Matrix psi = fm.apply_rows(anchors);
        const Matrix gram = psi * psi.transpose();
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j)
                worst = std::max(worst, std::abs(gram(i, j) - gaussian_kernel(anchors.row(i),
                                                                              anchors.row(j),
                                                                              sigma)));
    }
    report(7, worst <= 1e-6, "anchor features reproduce the kernel",
           sfmt("worst |psi^T psi - k| %.3e over 10 anchor sets up to 128 anchors (tol 1e-6)",
                worst));
}

// ---------------------------------------------------------------------------
// 8. Robustness to the relative-ratio parameter: on one fixed instance set
// (the instance stream depends only on the benchmark seed, not on the method
// configuration), the collaborative AFROC-AUC may move only a little across
// alpha in {0.01, 0.1, 0.5} and must stay above the graph-free variant.

void check_alpha_robustness() {
    ScenarioSpec spec;
    spec.name = Scenario::Ia;
    spec.n = spec.n_prime = 50;
    spec.clusters = 4;
    spec.nodes_per_cluster = 10;
    spec.p_in = 0.5;
    spec.p_out = 0.01;

    const std::vector<double> alphas = {0.01, 0.1, 0.5};
    std::vector<double> ctst_auc, pool_auc;
    for (double a : alphas) {
        ctst_auc.push_back(timed_benchmark("[8/10]", spec, bench_cfg(Method::Ctst, a),
                                           40, 40, 1733).report.afroc_auc);
        pool_auc.push_back(timed_benchmark("[8/10]", spec, bench_cfg(Method::Pool, a),
                                           40, 40, 1733).report.afroc_auc);
    }
    const double lo = *std::min_element(ctst_auc.begin(), ctst_auc.end());
    const double hi = *std::max_element(ctst_auc.begin(), ctst_auc.end());
    bool above_pool = true;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (ctst_auc[i] < pool_auc[i]) above_pool = false;
    report(8, hi - lo <= 0.25 && above_pool, "robustness to the relative-ratio parameter",
           sfmt("collaborative AFROC-AUC %.4f/%.4f/%.4f at alpha 0.01/0.1/0.5 "
                "(range %.4f, limit 0.25); graph-free %.4f/%.4f/%.4f",
                ctst_auc[0], ctst_auc[1], ctst_auc[2], hi - lo,
                pool_auc[0], pool_auc[1], pool_auc[2]));
}

// ---------------------------------------------------------------------------
// 9. Permutation law under exchangeability: when the pooled observation
// columns are exchangeable (an i.i.d. pool randomly shuffled into the two
// sample roles), the permutation distribution of the max statistic is the
// true law of the observed max, so its tail value at the observed statistic
// is approximately uniform on [0,1] over replicates.

void check_permutation_uniformity() {
    const Graph g = Graph::build(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
    const int n = 20, reps = 200;
    const std::uint64_t master = 2303;

    RunConfig cfg;
    cfg.method = Method::Ctst;
    cfg.alpha = 0.1;
    cfg.n_perm = 50;
    cfg.pi_star = 0.05;
    cfg.anchors_max = 12;
    cfg.cv_folds = 3;
    cfg.tol = 1e-4;
    cfg.max_iter = 300;
    cfg.threads = 1;
    HyperGrid grid;
    grid.sigmas = {1.0, 2.0};
    grid.gammas = {0.1};
    grid.lambdas = {1.0};
    cfg.grid_override = grid;

    std::vector<double> pvals;
    pvals.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        Rng rng(derive_seed(master, 2 * static_cast<std::uint64_t>(r)));
        NodeSampleSet base;
        base.X.resize(static_cast<std::size_t>(g.num_nodes()));
        base.Xp.resize(static_cast<std::size_t>(g.num_nodes()));
        for (int v = 0; v < g.num_nodes(); ++v) {
            Matrix X(n, 1), Xp(n, 1);
            for (int i = 0; i < n; ++i) X(i, 0) = rng.normal();
            for (int i = 0; i < n; ++i) Xp(i, 0) = rng.normal();
            base.X[static_cast<std::size_t>(v)] = std::move(X);
            base.Xp[static_cast<std::size_t>(v)] = std::move(Xp);
        }
        const std::vector<int> tau = rng.permutation(2 * n);
        const NodeSampleSet s = permute_columns(base, tau);

        cfg.seed = derive_seed(master, 2 * static_cast<std::uint64_t>(r) + 1);
        const TestResult res = run_test(g, s, cfg);
        const std::size_t vmax = static_cast<std::size_t>(
            std::max_element(res.S.begin(), res.S.end()) - res.S.begin());
        pvals.push_back(res.pi[vmax]);
        if ((r + 1) % 50 == 0) progress("  [9/10] replicate %d/%d", r + 1, reps);
    }

    std::sort(pvals.begin(), pvals.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < pvals.size(); ++i) {
        const double lo = static_cast<double>(i) / pvals.size();
        const double hi = static_cast<double>(i + 1) / pvals.size();
        ks = std::max(ks, std::max(pvals[i] - lo, hi - pvals[i]));
    }
    report(9, ks <= 0.15, "uniform permutation p-values under exchangeability",
           sfmt("KS distance from uniform %.4f over %d replicates (limit 0.15)", ks, reps));
}

// ---------------------------------------------------------------------------
// 10. Structural oracles, exhaustive at small size: the time-layered product
// graph must equal a brute-force construction (and its edge count the closed
// formula) for every base size up to 20 nodes, and the pooled ROC sweep must
// match direct enumeration, with its area equal to the tie-corrected rank-sum
// statistic.

void check_structural_oracles() {
    // Product-graph structure.
    Rng rng(55510);
    int graphs_checked = 0, structure_failures = 0;
    for (int N = 1; N <= 20; ++N) {
        std::vector<Graph> bases;
        bases.push_back(Graph::edgeless(N));
        std::vector<Edge> path_edges;
        for (int v = 0; v + 1 < N; ++v) path_edges.push_back({v, v + 1, 1.0});
        bases.push_back(Graph::build(N, path_edges));
        std::vector<Edge> complete_edges;
        for (int u = 0; u < N; ++u)
            for (int v = u + 1; v < N; ++v)
                complete_edges.push_back({u, v, rng.uniform(0.5, 2.0)});
        bases.push_back(Graph::build(N, complete_edges));
        bases.push_back(random_graph(rng, N, 0.4));
        bases.push_back(random_graph(rng, N, 0.4));

        for (const Graph& base : bases) {
            for (int T : {1, 2, 3, 5}) {
                const MultiplexGraph mg = build_multiplex(base, T);
                const std::size_t expected_count =
                    static_cast<std::size_t>(T) * base.edges().size() +
                    static_cast<std::size_t>(N) * static_cast<std::size_t>(T - 1);

                std::set<std::tuple<int, int, double>> expect;
                for (const Edge& e : base.edges())
                    for (int t = 0; t < T; ++t)
                        expect.insert({mg.node(e.u, t), mg.node(e.v, t), 1.0});
                for (int v = 0; v < N; ++v)
                    for (int t = 0; t + 1 < T; ++t)
                        expect.insert({mg.node(v, t), mg.node(v, t + 1), 1.0});
                std::set<std::tuple<int, int, double>> got;
                for (const Edge& e : mg.product.edges()) got.insert({e.u, e.v, e.w});

                if (mg.product.edges().size() != expected_count || got != expect)
                    ++structure_failures;
                ++graphs_checked;
            }
        }
    }

    // Pooled ROC: every emitted point re-counted directly, area compared to
    // the tie-corrected rank-sum probability.
    Rng rng2(55520);
    int point_failures = 0, curves_checked = 0;
    double worst_auc_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<AltRun> runs;
        const int instances = 1 + static_cast<int>(rng2.uniform_int(6));
        for (int k = 0; k < instances; ++k) {
            AltRun run;
            const int N = 2 + static_cast<int>(rng2.uniform_int(19));
            for (int v = 0; v < N; ++v) {
                // Half-integer values force plenty of ties across the pool.
                run.stats.push_back(static_cast<double>(rng2.uniform_int(9)) / 2.0 - 2.0);
                if (rng2.uniform() < 0.4) run.affected.push_back(v);
            }
            if (run.affected.empty())
                run.affected.push_back(static_cast<int>(rng2.uniform_int(N)));
            runs.push_back(std::move(run));
        }
        // Ensure both classes are present in the pool.
        bool any_negative = false;
        for (const AltRun& run : runs)
            if (run.affected.size() < run.stats.size()) any_negative = true;
        if (!any_negative) runs[0].affected.erase(runs[0].affected.begin());
        if (runs[0].affected.empty()) runs[0].affected.push_back(0);

        std::vector<double> pos, neg;
        for (const AltRun& run : runs) {
            std::vector<char> hot(run.stats.size(), 0);
            for (int v : run.affected) hot[static_cast<std::size_t>(v)] = 1;
            for (std::size_t v = 0; v < run.stats.size(); ++v)
                (hot[v] ? pos : neg).push_back(run.stats[v]);
        }

        const std::vector<CurvePoint> curve = roc_curve(runs);
        for (const CurvePoint& pt : curve) {
            std::size_t fp = 0, tp = 0;
            for (double s : neg)
                if (s > pt.threshold) ++fp;
            for (double s : pos)
                if (s > pt.threshold) ++tp;
            if (pt.x != static_cast<double>(fp) / neg.size() ||
                pt.y != static_cast<double>(tp) / pos.size())
                ++point_failures;
        }
        // Every distinct pooled value must appear as a threshold, plus the
        // two infinite endpoints.
        std::set<double> distinct(pos.begin(), pos.end());
        distinct.insert(neg.begin(), neg.end());
        if (curve.size() != distinct.size() + 2) ++point_failures;

        double rank_sum = 0.0;
        for (double p : pos)
            for (double q : neg) rank_sum += (p > q) ? 1.0 : (p == q ? 0.5 : 0.0);
        rank_sum /= static_cast<double>(pos.size()) * static_cast<double>(neg.size());
        worst_auc_gap = std::max(worst_auc_gap, std::abs(roc_auc(curve) - rank_sum));
        ++curves_checked;
    }

    const bool pass = structure_failures == 0 && point_failures == 0 && worst_auc_gap <= 1e-12;
    report(10, pass, "product-graph and pooled-ROC structure",
           sfmt("%d product graphs exact (%d failures); %d ROC curves re-enumerated "
                "(%d point failures, worst area vs rank-sum gap %.3e, tol 1e-12)",
                graphs_checked, structure_failures, curves_checked, point_failures,
                worst_auc_gap));
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto want = [&](int k) { return wanted.empty() || wanted.count(k) > 0; };

    const auto t0 = std::chrono::steady_clock::now();
    if (want(1)) check_fwer_control();
    if (want(2)) check_divergence_oracle();
    if (want(3)) check_solver_equivalence();
    if (want(4)) check_objective_monotonicity();
    if (want(5)) check_sbm_benchmark();
    if (want(6)) check_grid_benchmark();
    if (want(7)) check_feature_map_exactness();
    if (want(8)) check_alpha_robustness();
    if (want(9)) check_permutation_uniformity();
    if (want(10)) check_structural_oracles();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::printf("%s (%.0f s total)\n", g_all_pass ? "all checks passed" : "SOME CHECKS FAILED",
                elapsed);
    return g_all_pass ? 0 : 1;
}
