#include "ctst/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>

#include "ctst/errors.hpp"
#include "ctst/mmd.hpp"
#include "ctst/parallel.hpp"
#include "ctst/random.hpp"

namespace ctst {

Method method_from_string(const std::string& name) {
    if (name == "ctst") return Method::Ctst;
    if (name == "pool") return Method::Pool;
    if (name == "rulsif") return Method::Rulsif;
    if (name == "ulsif") return Method::Ulsif;
    if (name == "mmd_median") return Method::MmdMedian;
    throw InputError("unknown method '" + name +
                     "' (expected ctst, pool, rulsif, ulsif or mmd_median)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Ctst: return "ctst";
        case Method::Pool: return "pool";
        case Method::Rulsif: return "rulsif";
        case Method::Ulsif: return "ulsif";
        case Method::MmdMedian: return "mmd_median";
    }
    throw InputError("unknown method enum value");
}

void RunConfig::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InputError("alpha must lie in [0,1)");
    if (n_perm < 1) throw InputError("n_perm must be at least 1");
    if (!(pi_star > 0.0 && pi_star < 1.0))
        throw InputError("pi_star must lie in (0,1)");
    if (anchors_max < 1) throw InputError("anchors_max must be at least 1");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (!(eigen_floor > 0.0)) throw InputError("eigen_floor must be positive");
    if (cv_folds < 2) throw InputError("cv_folds must be at least 2");
    if (threads < 0) throw InputError("threads must be non-negative");
    if (grid_override) grid_override->validate();
}

double empirical_quantile(const std::vector<double>& values, double level) {
    if (values.empty()) throw InputError("quantile of an empty list");
    if (!(level > 0.0 && level < 1.0))
        throw InputError("quantile level must lie in (0,1)");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const int m = static_cast<int>(sorted.size());
    int k = static_cast<int>(std::ceil(level * m));
    k = std::max(1, std::min(k, m));
    return sorted[k - 1];
}

TestResult max_stat_test(int num_nodes, int n, int n_prime, const NodeStatFn& fn,
                         RejectRule rule, int n_perm, double pi_star,
                         std::uint64_t seed, int threads) {
    if (num_nodes < 1) throw InputError("test needs at least one node");
    if (n < 1 || n_prime < 1)
        throw InputError("test needs at least one observation per sample");
    if (n_perm < 1) throw InputError("n_perm must be at least 1");
    if (!(pi_star > 0.0 && pi_star < 1.0))
        throw InputError("pi_star must lie in (0,1)");

    const bool symmetric = rule == RejectRule::SymmetricStrict;
    TestResult r;
    r.pi_star = pi_star;
    r.n_perm = n_perm;
    r.seed = seed;
    r.symmetric = symmetric;

    std::vector<int> obs_x(n), obs_xp(n_prime);
    std::iota(obs_x.begin(), obs_x.end(), 0);
    std::iota(obs_xp.begin(), obs_xp.end(), n);
    r.S.assign(num_nodes, 0.0);
    r.S_rev.assign(num_nodes, 0.0);
    fn(obs_x, obs_xp, r.S, r.S_rev);
    if (symmetric) r.S_rev = r.S;

    r.perm_max_forward.assign(n_perm, 0.0);
    r.perm_max_reverse.assign(n_perm, 0.0);
    parallel_for(0, n_perm, threads, [&](int i) {
        Rng rng(derive_seed(seed, streams::kPermBase + static_cast<std::uint64_t>(i)));
        const std::vector<int> tau = rng.permutation(n + n_prime);
        const std::vector<int> xr(tau.begin(), tau.begin() + n);
        const std::vector<int> xpr(tau.begin() + n, tau.end());
        std::vector<double> S(num_nodes), S_rev(num_nodes);
        fn(xr, xpr, S, S_rev);
        r.perm_max_forward[i] = *std::max_element(S.begin(), S.end());
        r.perm_max_reverse[i] =
            symmetric ? r.perm_max_forward[i]
                      : *std::max_element(S_rev.begin(), S_rev.end());
    });

    r.pi.assign(num_nodes, 0.0);
    r.pi_rev.assign(num_nodes, 0.0);
    for (int v = 0; v < num_nodes; ++v) {
        int cf = 0, cr = 0;
        for (int i = 0; i < n_perm; ++i) {
            if (r.S[v] <= r.perm_max_forward[i]) ++cf;
            if (r.S_rev[v] <= r.perm_max_reverse[i]) ++cr;
        }
        r.pi[v] = static_cast<double>(cf) / n_perm;
        r.pi_rev[v] = static_cast<double>(cr) / n_perm;
    }

    for (int v = 0; v < num_nodes; ++v) {
        bool rej = false;
        switch (rule) {
            case RejectRule::CollabBothDirections:
                rej = r.pi[v] <= pi_star / 2.0 || r.pi_rev[v] <= pi_star / 2.0;
                break;
            case RejectRule::DirectionalStrict:
                rej = r.pi[v] < pi_star / 2.0 || r.pi_rev[v] < pi_star / 2.0;
                break;
            case RejectRule::SymmetricStrict:
                rej = r.pi[v] < pi_star;
                break;
        }
        if (rej) r.rejected.push_back(v);
    }
    return r;
}

namespace {

// Everything the collaborative statistic closure needs, selected once on the
// observed data and then frozen across permutation replicates.
struct CollabModel {
    bool pool = false;
    double alpha = 0.1;
    double tol = 1e-6;
    int max_iter = 1000;
    Graph g_fit{Graph::edgeless(1)};
    CvResult cv1, cv2;
    FeatureCache cache1, cache2;
    bool shared_cache = false;

    const FeatureCache& reverse_cache() const {
        return shared_cache ? cache1 : cache2;
    }

    void stats(const std::vector<int>& x_rows, const std::vector<int>& xp_rows,
               std::vector<double>& S, std::vector<double>& S_rev) const {
        const int N = cache1.num_nodes();
        {
            const SufficientStats st = stats_from_rows(cache1, x_rows, xp_rows);
            const ThetaMatrix fit =
                pool ? pool_fit(st, cv1.best, tol, max_iter)
                     : grulsif_fit(g_fit, st, cv1.best, tol, max_iter);
            for (int v = 0; v < N; ++v)
                S[v] = pe_divergence_stat(fit.theta.row(v).transpose(), st.H[v],
                                          st.Hp[v], st.hp[v], alpha);
        }
        {
            const SufficientStats st =
                stats_from_rows(reverse_cache(), x_rows, xp_rows, /*reverse=*/true);
            const ThetaMatrix fit =
                pool ? pool_fit(st, cv2.best, tol, max_iter)
                     : grulsif_fit(g_fit, st, cv2.best, tol, max_iter);
            for (int v = 0; v < N; ++v)
                S_rev[v] = pe_divergence_stat(fit.theta.row(v).transpose(), st.H[v],
                                              st.Hp[v], st.hp[v], alpha);
        }
    }
};

CollabModel collab_setup(const Graph& g, const NodeSampleSet& samples,
                         const RunConfig& cfg) {
    cfg.validate();
    samples.validate();
    if (g.num_nodes() != samples.num_nodes())
        throw InputError("graph has " + std::to_string(g.num_nodes()) +
                         " nodes but samples cover " +
                         std::to_string(samples.num_nodes()));
    if (cfg.method != Method::Ctst && cfg.method != Method::Pool)
        throw InputError("collaborative setup requires method ctst or pool");

    CollabModel m;
    m.pool = cfg.method == Method::Pool;
    m.alpha = cfg.alpha;
    m.tol = cfg.tol;
    m.max_iter = cfg.max_iter;
    m.g_fit = m.pool ? Graph::edgeless(g.num_nodes()) : g;

    const Matrix anchors =
        select_anchors(samples.pooled(), cfg.anchors_max, 1.0,
                       derive_seed(cfg.seed, streams::kAnchors));

    const NodeSampleSet swapped = samples.swapped();
    HyperGrid grid1, grid2;
    if (cfg.grid_override) {
        grid1 = grid2 = *cfg.grid_override;
    } else if (m.pool) {
        grid1 = default_grid_pool(samples);
        grid2 = default_grid_pool(swapped);
    } else {
        grid1 = default_grid_grulsif(g, samples);
        grid2 = default_grid_grulsif(g, swapped);
    }

    m.cv1 = cv_select(m.g_fit, samples, anchors, grid1, cfg.alpha, cfg.cv_folds,
                      cfg.seed, cfg.eigen_floor, cfg.tol, cfg.max_iter,
                      cfg.threads);
    m.cv2 = cv_select(m.g_fit, swapped, anchors, grid2, cfg.alpha, cfg.cv_folds,
                      derive_seed(cfg.seed, streams::kCvFoldsRev),
                      cfg.eigen_floor, cfg.tol, cfg.max_iter, cfg.threads);

    const FeatureMap fm1 =
        build_feature_map(anchors, m.cv1.best.sigma, cfg.eigen_floor);
    m.cache1 = cache_features(fm1, samples);
    m.shared_cache = m.cv2.best.sigma == m.cv1.best.sigma;
    if (!m.shared_cache) {
        const FeatureMap fm2 =
            build_feature_map(anchors, m.cv2.best.sigma, cfg.eigen_floor);
        m.cache2 = cache_features(fm2, samples);
    }
    return m;
}

// Frozen per-node single-task models for both directions.
struct RulsifModel {
    double alpha = 0.0;
    std::vector<Hyperparams> hp1, hp2;
    std::vector<Matrix> psi1, psi2; // (n+n') x L_v feature rows per direction

    void stats(int n, const std::vector<int>& x_rows,
               const std::vector<int>& xp_rows, std::vector<double>& S,
               std::vector<double>& S_rev) const {
        const int N = static_cast<int>(psi1.size());
        for (int v = 0; v < N; ++v) {
            S[v] = one_direction(psi1[v], hp1[v], x_rows, xp_rows);
            S_rev[v] = one_direction(psi2[v], hp2[v], xp_rows, x_rows);
        }
        (void)n;
    }

    double one_direction(const Matrix& psi, const Hyperparams& hp,
                         const std::vector<int>& p_rows,
                         const std::vector<int>& q_rows) const {
        const int L = static_cast<int>(psi.cols());
        Matrix H = Matrix::Zero(L, L), Hq = Matrix::Zero(L, L);
        Vector hq = Vector::Zero(L);
        for (int j : p_rows)
            H.selfadjointView<Eigen::Lower>().rankUpdate(psi.row(j).transpose(),
                                                         1.0 / p_rows.size());
        for (int j : q_rows) {
            Hq.selfadjointView<Eigen::Lower>().rankUpdate(psi.row(j).transpose(),
                                                          1.0 / q_rows.size());
            hq += psi.row(j).transpose();
        }
        hq /= static_cast<double>(q_rows.size());
        H.triangularView<Eigen::StrictlyUpper>() =
            H.transpose().triangularView<Eigen::StrictlyUpper>();
        Hq.triangularView<Eigen::StrictlyUpper>() =
            Hq.transpose().triangularView<Eigen::StrictlyUpper>();
        Matrix A = (1.0 - alpha) * H + alpha * Hq;
        A.diagonal().array() += hp.gamma;
        Eigen::LLT<Matrix> llt(A);
        if (llt.info() != Eigen::Success)
            throw NumericalError("single-task system is not positive definite");
        const Vector theta = llt.solve(hq);
        return pe_divergence_stat(theta, H, Hq, hq, alpha);
    }
};

RulsifModel rulsif_setup(const NodeSampleSet& samples, const RunConfig& cfg) {
    cfg.validate();
    samples.validate();
    RulsifModel m;
    m.alpha = cfg.effective_alpha();
    const int N = samples.num_nodes();
    m.hp1.resize(N);
    m.hp2.resize(N);
    m.psi1.resize(N);
    m.psi2.resize(N);
    parallel_for(0, N, cfg.threads, [&](int v) {
        const std::uint64_t s1 =
            derive_seed(cfg.seed, streams::kRulsifNodeBase + 2 * v);
        const std::uint64_t s2 =
            derive_seed(cfg.seed, streams::kRulsifNodeBase + 2 * v + 1);
        m.hp1[v] = loocv_select_rulsif(samples.X[v], samples.Xp[v], m.alpha, s1);
        m.hp2[v] = loocv_select_rulsif(samples.Xp[v], samples.X[v], m.alpha, s2);
        // Rebuild the selected models with the same seeds so the frozen
        // anchors match the ones scored during selection.
        FeatureMap fm1, fm2;
        rulsif_fit_node(samples.X[v], samples.Xp[v], m.alpha, m.hp1[v].sigma,
                        m.hp1[v].gamma, 100, s1, &fm1);
        rulsif_fit_node(samples.Xp[v], samples.X[v], m.alpha, m.hp2[v].sigma,
                        m.hp2[v].gamma, 100, s2, &fm2);
        Matrix stacked(samples.n() + samples.n_prime(), samples.dim());
        stacked.topRows(samples.n()) = samples.X[v];
        stacked.bottomRows(samples.n_prime()) = samples.Xp[v];
        m.psi1[v] = fm1.apply_rows(stacked);
        m.psi2[v] = fm2.apply_rows(stacked);
    });
    return m;
}

} // namespace

TestResult ctst_test(const Graph& g, const NodeSampleSet& samples,
                     const RunConfig& cfg) {
    const CollabModel model = collab_setup(g, samples, cfg);
    const NodeStatFn fn = [&](const std::vector<int>& xr,
                              const std::vector<int>& xpr,
                              std::vector<double>& S, std::vector<double>& Sr) {
        model.stats(xr, xpr, S, Sr);
    };
    TestResult r =
        max_stat_test(g.num_nodes(), samples.n(), samples.n_prime(), fn,
                      RejectRule::CollabBothDirections, cfg.n_perm, cfg.pi_star,
                      cfg.seed, cfg.threads);
    r.method = method_name(cfg.method);
    r.hp_forward = model.cv1.best;
    r.hp_reverse = model.cv2.best;
    r.has_hyperparams = true;
    // One more observed-split fit per direction to expose the attained
    // objective (the permutation engine only keeps statistics).
    {
        std::vector<int> xr(samples.n()), xpr(samples.n_prime());
        std::iota(xr.begin(), xr.end(), 0);
        std::iota(xpr.begin(), xpr.end(), samples.n());
        const SufficientStats st1 = stats_from_rows(model.cache1, xr, xpr);
        const ThetaMatrix f1 =
            model.pool ? pool_fit(st1, model.cv1.best, cfg.tol, cfg.max_iter)
                       : grulsif_fit(model.g_fit, st1, model.cv1.best, cfg.tol,
                                     cfg.max_iter);
        r.objective_forward = f1.final_objective;
        const SufficientStats st2 =
            stats_from_rows(model.reverse_cache(), xr, xpr, /*reverse=*/true);
        const ThetaMatrix f2 =
            model.pool ? pool_fit(st2, model.cv2.best, cfg.tol, cfg.max_iter)
                       : grulsif_fit(model.g_fit, st2, model.cv2.best, cfg.tol,
                                     cfg.max_iter);
        r.objective_reverse = f2.final_objective;
    }
    return r;
}

TestResult baseline_max_test(const Graph& g, const NodeSampleSet& samples,
                             const NodeStatFn& fn, bool symmetric, int n_perm,
                             double pi_star, std::uint64_t seed, int threads) {
    samples.validate();
    if (g.num_nodes() != samples.num_nodes())
        throw InputError("graph/sample node counts disagree");
    return max_stat_test(g.num_nodes(), samples.n(), samples.n_prime(), fn,
                         symmetric ? RejectRule::SymmetricStrict
                                   : RejectRule::DirectionalStrict,
                         n_perm, pi_star, seed, threads);
}

TestResult rulsif_test(const Graph& g, const NodeSampleSet& samples,
                       const RunConfig& cfg) {
    if (cfg.method != Method::Rulsif && cfg.method != Method::Ulsif)
        throw InputError("rulsif_test requires method rulsif or ulsif");
    const RulsifModel model = rulsif_setup(samples, cfg);
    const int n = samples.n();
    const NodeStatFn fn = [&](const std::vector<int>& xr,
                              const std::vector<int>& xpr,
                              std::vector<double>& S, std::vector<double>& Sr) {
        model.stats(n, xr, xpr, S, Sr);
    };
    TestResult r = baseline_max_test(g, samples, fn, /*symmetric=*/false,
                                     cfg.n_perm, cfg.pi_star, cfg.seed,
                                     cfg.threads);
    r.method = method_name(cfg.method);
    return r;
}

TestResult mmd_test(const Graph& g, const NodeSampleSet& samples,
                    const RunConfig& cfg) {
    cfg.validate();
    samples.validate();
    const int N = samples.num_nodes();
    std::vector<MmdGram> grams(N);
    parallel_for(0, N, cfg.threads, [&](int v) {
        grams[v] = mmd_gram(samples.X[v], samples.Xp[v],
                            mmd_median_sigma(samples.X[v], samples.Xp[v]));
    });
    const NodeStatFn fn = [&](const std::vector<int>& xr,
                              const std::vector<int>& xpr,
                              std::vector<double>& S, std::vector<double>& Sr) {
        for (int v = 0; v < N; ++v) S[v] = mmd_from_gram(grams[v], xr, xpr);
        Sr = S;
    };
    TestResult r = baseline_max_test(g, samples, fn, /*symmetric=*/true,
                                     cfg.n_perm, cfg.pi_star, cfg.seed,
                                     cfg.threads);
    r.method = method_name(cfg.method);
    return r;
}

TestResult run_test(const Graph& g, const NodeSampleSet& samples,
                    const RunConfig& cfg) {
    switch (cfg.method) {
        case Method::Ctst:
        case Method::Pool:
            return ctst_test(g, samples, cfg);
        case Method::Rulsif:
        case Method::Ulsif:
            return rulsif_test(g, samples, cfg);
        case Method::MmdMedian:
            return mmd_test(g, samples, cfg);
    }
    throw InputError("unknown method enum value");
}

std::vector<double> node_statistics(const Graph& g, const NodeSampleSet& samples,
                                    const RunConfig& cfg) {
    cfg.validate();
    samples.validate();
    const int N = samples.num_nodes();
    const int n = samples.n();
    const int np = samples.n_prime();
    std::vector<int> obs_x(n), obs_xp(np);
    std::iota(obs_x.begin(), obs_x.end(), 0);
    std::iota(obs_xp.begin(), obs_xp.end(), n);
    std::vector<double> S(N), S_rev(N);

    switch (cfg.method) {
        case Method::Ctst:
        case Method::Pool: {
            const CollabModel model = collab_setup(g, samples, cfg);
            model.stats(obs_x, obs_xp, S, S_rev);
            break;
        }
        case Method::Rulsif:
        case Method::Ulsif: {
            const RulsifModel model = rulsif_setup(samples, cfg);
            model.stats(n, obs_x, obs_xp, S, S_rev);
            break;
        }
        case Method::MmdMedian: {
            parallel_for(0, N, cfg.threads, [&](int v) {
                S[v] = mmd_statistic(samples.X[v], samples.Xp[v],
                                     mmd_median_sigma(samples.X[v], samples.Xp[v]));
            });
            return S;
        }
    }
    for (int v = 0; v < N; ++v) S[v] = std::max(S[v], S_rev[v]);
    return S;
}

} // namespace ctst
