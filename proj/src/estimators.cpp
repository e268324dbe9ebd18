#include "ctst/estimators.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "ctst/errors.hpp"
#include "ctst/random.hpp"

namespace ctst {

void Hyperparams::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw InputError("alpha must lie in [0,1)");
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    if (!(sigma > 0.0)) throw InputError("sigma must be positive");
}

namespace {

// Mean outer product (1/m) sum psi_i psi_i^T, exactly symmetric.
Matrix mean_outer(const Matrix& rows) {
    const int L = static_cast<int>(rows.cols());
    Matrix H = Matrix::Zero(L, L);
    H.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose(),
                                                 1.0 / rows.rows());
    H.triangularView<Eigen::StrictlyUpper>() =
        H.transpose().triangularView<Eigen::StrictlyUpper>();
    return H;
}

Matrix gather_rows(const Matrix& src, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), src.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = src.row(rows[i]);
    return out;
}

} // namespace

SufficientStats compute_sufficient_stats(const FeatureMap& fm,
                                         const NodeSampleSet& samples) {
    samples.validate();
    if (samples.dim() != fm.dim())
        throw InputError("sample dimension " + std::to_string(samples.dim()) +
                         " does not match feature-map dimension " +
                         std::to_string(fm.dim()));
    const int N = samples.num_nodes();
    SufficientStats st;
    st.n = samples.n();
    st.n_prime = samples.n_prime();
    st.H.reserve(N);
    st.Hp.reserve(N);
    st.hp.reserve(N);
    for (int v = 0; v < N; ++v) {
        const Matrix psi_x = fm.apply_rows(samples.X[v]);
        const Matrix psi_xp = fm.apply_rows(samples.Xp[v]);
        st.H.push_back(mean_outer(psi_x));
        st.Hp.push_back(mean_outer(psi_xp));
        st.hp.push_back(psi_xp.colwise().mean().transpose());
    }
    return st;
}

FeatureCache cache_features(const FeatureMap& fm, const NodeSampleSet& samples) {
    samples.validate();
    const int N = samples.num_nodes();
    FeatureCache cache;
    cache.n = samples.n();
    cache.n_prime = samples.n_prime();
    cache.psi.reserve(N);
    for (int v = 0; v < N; ++v) {
        Matrix psi(cache.n + cache.n_prime, fm.size());
        psi.topRows(cache.n) = fm.apply_rows(samples.X[v]);
        psi.bottomRows(cache.n_prime) = fm.apply_rows(samples.Xp[v]);
        cache.psi.push_back(std::move(psi));
    }
    return cache;
}

SufficientStats stats_from_rows(const FeatureCache& cache,
                                const std::vector<int>& x_rows,
                                const std::vector<int>& xp_rows, bool reverse) {
    if (x_rows.empty() || xp_rows.empty())
        throw InputError("both row sets must be non-empty");
    const std::vector<int>& p_rows = reverse ? xp_rows : x_rows;
    const std::vector<int>& q_rows = reverse ? x_rows : xp_rows;
    SufficientStats st;
    st.n = static_cast<int>(p_rows.size());
    st.n_prime = static_cast<int>(q_rows.size());
    const int N = cache.num_nodes();
    st.H.reserve(N);
    st.Hp.reserve(N);
    st.hp.reserve(N);
    for (int v = 0; v < N; ++v) {
        const Matrix px = gather_rows(cache.psi[v], p_rows);
        const Matrix qx = gather_rows(cache.psi[v], q_rows);
        st.H.push_back(mean_outer(px));
        st.Hp.push_back(mean_outer(qx));
        st.hp.push_back(qx.colwise().mean().transpose());
    }
    return st;
}

double objective_value(const Graph& g, const SufficientStats& stats,
                       const Hyperparams& hp, const Matrix& theta) {
    const int N = stats.num_nodes();
    if (theta.rows() != N || g.num_nodes() != N)
        throw InputError("theta/stats/graph node counts disagree");
    double fit = 0.0;
    double ridge = 0.0;
    for (int v = 0; v < N; ++v) {
        const auto th = theta.row(v).transpose();
        fit += 0.5 * (1.0 - hp.alpha) * th.dot(stats.H[v] * th) +
               0.5 * hp.alpha * th.dot(stats.Hp[v] * th) - stats.hp[v].dot(th);
        ridge += th.squaredNorm();
    }
    double smooth = 0.0;
    for (const Edge& e : g.edges())
        smooth += e.w * (theta.row(e.u) - theta.row(e.v)).squaredNorm();
    // Edge iteration covers each unordered pair once; the pairwise sum in the
    // objective counts both (u,v) and (v,u), hence lambda/4 * 2 = lambda/2.
    return fit / N + 0.5 * hp.lambda * smooth + 0.5 * hp.lambda * hp.gamma * ridge;
}

namespace {

Matrix block_matrix(int v, int N, const SufficientStats& stats,
                    const Hyperparams& hp, double degree) {
    const int L = stats.dim();
    Matrix A = ((1.0 - hp.alpha) * stats.H[v] + hp.alpha * stats.Hp[v]) / N;
    A.diagonal().array() += hp.lambda * (degree + hp.gamma);
    return A;
}

Vector block_rhs(int v, int N, const Graph& g, const SufficientStats& stats,
                 const Hyperparams& hp, const Matrix& theta) {
    Vector b = stats.hp[v] / N;
    for (const auto& [u, w] : g.neighbors(v))
        b += hp.lambda * w * theta.row(u).transpose();
    return b;
}

} // namespace

Vector block_update(int v, const Graph& g, const SufficientStats& stats,
                    const Hyperparams& hp, const Matrix& theta) {
    hp.validate();
    const int N = stats.num_nodes();
    const Matrix A = block_matrix(v, N, stats, hp, g.degree(v));
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success)
        throw NumericalError("block system at node " + std::to_string(v) +
                             " is not positive definite");
    return llt.solve(block_rhs(v, N, g, stats, hp, theta));
}

ThetaMatrix grulsif_fit(const Graph& g, const SufficientStats& stats,
                        const Hyperparams& hp, double tol, int max_iter,
                        std::vector<double>* objective_trace) {
    hp.validate();
    const int N = stats.num_nodes();
    if (g.num_nodes() != N)
        throw InputError("graph has " + std::to_string(g.num_nodes()) +
                         " nodes but stats cover " + std::to_string(N));
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    const int L = stats.dim();

    // A_v depends only on the stats and hyperparameters, so factor once.
    std::vector<Eigen::LLT<Matrix>> llt;
    llt.reserve(N);
    for (int v = 0; v < N; ++v) {
        llt.emplace_back(block_matrix(v, N, stats, hp, g.degree(v)));
        if (llt.back().info() != Eigen::Success)
            throw NumericalError("block system at node " + std::to_string(v) +
                                 " is not positive definite");
    }

    ThetaMatrix result;
    result.hp = hp;
    result.theta = Matrix::Zero(N, L);
    Matrix& theta = result.theta;

    int sweep = 0;
    bool converged = false;
    while (sweep < max_iter && !converged) {
        ++sweep;
        double max_rel = 0.0;
        for (int v = 0; v < N; ++v) {
            const double old_norm = theta.row(v).norm();
            const Vector b = block_rhs(v, N, g, stats, hp, theta);
            const Vector nv = llt[v].solve(b);
            const double change = (nv - theta.row(v).transpose()).norm();
            max_rel = std::max(max_rel, change / (1.0 + old_norm));
            theta.row(v) = nv.transpose();
        }
        if (!theta.allFinite())
            throw NumericalError("non-finite coefficients during block descent");
        if (objective_trace)
            objective_trace->push_back(objective_value(g, stats, hp, theta));
        converged = max_rel < tol;
    }
    result.converged = converged;
    result.iterations = sweep;
    result.final_objective = objective_value(g, stats, hp, theta);
    if (!std::isfinite(result.final_objective))
        throw NumericalError("objective is not finite at the fitted point");
    return result;
}

ThetaMatrix pool_fit(const SufficientStats& stats, const Hyperparams& hp,
                     double tol, int max_iter) {
    hp.validate();
    (void)tol;
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    const int N = stats.num_nodes();
    const int L = stats.dim();
    const Graph g = Graph::edgeless(N);

    ThetaMatrix result;
    result.hp = hp;
    result.theta = Matrix::Zero(N, L);
    // No coupling: each block minimizer is exact in one solve.
    for (int v = 0; v < N; ++v) {
        Eigen::LLT<Matrix> llt(block_matrix(v, N, stats, hp, 0.0));
        if (llt.info() != Eigen::Success)
            throw NumericalError("block system at node " + std::to_string(v) +
                                 " is not positive definite");
        result.theta.row(v) = llt.solve(stats.hp[v] / N).transpose();
    }
    if (!result.theta.allFinite())
        throw NumericalError("non-finite coefficients in decoupled fit");
    result.converged = true;
    result.iterations = 1;
    result.final_objective = objective_value(g, stats, hp, result.theta);
    return result;
}

Vector rulsif_fit_node(const Matrix& X, const Matrix& Xp, double alpha,
                       double sigma, double gamma, int L_max,
                       std::uint64_t seed, FeatureMap* fm_out) {
    if (X.rows() < 1 || Xp.rows() < 1)
        throw InputError("rulsif needs at least one observation per sample");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw InputError("alpha must lie in [0,1)");
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");

    const Matrix anchors = select_anchors(
        Xp, std::min<int>(L_max, static_cast<int>(Xp.rows())), sigma, seed);
    const FeatureMap fm = build_feature_map(anchors, sigma);
    const Matrix psi_x = fm.apply_rows(X);
    const Matrix psi_xp = fm.apply_rows(Xp);
    Matrix A = (1.0 - alpha) * mean_outer(psi_x) + alpha * mean_outer(psi_xp);
    A.diagonal().array() += gamma;
    const Vector hp = psi_xp.colwise().mean().transpose();

    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success)
        throw NumericalError("single-task system is not positive definite");
    if (fm_out) *fm_out = fm;
    return llt.solve(hp);
}

double pe_divergence_stat(const Vector& theta_v, const Matrix& H,
                          const Matrix& Hp, const Vector& hp, double alpha) {
    return hp.dot(theta_v) -
           0.5 * (1.0 - alpha) * theta_v.dot(H * theta_v) -
           0.5 * alpha * theta_v.dot(Hp * theta_v) - 0.5;
}

} // namespace ctst
