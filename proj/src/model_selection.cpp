#include "ctst/model_selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "ctst/errors.hpp"
#include "ctst/parallel.hpp"
#include "ctst/random.hpp"

namespace ctst {

void HyperGrid::validate() const {
    if (sigmas.empty() || gammas.empty() || lambdas.empty())
        throw InputError("hyperparameter grid has an empty axis");
    for (double s : sigmas)
        if (!(s > 0.0)) throw InputError("grid sigma must be positive");
    for (double g : gammas)
        if (!(g > 0.0)) throw InputError("grid gamma must be positive");
    for (double l : lambdas)
        if (!(l > 0.0)) throw InputError("grid lambda must be positive");
}

namespace {

std::vector<double> sigma_grid_from_nodes(const NodeSampleSet& samples) {
    const int N = samples.num_nodes();
    std::vector<double> per_node(N);
    for (int v = 0; v < N; ++v) per_node[v] = median_heuristic(samples.X[v]);
    std::sort(per_node.begin(), per_node.end());
    const double lo = per_node.front();
    const double hi = per_node.back();
    const double med = N % 2 == 1 ? per_node[N / 2]
                                  : 0.5 * (per_node[N / 2 - 1] + per_node[N / 2]);
    std::vector<double> grid = {lo, 0.5 * (lo + med), med, 0.5 * (med + hi), hi};
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

const std::vector<double> kGammaGrid = {1e-5, 1e-3, 0.1, 1.0};
const std::vector<double> kLambdaGrid = {1e-3, 1e-2, 0.1, 1.0, 10.0};

} // namespace

HyperGrid default_grid_grulsif(const Graph& g, const NodeSampleSet& samples) {
    samples.validate();
    HyperGrid grid;
    grid.sigmas = sigma_grid_from_nodes(samples);
    grid.gammas = kGammaGrid;
    const double dbar = g.mean_degree();
    grid.lambdas = kLambdaGrid;
    if (dbar > 0.0)
        for (double& l : grid.lambdas) l /= dbar;
    return grid;
}

HyperGrid default_grid_pool(const NodeSampleSet& samples) {
    samples.validate();
    HyperGrid grid;
    grid.sigmas = sigma_grid_from_nodes(samples);
    grid.gammas = kGammaGrid;
    grid.lambdas = {1.0};
    return grid;
}

namespace {

// Mean over nodes of the quadratic fit criterion at held-out statistics.
double heldout_score(const SufficientStats& st, const Matrix& theta,
                     double alpha) {
    const int N = st.num_nodes();
    double score = 0.0;
    for (int v = 0; v < N; ++v) {
        const auto th = theta.row(v).transpose();
        score += 0.5 * (1.0 - alpha) * th.dot(st.H[v] * th) +
                 0.5 * alpha * th.dot(st.Hp[v] * th) - st.hp[v].dot(th);
    }
    return score / N;
}

// Contiguous chunks of a shuffled index list; the first (count % folds)
// chunks carry one extra element.
std::vector<std::vector<int>> split_folds(std::vector<int> idx, int folds) {
    std::vector<std::vector<int>> out(folds);
    const int count = static_cast<int>(idx.size());
    const int base = count / folds;
    int pos = 0;
    for (int f = 0; f < folds; ++f) {
        const int len = base + (f < count % folds ? 1 : 0);
        out[f].assign(idx.begin() + pos, idx.begin() + pos + len);
        pos += len;
    }
    return out;
}

} // namespace

CvResult cv_select(const Graph& g, const NodeSampleSet& samples,
                   const Matrix& anchors, const HyperGrid& grid, double alpha,
                   int folds, std::uint64_t seed, double eigen_floor, double tol,
                   int max_iter, int threads) {
    samples.validate();
    grid.validate();
    if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
    const int N = samples.num_nodes();
    const int n = samples.n();
    const int np = samples.n_prime();
    if (n < folds || np < folds)
        throw InputError("every node needs at least " + std::to_string(folds) +
                         " observations per sample for " + std::to_string(folds) +
                         "-fold cross-validation");

    HyperGrid sorted = grid;
    for (auto* axis : {&sorted.sigmas, &sorted.gammas, &sorted.lambdas}) {
        std::sort(axis->begin(), axis->end());
        axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
    }

    // Per-node fold membership, expressed as pooled-row indices
    // (X row j -> j, X' row j -> n + j) so stats assemble off a FeatureCache.
    Rng rng(derive_seed(seed, streams::kCvFolds));
    std::vector<std::vector<std::vector<int>>> fold_x(N), fold_xp(N);
    for (int v = 0; v < N; ++v) {
        fold_x[v] = split_folds(rng.permutation(n), folds);
        fold_xp[v] = split_folds(rng.permutation(np), folds);
        for (auto& f : fold_xp[v])
            for (int& j : f) j += n;
    }

    struct GridEval {
        Hyperparams hp;
        double score;
    };
    std::vector<GridEval> evals;

    for (double sigma : sorted.sigmas) {
        const FeatureMap fm = build_feature_map(anchors, sigma, eigen_floor);
        const FeatureCache cache = cache_features(fm, samples);

        // Train/held-out stats per fold, assembled once and reused by every
        // (gamma, lambda) pair at this sigma.
        std::vector<SufficientStats> train(folds), held(folds);
        for (int f = 0; f < folds; ++f) {
            SufficientStats tr, he;
            tr.H.resize(N); tr.Hp.resize(N); tr.hp.resize(N);
            he.H.resize(N); he.Hp.resize(N); he.hp.resize(N);
            for (int v = 0; v < N; ++v) {
                std::vector<int> tr_x, tr_xp;
                for (int o = 0; o < folds; ++o) {
                    if (o == f) continue;
                    tr_x.insert(tr_x.end(), fold_x[v][o].begin(), fold_x[v][o].end());
                    tr_xp.insert(tr_xp.end(), fold_xp[v][o].begin(), fold_xp[v][o].end());
                }
                FeatureCache one;
                one.psi = {cache.psi[v]};
                one.n = n; one.n_prime = np;
                SufficientStats stv = stats_from_rows(one, tr_x, tr_xp);
                tr.H[v] = std::move(stv.H[0]);
                tr.Hp[v] = std::move(stv.Hp[0]);
                tr.hp[v] = std::move(stv.hp[0]);
                tr.n = stv.n; tr.n_prime = stv.n_prime;
                SufficientStats shv = stats_from_rows(one, fold_x[v][f], fold_xp[v][f]);
                he.H[v] = std::move(shv.H[0]);
                he.Hp[v] = std::move(shv.Hp[0]);
                he.hp[v] = std::move(shv.hp[0]);
                he.n = shv.n; he.n_prime = shv.n_prime;
            }
            train[f] = std::move(tr);
            held[f] = std::move(he);
        }

        const int nl = static_cast<int>(sorted.lambdas.size());
        const int combos = static_cast<int>(sorted.gammas.size()) * nl;
        std::vector<GridEval> sigma_evals(combos);
        parallel_for(0, combos, threads, [&](int c) {
            const double gamma = sorted.gammas[c / nl];
            const double lambda = sorted.lambdas[c % nl];
            Hyperparams hp{alpha, lambda, gamma, sigma};
            double score = 0.0;
            for (int f = 0; f < folds; ++f) {
                const ThetaMatrix fit =
                    grulsif_fit(g, train[f], hp, tol, max_iter);
                score += heldout_score(held[f], fit.theta, alpha);
            }
            sigma_evals[c] = {hp, score / folds};
        });
        evals.insert(evals.end(), sigma_evals.begin(), sigma_evals.end());
    }

    // Argmin with deterministic tie-breaking: smaller gamma, then lambda,
    // then sigma.
    const GridEval* best = &evals.front();
    for (const GridEval& e : evals) {
        if (e.score < best->score) {
            best = &e;
        } else if (e.score == best->score) {
            const auto key = [](const GridEval& x) {
                return std::array<double, 3>{x.hp.gamma, x.hp.lambda, x.hp.sigma};
            };
            if (key(e) < key(*best)) best = &e;
        }
    }

    CvResult result;
    result.best = best->hp;
    result.best_score = best->score;
    result.folds = folds;
    result.scores.reserve(evals.size());
    for (const GridEval& e : evals) result.scores.push_back({e.hp, e.score});
    return result;
}

Hyperparams loocv_select_rulsif(const Matrix& X, const Matrix& Xp, double alpha,
                                std::uint64_t seed, int L_max) {
    const int n = static_cast<int>(X.rows());
    const int np = static_cast<int>(Xp.rows());
    if (n < 2 || np < 2)
        throw InputError("leave-one-out selection needs at least 2 observations per sample");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw InputError("alpha must lie in [0,1)");

    const double sigma_med = median_heuristic(Xp);
    const std::vector<double> sigma_mult = {0.6, 0.8, 1.0, 1.2, 1.4};
    const std::vector<double> gamma_grid = {1e-5, 1e-3, 0.1, 10.0};
    const int pairs = std::min(n, np);

    double best_score = 0.0;
    Hyperparams best;
    bool have_best = false;

    for (double mult : sigma_mult) {
        const double sigma = mult * sigma_med;
        const Matrix anchors =
            select_anchors(Xp, std::min<int>(L_max, np), sigma, seed);
        const FeatureMap fm = build_feature_map(anchors, sigma);
        const Matrix psi_x = fm.apply_rows(X);
        const Matrix psi_xp = fm.apply_rows(Xp);
        const int L = fm.size();

        // Full-data sums; each leave-one-out system is a downdate of these.
        Matrix Sx = Matrix::Zero(L, L), Sxp = Matrix::Zero(L, L);
        Sx.selfadjointView<Eigen::Lower>().rankUpdate(psi_x.transpose());
        Sxp.selfadjointView<Eigen::Lower>().rankUpdate(psi_xp.transpose());
        Sx.triangularView<Eigen::StrictlyUpper>() =
            Sx.transpose().triangularView<Eigen::StrictlyUpper>();
        Sxp.triangularView<Eigen::StrictlyUpper>() =
            Sxp.transpose().triangularView<Eigen::StrictlyUpper>();
        const Vector sxp = psi_xp.colwise().sum().transpose();

        for (double gamma : gamma_grid) {
            double score = 0.0;
            for (int i = 0; i < pairs; ++i) {
                const Vector pi = psi_x.row(i).transpose();
                const Vector qi = psi_xp.row(i).transpose();
                Matrix A = (1.0 - alpha) * (Sx - pi * pi.transpose()) / (n - 1) +
                           alpha * (Sxp - qi * qi.transpose()) / (np - 1);
                A.diagonal().array() += gamma;
                Eigen::LLT<Matrix> llt(A);
                if (llt.info() != Eigen::Success)
                    throw NumericalError("leave-one-out system is not positive definite");
                const Vector theta = llt.solve((sxp - qi) / (np - 1));
                const double fp = pi.dot(theta);
                const double fq = qi.dot(theta);
                score += 0.5 * (1.0 - alpha) * fp * fp + 0.5 * alpha * fq * fq - fq;
            }
            score /= pairs;
            if (!have_best || score < best_score ||
                (score == best_score &&
                 std::array<double, 2>{gamma, sigma} <
                     std::array<double, 2>{best.gamma, best.sigma})) {
                have_best = true;
                best_score = score;
                best = Hyperparams{alpha, 1.0, gamma, sigma};
            }
        }
    }
    return best;
}

} // namespace ctst
