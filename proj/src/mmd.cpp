#include "ctst/mmd.hpp"

#include <cmath>
#include <string>

#include "ctst/errors.hpp"

namespace ctst {

namespace {

Matrix pooled_rows(const Matrix& X, const Matrix& Xp) {
    if (X.cols() != Xp.cols())
        throw InputError("samples have dimensions " + std::to_string(X.cols()) +
                         " and " + std::to_string(Xp.cols()));
    Matrix Z(X.rows() + Xp.rows(), X.cols());
    Z.topRows(X.rows()) = X;
    Z.bottomRows(Xp.rows()) = Xp;
    return Z;
}

} // namespace

double mmd_median_sigma(const Matrix& X, const Matrix& Xp) {
    return median_heuristic(pooled_rows(X, Xp));
}

MmdGram mmd_gram(const Matrix& X, const Matrix& Xp, double sigma) {
    if (!(sigma > 0.0)) throw InputError("kernel width must be positive");
    const Matrix Z = pooled_rows(X, Xp);
    const int m = static_cast<int>(Z.rows());
    MmdGram gram;
    gram.sigma = sigma;
    gram.K.resize(m, m);
    const double inv = -1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < m; ++i) {
        gram.K(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            const double k = std::exp(inv * (Z.row(i) - Z.row(j)).squaredNorm());
            gram.K(i, j) = gram.K(j, i) = k;
        }
    }
    return gram;
}

double mmd_from_gram(const MmdGram& gram, const std::vector<int>& x_idx,
                     const std::vector<int>& xp_idx) {
    const int n = static_cast<int>(x_idx.size());
    const int m = static_cast<int>(xp_idx.size());
    if (n < 2 || m < 2)
        throw InputError("the unbiased MMD estimate needs at least 2 points per sample");
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) xx += gram.K(x_idx[i], x_idx[j]);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) yy += gram.K(xp_idx[i], xp_idx[j]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) xy += gram.K(x_idx[i], xp_idx[j]);
    return 2.0 * xx / (static_cast<double>(n) * (n - 1)) +
           2.0 * yy / (static_cast<double>(m) * (m - 1)) -
           2.0 * xy / (static_cast<double>(n) * m);
}

double mmd_statistic(const Matrix& X, const Matrix& Xp, double sigma) {
    const int n = static_cast<int>(X.rows());
    const int m = static_cast<int>(Xp.rows());
    if (n < 2 || m < 2)
        throw InputError("the unbiased MMD estimate needs at least 2 points per sample");
    const MmdGram gram = mmd_gram(X, Xp, sigma);
    std::vector<int> xi(n), yi(m);
    for (int i = 0; i < n; ++i) xi[i] = i;
    for (int i = 0; i < m; ++i) yi[i] = n + i;
    return mmd_from_gram(gram, xi, yi);
}

} // namespace ctst
