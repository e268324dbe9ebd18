#include "ctst/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ctst/errors.hpp"
#include "ctst/random.hpp"

namespace ctst {

double gaussian_kernel(const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& y, double sigma) {
    if (x.size() != y.size())
        throw InputError("kernel arguments have dimensions " +
                         std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
    if (!(sigma > 0.0)) throw InputError("kernel width must be positive");
    return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

double median_heuristic(const Matrix& points) {
    const int m = static_cast<int>(points.rows());
    if (m < 2) throw InputError("median heuristic needs at least 2 points");
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            d2.push_back((points.row(i) - points.row(j)).squaredNorm());
    // Median of distances = sqrt of median of squared distances (monotone).
    auto mid = d2.begin() + d2.size() / 2;
    std::nth_element(d2.begin(), mid, d2.end());
    double med2 = *mid;
    if (d2.size() % 2 == 0) {
        // Even count: average the two middle order statistics.
        auto lo = std::max_element(d2.begin(), mid);
        med2 = 0.5 * (std::sqrt(*lo) + std::sqrt(med2));
        med2 *= med2;
    }
    const double med = std::sqrt(med2);
    if (!(med > 0.0))
        throw InputError("median pairwise distance is zero (all points identical)");
    return med;
}

Matrix select_anchors(const Matrix& pooled_data, int L_max, double /*sigma*/,
                      std::uint64_t seed) {
    const int m = static_cast<int>(pooled_data.rows());
    if (m == 0) throw InputError("anchor selection got empty data");
    if (L_max < 1) throw InputError("anchor budget must be at least 1");

    // Drop exact duplicate rows, keeping first occurrences in data order.
    std::vector<int> distinct;
    {
        std::vector<int> order(m);
        for (int i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            for (int c = 0; c < pooled_data.cols(); ++c) {
                if (pooled_data(a, c) != pooled_data(b, c))
                    return pooled_data(a, c) < pooled_data(b, c);
            }
            return a < b;
        });
        std::vector<char> keep(m, 0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i > 0 && pooled_data.row(order[i]) == pooled_data.row(order[i - 1]))
                continue;
            keep[order[i]] = 1;
        }
        for (int i = 0; i < m; ++i)
            if (keep[i]) distinct.push_back(i);
    }

    const int L = std::min<int>(L_max, static_cast<int>(distinct.size()));
    Rng rng(seed);
    std::vector<int> pick =
        rng.sample_without_replacement(static_cast<int>(distinct.size()), L);
    Matrix anchors(L, pooled_data.cols());
    for (int i = 0; i < L; ++i) anchors.row(i) = pooled_data.row(distinct[pick[i]]);
    return anchors;
}

Vector FeatureMap::apply(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != anchors.cols())
        throw InputError("point dimension " + std::to_string(x.size()) +
                         " does not match anchor dimension " +
                         std::to_string(anchors.cols()));
    const int L = size();
    Vector k(L);
    const double inv = -1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < L; ++i)
        k[i] = std::exp(inv * (anchors.row(i).transpose() - x).squaredNorm());
    return whitener * k;
}

Matrix FeatureMap::apply_rows(const Matrix& points) const {
    if (points.cols() != anchors.cols())
        throw InputError("point dimension " + std::to_string(points.cols()) +
                         " does not match anchor dimension " +
                         std::to_string(anchors.cols()));
    // ||x-a||^2 = ||x||^2 + ||a||^2 - 2 x.a, assembled with one GEMM.
    Matrix d2 = -2.0 * points * anchors.transpose();
    d2.colwise() += points.rowwise().squaredNorm();
    d2.rowwise() += anchors.rowwise().squaredNorm().transpose();
    const double inv = -1.0 / (2.0 * sigma * sigma);
    // Guard tiny negative values from cancellation before the exp.
    Matrix K = (d2.array().max(0.0) * inv).exp();
    return K * whitener; // whitener symmetric, so right-multiplying matches psi
}

FeatureMap build_feature_map(const Matrix& anchors, double sigma,
                             double eigen_floor) {
    const int L = static_cast<int>(anchors.rows());
    if (L < 1) throw InputError("feature map needs at least one anchor");
    if (!(sigma > 0.0)) throw InputError("kernel width must be positive");
    if (!(eigen_floor > 0.0)) throw InputError("eigen floor must be positive");

    Matrix K(L, L);
    const double inv = -1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < L; ++i) {
        K(i, i) = 1.0;
        for (int j = i + 1; j < L; ++j) {
            const double d2 = (anchors.row(i) - anchors.row(j)).squaredNorm();
            if (d2 == 0.0)
                throw InputError("duplicate anchors at rows " + std::to_string(i) +
                                 " and " + std::to_string(j));
            K(i, j) = K(j, i) = std::exp(inv * d2);
        }
    }
    if (!K.allFinite()) throw NumericalError("anchor kernel matrix is not finite");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
    if (eig.info() != Eigen::Success)
        throw NumericalError("eigendecomposition of the anchor kernel matrix failed");
    const Vector& ev = eig.eigenvalues();
    const double floor_abs = eigen_floor * ev[L - 1]; // eigenvalues ascending
    Vector inv_sqrt(L);
    for (int i = 0; i < L; ++i)
        inv_sqrt[i] = 1.0 / std::sqrt(std::max(ev[i], floor_abs));

    FeatureMap fm;
    fm.anchors = anchors;
    fm.sigma = sigma;
    fm.eigen_floor = eigen_floor;
    fm.whitener = eig.eigenvectors() * inv_sqrt.asDiagonal() *
                  eig.eigenvectors().transpose();
    // Enforce exact symmetry wiped out by round-off.
    fm.whitener = 0.5 * (fm.whitener + fm.whitener.transpose()).eval();
    return fm;
}

} // namespace ctst
