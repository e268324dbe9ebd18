#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace ctst {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Gaussian kernel, convention k(x,y) = exp(-||x-y||^2 / (2 sigma^2)).
double gaussian_kernel(const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& y, double sigma);

// Median of all pairwise Euclidean distances ||x_i - x_j||, i < j.
// Rows of `points` are observations.
double median_heuristic(const Matrix& points);

// Uniform subsample without replacement from the pooled data after removing
// exact duplicate rows; returns min(L_max, #distinct) rows. The sigma
// argument is unused by the uniform scheme and kept for interface stability
// with kernel-aware selection schemes.
Matrix select_anchors(const Matrix& pooled_data, int L_max, double sigma,
                      std::uint64_t seed);

// Whitened Nystrom feature map psi(x) = K_L^{-1/2} (k(x,x_1),...,k(x,x_L))^T
// built from the anchor kernel matrix. Inner products of psi reproduce the
// kernel on the anchor set up to the eigenvalue floor. Immutable; apply() is
// pure and safe to call concurrently.
struct FeatureMap {
    Matrix anchors;  // L x d
    double sigma = 0.0;
    Matrix whitener; // L x L symmetric, the K^{-1/2} factor
    double eigen_floor = 0.0;

    int size() const { return static_cast<int>(anchors.rows()); }
    int dim() const { return static_cast<int>(anchors.cols()); }

    // psi for a single point.
    Vector apply(const Eigen::Ref<const Vector>& x) const;
    // Row-wise psi for a batch: (m x d) -> (m x L).
    Matrix apply_rows(const Matrix& points) const;
};

// eigen_floor is relative to the largest eigenvalue of the anchor kernel
// matrix; eigenvalues below floor*lambda_max are clamped before the inverse
// square root so nearly duplicate anchors cannot blow up the whitener.
FeatureMap build_feature_map(const Matrix& anchors, double sigma,
                             double eigen_floor = 1e-9);

} // namespace ctst
