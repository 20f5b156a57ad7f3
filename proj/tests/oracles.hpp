#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library code paths they check.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_symmetric(Index order, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    MatrixXd m(order, order);
    for (Index i = 0; i < order; ++i) {
        for (Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
    }
    return m;
}

/// Σ_{σ_k > t} σ_k u_k v_kᵀ from a one-sided Jacobi SVD.
inline MatrixXd thresholded_svd(const MatrixXd& b, double t) {
    Eigen::JacobiSVD<MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    MatrixXd out = MatrixXd::Zero(b.rows(), b.cols());
    for (Index k = 0; k < svd.singularValues().size(); ++k) {
        const double s = svd.singularValues()(k);
        if (s > t) out += s * svd.matrixU().col(k) * svd.matrixV().col(k).transpose();
    }
    return out;
}

/// d(j, j') with every inner product expanded as an explicit sum.
inline double dissimilarity(const MatrixXd& core, Index j, Index jp) {
    const Index n = core.rows();
    double total = 0.0;
    for (Index l = 0; l < n; ++l) {
        if (l == j || l == jp) continue;
        double inner = 0.0;
        for (Index r = 0; r < n; ++r) inner += (core(r, j) - core(r, jp)) * core(r, l);
        total += std::abs(inner);
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 2));
}

/// NS score of column j of a full (n+1)x(n+1) matrix with bandwidths h.
inline double ns_score(const MatrixXd& full, Index j, const VectorXd& h) {
    const Index n = full.rows() - 1;
    const MatrixXd core = full.topLeftCorner(n, n);
    double total = 0.0;
    for (Index jp = 0; jp < n; ++jp) {
        if (jp == j) continue;
        const double d = dissimilarity(core, j, jp);
        const double w = std::max(1.0 - d / h(j), 0.0);
        total += w * std::abs(full(n, j) - full(n, jp));
    }
    return total;
}

/// k-th smallest (1-based) by full sort.
inline double kth_smallest(std::vector<double> v, std::size_t k) {
    std::sort(v.begin(), v.end());
    return v[k - 1];
}

/// Accept iff at least n − ⌈(1−α)n⌉ + 1 ... computed by counting ranks:
/// the target (last) is accepted iff the number of scores strictly below it
/// is less than ⌈(1−α)n⌉, i.e. its lowest possible rank fits under the quantile.
inline bool accept_by_rank(const std::vector<double>& scores, double alpha) {
    const auto n = static_cast<long>(scores.size());
    long k = 0;  // smallest k with k >= (1−α)n, by integer search
    while (static_cast<double>(k) < (1.0 - alpha) * static_cast<double>(n) - 1e-9) ++k;
    k = std::max(k, 1L);
    const double target = scores.back();
    long strictly_below = 0;
    for (double s : scores) strictly_below += s < target ? 1 : 0;
    return strictly_below < k;
}

}  // namespace oracle
