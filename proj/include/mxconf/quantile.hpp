#pragma once

#include <Eigen/Dense>

namespace mxconf {

/// 1-based rank ⌈beta·count⌉ of the lower-beta quantile, clamped to [1, count].
Eigen::Index lower_quantile_rank(double beta, Eigen::Index count);

/// Lower-beta quantile: the ⌈beta·n⌉-th smallest value. Ties are kept.
double lower_quantile(const Eigen::VectorXd& values, double beta);

}  // namespace mxconf
