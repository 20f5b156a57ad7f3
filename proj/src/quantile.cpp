#include "mxconf/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mxconf {

Eigen::Index lower_quantile_rank(double beta, Eigen::Index count) {
    if (count < 1) throw std::invalid_argument("quantile of an empty sample");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("quantile level must be in (0, 1]");
    // Products such as 0.9 * 50 must land on 45, not 45 + 1 ulp.
    const double scaled = beta * static_cast<double>(count);
    const auto rank = static_cast<Eigen::Index>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
    return std::clamp<Eigen::Index>(rank, 1, count);
}

double lower_quantile(const Eigen::VectorXd& values, double beta) {
    const Eigen::Index rank = lower_quantile_rank(beta, values.size());
    std::vector<double> sorted(values.data(), values.data() + values.size());
    auto nth = sorted.begin() + (rank - 1);
    std::nth_element(sorted.begin(), nth, sorted.end());
    return *nth;
}

}  // namespace mxconf
