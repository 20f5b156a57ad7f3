#include "mxconf/stability.hpp"

#include "mxconf/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mxconf {

StabilityBounds tau_bounds(const MissingnessSummary& summary, const Mask& mask, double bound,
                           const KernelConstants& kernel, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth h must be positive");
    if (!(bound > 0.0) || !(kernel.lipschitz > 0.0) || !(kernel.sup > 0.0)) {
        throw std::invalid_argument("stability constants must be positive");
    }
    const auto order = static_cast<Index>(summary.m.size());
    if (mask.rows() != order || mask.cols() != order) {
        throw std::invalid_argument("mask order does not match the missingness summary");
    }
    const Index n = order - 1;
    const double c0 = bound;
    const double kernel_term_scale = 4.0 * kernel.lipschitz * c0 * c0 * c0 / bandwidth;
    const double kernel_term_cap = 2.0 * c0 * kernel.sup;
    const double response_scale = 2.0 * kernel.sup * c0;

    StabilityBounds out;
    out.tau.resize(n);
    out.lipschitz = kernel.lipschitz;
    out.bound = c0;
    out.kernel_sup = kernel.sup;
    out.bandwidth = bandwidth;
    for (Index j = 0; j < n; ++j) {
        const double m_j = static_cast<double>(summary.m[static_cast<std::size_t>(j)]);
        const double kernel_part = std::min(kernel_term_scale * (m_j + 3.0 * summary.m_bar),
                                            kernel_term_cap);
        const double row_missing = mask(n, j) ? 1.0 : 0.0;
        const double response_part =
            response_scale * (static_cast<double>(n - 2) * row_missing +
                              static_cast<double>(summary.m_target_row));
        out.tau(j) = kernel_part + response_part;
    }
    return out;
}

StabilityBounds tau_bounds(const ObservedMatrix& obs, const KernelConstants& kernel,
                           double bandwidth) {
    return tau_bounds(missing_counts(obs), obs.mask(), obs.bound(), kernel, bandwidth);
}

bool is_trivial_forced(const MissingnessSummary& summary, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    const auto n = static_cast<Index>(summary.m.size()) - 1;
    return summary.m_target_row >= lower_quantile_rank(alpha, n);
}

}  // namespace mxconf
