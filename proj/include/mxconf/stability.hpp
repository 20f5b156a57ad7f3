#pragma once

#include "mxconf/matrix_core.hpp"

namespace mxconf {

/// Constants of the triangular kernel K_1(u) = max(1 − |u|, 0).
struct KernelConstants {
    /// Lipschitz constant L0 of K_1.
    double lipschitz = 1.0;
    /// C_K = sup_u K_h(u).
    double sup = 1.0;
};

struct StabilityBounds {
    /// tau(j) bounds |S_j(Ã(Z1; z)) − S_j(Ã(Z2; z))| over all guesses Z1, Z2 and z.
    Vector tau;
    double lipschitz = 1.0;
    double bound = 1.0;
    double kernel_sup = 1.0;
    double bandwidth = 1.0;
};

/**
 * τ_j = min{4 L0 C0³ h⁻¹ (m_j + 3 m̄), 2 C0 C_K} + 2 C_K C0 {(n−2) M(n+1, j) + m_{n+1}}
 * for j = 0..n-1. `mask` is the (n+1)×(n+1) missingness mask; its target
 * entry is zero by convention.
 */
StabilityBounds tau_bounds(const MissingnessSummary& summary, const Mask& mask, double bound,
                           const KernelConstants& kernel, double bandwidth);

StabilityBounds tau_bounds(const ObservedMatrix& obs, const KernelConstants& kernel,
                           double bandwidth);

/// True iff row n+1 has at least ⌈α·n⌉ missing entries. Diagnostic only.
bool is_trivial_forced(const MissingnessSummary& summary, double alpha);

}  // namespace mxconf
