#pragma once

#include "mxconf/matrix_core.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mxconf {

enum class Graphon { F1, F2, F3 };

std::string to_string(Graphon g);
/// Accepts F1/F2/F3 in either case.
Graphon parse_graphon(const std::string& name);

/**
 * f1(u,v) = 5/2·(u+v) − 0.75
 * f2(u,v) = 5/2·cos[0.1/{(u−1/2)³+(v−1/2)³+0.01}]·max(u,v)^{2/3} + 2
 * f3(u,v) = 5/3·(u²+v²)·cos{(u⁴+v⁴)⁻¹} + 0.75
 */
double graphon_value(Graphon g, double u, double v);

/// Default entry bound C0: 4.4, 4.6 and 4.3 for F1, F2, F3.
double default_bound(Graphon g);

struct GraphonSpec {
    Graphon graphon = Graphon::F1;
    Index n = 50;
    double xi_target = 0.5;
    double noise_halfwidth = 0.1;
    std::uint64_t seed = 0;
    std::optional<double> bound;

    double effective_bound() const { return bound.value_or(default_bound(graphon)); }
    void validate() const;
};

struct SyntheticInstance {
    /// Ground truth A of order n+1; the target is the canonical (n+1, n).
    FilledMatrix complete;
    /// ξ_1..ξ_{n+1}; the last one is the fixed target latent.
    Vector latents;
    /// A(n+1, n).
    double truth;
};

SyntheticInstance sample_instance(const GraphonSpec& spec);

/// Empty mask of order n+1: the target is tracked separately, never flagged.
Mask mask_single_target(Index n);

/// Flags the m0 largest off-diagonal unordered pairs of A, target excluded.
/// Ties are broken by lexicographic (row, col) order of the upper triangle.
Mask mask_mnar_largest(const Matrix& complete, Index m0);

/// Flags m0 off-diagonal unordered pairs, target excluded, uniformly at random.
Mask mask_mcar(Index n, Index m0, std::uint64_t seed);

/// Number of off-diagonal unordered pairs other than the target.
Index eligible_pair_count(Index n);

/// Hides the masked entries and the target of a synthetic instance.
ObservedMatrix observe(const SyntheticInstance& instance, const Mask& mask);

}  // namespace mxconf
