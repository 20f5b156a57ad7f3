#pragma once

#include "mxconf/matrix_core.hpp"
#include "mxconf/quantile.hpp"
#include "mxconf/scorers.hpp"
#include "mxconf/stability.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mxconf {

inline constexpr Index kDefaultGridPoints = 401;
inline constexpr Index kDefaultIterMax = 8;

/// Equally spaced candidate values for the target entry.
struct Grid {
    double lo = -1.0;
    double hi = 1.0;
    Index points = kDefaultGridPoints;

    static Grid symmetric(double bound, Index points = kDefaultGridPoints);

    double spacing() const { return (hi - lo) / static_cast<double>(points - 1); }
    double at(Index i) const;
    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted union of disjoint closed intervals inside [-C0, C0].
class PredictionSet {
public:
    PredictionSet() = default;
    /// Sorts and merges overlapping or touching intervals.
    PredictionSet(std::vector<Interval> intervals, double bound);

    /// Each accepted grid point contributes [z − Δ/2, z + Δ/2] clipped to the grid range.
    static PredictionSet from_grid(const Grid& grid, const std::vector<bool>& accepted);

    const std::vector<Interval>& intervals() const { return intervals_; }
    double bound() const { return bound_; }
    bool empty() const { return intervals_.empty(); }
    double total_length() const;
    /// Length of the convex hull of the union.
    double hull_length() const;
    bool is_trivial() const;
    bool contains(double x) const;
    /// True if every point of `other` lies in this set.
    bool includes(const PredictionSet& other) const;

    friend PredictionSet unite(const PredictionSet& a, const PredictionSet& b);
    friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

private:
    std::vector<Interval> intervals_;
    double bound_ = 0.0;
};

// ---- inclusion rule ---------------------------------------------------------

/// Target score (last entry) at most the lower (1−α) quantile of all n scores.
bool accept(const ScoreVector& scores, double alpha);

/// S_n − τ_n ≤ Q_{1−α}({S_j + τ_j}).
bool accept_shifted(const ScoreVector& scores, const Vector& tau, double alpha);

// ---- guesses ----------------------------------------------------------------

struct GuessStrategy {
    enum class Kind { EmpiricalIid, AllPlusBound, AllMinusBound, MixedSigns };
    Kind kind = Kind::EmpiricalIid;
    /// Probability of +C0 for MixedSigns.
    double plus_probability = 0.5;
    std::uint64_t seed = 0;
};

/// Symmetric guess matrix; only masked positions are populated, the rest is 0.
Matrix draw_guess(const ObservedMatrix& obs, const GuessStrategy& strategy);

/// Empirical, +C0, −C0, Mixed(0.5), then Empirical with fresh seeds.
std::vector<GuessStrategy> default_strategies(Index count, std::uint64_t seed);

// ---- prediction sets ----------------------------------------------------------

/// Acceptance flag per grid point.
std::vector<bool> accepted_points(const ScoreEngine& engine, double alpha, const Grid& grid,
                                  const Vector* tau = nullptr);

PredictionSet conformal_1d(const ObservedMatrix& obs, const Matrix& guess,
                           const ScorerConfig& config, double alpha, const Grid& grid);
PredictionSet conformal_1d(const ObservedMatrix& obs, const Matrix& guess,
                           const ScorerConfig& config, double alpha, const Grid& grid,
                           const StabilityBounds& stability);

/**
 * Union over guesses of one-dimensional full conformal sets. Guess ℓ uses
 * strategies[ℓ mod size]; strategies past the end of the list reuse the kind
 * with a seed derived from ℓ. Without missing entries the guesses cannot
 * matter and a single pass is made.
 */
PredictionSet algorithm1(const ObservedMatrix& obs, const ScorerConfig& config, double alpha,
                         const Grid& grid, std::span<const GuessStrategy> strategies,
                         Index iter_max);

/**
 * Neighborhood-smoothing scores over a grid with the response-difference
 * block D cached: only row/column n of D depends on the candidate value.
 */
class CachedNsScorer {
public:
    CachedNsScorer(Matrix weights, Vector responses);
    ScoreVector scores(double z);

private:
    Matrix weights_;
    Vector responses_;
    Matrix differences_;
};

struct Algorithm2Result {
    PredictionSet set;
    StabilityBounds stability;
    /// Per-column bandwidths h_j; the bound uses their minimum.
    Vector bandwidths;
};

Algorithm2Result algorithm2(const ObservedMatrix& obs, const ScorerConfig& config, double alpha,
                            const Grid& grid, const Matrix& guess,
                            const KernelConstants& kernel = {});

}  // namespace mxconf
