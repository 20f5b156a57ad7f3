#pragma once

#include "mxconf/matrix_core.hpp"

#include <optional>

namespace mxconf {

enum class ScorerKind { Svd, NeighborhoodSmoothing };

struct ScorerConfig {
    ScorerKind kind = ScorerKind::Svd;
    /// USVT keeps singular values above scale · (n+1)^exponent.
    double svd_threshold_exponent = 1.0 / 3.0;
    double svd_threshold_scale = 1.0;
    /// Lower quantile of column dissimilarities used as bandwidth h_j.
    /// Unset means min(1, sqrt(log n / n)).
    std::optional<double> ns_bandwidth_quantile;
    /// Per-column bandwidths; overrides quantile selection when set.
    std::optional<Vector> ns_bandwidths;
    /// Clip USVT estimates to [-C0, C0].
    bool clip_estimates = false;

    void validate() const;
};

/// Position j holds S_{n+1;j}, j = 0..n-1; the target column is n-1.
using ScoreVector = Vector;

// ---- SVD score -------------------------------------------------------------

double usvt_threshold(const ScorerConfig& config, Index order);

/// Reconstruction from the singular triplets of a symmetric matrix whose
/// singular value strictly exceeds `threshold`.
Matrix usvt_estimate(const Matrix& b, double threshold);

/// Residual |F(n+1, j) − Ǎ(F)(n+1, j)| at one column.
double score_svd(const FilledMatrix& filled, Index j, const ScorerConfig& config);

/// All n SVD scores from one decomposition; only row n+1 of Ǎ is formed.
ScoreVector svd_scores(const Matrix& filled, double threshold, std::optional<double> clip_bound);

// ---- neighborhood-smoothing score ------------------------------------------

/// K_h(u) = max(1 − |u|/h, 0).
double triangular_kernel(double u, double h);

/// d(j, j') = {n(n−2)}⁻¹ Σ_{ℓ∉{j,j'}} |⟨A_{·,j} − A_{·,j'}, A_{·,ℓ}⟩| over an n×n core.
double column_dissimilarity(const Matrix& core, Index j, Index jp);
/// All pairwise dissimilarities (symmetric, zero diagonal).
Matrix column_dissimilarities(const Matrix& core);

double kernel_weight(const Matrix& core, Index j, Index jp, double h);

double default_bandwidth_quantile(Index n);

/// Smallest allowed bandwidth.
inline constexpr double kMinBandwidth = 1e-12;

/// Lower-q quantile of {d(j, j') : j' ≠ j}, floored at kMinBandwidth.
double select_bandwidth(const Matrix& core, Index j, double q);
Vector select_bandwidths(const Matrix& dissimilarities, double q);

/// W(j, j') = K_{h_j}(d(j, j')), zero on the diagonal. Rows are not symmetric.
Matrix ns_kernel_weights(const Matrix& dissimilarities, const Vector& bandwidths);

/// Σ_{j'≠j} K_{h_j}(d(j,j')) |F(n+1, j) − F(n+1, j')|, weights from the top-left n×n block.
double score_ns(const FilledMatrix& filled, Index j, const Vector& bandwidths);

/// S_j = Σ_{j'} W(j, j') |r_j − r_{j'}| for the response row r.
ScoreVector ns_scores(const Matrix& weights, const Vector& responses);

/// Bandwidths for the configured rule, computed from the top-left n×n block.
Vector resolve_bandwidths(const Matrix& filled, const ScorerConfig& config);

// ---- dispatch --------------------------------------------------------------

/**
 * Evaluates the configured score for one (observed matrix, guess) pair across
 * candidate target values z. The NS kernel weights only depend on the n×n
 * block, so they are computed once here and reused for every z.
 */
class ScoreEngine {
public:
    ScoreEngine(const ObservedMatrix& obs, const Matrix& guess, const ScorerConfig& config);

    ScoreVector scores(double z) const;

    const FilledMatrix& base() const { return base_; }
    const ScorerConfig& config() const { return config_; }
    /// NS only; empty for the SVD scorer.
    const Vector& bandwidths() const { return bandwidths_; }
    const Matrix& kernel_weights() const { return weights_; }

private:
    FilledMatrix base_;
    ScorerConfig config_;
    double threshold_ = 0.0;
    Vector bandwidths_;
    Matrix weights_;
};

ScoreVector score_all(const ObservedMatrix& obs, const Matrix& guess, double z,
                      const ScorerConfig& config);

/// Scores of a fully populated matrix whose target is the canonical (n+1, n).
ScoreVector score_complete(const Matrix& full, const ScorerConfig& config,
                           std::optional<double> clip_bound = std::nullopt);

}  // namespace mxconf
