#include "mxconf/scorers.hpp"

#include "mxconf/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mxconf {

void ScorerConfig::validate() const {
    if (!(svd_threshold_exponent > 0.0 && svd_threshold_exponent < 1.0)) {
        throw std::invalid_argument("svd_threshold_exponent must be in (0, 1)");
    }
    if (!(svd_threshold_scale >= 0.0) || !std::isfinite(svd_threshold_scale)) {
        throw std::invalid_argument("svd_threshold_scale must be finite and nonnegative");
    }
    if (ns_bandwidth_quantile && !(*ns_bandwidth_quantile > 0.0 && *ns_bandwidth_quantile <= 1.0)) {
        throw std::invalid_argument("ns_bandwidth_quantile must be in (0, 1]");
    }
    if (ns_bandwidths && !(ns_bandwidths->array() > 0.0).all()) {
        throw std::invalid_argument("ns_bandwidths must be strictly positive");
    }
}

double usvt_threshold(const ScorerConfig& config, Index order) {
    return config.svd_threshold_scale *
           std::pow(static_cast<double>(order), config.svd_threshold_exponent);
}

Matrix usvt_estimate(const Matrix& b, double threshold) {
    if (b.rows() != b.cols()) throw std::invalid_argument("USVT input must be square");
    if (!b.allFinite()) throw std::invalid_argument("USVT input has non-finite entries");
    // For symmetric B the singular values are |λ| and U S Vᵀ = Σ λ q qᵀ.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const Vector& lambda = eig.eigenvalues();
    const Matrix& q = eig.eigenvectors();
    Matrix estimate = Matrix::Zero(b.rows(), b.cols());
    for (Index k = 0; k < lambda.size(); ++k) {
        if (std::abs(lambda(k)) > threshold) {
            estimate.noalias() += lambda(k) * q.col(k) * q.col(k).transpose();
        }
    }
    return estimate;
}

ScoreVector svd_scores(const Matrix& filled, double threshold, std::optional<double> clip_bound) {
    const Index order = filled.rows();
    const Index n = order - 1;
    if (!filled.allFinite()) throw std::invalid_argument("USVT input has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(filled);
    if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const Vector& lambda = eig.eigenvalues();
    const Matrix& q = eig.eigenvectors();

    Vector row = Vector::Zero(order);
    for (Index k = 0; k < lambda.size(); ++k) {
        if (std::abs(lambda(k)) > threshold) row.noalias() += (lambda(k) * q(n, k)) * q.col(k);
    }
    if (clip_bound) row = row.cwiseMax(-*clip_bound).cwiseMin(*clip_bound);

    ScoreVector scores(n);
    for (Index j = 0; j < n; ++j) scores(j) = std::abs(filled(n, j) - row(j));
    return scores;
}

double score_svd(const FilledMatrix& filled, Index j, const ScorerConfig& config) {
    if (j < 0 || j >= filled.n()) throw std::out_of_range("score column out of range");
    const Matrix estimate = usvt_estimate(filled.values(), usvt_threshold(config, filled.order()));
    const Index n = filled.n();
    double fitted = estimate(n, j);
    if (config.clip_estimates) fitted = std::clamp(fitted, -filled.bound(), filled.bound());
    return std::abs(filled(n, j) - fitted);
}

double triangular_kernel(double u, double h) {
    return std::max(1.0 - std::abs(u) / h, 0.0);
}

namespace {

void require_core(const Matrix& core) {
    if (core.rows() != core.cols()) throw std::invalid_argument("core block must be square");
    if (core.rows() < 3) throw std::invalid_argument("neighborhood smoothing needs n >= 3");
}

double normalizer(Index n) {
    return 1.0 / (static_cast<double>(n) * static_cast<double>(n - 2));
}

}  // namespace

double column_dissimilarity(const Matrix& core, Index j, Index jp) {
    require_core(core);
    const Index n = core.rows();
    if (j == jp) throw std::invalid_argument("dissimilarity needs two distinct columns");
    if (j < 0 || j >= n || jp < 0 || jp >= n) throw std::out_of_range("column out of range");
    const Vector diff = core.col(j) - core.col(jp);
    double total = 0.0;
    for (Index l = 0; l < n; ++l) {
        if (l == j || l == jp) continue;
        total += std::abs(diff.dot(core.col(l)));
    }
    return total * normalizer(n);
}

Matrix column_dissimilarities(const Matrix& core) {
    require_core(core);
    const Index n = core.rows();
    const Matrix gram = core.transpose() * core;
    Matrix d = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index jp = j + 1; jp < n; ++jp) {
            double total = 0.0;
            for (Index l = 0; l < n; ++l) {
                if (l == j || l == jp) continue;
                total += std::abs(gram(j, l) - gram(jp, l));
            }
            d(j, jp) = d(jp, j) = total * normalizer(n);
        }
    }
    return d;
}

double kernel_weight(const Matrix& core, Index j, Index jp, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    return triangular_kernel(column_dissimilarity(core, j, jp), h);
}

double default_bandwidth_quantile(Index n) {
    if (n < 2) return 1.0;
    const double nd = static_cast<double>(n);
    return std::clamp(std::sqrt(std::log(nd) / nd), std::numeric_limits<double>::min(), 1.0);
}

namespace {

double bandwidth_from(const Vector& others, double q) {
    return std::max(lower_quantile(others, q), kMinBandwidth);
}

}  // namespace

double select_bandwidth(const Matrix& core, Index j, double q) {
    require_core(core);
    const Index n = core.rows();
    if (j < 0 || j >= n) throw std::out_of_range("column out of range");
    Vector others(n - 1);
    for (Index jp = 0, k = 0; jp < n; ++jp) {
        if (jp != j) others(k++) = column_dissimilarity(core, j, jp);
    }
    return bandwidth_from(others, q);
}

Vector select_bandwidths(const Matrix& dissimilarities, double q) {
    const Index n = dissimilarities.rows();
    if (n < 3) throw std::invalid_argument("neighborhood smoothing needs n >= 3");
    Vector h(n);
    Vector others(n - 1);
    for (Index j = 0; j < n; ++j) {
        for (Index jp = 0, k = 0; jp < n; ++jp) {
            if (jp != j) others(k++) = dissimilarities(j, jp);
        }
        h(j) = bandwidth_from(others, q);
    }
    return h;
}

Matrix ns_kernel_weights(const Matrix& dissimilarities, const Vector& bandwidths) {
    const Index n = dissimilarities.rows();
    if (bandwidths.size() != n) {
        throw std::invalid_argument("expected " + std::to_string(n) + " bandwidths, got " +
                                    std::to_string(bandwidths.size()));
    }
    Matrix w = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index jp = 0; jp < n; ++jp) {
            if (jp != j) w(j, jp) = triangular_kernel(dissimilarities(j, jp), bandwidths(j));
        }
    }
    return w;
}

ScoreVector ns_scores(const Matrix& weights, const Vector& responses) {
    const Index n = weights.rows();
    ScoreVector s(n);
    for (Index j = 0; j < n; ++j) {
        double total = 0.0;
        for (Index jp = 0; jp < n; ++jp) {
            if (jp != j) total += weights(j, jp) * std::abs(responses(j) - responses(jp));
        }
        s(j) = total;
    }
    return s;
}

double score_ns(const FilledMatrix& filled, Index j, const Vector& bandwidths) {
    const Index n = filled.n();
    if (bandwidths.size() != n) {
        throw std::invalid_argument("expected " + std::to_string(n) + " bandwidths, got " +
                                    std::to_string(bandwidths.size()));
    }
    if (j < 0 || j >= n) throw std::out_of_range("score column out of range");
    const Matrix core = filled.values().topLeftCorner(n, n);
    double total = 0.0;
    for (Index jp = 0; jp < n; ++jp) {
        if (jp == j) continue;
        total += kernel_weight(core, j, jp, bandwidths(j)) * std::abs(filled(n, j) - filled(n, jp));
    }
    return total;
}

Vector resolve_bandwidths(const Matrix& filled, const ScorerConfig& config) {
    const Index n = filled.rows() - 1;
    if (config.ns_bandwidths) {
        if (config.ns_bandwidths->size() != n) {
            throw std::invalid_argument("expected " + std::to_string(n) + " bandwidths, got " +
                                        std::to_string(config.ns_bandwidths->size()));
        }
        return *config.ns_bandwidths;
    }
    const double q = config.ns_bandwidth_quantile.value_or(default_bandwidth_quantile(n));
    return select_bandwidths(column_dissimilarities(filled.topLeftCorner(n, n)), q);
}

ScoreEngine::ScoreEngine(const ObservedMatrix& obs, const Matrix& guess, const ScorerConfig& config)
    : base_(fill_missing(obs, guess)), config_(config) {
    config_.validate();
    if (!obs.has_canonical_target()) {
        throw std::invalid_argument("scoring needs the target at (n+1, n); relabel first");
    }
    if (config_.kind == ScorerKind::Svd) {
        threshold_ = usvt_threshold(config_, base_.order());
    } else {
        const Index n = base_.n();
        bandwidths_ = resolve_bandwidths(base_.values(), config_);
        weights_ = ns_kernel_weights(column_dissimilarities(base_.values().topLeftCorner(n, n)),
                                     bandwidths_);
    }
}

ScoreVector ScoreEngine::scores(double z) const {
    if (!(std::abs(z) <= base_.bound())) {
        throw std::invalid_argument("candidate value " + std::to_string(z) + " outside [-C0, C0]");
    }
    const Index n = base_.n();
    if (config_.kind == ScorerKind::Svd) {
        Matrix values = base_.values();
        values(n, n - 1) = z;
        values(n - 1, n) = z;
        return svd_scores(values, threshold_,
                          config_.clip_estimates ? std::optional<double>(base_.bound()) : std::nullopt);
    }
    Vector responses = base_.values().row(n).head(n).transpose();
    responses(n - 1) = z;
    return ns_scores(weights_, responses);
}

ScoreVector score_all(const ObservedMatrix& obs, const Matrix& guess, double z,
                      const ScorerConfig& config) {
    return ScoreEngine(obs, guess, config).scores(z);
}

ScoreVector score_complete(const Matrix& full, const ScorerConfig& config,
                           std::optional<double> clip_bound) {
    config.validate();
    const FilledMatrix checked(full, std::numeric_limits<double>::infinity(),
                               canonical_target(full.rows()));
    const Index n = checked.n();
    if (config.kind == ScorerKind::Svd) {
        return svd_scores(full, usvt_threshold(config, full.rows()),
                          config.clip_estimates ? clip_bound : std::nullopt);
    }
    const Vector h = resolve_bandwidths(full, config);
    const Matrix w = ns_kernel_weights(column_dissimilarities(full.topLeftCorner(n, n)), h);
    return ns_scores(w, full.row(n).head(n).transpose());
}

}  // namespace mxconf
