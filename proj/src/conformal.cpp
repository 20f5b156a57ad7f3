#include "mxconf/conformal.hpp"

#include "mxconf/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mxconf {

Grid Grid::symmetric(double bound, Index points) {
    Grid g{-bound, bound, points};
    g.validate();
    return g;
}

void Grid::validate() const {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("grid range must be finite with lo < hi");
    }
}

double Grid::at(Index i) const {
    if (i == points - 1) return hi;
    return std::min(lo + static_cast<double>(i) * spacing(), hi);
}

PredictionSet::PredictionSet(std::vector<Interval> intervals, double bound) : bound_(bound) {
    for (const Interval& iv : intervals) {
        if (!(iv.lo <= iv.hi) || iv.lo < -bound || iv.hi > bound) {
            throw std::invalid_argument("interval [" + std::to_string(iv.lo) + ", " +
                                        std::to_string(iv.hi) + "] is not inside [-C0, C0]");
        }
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const Interval& iv : intervals) {
        if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
            intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
        } else {
            intervals_.push_back(iv);
        }
    }
}

PredictionSet PredictionSet::from_grid(const Grid& grid, const std::vector<bool>& accepted) {
    grid.validate();
    if (static_cast<Index>(accepted.size()) != grid.points) {
        throw std::invalid_argument("acceptance flags do not match the grid");
    }
    const double half = 0.5 * grid.spacing();
    PredictionSet set;
    set.bound_ = std::max(std::abs(grid.lo), std::abs(grid.hi));
    Index i = 0;
    while (i < grid.points) {
        if (!accepted[static_cast<std::size_t>(i)]) {
            ++i;
            continue;
        }
        Index last = i;
        while (last + 1 < grid.points && accepted[static_cast<std::size_t>(last + 1)]) ++last;
        set.intervals_.push_back({std::max(grid.at(i) - half, grid.lo),
                                  std::min(grid.at(last) + half, grid.hi)});
        i = last + 1;
    }
    return set;
}

double PredictionSet::total_length() const {
    double total = 0.0;
    for (const Interval& iv : intervals_) total += iv.length();
    return total;
}

double PredictionSet::hull_length() const {
    return intervals_.empty() ? 0.0 : intervals_.back().hi - intervals_.front().lo;
}

bool PredictionSet::is_trivial() const {
    return intervals_.size() == 1 && intervals_.front().lo == -bound_ &&
           intervals_.front().hi == bound_;
}

bool PredictionSet::contains(double x) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [x](const Interval& iv) { return iv.contains(x); });
}

bool PredictionSet::includes(const PredictionSet& other) const {
    return std::all_of(other.intervals_.begin(), other.intervals_.end(), [this](const Interval& o) {
        return std::any_of(intervals_.begin(), intervals_.end(), [&o](const Interval& iv) {
            return iv.lo <= o.lo && o.hi <= iv.hi;
        });
    });
}

PredictionSet unite(const PredictionSet& a, const PredictionSet& b) {
    std::vector<Interval> all = a.intervals_;
    all.insert(all.end(), b.intervals_.begin(), b.intervals_.end());
    return PredictionSet(std::move(all), std::max(a.bound_, b.bound_));
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
}

void check_grid(const Grid& grid, double bound) {
    grid.validate();
    if (grid.lo < -bound || grid.hi > bound) {
        throw std::invalid_argument("grid range exceeds [-C0, C0]");
    }
}

}  // namespace

bool accept(const ScoreVector& scores, double alpha) {
    check_alpha(alpha);
    if (scores.size() == 0) throw std::invalid_argument("no scores");
    return scores(scores.size() - 1) <= lower_quantile(scores, 1.0 - alpha);
}

bool accept_shifted(const ScoreVector& scores, const Vector& tau, double alpha) {
    check_alpha(alpha);
    if (scores.size() == 0) throw std::invalid_argument("no scores");
    if (tau.size() != scores.size()) {
        throw std::invalid_argument("expected " + std::to_string(scores.size()) +
                                    " stability bounds, got " + std::to_string(tau.size()));
    }
    const Index last = scores.size() - 1;
    const Vector inflated = scores + tau;
    return scores(last) - tau(last) <= lower_quantile(inflated, 1.0 - alpha);
}

Matrix draw_guess(const ObservedMatrix& obs, const GuessStrategy& strategy) {
    const Index order = obs.order();
    const double c0 = obs.bound();
    Rng rng(strategy.seed);
    Matrix z = Matrix::Zero(order, order);

    std::vector<double> pool;
    if (strategy.kind == GuessStrategy::Kind::EmpiricalIid) {
        for (Index j = 0; j < order; ++j) {
            for (Index i = 0; i <= j; ++i) {
                if (!obs.is_missing(i, j) && !obs.is_target(i, j)) pool.push_back(obs.entries()(i, j));
            }
        }
    }
    if (strategy.kind == GuessStrategy::Kind::MixedSigns &&
        !(strategy.plus_probability >= 0.0 && strategy.plus_probability <= 1.0)) {
        throw std::invalid_argument("mixed-sign probability must be in [0, 1]");
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
    std::bernoulli_distribution plus(std::clamp(strategy.plus_probability, 0.0, 1.0));

    for (Index j = 0; j < order; ++j) {
        for (Index i = 0; i <= j; ++i) {
            if (!obs.is_missing(i, j)) continue;
            double v = 0.0;
            switch (strategy.kind) {
                case GuessStrategy::Kind::EmpiricalIid:
                    if (pool.empty()) throw std::invalid_argument("no observed entries to resample");
                    v = pool[pick(rng)];
                    break;
                case GuessStrategy::Kind::AllPlusBound: v = c0; break;
                case GuessStrategy::Kind::AllMinusBound: v = -c0; break;
                case GuessStrategy::Kind::MixedSigns: v = plus(rng) ? c0 : -c0; break;
            }
            z(i, j) = v;
            z(j, i) = v;
        }
    }
    return z;
}

std::vector<GuessStrategy> default_strategies(Index count, std::uint64_t seed) {
    using Kind = GuessStrategy::Kind;
    constexpr Kind cycle[] = {Kind::EmpiricalIid, Kind::AllPlusBound, Kind::AllMinusBound,
                              Kind::MixedSigns};
    std::vector<GuessStrategy> out;
    for (Index l = 0; l < count; ++l) {
        const Kind kind = l < 4 ? cycle[l] : Kind::EmpiricalIid;
        out.push_back({kind, 0.5, child_seed(seed, static_cast<std::uint64_t>(l))});
    }
    return out;
}

std::vector<bool> accepted_points(const ScoreEngine& engine, double alpha, const Grid& grid,
                                  const Vector* tau) {
    check_alpha(alpha);
    check_grid(grid, engine.base().bound());
    std::vector<bool> accepted(static_cast<std::size_t>(grid.points));
    for (Index g = 0; g < grid.points; ++g) {
        const ScoreVector s = engine.scores(grid.at(g));
        accepted[static_cast<std::size_t>(g)] = tau ? accept_shifted(s, *tau, alpha) : accept(s, alpha);
    }
    return accepted;
}

PredictionSet conformal_1d(const ObservedMatrix& obs, const Matrix& guess,
                           const ScorerConfig& config, double alpha, const Grid& grid) {
    const ScoreEngine engine(obs, guess, config);
    return PredictionSet::from_grid(grid, accepted_points(engine, alpha, grid));
}

PredictionSet conformal_1d(const ObservedMatrix& obs, const Matrix& guess,
                           const ScorerConfig& config, double alpha, const Grid& grid,
                           const StabilityBounds& stability) {
    const ScoreEngine engine(obs, guess, config);
    return PredictionSet::from_grid(grid, accepted_points(engine, alpha, grid, &stability.tau));
}

PredictionSet algorithm1(const ObservedMatrix& obs, const ScorerConfig& config, double alpha,
                         const Grid& grid, std::span<const GuessStrategy> strategies,
                         Index iter_max) {
    if (iter_max < 1) throw std::invalid_argument("iter_max must be at least 1");
    if (strategies.empty()) throw std::invalid_argument("at least one guess strategy is required");
    check_alpha(alpha);
    check_grid(grid, obs.bound());

    const Index passes = obs.missing_pair_count() == 0 ? 1 : iter_max;
    std::vector<bool> accepted(static_cast<std::size_t>(grid.points), false);
    for (Index l = 0; l < passes; ++l) {
        const auto size = static_cast<Index>(strategies.size());
        GuessStrategy strategy = strategies[static_cast<std::size_t>(l % size)];
        if (l >= size) strategy.seed = child_seed(strategy.seed, static_cast<std::uint64_t>(l));
        const ScoreEngine engine(obs, draw_guess(obs, strategy), config);
        const std::vector<bool> pass = accepted_points(engine, alpha, grid);
        for (std::size_t g = 0; g < accepted.size(); ++g) accepted[g] = accepted[g] || pass[g];
    }
    return PredictionSet::from_grid(grid, accepted);
}

CachedNsScorer::CachedNsScorer(Matrix weights, Vector responses)
    : weights_(std::move(weights)), responses_(std::move(responses)) {
    const Index n = weights_.rows();
    if (weights_.cols() != n || responses_.size() != n) {
        throw std::invalid_argument("kernel weights and responses disagree in size");
    }
    differences_ = Matrix::Zero(n, n);
    for (Index j = 0; j + 1 < n; ++j) {
        for (Index jp = 0; jp + 1 < n; ++jp) {
            differences_(j, jp) = std::abs(responses_(j) - responses_(jp));
        }
    }
}

ScoreVector CachedNsScorer::scores(double z) {
    const Index n = weights_.rows();
    const Index last = n - 1;
    for (Index jp = 0; jp < last; ++jp) {
        differences_(last, jp) = differences_(jp, last) = std::abs(z - responses_(jp));
    }
    differences_(last, last) = 0.0;
    return weights_.cwiseProduct(differences_).rowwise().sum();
}

Algorithm2Result algorithm2(const ObservedMatrix& obs, const ScorerConfig& config, double alpha,
                            const Grid& grid, const Matrix& guess, const KernelConstants& kernel) {
    if (config.kind != ScorerKind::NeighborhoodSmoothing) {
        throw std::invalid_argument("algorithm 2 needs the neighborhood-smoothing score");
    }
    check_alpha(alpha);
    check_grid(grid, obs.bound());
    const ScoreEngine engine(obs, guess, config);
    const Index n = obs.n();

    Algorithm2Result result;
    result.bandwidths = engine.bandwidths();
    result.stability = tau_bounds(obs, kernel, result.bandwidths.minCoeff());

    CachedNsScorer scanner(engine.kernel_weights(),
                           engine.base().values().row(n).head(n).transpose());
    std::vector<bool> accepted(static_cast<std::size_t>(grid.points));
    for (Index g = 0; g < grid.points; ++g) {
        accepted[static_cast<std::size_t>(g)] =
            accept_shifted(scanner.scores(grid.at(g)), result.stability.tau, alpha);
    }
    result.set = PredictionSet::from_grid(grid, accepted);
    return result;
}

}  // namespace mxconf
