#include "mxconf/matrix_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mxconf {

namespace {

bool same_entry(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::string position(Index i, Index j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

ObservedMatrix::ObservedMatrix(Matrix entries, double bound)
    : ObservedMatrix(entries, bound, canonical_target(entries.rows())) {}

ObservedMatrix::ObservedMatrix(Matrix entries, double bound, EntryIndex target)
    : entries_(std::move(entries)), bound_(bound), target_(target) {
    validate();
}

ObservedMatrix ObservedMatrix::with_mask(const Matrix& values, const Mask& mask, double bound) {
    return with_mask(values, mask, bound, canonical_target(values.rows()));
}

ObservedMatrix ObservedMatrix::with_mask(const Matrix& values, const Mask& mask, double bound,
                                         EntryIndex target) {
    if (mask.rows() != values.rows() || mask.cols() != values.cols()) {
        throw std::invalid_argument("mask shape does not match matrix shape");
    }
    Matrix entries = values;
    for (Index j = 0; j < entries.cols(); ++j) {
        for (Index i = 0; i < entries.rows(); ++i) {
            if (mask(i, j)) entries(i, j) = kMissing;
        }
    }
    return ObservedMatrix(std::move(entries), bound, target);
}

void ObservedMatrix::validate() const {
    const Index order = entries_.rows();
    if (entries_.cols() != order) throw std::invalid_argument("matrix must be square");
    if (order < 2) throw std::invalid_argument("matrix order must be at least 2");
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) {
        throw std::invalid_argument("entry bound C0 must be positive and finite");
    }
    if (target_.row < 0 || target_.row >= order || target_.col < 0 || target_.col >= order ||
        target_.row == target_.col) {
        throw std::invalid_argument("target " + position(target_.row, target_.col) +
                                    " is not an off-diagonal position");
    }
    for (Index j = 0; j < order; ++j) {
        for (Index i = 0; i < order; ++i) {
            if (is_target(i, j)) continue;
            const double v = entries_(i, j);
            if (!same_entry(v, entries_(j, i))) {
                throw std::invalid_argument("matrix is not symmetric at " + position(i, j));
            }
            if (std::isinf(v)) throw std::invalid_argument("infinite entry at " + position(i, j));
            if (!std::isnan(v) && std::abs(v) > bound_) {
                throw std::invalid_argument("entry " + position(i, j) + " = " + std::to_string(v) +
                                            " exceeds bound C0 = " + std::to_string(bound_));
            }
        }
    }
}

bool ObservedMatrix::is_target(Index i, Index j) const {
    return (i == target_.row && j == target_.col) || (i == target_.col && j == target_.row);
}

bool ObservedMatrix::is_missing(Index i, Index j) const {
    return !is_target(i, j) && std::isnan(entries_(i, j));
}

Mask ObservedMatrix::mask() const {
    Mask m(order(), order());
    for (Index j = 0; j < order(); ++j) {
        for (Index i = 0; i < order(); ++i) m(i, j) = is_missing(i, j);
    }
    return m;
}

Index ObservedMatrix::missing_pair_count() const {
    Index count = 0;
    for (Index j = 0; j < order(); ++j) {
        for (Index i = 0; i <= j; ++i) count += is_missing(i, j) ? 1 : 0;
    }
    return count;
}

double ObservedMatrix::value(Index i, Index j) const {
    if (is_target(i, j)) throw std::invalid_argument("the target entry is never read");
    if (is_missing(i, j)) throw std::invalid_argument("entry " + position(i, j) + " is missing");
    return entries_(i, j);
}

bool operator==(const ObservedMatrix& a, const ObservedMatrix& b) {
    if (a.order() != b.order() || a.bound_ != b.bound_ || !(a.target_ == b.target_)) return false;
    for (Index j = 0; j < a.order(); ++j) {
        for (Index i = 0; i < a.order(); ++i) {
            if (!same_entry(a.entries_(i, j), b.entries_(i, j))) return false;
        }
    }
    return true;
}

FilledMatrix::FilledMatrix(Matrix values, double bound, EntryIndex target)
    : values_(std::move(values)), bound_(bound), target_(target) {
    if (values_.rows() != values_.cols()) throw std::invalid_argument("matrix must be square");
    if (!values_.allFinite()) throw std::invalid_argument("filled matrix has non-finite entries");
    for (Index j = 0; j < order(); ++j) {
        for (Index i = j + 1; i < order(); ++i) {
            if (values_(i, j) != values_(j, i)) {
                throw std::invalid_argument("filled matrix is not symmetric at " + position(i, j));
            }
        }
    }
}

FilledMatrix fill_missing(const ObservedMatrix& obs, const Matrix& guess) {
    const Index order = obs.order();
    if (guess.rows() != order || guess.cols() != order) {
        throw std::invalid_argument("guess order " + std::to_string(guess.rows()) + "x" +
                                    std::to_string(guess.cols()) + " does not match matrix order " +
                                    std::to_string(order));
    }
    Matrix values = obs.entries();
    for (Index j = 0; j < order; ++j) {
        for (Index i = 0; i < order; ++i) {
            if (!obs.is_missing(i, j) && !obs.is_target(i, j)) continue;
            const double z = guess(i, j);
            if (!std::isfinite(z)) {
                throw std::invalid_argument("guess is not finite at " + position(i, j));
            }
            if (z != guess(j, i)) {
                throw std::invalid_argument("guess is not symmetric at masked " + position(i, j));
            }
            values(i, j) = z;
        }
    }
    return FilledMatrix(std::move(values), obs.bound(), obs.target());
}

FilledMatrix set_target(const FilledMatrix& filled, double z) {
    if (!(std::abs(z) <= filled.bound())) {
        throw std::invalid_argument("candidate value " + std::to_string(z) +
                                    " outside [-C0, C0]");
    }
    Matrix values = filled.values();
    const EntryIndex t = filled.target();
    values(t.row, t.col) = z;
    values(t.col, t.row) = z;
    return FilledMatrix(std::move(values), filled.bound(), t);
}

MissingnessSummary missing_counts(const ObservedMatrix& obs) {
    const Index order = obs.order();
    MissingnessSummary summary;
    summary.m.assign(static_cast<std::size_t>(order), 0);
    for (Index i = 0; i < order; ++i) {
        for (Index j = 0; j < order; ++j) {
            if (j != i && obs.is_missing(i, j)) ++summary.m[static_cast<std::size_t>(i)];
        }
    }
    const Index n = obs.n();
    Index total = 0;
    for (Index i = 0; i < n; ++i) total += summary.m[static_cast<std::size_t>(i)];
    summary.m_bar = static_cast<double>(total) / static_cast<double>(n);
    summary.m_target_row = summary.m[static_cast<std::size_t>(n)];
    return summary;
}

bool is_permutation(const Permutation& perm, Index size) {
    if (static_cast<Index>(perm.size()) != size) return false;
    std::vector<bool> seen(perm.size(), false);
    for (Index p : perm) {
        if (p < 0 || p >= size || seen[static_cast<std::size_t>(p)]) return false;
        seen[static_cast<std::size_t>(p)] = true;
    }
    return true;
}

Permutation invert(const Permutation& perm) {
    Permutation inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<Index>(i);
    return inv;
}

Matrix permute_matrix(const Matrix& m, const Permutation& perm) {
    if (!is_permutation(perm, m.rows()) || m.rows() != m.cols()) {
        throw std::invalid_argument("not a permutation of the matrix indices");
    }
    Matrix out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = m(i, j);
        }
    }
    return out;
}

Mask permute_mask(const Mask& m, const Permutation& perm) {
    if (!is_permutation(perm, m.rows()) || m.rows() != m.cols()) {
        throw std::invalid_argument("not a permutation of the mask indices");
    }
    Mask out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            out(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = m(i, j);
        }
    }
    return out;
}

namespace {

Permutation extend_fixing_last(const Permutation& perm, Index n) {
    if (!is_permutation(perm, n)) {
        throw std::invalid_argument("permutation must be a bijection of [0, n)");
    }
    Permutation full = perm;
    full.push_back(n);
    return full;
}

EntryIndex map_entry(EntryIndex e, const Permutation& full) {
    return {full[static_cast<std::size_t>(e.row)], full[static_cast<std::size_t>(e.col)]};
}

}  // namespace

ObservedMatrix permute(const ObservedMatrix& obs, const Permutation& perm) {
    const Permutation full = extend_fixing_last(perm, obs.n());
    return ObservedMatrix(permute_matrix(obs.entries(), full), obs.bound(),
                          map_entry(obs.target(), full));
}

Matrix permute_fixing_last(const Matrix& m, const Permutation& perm) {
    return permute_matrix(m, extend_fixing_last(perm, m.rows() - 1));
}

Relabeling relabel_target(const ObservedMatrix& obs, Index row, Index col) {
    const Index order = obs.order();
    if (row < 0 || row >= order || col < 0 || col >= order) {
        throw std::out_of_range("entry " + position(row, col) + " outside a matrix of order " +
                                std::to_string(order));
    }
    if (row == col) throw std::invalid_argument("target must be off-diagonal");

    Permutation perm(static_cast<std::size_t>(order));
    for (Index i = 0; i < order; ++i) perm[static_cast<std::size_t>(i)] = i;
    const auto swap_labels = [&](Index a, Index b) {
        for (Index& p : perm) {
            if (p == a) p = b;
            else if (p == b) p = a;
        }
    };
    const EntryIndex canon = canonical_target(order);
    swap_labels(row, canon.row);
    swap_labels(perm[static_cast<std::size_t>(col)], canon.col);

    ObservedMatrix moved(permute_matrix(obs.entries(), perm), obs.bound(), canon);
    return Relabeling{std::move(moved), std::move(perm), obs.target()};
}

ObservedMatrix restore(const Relabeling& relabeled) {
    return ObservedMatrix(permute_matrix(relabeled.matrix.entries(), invert(relabeled.perm)),
                          relabeled.matrix.bound(), relabeled.original_target);
}

}  // namespace mxconf
