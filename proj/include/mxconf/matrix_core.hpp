#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace mxconf {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Marker stored in place of an unobserved entry.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct EntryIndex {
    Index row = 0;
    Index col = 0;
    friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

/// Canonical prediction target (n+1, n) for a matrix of the given order, 0-based.
inline EntryIndex canonical_target(Index order) { return {order - 1, order - 2}; }

/**
 * Symmetric matrix of order n+1 with missing entries.
 *
 * Missing entries hold NaN. The target slot and its mirror are never read and
 * never flagged in the mask; the target is tracked separately. Whatever value
 * the caller leaves there is carried along so that relabelings round-trip.
 */
class ObservedMatrix {
public:
    /// NaN entries are missing. Target defaults to the canonical (n+1, n).
    ObservedMatrix(Matrix entries, double bound);
    ObservedMatrix(Matrix entries, double bound, EntryIndex target);

    /// Positions with mask(i,j) set are replaced by the missing marker.
    static ObservedMatrix with_mask(const Matrix& values, const Mask& mask, double bound);
    static ObservedMatrix with_mask(const Matrix& values, const Mask& mask, double bound,
                                    EntryIndex target);

    Index order() const { return entries_.rows(); }
    /// Number of calibration columns, i.e. order() - 1.
    Index n() const { return entries_.rows() - 1; }
    double bound() const { return bound_; }
    EntryIndex target() const { return target_; }
    bool has_canonical_target() const { return target_ == canonical_target(order()); }
    bool is_target(Index i, Index j) const;

    /// Mask value M(i,j); always false on the target pair.
    bool is_missing(Index i, Index j) const;
    Mask mask() const;
    /// Number of missing unordered pairs (i <= j), diagonal included.
    Index missing_pair_count() const;

    /// Observed value; throws for missing or target positions.
    double value(Index i, Index j) const;
    const Matrix& entries() const { return entries_; }

    friend bool operator==(const ObservedMatrix& a, const ObservedMatrix& b);

private:
    void validate() const;

    Matrix entries_;
    double bound_;
    EntryIndex target_;
};

/// Fully populated symmetric matrix built from an ObservedMatrix and guesses.
class FilledMatrix {
public:
    FilledMatrix(Matrix values, double bound, EntryIndex target);

    Index order() const { return values_.rows(); }
    Index n() const { return values_.rows() - 1; }
    double bound() const { return bound_; }
    EntryIndex target() const { return target_; }
    const Matrix& values() const { return values_; }
    double operator()(Index i, Index j) const { return values_(i, j); }
    double target_value() const { return values_(target_.row, target_.col); }

private:
    Matrix values_;
    double bound_;
    EntryIndex target_;
};

struct MissingnessSummary {
    /// m_i = number of missing off-diagonal entries of row i, for all n+1 rows.
    std::vector<Index> m;
    /// Mean of m over the first n rows.
    double m_bar = 0.0;
    /// m of the target row (row n+1).
    Index m_target_row = 0;
};

/// A ∘ (1−M) + Z ∘ M, with the target pair also taken from Z.
FilledMatrix fill_missing(const ObservedMatrix& obs, const Matrix& guess);

/// Copy of F with the target pair set to z.
FilledMatrix set_target(const FilledMatrix& filled, double z);

MissingnessSummary missing_counts(const ObservedMatrix& obs);

/// Full permutation of [0, order): perm[old] = new.
using Permutation = std::vector<Index>;

bool is_permutation(const Permutation& perm, Index size);
Permutation invert(const Permutation& perm);
/// result(perm[i], perm[j]) = m(i, j).
Matrix permute_matrix(const Matrix& m, const Permutation& perm);
Mask permute_mask(const Mask& m, const Permutation& perm);

/// Reorders rows/columns 0..n-1 by `perm` (length n); index n stays fixed.
ObservedMatrix permute(const ObservedMatrix& obs, const Permutation& perm);
/// Same as permute(), for a fully populated matrix of order n+1.
Matrix permute_fixing_last(const Matrix& m, const Permutation& perm);

struct Relabeling {
    ObservedMatrix matrix;
    /// Full permutation applied, perm[old] = new.
    Permutation perm;
    /// Target of the input matrix.
    EntryIndex original_target;
};

/// Swaps rows/columns so that entry (row, col) becomes the canonical target.
Relabeling relabel_target(const ObservedMatrix& obs, Index row, Index col);
/// Undoes relabel_target.
ObservedMatrix restore(const Relabeling& relabeled);

}  // namespace mxconf
