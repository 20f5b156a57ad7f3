#include "mxconf/simgen.hpp"

#include "mxconf/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mxconf {

std::string to_string(Graphon g) {
    switch (g) {
        case Graphon::F1: return "F1";
        case Graphon::F2: return "F2";
        case Graphon::F3: return "F3";
    }
    return "?";
}

Graphon parse_graphon(const std::string& name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "F1") return Graphon::F1;
    if (upper == "F2") return Graphon::F2;
    if (upper == "F3") return Graphon::F3;
    throw std::invalid_argument("unknown graphon '" + name + "' (expected F1, F2 or F3)");
}

double graphon_value(Graphon g, double u, double v) {
    switch (g) {
        case Graphon::F1: return 2.5 * (u + v) - 0.75;
        case Graphon::F2: {
            const double a = u - 0.5;
            const double b = v - 0.5;
            return 2.5 * std::cos(0.1 / (a * a * a + b * b * b + 0.01)) *
                       std::pow(std::max(u, v), 2.0 / 3.0) +
                   2.0;
        }
        case Graphon::F3: {
            const double u2 = u * u;
            const double v2 = v * v;
            return 5.0 / 3.0 * (u2 + v2) * std::cos(1.0 / (u2 * u2 + v2 * v2)) + 0.75;
        }
    }
    throw std::invalid_argument("unknown graphon");
}

double default_bound(Graphon g) {
    switch (g) {
        case Graphon::F1: return 4.4;
        case Graphon::F2: return 4.6;
        case Graphon::F3: return 4.3;
    }
    throw std::invalid_argument("unknown graphon");
}

void GraphonSpec::validate() const {
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    if (!(xi_target > 0.0 && xi_target < 1.0)) throw std::invalid_argument("xi_target must be in (0, 1)");
    if (!(noise_halfwidth >= 0.0)) throw std::invalid_argument("noise_halfwidth must be nonnegative");
    if (bound && !(*bound > 0.0)) throw std::invalid_argument("C0 must be positive");
}

SyntheticInstance sample_instance(const GraphonSpec& spec) {
    spec.validate();
    const Index order = spec.n + 1;
    const double c0 = spec.effective_bound();
    Rng rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> noise(-spec.noise_halfwidth, spec.noise_halfwidth);

    Vector xi(order);
    for (Index i = 0; i < spec.n; ++i) {
        double u = unit(rng);
        while (u <= 0.0) u = unit(rng);
        xi(i) = u;
    }
    xi(spec.n) = spec.xi_target;

    Matrix a(order, order);
    for (Index j = 0; j < order; ++j) {
        for (Index i = 0; i <= j; ++i) {
            const double e = spec.noise_halfwidth > 0.0 ? noise(rng) : 0.0;
            const double v = graphon_value(spec.graphon, xi(i), xi(j)) + e;
            if (!(std::abs(v) <= c0)) {
                throw std::runtime_error("generated entry exceeds C0 = " + std::to_string(c0));
            }
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    const EntryIndex target = canonical_target(order);
    const double truth = a(target.row, target.col);
    return SyntheticInstance{FilledMatrix(std::move(a), c0, target), std::move(xi), truth};
}

Index eligible_pair_count(Index n) {
    const Index order = n + 1;
    return order * (order - 1) / 2 - 1;
}

namespace {

std::vector<EntryIndex> eligible_pairs(Index order) {
    const EntryIndex target = canonical_target(order);
    std::vector<EntryIndex> pairs;
    for (Index i = 0; i < order; ++i) {
        for (Index j = i + 1; j < order; ++j) {
            if (i == target.col && j == target.row) continue;
            pairs.push_back({i, j});
        }
    }
    return pairs;
}

void check_count(Index m0, Index available) {
    if (m0 < 0 || m0 > available) {
        throw std::invalid_argument("m0 = " + std::to_string(m0) + " is outside [0, " +
                                    std::to_string(available) + "]");
    }
}

}  // namespace

Mask mask_single_target(Index n) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    return Mask::Constant(n + 1, n + 1, false);
}

Mask mask_mnar_largest(const Matrix& complete, Index m0) {
    const Index order = complete.rows();
    std::vector<EntryIndex> pairs = eligible_pairs(order);
    check_count(m0, static_cast<Index>(pairs.size()));
    // eligible_pairs is already lexicographic, so a stable sort keeps that order among ties.
    std::stable_sort(pairs.begin(), pairs.end(), [&](const EntryIndex& x, const EntryIndex& y) {
        return complete(x.row, x.col) > complete(y.row, y.col);
    });
    Mask mask = Mask::Constant(order, order, false);
    for (Index k = 0; k < m0; ++k) {
        const EntryIndex p = pairs[static_cast<std::size_t>(k)];
        mask(p.row, p.col) = mask(p.col, p.row) = true;
    }
    return mask;
}

Mask mask_mcar(Index n, Index m0, std::uint64_t seed) {
    const Index order = n + 1;
    std::vector<EntryIndex> pairs = eligible_pairs(order);
    check_count(m0, static_cast<Index>(pairs.size()));
    Rng rng(seed);
    // Partial Fisher-Yates: the first m0 slots end up a uniform random subset.
    for (Index k = 0; k < m0; ++k) {
        std::uniform_int_distribution<Index> pick(k, static_cast<Index>(pairs.size()) - 1);
        std::swap(pairs[static_cast<std::size_t>(k)], pairs[static_cast<std::size_t>(pick(rng))]);
    }
    Mask mask = Mask::Constant(order, order, false);
    for (Index k = 0; k < m0; ++k) {
        const EntryIndex p = pairs[static_cast<std::size_t>(k)];
        mask(p.row, p.col) = mask(p.col, p.row) = true;
    }
    return mask;
}

ObservedMatrix observe(const SyntheticInstance& instance, const Mask& mask) {
    Matrix entries = instance.complete.values();
    const EntryIndex t = instance.complete.target();
    entries(t.row, t.col) = kMissing;
    entries(t.col, t.row) = kMissing;
    return ObservedMatrix::with_mask(entries, mask, instance.complete.bound(), t);
}

}  // namespace mxconf
