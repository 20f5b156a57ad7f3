// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.
// Defaults run the full replication counts; --quick scales them down for development.

#include "mxconf/conformal.hpp"
#include "mxconf/harness.hpp"
#include "mxconf/random.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

using namespace mxconf;

namespace {

struct Options {
    double scale = 1.0;
    unsigned threads = 0;
    std::uint64_t seed = 20240601;
    std::string only;
    std::string out_dir;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

Index scaled(Index reps, const Options& opt) {
    return std::max<Index>(1, static_cast<Index>(std::llround(static_cast<double>(reps) * opt.scale)));
}

void progress(const Cell& cell, std::size_t i, std::size_t total) {
    std::cerr << "  [" << i + 1 << "/" << total << "] " << to_string(cell.graphon) << " n=" << cell.n
              << " xi=" << cell.xi_target << " m0=" << cell.m0 << std::endl;
}

void save(const Options& opt, const std::string& name, const std::vector<ReplicationRecord>& records) {
    if (opt.out_dir.empty()) return;
    const std::string path = opt.out_dir + "/" + name + ".csv";
    std::ofstream rec(path), ivs(sidecar_path(path, "intervals")), sum(sidecar_path(path, "summary"));
    write_records_csv(rec, records);
    write_intervals_csv(ivs, records);
    write_summary_csv(sum, summarize(records));
}

std::string coverage_table(const std::vector<CellSummary>& summary) {
    std::ostringstream os;
    for (const CellSummary& s : summary) {
        os << "\n    " << to_string(s.graphon) << " xi=" << fixed(s.xi_target, 1) << " m0=" << s.m0
           << " coverage=" << fixed(s.coverage, 3) << " (se " << fixed(s.coverage_se, 4) << ", "
           << s.replications << " reps, " << s.failures << " failed) mean length="
           << fixed(s.mean_total_length, 3) << " trivial=" << fixed(s.trivial_fraction, 3);
    }
    return os.str();
}

// ---- criteria -------------------------------------------------------------------------------------

Outcome coverage_single_target(const Options& opt) {
    ExperimentConfig c;
    c.graphons = {Graphon::F1, Graphon::F2, Graphon::F3};
    c.n_values = {50};
    c.xi_targets = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    c.alpha = 0.1;
    c.replications = scaled(1000, opt);
    c.method = Method::Algorithm1;
    c.missingness = Missingness::SingleTarget;
    c.seed = opt.seed;
    c.threads = opt.threads;
    const auto records = run_experiment(c, progress);
    save(opt, "coverage_single_target", records);
    const auto summary = summarize(records);
    bool pass = true;
    double lo = 1.0, hi = 0.0;
    for (const CellSummary& s : summary) {
        lo = std::min(lo, s.coverage);
        hi = std::max(hi, s.coverage);
        pass = pass && s.failures == 0 && s.coverage >= 0.87 && s.coverage <= 0.93;
    }
    return {pass, "alg1, n=50, alpha=0.1, " + std::to_string(c.replications) +
                      " reps per cell, 27 cells; coverage range [" + fixed(lo, 3) + ", " + fixed(hi, 3) +
                      "], band [0.87, 0.93]" + coverage_table(summary)};
}

Outcome coverage_mnar(const Options& opt) {
    ExperimentConfig c;
    c.graphons = {Graphon::F1};
    c.n_values = {50};
    c.xi_targets = {0.9};
    c.alpha = 0.1;
    c.replications = scaled(500, opt);
    c.method = Method::Algorithm2;
    c.missingness = Missingness::MnarLargest;
    c.m0_values = {5, 25, 50};
    c.seed = opt.seed;
    c.threads = opt.threads;
    const auto records = run_experiment(c, progress);
    save(opt, "coverage_mnar", records);
    const auto summary = summarize(records);
    bool pass = true;
    double lo = 1.0;
    for (const CellSummary& s : summary) {
        lo = std::min(lo, s.coverage);
        pass = pass && s.failures == 0 && s.coverage >= 0.87;
    }
    return {pass, "alg2, F1, n=50, xi=0.9, m0 in {5,25,50}, " + std::to_string(c.replications) +
                      " reps; minimum coverage " + fixed(lo, 3) + " (threshold 0.87)" + coverage_table(summary)};
}

Outcome triviality(const Options& opt) {
    Rng rng(child_seed(opt.seed, 101));
    const double alpha = 0.1;
    int exceptions = 0;
    int instances = 0;
    ScorerConfig ns;
    ns.kind = ScorerKind::NeighborhoodSmoothing;
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> g(0, 2);
        std::uniform_int_distribution<Index> pick_n(20, 60);
        std::uniform_real_distribution<double> xi(0.05, 0.95);
        GraphonSpec spec;
        spec.graphon = static_cast<Graphon>(g(rng));
        spec.n = pick_n(rng);
        spec.xi_target = xi(rng);
        spec.seed = rng();
        const SyntheticInstance inst = sample_instance(spec);
        const Index n = spec.n;
        const Index need = lower_quantile_rank(alpha, n);  // ⌈αn⌉
        std::uniform_int_distribution<Index> extra_row(0, n - 1 - need);
        const Index row_missing = need + extra_row(rng);

        Mask mask = mask_mcar(n, std::uniform_int_distribution<Index>(0, 3 * n)(rng), rng());
        std::vector<Index> cols(static_cast<std::size_t>(n - 1));
        std::iota(cols.begin(), cols.end(), Index{0});
        std::shuffle(cols.begin(), cols.end(), rng);
        for (Index c = 0; c < n - 1; ++c) mask(n, cols[c]) = mask(cols[c], n) = c < row_missing;
        const ObservedMatrix obs = observe(inst, mask);
        if (!is_trivial_forced(missing_counts(obs), alpha)) {
            ++exceptions;
            continue;
        }
        const auto kind = static_cast<GuessStrategy::Kind>(std::uniform_int_distribution<int>(0, 3)(rng));
        const Matrix guess = draw_guess(obs, {kind, 0.5, rng()});
        const Algorithm2Result r = algorithm2(obs, ns, alpha, Grid::symmetric(obs.bound()), guess);
        ++instances;
        if (!r.set.is_trivial()) ++exceptions;
    }
    return {exceptions == 0, std::to_string(instances) +
                                 " random instances (F1-F3, n in [20,60], m_{n+1} >= ceil(alpha n), alpha=0.1); " +
                                 std::to_string(exceptions) + " non-trivial results"};
}

Outcome symmetry(const Options& opt) {
    Rng rng(child_seed(opt.seed, 102));
    double worst_svd = 0.0;
    double worst_ns = 0.0;
    for (ScorerKind kind : {ScorerKind::Svd, ScorerKind::NeighborhoodSmoothing}) {
        ScorerConfig cfg;
        cfg.kind = kind;
        double& worst = kind == ScorerKind::Svd ? worst_svd : worst_ns;
        for (int trial = 0; trial < 50; ++trial) {
            GraphonSpec spec;
            spec.graphon = static_cast<Graphon>(trial % 3);
            spec.n = std::uniform_int_distribution<Index>(10, 60)(rng);
            spec.xi_target = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
            spec.seed = rng();
            const Matrix a = sample_instance(spec).complete.values();
            Permutation p(static_cast<std::size_t>(spec.n));
            std::iota(p.begin(), p.end(), Index{0});
            std::shuffle(p.begin(), p.end(), rng);
            const ScoreVector s = score_complete(a, cfg);
            const ScoreVector t = score_complete(permute_fixing_last(a, p), cfg);
            for (Index j = 0; j < spec.n; ++j) worst = std::max(worst, std::abs(t(p[j]) - s(j)));
        }
    }
    const bool pass = worst_svd <= 1e-8 && worst_ns <= 1e-12;
    return {pass, "50 (matrix, permutation) pairs per scorer, n in [10,60]; max deviation SVD " + sci(worst_svd) +
                      " (tol 1e-8), NS " + sci(worst_ns) + " (tol 1e-12)"};
}

Outcome accept_enumeration(const Options&) {
    long checked = 0;
    long disagreements = 0;
    for (int n = 1; n <= 8; ++n) {
        long total = 1;
        for (int k = 0; k < n; ++k) total *= 3;
        for (long code = 0; code < total; ++code) {
            std::vector<double> v(static_cast<std::size_t>(n));
            long c = code;
            for (int k = 0; k < n; ++k, c /= 3) v[static_cast<std::size_t>(k)] = static_cast<double>(c % 3);
            const Vector s = Eigen::Map<const Vector>(v.data(), n);
            for (int a = 1; a <= 19; ++a) {
                const double alpha = 0.05 * a;
                ++checked;
                if (accept(s, alpha) != oracle::accept_by_rank(v, alpha)) ++disagreements;
            }
        }
    }
    return {disagreements == 0, "all score vectors of length 1..8 over {0,1,2} x 19 alpha levels: " +
                                    std::to_string(checked) + " cases, " + std::to_string(disagreements) +
                                    " disagreements"};
}

Outcome bracketing(const Options& opt) {
    Rng rng(child_seed(opt.seed, 103));
    const double alpha = 0.1;
    long violations = 0;
    long comparisons = 0;
    int containment_failures = 0;
    int containment_failures_own_bw = 0;
    int with_row_missing = 0;
    long capped_violations = 0;
    long uncapped_violations = 0;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        GraphonSpec spec;
        spec.graphon = static_cast<Graphon>(trial % 3);
        spec.n = std::uniform_int_distribution<Index>(20, 50)(rng);
        spec.xi_target = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        spec.seed = rng();
        const SyntheticInstance inst = sample_instance(spec);
        const Index n = spec.n;
        const Index m0 = std::uniform_int_distribution<Index>(1, 4 * n)(rng);
        const Mask mask = trial % 2 == 0 ? mask_mcar(n, m0, rng())
                                         : mask_mnar_largest(inst.complete.values(), m0);
        const ObservedMatrix obs = observe(inst, mask);
        const auto kind = static_cast<GuessStrategy::Kind>(trial % 4);
        const Matrix guess = draw_guess(obs, {kind, 0.5, rng()});
        if (missing_counts(obs).m_target_row > 0) ++with_row_missing;

        ScorerConfig ns;
        ns.kind = ScorerKind::NeighborhoodSmoothing;
        const Grid grid = Grid::symmetric(obs.bound());
        const Algorithm2Result r = algorithm2(obs, ns, alpha, grid, guess);

        // Oracle guess Z = A, scored with the same bandwidths.
        ScorerConfig fixed_bw = ns;
        fixed_bw.ns_bandwidths = r.bandwidths;
        const ScoreEngine with_guess(obs, guess, fixed_bw);
        const ScoreEngine with_truth(obs, inst.complete.values(), fixed_bw);
        const double z = grid.at(std::uniform_int_distribution<Index>(0, grid.points - 1)(rng));
        const ScoreVector sg = with_guess.scores(z);
        const ScoreVector st = with_truth.scores(z);
        const MissingnessSummary ms = missing_counts(obs);
        for (Index j = 0; j < n; ++j) {
            ++comparisons;
            const double gap = std::abs(sg(j) - st(j));
            if (r.stability.tau(j) > 0.0) worst_ratio = std::max(worst_ratio, gap / r.stability.tau(j));
            // Same bound with the cap on the kernel term removed, for the diagnosis line.
            const StabilityBounds& b = r.stability;
            const double kernel_term = 4.0 * b.lipschitz * std::pow(b.bound, 3) / b.bandwidth *
                                       (static_cast<double>(ms.m[static_cast<std::size_t>(j)]) + 3.0 * ms.m_bar);
            const bool capped = kernel_term > 2.0 * b.bound * b.kernel_sup;
            const double uncapped = b.tau(j) + (capped ? kernel_term - 2.0 * b.bound * b.kernel_sup : 0.0);
            if (gap > b.tau(j)) {
                ++violations;
                capped_violations += capped ? 1 : 0;
            }
            if (gap > uncapped) ++uncapped_violations;
        }
        const PredictionSet oracle = conformal_1d(obs, inst.complete.values(), fixed_bw, alpha, grid);
        if (!r.set.includes(oracle)) ++containment_failures;
        const PredictionSet oracle_own = conformal_1d(obs, inst.complete.values(), ns, alpha, grid);
        if (!r.set.includes(oracle_own)) ++containment_failures_own_bw;
    }
    const bool pass = violations == 0 && containment_failures == 0;
    return {pass, "100 (A, mask, guess, z) tuples (" + std::to_string(with_row_missing) +
                      " with target-row missingness); " + std::to_string(violations) + " violations of |S(guess) - S(A)| <= tau in " +
                      std::to_string(comparisons) + " comparisons (max gap/tau " + fixed(worst_ratio, 3) +
                      "); alg2 set misses the oracle-guess set in " + std::to_string(containment_failures) +
                      " trials\n    (info: " + std::to_string(capped_violations) +
                      " of the violations are in columns where the 2*C0*C_K cap is active; without the cap " +
                      std::to_string(uncapped_violations) + " violations)\n    (info: with bandwidths re-selected from the oracle-filled matrix, containment fails in " +
                      std::to_string(containment_failures_own_bw) + " trials)"};
}

Outcome tau_spot(const Options&) {
    const Index n = 10;
    const Index j0 = 4;
    Matrix a = Matrix::Zero(n + 1, n + 1);
    a(n, j0) = a(j0, n) = kMissing;
    const StabilityBounds b = tau_bounds(ObservedMatrix(a, 1.0), KernelConstants{1.0, 1.0}, 0.5);
    bool pass = true;
    for (Index j = 0; j < n; ++j) pass = pass && b.tau(j) == (j == j0 ? 20.0 : 4.0);
    return {pass, "n=10, C0=1, L0=1, C_K=1, h=0.5, one missing pair in the target row: tau(j0)=" +
                      fixed(b.tau(j0), 12) + " (expected 20), tau(other)=" + fixed(b.tau(0), 12) + " (expected 4)"};
}

std::string without_time(const std::vector<ReplicationRecord>& records) {
    std::ostringstream out;
    write_records_csv(out, records);
    return std::regex_replace(out.str(), std::regex(",[^,\n]*,([0-9]+)\n"), ",T,$1\n");
}

Outcome determinism(const Options& opt) {
    bool pass = true;
    std::size_t rows = 0;
    for (Method method : {Method::Algorithm1, Method::Algorithm2}) {
        ExperimentConfig c;
        c.graphons = {Graphon::F1, Graphon::F3};
        c.n_values = {50};
        c.xi_targets = {0.3, 0.8};
        c.replications = scaled(10, opt);
        c.method = method;
        c.missingness = Missingness::Mcar;
        c.m0_values = {0, 20};
        c.grid_points = 101;
        c.iter_max = 3;
        c.seed = opt.seed;
        c.threads = opt.threads;
        const std::string first = without_time(run_experiment(c));
        c.threads = c.threads == 1 ? 2 : 1;
        const std::string second = without_time(run_experiment(c));
        pass = pass && first == second;
        rows += static_cast<std::size_t>(std::count(first.begin(), first.end(), '\n')) - 1;
    }
    return {pass, "two runs per method with the same master seed and different thread counts; " +
                      std::to_string(rows) + " rows compared excluding time_ms"};
}

Outcome performance(const Options& opt) {
    Rng rng(child_seed(opt.seed, 104));
    const int runs = 5;
    std::vector<double> alg1_full, alg1_single, alg2;
    ScorerConfig ns;
    ns.kind = ScorerKind::NeighborhoodSmoothing;
    const auto time_ms = [](const std::function<void()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };
    for (int r = 0; r < runs; ++r) {
        GraphonSpec spec;
        spec.graphon = static_cast<Graphon>(r % 3);
        spec.n = 50;
        spec.seed = rng();
        const SyntheticInstance inst = sample_instance(spec);
        const ObservedMatrix obs = observe(inst, mask_mcar(50, 25, rng()));
        const Grid grid = Grid::symmetric(obs.bound(), 401);
        const auto strategies = default_strategies(8, rng());
        alg1_full.push_back(time_ms([&] { algorithm1(obs, ScorerConfig{}, 0.1, grid, strategies, 8); }));
        alg1_single.push_back(time_ms([&] { algorithm1(obs, ScorerConfig{}, 0.1, grid, strategies, 1); }));
        alg2.push_back(time_ms([&] {
            const Matrix guess = draw_guess(obs, strategies[0]);
            algorithm2(obs, ns, 0.1, grid, guess);
        }));
    }
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    const double full = *std::max_element(alg1_full.begin(), alg1_full.end());
    const double ratio = median(alg2) / median(alg1_single);
    const bool pass = full < 5000.0 && ratio <= 1.5;
    return {pass, "n=50, grid 401, 25 missing pairs: slowest alg1 (iter_max 8) " + fixed(full, 1) +
                      " ms (limit 5000); median alg2 " + fixed(median(alg2), 2) + " ms vs alg1 single guess " +
                      fixed(median(alg1_single), 1) + " ms, ratio " + fixed(ratio, 4) + " (limit 1.5)"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria for the matrix conformal prediction library"};
    Options opt;
    bool quick = false;
    app.add_flag("--quick", quick, "Scale replication counts by 0.1 (development only)");
    app.add_option("--scale", opt.scale, "Replication scale factor (default 1)");
    app.add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
    app.add_option("--seed", opt.seed, "Master seed");
    app.add_option("--only", opt.only, "Run only criteria whose name contains this text");
    app.add_option("--out-dir", opt.out_dir, "Write the simulation records of the coverage criteria here");
    CLI11_PARSE(app, argc, argv);
    if (quick) opt.scale = 0.1;

    const std::vector<std::pair<std::string, std::function<Outcome(const Options&)>>> criteria{
        {"coverage-single-target", coverage_single_target},
        {"coverage-mnar", coverage_mnar},
        {"fundamental-limit-triviality", triviality},
        {"row-conditional-symmetry", symmetry},
        {"accept-rank-oracle", accept_enumeration},
        {"stability-bracketing", bracketing},
        {"tau-spot-value", tau_spot},
        {"determinism", determinism},
        {"performance", performance},
    };

    if (opt.scale != 1.0) std::cout << "note: replication counts scaled by " << opt.scale << '\n';
    int failed = 0;
    int ran = 0;
    for (const auto& [name, run] : criteria) {
        if (!opt.only.empty() && name.find(opt.only) == std::string::npos) continue;
        ++ran;
        std::cerr << "running " << name << std::endl;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = run(opt);
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << name << ": " << out.detail << " ["
                  << fixed(secs, 1) << " s]" << std::endl;
        failed += out.pass ? 0 : 1;
    }
    std::cout << "acceptance: " << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
