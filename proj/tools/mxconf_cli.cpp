// Command-line front end: predict an entry of a CSV matrix, run simulation
// experiments, and summarize their records.

#include "mxconf/conformal.hpp"
#include "mxconf/harness.hpp"
#include "mxconf/matrix_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr const char* kAssumptionWarning =
    "warning: coverage holds only if which entries are missing (and which entry is predicted) "
    "does not depend on the matrix values";

struct PredictOptions {
    std::string matrix;
    long row = 0;
    long col = 0;
    double bound = 0.0;
    std::string method = "alg1";
    double alpha = 0.1;
    long grid_points = mxconf::kDefaultGridPoints;
    long iter_max = mxconf::kDefaultIterMax;
    std::uint64_t seed = 1;
    std::string format = "text";
    std::string out;
    bool verbose = false;
};

struct SimulateOptions {
    std::string config;
    std::string out;
    std::optional<double> alpha;
    std::optional<std::string> method;
    std::optional<long> grid_points;
    std::optional<long> iter_max;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

std::string interval_list(const mxconf::PredictionSet& set) {
    if (set.empty()) return "(empty)";
    std::ostringstream os;
    os << std::setprecision(10);
    for (std::size_t i = 0; i < set.intervals().size(); ++i) {
        if (i > 0) os << " U ";
        os << '[' << set.intervals()[i].lo << ", " << set.intervals()[i].hi << ']';
    }
    return os.str();
}

int run_predict(const PredictOptions& opt) {
    using namespace mxconf;
    const Matrix values = read_matrix_csv_file(opt.matrix);
    const Index order = values.rows();
    if (opt.row < 1 || opt.row > order || opt.col < 1 || opt.col > order) {
        throw std::out_of_range("entry (" + std::to_string(opt.row) + ", " + std::to_string(opt.col) +
                                ") is outside a " + std::to_string(order) + "x" +
                                std::to_string(order) + " matrix");
    }
    const ObservedMatrix raw(values, opt.bound, canonical_target(order));
    const Relabeling relabeled = relabel_target(raw, opt.row - 1, opt.col - 1);
    const ObservedMatrix& obs = relabeled.matrix;
    const Grid grid = Grid::symmetric(obs.bound(), opt.grid_points);
    const Method method = parse_method(opt.method);

    PredictionSet set;
    std::optional<Algorithm2Result> alg2;
    if (method == Method::Algorithm1) {
        const auto strategies = default_strategies(opt.iter_max, opt.seed);
        set = algorithm1(obs, ScorerConfig{}, opt.alpha, grid, strategies, opt.iter_max);
    } else {
        ScorerConfig scorer;
        scorer.kind = ScorerKind::NeighborhoodSmoothing;
        const Matrix guess = draw_guess(obs, {GuessStrategy::Kind::EmpiricalIid, 0.5, opt.seed});
        alg2 = algorithm2(obs, scorer, opt.alpha, grid, guess);
        set = alg2->set;
    }

    std::cerr << kAssumptionWarning << '\n';
    std::ofstream file;
    if (!opt.out.empty()) {
        file.open(opt.out);
        if (!file) throw std::runtime_error("cannot write '" + opt.out + "'");
    }
    std::ostream& out = opt.out.empty() ? std::cout : file;

    if (opt.format == "json") {
        nlohmann::json report;
        report["row"] = opt.row;
        report["col"] = opt.col;
        report["method"] = opt.method;
        report["alpha"] = opt.alpha;
        report["c0"] = obs.bound();
        report["grid_points"] = opt.grid_points;
        report["intervals"] = nlohmann::json::array();
        for (const Interval& iv : set.intervals()) report["intervals"].push_back({iv.lo, iv.hi});
        report["total_length"] = set.total_length();
        report["hull_length"] = set.hull_length();
        report["is_trivial"] = set.is_trivial();
        report["warning"] = kAssumptionWarning;
        if (opt.verbose) {
            report["relabel_permutation"] = relabeled.perm;
            if (alg2) {
                report["tau"] = std::vector<double>(alg2->stability.tau.data(),
                                                    alg2->stability.tau.data() + alg2->stability.tau.size());
                report["bandwidth"] = alg2->stability.bandwidth;
            }
        }
        out << report.dump(2) << '\n';
        return 0;
    }

    out << std::setprecision(10);
    out << "target: (" << opt.row << ", " << opt.col << ") of a " << order << "x" << order << " matrix\n";
    out << "method: " << opt.method << "  alpha: " << opt.alpha << "  C0: " << obs.bound()
        << "  grid points: " << opt.grid_points << '\n';
    out << "prediction set: " << interval_list(set) << '\n';
    out << "total length: " << set.total_length() << '\n';
    out << "hull length: " << set.hull_length() << '\n';
    out << "trivial: " << (set.is_trivial() ? "true" : "false") << '\n';
    if (opt.verbose) {
        out << "relabel permutation (old -> new, 1-based):";
        for (std::size_t i = 0; i < relabeled.perm.size(); ++i) {
            if (static_cast<Index>(i) != relabeled.perm[i]) out << ' ' << i + 1 << "->" << relabeled.perm[i] + 1;
        }
        out << '\n';
        if (alg2) {
            out << "bandwidth h: " << alg2->stability.bandwidth << '\n';
            out << "tau:";
            for (Index j = 0; j < alg2->stability.tau.size(); ++j) out << ' ' << alg2->stability.tau(j);
            out << '\n';
        }
    }
    return 0;
}

int run_simulate(const SimulateOptions& opt) {
    using namespace mxconf;
    ExperimentConfig config = load_config(opt.config);
    if (!opt.out.empty()) config.output = opt.out;
    if (opt.alpha) config.alpha = *opt.alpha;
    if (opt.method) config.method = parse_method(*opt.method);
    if (opt.grid_points) config.grid_points = *opt.grid_points;
    if (opt.iter_max) config.iter_max = *opt.iter_max;
    if (opt.seed) config.seed = *opt.seed;
    if (opt.threads) config.threads = *opt.threads;
    config.validate();

    const auto records = run_experiment(config, [](const Cell& cell, std::size_t i, std::size_t total) {
        std::cerr << "[" << i + 1 << "/" << total << "] " << to_string(cell.graphon) << " n=" << cell.n
                  << " xi=" << cell.xi_target << " m0=" << cell.m0 << '\n';
    });

    const auto write = [](const std::string& path, const auto& fn) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        fn(out);
    };
    write(config.output, [&](std::ostream& out) { write_records_csv(out, records); });
    write(sidecar_path(config.output, "intervals"), [&](std::ostream& out) { write_intervals_csv(out, records); });
    write(sidecar_path(config.output, "summary"),
          [&](std::ostream& out) { write_summary_csv(out, summarize(records)); });
    std::cerr << "wrote " << records.size() << " records to " << config.output << '\n';
    return 0;
}

int run_summarize(const std::string& in_path, const std::string& out_path) {
    using namespace mxconf;
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open '" + in_path + "'");
    const auto summary = summarize(read_records_csv(in));
    if (out_path.empty()) {
        write_summary_csv(std::cout, summary);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
        write_summary_csv(out, summary);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal prediction sets for one entry of a partially observed symmetric matrix"};
    app.require_subcommand(1);

    PredictOptions predict;
    auto* p = app.add_subcommand("predict", "Prediction set for one entry of a CSV matrix");
    p->add_option("matrix", predict.matrix, "Square CSV matrix; empty or NA fields are missing")
        ->required()->check(CLI::ExistingFile);
    p->add_option("--row", predict.row, "Row of the entry to predict (1-based)")->required();
    p->add_option("--col", predict.col, "Column of the entry to predict (1-based)")->required();
    p->add_option("--c0", predict.bound, "Absolute bound C0 on all entries")->required();
    p->add_option("--method", predict.method, "alg1 (multi-guess SVD) or alg2 (stability)")
        ->check(CLI::IsMember({"alg1", "alg2"}));
    p->add_option("--alpha", predict.alpha, "Miscoverage level");
    p->add_option("--grid-points", predict.grid_points, "Grid points over [-C0, C0]");
    p->add_option("--iter-max", predict.iter_max, "Number of guesses for alg1");
    p->add_option("--seed", predict.seed, "Seed for the guesses");
    p->add_option("--format", predict.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    p->add_option("--out", predict.out, "Write the report here instead of stdout");
    p->add_flag("--verbose,-v", predict.verbose, "Include the relabeling and stability bounds");

    SimulateOptions simulate;
    auto* s = app.add_subcommand("simulate", "Run a simulation experiment from a config file");
    s->add_option("config", simulate.config, "key = value experiment config")->required()->check(CLI::ExistingFile);
    s->add_option("--out", simulate.out, "Records CSV path (overrides the config)");
    s->add_option("--alpha", simulate.alpha, "Override alpha");
    s->add_option("--method", simulate.method, "Override method")->check(CLI::IsMember({"alg1", "alg2"}));
    s->add_option("--grid-points", simulate.grid_points, "Override grid_points");
    s->add_option("--iter-max", simulate.iter_max, "Override iter_max");
    s->add_option("--seed", simulate.seed, "Override the master seed");
    s->add_option("--threads", simulate.threads, "Worker threads (0 = all cores)");

    std::string summarize_in;
    std::string summarize_out;
    auto* sm = app.add_subcommand("summarize", "Per-cell coverage, length and time from a records CSV");
    sm->add_option("records", summarize_in, "Records CSV written by simulate")->required()->check(CLI::ExistingFile);
    sm->add_option("--out", summarize_out, "Summary CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*p) return run_predict(predict);
        if (*s) return run_simulate(simulate);
        if (*sm) return run_summarize(summarize_in, summarize_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
