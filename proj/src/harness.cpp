#include "mxconf/harness.hpp"

#include "mxconf/random.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string_view>
#include <thread>

namespace mxconf {

std::string to_string(Method m) { return m == Method::Algorithm1 ? "alg1" : "alg2"; }

std::string to_string(Missingness m) {
    switch (m) {
        case Missingness::SingleTarget: return "single";
        case Missingness::MnarLargest: return "mnar";
        case Missingness::Mcar: return "mcar";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "alg1") return Method::Algorithm1;
    if (name == "alg2") return Method::Algorithm2;
    throw std::invalid_argument("unknown method '" + name + "' (expected alg1 or alg2)");
}

Missingness parse_missingness(const std::string& name) {
    if (name == "single") return Missingness::SingleTarget;
    if (name == "mnar") return Missingness::MnarLargest;
    if (name == "mcar") return Missingness::Mcar;
    throw std::invalid_argument("unknown missingness '" + name + "' (expected single, mnar or mcar)");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    while (true) {
        const auto pos = s.find(sep);
        out.emplace_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::string format(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& field, const std::string& value, Fn&& parse_one) {
    std::vector<T> out;
    for (const std::string& item : split(value, ',')) {
        if (item.empty()) throw ConfigError(field, "empty list element");
        try {
            out.push_back(parse_one(item));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(field, e.what());
        }
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (graphons.empty()) throw ConfigError("graphons", "at least one graphon is required");
    if (n_values.empty()) throw ConfigError("n_values", "at least one n is required");
    for (Index n : n_values) {
        if (n < 3) throw ConfigError("n_values", "n must be at least 3");
    }
    if (xi_targets.empty()) throw ConfigError("xi_targets", "at least one target latent is required");
    for (double xi : xi_targets) {
        if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi_targets", "values must be in (0, 1)");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must be in (0, 1)");
    if (replications < 1) throw ConfigError("replications", "must be at least 1");
    if (grid_points < 2) throw ConfigError("grid_points", "must be at least 2");
    if (iter_max < 1) throw ConfigError("iter_max", "must be at least 1");
    if (output.empty()) throw ConfigError("output", "path must not be empty");
    if (missingness != Missingness::SingleTarget) {
        if (m0_values.empty()) throw ConfigError("m0_values", "at least one count is required");
        for (Index m0 : m0_values) {
            if (m0 < 0) throw ConfigError("m0_values", "counts must be nonnegative");
            for (Index n : n_values) {
                if (m0 > eligible_pair_count(n)) {
                    throw ConfigError("m0_values", std::to_string(m0) + " exceeds the " +
                                                       std::to_string(eligible_pair_count(n)) +
                                                       " eligible pairs at n = " + std::to_string(n));
                }
            }
        }
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config;
    std::string line;
    std::map<std::string, bool> seen;
    while (std::getline(in, line)) {
        std::string_view text(line);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(text), "expected 'key = value'");
        }
        const std::string key(trim(text.substr(0, eq)));
        const std::string value(trim(text.substr(eq + 1)));
        if (seen[key]) throw ConfigError(key, "given more than once");
        seen[key] = true;
        if (value.empty()) throw ConfigError(key, "missing value");

        const auto scalar = [&](auto parse) {
            try {
                return parse(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(key, e.what());
            }
        };
        if (key == "graphons") {
            config.graphons = parse_list<Graphon>(key, value, [](const std::string& s) { return parse_graphon(s); });
        } else if (key == "n_values") {
            config.n_values = parse_list<Index>(key, value, [](const std::string& s) { return parse_number<Index>(s); });
        } else if (key == "xi_targets") {
            config.xi_targets = parse_list<double>(key, value, [](const std::string& s) { return parse_number<double>(s); });
        } else if (key == "alpha") {
            config.alpha = scalar([](const std::string& s) { return parse_number<double>(s); });
        } else if (key == "replications") {
            config.replications = scalar([](const std::string& s) { return parse_number<Index>(s); });
        } else if (key == "method") {
            config.method = scalar([](const std::string& s) { return parse_method(s); });
        } else if (key == "missingness") {
            config.missingness = scalar([](const std::string& s) { return parse_missingness(s); });
        } else if (key == "m0_values") {
            config.m0_values = parse_list<Index>(key, value, [](const std::string& s) { return parse_number<Index>(s); });
        } else if (key == "grid_points") {
            config.grid_points = scalar([](const std::string& s) { return parse_number<Index>(s); });
        } else if (key == "iter_max") {
            config.iter_max = scalar([](const std::string& s) { return parse_number<Index>(s); });
        } else if (key == "seed") {
            config.seed = scalar([](const std::string& s) { return parse_number<std::uint64_t>(s); });
        } else if (key == "output") {
            config.output = value;
        } else if (key == "threads") {
            config.threads = scalar([](const std::string& s) { return parse_number<unsigned>(s); });
        } else {
            throw ConfigError(key, "unknown field");
        }
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<Cell> enumerate_cells(const ExperimentConfig& config) {
    const std::vector<Index> single{0};
    const std::vector<Index>& m0s =
        config.missingness == Missingness::SingleTarget ? single : config.m0_values;
    std::vector<Cell> cells;
    for (Graphon g : config.graphons) {
        for (Index n : config.n_values) {
            for (double xi : config.xi_targets) {
                for (Index m0 : m0s) cells.push_back({g, n, xi, m0});
            }
        }
    }
    return cells;
}

std::uint64_t replication_seed(std::uint64_t master, const Cell& cell, Index rep) {
    return child_seed(master, {static_cast<std::uint64_t>(cell.graphon),
                               static_cast<std::uint64_t>(cell.n),
                               std::bit_cast<std::uint64_t>(cell.xi_target),
                               static_cast<std::uint64_t>(cell.m0),
                               static_cast<std::uint64_t>(rep)});
}

ReplicationRecord run_replication(const ExperimentConfig& config, const Cell& cell, Index rep) {
    ReplicationRecord record;
    record.graphon = cell.graphon;
    record.n = cell.n;
    record.xi_target = cell.xi_target;
    record.m0 = cell.m0;
    record.method = config.method;
    record.rep = rep;
    record.seed = replication_seed(config.seed, cell, rep);

    try {
        GraphonSpec spec;
        spec.graphon = cell.graphon;
        spec.n = cell.n;
        spec.xi_target = cell.xi_target;
        spec.seed = child_seed(record.seed, 1);
        const SyntheticInstance instance = sample_instance(spec);
        record.truth = instance.truth;

        Mask mask;
        switch (config.missingness) {
            case Missingness::SingleTarget: mask = mask_single_target(cell.n); break;
            case Missingness::MnarLargest: mask = mask_mnar_largest(instance.complete.values(), cell.m0); break;
            case Missingness::Mcar: mask = mask_mcar(cell.n, cell.m0, child_seed(record.seed, 2)); break;
        }
        const ObservedMatrix obs = observe(instance, mask);
        const Grid grid = Grid::symmetric(obs.bound(), config.grid_points);
        const std::uint64_t guess_seed = child_seed(record.seed, 3);

        PredictionSet set;
        const auto start = std::chrono::steady_clock::now();
        if (config.method == Method::Algorithm1) {
            const auto strategies = default_strategies(config.iter_max, guess_seed);
            set = algorithm1(obs, ScorerConfig{}, config.alpha, grid, strategies, config.iter_max);
        } else {
            ScorerConfig scorer;
            scorer.kind = ScorerKind::NeighborhoodSmoothing;
            const Matrix guess =
                draw_guess(obs, {GuessStrategy::Kind::EmpiricalIid, 0.5, guess_seed});
            set = algorithm2(obs, scorer, config.alpha, grid, guess).set;
        }
        const auto stop = std::chrono::steady_clock::now();

        record.time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        record.covered = set.contains(record.truth);
        record.total_length = set.total_length();
        record.hull_length = set.hull_length();
        record.is_trivial = set.is_trivial();
        record.intervals = set.intervals();
    } catch (const std::exception& e) {
        record.failed = true;
        record.error = e.what();
    }
    return record;
}

std::vector<ReplicationRecord> run_cell(const ExperimentConfig& config, const Cell& cell) {
    constexpr Index kMaxFailures = 3;
    const auto reps = static_cast<std::size_t>(config.replications);
    std::vector<ReplicationRecord> records(reps);
    std::atomic<std::size_t> next{0};
    std::atomic<Index> failures{0};
    std::string first_error;
    std::mutex error_mutex;

    const auto work = [&] {
        while (failures.load() < kMaxFailures) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= reps) return;
            records[rep] = run_replication(config, cell, static_cast<Index>(rep));
            if (records[rep].failed) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty()) first_error = records[rep].error;
                failures.fetch_add(1);
            }
        }
    };
    unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(reps, 1)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (failures.load() >= kMaxFailures) {
        throw std::runtime_error("cell " + to_string(cell.graphon) + " n=" + std::to_string(cell.n) +
                                 " xi=" + format(cell.xi_target) + " m0=" + std::to_string(cell.m0) +
                                 " aborted after " + std::to_string(kMaxFailures) +
                                 " failed replications; first error: " + first_error);
    }
    return records;
}

std::vector<ReplicationRecord> run_experiment(const ExperimentConfig& config,
                                              const ProgressFn& progress) {
    config.validate();
    const std::vector<Cell> cells = enumerate_cells(config);
    std::vector<ReplicationRecord> all;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (progress) progress(cells[c], c, cells.size());
        std::vector<ReplicationRecord> records = run_cell(config, cells[c]);
        all.insert(all.end(), std::make_move_iterator(records.begin()),
                   std::make_move_iterator(records.end()));
    }
    return all;
}

namespace {

std::string key_columns(const ReplicationRecord& r) {
    return to_string(r.graphon) + "," + std::to_string(r.n) + "," + format(r.xi_target) + "," +
           std::to_string(r.m0) + "," + to_string(r.method) + "," + std::to_string(r.rep);
}

void expect_header(std::istream& in, const char* expected) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("missing CSV header");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const std::vector<std::string> want = split(expected, ',');
    const std::vector<std::string> got = split(header, ',');
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (i >= got.size()) throw std::runtime_error("CSV header is missing column '" + want[i] + "'");
        if (got[i] != want[i]) {
            throw std::runtime_error("CSV column " + std::to_string(i + 1) + " is '" + got[i] +
                                     "', expected '" + want[i] + "'");
        }
    }
    if (got.size() != want.size()) {
        throw std::runtime_error("unexpected CSV column '" + got[want.size()] + "'");
    }
}

bool parse_flag(const std::string& s) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw std::invalid_argument("expected 0 or 1, got '" + s + "'");
}

std::string sanitize(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ' ');
    return s;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
    out << kRecordsHeader << '\n';
    for (const ReplicationRecord& r : records) {
        out << key_columns(r) << ',';
        if (r.failed) {
            out << "NA,NA,NA,NA,";
        } else {
            out << (r.covered ? 1 : 0) << ',' << format(r.total_length) << ','
                << format(r.hull_length) << ',' << (r.is_trivial ? 1 : 0) << ',';
        }
        out << format(r.time_ms) << ',' << r.seed << '\n';
    }
}

std::vector<ReplicationRecord> read_records_csv(std::istream& in) {
    expect_header(in, kRecordsHeader);
    std::vector<ReplicationRecord> records;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 12) {
            throw std::runtime_error("records line " + std::to_string(line_no) + ": expected 12 fields, got " +
                                     std::to_string(f.size()));
        }
        try {
            ReplicationRecord r;
            r.graphon = parse_graphon(f[0]);
            r.n = parse_number<Index>(f[1]);
            r.xi_target = parse_number<double>(f[2]);
            r.m0 = parse_number<Index>(f[3]);
            r.method = parse_method(f[4]);
            r.rep = parse_number<Index>(f[5]);
            r.failed = f[6] == "NA";
            if (!r.failed) {
                r.covered = parse_flag(f[6]);
                r.total_length = parse_number<double>(f[7]);
                r.hull_length = parse_number<double>(f[8]);
                r.is_trivial = parse_flag(f[9]);
            }
            r.time_ms = parse_number<double>(f[10]);
            r.seed = parse_number<std::uint64_t>(f[11]);
            records.push_back(std::move(r));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("records line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void write_intervals_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
    out << kIntervalsHeader << '\n';
    for (const ReplicationRecord& r : records) {
        out << key_columns(r) << ',';
        if (r.failed) {
            out << "NA,NA," << sanitize(r.error) << '\n';
            continue;
        }
        out << format(r.truth) << ',';
        for (std::size_t i = 0; i < r.intervals.size(); ++i) {
            if (i > 0) out << ';';
            out << format(r.intervals[i].lo) << ':' << format(r.intervals[i].hi);
        }
        out << ",\n";
    }
}

void read_intervals_csv(std::istream& in, std::vector<ReplicationRecord>& records) {
    expect_header(in, kIntervalsHeader);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (row >= records.size()) throw std::runtime_error("intervals file has more rows than records");
        ReplicationRecord& r = records[row];
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 9) throw std::runtime_error("intervals row " + std::to_string(row + 1) + ": expected 9 fields");
        const std::string key = f[0] + "," + f[1] + "," + f[2] + "," + f[3] + "," + f[4] + "," + f[5];
        if (key != key_columns(r)) {
            throw std::runtime_error("intervals row " + std::to_string(row + 1) + " does not match records row");
        }
        r.error = f[8];
        r.intervals.clear();
        if (f[6] != "NA") {
            r.truth = parse_number<double>(f[6]);
            if (!f[7].empty()) {
                for (const std::string& item : split(f[7], ';')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos) throw std::runtime_error("malformed interval '" + item + "'");
                    r.intervals.push_back({parse_number<double>(std::string_view(item).substr(0, colon)),
                                           parse_number<double>(std::string_view(item).substr(colon + 1))});
                }
            }
        }
        ++row;
    }
    if (row != records.size()) throw std::runtime_error("intervals file has fewer rows than records");
}

std::string sidecar_path(const std::string& records_path, const std::string& suffix) {
    const auto slash = records_path.find_last_of('/');
    const auto dot = records_path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        return records_path.substr(0, dot) + "_" + suffix + records_path.substr(dot);
    }
    return records_path + "_" + suffix + ".csv";
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double total = 0.0;
    for (double x : v) total += x;
    return total / static_cast<double>(v.size());
}

}  // namespace

std::vector<CellSummary> summarize(const std::vector<ReplicationRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records to summarize");
    struct Group {
        CellSummary summary;
        std::vector<double> total, hull, time;
        Index covered = 0;
        Index trivial = 0;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> index;
    for (const ReplicationRecord& r : records) {
        const std::string key = to_string(r.graphon) + "," + std::to_string(r.n) + "," +
                                format(r.xi_target) + "," + std::to_string(r.m0) + "," + to_string(r.method);
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) {
            Group g;
            g.summary.graphon = r.graphon;
            g.summary.n = r.n;
            g.summary.xi_target = r.xi_target;
            g.summary.m0 = r.m0;
            g.summary.method = r.method;
            groups.push_back(std::move(g));
        }
        Group& g = groups[it->second];
        g.time.push_back(r.time_ms);
        if (r.failed) {
            ++g.summary.failures;
            continue;
        }
        ++g.summary.replications;
        g.covered += r.covered ? 1 : 0;
        g.trivial += r.is_trivial ? 1 : 0;
        g.total.push_back(r.total_length);
        g.hull.push_back(r.hull_length);
    }
    std::vector<CellSummary> out;
    for (Group& g : groups) {
        CellSummary& s = g.summary;
        const auto count = static_cast<double>(s.replications);
        s.coverage = count > 0 ? static_cast<double>(g.covered) / count : std::nan("");
        s.coverage_se = count > 0 ? std::sqrt(s.coverage * (1.0 - s.coverage) / count) : std::nan("");
        s.trivial_fraction = count > 0 ? static_cast<double>(g.trivial) / count : std::nan("");
        s.mean_total_length = mean(g.total);
        s.median_total_length = median(g.total);
        s.mean_hull_length = mean(g.hull);
        s.median_hull_length = median(g.hull);
        s.mean_time_ms = mean(g.time);
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summary) {
    out << "graphon,n,xi_target,m0,method,replications,failures,coverage,coverage_se,"
           "mean_total_length,median_total_length,mean_hull_length,median_hull_length,"
           "trivial_fraction,mean_time_ms\n";
    for (const CellSummary& s : summary) {
        out << to_string(s.graphon) << ',' << s.n << ',' << format(s.xi_target) << ',' << s.m0 << ','
            << to_string(s.method) << ',' << s.replications << ',' << s.failures << ','
            << format(s.coverage) << ',' << format(s.coverage_se) << ','
            << format(s.mean_total_length) << ',' << format(s.median_total_length) << ','
            << format(s.mean_hull_length) << ',' << format(s.median_hull_length) << ','
            << format(s.trivial_fraction) << ',' << format(s.mean_time_ms) << '\n';
    }
}

}  // namespace mxconf
