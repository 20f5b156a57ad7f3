#pragma once

#include "mxconf/conformal.hpp"
#include "mxconf/simgen.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mxconf {

enum class Method { Algorithm1, Algorithm2 };
enum class Missingness { SingleTarget, MnarLargest, Mcar };

std::string to_string(Method m);
std::string to_string(Missingness m);
/// "alg1" / "alg2".
Method parse_method(const std::string& name);
/// "single" / "mnar" / "mcar".
Missingness parse_missingness(const std::string& name);

/// Thrown for invalid experiment configs; names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error("invalid config field '" + field + "': " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    std::vector<Graphon> graphons{Graphon::F1};
    std::vector<Index> n_values{50};
    std::vector<double> xi_targets{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double alpha = 0.1;
    Index replications = 100;
    Method method = Method::Algorithm1;
    Missingness missingness = Missingness::SingleTarget;
    /// Missing pair counts; ignored for SingleTarget.
    std::vector<Index> m0_values{0};
    Index grid_points = kDefaultGridPoints;
    Index iter_max = kDefaultIterMax;
    std::uint64_t seed = 1;
    std::string output = "records.csv";
    /// Worker threads; 0 means one per hardware thread.
    unsigned threads = 0;

    void validate() const;
};

/**
 * Flat `key = value` document, one field per line, `#` starts a comment.
 * Lists are comma separated. Keys: graphons, n_values, xi_targets, alpha,
 * replications, method, missingness, m0_values, grid_points, iter_max, seed,
 * output, threads.
 */
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct Cell {
    Graphon graphon = Graphon::F1;
    Index n = 50;
    double xi_target = 0.5;
    Index m0 = 0;
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& config);

/// Seed of replication `rep` in `cell`; independent of the method.
std::uint64_t replication_seed(std::uint64_t master, const Cell& cell, Index rep);

struct ReplicationRecord {
    Graphon graphon = Graphon::F1;
    Index n = 0;
    double xi_target = 0.0;
    Index m0 = 0;
    Method method = Method::Algorithm1;
    Index rep = 0;
    bool covered = false;
    double total_length = 0.0;
    double hull_length = 0.0;
    bool is_trivial = false;
    double time_ms = 0.0;
    std::uint64_t seed = 0;

    bool failed = false;
    std::string error;
    double truth = 0.0;
    std::vector<Interval> intervals;
};

ReplicationRecord run_replication(const ExperimentConfig& config, const Cell& cell, Index rep);

/// Replications of one cell, ordered by replication index. Throws after three failures.
std::vector<ReplicationRecord> run_cell(const ExperimentConfig& config, const Cell& cell);

using ProgressFn = std::function<void(const Cell& cell, std::size_t cell_index, std::size_t cells)>;
std::vector<ReplicationRecord> run_experiment(const ExperimentConfig& config,
                                              const ProgressFn& progress = {});

// ---- records CSV ---------------------------------------------------------------

inline constexpr int kRecordsSchemaVersion = 1;
inline constexpr const char* kRecordsHeader =
    "graphon,n,xi_target,m0,method,rep,covered,total_length,hull_length,is_trivial,time_ms,seed";
inline constexpr const char* kIntervalsHeader =
    "graphon,n,xi_target,m0,method,rep,truth,intervals,error";

/// Failed replications carry NA in the outcome columns.
void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
std::vector<ReplicationRecord> read_records_csv(std::istream& in);

/// Sidecar with truth and interval list per replication, keyed like the records file.
void write_intervals_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
/// Fills truth, intervals and error of `records` from a sidecar written for them.
void read_intervals_csv(std::istream& in, std::vector<ReplicationRecord>& records);

/// records.csv -> records_intervals.csv / records_summary.csv
std::string sidecar_path(const std::string& records_path, const std::string& suffix);

// ---- summary -------------------------------------------------------------------

struct CellSummary {
    Graphon graphon = Graphon::F1;
    Index n = 0;
    double xi_target = 0.0;
    Index m0 = 0;
    Method method = Method::Algorithm1;
    Index replications = 0;
    Index failures = 0;
    double coverage = 0.0;
    /// Binomial standard error sqrt(p(1−p)/N).
    double coverage_se = 0.0;
    double mean_total_length = 0.0;
    double median_total_length = 0.0;
    double mean_hull_length = 0.0;
    double median_hull_length = 0.0;
    double trivial_fraction = 0.0;
    double mean_time_ms = 0.0;
};

/// One row per (graphon, n, xi_target, m0, method), in first-seen order.
std::vector<CellSummary> summarize(const std::vector<ReplicationRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summary);

}  // namespace mxconf
