#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tdqho/config.hpp"
#include "tdqho/oracle.hpp"
#include "tdqho/pipeline.hpp"

namespace tdqho {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitValidity = 3,
    kExitComparison = 4,
    kExitUnreliable = 5,
};

/// Moment CSV columns, in order.
const std::vector<std::string>& moment_columns();
/// Extra columns appended by oracle runs.
const std::vector<std::string>& oracle_columns();

/// 17 significant digits; nan/inf spelled out.
std::string format_number(double v);

void write_moment_csv(std::ostream& out, const PipelineSolution& sol,
                      const std::vector<MomentState>& moments);
void write_oracle_csv(std::ostream& out, const OracleRun& run);
/// Long-form (t, x, value) density of the Gaussian position marginal.
void write_density_csv(std::ostream& out, const std::vector<MomentState>& moments,
                       const DensitySettings& settings);

struct RunSummary {
    double max_uncertainty = 0.0;
    double min_uncertainty = 0.0;
    double max_abs_mean_x = 0.0;
    double max_abs_mean_p = 0.0;
    double max_sigma_x = 0.0;
    double max_sigma_p = 0.0;
};

RunSummary summarize(const std::vector<MomentState>& moments);
nlohmann::json to_json(const RunSummary& s);

struct EvolveResult {
    PipelineSolution solution;
    std::vector<MomentState> moments;
    RunSummary summary;
};

/// Pipeline run without file output.
EvolveResult evolve(const RunConfig& config);

struct SeriesError {
    std::string name;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double t_at_max = 0.0;
    double tolerance_abs = 0.0;
    bool pass = true;
};

struct ComparisonReport {
    std::string mode;
    double threshold = 0.0;
    std::vector<SeriesError> series;
    bool pass = true;
    bool reliable = true;
    double max_top_population = 0.0;

    int exit_code() const;
};

nlohmann::json to_json(const ComparisonReport& r);

/// Point passes iff |a - r| <= max(rel |r|, abs). abs defaults to
/// rel * max(sup |r|, s) with s the series' natural scale (sup sigma for means,
/// sup variance for variances, sup sigma_x sigma_p for the covariance).
/// max_rel skips reference points with |r| <= abs.
ComparisonReport compare_moments(const std::vector<MomentState>& actual,
                                 const std::vector<MomentState>& reference, double rel,
                                 std::optional<double> abs_floor = std::nullopt);

/// Oracle run with the configured initial state, basis and grid.
OracleRun run_oracle_only(const RunConfig& config);

struct CompareResult {
    ComparisonReport report;
    std::vector<MomentState> reference;  // pipeline, or exact in rwa mode
    std::vector<MomentState> actual;     // oracle, or rwa
};

CompareResult compare(const RunConfig& config);

struct SweepAxis {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    std::vector<double> values() const;
};

/// "param:lo:hi:count"
SweepAxis parse_sweep_axis(const std::string& text);

struct SweepPoint {
    double value = 0.0;
    bool ok = false;
    std::string message;
    RunSummary summary;
};

/// Points run concurrently on up to `workers` threads (0: hardware concurrency).
/// Failures are recorded per point.
std::vector<SweepPoint> sweep(const RunConfig& config, const SweepAxis& axis, unsigned workers = 0);
void write_sweep_csv(std::ostream& out, const SweepAxis& axis, const std::vector<SweepPoint>& points);

/// File-writing front ends; return the process exit code.
int run_validate(const RunConfig& config, std::ostream& out);
int run_static_diag(const StaticParams& params, const std::string& branch, std::ostream& out);
int run_evolve(const RunConfig& config, std::ostream& log);
int run_oracle(const RunConfig& config, std::ostream& log);
int run_compare(const RunConfig& config, std::ostream& log);
int run_sweep(const RunConfig& config, const SweepAxis& axis, std::ostream& log);

}  // namespace tdqho
