#pragma once

#include "bandlab/common.hpp"
#include "bandlab/ensemble.hpp"
#include "bandlab/profile.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bandlab {

enum class ExperimentKind { circlaw, locallaw, singcount, leastsing, replacement, normcond, mc };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(std::string_view name);

struct EtaGrid {
    // Unset bounds default to the spectral domain W^-2 N^gamma0 <= eta <= 10.
    std::optional<double> min;
    std::optional<double> max;
    int points = 20;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::circlaw;
    int n = 256;
    int w = 16;
    ProfileKind profile = ProfileKind::block_band;
    std::string f = "indicator";
    std::string profile_csv;  // explicit profiles only
    DistTag dist = DistTag::gaussian_real;
    Complex z{0.5, 0.0};
    int trials = 10;
    std::uint64_t seed = 1;
    EtaGrid eta;
    double gamma0 = 0.1;
    double kappa = 0.05;
    double epsilon = 1.0;      // prefactor of the least-singular threshold
    double eps_report = 0.1;   // exponent in the small-singular count bound
    double radius = 0.02;
    int grid_points = 3;
    int spot_pairs = 16;
    bool parallel = true;
    std::string out;
    std::string plot;

    nlohmann::json to_json() const;
};

/// Throws UsageError (or HypothesisError) on an invalid configuration.
void validate_config(const ExperimentConfig& cfg);

/// Eta values of the configured grid, descending, geometric spacing.
std::vector<double> eta_values(const ExperimentConfig& cfg);

using Cell = std::variant<std::int64_t, double, std::string>;

struct ColumnStats {
    double median = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Named per-row checks (same length as rows); not part of the CSV.
    std::map<std::string, std::vector<bool>> checks;
    /// Scalar summary values (e.g. max_norm for normcond).
    std::map<std::string, double> scalars;
    /// Eigenvalues of the first successful circlaw trial, for plotting.
    std::vector<Complex> eigen_scatter;
    double seconds = 0.0;

    std::size_t column_index(std::string_view name) const;
    /// Numeric values of a column over rows whose status is "ok".
    std::vector<double> numeric_column(std::string_view name) const;
    ColumnStats stats(std::string_view name) const;
    std::map<std::string, ColumnStats> aggregates() const;
    double pass_fraction(std::string_view check) const;
    nlohmann::json summary_json() const;
};

/// Build the profile named by the config.
std::shared_ptr<const VarianceProfile> make_profile(const ExperimentConfig& cfg);

/// Run one experiment. Deterministic given the config: trial t uses seed + t.
/// Per-trial failures are recorded with status "failed: ...".
ExperimentReport run(const ExperimentConfig& cfg);

/// Write the report as CSV with full round-trip precision.
void emit_csv(const ExperimentReport& report, const std::string& path);
/// Parse a CSV written by emit_csv. Integer-looking cells become int64,
/// other numbers double, anything else string.
ExperimentReport read_csv(const std::string& path);

/// PNG plot: eigenvalue scatter for circlaw, log-log error curve for
/// locallaw, histogram of the primary statistic otherwise.
void emit_plot(const ExperimentReport& report, const std::string& path);

/// Parse `bandlab <kind> [flags]` (args exclude the program name).
ExperimentConfig parse_cli(const std::vector<std::string>& args);

}  // namespace bandlab
