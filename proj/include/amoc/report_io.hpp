#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "amoc/brownian_lab.hpp"
#include "amoc/core_stats.hpp"
#include "amoc/mc_harness.hpp"

namespace amoc {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Decision { reject, retain };

std::string_view to_string(Decision d) noexcept;

/// Outcome of `amoc test` on one series.
struct TestReport {
    std::size_t n = 0;
    StatKind stat_kind = StatKind::tkn;
    Sides sides = Sides::two;
    double max_value = 0.0;
    std::size_t argmax_k = 0;
    double a_n = 0.0;
    double b_n = 0.0;
    std::optional<double> normalized;
    std::optional<double> p_asymptotic;
    std::optional<double> p_calibrated;
    double alpha = 0.05;
    Decision decision = Decision::retain;
    std::string input_fingerprint;
    std::string tool_version{kToolVersion};
};

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const ExperimentReport& report, bool include_values);
nlohmann::json to_json(const PairedReport& report, bool include_values);

/// Structural checks of emitted documents; throw InvalidData naming the first
/// offending field.
void validate_test_report(const nlohmann::json& doc);
void validate_experiment_report(const nlohmann::json& doc);
void validate_paired_report(const nlohmann::json& doc);

/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& doc);

/// Shortest decimal text that parses back to the same double; "nan", "inf",
/// "-inf" for non-finite values.
std::string format_double(double x);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// `rep,value` rows, one per replication.
std::string values_csv(std::span<const double> values);

/// `# key: value` header lines followed by `prob,value` rows.
std::string quantile_csv(std::span<const double> probs, std::span<const double> values, const Metadata& metadata);

Metadata metadata_for(const ExperimentConfig& config);
Metadata metadata_for(const LimitConfig& config);

/// Finite-sample null reference loaded from a CSV written by this tool:
/// either a `prob,value` quantile table or a `rep,value` dump of draws.
struct Calibration {
    enum class Kind { quantiles, draws };
    Kind kind = Kind::quantiles;
    std::vector<double> probs;
    std::vector<double> values;
};

/// Throws ParseError on malformed rows.
Calibration parse_calibration(std::string_view text);
Calibration read_calibration(const std::string& path);

/// Tail probability of `stat` under the calibration.
///
/// For draws this is the permutation-style (1 + #{v >= stat}) / (m + 1).
/// For a quantile table it is 1 - p* where p* is the largest tabulated
/// probability whose quantile lies strictly below `stat` (1 if none). Strict
/// exceedance of that quantile means the true tail probability is below the
/// returned bound.
double calibrated_pvalue(const Calibration& calibration, double stat);

/// Operative decision given the p-values: calibrated takes precedence.
Decision decide(const TestReport& report, const std::optional<Calibration::Kind>& calibration_kind);

/// Reads one value per line, or column `column` (1-based) of a CSV. A
/// non-numeric first row is taken as a header and skipped; blank lines are
/// ignored. Throws ParseError naming the line of any other bad cell.
Sample read_series(std::istream& in, std::optional<std::size_t> column, std::string provenance = {});

/// Throws IoError if the file cannot be opened.
Sample read_series_file(const std::string& path, std::optional<std::size_t> column);

/// "fnv1a64:" followed by 16 hex digits.
std::string fingerprint(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

} // namespace amoc
