#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amoc/core_stats.hpp"
#include "amoc/dan_models.hpp"

namespace amoc {

/// Mean shift of size `delta` applied to observations after floor(kstar_frac * n).
struct ChangeSpec {
    double kstar_frac = 0.5;
    double delta = 0.0;
};

struct ExperimentConfig {
    TailModel model = NormalLaw{};
    std::size_t n = 1000;
    std::size_t reps = 1000;
    StatKind stat = StatKind::tkn;
    Sides sides = Sides::two;
    double alpha = 0.05;
    std::uint64_t base_seed = 0;
    std::optional<ChangeSpec> change;
    /// Finite-sample threshold on the raw maximum, e.g. from calibrate().
    std::optional<double> calibrated_critical;
    /// Worker count; never affects results. 0 means the OpenMP default.
    int threads = 0;
};

/// Throws UsageError if the configuration is inconsistent.
void validate(const ExperimentConfig& config);

/// Identity of an experiment (everything except `threads`) as a stable string.
std::string canonical_config(const ExperimentConfig& config);

/// FNV-1a 64-bit hash of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct Localization {
    std::size_t kstar = 0;
    /// mean of |khat - kstar| / n over valid replications.
    double mean_abs_error_frac = 0.0;
    std::vector<double> probs;
    std::vector<double> quantiles;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string config_hash;
    std::string rng;
    std::size_t valid_reps = 0;
    /// Replications whose sample was degenerate (all values equal); excluded.
    std::size_t excluded_reps = 0;
    /// Per replication, in replication order; NaN marks an excluded one.
    std::vector<double> raw_max;
    std::vector<double> normalized;
    std::vector<std::size_t> argmax;
    std::vector<double> quantile_probs;
    std::vector<double> raw_quantiles;
    std::vector<double> normalized_quantiles;
    /// Only for statistics with a Gumbel limit (tkn, hat).
    std::optional<double> rejection_rate_asymptotic;
    std::optional<double> rejection_rate_calibrated;
    std::optional<double> ks_to_gumbel;
    std::optional<Localization> localization;
    double runtime_seconds = 0.0;
};

/// Null experiment: fresh samples from the model, one scan each. Requires no change.
ExperimentReport run_null(const ExperimentConfig& config);

/// Power experiment: samples shifted by delta after kstar. Requires a change.
ExperimentReport run_power(const ExperimentConfig& config);

struct QuantileTable {
    ExperimentConfig config;
    std::vector<double> probs;
    std::vector<double> values;
    std::size_t valid_reps = 0;
    std::size_t excluded_reps = 0;
};

/// Empirical quantiles of the raw maximum under the null; finite-n critical values.
QuantileTable calibrate(const ExperimentConfig& config, std::span<const double> probs);

/// Same samples scanned with both the sigma-hat and the T normaliser.
struct PairedReport {
    ExperimentConfig config;
    std::vector<double> hat_normalized;
    std::vector<double> tkn_normalized;
    double correlation = 0.0;
    double ks_hat = 0.0;
    double ks_tkn = 0.0;
    std::size_t excluded_reps = 0;
    double runtime_seconds = 0.0;
};

PairedReport compare_normalizers(const ExperimentConfig& config);

/// Scan of one sample with the configured statistic: (raw max, normalized or NaN, argmax).
struct ScanSummary {
    double raw_max = 0.0;
    double normalized = 0.0;
    std::size_t argmax = 0;
};
ScanSummary scan_summary(std::span<const double> values, StatKind stat, Sides sides);

/// The observations used by replication r of `config`.
std::vector<double> replication_sample(const ExperimentConfig& config, std::size_t r);

} // namespace amoc
