#include "amoc/mc_harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

#include "amoc/empirical.hpp"
#include "amoc/error.hpp"
#include "amoc/rng.hpp"

namespace amoc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<double> kReportProbs = {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99};

std::string shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

bool has_gumbel_limit(StatKind stat) { return stat == StatKind::tkn || stat == StatKind::hat; }

struct Outcome {
    double raw = kNaN;
    double normalized = kNaN;
    std::size_t argmax = 0;
    bool excluded = false;
};

// Runs `body(r)` for every replication on `threads` workers. Replication
// results land in slot r, so scheduling cannot change them.
template <class Body>
void for_each_replication(std::size_t reps, int threads, Body&& body) {
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto count = static_cast<std::int64_t>(reps);
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers)
    for (std::int64_t r = 0; r < count; ++r) {
        try {
            body(static_cast<std::size_t>(r));
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<Outcome> run_replications(const ExperimentConfig& config) {
    std::vector<Outcome> out(config.reps);
    for_each_replication(config.reps, config.threads, [&](std::size_t r) {
        const std::vector<double> x = replication_sample(config, r);
        try {
            const ScanSummary s = scan_summary(x, config.stat, config.sides);
            out[r] = {s.raw_max, s.normalized, s.argmax, false};
        } catch (const DegenerateData&) {
            out[r].excluded = true;
        }
    });
    return out;
}

std::vector<double> valid_values(std::span<const double> values) {
    std::vector<double> v;
    v.reserve(values.size());
    for (double x : values) {
        if (!std::isnan(x)) v.push_back(x);
    }
    return v;
}

double rate_above(std::span<const double> values, double threshold) {
    if (values.empty()) return kNaN;
    const auto hits = std::count_if(values.begin(), values.end(), [&](double x) { return x > threshold; });
    return static_cast<double>(hits) / static_cast<double>(values.size());
}

double ks_to_law(std::vector<double> values, Sides sides) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    return ks_distance_sorted(values, [sides](double t) { return gumbel_cdf(sides, t); });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.config = config;
    rep.config_hash = config_hash(config);
    rep.rng = std::string(Philox4x32::name);

    const std::vector<Outcome> outcomes = run_replications(config);
    rep.raw_max.reserve(outcomes.size());
    rep.normalized.reserve(outcomes.size());
    rep.argmax.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        rep.raw_max.push_back(o.excluded ? kNaN : o.raw);
        rep.normalized.push_back(o.excluded ? kNaN : o.normalized);
        rep.argmax.push_back(o.argmax);
        (o.excluded ? rep.excluded_reps : rep.valid_reps) += 1;
    }

    const std::vector<double> raw = valid_values(rep.raw_max);
    rep.quantile_probs = kReportProbs;
    if (!raw.empty()) {
        rep.raw_quantiles = quantiles(raw, kReportProbs);
    }
    if (has_gumbel_limit(config.stat) && !raw.empty()) {
        const std::vector<double> norm = valid_values(rep.normalized);
        rep.normalized_quantiles = quantiles(norm, kReportProbs);
        rep.rejection_rate_asymptotic = rate_above(norm, gumbel_critical(config.sides, config.alpha));
        rep.ks_to_gumbel = ks_to_law(norm, config.sides);
    }
    if (config.calibrated_critical && !raw.empty()) {
        rep.rejection_rate_calibrated = rate_above(raw, *config.calibrated_critical);
    }
    if (config.change && rep.valid_reps > 0) {
        Localization loc;
        loc.kstar = static_cast<std::size_t>(std::floor(config.change->kstar_frac * static_cast<double>(config.n)));
        std::vector<double> err;
        for (std::size_t r = 0; r < outcomes.size(); ++r) {
            if (outcomes[r].excluded) continue;
            const double d = std::fabs(static_cast<double>(outcomes[r].argmax) - static_cast<double>(loc.kstar));
            err.push_back(d / static_cast<double>(config.n));
        }
        loc.mean_abs_error_frac = mean_var(err).mean;
        loc.probs = {0.5, 0.9, 0.95};
        loc.quantiles = quantiles(err, loc.probs);
        rep.localization = std::move(loc);
    }
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace

void validate(const ExperimentConfig& config) {
    validate(config.model);
    if (config.reps < 1) {
        throw UsageError("reps must be at least 1");
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw UsageError("alpha must lie in (0,1)");
    }
    const std::size_t min_n = config.stat == StatKind::tkn ? 4 : 2;
    if (config.n < min_n) {
        throw UsageError("n=" + std::to_string(config.n) + " is too small for the " +
                         std::string(to_string(config.stat)) + " statistic");
    }
    if (config.change) {
        if (!(config.change->kstar_frac > 0.0 && config.change->kstar_frac < 1.0)) {
            throw UsageError("kstar_frac must lie in (0,1)");
        }
        if (!std::isfinite(config.change->delta)) {
            throw UsageError("delta must be finite");
        }
    }
}

std::string canonical_config(const ExperimentConfig& config) {
    std::string s = "model=" + describe(config.model);
    s += ";n=" + std::to_string(config.n);
    s += ";reps=" + std::to_string(config.reps);
    s += ";stat=" + std::string(to_string(config.stat));
    s += ";sides=" + std::string(to_string(config.sides));
    s += ";alpha=" + shortest(config.alpha);
    s += ";seed=" + std::to_string(config.base_seed);
    if (config.change) {
        s += ";kstar_frac=" + shortest(config.change->kstar_frac) + ";delta=" + shortest(config.change->delta);
    }
    if (config.calibrated_critical) {
        s += ";calibrated_critical=" + shortest(*config.calibrated_critical);
    }
    return s;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical_config(config)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScanSummary scan_summary(std::span<const double> values, StatKind stat, Sides sides) {
    const PrefixSums ps(values);
    ScanSummary s;
    switch (stat) {
    case StatKind::tkn:
    case StatKind::hat: {
        const ScanResult r = stat == StatKind::tkn ? scan_tkn(ps, sides) : scan_hat(ps, sides);
        s = {r.max_value, *r.normalized, r.argmax_k};
        break;
    }
    case StatKind::gamma: {
        if (ps.constant()) {
            throw DegenerateData("all observations are equal");
        }
        const ScanResult r = gamma_max(ps);
        s = {r.max_value, kNaN, r.argmax_k};
        break;
    }
    case StatKind::weighted: {
        const WeightedSup w = weighted_supnorm_detail(ps);
        s = {w.value, kNaN, w.k};
        break;
    }
    }
    return s;
}

std::vector<double> replication_sample(const ExperimentConfig& config, std::size_t r) {
    std::vector<double> x(config.n);
    Philox4x32 rng(config.base_seed, r);
    draw(config.model, rng, x);
    if (config.change) {
        const auto kstar =
            static_cast<std::size_t>(std::floor(config.change->kstar_frac * static_cast<double>(config.n)));
        for (std::size_t i = kstar; i < x.size(); ++i) {
            x[i] += config.change->delta;
        }
    }
    return x;
}

ExperimentReport run_null(const ExperimentConfig& config) {
    validate(config);
    if (config.change) {
        throw UsageError("run_null takes no change specification");
    }
    return run_experiment(config);
}

ExperimentReport run_power(const ExperimentConfig& config) {
    validate(config);
    if (!config.change) {
        throw UsageError("run_power needs a change specification");
    }
    return run_experiment(config);
}

QuantileTable calibrate(const ExperimentConfig& config, std::span<const double> probs) {
    validate(config);
    if (config.change) {
        throw UsageError("calibration runs under the null; drop the change specification");
    }
    const std::vector<Outcome> outcomes = run_replications(config);
    QuantileTable table;
    table.config = config;
    table.probs.assign(probs.begin(), probs.end());
    std::vector<double> raw;
    for (const auto& o : outcomes) {
        if (o.excluded) {
            ++table.excluded_reps;
        } else {
            raw.push_back(o.raw);
        }
    }
    table.valid_reps = raw.size();
    if (raw.empty()) {
        throw DegenerateData("every calibration replication was degenerate");
    }
    table.values = quantiles(std::move(raw), probs);
    return table;
}

PairedReport compare_normalizers(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    validate(config);
    if (config.change) {
        throw UsageError("compare_normalizers runs under the null; drop the change specification");
    }
    if (config.n < 4) {
        throw UsageError("compare_normalizers needs n >= 4");
    }
    std::vector<double> hat(config.reps, kNaN);
    std::vector<double> tkn(config.reps, kNaN);
    for_each_replication(config.reps, config.threads, [&](std::size_t r) {
        const std::vector<double> x = replication_sample(config, r);
        try {
            const PrefixSums ps(x);
            hat[r] = *scan_hat(ps, config.sides).normalized;
            tkn[r] = *scan_tkn(ps, config.sides).normalized;
        } catch (const DegenerateData&) {
            hat[r] = tkn[r] = kNaN;
        }
    });

    PairedReport rep;
    rep.config = config;
    std::vector<double> h, t;
    for (std::size_t r = 0; r < config.reps; ++r) {
        if (std::isnan(hat[r])) {
            ++rep.excluded_reps;
            continue;
        }
        h.push_back(hat[r]);
        t.push_back(tkn[r]);
    }
    rep.hat_normalized = std::move(hat);
    rep.tkn_normalized = std::move(tkn);
    if (h.size() >= 2) {
        // Infinite T values (zero variance segments) would poison the moment.
        const bool finite = std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); }) &&
                            std::all_of(h.begin(), h.end(), [](double v) { return std::isfinite(v); });
        rep.correlation = finite ? pearson_correlation(h, t) : kNaN;
    }
    rep.ks_hat = ks_to_law(h, config.sides);
    rep.ks_tkn = ks_to_law(t, config.sides);
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace amoc
