#include "cli.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "amoc/brownian_lab.hpp"
#include "amoc/core_stats.hpp"
#include "amoc/dan_models.hpp"
#include "amoc/empirical.hpp"
#include "amoc/error.hpp"
#include "amoc/limit_theory.hpp"
#include "amoc/mc_harness.hpp"
#include "amoc/report_io.hpp"

namespace amoc::cli {
namespace {

struct TestOptions {
    std::string input;
    std::optional<std::size_t> column;
    std::string stat = "tkn";
    bool two_sided = false;
    bool one_sided = false;
    double alpha = 0.05;
    std::string calibration;
    std::string output;
};

struct ExperimentOptions {
    std::string model;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::string stat = "tkn";
    bool two_sided = false;
    bool one_sided = false;
    double alpha = 0.05;
    int threads = 0;
    double kstar_frac = 0.5;
    double delta = 0.0;
    std::vector<double> probs;
    std::string calibration;
    std::string output;
    std::string values;
    bool include_values = false;
};

struct LimitOptions {
    std::string functional;
    std::size_t reps = 0;
    std::size_t grid = 4096;
    std::size_t refine = 16;
    double horizon = 1e8;
    bool two_sided = false;
    std::uint64_t seed = 0;
    std::vector<double> probs;
    int threads = 0;
    std::string output;
    std::string values;
};

Sides sides_from(bool two_sided, bool one_sided) {
    if (two_sided && one_sided) {
        throw UsageError("--two-sided and --one-sided are exclusive");
    }
    return one_sided ? Sides::one : Sides::two;
}

TailModel model_from(const std::string& text) {
    try {
        return parse_model(text);
    } catch (const ModelError& e) {
        throw UsageError(std::string(e.what()) + "; model grammar: " + std::string(kModelGrammar));
    }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_file(path, text);
    }
}

ExperimentConfig experiment_config(const ExperimentOptions& o) {
    ExperimentConfig c;
    c.model = model_from(o.model);
    c.n = o.n;
    c.reps = o.reps;
    c.stat = parse_stat_kind(o.stat);
    c.sides = sides_from(o.two_sided, o.one_sided);
    c.alpha = o.alpha;
    c.base_seed = o.seed;
    c.threads = o.threads;
    return c;
}

// Threshold on the raw maximum at level alpha from a calibration file.
double critical_from(const Calibration& cal, double alpha) {
    if (cal.kind == Calibration::Kind::draws) {
        return quantiles(cal.values, std::vector<double>{1.0 - alpha}).front();
    }
    for (std::size_t i = 0; i < cal.probs.size(); ++i) {
        if (std::fabs(cal.probs[i] - (1.0 - alpha)) < 1e-12) {
            return cal.values[i];
        }
    }
    throw UsageError("calibration table has no row at prob = 1 - alpha");
}

int cmd_test(const TestOptions& o, std::ostream& out, std::ostream& err) {
    const std::string bytes = read_file(o.input);
    std::istringstream in(bytes);
    const Sample sample = read_series(in, o.column, o.input);
    const StatKind stat = parse_stat_kind(o.stat);
    const Sides sides = sides_from(o.two_sided, o.one_sided);
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0,1)");
    }
    const std::size_t min_n = stat == StatKind::tkn ? 4 : 2;
    if (sample.size() < min_n) {
        throw UsageError("the " + std::string(to_string(stat)) + " statistic needs at least " +
                         std::to_string(min_n) + " observations, got " + std::to_string(sample.size()));
    }
    std::optional<Calibration> cal;
    if (!o.calibration.empty()) {
        cal = read_calibration(o.calibration);
    } else if (stat == StatKind::gamma || stat == StatKind::weighted) {
        throw UsageError("--stat " + o.stat + " has no asymptotic null law here; pass --calibration");
    }

    const PrefixSums ps(sample);
    const NormConstants nc = norm_constants(static_cast<double>(sample.size()));
    TestReport report;
    report.n = sample.size();
    report.stat_kind = stat;
    report.sides = sides;
    report.a_n = nc.a_n;
    report.b_n = nc.b_n;
    report.alpha = o.alpha;
    report.input_fingerprint = fingerprint(bytes);

    switch (stat) {
    case StatKind::tkn:
    case StatKind::hat: {
        const ScanResult r = stat == StatKind::tkn ? scan_tkn(ps, sides) : scan_hat(ps, sides);
        report.max_value = r.max_value;
        report.argmax_k = r.argmax_k;
        report.normalized = r.normalized;
        report.p_asymptotic = sides == Sides::two ? r.p_two_sided : r.p_one_sided;
        break;
    }
    case StatKind::gamma: {
        if (ps.constant()) {
            throw DegenerateData("all observations are equal");
        }
        const ScanResult r = gamma_max(ps);
        report.sides = Sides::two;
        report.max_value = r.max_value;
        report.argmax_k = r.argmax_k;
        break;
    }
    case StatKind::weighted: {
        const WeightedSup w = weighted_supnorm_detail(ps);
        report.sides = Sides::two;
        report.max_value = w.value;
        report.argmax_k = w.k;
        break;
    }
    }
    std::optional<Calibration::Kind> kind;
    if (cal) {
        report.p_calibrated = calibrated_pvalue(*cal, report.max_value);
        kind = cal->kind;
    }
    report.decision = decide(report, kind);

    const nlohmann::json doc = to_json(report);
    validate_test_report(doc);
    emit(o.output, dump_json(doc), out);
    err << "test: n=" << report.n << " stat=" << to_string(stat) << " decision=" << to_string(report.decision)
        << "\n";
    return report.decision == Decision::reject ? kReject : kRetain;
}

int cmd_simulate(const ExperimentOptions& o, bool power, std::ostream& out, std::ostream& err) {
    ExperimentConfig c = experiment_config(o);
    if (power) {
        c.change = ChangeSpec{o.kstar_frac, o.delta};
    }
    if (!o.calibration.empty()) {
        c.calibrated_critical = critical_from(read_calibration(o.calibration), c.alpha);
    }
    err << (power ? "power: " : "simulate: ") << canonical_config(c) << "\n";
    const ExperimentReport report = power ? run_power(c) : run_null(c);
    const nlohmann::json doc = to_json(report, o.include_values);
    validate_experiment_report(doc);
    emit(o.output, dump_json(doc), out);
    if (!o.values.empty()) {
        write_file(o.values, values_csv(report.raw_max));
    }
    return kRetain;
}

int cmd_calibrate(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = experiment_config(o);
    if (o.probs.empty()) {
        throw UsageError("--probs is required");
    }
    err << "calibrate: " << canonical_config(c) << "\n";
    const QuantileTable table = calibrate(c, o.probs);
    Metadata meta = metadata_for(c);
    meta.emplace_back("valid_reps", std::to_string(table.valid_reps));
    meta.emplace_back("excluded_reps", std::to_string(table.excluded_reps));
    meta.emplace_back("quantity", "raw maximum of the statistic");
    emit(o.output, quantile_csv(table.probs, table.values, meta), out);
    if (!o.values.empty()) {
        const ExperimentReport rep = run_null(c);
        write_file(o.values, values_csv(rep.raw_max));
    }
    return kRetain;
}

int cmd_compare(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = experiment_config(o);
    err << "compare: " << canonical_config(c) << "\n";
    const PairedReport report = compare_normalizers(c);
    const nlohmann::json doc = to_json(report, o.include_values);
    validate_paired_report(doc);
    emit(o.output, dump_json(doc), out);
    return kRetain;
}

int cmd_limit(const LimitOptions& o, std::ostream& out, std::ostream& err) {
    LimitConfig c;
    c.functional = parse_functional(o.functional);
    c.reps = o.reps;
    c.grid_size = o.grid;
    c.refine = o.refine;
    c.horizon = o.horizon;
    c.sides = o.two_sided ? Sides::two : Sides::one;
    c.seed = o.seed;
    if (o.probs.empty()) {
        throw UsageError("--probs is required");
    }
    err << "limit: functional=" << to_string(c.functional) << " reps=" << c.reps << " grid=" << c.grid_size
        << " seed=" << c.seed << "\n";
    if (c.reps < 100) {
        throw UsageError("limit needs --reps >= 100");
    }
    const std::vector<double> draws = limit_draws(c, o.threads);
    const std::vector<double> values = quantiles(draws, o.probs);
    emit(o.output, quantile_csv(o.probs, values, metadata_for(c)), out);
    if (!o.values.empty()) {
        write_file(o.values, values_csv(draws));
    }
    return kRetain;
}

void add_experiment_flags(CLI::App* app, ExperimentOptions& o, bool with_alpha) {
    app->add_option("--model", o.model, std::string("sampling law: ") + std::string(kModelGrammar))->required();
    app->add_option("--n", o.n, "sample size")->required();
    app->add_option("--reps", o.reps, "Monte Carlo replications")->required();
    app->add_option("--seed", o.seed, "base seed (required; no hidden entropy)")->required();
    app->add_option("--stat", o.stat, "tkn|hat|gamma|weighted")->capture_default_str();
    app->add_flag("--two-sided", o.two_sided, "maximum of |statistic| (default)");
    app->add_flag("--one-sided", o.one_sided, "maximum of the signed statistic");
    if (with_alpha) {
        app->add_option("--alpha", o.alpha, "nominal level")->capture_default_str();
    }
    app->add_option("--threads", o.threads, "worker threads; results do not depend on it");
    app->add_option("--output", o.output, "write the main artifact here instead of stdout");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offline at-most-one-change detection in the mean with Darling-Erdos inference", "amoc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    TestOptions topt;
    auto* test = app.add_subcommand("test", "scan a series for a single change in the mean");
    test->add_option("--input", topt.input, "one value per line, or CSV with --column")->required();
    test->add_option("--column", topt.column, "1-based CSV column");
    test->add_option("--stat", topt.stat, "tkn|hat|gamma|weighted")->capture_default_str();
    test->add_flag("--two-sided", topt.two_sided, "maximum of |statistic| (default)");
    test->add_flag("--one-sided", topt.one_sided, "maximum of the signed statistic");
    test->add_option("--alpha", topt.alpha, "significance level")->capture_default_str();
    test->add_option("--calibration", topt.calibration, "prob,value or rep,value CSV of null draws");
    test->add_option("--output", topt.output, "write the JSON report here instead of stdout");

    ExperimentOptions sim_opt, cal_opt, pow_opt, cmp_opt;
    auto* simulate = app.add_subcommand("simulate", "null Monte Carlo: rejection rate and Gumbel fit");
    add_experiment_flags(simulate, sim_opt, true);
    simulate->add_option("--values", sim_opt.values, "also write rep,value CSV of raw maxima");
    simulate->add_option("--calibration", sim_opt.calibration, "finite-sample threshold source");
    simulate->add_flag("--include-values", sim_opt.include_values, "embed per-replication values in the JSON");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "finite-n quantiles of the raw maximum under the null");
    add_experiment_flags(calibrate_cmd, cal_opt, false);
    calibrate_cmd->add_option("--probs", cal_opt.probs, "comma-separated probabilities")->delimiter(',')->required();
    calibrate_cmd->add_option("--values", cal_opt.values, "also write rep,value CSV of the draws");

    auto* power = app.add_subcommand("power", "rejection rate and localisation under a mean shift");
    add_experiment_flags(power, pow_opt, true);
    power->add_option("--kstar-frac", pow_opt.kstar_frac, "change location as a fraction of n")->capture_default_str();
    power->add_option("--delta", pow_opt.delta, "size of the mean shift")->required();
    power->add_option("--calibration", pow_opt.calibration, "finite-sample threshold source");
    power->add_option("--values", pow_opt.values, "also write rep,value CSV of raw maxima");
    power->add_flag("--include-values", pow_opt.include_values, "embed per-replication values in the JSON");

    auto* compare = app.add_subcommand("compare", "sigma-hat vs T normalisers on the same null samples");
    add_experiment_flags(compare, cmp_opt, false);
    compare->add_flag("--include-values", cmp_opt.include_values, "embed per-replication values in the JSON");

    LimitOptions lim;
    auto* limit = app.add_subcommand("limit", "quantiles of Brownian-bridge limit functionals");
    limit->add_option("--functional", lim.functional, "weighted_sup_q|darling_erdos")->required();
    limit->add_option("--reps", lim.reps, "number of bridge paths")->required();
    limit->add_option("--grid", lim.grid, "uniform grid intervals")->capture_default_str();
    limit->add_option("--refine", lim.refine, "geometric points per octave near 0 and 1")->capture_default_str();
    limit->add_option("--horizon", lim.horizon, "T: sup over [1/T, 1-1/T], refinement floor 1/T")
        ->capture_default_str();
    limit->add_flag("--two-sided", lim.two_sided, "use |B| in the Darling-Erdos functional");
    limit->add_option("--seed", lim.seed, "base seed (required)")->required();
    limit->add_option("--probs", lim.probs, "comma-separated probabilities")->delimiter(',')->required();
    limit->add_option("--threads", lim.threads, "worker threads; results do not depend on it");
    limit->add_option("--output", lim.output, "write the CSV here instead of stdout");
    limit->add_option("--values", lim.values, "also write rep,value CSV of the draws");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("amoc");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kRetain;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kRetain;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*test) return cmd_test(topt, out, err);
        if (*simulate) return cmd_simulate(sim_opt, false, out, err);
        if (*power) return cmd_simulate(pow_opt, true, out, err);
        if (*calibrate_cmd) return cmd_calibrate(cal_opt, out, err);
        if (*compare) return cmd_compare(cmp_opt, out, err);
        if (*limit) return cmd_limit(lim, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ModelError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const Error& e) {
        err << "data error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

} // namespace amoc::cli
