#include "amoc/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "amoc/error.hpp"

namespace amoc {
namespace {

using nlohmann::json;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_number(const std::optional<double>& x) { return x ? number_or_null(*x) : json(nullptr); }

json vector_json(std::span<const double> xs) {
    json a = json::array();
    for (double x : xs) a.push_back(number_or_null(x));
    return a;
}

json config_json(const ExperimentConfig& c) {
    json j = {
        {"model", describe(c.model)},
        {"n", c.n},
        {"reps", c.reps},
        {"stat", std::string(to_string(c.stat))},
        {"sides", std::string(to_string(c.sides))},
        {"alpha", c.alpha},
        {"seed", c.base_seed},
    };
    if (c.change) {
        j["change"] = {{"kstar_frac", c.change->kstar_frac}, {"delta", c.change->delta}};
    }
    if (c.calibrated_critical) {
        j["calibrated_critical"] = *c.calibrated_critical;
    }
    return j;
}

json quantile_map(std::span<const double> probs, std::span<const double> values) {
    json q = json::object();
    for (std::size_t i = 0; i < probs.size() && i < values.size(); ++i) {
        q[format_double(probs[i])] = number_or_null(values[i]);
    }
    return q;
}

void require(const char* field, bool ok) {
    if (!ok) {
        throw InvalidData(std::string("report field '") + field + "' is missing or has the wrong type");
    }
}

bool is_number_or_null(const json& doc, const char* field) {
    return doc.contains(field) && (doc[field].is_number() || doc[field].is_null());
}

bool is_probability_or_null(const json& doc, const char* field) {
    if (!is_number_or_null(doc, field)) return false;
    if (doc[field].is_null()) return true;
    const double p = doc[field].get<double>();
    return p >= 0.0 && p <= 1.0;
}

void validate_header(const json& doc, const char* kind) {
    require("schema", doc.contains("schema") && doc["schema"].is_number_integer() &&
                               doc["schema"].get<int>() == kSchemaVersion);
    require("kind", doc.contains("kind") && doc["kind"] == kind);
    require("tool_version", doc.contains("tool_version") && doc["tool_version"].is_string());
}

void validate_config(const json& c) {
    require("config", c.is_object());
    require("config.model", c.contains("model") && c["model"].is_string());
    require("config.n", c.contains("n") && c["n"].is_number_unsigned());
    require("config.reps", c.contains("reps") && c["reps"].is_number_unsigned());
    require("config.stat", c.contains("stat") && c["stat"].is_string());
    require("config.sides", c.contains("sides") && (c["sides"] == "one" || c["sides"] == "two"));
    require("config.alpha", c.contains("alpha") && c["alpha"].is_number());
    require("config.seed", c.contains("seed") && c["seed"].is_number_unsigned());
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_finite(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    for (;;) {
        const auto comma = line.find(',');
        cells.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return cells;
}

} // namespace

std::string_view to_string(Decision d) noexcept { return d == Decision::reject ? "reject" : "retain"; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json to_json(const TestReport& r) {
    return {
        {"schema", kSchemaVersion},
        {"kind", "test"},
        {"tool_version", r.tool_version},
        {"n", r.n},
        {"stat_kind", std::string(to_string(r.stat_kind))},
        {"sides", std::string(to_string(r.sides))},
        {"max_value", number_or_null(r.max_value)},
        {"max_value_text", format_double(r.max_value)},
        {"argmax_k", r.argmax_k},
        {"a_n", r.a_n},
        {"b_n", r.b_n},
        {"normalized", optional_number(r.normalized)},
        {"p_asymptotic", optional_number(r.p_asymptotic)},
        {"p_asymptotic_note", "asymptotic Gumbel approximation; convergence is at iterated-logarithm speed"},
        {"p_calibrated", optional_number(r.p_calibrated)},
        {"alpha", r.alpha},
        {"decision", std::string(to_string(r.decision))},
        {"input_fingerprint", r.input_fingerprint},
    };
}

json to_json(const ExperimentReport& r, bool include_values) {
    json j = {
        {"schema", kSchemaVersion},
        {"kind", "experiment"},
        {"tool_version", std::string(kToolVersion)},
        {"config", config_json(r.config)},
        {"config_hash", r.config_hash},
        {"seed", r.config.base_seed},
        {"rng", r.rng},
        {"valid_reps", r.valid_reps},
        {"excluded_reps", r.excluded_reps},
        {"raw_quantiles", quantile_map(r.quantile_probs, r.raw_quantiles)},
        {"normalized_quantiles", quantile_map(r.quantile_probs, r.normalized_quantiles)},
        {"rejection_rate_asymptotic", optional_number(r.rejection_rate_asymptotic)},
        {"rejection_rate_calibrated", optional_number(r.rejection_rate_calibrated)},
        {"ks_to_gumbel", optional_number(r.ks_to_gumbel)},
        {"runtime_seconds", r.runtime_seconds},
    };
    if (r.localization) {
        j["localization"] = {
            {"kstar", r.localization->kstar},
            {"mean_abs_error_frac", r.localization->mean_abs_error_frac},
            {"quantiles", quantile_map(r.localization->probs, r.localization->quantiles)},
        };
    } else {
        j["localization"] = nullptr;
    }
    if (include_values) {
        j["values"] = {{"raw_max", vector_json(r.raw_max)}, {"normalized", vector_json(r.normalized)}};
    }
    return j;
}

json to_json(const PairedReport& r, bool include_values) {
    json j = {
        {"schema", kSchemaVersion},
        {"kind", "compare"},
        {"tool_version", std::string(kToolVersion)},
        {"config", config_json(r.config)},
        {"seed", r.config.base_seed},
        {"rng", std::string(Philox4x32::name)},
        {"correlation", number_or_null(r.correlation)},
        {"ks_hat", number_or_null(r.ks_hat)},
        {"ks_tkn", number_or_null(r.ks_tkn)},
        {"excluded_reps", r.excluded_reps},
        {"runtime_seconds", r.runtime_seconds},
    };
    if (include_values) {
        j["values"] = {{"hat_normalized", vector_json(r.hat_normalized)},
                       {"tkn_normalized", vector_json(r.tkn_normalized)}};
    }
    return j;
}

void validate_test_report(const json& doc) {
    validate_header(doc, "test");
    require("n", doc.contains("n") && doc["n"].is_number_unsigned());
    require("stat_kind", doc.contains("stat_kind") && doc["stat_kind"].is_string());
    parse_stat_kind(doc["stat_kind"].get<std::string>());
    require("sides", doc.contains("sides") && (doc["sides"] == "one" || doc["sides"] == "two"));
    require("max_value", is_number_or_null(doc, "max_value"));
    require("argmax_k", doc.contains("argmax_k") && doc["argmax_k"].is_number_unsigned());
    require("a_n", doc.contains("a_n") && doc["a_n"].is_number());
    require("b_n", doc.contains("b_n") && doc["b_n"].is_number());
    require("normalized", is_number_or_null(doc, "normalized"));
    require("p_asymptotic", is_probability_or_null(doc, "p_asymptotic"));
    require("p_calibrated", is_probability_or_null(doc, "p_calibrated"));
    require("alpha", doc.contains("alpha") && doc["alpha"].is_number() && doc["alpha"].get<double>() > 0.0 &&
                              doc["alpha"].get<double>() < 1.0);
    require("decision", doc.contains("decision") && (doc["decision"] == "reject" || doc["decision"] == "retain"));
    require("input_fingerprint", doc.contains("input_fingerprint") && doc["input_fingerprint"].is_string());
}

void validate_experiment_report(const json& doc) {
    validate_header(doc, "experiment");
    require("config", doc.contains("config"));
    validate_config(doc["config"]);
    require("config_hash", doc.contains("config_hash") && doc["config_hash"].is_string());
    require("seed", doc.contains("seed") && doc["seed"].is_number_unsigned());
    require("rng", doc.contains("rng") && doc["rng"].is_string());
    require("raw_quantiles", doc.contains("raw_quantiles") && doc["raw_quantiles"].is_object());
    require("rejection_rate_asymptotic", is_probability_or_null(doc, "rejection_rate_asymptotic"));
    require("rejection_rate_calibrated", is_probability_or_null(doc, "rejection_rate_calibrated"));
    require("ks_to_gumbel", is_probability_or_null(doc, "ks_to_gumbel"));
    require("runtime_seconds", doc.contains("runtime_seconds") && doc["runtime_seconds"].is_number());
    require("tool_version", doc["tool_version"].is_string());
}

void validate_paired_report(const json& doc) {
    validate_header(doc, "compare");
    require("config", doc.contains("config"));
    validate_config(doc["config"]);
    require("correlation", is_number_or_null(doc, "correlation"));
    require("ks_hat", is_probability_or_null(doc, "ks_hat"));
    require("ks_tkn", is_probability_or_null(doc, "ks_tkn"));
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

std::string values_csv(std::span<const double> values) {
    std::string out = "rep,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += std::to_string(i) + "," + format_double(values[i]) + "\n";
    }
    return out;
}

std::string quantile_csv(std::span<const double> probs, std::span<const double> values, const Metadata& metadata) {
    std::string out;
    for (const auto& [key, value] : metadata) {
        out += "# " + key + ": " + value + "\n";
    }
    out += "prob,value\n";
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out += format_double(probs[i]) + "," + format_double(values[i]) + "\n";
    }
    return out;
}

Metadata metadata_for(const ExperimentConfig& c) {
    Metadata m = {
        {"tool_version", std::string(kToolVersion)},
        {"model", describe(c.model)},
        {"n", std::to_string(c.n)},
        {"reps", std::to_string(c.reps)},
        {"stat", std::string(to_string(c.stat))},
        {"sides", std::string(to_string(c.sides))},
        {"seed", std::to_string(c.base_seed)},
        {"rng", std::string(Philox4x32::name)},
        {"config_hash", config_hash(c)},
    };
    return m;
}

Metadata metadata_for(const LimitConfig& c) {
    return {
        {"tool_version", std::string(kToolVersion)},
        {"functional", std::string(to_string(c.functional))},
        {"reps", std::to_string(c.reps)},
        {"grid", std::to_string(c.grid_size)},
        {"refine", std::to_string(c.refine)},
        {"horizon", format_double(c.horizon)},
        {"sides", std::string(to_string(c.sides))},
        {"seed", std::to_string(c.seed)},
        {"rng", std::string(Philox4x32::name)},
        {"note", "grid discretisation bias is not corrected; compare refinements"},
    };
}

Calibration parse_calibration(std::string_view text) {
    Calibration cal;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line == "prob,value") {
                cal.kind = Calibration::Kind::quantiles;
            } else if (line == "rep,value") {
                cal.kind = Calibration::Kind::draws;
            } else {
                throw ParseError("calibration header must be 'prob,value' or 'rep,value'", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 2) {
            throw ParseError("expected two comma-separated cells", line_no);
        }
        const auto first = parse_finite(cells[0]);
        if (cal.kind == Calibration::Kind::draws && trim(cells[1]) == "nan") {
            continue; // excluded replication
        }
        const auto second = parse_finite(cells[1]);
        if (!first || !second) {
            throw ParseError("non-numeric calibration cell", line_no);
        }
        if (cal.kind == Calibration::Kind::quantiles) {
            cal.probs.push_back(*first);
        }
        cal.values.push_back(*second);
    }
    if (!header_seen || cal.values.empty()) {
        throw ParseError("calibration file holds no rows", line_no);
    }
    return cal;
}

Calibration read_calibration(const std::string& path) { return parse_calibration(read_file(path)); }

double calibrated_pvalue(const Calibration& cal, double stat) {
    if (cal.kind == Calibration::Kind::draws) {
        const auto at_least = std::count_if(cal.values.begin(), cal.values.end(), [&](double v) { return v >= stat; });
        return static_cast<double>(1 + at_least) / static_cast<double>(cal.values.size() + 1);
    }
    double exceeded = 0.0;
    for (std::size_t i = 0; i < cal.values.size(); ++i) {
        if (stat > cal.values[i]) {
            exceeded = std::max(exceeded, cal.probs[i]);
        }
    }
    return 1.0 - exceeded;
}

Decision decide(const TestReport& r, const std::optional<Calibration::Kind>& kind) {
    if (r.p_calibrated) {
        // A quantile table yields a bound attained only under strict
        // exceedance, so equality with alpha already means p < alpha.
        const bool reject = kind == Calibration::Kind::quantiles ? *r.p_calibrated <= r.alpha : *r.p_calibrated < r.alpha;
        return reject ? Decision::reject : Decision::retain;
    }
    if (r.p_asymptotic) {
        return *r.p_asymptotic < r.alpha ? Decision::reject : Decision::retain;
    }
    return Decision::retain;
}

Sample read_series(std::istream& in, std::optional<std::size_t> column, std::string provenance) {
    if (column && *column == 0) {
        throw UsageError("--column is 1-based");
    }
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        std::string_view cell = row;
        if (column) {
            const auto cells = split_csv(row);
            if (*column > cells.size()) {
                throw ParseError("row has " + std::to_string(cells.size()) + " column(s), need column " +
                                     std::to_string(*column),
                                 line_no);
            }
            cell = cells[*column - 1];
        }
        const auto v = parse_finite(cell);
        if (!v) {
            if (first_row) {
                first_row = false;
                continue;
            }
            throw ParseError("cannot parse '" + std::string(trim(cell)) + "' as a finite number", line_no);
        }
        first_row = false;
        values.push_back(*v);
    }
    return Sample(std::move(values), std::move(provenance));
}

Sample read_series_file(const std::string& path, std::optional<std::size_t> column) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open input file '" + path + "'");
    }
    return read_series(in, column, path);
}

std::string fingerprint(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << contents;
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

} // namespace amoc
