#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "amoc/error.hpp"
#include "amoc/mc_harness.hpp"
#include "amoc/report_io.hpp"

using namespace amoc;

namespace {

Sample parse(const std::string& text, std::optional<std::size_t> column = std::nullopt) {
    std::istringstream in(text);
    return read_series(in, column, "mem");
}

std::size_t parse_error_line(const std::string& text, std::optional<std::size_t> column = std::nullopt) {
    try {
        parse(text, column);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 5.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("read_series") {
    CHECK(parse("1\n2.5\n\n-3e2\n").size() == 3);
    CHECK(parse("value\n1\n2\n").size() == 2);
    const auto s = parse("a,b\n1,10\n2,20\n", 2);
    REQUIRE(s.size() == 2);
    CHECK(s[1] == 20.0);
    CHECK(parse_error_line("1\n2\nx\n") == 3);
    CHECK(parse_error_line("1\n2\n3\n4\n5\n6\nfoo\n8\n") == 7);
    CHECK(parse_error_line("1,2\n3\n", 2) == 2);
    CHECK(parse_error_line("1\nnan\n") == 2);
    CHECK_THROWS_AS(parse("1\n", 0), UsageError);
    CHECK_THROWS_AS(read_series_file("/nonexistent/input.txt", std::nullopt), IoError);
    CHECK_THROWS_AS(read_file("/nonexistent/input.txt"), IoError);
}

TEST_CASE("fingerprint") {
    CHECK(fingerprint("") == "fnv1a64:cbf29ce484222325");
    CHECK(fingerprint("a") == "fnv1a64:af63dc4c8601ec8c");
}

TEST_CASE("csv writers") {
    const std::vector<double> v{1.5, std::nan("")};
    CHECK(values_csv(v) == "rep,value\n0,1.5\n1,nan\n");
    const std::vector<double> p{0.5, 0.95};
    const std::vector<double> q{1.0, 2.25};
    CHECK(quantile_csv(p, q, {{"seed", "3"}}) == "# seed: 3\nprob,value\n0.5,1\n0.95,2.25\n");
}

TEST_CASE("calibration files") {
    const auto table = parse_calibration("# model: normal:0,1\nprob,value\n0.9,2.0\n0.95,2.5\n0.99,3.0\n");
    CHECK(table.kind == Calibration::Kind::quantiles);
    CHECK(calibrated_pvalue(table, 1.0) == 1.0);
    CHECK(calibrated_pvalue(table, 2.6) == doctest::Approx(0.05));
    CHECK(calibrated_pvalue(table, 2.5) == doctest::Approx(0.1));
    CHECK(calibrated_pvalue(table, 9.0) == doctest::Approx(0.01));

    const auto draws = parse_calibration("rep,value\n0,1\n1,2\n2,nan\n3,3\n");
    CHECK(draws.kind == Calibration::Kind::draws);
    CHECK(draws.values.size() == 3);
    CHECK(calibrated_pvalue(draws, 2.0) == doctest::Approx(3.0 / 4.0));
    CHECK(calibrated_pvalue(draws, 10.0) == doctest::Approx(1.0 / 4.0));

    CHECK_THROWS_AS(parse_calibration("x,y\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_calibration("prob,value\n"), ParseError);
    try {
        parse_calibration("prob,value\n0.5,1\n0.9,zz\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("decision rule") {
    TestReport r;
    r.alpha = 0.05;
    r.p_asymptotic = 0.05;
    CHECK(decide(r, std::nullopt) == Decision::retain);
    r.p_asymptotic = 0.049;
    CHECK(decide(r, std::nullopt) == Decision::reject);
    r.p_calibrated = 0.05;
    CHECK(decide(r, Calibration::Kind::quantiles) == Decision::reject);
    CHECK(decide(r, Calibration::Kind::draws) == Decision::retain);
    r.p_calibrated = 0.5;
    CHECK(decide(r, Calibration::Kind::draws) == Decision::retain);
}

TEST_CASE("test report json") {
    TestReport r;
    r.n = 100;
    r.max_value = std::numeric_limits<double>::infinity();
    r.argmax_k = 50;
    r.a_n = 1.7;
    r.b_n = 2.9;
    r.normalized = std::numeric_limits<double>::infinity();
    r.p_asymptotic = 0.0;
    r.decision = Decision::reject;
    r.input_fingerprint = fingerprint("x");
    const auto doc = to_json(r);
    validate_test_report(doc);
    CHECK(doc["schema"] == 1);
    CHECK(doc["max_value"].is_null());
    CHECK(doc["max_value_text"] == "inf");
    CHECK(doc["decision"] == "reject");
    const auto again = nlohmann::json::parse(dump_json(doc));
    validate_test_report(again);
    CHECK(again == doc);
    auto broken = doc;
    broken.erase("a_n");
    CHECK_THROWS_AS(validate_test_report(broken), InvalidData);
    broken = doc;
    broken["schema"] = 2;
    CHECK_THROWS_AS(validate_test_report(broken), InvalidData);
}

TEST_CASE("experiment and paired report json") {
    ExperimentConfig c;
    c.n = 50;
    c.reps = 20;
    c.base_seed = 3;
    const auto rep = run_null(c);
    for (bool values : {false, true}) {
        const auto doc = nlohmann::json::parse(dump_json(to_json(rep, values)));
        validate_experiment_report(doc);
        CHECK(doc.contains("values") == values);
        CHECK(doc["config_hash"] == rep.config_hash);
    }
    const auto paired = compare_normalizers(c);
    const auto pdoc = nlohmann::json::parse(dump_json(to_json(paired, true)));
    validate_paired_report(pdoc);
    CHECK_THROWS_AS(validate_experiment_report(pdoc), InvalidData);
}
