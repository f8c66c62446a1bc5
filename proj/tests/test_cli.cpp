#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

#include "amoc/report_io.hpp"

namespace fs = std::filesystem;
using namespace amoc;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run amoc_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(AMOC_TEST_DATA_DIR) + "/" + name; }

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "amoc_test_cli";
    fs::create_directories(dir);
    return dir;
}

nlohmann::json expected() { return nlohmann::json::parse(read_file(data("expected.json"))); }

std::vector<std::string> rows(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

} // namespace

TEST_CASE("null fixture is retained") {
    const auto r = amoc_cli({"test", "--input", data("normal_1000.txt"), "--stat", "tkn", "--two-sided", "--alpha", "0.05"});
    CHECK(r.code == cli::kRetain);
    const auto doc = nlohmann::json::parse(r.out);
    validate_test_report(doc);
    const auto oracle = expected()["normal_1000.txt"];
    CHECK(doc["decision"] == oracle["decision"]);
    CHECK(doc["argmax_k"] == oracle["argmax_k"]);
    CHECK(doc["max_value"].get<double>() == doctest::Approx(oracle["max_value"].get<double>()).epsilon(1e-10));
    CHECK(doc["p_asymptotic"].get<double>() == doctest::Approx(oracle["p_asymptotic"].get<double>()).epsilon(1e-8));
    CHECK(doc["n"] == 1000);
}

TEST_CASE("shifted fixture is rejected near the change") {
    const auto r = amoc_cli({"test", "--input", data("normal_1000_shift5.txt")});
    CHECK(r.code == cli::kReject);
    const auto doc = nlohmann::json::parse(r.out);
    const auto k = doc["argmax_k"].get<std::size_t>();
    CHECK(k >= 450);
    CHECK(k <= 550);
    CHECK(doc["argmax_k"] == expected()["normal_1000_shift5.txt"]["argmax_k"]);
    CHECK(doc["decision"] == "reject");
}

TEST_CASE("other statistics on the fixtures") {
    CHECK(amoc_cli({"test", "--input", data("normal_1000_shift5.txt"), "--stat", "hat"}).code == cli::kReject);
    CHECK(amoc_cli({"test", "--input", data("normal_1000.txt"), "--stat", "hat", "--one-sided"}).code ==
          cli::kRetain);
    const auto g = amoc_cli({"test", "--input", data("normal_1000.txt"), "--stat", "gamma"});
    CHECK(g.code == cli::kUsage);
    CHECK(g.err.find("--calibration") != std::string::npos);
    CHECK(amoc_cli({"test", "--input", data("normal_1000.txt"), "--stat", "weighted"}).code == cli::kUsage);
    CHECK(amoc_cli({"test", "--input", data("normal_1000.txt"), "--two-sided", "--one-sided"}).code == cli::kUsage);
}

TEST_CASE("input errors") {
    const auto bad = amoc_cli({"test", "--input", data("bad_line7.csv")});
    CHECK(bad.code == cli::kData);
    CHECK(bad.err.find("line 7") != std::string::npos);
    CHECK(amoc_cli({"test", "--input", data("missing.txt")}).code == cli::kData);
    const auto dir = scratch();
    write_file((dir / "short.txt").string(), "1\n2\n3\n");
    const auto shrt = amoc_cli({"test", "--input", (dir / "short.txt").string()});
    CHECK(shrt.code == cli::kUsage);
    write_file((dir / "flat.txt").string(), "1\n1\n1\n1\n1\n");
    CHECK(amoc_cli({"test", "--input", (dir / "flat.txt").string()}).code == cli::kData);
    CHECK(amoc_cli({"test"}).code == cli::kUsage);
    CHECK(amoc_cli({"frobnicate"}).code == cli::kUsage);
    CHECK(amoc_cli({}).code == cli::kUsage);
}

TEST_CASE("calibrated test") {
    const auto dir = scratch();
    const auto table = (dir / "cal.csv").string();
    const auto c = amoc_cli({"calibrate", "--model", "normal", "--n", "1000", "--reps", "400", "--seed", "5",
                             "--probs", "0.9,0.95,0.99", "--output", table});
    REQUIRE(c.code == 0);
    const auto r = amoc_cli({"test", "--input", data("normal_1000_shift5.txt"), "--calibration", table});
    CHECK(r.code == cli::kReject);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["p_calibrated"].get<double>() == doctest::Approx(0.01));

    const auto draws = (dir / "draws.csv").string();
    REQUIRE(amoc_cli({"simulate", "--model", "normal", "--n", "1000", "--reps", "99", "--seed", "6", "--stat",
                      "gamma", "--values", draws, "--output", (dir / "sim.json").string()})
                .code == 0);
    const auto g = amoc_cli({"test", "--input", data("normal_1000.txt"), "--stat", "gamma", "--calibration", draws});
    CHECK(g.code == cli::kRetain);
    const auto gdoc = nlohmann::json::parse(g.out);
    CHECK(gdoc["p_calibrated"].get<double>() > 0.05);
    CHECK(gdoc["normalized"].is_null());
}

TEST_CASE("randomized commands need a seed and a valid model") {
    const auto r = amoc_cli({"simulate", "--model", "normal", "--n", "100", "--reps", "10"});
    CHECK(r.code == cli::kUsage);
    const auto m = amoc_cli({"simulate", "--model", "gauss", "--n", "100", "--reps", "10", "--seed", "1"});
    CHECK(m.code == cli::kUsage);
    CHECK(m.err.find("normal[:MEAN,SD] | student:DF | pareto2 | logpow:ALPHA") != std::string::npos);
    CHECK(amoc_cli({"simulate", "--model", "student:1", "--n", "100", "--reps", "10", "--seed", "1"}).code ==
          cli::kUsage);
    CHECK(amoc_cli({"limit", "--functional", "weighted_sup_q", "--reps", "100", "--probs", "0.5"}).code ==
          cli::kUsage);
    CHECK(amoc_cli({"limit", "--functional", "weighted_sup_q", "--reps", "10", "--seed", "1", "--probs", "0.5"})
              .code == cli::kUsage);
    CHECK(amoc_cli({"limit", "--functional", "darling_erdos", "--reps", "100", "--seed", "1", "--probs", "0.5",
                    "--horizon", "5"})
              .code == cli::kUsage);
}

TEST_CASE("simulate twice gives identical CSVs") {
    const auto dir = scratch();
    std::vector<std::string> csv;
    for (const char* threads : {"1", "3"}) {
        const auto path = (dir / (std::string("sim_") + threads + ".csv")).string();
        const auto r = amoc_cli({"simulate", "--model", "pareto2", "--n", "1000", "--reps", "100", "--seed", "7",
                                 "--stat", "tkn", "--values", path, "--threads", threads});
        REQUIRE(r.code == 0);
        validate_experiment_report(nlohmann::json::parse(r.out));
        CHECK(r.err.find("seed=7") != std::string::npos);
        csv.push_back(read_file(path));
    }
    CHECK(csv[0] == csv[1]);
    CHECK(rows(csv[0]).size() == 101);
}

TEST_CASE("limit table") {
    const auto r = amoc_cli(
        {"limit", "--functional", "weighted_sup_q", "--reps", "100", "--grid", "4096", "--seed", "1", "--probs", "0.5,0.9,0.95"});
    REQUIRE(r.code == 0);
    const auto body = rows(r.out);
    REQUIRE(body.size() == 4);
    CHECK(body[0] == "prob,value");
    std::vector<double> v;
    for (std::size_t i = 1; i < body.size(); ++i) v.push_back(std::stod(body[i].substr(body[i].find(',') + 1)));
    CHECK(std::is_sorted(v.begin(), v.end()));
    CHECK(r.out.find("# functional: weighted_sup_q") != std::string::npos);
    CHECK(r.out.find("# seed: 1") != std::string::npos);
}

TEST_CASE("calibrate table") {
    const auto r = amoc_cli({"calibrate", "--model", "normal", "--n", "500", "--reps", "200", "--probs", "0.95",
                             "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto body = rows(r.out);
    CHECK(body.size() == 2);
    CHECK(r.out.rfind("# ", 0) == 0);
    CHECK(r.out.find("# reps: 200") != std::string::npos);
}

TEST_CASE("power and compare") {
    const auto p = amoc_cli({"power", "--model", "normal:0,1", "--n", "300", "--reps", "50", "--seed", "3",
                             "--kstar-frac", "0.5", "--delta", "1"});
    REQUIRE(p.code == 0);
    const auto doc = nlohmann::json::parse(p.out);
    validate_experiment_report(doc);
    CHECK(doc["localization"]["kstar"] == 150);
    CHECK(amoc_cli({"power", "--model", "normal", "--n", "300", "--reps", "5", "--seed", "3"}).code == cli::kUsage);
    const auto c = amoc_cli({"compare", "--model", "pareto2", "--n", "300", "--reps", "30", "--seed", "4"});
    REQUIRE(c.code == 0);
    validate_paired_report(nlohmann::json::parse(c.out));
}

TEST_CASE("help and version") {
    CHECK(amoc_cli({"--help"}).code == 0);
    const auto v = amoc_cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
}
