#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "eor/cli.hpp"
#include "eor/csv.hpp"
#include "eor/metrics.hpp"
#include "eor/rng.hpp"

using namespace eor;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
    std::vector<const char*> argv = {"eor"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return runCli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("eor_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string runningExampleCsv() {
    std::ostringstream os;
    os << "id,group,prob\n";
    std::vector<double> a = {0.9, 0.9, 0.8, 0.7, 0.1};
    a.insert(a.end(), 12, 0.05);
    std::vector<double> b = {0.6, 0.6, 0.6, 0.5, 0.5, 0.4, 0.4, 0.4};
    for (std::size_t i = 0; i < a.size(); ++i)
        os << "a" << i << ",A," << formatG10(a[i]) << "\n";
    for (std::size_t i = 0; i < b.size(); ++i)
        os << "b" << i << ",B," << formatG10(b[i]) << "\n";
    return os.str();
}

std::vector<std::vector<std::string>> parseCsv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        rows.push_back(fields);
    }
    return rows;
}

}  // namespace

TEST_CASE("rank subcommand") {
    TempDir tmp;
    writeFile(tmp.file("pool.csv"), runningExampleCsv());

    std::string out = tmp.file("rank.csv");
    CHECK(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "eor", "--out", out}) == 0);
    auto rows = parseCsv(readFile(out));
    REQUIRE(rows.size() == 26);
    CHECK(rows[0] == std::vector<std::string>{"rank", "id", "group", "prob"});
    CHECK(rows[1][1] == "b0");  // first pick is the B candidate with prob 0.6
    CHECK(rows[1][2] == "B");
    CHECK(rows[1][3] == "0.6");

    // PRP on a sorted pool is the identity order.
    writeFile(tmp.file("sorted.csv"),
              "id,group,prob\nx1,A,0.9\nx2,A,0.8\nx3,B,0.7\nx4,B,0.1\n");
    CHECK(run({"rank", "--input", tmp.file("sorted.csv"), "--policy", "prp", "--out", out}) ==
          0);
    rows = parseCsv(readFile(out));
    CHECK(rows[1][1] == "x1");
    CHECK(rows[2][1] == "x2");
    CHECK(rows[3][1] == "x3");
    CHECK(rows[4][1] == "x4");

    // Input errors exit with 2 and name the line.
    writeFile(tmp.file("noprob.csv"), "id,group\nx,A\n");
    CHECK(run({"rank", "--input", tmp.file("noprob.csv"), "--policy", "prp"}) == 2);
    writeFile(tmp.file("badprob.csv"), "id,group,prob\nx,A,0.5\ny,B,oops\n");
    CHECK(run({"rank", "--input", tmp.file("badprob.csv"), "--policy", "prp"}) == 2);
    CHECK(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "nope"}) == 2);
    CHECK(run({"rank", "--input", tmp.file("missing.csv"), "--policy", "prp"}) == 2);

    // Constraint errors exit with 3.
    writeFile(tmp.file("three.csv"),
              "id,group,prob\nx,A,0.5\ny,B,0.5\nz,C,0.5\n");
    CHECK(run({"rank", "--input", tmp.file("three.csv"), "--policy", "prr"}) == 3);
    CHECK(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "exp"}) == 3);

    // Protected group by name; unknown names are input errors.
    CHECK(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "fairstar",
               "--protected", "A", "--out", out}) == 0);
    rows = parseCsv(readFile(out));
    CHECK(rows[1][2] == "A");  // PRP-best; the loose quota never displaces it
    CHECK(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "fairstar",
               "--protected", "Z"}) == 2);
}

TEST_CASE("trace subcommand") {
    TempDir tmp;
    writeFile(tmp.file("pool.csv"), runningExampleCsv());
    std::string out = tmp.file("trace.csv");
    CHECK(run({"trace", "--input", tmp.file("pool.csv"), "--policy", "eor", "--out", out}) ==
          0);
    auto rows = parseCsv(readFile(out));
    REQUIRE(rows.size() == 26);
    CHECK(rows[0] ==
          std::vector<std::string>{"k", "id", "group", "delta", "total_cost", "cost_A",
                                   "cost_B"});
    double peak = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r)
        peak = std::max(peak, std::fabs(std::stod(rows[r][3])));
    CHECK(peak == doctest::Approx(0.15).epsilon(1e-9));
    CHECK(std::fabs(std::stod(rows[25][3])) < 1e-12);  // last row: delta 0
    CHECK(std::fabs(std::stod(rows[25][4])) < 1e-12);  // and total cost 0

    // Label mode without labels is a constraint error.
    CHECK(run({"trace", "--input", tmp.file("pool.csv"), "--mode", "labels"}) == 3);

    // With labels present the delta column switches to label fractions.
    writeFile(tmp.file("labeled.csv"),
              "id,group,prob,label\n"
              "x1,A,0.9,1\nx2,A,0.6,0\nx3,B,0.8,1\nx4,B,0.3,1\n");
    std::string lbl_out = tmp.file("label_trace.csv");
    CHECK(run({"trace", "--input", tmp.file("labeled.csv"), "--policy", "prp", "--mode",
               "labels", "--out", lbl_out}) == 0);
    auto lbl_rows = parseCsv(readFile(lbl_out));
    // PRP = x1, x3, x2, x4; label fractions after k=1: A 1/1, B 0/2.
    CHECK(std::stod(lbl_rows[1][3]) == doctest::Approx(1.0));

    // Byte determinism: identical invocations give identical bytes.
    std::string out2 = tmp.file("trace2.csv");
    CHECK(run({"trace", "--input", tmp.file("pool.csv"), "--policy", "ts", "--seed", "9",
               "--runs", "20", "--out", out2}) == 0);
    std::string out3 = tmp.file("trace3.csv");
    CHECK(run({"trace", "--input", tmp.file("pool.csv"), "--policy", "ts", "--seed", "9",
               "--runs", "20", "--out", out3}) == 0);
    CHECK(readFile(out2) == readFile(out3));
}

TEST_CASE("audit subcommand and the rank round-trip") {
    TempDir tmp;
    writeFile(tmp.file("pool.csv"), runningExampleCsv());

    // Build a logged-ranking file from the rank output (self-audit).
    std::string rank_out = tmp.file("rank.csv");
    REQUIRE(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "eor", "--out",
                 rank_out}) == 0);
    auto rank_rows = parseCsv(readFile(rank_out));
    std::ostringstream logged;
    logged << "query_id,position,id,group,prob\n";
    for (std::size_t r = 1; r < rank_rows.size(); ++r)
        logged << "q1," << rank_rows[r][0] << "," << rank_rows[r][1] << "," << rank_rows[r][2]
               << "," << rank_rows[r][3] << "\n";
    writeFile(tmp.file("logged.csv"), logged.str());

    std::string audit_out = tmp.file("audit.json");
    CHECK(run({"audit", "--input", tmp.file("logged.csv"), "--out", audit_out}) == 0);
    auto report = nlohmann::json::parse(readFile(audit_out));
    CHECK(report["query_count"] == 1);
    REQUIRE(report["mean_abs_delta_logged"].size() == 25);

    // Self-audit: the logged curve is the EOR curve.
    for (std::size_t k = 0; k < 25; ++k) {
        double lg = report["mean_abs_delta_logged"][k];
        double eo = report["mean_abs_delta_eor"][k];
        CHECK(lg == doctest::Approx(eo).epsilon(1e-12));
    }

    // Round-trip against the trace subcommand.
    std::string trace_out = tmp.file("trace.csv");
    REQUIRE(run({"trace", "--input", tmp.file("pool.csv"), "--policy", "eor", "--out",
                 trace_out}) == 0);
    auto trace_rows = parseCsv(readFile(trace_out));
    for (std::size_t k = 0; k < 25; ++k) {
        double logged_delta = report["mean_abs_delta_logged"][k];
        CHECK(logged_delta ==
              doctest::Approx(std::fabs(std::stod(trace_rows[k + 1][3]))).epsilon(1e-9));
    }

    // A PRP logged ranking strays farther from zero than EOR somewhere.
    REQUIRE(run({"rank", "--input", tmp.file("pool.csv"), "--policy", "prp", "--out",
                 rank_out}) == 0);
    rank_rows = parseCsv(readFile(rank_out));
    std::ostringstream prp_logged;
    prp_logged << "query_id,position,id,group,prob\n";
    for (std::size_t r = 1; r < rank_rows.size(); ++r)
        prp_logged << "q1," << rank_rows[r][0] << "," << rank_rows[r][1] << ","
                   << rank_rows[r][2] << "," << rank_rows[r][3] << "\n";
    writeFile(tmp.file("prp_logged.csv"), prp_logged.str());
    CHECK(run({"audit", "--input", tmp.file("prp_logged.csv"), "--out", audit_out}) == 0);
    report = nlohmann::json::parse(readFile(audit_out));
    bool farther = false;
    for (std::size_t k = 0; k < 25; ++k) {
        double lg = report["mean_abs_delta_logged"][k];
        double eo = report["mean_abs_delta_eor"][k];
        if (lg > eo + 0.05) farther = true;
    }
    CHECK(farther);

    // Duplicate positions are an input error.
    writeFile(tmp.file("dup.csv"),
              "query_id,position,id,group,prob\nq',1,x,A,0.5\nq',1,y,B,0.5\n");
    CHECK(run({"audit", "--input", tmp.file("dup.csv")}) == 2);
}

TEST_CASE("audit averages per-query traces, including unequal lengths") {
    TempDir tmp;
    std::string q1 =
        "q1,1,x1,A,0.9\nq1,2,x2,B,0.4\nq1,3,x3,A,0.2\nq1,4,x4,B,0.6\n";
    std::string q2 = "q2,1,y1,B,0.8\nq2,2,y2,A,0.7\nq2,3,y3,A,0.3\n";
    std::string header = "query_id,position,id,group,prob\n";
    writeFile(tmp.file("both.csv"), header + q1 + q2);
    writeFile(tmp.file("one.csv"), header + q1);
    writeFile(tmp.file("two.csv"), header + q2);

    std::string out = tmp.file("a.json");
    REQUIRE(run({"audit", "--input", tmp.file("both.csv"), "--out", out}) == 0);
    auto both = nlohmann::json::parse(readFile(out));
    REQUIRE(run({"audit", "--input", tmp.file("one.csv"), "--out", out}) == 0);
    auto one = nlohmann::json::parse(readFile(out));
    REQUIRE(run({"audit", "--input", tmp.file("two.csv"), "--out", out}) == 0);
    auto two = nlohmann::json::parse(readFile(out));

    CHECK(both["query_count"] == 2);
    REQUIRE(both["mean_abs_delta_logged"].size() == 4);  // the longest query
    for (std::size_t k = 0; k < 4; ++k) {
        // Mean over the queries that reach prefix k.
        double expect = k < 3 ? (one["mean_abs_delta_logged"][k].get<double>() +
                                 two["mean_abs_delta_logged"][k].get<double>()) /
                                    2.0
                              : one["mean_abs_delta_logged"][k].get<double>();
        CHECK(both["mean_abs_delta_logged"][k].get<double>() ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("verify subcommand emits a certificate report") {
    TempDir tmp;
    writeFile(tmp.file("pool.csv"), runningExampleCsv());
    std::string out = tmp.file("verify.json");
    CHECK(run({"verify", "--input", tmp.file("pool.csv"), "--k", "4", "--out", out}) == 0);
    auto report = nlohmann::json::parse(readFile(out));
    CHECK(report["k"] == 4);
    CHECK(report["feasible"] == true);
    CHECK(report["delta"].get<double>() == doctest::Approx(0.15).epsilon(1e-9));
    CHECK(report["gap"].get<double>() <= report["bound"].get<double>() + 1e-9);
    CHECK(report["lp_value"].get<double>() >= report["ilp_value"].get<double>() - 1e-9);
    CHECK(report["ilp_value"].get<double>() >= report["eor_value"].get<double>() - 1e-9);
    CHECK(report["residual_max"].get<double>() <= 1e-9);

    // All prefixes at once: an array with one report per k.
    CHECK(run({"verify", "--input", tmp.file("pool.csv"), "--out", out}) == 0);
    auto all = nlohmann::json::parse(readFile(out));
    REQUIRE(all.is_array());
    CHECK(all.size() == 25);
}

TEST_CASE("simulate and compare emit the policy table") {
    TempDir tmp;
    std::string out = tmp.file("table.csv");
    CHECK(run({"simulate", "--scenario", "high", "--runs", "2", "--seed", "3", "--policies",
               "eor,prp,uniform", "--out", out}) == 0);
    auto rows = parseCsv(readFile(out));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"policy", "unfairness_mean", "unfairness_se",
                                              "effectiveness_mean", "effectiveness_se"});
    CHECK(rows[1][0] == "eor");
    CHECK(rows[3][0] == "uniform");
    CHECK(std::stod(rows[3][3]) == 0.0);  // uniform effectiveness is exactly zero

    std::string out2 = tmp.file("table2.csv");
    CHECK(run({"compare", "--scenario", "high", "--runs", "2", "--seed", "3", "--policies",
               "eor,prp,uniform", "--out", out2}) == 0);
    CHECK(readFile(out) == readFile(out2));  // same engine, same bytes

    CHECK(run({"simulate", "--scenario", "nope", "--runs", "1"}) == 2);
}

TEST_CASE("calibrate subcommand fits near-identity params on logit scores") {
    TempDir tmp;
    Rng rng(404);
    std::ostringstream os;
    os << "score,label\n";
    for (int i = 0; i < 5000; ++i) {
        double p = 0.05 + 0.9 * rng.nextUnit();
        os << formatG10(std::log(p / (1 - p))) << "," << (rng.nextBernoulli(p) ? 1 : 0)
           << "\n";
    }
    writeFile(tmp.file("scores.csv"), os.str());
    std::string out = tmp.file("calib.json");
    CHECK(run({"calibrate", "--input", tmp.file("scores.csv"), "--out", out}) == 0);
    auto report = nlohmann::json::parse(readFile(out));
    CHECK(std::fabs(report["platt"]["a"].get<double>() - 1.0) < 0.1);
    CHECK(std::fabs(report["platt"]["b"].get<double>()) < 0.1);
    CHECK(report["curve"].size() == 20);

    // CSV format variant.
    std::string csv_out = tmp.file("calib.csv");
    CHECK(run({"calibrate", "--input", tmp.file("scores.csv"), "--format", "csv", "--out",
               csv_out}) == 0);
    auto rows = parseCsv(readFile(csv_out));
    CHECK(rows[0] == std::vector<std::string>{"bin", "mean_predicted", "fraction_positive",
                                              "count"});
    CHECK(rows.size() == 21);
}
