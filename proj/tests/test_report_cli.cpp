#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "jlusin/error.hpp"
#include "jlusin/report.hpp"
#include "oracles.hpp"

using namespace jlusin;
namespace fs = std::filesystem;

namespace {

VerificationReport sample_report() {
    VerificationReport r;
    r.suite = "sm1";
    r.alpha = -0.9;
    r.beta = 0.5;
    r.M = 1;
    r.N = 1;
    r.flavor = "D";
    r.gamma = 0.09;
    r.measuredC = 13.579111111111113;
    r.refinementDelta = 1.0 / 3.0;
    r.samples = 162;
    r.verdict = Verdict::Unstable;
    r.seed = 18446744073709551615ull;
    r.runtimeMs = 1234.5;
    r.stats["skippedSamples"] = 54;
    r.notes = "a, \"quoted\" note";
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "jlusin_tests";
    fs::create_directories(dir);
    const auto p = dir / name;
    fs::remove(p);
    return p;
}

struct Run {
    int code;
    std::string out;
};

Run cli(const std::string& args) {
    const auto log = scratch("cli_out.txt");
    const std::string cmd = std::string(JLUSIN_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int st = std::system(cmd.c_str());
    std::ifstream is(log);
    std::string out((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

}  // namespace

TEST_SUITE("report") {
    TEST_CASE("JSON line round trip") {
        const auto r = sample_report();
        CHECK(report_from_line(report_to_line(r)) == r);
        auto n = r;
        n.gamma = std::nan("");
        const auto line = report_to_line(n);
        CHECK(line.find("\"gamma\":null") != std::string::npos);
        CHECK(report_from_line(line) == n);
    }

    TEST_CASE("field names and order") {
        const auto line = report_to_line(sample_report());
        std::size_t pos = 0;
        for (const char* k : {"suite", "alpha", "beta", "M", "N", "flavor", "gamma", "measuredC", "refinementDelta",
                              "samples", "verdict", "seed", "runtimeMs", "version"}) {
            const auto at = line.find("\"" + std::string(k) + "\":", pos);
            REQUIRE(at != std::string::npos);
            pos = at;
        }
    }

    TEST_CASE("append and read back") {
        const auto path = scratch("reports.jsonl").string();
        const auto r = sample_report();
        emit_report(r, path);
        emit_reports({r, r}, path);
        const auto back = read_reports(path);
        REQUIRE(back.size() == 3);
        for (const auto& x : back) CHECK(x == r);
    }

    TEST_CASE("grid CSV") {
        const auto path = scratch("grid.csv").string();
        const std::vector<GridRow> rows{{0.1, 0.2, 0.3, 1.0 / 3.0}, {1.0, 2.0, 3.0, -4e-300}};
        write_grid_csv(rows, path);
        std::ifstream is(path);
        std::string head;
        std::getline(is, head);
        CHECK(head == "theta,phi,t,value");
        const auto back = read_grid_csv(path);
        REQUIRE(back.size() == 2);
        CHECK(back[0].value == rows[0].value);
        CHECK(back[1].value == rows[1].value);
    }

    TEST_CASE("violated verdict sets exit code 2") {
        auto r = sample_report();
        CHECK(verify_exit_code({r}) == 0);
        auto v = r;
        v.verdict = Verdict::Violated;
        CHECK(verify_exit_code({r, v}) == 2);
    }

    TEST_CASE("I/O errors name the path") {
        try {
            emit_report(sample_report(), "/nonexistent_dir/x.jsonl");
            FAIL("expected an error");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("/nonexistent_dir/x.jsonl") != std::string::npos);
        }
        CHECK_THROWS_AS(report_from_line("{not json"), ConfigError);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("kernel subcommand matches the Chebyshev closed form") {
        const auto r = cli("kernel --alpha -0.5 --beta -0.5 --t 0.5 --theta 1.0 --phi 2.0");
        REQUIRE(r.code == 0);
        const auto line = r.out.substr(r.out.find('\n') + 1);
        const double v = std::stod(line.substr(line.rfind(',') + 1));
        auto P = [](double rr, double x) { return (1 - rr * rr) / (1 - 2 * rr * std::cos(x) + rr * rr); };
        const double ref = (P(std::exp(-0.5), -1.0) + P(std::exp(-0.5), 3.0)) / (2 * oracle::pi);
        CHECK(v == doctest::Approx(ref).epsilon(1e-10));
    }

    TEST_CASE("area requires M + N > 0") {
        const auto r = cli("area --M 0 --N 0 --coeffs 0,1 --theta 1.0");
        CHECK(r.code == 1);
        CHECK(r.out.find("M + N > 0") != std::string::npos);
    }

    TEST_CASE("unknown subcommands and flags print usage") {
        auto r = cli("frobnicate");
        CHECK(r.code == 1);
        CHECK(r.out.find("Usage") != std::string::npos);
        r = cli("kernel --bogus 3");
        CHECK(r.code == 1);
        CHECK(r.out.find("Usage") != std::string::npos);
        CHECK(cli("verify nosuch").code == 1);
    }

    TEST_CASE("verify writes JSON lines to the output path only") {
        const auto path = scratch("omega.jsonl");
        const auto r = cli("verify omega --alpha 0.5 --beta 0.5 --seed 7 --out " + path.string());
        CHECK(r.code == 0);
        const auto reps = read_reports(path.string());
        REQUIRE(reps.size() == 1);
        CHECK(reps[0].suite == "omega");
        CHECK(reps[0].measuredC < 1e-9);
        CHECK(reps[0].seed == 7);
    }


    TEST_CASE("sweep and grids") {
        const auto path = scratch("ups.csv");
        auto r = cli("upsilon --alpha -0.9 --beta 0.5 --t 0.1,1 --theta 0.5 --phi 1,2 --out " + path.string());
        CHECK(r.code == 0);
        CHECK(read_grid_csv(path.string()).size() == 4);
        r = cli("sweep compsin --alphas 0.5,-0.9 --betas 0.5");
        CHECK(r.code == 0);
        int lines = 0;
        for (char ch : r.out) lines += ch == '\n';
        CHECK(lines == 2);
        CHECK(cli("gfun --M 1 --coeffs 0,1 --theta 1.0").code == 0);
    }
}
