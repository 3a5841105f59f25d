#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "divprune/dataset.hpp"
#include "divprune/synthetic.hpp"

using namespace divprune;

namespace {

std::string binary() {
    const char* env = std::getenv("DIVPRUNE_BIN");
    REQUIRE_MESSAGE(env != nullptr, "DIVPRUNE_BIN must point at the divprune executable");
    return env;
}

int run(const std::string& args, std::string* stdout_path = nullptr) {
    static int counter = 0;
    const std::string out = "cli_out_" + std::to_string(counter++) + ".txt";
    const std::string cmd = binary() + " " + args + " > " + out + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (stdout_path) *stdout_path = out;
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Cleanup {
    std::vector<std::string> paths;
    ~Cleanup() {
        for (const auto& p : paths) std::remove(p.c_str());
    }
};

}  // namespace

TEST_CASE("every subcommand --help exits zero and documents defaults") {
    Cleanup gc;
    for (const std::string sub : {"", "train", "analyze", "sweep", "bench"}) {
        std::string out;
        const int rc = run(sub + (sub.empty() ? std::string("--help") : " --help"), &out);
        gc.paths.push_back(out);
        CHECK(rc == 0);
    }
    std::string out;
    run("bench --help", &out);
    gc.paths.push_back(out);
    const std::string text = slurp(out);
    CHECK(text.find("0.6") != std::string::npos);   // alpha default
    CHECK(text.find("0.01") != std::string::npos);  // epsilon default
    CHECK(text.find("5") != std::string::npos);     // folds default
}

TEST_CASE("unknown flags exit 2, missing files exit 3") {
    Cleanup gc;
    std::string out;
    gc.paths.push_back((run("train --no-such-flag", &out), out));
    CHECK(run("train --no-such-flag") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("train --data does_not_exist.csv") == 3);
    CHECK(run("analyze --model nope.json --data nope.csv") == 3);
}

TEST_CASE("train then analyze round trip") {
    Cleanup gc;
    const Dataset d = make_two_gaussian(80, 2, 2.0, 5);
    save_csv(d, "cli_data.csv");
    gc.paths = {"cli_data.csv", "cli_model.json", "cli_report.json"};

    CHECK(run("train --data cli_data.csv --size 5 --seed 3 --out cli_model.json") == 0);
    CHECK(std::ifstream("cli_model.json").good());

    std::string out;
    const int rc = run(
        "analyze --model cli_model.json --data cli_data.csv --out cli_report.json", &out);
    gc.paths.push_back(out);
    CHECK(rc == 0);
    const std::string text = slurp(out);
    CHECK(text.find("G_bar") != std::string::npos);
    CHECK(text.find("gamma") != std::string::npos);
    const std::string report = slurp("cli_report.json");
    CHECK(report.find("critical_points") != std::string::npos);
}

TEST_CASE("analyze on a singleton model reports zero diversity") {
    Cleanup gc;
    const Dataset d = make_two_gaussian(40, 2, 2.0, 9);
    save_csv(d, "cli_single.csv");
    gc.paths = {"cli_single.csv", "cli_single_model.json"};
    CHECK(run("train --data cli_single.csv --size 1 --seed 3 --out cli_single_model.json") == 0);
    std::string out;
    CHECK(run("analyze --model cli_single_model.json --data cli_single.csv", &out) == 0);
    gc.paths.push_back(out);
    CHECK(slurp(out).find("D_bar = 0.000000") != std::string::npos);
}

TEST_CASE("sweep emits one row per grid point and flags the singular point") {
    Cleanup gc;
    std::string out;
    CHECK(run("sweep --samples 200 --grid -0.49:0.49:101 --out cli_sweep.csv", &out) == 0);
    gc.paths = {out, "cli_sweep.csv"};
    const std::string csv = slurp("cli_sweep.csv");
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 102);  // header + 101 points
    CHECK(csv.find("singular") != std::string::npos);  // grid hits div = 0
}

TEST_CASE("repeated runs with one seed are byte-identical") {
    Cleanup gc;
    const Dataset d = make_two_gaussian(90, 2, 1.5, 11);
    save_csv(d, "cli_det.csv");
    gc.paths = {"cli_det.csv", "m1.json", "m2.json", "b1.csv", "b2.csv", "r1.json", "r2.json",
                "man1.json", "man2.json"};

    std::string o1, o2;
    CHECK(run("train --data cli_det.csv --size 7 --seed 42 --out m1.json", &o1) == 0);
    CHECK(run("train --data cli_det.csv --size 7 --seed 42 --out m2.json", &o2) == 0);
    gc.paths.push_back(o1);
    gc.paths.push_back(o2);
    CHECK(slurp("m1.json") == slurp("m2.json"));

    const std::string bench_args =
        "bench --data cli_det.csv --methods none,es,epbd --size 7 --base tree --depth 4 "
        "--folds 5 --seed 17";
    CHECK(run(bench_args + " --out-csv b1.csv --out-json r1.json --manifest man1.json", &o1) == 0);
    CHECK(run(bench_args + " --out-csv b2.csv --out-json r2.json --manifest man2.json", &o2) == 0);
    gc.paths.push_back(o1);
    gc.paths.push_back(o2);
    CHECK(slurp("b1.csv") == slurp("b2.csv"));
    CHECK(slurp("r1.json") == slurp("r2.json"));
    CHECK(slurp("man1.json") == slurp("man2.json"));
    CHECK(slurp("man1.json").find("input_digests") != std::string::npos);
}

TEST_CASE("bench runs its built-in suite when no data files are given") {
    Cleanup gc;
    std::string out;
    const int rc = run(
        "bench --methods none,epbd --size 9 --base tree --depth 4 --folds 3 --seed 5 "
        "--out-csv cli_suite.csv",
        &out);
    gc.paths = {out, "cli_suite.csv"};
    CHECK(rc == 0);
    const std::string csv = slurp("cli_suite.csv");
    CHECK(csv.find("band-cross") != std::string::npos);
    CHECK(csv.find("epbd_mean") != std::string::npos);
}
