#include <doctest.h>

#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "netmix/io.hpp"
#include "netmix/report.hpp"
#include "scenarios.hpp"

using namespace netmix;
using testing::TempDir;

namespace {

struct Outcome {
    int status = -1;
    std::string err;
};

Outcome run(const TempDir& dir, const std::string& args) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + NETMIX_CLI_PATH + "\" " + args + " 2> \"" + err.string() + "\" > /dev/null";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.err = fs::exists(err) ? read_file(err) : std::string();
    return o;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Small, fast configuration shared by the end-to-end cases.
void write_small_config(const fs::path& path) {
    write_file_atomic(path, "H=4\nR=2\nn_iter=80\nburn_in=20\nthin=2\nsim_V=6\nsim_n0=10\nsim_n1=10\nsim_T=1\n");
}

}  // namespace

TEST_CASE("simulate, fit and test end to end") {
    TempDir dir("cli");
    write_small_config(dir / "run.cfg");
    REQUIRE(run(dir, "simulate --config " + q(dir / "run.cfg") + " --seed 5 --out-dir " + q(dir / "data")).status == 0);
    CHECK(fs::exists(dir / "data" / "manifest.csv"));
    CHECK(fs::exists(dir / "data" / "truth.json"));
    CHECK(load_dataset(dir / "data" / "manifest.csv").subjects.size() == 20);

    REQUIRE(run(dir, "fit --manifest " + q(dir / "data" / "manifest.csv") + " --config " + q(dir / "run.cfg") +
                         " --seed 3 --out " + q(dir / "draws.bin") + " --format both")
                .status == 0);
    CHECK(fs::exists(dir / "draws.csv"));

    REQUIRE(run(dir, "test --draws " + q(dir / "draws.bin") + " --manifest " + q(dir / "data" / "manifest.csv") +
                         " --out-dir " + q(dir / "tests"))
                .status == 0);
    const std::string report = read_file(dir / "tests" / "test_report.json");
    CHECK_NOTHROW(validate_test_report(report));
    const auto j = nlohmann::json::parse(report);
    CHECK(j["epsilon"] == 0.1);
    CHECK(j["decision_cutoff"] == 0.95);
    CHECK(j["nodes"] == 6);
    CHECK(j.contains("degree_groups"));

    REQUIRE(run(dir, "test --draws " + q(dir / "draws.bin") + " --manifest " + q(dir / "data" / "manifest.csv") +
                         " --epsilon 0.3 --cutoff 0.5 --out-dir " + q(dir / "tests2"))
                .status == 0);
    const auto j2 = nlohmann::json::parse(read_file(dir / "tests2" / "test_report.json"));
    CHECK(j2["epsilon"] == 0.3);
    CHECK(j2["pr_H1"] == j["pr_H1"]);

    REQUIRE(run(dir, "predict --draws " + q(dir / "draws.bin") + " --manifest " + q(dir / "data" / "manifest.csv") +
                         " --out-dir " + q(dir / "pred"))
                .status == 0);
    const auto cls = nlohmann::json::parse(read_file(dir / "pred" / "classification.json"));
    CHECK(cls["n"] == 20);

    REQUIRE(run(dir, "report --test-report " + q(dir / "tests" / "test_report.json") + " --classification " +
                         q(dir / "pred" / "classification.json") + " --out " + q(dir / "summary.md"))
                .status == 0);
    CHECK(read_file(dir / "summary.md").find("AUC") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
    TempDir dir("cli");
    write_small_config(dir / "run.cfg");
    REQUIRE(run(dir, "simulate --config " + q(dir / "run.cfg") + " --seed 8 --out-dir " + q(dir / "data")).status == 0);
    const std::string m = q(dir / "data" / "manifest.csv");
    for (const char* tag : {"a", "b"}) {
        const std::string threads = std::string(tag) == "a" ? "1" : "2";
        REQUIRE(run(dir, "fit --manifest " + m + " --config " + q(dir / "run.cfg") + " --threads " + threads +
                             " --out " + q(dir / (std::string(tag) + ".bin")))
                    .status == 0);
        REQUIRE(run(dir, "test --draws " + q(dir / (std::string(tag) + ".bin")) + " --manifest " + m + " --out-dir " +
                             q(dir / (std::string("t") + tag)))
                    .status == 0);
    }
    CHECK(read_file(dir / "a.bin") == read_file(dir / "b.bin"));
    for (const char* f : {"test_report.json", "edge_tests.csv", "edge_difference.csv", "test_degree.csv"})
        CHECK(read_file(dir / "ta" / f) == read_file(dir / "tb" / f));
}

TEST_CASE("mismatched data is refused before anything is written") {
    TempDir dir("cli");
    write_small_config(dir / "run.cfg");
    REQUIRE(run(dir, "simulate --config " + q(dir / "run.cfg") + " --seed 1 --out-dir " + q(dir / "d1")).status == 0);
    REQUIRE(run(dir, "simulate --config " + q(dir / "run.cfg") + " --seed 2 --out-dir " + q(dir / "d2")).status == 0);
    REQUIRE(run(dir, "fit --manifest " + q(dir / "d1" / "manifest.csv") + " --config " + q(dir / "run.cfg") +
                         " --out " + q(dir / "draws.bin"))
                .status == 0);
    const auto o = run(dir, "test --draws " + q(dir / "draws.bin") + " --manifest " + q(dir / "d2" / "manifest.csv") +
                                " --out-dir " + q(dir / "never"));
    CHECK(o.status == 7);
    CHECK(o.err.starts_with("error: checksum mismatch"));
    CHECK_FALSE(fs::exists(dir / "never"));

    write_file_atomic(dir / "big.cfg", "sim_V=7\nsim_n0=4\nsim_n1=4\n");
    REQUIRE(run(dir, "simulate --config " + q(dir / "big.cfg") + " --seed 1 --out-dir " + q(dir / "d3")).status == 0);
    const auto dim = run(dir, "test --draws " + q(dir / "draws.bin") + " --manifest " + q(dir / "d3" / "manifest.csv") +
                                  " --out-dir " + q(dir / "never"));
    CHECK(dim.status == 6);
    CHECK_FALSE(fs::exists(dir / "never"));
}

TEST_CASE("errors are reported on one line") {
    TempDir dir("cli");
    write_file_atomic(dir / "bad.cfg", "colour=blue\n");
    const auto cfg = run(dir, "simulate --config " + q(dir / "bad.cfg") + " --out-dir " + q(dir / "x"));
    CHECK(cfg.status == 3);
    CHECK(cfg.err.starts_with("error: config"));
    CHECK(std::count(cfg.err.begin(), cfg.err.end(), '\n') == 1);

    const auto missing = run(dir, "fit --manifest " + q(dir / "nope.csv") + " --out " + q(dir / "d.bin"));
    CHECK(missing.status == 4);
    CHECK(missing.err.starts_with("error: missing file"));
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

    const auto usage = run(dir, "fit --bogus");
    CHECK(usage.status == 2);
    CHECK(usage.err.starts_with("error: usage"));

    write_file_atomic(dir / "junk.bin", "not an archive");
    write_small_config(dir / "run.cfg");
    REQUIRE(run(dir, "simulate --config " + q(dir / "run.cfg") + " --seed 1 --out-dir " + q(dir / "d")).status == 0);
    const auto arc = run(dir, "test --draws " + q(dir / "junk.bin") + " --manifest " + q(dir / "d" / "manifest.csv") +
                                  " --out-dir " + q(dir / "t"));
    CHECK(arc.status == 8);
    CHECK(arc.err.starts_with("error: archive"));
}
