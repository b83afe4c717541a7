// Drives the installed command-line binary end to end: exit codes, file
// outputs, determinism and replay. The binary path comes in via
// STEPSVM_CLI_PATH at compile time.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string cli = STEPSVM_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("stepsvm_cli_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    int rc = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void make_data(const TempDir& dir, const std::string& name, int n = 30, int p = 20,
               int informative = 4, double effect = 2.0, int seed = 7) {
    REQUIRE(run("synth --n " + std::to_string(n) + " --p " + std::to_string(p) +
                " --informative " + std::to_string(informative) + " --effect " +
                std::to_string(effect) + " --seed " + std::to_string(seed) + " --out " +
                (dir / name)) == 0);
}

} // namespace

TEST_CASE("help and version exit cleanly and document the commands") {
    CHECK(run("--help") == 0);
    CHECK(run("--version") == 0);
    for (const char* cmd : {"select", "reduce", "compare", "distances", "synth"})
        CHECK(run(std::string(cmd) + " --help") == 0);
}

TEST_CASE("bad invocations exit 1; missing files exit 2") {
    TempDir dir;
    CHECK(run("") == 1);
    CHECK(run("select") == 1);                       // missing --data
    CHECK(run("select --data x.csv --bogus") == 1);  // unknown flag
    CHECK(run("compare --data missing.csv --out " + (dir / "o")) == 2);
    CHECK(run("select --data missing.csv --out " + (dir / "o2")) == 2);
    // exit 2 happens before any output is written
    CHECK(!fs::exists(dir / "o2"));
    CHECK(run("compare --data d.csv --methods pca --trees 40 --out " + (dir / "o3")) == 1);
}

TEST_CASE("synth is deterministic and self-describing") {
    TempDir dir;
    make_data(dir, "a.csv");
    make_data(dir, "b.csv");
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    REQUIRE(run("synth --n 20 --p 10 --informative 2 --seed 3 --out " + (dir / "t.csv") +
                " --truth " + (dir / "t.txt")) == 0);
    std::string truth = slurp(dir / "t.txt");
    CHECK(!truth.empty());
}

TEST_CASE("select runs are reproducible byte for byte") {
    TempDir dir;
    make_data(dir, "d.csv");
    REQUIRE(run("select --data " + (dir / "d.csv") + " --seed 7 --out " + (dir / "s1")) == 0);
    REQUIRE(run("select --data " + (dir / "d.csv") + " --seed 7 --out " + (dir / "s2")) == 0);
    CHECK(slurp(dir / "s1/selection.txt") == slurp(dir / "s2/selection.txt"));
    CHECK(slurp(dir / "s1/reduced.csv") == slurp(dir / "s2/reduced.csv"));
}

TEST_CASE("an explicit threshold forces fixed mode") {
    TempDir dir;
    make_data(dir, "d.csv");
    REQUIRE(run("select --data " + (dir / "d.csv") + " --threshold 1/2 --out " +
                (dir / "fixed")) == 0);
    std::string report = slurp(dir / "fixed/selection.txt");
    CHECK(report.find("mode fixed") != std::string::npos);
    CHECK(report.find("chosen_threshold 1/2") != std::string::npos);
    CHECK(report.find("candidates 1") != std::string::npos);

    // A threshold below every score selects nothing: validation error.
    CHECK(run("select --data " + (dir / "d.csv") + " --threshold 0/1 --out " +
              (dir / "none")) == 1);
}

TEST_CASE("reduce consumes reports or explicit indices") {
    TempDir dir;
    make_data(dir, "d.csv");
    REQUIRE(run("select --data " + (dir / "d.csv") + " --seed 1 --out " + (dir / "sel")) == 0);
    REQUIRE(run("reduce --data " + (dir / "d.csv") + " --report " +
                (dir / "sel/selection.txt") + " --out " + (dir / "r1.csv")) == 0);
    CHECK(slurp(dir / "r1.csv") == slurp(dir / "sel/reduced.csv"));

    REQUIRE(run("reduce --data " + (dir / "d.csv") + " --features 0,3,5 --out " +
                (dir / "r2.csv")) == 0);
    std::string header = slurp(dir / "r2.csv");
    CHECK(header.substr(0, header.find('\n')) == "label,f0,f3,f5");

    CHECK(run("reduce --data " + (dir / "d.csv") + " --out " + (dir / "r3.csv")) == 1);
    CHECK(run("reduce --data " + (dir / "d.csv") + " --features 99 --out " +
              (dir / "r4.csv")) == 1);
}

TEST_CASE("compare is deterministic, thread-invariant and replayable") {
    TempDir dir;
    make_data(dir, "d.csv", 24, 12, 4, 2.0, 5);
    std::string base_flags = "compare --data " + (dir / "d.csv") +
                             " --methods stepwise,original --reps 5 --seed 42 --folds 3";
    REQUIRE(run(base_flags + " --threads 1 --out " + (dir / "c1")) == 0);
    REQUIRE(run(base_flags + " --threads 1 --out " + (dir / "c2")) == 0);
    REQUIRE(run(base_flags + " --threads 8 --out " + (dir / "c8")) == 0);

    for (const char* f : {"table.txt", "table.csv", "accuracies.csv", "manifest.txt"}) {
        CHECK(slurp(dir / ("c1/" + std::string(f))) == slurp(dir / ("c2/" + std::string(f))));
        CHECK(slurp(dir / ("c1/" + std::string(f))) == slurp(dir / ("c8/" + std::string(f))));
    }

    // Replay from the manifest reproduces every output byte.
    REQUIRE(run("compare --replay " + (dir / "c1/manifest.txt") + " --threads 2 --out " +
                (dir / "c_replay")) == 0);
    for (const char* f : {"table.txt", "table.csv", "accuracies.csv", "manifest.txt"})
        CHECK(slurp(dir / ("c1/" + std::string(f))) ==
              slurp(dir / ("c_replay/" + std::string(f))));

    // Five repetitions means five data rows in the per-repetition CSV.
    std::string acc = slurp(dir / "c1/accuracies.csv");
    int lines = 0;
    for (char ch : acc)
        lines += ch == '\n';
    CHECK(lines == 6); // header + 5 repetitions
}

TEST_CASE("distances writes matrices, contrast and honors --subset") {
    TempDir dir;
    make_data(dir, "d.csv", 20, 12, 3, 2.5, 9);
    REQUIRE(run("select --data " + (dir / "d.csv") + " --seed 2 --out " + (dir / "sel")) == 0);
    REQUIRE(run("distances --data " + (dir / "d.csv") + " --subset " +
                (dir / "sel/selection.txt") + " --reorder --out " + (dir / "dst")) == 0);
    CHECK(fs::exists(dir / "dst/distance_full.csv"));
    CHECK(fs::exists(dir / "dst/distance_full.pgm"));
    CHECK(fs::exists(dir / "dst/distance_reduced.csv"));
    CHECK(fs::exists(dir / "dst/distance_reduced.pgm"));
    std::string contrast = slurp(dir / "dst/contrast.txt");
    CHECK(contrast.find("full ") != std::string::npos);
    CHECK(contrast.find("reduced ") != std::string::npos);
}

TEST_CASE("unlabeled distances omit the contrast but still export") {
    TempDir dir;
    // Write a label-free matrix by hand.
    std::ofstream out(dir / "plain.csv");
    out << "1.0,2.0\n2.0,3.0\n4.0,0.5\n";
    out.close();
    REQUIRE(run("distances --data " + (dir / "plain.csv") + " --label-col none --out " +
                (dir / "dst")) == 0);
    CHECK(fs::exists(dir / "dst/distance_full.csv"));
    CHECK(!fs::exists(dir / "dst/contrast.txt"));
}

TEST_CASE("config files substitute for flags and flags win") {
    TempDir dir;
    make_data(dir, "d.csv");
    std::ofstream cfg(dir / "run.cfg");
    cfg << "[select]\n";
    cfg << "data=" << (dir / "d.csv") << "\n";
    cfg << "seed=7\n";
    cfg << "out=" << (dir / "from_cfg") << "\n";
    cfg.close();

    REQUIRE(run("--config " + (dir / "run.cfg") + " select") == 0);
    CHECK(fs::exists(dir / "from_cfg/selection.txt"));
    CHECK(slurp(dir / "from_cfg/selection.txt").find("seed 7") != std::string::npos);

    // The command line overrides the config value for --out.
    REQUIRE(run("--config " + (dir / "run.cfg") + " select --out " + (dir / "flag_wins")) == 0);
    CHECK(fs::exists(dir / "flag_wins/selection.txt"));
    CHECK(slurp(dir / "from_cfg/selection.txt") == slurp(dir / "flag_wins/selection.txt"));
}
