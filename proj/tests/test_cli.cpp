// Integration tests that drive the built CLI binary end to end: exit codes,
// output directory layout, CSV schemas, manifests, and rerun determinism.

#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <pslab/io.hpp>

namespace fs = std::filesystem;

namespace {

const std::string g_cli_path = PSLAB_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) result.out += buf.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// the CLI prints the run directory on success
fs::path run_dir_of(const RunResult& r) {
    std::string line = r.out;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    return fs::path(line);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pslab_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::size_t count_lines(const std::string& text) {
    std::size_t count = 0;
    for (char c : text)
        if (c == '\n') ++count;
    return count;
}

}  // namespace

TEST_CASE("exact-spectrum subcommand writes the flagship run") {
    TempDir dir;
    const auto r = run_cli("exact-spectrum --model 1 --n 200 --m 1 --delta 0.01 --out " +
                           dir.path.string());
    REQUIRE(r.exit_code == 0);
    const fs::path run = run_dir_of(r);
    REQUIRE(fs::exists(run / "spectrum.csv"));
    REQUIRE(fs::exists(run / "manifest.json"));

    const std::string csv = slurp(run / "spectrum.csv");
    CHECK(csv.rfind("index,re,im,modulus,kind", 0) == 0);
    CHECK(count_lines(csv) == 201);  // header + 200 eigenvalue rows
    CHECK(csv.find(",outlier") != std::string::npos);

    // outlier row carries a modulus near 2.994
    std::istringstream in(csv);
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line.find(",outlier") == std::string::npos) continue;
        found = true;
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        const double re = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(std::abs(re - 2.994) < 1e-2);
    }
    CHECK(found);

    SECTION("manifest digests match the files on disk") {
        const auto doc = pslab::json::parse(slurp(run / "manifest.json"));
        CHECK(doc.at("command") == "exact-spectrum");
        for (const auto& entry : doc.at("outputs")) {
            const fs::path f = run / entry.at("file").get<std::string>();
            REQUIRE(fs::exists(f));
            CHECK(entry.at("fnv1a64") == pslab::hex64(pslab::fnv1a64_file(f)));
        }
    }
}

TEST_CASE("rerunning with identical parameters reproduces the CSV bitwise") {
    TempDir dir;
    const auto r1 = run_cli("exact-spectrum --model 2 --n 60 --m 3 --delta 0.01 --a 1 --out " +
                            dir.path.string());
    const auto r2 = run_cli("exact-spectrum --model 2 --n 60 --m 3 --delta 0.01 --a 1 --out " +
                            dir.path.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    REQUIRE(run_dir_of(r1) != run_dir_of(r2));
    CHECK(slurp(run_dir_of(r1) / "spectrum.csv") == slurp(run_dir_of(r2) / "spectrum.csv"));
}

TEST_CASE("pseudospectrum subcommand emits grid, header, and origin report") {
    TempDir dir;
    const auto r = run_cli(
        "pseudospectrum --model 1 --n 20 --m 2 --delta 0.05 --grid -1.2,1.2,-1.0,1.0 "
        "--nx 25 --ny 21 --eps 1e-3 --plot --out " +
        dir.path.string());
    REQUIRE(r.exit_code == 0);
    const fs::path run = run_dir_of(r);
    REQUIRE(fs::exists(run / "grid.csv"));
    REQUIRE(fs::exists(run / "grid_header.json"));
    REQUIRE(fs::exists(run / "origin_component.json"));
    REQUIRE(fs::exists(run / "grid.svg"));
    CHECK(count_lines(slurp(run / "grid.csv")) == 21);
    const auto header = pslab::json::parse(slurp(run / "grid_header.json"));
    CHECK(header.at("nx") == 25);
    const std::string svg = slurp(run / "grid.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("symbol-curve subcommand") {
    TempDir dir;
    const auto r = run_cli("symbol-curve --m 3 --a 1 --samples 512 --out " + dir.path.string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(run_dir_of(r) / "curve.csv");
    CHECK(csv.rfind("theta,re,im", 0) == 0);
    CHECK(count_lines(csv) == 513);
}

TEST_CASE("staircase subcommand (deterministic, small)") {
    TempDir dir;
    const auto r = run_cli("staircase --model 1 --n 24 --m 1 --delta 0.05 --out " +
                           dir.path.string());
    REQUIRE(r.exit_code == 0);
    const fs::path run = run_dir_of(r);
    const std::string sc = slurp(run / "staircase.csv");
    CHECK(sc.rfind("m,R,std_error", 0) == 0);
    CHECK(count_lines(sc) == 25);
    const std::string inc = slurp(run / "increments.csv");
    CHECK(inc.rfind("m,dR,spike,mark", 0) == 0);
    CHECK(count_lines(inc) == 24);
}

TEST_CASE("staircase subcommand (random, seeded) is reproducible") {
    TempDir dir;
    const std::string args = "staircase --random --n 12 --delta 0.05 --samples 3 --seed 7 --out " +
                             dir.path.string();
    const auto r1 = run_cli(args);
    const auto r2 = run_cli(args);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(run_dir_of(r1) / "staircase.csv") == slurp(run_dir_of(r2) / "staircase.csv"));
}

TEST_CASE("outlier-series, rouche, asymptotic-check subcommands") {
    TempDir dir;
    const auto r1 = run_cli("outlier-series --model 1 --n 200 --m 1 --delta 0.01 --order 12 --out " +
                            dir.path.string());
    REQUIRE(r1.exit_code == 0);
    const auto doc1 = pslab::json::parse(slurp(run_dir_of(r1) / "series.json"));
    CHECK(std::abs(doc1.at("value_re").get<double>() - 2.994987) < 1e-4);

    const auto r2 = run_cli("rouche --model 1 --n 100 --m 5 --delta 0.1 --out " + dir.path.string());
    REQUIRE(r2.exit_code == 0);
    const auto doc2 = pslab::json::parse(slurp(run_dir_of(r2) / "rouche.json"));
    CHECK(doc2.at("counts").at("outer") == 1);
    CHECK(doc2.at("counts").at("gap") == 0);
    CHECK(doc2.at("counts").at("inner") == 19);

    const auto r3 = run_cli("asymptotic-check --model 1 --n 500 --m 4 --delta 0.01 --out " +
                            dir.path.string());
    REQUIRE(r3.exit_code == 0);
    const auto doc3 = pslab::json::parse(slurp(run_dir_of(r3) / "deviation.json"));
    CHECK(doc3.at("predicted_points") == 124);
    CHECK(doc3.at("max_deviation").get<double>() < 0.25);
}

TEST_CASE("conjecture probes run end to end") {
    TempDir dir;
    const auto r1 = run_cli(
        "conjecture-probe --which 1 --model 2 --n 30 --m 2 --delta 0.01 --a 1 "
        "--grid -2.2,2.2,-2.2,2.2 --nx 41 --ny 41 --eps 1e-3 --out " +
        dir.path.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(fs::exists(run_dir_of(r1) / "conjecture1.json"));

    const auto r2 = run_cli("conjecture-probe --which 4 --pairs 40:4,80:8 --delta 0.01 --out " +
                            dir.path.string());
    REQUIRE(r2.exit_code == 0);
    const auto doc = pslab::json::parse(slurp(run_dir_of(r2) / "conjecture4.json"));
    CHECK(doc.at("rows").size() == 2);
}

TEST_CASE("exit codes") {
    TempDir dir;
    SECTION("unknown flag is a usage error (2)") {
        CHECK(run_cli("exact-spectrum --definitely-not-a-flag 3").exit_code == 2);
    }
    SECTION("unknown subcommand is a usage error (2)") {
        CHECK(run_cli("not-a-subcommand").exit_code == 2);
    }
    SECTION("violated precondition is a domain error (1)") {
        CHECK(run_cli("exact-spectrum --model 1 --n 10 --m 11 --delta 0.01 --out " +
                      dir.path.string())
                  .exit_code == 1);
        CHECK(run_cli("exact-spectrum --model 1 --n 10 --m 2 --delta 0 --out " + dir.path.string())
                  .exit_code == 1);
        CHECK(run_cli("rouche --n 200 --m 1 --delta 0.01 --out " + dir.path.string()).exit_code ==
              1);
    }
}

TEST_CASE("PSLAB_SEED environment variable sets the default seed") {
    TempDir dir;
    const std::string args = "dense-spectrum --random --n 8 --m 1 --delta 0.3 --out " +
                             dir.path.string();
    setenv("PSLAB_SEED", "12345", 1);
    const auto r1 = run_cli(args);
    const auto r2 = run_cli(args);
    unsetenv("PSLAB_SEED");
    const auto r3 = run_cli(args + " --seed 12345");
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(run_dir_of(r1) / "spectrum.csv") == slurp(run_dir_of(r2) / "spectrum.csv"));
    CHECK(slurp(run_dir_of(r1) / "spectrum.csv") == slurp(run_dir_of(r3) / "spectrum.csv"));
}
