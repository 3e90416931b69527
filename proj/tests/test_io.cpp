#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <pslab/io.hpp>

using namespace pslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("pslab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

TEST_CASE("spectrum CSV schema and round trip") {
    TempDir dir;
    ExactSpectrum spec;
    spec.nonzero_roots = {cd(2.99498, 0.0), cd(-0.75, 0.3141592653589793)};
    spec.outlier_index = 0;
    spec.zero_algebraic_multiplicity = 3;
    const fs::path p = dir.path / "spectrum.csv";
    write_spectrum_csv(p, spec);

    const std::string text = slurp(p);
    SECTION("header, row count, kinds") {
        CHECK(text.rfind("index,re,im,modulus,kind\n", 0) == 0);
        CHECK(count_substr(text, "\n") == 6);  // header + 2 roots + 3 zeros
        CHECK(count_substr(text, ",outlier\n") == 1);
        CHECK(count_substr(text, ",nonzero\n") == 1);
        CHECK(count_substr(text, ",zero\n") == 3);
        CHECK(text.find("\r") == std::string::npos);
    }
    SECTION("17-digit round trip is bit exact") {
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);  // header
        std::getline(in, line);
        // index,re,im,...
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
        const double re = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        const double im = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
        CHECK(re == spec.nonzero_roots[0].real());
        CHECK(im == spec.nonzero_roots[0].imag());
    }
    SECTION("empty spectrum still carries the header") {
        ExactSpectrum empty;
        empty.nonzero_roots = {};
        empty.zero_algebraic_multiplicity = 0;
        const fs::path q = dir.path / "empty.csv";
        write_spectrum_csv(q, empty);
        CHECK(slurp(q) == "index,re,im,modulus,kind\n");
    }
}

TEST_CASE("grid and curve CSVs") {
    TempDir dir;
    PseudospectrumGrid grid;
    grid.region = GridRegion{-1.0, 1.0, -1.0, 1.0, 3, 2};
    grid.sigma = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    const fs::path p = dir.path / "grid.csv";
    write_grid_csv(p, grid);
    CHECK(slurp(p) == "0.25,0.5,1\n2,4,8\n");

    const json header = grid_header_json(grid);
    CHECK(header.at("nx") == 3);
    CHECK(header.at("re_min") == -1.0);

    const SymbolCurve curve = build_symbol_curve(2, cd(1.0), 16);
    const fs::path c = dir.path / "curve.csv";
    write_curve_csv(c, curve);
    const std::string text = slurp(c);
    CHECK(text.rfind("theta,re,im\n", 0) == 0);
    CHECK(count_substr(text, "\n") == 17);
}

TEST_CASE("run manifest digests its outputs") {
    TempDir dir;
    const fs::path data = dir.path / "out.csv";
    {
        std::ofstream f(data, std::ios::binary);
        f << "index,re\n0,1.5\n";
    }
    RunManifest man;
    man.command = "exact-spectrum";
    man.parameters = json{{"n", 200}, {"m", 1}};
    man.seed = 42;
    man.started_utc = utc_timestamp_now();
    man.finished_utc = utc_timestamp_now();
    man.outputs = {data};
    const fs::path mpath = dir.path / "manifest.json";
    write_manifest(mpath, man);

    const json doc = json::parse(slurp(mpath));
    CHECK(doc.at("command") == "exact-spectrum");
    CHECK(doc.at("outputs").size() == 1);
    const std::string digest = doc.at("outputs")[0].at("fnv1a64");
    CHECK(digest == hex64(fnv1a64_file(data)));
    CHECK(doc.at("outputs")[0].at("bytes").get<std::uint64_t>() == fs::file_size(data));
}

TEST_CASE("svg rendering") {
    SECTION("scatter has one marker per point") {
        PlotSpec plot;
        plot.kind = PlotKind::scatter;
        plot.x_min = -2.0; plot.x_max = 2.0; plot.y_min = -2.0; plot.y_max = 2.0;
        const std::vector<cd> pts{cd(0.0), cd(1.0), cd(0.0, 1.0), cd(-1.0, -1.0)};
        const std::string svg = render_svg(plot, pts);
        CHECK(count_substr(svg, "<circle") == 4);
        CHECK(svg.rfind("<svg", 0) == 0);
    }
    SECTION("heatmap has one cell per node") {
        PlotSpec plot;
        plot.kind = PlotKind::heatmap;
        plot.x_min = -1.0; plot.x_max = 1.0; plot.y_min = -1.0; plot.y_max = 1.0;
        PseudospectrumGrid grid;
        grid.region = GridRegion{-1.0, 1.0, -1.0, 1.0, 3, 3};
        grid.sigma.assign(9, 0.5);
        const std::string svg = render_svg(plot, grid);
        CHECK(count_substr(svg, "<rect") == 10);  // 9 cells + background
    }
    SECTION("line series becomes one polyline with n-1 vertices") {
        PlotSpec plot;
        plot.kind = PlotKind::line;
        plot.x_min = 0.0; plot.x_max = 10.0; plot.y_min = -1.0; plot.y_max = 1.0;
        const std::vector<double> series{0.1, 0.2, -0.3, 0.4, 0.0, 0.2, -0.1, 0.3, 0.25};
        const std::string svg = render_svg(plot, series);
        CHECK(count_substr(svg, "<polyline") == 1);
        const auto start = svg.find("points=\"");
        const auto end = svg.find('"', start + 8);
        const std::string pts = svg.substr(start + 8, end - start - 8);
        CHECK(count_substr(pts, ",") == series.size());
    }
    SECTION("empty data rejected") {
        PlotSpec plot;
        plot.kind = PlotKind::scatter;
        CHECK_THROWS_AS(render_svg(plot, std::vector<cd>{}), domain_error);
    }
}

TEST_CASE("format_g17 round trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 2.994987437106620, -1e-300, 3.5e17}) {
        CHECK(std::stod(format_g17(v)) == v);
    }
}
