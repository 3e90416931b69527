#pragma once

// Serialization surface: CSV with full round-trip precision (17 significant
// digits, LF endings), JSON reports, run manifests with content digests,
// and self-contained SVG plots (scatter / heatmap / line).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pslab/errors.hpp"
#include "pslab/exact_spectrum.hpp"
#include "pslab/experiments.hpp"
#include "pslab/linalg.hpp"
#include "pslab/pseudospectrum.hpp"
#include "pslab/symbol.hpp"
#include "pslab/version.hpp"

namespace pslab {

using json = nlohmann::json;

/// Shortest representation that round-trips a double exactly.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV writers

/// Columns: index,re,im,modulus,kind with kind in {nonzero, outlier, zero}.
inline void write_spectrum_csv(const std::filesystem::path& path, const ExactSpectrum& spec) {
    auto out = detail::open_out(path);
    out << "index,re,im,modulus,kind\n";
    std::size_t idx = 0;
    for (std::size_t i = 0; i < spec.nonzero_roots.size(); ++i, ++idx) {
        const cd z = spec.nonzero_roots[i];
        out << idx << ',' << format_g17(z.real()) << ',' << format_g17(z.imag()) << ','
            << format_g17(std::abs(z)) << ',' << (i == spec.outlier_index ? "outlier" : "nonzero")
            << '\n';
    }
    for (long long i = 0; i < spec.zero_algebraic_multiplicity; ++i, ++idx)
        out << idx << ",0,0,0,zero\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Same schema for a dense eigensolver result; entries with modulus below
/// 1e-12 of the largest are labeled zero, the rest nonzero.
inline void write_spectrum_csv(const std::filesystem::path& path, const EigenResult& eig) {
    auto out = detail::open_out(path);
    out << "index,re,im,modulus,kind\n";
    double top = 0.0;
    for (const cd& z : eig.values) top = std::max(top, std::abs(z));
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        const cd z = eig.values[i];
        const double r = std::abs(z);
        out << i << ',' << format_g17(z.real()) << ',' << format_g17(z.imag()) << ','
            << format_g17(r) << ',' << (r <= 1e-12 * top ? "zero" : "nonzero") << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// sigma matrix, one CSV row per grid row (imaginary axis index).
inline void write_grid_csv(const std::filesystem::path& path, const PseudospectrumGrid& grid) {
    auto out = detail::open_out(path);
    for (int j = 0; j < grid.region.ny; ++j) {
        for (int k = 0; k < grid.region.nx; ++k) {
            if (k) out << ',';
            out << format_g17(grid.sigma_at(j, k));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline json grid_header_json(const PseudospectrumGrid& grid) {
    return json{{"re_min", grid.region.re_min}, {"re_max", grid.region.re_max},
                {"im_min", grid.region.im_min}, {"im_max", grid.region.im_max},
                {"nx", grid.region.nx},         {"ny", grid.region.ny},
                {"value", "sigma_min(zI - A)"}};
}

inline void write_curve_csv(const std::filesystem::path& path, const SymbolCurve& curve) {
    auto out = detail::open_out(path);
    out << "theta,re,im\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i)
        out << format_g17(curve.thetas[i]) << ',' << format_g17(curve.points[i].real()) << ','
            << format_g17(curve.points[i].imag()) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_staircase_csv(const std::filesystem::path& path, const StaircaseSeries& s) {
    auto out = detail::open_out(path);
    out << "m,R,std_error\n";
    for (std::size_t i = 0; i < s.R.size(); ++i)
        out << (i + 1) << ',' << format_g17(s.R[i]) << ','
            << (i < s.std_error.size() ? format_g17(s.std_error[i]) : "0") << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_increments_csv(const std::filesystem::path& path, const StaircaseSeries& s) {
    auto out = detail::open_out(path);
    const std::vector<int> spikes = spike_indices(s);
    out << "m,dR,spike,mark\n";
    for (std::size_t i = 0; i < s.dR.size(); ++i) {
        const int m = static_cast<int>(i) + 1;
        const bool spike = std::find(spikes.begin(), spikes.end(), m) != spikes.end();
        const bool mark = std::find(s.marks.begin(), s.marks.end(), m) != s.marks.end();
        out << m << ',' << format_g17(s.dR[i]) << ',' << (spike ? 1 : 0) << ',' << (mark ? 1 : 0)
            << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Run manifest

inline std::uint64_t fnv1a64(std::span<const char> bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for digest: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string s = ss.str();
    return fnv1a64(std::span<const char>(s.data(), s.size()));
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Ties a run's outputs to its inputs: command, parameters, seed, version,
/// timestamps, and per-file fnv1a-64 digests.
struct RunManifest {
    std::string command;
    json parameters;
    std::uint64_t seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::filesystem::path> outputs;
};

inline std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    json files = json::array();
    for (const auto& f : manifest.outputs) {
        files.push_back(json{{"file", f.filename().string()},
                             {"bytes", std::filesystem::file_size(f)},
                             {"fnv1a64", hex64(fnv1a64_file(f))}});
    }
    const json doc{{"command", manifest.command}, {"version", version},
                   {"parameters", manifest.parameters}, {"seed", manifest.seed},
                   {"started_utc", manifest.started_utc},
                   {"finished_utc", manifest.finished_utc}, {"outputs", files}};
    auto out = detail::open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// SVG rendering

enum class PlotKind { scatter, heatmap, line };

struct PlotSpec {
    PlotKind kind = PlotKind::scatter;
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    bool log_color = true;    // heatmaps: color by log10 of the resolvent norm
    double color_cap = 6.0;   // log10 clip; resolvent norms beyond 1e6 saturate
    int width = 640, height = 640;
    std::string title;
};

namespace detail {

inline void check_finite_ranges(const PlotSpec& p) {
    require(std::isfinite(p.x_min) && std::isfinite(p.x_max) && std::isfinite(p.y_min) &&
                std::isfinite(p.y_max) && p.x_min < p.x_max && p.y_min < p.y_max,
            "plot axis ranges must be finite and ordered");
}

// compact viridis-like ramp, t in [0,1]
inline std::string ramp_color(double t) {
    static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                       {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

struct SvgCanvas {
    std::ostringstream body;
    const PlotSpec& p;
    explicit SvgCanvas(const PlotSpec& spec) : p(spec) {}
    double px(double x) const { return (x - p.x_min) / (p.x_max - p.x_min) * p.width; }
    double py(double y) const { return p.height - (y - p.y_min) / (p.y_max - p.y_min) * p.height; }
    std::string finish() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << p.width << "\" height=\""
            << p.height << "\" viewBox=\"0 0 " << p.width << ' ' << p.height << "\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"" << p.width << "\" height=\"" << p.height
            << "\" fill=\"white\" stroke=\"black\"/>\n";
        out << body.str();
        if (!p.title.empty())
            out << "<text x=\"8\" y=\"16\" font-size=\"13\" font-family=\"sans-serif\">"
                << p.title << "</text>\n";
        out << "</svg>\n";
        return out.str();
    }
};

}  // namespace detail

inline std::string render_svg(const PlotSpec& plot, std::span<const cd> points) {
    detail::check_finite_ranges(plot);
    require(plot.kind == PlotKind::scatter, "point data renders as a scatter plot");
    require(!points.empty(), "nothing to plot");
    detail::SvgCanvas svg(plot);
    for (const cd& z : points)
        svg.body << "<circle cx=\"" << svg.px(z.real()) << "\" cy=\"" << svg.py(z.imag())
                 << "\" r=\"2.5\" fill=\"#1f4e8c\" fill-opacity=\"0.85\"/>\n";
    return svg.finish();
}

inline std::string render_svg(const PlotSpec& plot, const PseudospectrumGrid& grid) {
    detail::check_finite_ranges(plot);
    require(plot.kind == PlotKind::heatmap, "grid data renders as a heatmap");
    require(!grid.sigma.empty(), "nothing to plot");
    detail::SvgCanvas svg(plot);
    const double cw = static_cast<double>(plot.width) / grid.region.nx;
    const double ch = static_cast<double>(plot.height) / grid.region.ny;
    for (int j = 0; j < grid.region.ny; ++j)
        for (int k = 0; k < grid.region.nx; ++k) {
            double v = plot.log_color ? grid.log_resolvent_at(j, k) : grid.sigma_at(j, k);
            v = std::min(v, plot.color_cap);
            const double t = plot.log_color ? v / plot.color_cap : v;
            // row 0 is im_min, drawn at the bottom
            svg.body << "<rect x=\"" << k * cw << "\" y=\"" << (grid.region.ny - 1 - j) * ch
                     << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\""
                     << detail::ramp_color(t) << "\"/>\n";
        }
    return svg.finish();
}

inline std::string render_svg(const PlotSpec& plot, std::span<const double> series) {
    detail::check_finite_ranges(plot);
    require(plot.kind == PlotKind::line, "series data renders as a line plot");
    require(!series.empty(), "nothing to plot");
    detail::SvgCanvas svg(plot);
    svg.body << "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) svg.body << ' ';
        svg.body << svg.px(static_cast<double>(i + 1)) << ',' << svg.py(series[i]);
    }
    svg.body << "\"/>\n";
    return svg.finish();
}

}  // namespace pslab
