// pslab command-line front end. Every subcommand writes its numeric outputs
// (CSV/JSON, optionally SVG) into a fresh <out>/<command>-<timestamp>/
// directory together with a manifest tying the files to the exact
// parameters and seed of the run.
//
// Exit codes: 0 success, 1 domain error (violated precondition printed),
// 2 usage error.

#include <chrono>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pslab/exact_spectrum.hpp>
#include <pslab/experiments.hpp>
#include <pslab/io.hpp>
#include <pslab/linalg.hpp>
#include <pslab/models.hpp>
#include <pslab/pseudospectrum.hpp>
#include <pslab/symbol.hpp>
#include <pslab/version.hpp>

namespace fs = std::filesystem;
using namespace pslab;

namespace {

// "re" or "re,im" -> complex
cd parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return cd(std::stod(text), 0.0);
    return cd(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
}

struct CommonOpts {
    int model = 1;
    int n = 200;
    int m = 1;
    std::string delta = "0.01";
    std::string a = "0";
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string out = "out";
    std::string format = "csv";
    bool plot = false;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--model", opts.model, "model variant (1 or 2)")->check(CLI::IsMember({1, 2}));
    cmd->add_option("--n", opts.n, "matrix size");
    cmd->add_option("--m", opts.m, "time index in [1, n]");
    cmd->add_option("--delta", opts.delta, "perturbation strength (re or re,im)");
    cmd->add_option("--a", opts.a, "model-2 coefficient (re or re,im)");
    cmd->add_option("--seed", opts.seed, "random seed")->each([&](const std::string&) {
        opts.seed_given = true;
    });
    cmd->add_option("--out", opts.out, "output directory root");
    cmd->add_option("--format", opts.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--plot", opts.plot, "emit an SVG plot");
    cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
}

ModelSpec to_spec(const CommonOpts& o) {
    return ModelSpec{o.model == 2 ? Model::two : Model::one, o.n, o.m, parse_complex(o.delta),
                     parse_complex(o.a)};
}

std::uint64_t effective_seed(const CommonOpts& o) {
    if (!o.seed_given) {
        if (const char* env = std::getenv("PSLAB_SEED")) return std::strtoull(env, nullptr, 10);
    }
    return o.seed;
}

// <out>/<command>-<timestamp>[-k]/
fs::path make_run_dir(const std::string& out_root, const std::string& command) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%S", &tm);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
                        .count() % 1000;
    fs::path dir = fs::path(out_root) / (command + "-" + stamp + "." + std::to_string(ms));
    for (int k = 1; fs::exists(dir); ++k)
        dir = fs::path(out_root) / (command + "-" + std::string(stamp) + "." +
                                    std::to_string(ms) + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

// process start, so manifests bracket the whole computation
const std::string g_started_utc = utc_timestamp_now();

struct RunContext {
    fs::path dir;
    RunManifest manifest;

    RunContext(const CommonOpts& opts, const std::string& command, json params)
        : dir(make_run_dir(opts.out, command)) {
        manifest.command = command;
        manifest.parameters = std::move(params);
        manifest.seed = effective_seed(opts);
        manifest.started_utc = g_started_utc;
    }
    fs::path file(const std::string& name) {
        manifest.outputs.push_back(dir / name);
        return dir / name;
    }
    void finish() {
        manifest.finished_utc = utc_timestamp_now();
        write_manifest(dir / "manifest.json", manifest);
        std::cout << dir.string() << "\n";
    }
};

json common_params(const CommonOpts& o) {
    const cd delta = parse_complex(o.delta);
    const cd a = parse_complex(o.a);
    return json{{"model", o.model},       {"n", o.n},
                {"m", o.m},               {"delta_re", delta.real()},
                {"delta_im", delta.imag()}, {"a_re", a.real()},
                {"a_im", a.imag()},       {"format", o.format},
                {"threads", o.threads}};
}

void write_spectrum_json(const fs::path& path, const ExactSpectrum& ex) {
    json rows = json::array();
    for (std::size_t i = 0; i < ex.nonzero_roots.size(); ++i)
        rows.push_back(json{{"re", ex.nonzero_roots[i].real()},
                            {"im", ex.nonzero_roots[i].imag()},
                            {"kind", i == ex.outlier_index ? "outlier" : "nonzero"}});
    const json doc{{"roots", rows},
                   {"zero_algebraic_multiplicity", ex.zero_algebraic_multiplicity},
                   {"zero_geometric_multiplicity", ex.zero_geometric_multiplicity},
                   {"max_residual", ex.max_residual}};
    std::ofstream out(path, std::ios::binary);
    out << doc.dump(2) << '\n';
}

PlotSpec scatter_plot_for(std::span<const cd> pts) {
    PlotSpec plot;
    plot.kind = PlotKind::scatter;
    double radius = 1e-6;
    for (const cd& z : pts) radius = std::max({radius, std::abs(z.real()), std::abs(z.imag())});
    radius *= 1.1;
    plot.x_min = -radius;
    plot.x_max = radius;
    plot.y_min = -radius;
    plot.y_max = radius;
    return plot;
}

void emit_scatter(RunContext& ctx, const std::string& name, std::span<const cd> pts,
                  const std::string& title) {
    PlotSpec plot = scatter_plot_for(pts);
    plot.title = title;
    std::ofstream out(ctx.file(name), std::ios::binary);
    out << render_svg(plot, pts);
}

int cmd_exact_spectrum(const CommonOpts& opts) {
    const ModelSpec spec = to_spec(opts);
    const ExactSpectrum ex = exact_spectrum(spec);
    RunContext ctx(opts, "exact-spectrum", common_params(opts));
    if (opts.format == "json")
        write_spectrum_json(ctx.file("spectrum.json"), ex);
    else
        write_spectrum_csv(ctx.file("spectrum.csv"), ex);
    if (opts.plot) emit_scatter(ctx, "spectrum.svg", ex.nonzero_roots, "exact spectrum");
    ctx.finish();
    return 0;
}

int cmd_dense_spectrum(const CommonOpts& opts, bool random) {
    ComplexMatrix A = random ? build_random_perturbed(RandomMatrixSpec{
                                   opts.n, opts.m, parse_complex(opts.delta), effective_seed(opts)})
                             : build_model(to_spec(opts));
    const EigenResult eig = eigenvalues(A);
    json params = common_params(opts);
    params["random"] = random;
    RunContext ctx(opts, "dense-spectrum", params);
    if (opts.format == "json") {
        json rows = json::array();
        for (const cd& z : eig.values) rows.push_back(json{{"re", z.real()}, {"im", z.imag()}});
        std::ofstream out(ctx.file("spectrum.json"), std::ios::binary);
        out << json{{"values", rows}}.dump(2) << '\n';
    } else {
        write_spectrum_csv(ctx.file("spectrum.csv"), eig);
    }
    if (opts.plot) emit_scatter(ctx, "spectrum.svg", eig.values, "dense spectrum");
    ctx.finish();
    return 0;
}

int cmd_pseudospectrum(const CommonOpts& opts, const std::string& grid_arg, int nx, int ny,
                       double eps) {
    GridRegion region;
    {
        std::vector<double> vals;
        std::string token;
        std::istringstream in(grid_arg);
        while (std::getline(in, token, ',')) vals.push_back(std::stod(token));
        require(vals.size() == 4, "--grid expects re0,re1,im0,im1");
        region = GridRegion{vals[0], vals[1], vals[2], vals[3], nx, ny};
    }
    const ComplexMatrix A = build_model(to_spec(opts));
    const PseudospectrumGrid grid = grid_scan(A, region, opts.threads);

    json params = common_params(opts);
    params["grid"] = grid_arg;
    params["nx"] = nx;
    params["ny"] = ny;
    params["eps"] = eps;
    RunContext ctx(opts, "pseudospectrum", params);
    if (opts.format == "json") {
        json rows = json::array();
        for (int j = 0; j < region.ny; ++j) {
            json row = json::array();
            for (int k = 0; k < region.nx; ++k) row.push_back(grid.sigma_at(j, k));
            rows.push_back(row);
        }
        json doc = grid_header_json(grid);
        doc["sigma"] = rows;
        std::ofstream out(ctx.file("grid.json"), std::ios::binary);
        out << doc.dump() << '\n';
    } else {
        write_grid_csv(ctx.file("grid.csv"), grid);
        std::ofstream out(ctx.file("grid_header.json"), std::ios::binary);
        out << grid_header_json(grid).dump(2) << '\n';
    }
    {
        const OriginComponent comp = epsilon_region_containing_origin(grid, eps);
        json ladder = json::array();
        for (double e : epsilon_ladder()) {
            const OriginComponent c = epsilon_region_containing_origin(grid, e);
            ladder.push_back(json{{"eps", e}, {"area", c.area}, {"max_abs", c.max_abs}});
        }
        std::ofstream out(ctx.file("origin_component.json"), std::ios::binary);
        out << json{{"eps", eps}, {"area", comp.area}, {"max_abs", comp.max_abs},
                    {"ladder", ladder}}
                   .dump(2)
            << '\n';
    }
    if (opts.plot) {
        PlotSpec plot;
        plot.kind = PlotKind::heatmap;
        plot.x_min = region.re_min;
        plot.x_max = region.re_max;
        plot.y_min = region.im_min;
        plot.y_max = region.im_max;
        plot.title = "log10 ||(zI - A)^{-1}||";
        std::ofstream out(ctx.file("grid.svg"), std::ios::binary);
        out << render_svg(plot, grid);
    }
    ctx.finish();
    return 0;
}

int cmd_symbol_curve(const CommonOpts& opts, int samples) {
    const SymbolCurve curve = build_symbol_curve(opts.m, parse_complex(opts.a), samples);
    json params = common_params(opts);
    params["samples"] = samples;
    RunContext ctx(opts, "symbol-curve", params);
    if (opts.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < curve.points.size(); ++i)
            rows.push_back(json{{"theta", curve.thetas[i]},
                                {"re", curve.points[i].real()},
                                {"im", curve.points[i].imag()}});
        std::ofstream out(ctx.file("curve.json"), std::ios::binary);
        out << json{{"m", opts.m}, {"points", rows}}.dump() << '\n';
    } else {
        write_curve_csv(ctx.file("curve.csv"), curve);
    }
    if (opts.plot) emit_scatter(ctx, "curve.svg", curve.points, "symbol curve");
    ctx.finish();
    return 0;
}

int cmd_outlier_series(const CommonOpts& opts, int order) {
    const ModelSpec spec = to_spec(opts);
    const auto p = compute_p_indices(spec.n, spec.m);
    if (order < 0) order = static_cast<int>(std::min<long long>(p.p1, 64));
    const cd value = outlier_series(spec, order);
    json params = common_params(opts);
    params["order"] = order;
    RunContext ctx(opts, "outlier-series", params);
    {
        std::ofstream out(ctx.file("series.csv"), std::ios::binary);
        out << "order,re,im\n";
        for (int k = 0; k <= order; ++k) {
            const cd partial = outlier_series(spec, k);
            out << k << ',' << format_g17(partial.real()) << ',' << format_g17(partial.imag())
                << '\n';
        }
    }
    {
        std::ofstream out(ctx.file("series.json"), std::ios::binary);
        out << json{{"order", order},
                    {"p1", p.p1},
                    {"value_re", value.real()},
                    {"value_im", value.imag()}}
                   .dump(2)
            << '\n';
    }
    ctx.finish();
    return 0;
}

int cmd_rouche(const CommonOpts& opts) {
    const cd delta = parse_complex(opts.delta);
    const RoucheRegions reg = rouche_regions(opts.n, std::abs(delta));
    const ModelSpec spec = to_spec(opts);
    const ExactSpectrum ex = exact_spectrum(spec);
    const RootClassCounts counts = classify_roots(ex.nonzero_roots, reg);
    RunContext ctx(opts, "rouche", common_params(opts));
    std::ofstream out(ctx.file("rouche.json"), std::ios::binary);
    out << json{{"r_minus", reg.r_minus},
                {"r_plus", reg.r_plus},
                {"outer_radius", reg.outer_radius},
                {"counts",
                 json{{"outer", counts.outer},
                      {"gap", counts.gap},
                      {"inner", counts.inner},
                      {"outside", counts.outside}}}}
               .dump(2)
        << '\n';
    out.close();
    ctx.finish();
    return 0;
}

int cmd_staircase(const CommonOpts& opts, int samples, bool random) {
    StaircaseSeries series;
    json params = common_params(opts);
    params["samples"] = samples;
    params["random"] = random;
    if (random) {
        series = staircase_run(opts.n, parse_complex(opts.delta).real(), samples,
                               effective_seed(opts), opts.threads);
    } else {
        series = staircase_run_deterministic(to_spec(opts), opts.threads);
    }
    params["skipped_samples"] = series.skipped;
    RunContext ctx(opts, "staircase", params);
    if (opts.format == "json") {
        const auto spikes = spike_indices(series);
        json doc{{"n", series.n},         {"delta", series.delta},
                 {"samples", series.samples}, {"R", series.R},
                 {"std_error", series.std_error}, {"dR", series.dR},
                 {"marks", series.marks}, {"spikes", spikes},
                 {"skipped", series.skipped}};
        std::ofstream out(ctx.file("staircase.json"), std::ios::binary);
        out << doc.dump() << '\n';
    } else {
        write_staircase_csv(ctx.file("staircase.csv"), series);
        write_increments_csv(ctx.file("increments.csv"), series);
    }
    if (opts.plot) {
        PlotSpec plot;
        plot.kind = PlotKind::line;
        plot.x_min = 0.0;
        plot.x_max = static_cast<double>(series.R.size() + 1);
        double lo = series.R[0], hi = series.R[0];
        for (double r : series.R) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        plot.y_min = lo - 0.05 * (hi - lo + 1e-12);
        plot.y_max = hi + 0.05 * (hi - lo + 1e-12);
        plot.title = "mean radius R(m)";
        std::ofstream out(ctx.file("staircase.svg"), std::ios::binary);
        out << render_svg(plot, std::span<const double>(series.R));
    }
    ctx.finish();
    return 0;
}

int cmd_conjecture_probe(const CommonOpts& opts, int which, const std::string& pairs_arg,
                         const std::string& grid_arg, int nx, int ny, double eps) {
    json params = common_params(opts);
    params["which"] = which;
    params["eps"] = eps;
    if (which == 1) {
        std::vector<double> vals;
        std::string token;
        std::istringstream in(grid_arg);
        while (std::getline(in, token, ',')) vals.push_back(std::stod(token));
        require(vals.size() == 4, "--grid expects re0,re1,im0,im1");
        const GridRegion region{vals[0], vals[1], vals[2], vals[3], nx, ny};
        const ConjectureReport rep = conjecture1_probe(to_spec(opts), region, eps, opts.threads);
        RunContext ctx(opts, "conjecture-probe", params);
        std::ofstream out(ctx.file("conjecture1.json"), std::ios::binary);
        out << json{{"outer_match_distance", rep.outer_match_distance},
                    {"outer_mean_distance", rep.outer_mean_distance},
                    {"outer_threshold", rep.outer_threshold},
                    {"outer_count", rep.outer_count},
                    {"origin_component_size", rep.origin_component_size},
                    {"origin_component_area", rep.origin_component_area},
                    {"notes", rep.notes}}
                   .dump(2)
            << '\n';
        out.close();
        ctx.finish();
        return 0;
    }
    // conjecture 4: pairs like "100:10,200:20"
    std::vector<std::pair<int, int>> pairs;
    std::string token;
    std::istringstream in(pairs_arg);
    while (std::getline(in, token, ',')) {
        const auto colon = token.find(':');
        require(colon != std::string::npos, "--pairs expects n:m,n:m,...");
        pairs.emplace_back(std::stoi(token.substr(0, colon)), std::stoi(token.substr(colon + 1)));
    }
    const auto rows = conjecture4_probe(pairs, parse_complex(opts.delta).real(),
                                        parse_complex(opts.a), eps, 81, opts.threads);
    params["pairs"] = pairs_arg;
    RunContext ctx(opts, "conjecture-probe", params);
    json out_rows = json::array();
    for (const auto& r : rows)
        out_rows.push_back(json{{"n", r.n},
                                {"m", r.m},
                                {"origin_component_size", r.origin_component_size},
                                {"outer_radius", r.outer_radius},
                                {"within_band", r.within_band}});
    std::ofstream out(ctx.file("conjecture4.json"), std::ios::binary);
    out << json{{"rows", out_rows}}.dump(2) << '\n';
    out.close();
    ctx.finish();
    return 0;
}

int cmd_asymptotic_check(const CommonOpts& opts) {
    const ModelSpec spec = to_spec(opts);
    const AsymptoticPrediction pred = asymptotic_predicted_roots(spec);
    const ExactSpectrum ex = exact_spectrum(spec);
    const DeviationStats stats = compare_to_prediction(ex.nonzero_roots, pred, ex.outlier());
    RunContext ctx(opts, "asymptotic-check", common_params(opts));
    {
        std::ofstream out(ctx.file("prediction.csv"), std::ios::binary);
        out << "index,re,im\n";
        for (std::size_t i = 0; i < pred.points.size(); ++i)
            out << i << ',' << format_g17(pred.points[i].real()) << ','
                << format_g17(pred.points[i].imag()) << '\n';
    }
    {
        std::ofstream out(ctx.file("deviation.json"), std::ios::binary);
        out << json{{"max_deviation", stats.max_deviation},
                    {"mean_deviation", stats.mean_deviation},
                    {"predicted_points", pred.points.size()}}
                   .dump(2)
            << '\n';
    }
    ctx.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral analysis of nonnormal Toeplitz matrices with rank-1 perturbations"};
    app.set_version_flag("--version", pslab::version);
    app.require_subcommand(1);

    CommonOpts opts;
    std::string grid_arg = "-1.5,3.5,-1.5,1.5";
    int nx = 101, ny = 61;
    double eps = 1e-3;
    int samples = 100;
    int order = -1;
    int which = 1;
    std::string pairs_arg = "100:10,200:20";
    bool random_flag = false;
    int curve_samples = 4096;

    auto* exact = app.add_subcommand("exact-spectrum", "roots of the exact characteristic factor");
    add_common(exact, opts);

    auto* dense = app.add_subcommand("dense-spectrum", "numerically computed full spectrum");
    add_common(dense, opts);
    dense->add_flag("--random", random_flag, "use S^m + delta*Z keyed by --seed instead of the model");

    auto* pseudo = app.add_subcommand("pseudospectrum", "sigma_min grid over a complex rectangle");
    add_common(pseudo, opts);
    pseudo->add_option("--grid", grid_arg, "re0,re1,im0,im1");
    pseudo->add_option("--nx", nx, "grid nodes along Re");
    pseudo->add_option("--ny", ny, "grid nodes along Im");
    pseudo->add_option("--eps", eps, "epsilon for the origin component report");

    auto* symbol = app.add_subcommand("symbol-curve", "symbol curve samples of S^m + a S^{m+1}");
    add_common(symbol, opts);
    symbol->add_option("--samples", curve_samples, "number of theta samples");

    auto* series = app.add_subcommand("outlier-series", "Catalan series for the outlier eigenvalue");
    add_common(series, opts);
    series->add_option("--order", order, "series truncation order (default min(p1, 64))");

    auto* rouche = app.add_subcommand("rouche", "Rouche localization radii and root counts");
    add_common(rouche, opts);

    auto* stair = app.add_subcommand("staircase", "mean-radius staircase over m = 1..n");
    add_common(stair, opts);
    stair->add_option("--samples", samples, "Monte Carlo samples per m (random variant)");
    stair->add_flag("--random", random_flag, "random S^m + delta*Z process instead of the model");

    auto* probe = app.add_subcommand("conjecture-probe", "measured probes of the conjectures");
    add_common(probe, opts);
    probe->add_option("--which", which, "conjecture to probe (1 or 4)")
        ->check(CLI::IsMember({1, 4}));
    probe->add_option("--pairs", pairs_arg, "n:m pairs for conjecture 4");
    probe->add_option("--grid", grid_arg, "re0,re1,im0,im1 for conjecture 1");
    probe->add_option("--nx", nx, "grid nodes along Re");
    probe->add_option("--ny", ny, "grid nodes along Im");
    probe->add_option("--eps", eps, "epsilon for the origin component");

    auto* asym = app.add_subcommand("asymptotic-check", "exact roots vs the equispaced prediction");
    add_common(asym, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (exact->parsed()) return cmd_exact_spectrum(opts);
        if (dense->parsed()) return cmd_dense_spectrum(opts, random_flag);
        if (pseudo->parsed()) return cmd_pseudospectrum(opts, grid_arg, nx, ny, eps);
        if (symbol->parsed()) return cmd_symbol_curve(opts, curve_samples);
        if (series->parsed()) return cmd_outlier_series(opts, order);
        if (rouche->parsed()) return cmd_rouche(opts);
        if (stair->parsed()) return cmd_staircase(opts, samples, random_flag);
        if (probe->parsed()) return cmd_conjecture_probe(opts, which, pairs_arg, grid_arg, nx, ny, eps);
        if (asym->parsed()) return cmd_asymptotic_check(opts);
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
