#pragma once

// Empirical studies at desk scale: the mean-radius staircase of
// the randomly perturbed process (Monte Carlo over counter-seeded samples),
// its deterministic analog for the two models, and probe reports for the
// conjectures (reports, not assertions).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pslab/errors.hpp"
#include "pslab/exact_spectrum.hpp"
#include "pslab/linalg.hpp"
#include "pslab/models.hpp"
#include "pslab/parallel.hpp"
#include "pslab/pseudospectrum.hpp"
#include "pslab/rng.hpp"
#include "pslab/symbol.hpp"

namespace pslab {

/// Arithmetic mean of |lambda| over all entries (outlier included).
inline double mean_radius(std::span<const cd> eigs) {
    require(!eigs.empty(), "mean radius of an empty spectrum is undefined");
    double s = 0.0;
    for (const cd& z : eigs) s += std::abs(z);
    return s / static_cast<double>(eigs.size());
}

struct StaircaseSeries {
    int n = 0;
    double delta = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> R;          // indexed by m-1, m = 1..n
    std::vector<double> std_error;  // per-m standard error (empty for deterministic runs)
    std::vector<double> dR;         // R(m+1) - R(m), m = 1..n-1
    std::vector<int> marks;         // m = floor((n-1)/k), k = 1..13 (deterministic runs)
    long long skipped = 0;          // samples dropped due to eigensolver failure
};

namespace detail {

inline void fill_increments(StaircaseSeries& s) {
    s.dR.resize(s.R.size() - 1);
    for (std::size_t i = 0; i + 1 < s.R.size(); ++i) s.dR[i] = s.R[i + 1] - s.R[i];
}

}  // namespace detail

/// Monte Carlo staircase for S^m + delta*Z: for every m and sample, the
/// matrix comes from the stream keyed by (seed, m, sample), so the series
/// is reproducible bit-for-bit regardless of worker count. Fails if more
/// than 1% of the samples are skipped.
inline StaircaseSeries staircase_run(int n, double delta, int samples, std::uint64_t seed,
                                     int workers = 0) {
    require(n >= 1, "n must be >= 1");
    require(samples >= 1, "samples must be >= 1");

    StaircaseSeries out;
    out.n = n;
    out.delta = delta;
    out.samples = samples;
    out.seed = seed;

    const std::size_t total = static_cast<std::size_t>(n) * samples;
    std::vector<double> radius(total, 0.0);
    std::vector<char> ok(total, 0);
    parallel_for(total, workers, [&](std::size_t idx) {
        const int m = static_cast<int>(idx / static_cast<std::size_t>(samples)) + 1;
        const int s = static_cast<int>(idx % static_cast<std::size_t>(samples));
        RandomMatrixSpec spec{n, m, cd(delta, 0.0),
                              derive_seed(seed, static_cast<std::uint64_t>(m),
                                          static_cast<std::uint64_t>(s))};
        try {
            const EigenResult eig = eigenvalues(build_random_perturbed(spec));
            radius[idx] = mean_radius(eig.values);
            ok[idx] = 1;
        } catch (const solver_error&) {
            ok[idx] = 0;
        }
    });

    out.R.resize(static_cast<std::size_t>(n));
    out.std_error.resize(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) {
        double sum = 0.0, sum2 = 0.0;
        long long count = 0;
        for (int s = 0; s < samples; ++s) {
            const std::size_t idx = static_cast<std::size_t>(m - 1) * samples + s;
            if (!ok[idx]) {
                ++out.skipped;
                continue;
            }
            sum += radius[idx];
            sum2 += radius[idx] * radius[idx];
            ++count;
        }
        require(count >= 1, "all samples failed at m = " + std::to_string(m));
        const double mean = sum / static_cast<double>(count);
        out.R[static_cast<std::size_t>(m - 1)] = mean;
        const double var =
            count > 1 ? std::max(0.0, (sum2 - sum * mean) / static_cast<double>(count - 1)) : 0.0;
        out.std_error[static_cast<std::size_t>(m - 1)] =
            std::sqrt(var / static_cast<double>(count));
    }
    if (100 * out.skipped > static_cast<long long>(total))
        throw solver_error("more than 1% of staircase samples failed (" +
                               std::to_string(out.skipped) + " of " + std::to_string(total) + ")",
                           {}, {});
    detail::fill_increments(out);
    return out;
}

/// Deterministic staircase: the full numerically computed spectrum of
/// build_model for m = 1..n, no sampling. Marks the times m = floor((n-1)/k)
/// for k = 1..13 for annotation.
inline StaircaseSeries staircase_run_deterministic(const ModelSpec& base, int workers = 0) {
    ModelSpec spec = base;
    spec.m = 1;
    validate(spec);

    StaircaseSeries out;
    out.n = spec.n;
    out.delta = spec.delta.real();
    out.samples = 0;
    out.seed = 0;

    out.R.resize(static_cast<std::size_t>(spec.n));
    parallel_for(static_cast<std::size_t>(spec.n), workers, [&](std::size_t idx) {
        ModelSpec local = base;
        local.m = static_cast<int>(idx) + 1;
        const EigenResult eig = eigenvalues(build_model(local));
        out.R[idx] = mean_radius(eig.values);
    });
    detail::fill_increments(out);
    for (long long k = 1; k <= 13; ++k) {
        const long long mark = (static_cast<long long>(spec.n) - 1) / k;
        if (mark >= 1 && (out.marks.empty() || out.marks.back() != static_cast<int>(mark)))
            out.marks.push_back(static_cast<int>(mark));
    }
    return out;
}

/// Spike rule: |dR(m)| exceeds 5x the median of |dR| over the +-10-step
/// window centered on m. Returns the 1-based m indices where it fires.
inline std::vector<int> spike_indices(const StaircaseSeries& series) {
    const auto& dR = series.dR;
    std::vector<int> spikes;
    const int len = static_cast<int>(dR.size());
    for (int i = 0; i < len; ++i) {
        const int lo = std::max(0, i - 10);
        const int hi = std::min(len - 1, i + 10);
        std::vector<double> window;
        window.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (int j = lo; j <= hi; ++j) window.push_back(std::abs(dR[static_cast<std::size_t>(j)]));
        std::nth_element(window.begin(), window.begin() + window.size() / 2, window.end());
        const double med = window[window.size() / 2];
        if (std::abs(dR[static_cast<std::size_t>(i)]) > 5.0 * med) spikes.push_back(i + 1);
    }
    return spikes;
}

struct ConjectureReport {
    ModelSpec spec;
    double outer_match_distance = 0.0;   // max over outer roots of distance to symbol curve
    double outer_mean_distance = 0.0;
    double outer_threshold = 0.0;        // modulus cut used to pick the outer subset
    long long outer_count = 0;
    double origin_component_size = 0.0;  // max_abs of the eps-component containing 0
    double origin_component_area = 0.0;
    std::string notes;
};

/// Conjecture 1 probe (model 2): distance statistics from the outer exact
/// roots to the symbol curve, plus the size of the origin pseudospectrum
/// component. Report only; nothing here asserts.
inline ConjectureReport conjecture1_probe(const ModelSpec& spec, const GridRegion& grid_region,
                                          double eps, int workers = 0) {
    validate(spec);
    require(spec.variant == Model::two, "conjecture 1 probe applies to model 2");
    require(spec.m >= 2, "conjecture 1 probe needs m >= 2");

    ConjectureReport rep;
    rep.spec = spec;

    const ExactSpectrum ex = exact_spectrum(spec);
    // outer subset: moduli above half the maximal non-outlier modulus
    double max_mod = 0.0;
    for (std::size_t i = 0; i < ex.nonzero_roots.size(); ++i)
        if (i != ex.outlier_index) max_mod = std::max(max_mod, std::abs(ex.nonzero_roots[i]));
    rep.outer_threshold = 0.5 * max_mod;

    const SymbolCurve curve = build_symbol_curve(spec.m, spec.a);
    double worst = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < ex.nonzero_roots.size(); ++i) {
        if (i == ex.outlier_index) continue;
        const cd z = ex.nonzero_roots[i];
        if (std::abs(z) < rep.outer_threshold) continue;
        const double d = distance_to_curve(curve, z);
        worst = std::max(worst, d);
        sum += d;
        ++rep.outer_count;
    }
    rep.outer_match_distance = worst;
    rep.outer_mean_distance = rep.outer_count > 0 ? sum / static_cast<double>(rep.outer_count) : 0.0;

    const PseudospectrumGrid grid = grid_scan(build_model(spec), grid_region, workers);
    const OriginComponent comp = epsilon_region_containing_origin(grid, eps);
    rep.origin_component_size = comp.max_abs;
    rep.origin_component_area = comp.area;
    rep.notes = "outer subset = non-outlier roots with |z| above half the maximal non-outlier "
                "modulus";
    return rep;
}

struct Conjecture4Row {
    int n = 0;
    int m = 0;
    double origin_component_size = 0.0;
    double outer_radius = 0.0;  // max non-outlier root modulus
    bool within_band = true;    // metric within 25% of the first n >= 100 row
};

/// Conjecture 4 probe: same m/n ratio at increasing n. Soft check only --
/// rows report whether the metrics stay within 25% across pairs with
/// n >= 100.
inline std::vector<Conjecture4Row> conjecture4_probe(
    std::span<const std::pair<int, int>> pairs, double delta, cd a, double eps = 1e-3,
    int grid_nodes = 81, int workers = 0) {
    require(!pairs.empty(), "need at least one (n, m) pair");
    for (const auto& [n, m] : pairs) {
        require(n >= 1 && m >= 1 && m <= n, "each pair needs 1 <= m <= n");
        require(static_cast<long long>(m) * pairs[0].first ==
                    static_cast<long long>(pairs[0].second) * n,
                "all pairs must share the same ratio m/n");
    }

    std::vector<Conjecture4Row> rows;
    const bool model2 = (a != cd{});
    for (const auto& [n, m] : pairs) {
        ModelSpec spec{model2 ? Model::two : Model::one, n, m, cd(delta, 0.0), a};
        Conjecture4Row row;
        row.n = n;
        row.m = m;
        const ExactSpectrum ex = exact_spectrum(spec);
        for (std::size_t i = 0; i < ex.nonzero_roots.size(); ++i)
            if (i != ex.outlier_index)
                row.outer_radius = std::max(row.outer_radius, std::abs(ex.nonzero_roots[i]));
        const double half = 1.25 * std::abs(1.0 + a);
        GridRegion region{-half, half, -half, half, grid_nodes, grid_nodes};
        const PseudospectrumGrid grid = grid_scan(build_model(spec), region, workers);
        row.origin_component_size = epsilon_region_containing_origin(grid, eps).max_abs;
        rows.push_back(row);
    }

    const Conjecture4Row* ref = nullptr;
    for (const auto& row : rows)
        if (row.n >= 100) {
            ref = &row;
            break;
        }
    if (ref) {
        for (auto& row : rows) {
            if (row.n < 100) continue;
            const auto close = [](double x, double y) {
                const double scale = std::max({std::abs(x), std::abs(y), 1e-12});
                return std::abs(x - y) <= 0.25 * scale;
            };
            row.within_band = close(row.origin_component_size, ref->origin_component_size) &&
                              close(row.outer_radius, ref->outer_radius);
        }
    }
    return rows;
}

}  // namespace pslab
