#pragma once

// Symbol curves f(e^{i theta}) = e^{im theta} + a e^{i(m+1) theta} of the
// banded Toeplitz operators behind the two models, winding numbers about
// query points, operator-spectrum membership, and the equispaced-roots
// asymptotic predictions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "pslab/errors.hpp"
#include "pslab/exact_spectrum.hpp"
#include "pslab/models.hpp"

namespace pslab {

inline cd symbol_eval(int m, cd a, double theta) {
    require(m >= 1, "symbol exponent m must be >= 1");
    return std::polar(1.0, m * theta) + a * std::polar(1.0, (m + 1) * theta);
}

/// points[j] = symbol_eval(m, a, thetas[j]); the curve is cyclic (the
/// closing segment runs from the last sample back to the first).
struct SymbolCurve {
    int m = 1;
    cd a{};
    std::vector<double> thetas;
    std::vector<cd> points;
};

inline SymbolCurve build_symbol_curve(int m, cd a, int initial_samples = 4096) {
    require(m >= 1, "symbol exponent m must be >= 1");
    require(initial_samples >= 8, "need at least 8 samples");
    SymbolCurve c{m, a, {}, {}};
    c.thetas.resize(static_cast<std::size_t>(initial_samples));
    c.points.resize(static_cast<std::size_t>(initial_samples));
    for (int i = 0; i < initial_samples; ++i) {
        c.thetas[static_cast<std::size_t>(i)] =
            2.0 * std::numbers::pi * static_cast<double>(i) / initial_samples;
        c.points[static_cast<std::size_t>(i)] = symbol_eval(m, a, c.thetas[static_cast<std::size_t>(i)]);
    }
    return c;
}

/// A point counts as "on" the sampled curve within this distance of the
/// piecewise-linear interpolant.
inline double curve_tolerance(cd a) { return 1e-9 + 1e-6 * std::abs(1.0 + a); }

inline double distance_to_curve(const SymbolCurve& curve, cd w) {
    const std::size_t n = curve.points.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const cd p = curve.points[i];
        const cd q = curve.points[(i + 1) % n];
        const cd d = q - p;
        const double len2 = std::norm(d);
        double t = 0.0;
        if (len2 > 0.0) t = std::clamp((std::conj(d) * (w - p)).real() / len2, 0.0, 1.0);
        best = std::min(best, std::abs(w - (p + t * d)));
    }
    return best;
}

/// Winding number of the curve about w: accumulated argument change over
/// the closed polygon, with recursive theta refinement wherever a step
/// turns by pi/2 or more. Throws when w sits on the curve.
inline int winding_number(const SymbolCurve& curve, cd w) {
    if (distance_to_curve(curve, w) <= curve_tolerance(curve.a))
        throw domain_error("winding number undefined: point lies on the symbol curve");

    const int m = curve.m;
    const cd a = curve.a;
    // argument change across [t0, t1], subdividing until each step < pi/2
    auto arg_change = [&](auto&& self, double t0, double t1, cd f0, cd f1, int depth) -> double {
        const double d = std::arg((f1 - w) / (f0 - w));
        if (std::abs(d) < 0.5 * std::numbers::pi || depth >= 40) return d;
        const double tm = 0.5 * (t0 + t1);
        const cd fm = symbol_eval(m, a, tm);
        return self(self, t0, tm, f0, fm, depth + 1) + self(self, tm, t1, fm, f1, depth + 1);
    };

    double total = 0.0;
    const std::size_t n = curve.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double t0 = curve.thetas[i];
        const double t1 = (j == 0) ? curve.thetas[0] + 2.0 * std::numbers::pi : curve.thetas[j];
        total += arg_change(arg_change, t0, t1, curve.points[i], curve.points[j], 0);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Membership in the spectrum of the Toeplitz operator with symbol
/// z^m + a z^{m+1}: on the curve, or enclosed with nonzero winding.
inline bool operator_spectrum_contains(int m, cd a, cd w) {
    const SymbolCurve curve = build_symbol_curve(m, a);
    if (distance_to_curve(curve, w) <= curve_tolerance(a)) return true;
    return winding_number(curve, w) != 0;
}

struct AsymptoticPrediction {
    std::vector<cd> points;  // (1+a) e^{2 pi i l/(p1+1)}, l = 1..p1
    cd excluded_point{};     // 1+a (the l = 0 point that drops out)
};

/// Large-n root configuration: p1 equispaced points on the circle of radius
/// |1+a| with the point at 1+a removed. Hypotheses checked: m <= n-1 and
/// |delta| > 4m/n^2 (model 1), plus p1 = p2 and |delta| > 4|(1+a)m+a|/n^2
/// (model 2).
inline AsymptoticPrediction asymptotic_predicted_roots(const ModelSpec& spec) {
    validate(spec);
    require(spec.m <= spec.n - 1, "asymptotic prediction needs m <= n-1");
    const auto p = compute_p_indices(spec.n, spec.m);
    const double n2 = static_cast<double>(spec.n) * static_cast<double>(spec.n);
    cd one_plus_a{1.0, 0.0};
    if (spec.variant == Model::one) {
        if (!(std::abs(spec.delta) > 4.0 * spec.m / n2))
            throw domain_error("hypothesis |delta| > 4m/n^2 fails for model 1");
    } else {
        one_plus_a = 1.0 + spec.a;
        if (p.p1 != p.p2)
            throw domain_error("hypothesis p1 = p2 fails for model 2 (correction term present)");
        if (!(std::abs(spec.delta) >
              4.0 * std::abs(one_plus_a * static_cast<double>(spec.m) + spec.a) / n2))
            throw domain_error("hypothesis |delta| > 4|(1+a)m + a|/n^2 fails for model 2");
    }
    AsymptoticPrediction out;
    out.excluded_point = one_plus_a;
    out.points.reserve(static_cast<std::size_t>(p.p1));
    for (long long l = 1; l <= p.p1; ++l) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(l) /
                           static_cast<double>(p.p1 + 1);
        out.points.push_back(one_plus_a * std::polar(1.0, ang));
    }
    return out;
}

struct DeviationStats {
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
};

/// Removes the outlier from `roots`, then greedily matches the remaining
/// roots to the predicted points by ascending pairwise distance.
inline DeviationStats compare_to_prediction(std::span<const cd> roots,
                                            const AsymptoticPrediction& prediction, cd outlier) {
    require(roots.size() >= 1, "need at least the outlier in roots");
    require(roots.size() - 1 == prediction.points.size(),
            "root count minus outlier must equal prediction count");

    std::vector<cd> rest;
    rest.reserve(roots.size() - 1);
    std::size_t skip = roots.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double d = std::abs(roots[i] - outlier);
        if (d < best) {
            best = d;
            skip = i;
        }
    }
    for (std::size_t i = 0; i < roots.size(); ++i)
        if (i != skip) rest.push_back(roots[i]);

    struct Pair {
        double d;
        std::size_t r, p;
    };
    std::vector<Pair> pairs;
    pairs.reserve(rest.size() * rest.size());
    for (std::size_t r = 0; r < rest.size(); ++r)
        for (std::size_t p = 0; p < prediction.points.size(); ++p)
            pairs.push_back({std::abs(rest[r] - prediction.points[p]), r, p});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.d != y.d) return x.d < y.d;
        if (x.r != y.r) return x.r < y.r;
        return x.p < y.p;
    });
    std::vector<char> used_r(rest.size(), 0), used_p(prediction.points.size(), 0);
    DeviationStats out;
    std::size_t matched = 0;
    for (const Pair& pr : pairs) {
        if (used_r[pr.r] || used_p[pr.p]) continue;
        used_r[pr.r] = used_p[pr.p] = 1;
        out.max_deviation = std::max(out.max_deviation, pr.d);
        out.mean_deviation += pr.d;
        if (++matched == rest.size()) break;
    }
    if (matched > 0) out.mean_deviation /= static_cast<double>(matched);
    return out;
}

}  // namespace pslab
