#pragma once

// Exact characteristic equations of the two models and everything derived
// from them: the p-index combinatorics, the monic characteristic factor for
// the nonzero eigenvalues, Rouche localization annuli, the Catalan series
// for the outlier, eigenvectors of nonzero eigenvalues, and the zero
// eigenvalue's multiplicities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pslab/errors.hpp"
#include "pslab/models.hpp"
#include "pslab/polynomial.hpp"

namespace pslab {

struct PIndices {
    long long p1 = 0;            // floor((n-1)/m)
    long long p2 = 0;            // floor((n-1)/(m+1))
    bool correction_active = false;  // p1 >= p2+1 and (m+1)*p1 >= n+1
    bool in_I = false;           // ceil(sqrt(n-1)) <= m <= n-1
    bool in_T = false;           // m = floor((n-1)/k) for some k in [1, n-1]
};

inline PIndices compute_p_indices(long long n, long long m) {
    require(n >= 1, "n must be >= 1");
    require(m >= 1 && m <= n, "time index m must satisfy 1 <= m <= n");
    PIndices p;
    p.p1 = (n - 1) / m;
    p.p2 = (n - 1) / (m + 1);
    p.correction_active = (p.p1 >= p.p2 + 1) && ((m + 1) * p.p1 >= n + 1);
    long long s = static_cast<long long>(std::sqrt(static_cast<double>(n - 1)));
    while (s * s < n - 1) ++s;
    while (s > 0 && (s - 1) * (s - 1) >= n - 1) --s;  // s = ceil(sqrt(n-1))
    p.in_I = (m >= s) && (m <= n - 1);
    p.in_T = (m <= n - 1) && p.p1 >= 1 && ((n - 1) / p.p1 == m);
    return p;
}

/// Exact Catalan number; k <= 30 keeps the value well inside 64 bits.
inline long long catalan(int k) {
    require(k >= 0, "k must be >= 0");
    require(k <= 30, "k > 30 would overflow the exact 64-bit evaluation");
    long long c = 1;
    for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

namespace detail {

inline cd ipow(cd base, long long e) {
    if (e < 0) return 1.0 / ipow(base, -e);
    cd r = 1.0;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Coefficients (degree p1+1, monic) of the characteristic factor in the
// scaled variable w = z/(1+a); model 1 is the a = 0 case. Assembling in w
// keeps every coefficient O(n|delta|) even when (1+a)^p1 overflows any
// reasonable scale in z.
inline std::vector<cd> charpoly_scaled(const ModelSpec& spec) {
    validate(spec);
    require(spec.delta != cd{}, "delta must be nonzero for exact-spectrum operations");
    const cd one_plus_a = (spec.variant == Model::two) ? 1.0 + spec.a : cd(1.0, 0.0);
    if (spec.variant == Model::two)
        require(one_plus_a != cd{}, "model 2 with a = -1 is not supported");

    const auto p = compute_p_indices(spec.n, spec.m);
    const long long p1 = p.p1;
    const double n = static_cast<double>(spec.n);
    const double m = static_cast<double>(spec.m);
    const cd ndelta = n * spec.delta;

    // mu plays the role of m/n; for model 2 it picks up a/((1+a)n)
    const cd mu = (spec.variant == Model::two) ? cd(m / n) + spec.a / (one_plus_a * n) : cd(m / n);

    std::vector<cd> c(static_cast<std::size_t>(p1) + 2, cd{});
    c.back() = 1.0;
    for (long long k = 0; k <= p1; ++k)
        c[static_cast<std::size_t>(k)] =
            -(ndelta / one_plus_a) * (1.0 - static_cast<double>(p1 - k) * mu);

    if (spec.variant == Model::two && p.correction_active) {
        // pow(1+a, k - p1 - 1), built up as k increases
        cd prefactor = ipow(one_plus_a, -(p1 + 1));
        for (long long k = 0; k <= p1 - p.p2 - 1; ++k) {
            const long long nk = p1 - k;
            const long long q_lo = spec.n - spec.m * nk + 1;
            // binom(nk, q) * a^q as a running product over q
            cd term = ipow(spec.a, q_lo);
            for (long long i = 0; i < q_lo; ++i)
                term *= static_cast<double>(nk - i) / static_cast<double>(i + 1);
            cd inner = 0.0;
            for (long long q = q_lo; q <= nk; ++q) {
                inner += term * static_cast<double>(q - (spec.n - spec.m * nk)) / n;
                term *= spec.a * static_cast<double>(nk - q) / static_cast<double>(q + 1);
            }
            c[static_cast<std::size_t>(k)] -= ndelta * prefactor * inner;
            prefactor *= one_plus_a;
        }
    }
    return c;
}

}  // namespace detail

/// Monic-in-z polynomial whose roots are the p1+1 nonzero eigenvalues.
inline ComplexPolynomial assemble_charpoly(const ModelSpec& spec) {
    std::vector<cd> c = detail::charpoly_scaled(spec);
    if (spec.variant == Model::two) {
        const cd one_plus_a = 1.0 + spec.a;
        cd f = 1.0;  // (1+a)^(p1+1-k), walking k downward from p1+1
        for (std::size_t k = c.size(); k-- > 0;) {
            c[k] *= f;
            f *= one_plus_a;
        }
    }
    return ComplexPolynomial{std::move(c)};
}

struct ExactSpectrum {
    std::vector<cd> nonzero_roots;       // length p1+1
    std::size_t outlier_index = 0;       // largest modulus, ties to larger real part
    long long zero_algebraic_multiplicity = 0;  // n - p1 - 1
    long long zero_geometric_multiplicity = 0;  // m - 1 for m >= 2, else 0
    double max_residual = 0.0;           // worst scaled residual over the roots

    cd outlier() const { return nonzero_roots[outlier_index]; }
};

struct ZeroMultiplicities {
    long long algebraic = 0;
    long long geometric = 0;
    bool defective = false;
};

/// Multiplicity bookkeeping comes from the closed-form counts, never from
/// numerical rank (rank checks live in the tests as oracles).
inline ZeroMultiplicities zero_multiplicities(const ModelSpec& spec) {
    validate(spec);
    const auto p = compute_p_indices(spec.n, spec.m);
    ZeroMultiplicities z;
    z.algebraic = spec.n - p.p1 - 1;
    z.geometric = (spec.m >= 2) ? spec.m - 1 : 0;
    z.defective = z.geometric < z.algebraic;
    return z;
}

inline ExactSpectrum exact_spectrum(const ModelSpec& spec, double tol = 1e-12) {
    validate(spec);
    require(spec.delta != cd{}, "delta must be nonzero for exact-spectrum operations");

    const cd one_plus_a = (spec.variant == Model::two) ? 1.0 + spec.a : cd(1.0, 0.0);
    // Solve in whichever variable keeps the coefficients well scaled.
    const bool scaled = spec.variant == Model::two && std::abs(one_plus_a) >= 1.0;
    const ComplexPolynomial poly =
        scaled ? ComplexPolynomial{detail::charpoly_scaled(spec)} : assemble_charpoly(spec);

    ExactSpectrum out;
    out.nonzero_roots = solve_polynomial(poly, tol);
    out.max_residual = 0.0;
    for (const cd& r : out.nonzero_roots)
        out.max_residual = std::max(out.max_residual, scaled_residual(poly, r));
    if (scaled)
        for (cd& r : out.nonzero_roots) r *= one_plus_a;

    out.outlier_index = 0;
    for (std::size_t i = 1; i < out.nonzero_roots.size(); ++i) {
        const cd& cand = out.nonzero_roots[i];
        const cd& best = out.nonzero_roots[out.outlier_index];
        const double dc = std::abs(cand), db = std::abs(best);
        if (dc > db || (dc == db && cand.real() > best.real())) out.outlier_index = i;
    }

    const auto zm = zero_multiplicities(spec);
    out.zero_algebraic_multiplicity = zm.algebraic;
    out.zero_geometric_multiplicity = zm.geometric;
    return out;
}

struct RoucheRegions {
    double r_plus = 0.0;
    double r_minus = 0.0;
    double outer_radius = 0.0;  // n*delta + 1
};

/// Roots of r^2 - (nd+1) r + 2 nd = 0, defined for nd > 3 + 2*sqrt(2).
inline RoucheRegions rouche_regions(long long n, double delta_abs) {
    require(n >= 1, "n must be >= 1");
    require(delta_abs > 0.0, "|delta| must be positive");
    const double nd = static_cast<double>(n) * delta_abs;
    if (nd <= 3.0 + 2.0 * std::sqrt(2.0))
        throw domain_error("Rouche regions undefined: n|delta| = " + std::to_string(nd) +
                           " does not exceed 3 + 2*sqrt(2)");
    const double disc = std::sqrt((nd + 1.0) * (nd + 1.0) - 8.0 * nd);
    RoucheRegions r;
    r.r_plus = 0.5 * (nd + 1.0 + disc);
    r.r_minus = 0.5 * (nd + 1.0 - disc);
    r.outer_radius = nd + 1.0;
    return r;
}

struct RootClassCounts {
    long long outer = 0;    // r_plus <= |z| < nd+1
    long long gap = 0;      // r_minus < |z| < r_plus
    long long inner = 0;    // |z| <= r_minus
    long long outside = 0;  // |z| >= nd+1
};

inline RootClassCounts classify_roots(std::span<const cd> roots, const RoucheRegions& reg) {
    RootClassCounts c;
    for (const cd& z : roots) {
        const double r = std::abs(z);
        if (r >= reg.outer_radius)
            ++c.outside;
        else if (r >= reg.r_plus)
            ++c.outer;
        else if (r > reg.r_minus)
            ++c.gap;
        else
            ++c.inner;
    }
    return c;
}

/// Truncated Catalan series for the outlier eigenvalue. Model 1:
///   nd + 1 - sum_{k<order} C_k (m/n)^{k+1} / (nd)^k,
/// model 2 applies the substitution z -> z/(1+a), nd -> nd/(1+a),
/// m/n -> m/n + a/((1+a)n). For m = n (p1 = 0) the value is exactly
/// n*delta.
inline cd outlier_series(const ModelSpec& spec, int order) {
    validate(spec);
    const auto p = compute_p_indices(spec.n, spec.m);
    require(order >= 0, "order must be >= 0");
    require(order <= p.p1, "order must not exceed p1");
    const double n = static_cast<double>(spec.n);
    const cd ndelta = n * spec.delta;
    if (p.p1 == 0) return ndelta;  // m = n: the exact value, no series needed
    require(std::abs(ndelta) > 1.0, "series requires n|delta| > 1");

    const cd one_plus_a = (spec.variant == Model::two) ? 1.0 + spec.a : cd(1.0, 0.0);
    const cd mu = (spec.variant == Model::two)
                      ? cd(spec.m / n) + spec.a / (one_plus_a * n)
                      : cd(spec.m / n);
    cd sum = 0.0;
    cd term = one_plus_a * mu;  // k = 0: (1+a) * C_0 * mu^1 * ((1+a)/nd)^0
    for (int k = 0; k < order; ++k) {
        sum += term;
        const double catalan_ratio = 2.0 * (2.0 * k + 1.0) / (k + 2.0);  // C_{k+1}/C_k
        term *= catalan_ratio * mu * one_plus_a / ndelta;
    }
    return ndelta + one_plus_a - sum;
}

/// Eigenvector for a verified nonzero eigenvalue:
///   v = delta (lambda I - S^m [- a S^{m+1}])^{-1} 1, normalized to <v,1> = 1.
/// The shifted matrix is upper triangular with lambda on the diagonal, so
/// the solve is a direct back-substitution. Throws if the eigenpair
/// residual against the full model matrix exceeds 1e-8 ||A|| ||v||.
inline std::vector<cd> eigenvector_for(const ModelSpec& spec, cd lambda) {
    validate(spec);
    require(lambda != cd{}, "lambda must be a nonzero eigenvalue");
    const int n = spec.n;
    const int m = spec.m;
    const cd a = (spec.variant == Model::two) ? spec.a : cd{};

    // back-substitution on (lambda I - S^m - a S^{m+1}) v = delta * 1
    std::vector<cd> v(static_cast<std::size_t>(n));
    for (int j = n - 1; j >= 0; --j) {
        cd rhs = spec.delta;
        if (j + m < n) rhs += v[static_cast<std::size_t>(j + m)];
        if (a != cd{} && j + m + 1 < n) rhs += a * v[static_cast<std::size_t>(j + m + 1)];
        v[static_cast<std::size_t>(j)] = rhs / lambda;
    }
    cd total = 0.0;
    for (const cd& x : v) total += x;
    require(std::abs(total) > 0.0, "eigenvector has vanishing overlap with the ones vector");
    for (cd& x : v) x /= total;

    const ComplexMatrix A = build_model(spec);
    std::vector<cd> Av = A * std::span<const cd>(v);
    double resid2 = 0.0;
    for (int j = 0; j < n; ++j) resid2 += std::norm(Av[static_cast<std::size_t>(j)] - lambda * v[static_cast<std::size_t>(j)]);
    const double norm_v = vector_2norm(v);
    // ||A||_2 <= sqrt(||A||_1 ||A||_inf); tight for these J-dominated matrices
    double row_max = 0.0, col_max = 0.0;
    for (int j = 0; j < n; ++j) {
        double rs = 0.0, cs = 0.0;
        for (int k = 0; k < n; ++k) {
            rs += std::abs(A(j, k));
            cs += std::abs(A(k, j));
        }
        row_max = std::max(row_max, rs);
        col_max = std::max(col_max, cs);
    }
    const double norm_A = std::sqrt(row_max * col_max);
    if (std::sqrt(resid2) > 1e-8 * norm_A * norm_v)
        throw domain_error("eigenpair residual exceeds 1e-8 ||A|| ||v||: lambda was not a "
                           "verified nonzero eigenvalue");
    return v;
}

}  // namespace pslab
