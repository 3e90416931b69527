#pragma once

// Matrix builders for the two deterministic time-m models
//   model 1:  S^m + delta*J
//   model 2:  S^m + a*S^(m+1) + delta*J
// and their Gaussian-perturbed relative S^m + delta*Z, with S the upper
// shift matrix (S^n = 0) and J the all-ones matrix.

#include <cstdint>

#include "pslab/complex_matrix.hpp"
#include "pslab/errors.hpp"
#include "pslab/rng.hpp"

namespace pslab {

enum class Model { one = 1, two = 2 };

struct ModelSpec {
    Model variant = Model::one;
    int n = 1;
    int m = 1;
    cd delta{0.0, 0.0};
    cd a{0.0, 0.0};  // ignored for model 1
};

inline void validate(const ModelSpec& spec) {
    require(spec.n >= 1, "model size n must be >= 1");
    require(spec.m >= 1 && spec.m <= spec.n, "time index m must satisfy 1 <= m <= n");
}

struct RandomMatrixSpec {
    int n = 1;
    int m = 1;
    cd delta{0.0, 0.0};
    std::uint64_t seed = 0;
};

/// n x n matrix with ones on the m-th superdiagonal. m = 0 gives the
/// identity; m >= n gives the zero matrix (S is nilpotent of index n).
inline ComplexMatrix build_shift_power(int n, int m) {
    require(n >= 1, "n must be >= 1");
    require(m >= 0, "shift power must be >= 0");
    ComplexMatrix A(n);
    for (int j = 0; j + m < n; ++j) A(j, j + m) = 1.0;
    return A;
}

inline ComplexMatrix build_model(const ModelSpec& spec) {
    validate(spec);
    ComplexMatrix A = build_shift_power(spec.n, spec.m);
    if (spec.variant == Model::two && spec.a != cd{} && spec.m + 1 < spec.n) {
        for (int j = 0; j + spec.m + 1 < spec.n; ++j) A(j, j + spec.m + 1) += spec.a;
    }
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k) A(j, k) += spec.delta;
    return A;
}

/// S^m + delta*Z with Z_jk = X + iY, X and Y independent standard normals
/// drawn from the counter-based stream keyed by (seed, j, k). Identical
/// spec always yields the identical matrix.
inline ComplexMatrix build_random_perturbed(const RandomMatrixSpec& spec) {
    require(spec.n >= 1, "n must be >= 1");
    require(spec.m >= 1 && spec.m <= spec.n, "time index m must satisfy 1 <= m <= n");
    ComplexMatrix A = build_shift_power(spec.n, spec.m);
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k) {
            const GaussPair g = gaussian_entry(spec.seed, static_cast<std::uint64_t>(j),
                                               static_cast<std::uint64_t>(k));
            A(j, k) += spec.delta * cd(g.x, g.y);
        }
    return A;
}

/// <S^l 1, 1> = (n - l) for 1 <= l <= n-1 and 0 otherwise (including l = 0,
/// where the indicator is taken literally).
inline long long ones_quadratic_form(long long n, long long l) {
    require(n >= 1, "n must be >= 1");
    require(l >= 0, "l must be >= 0");
    return (1 <= l && l <= n - 1) ? n - l : 0;
}

}  // namespace pslab
