#pragma once

// Dense complex linear algebra used as the oracle layer: nonsymmetric
// eigenvalues (Hessenberg reduction + shifted QR with deflation, via
// LAPACK zgeev), smallest/all singular values (zgesdd), shifted LU solves
// (zgetrf/zgetrs), spectral norm (power iteration with SVD fallback), and
// a Schur triangularization for the pseudospectrum fast path.
//
// Everything here is deterministic for identical input: LAPACK runs with
// one internal thread, callers parallelize over independent problems.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "pslab/complex_matrix.hpp"
#include "pslab/errors.hpp"
#include "pslab/rng.hpp"

extern "C" void openblas_set_num_threads(int);

namespace pslab {

namespace detail {

inline void pin_blas_threads() {
    static const bool done = [] {
        openblas_set_num_threads(1);
        return true;
    }();
    (void)done;
}

// column-major copy; eigen/singular values of the transpose equal those of
// the original, so builders can also pass the row-major buffer through
// unchanged when only values are wanted.
inline std::vector<cd> to_col_major(const ComplexMatrix& A) {
    const int n = A.dim();
    std::vector<cd> a(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k) * n + j] = A(j, k);
    return a;
}

}  // namespace detail

struct EigenResult {
    std::vector<cd> values;
    double backward_error = std::numeric_limits<double>::quiet_NaN();
};

double matrix_2norm(const ComplexMatrix& A);

/// All n eigenvalues. With `with_backward_error` the right eigenvectors are
/// also computed and the worst ||Av - lambda v|| / ||A|| over the pairs is
/// reported (eigenvectors come back unit-norm).
inline EigenResult eigenvalues(const ComplexMatrix& A, bool with_backward_error = false) {
    detail::pin_blas_threads();
    const int n = A.dim();
    std::vector<cd> a = detail::to_col_major(A);
    EigenResult out;
    out.values.resize(static_cast<std::size_t>(n));
    std::vector<cd> vr;
    if (with_backward_error) vr.resize(static_cast<std::size_t>(n) * n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', with_backward_error ? 'V' : 'N', n, a.data(), n,
        out.values.data(), nullptr, 1, with_backward_error ? vr.data() : nullptr, n);
    if (info < 0) throw domain_error("zgeev: illegal argument " + std::to_string(-info));
    if (info > 0)
        throw solver_error("eigensolver QR iteration stalled; deflation window stuck at rows 1.." +
                               std::to_string(info) + " of " + std::to_string(n),
                           out.values, {});
    if (with_backward_error) {
        const double norm_A = matrix_2norm(A);
        double worst = 0.0;
        std::vector<cd> v(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c) {
            for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = vr[static_cast<std::size_t>(c) * n + j];
            std::vector<cd> Av = A * std::span<const cd>(v);
            double r2 = 0.0;
            for (int j = 0; j < n; ++j)
                r2 += std::norm(Av[static_cast<std::size_t>(j)] - out.values[static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(j)]);
            worst = std::max(worst, std::sqrt(r2) / norm_A);
        }
        out.backward_error = worst;
    }
    return out;
}

/// Singular values in descending order.
inline std::vector<double> singular_values(const ComplexMatrix& A) {
    detail::pin_blas_threads();
    const int n = A.dim();
    std::vector<cd> a(A.data().begin(), A.data().end());  // sigma(A^T) = sigma(A)
    std::vector<double> s(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(),
                                           nullptr, 1, nullptr, 1);
    if (info != 0) throw solver_error("zgesdd failed with info " + std::to_string(info), {}, {});
    return s;
}

inline double singular_min(const ComplexMatrix& A) { return singular_values(A).back(); }

/// Largest singular value by power iteration on A^H A from a deterministic
/// start, falling back to the full SVD if the iteration has not settled.
inline double matrix_2norm(const ComplexMatrix& A) {
    const int n = A.dim();
    std::vector<cd> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const std::uint64_t h = mix64(static_cast<std::uint64_t>(j) + 0x5851F42D4C957F2Dull);
        v[static_cast<std::size_t>(j)] = cd(1.0, 0.25 + detail::u64_to_unit(h));
    }
    double nv = vector_2norm(v);
    for (auto& x : v) x /= nv;
    double sigma = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::vector<cd> y = A * std::span<const cd>(v);
        const double ny = vector_2norm(y);
        if (ny == 0.0) return 0.0;
        // w = A^H y
        std::vector<cd> w(static_cast<std::size_t>(n), cd{});
        for (int j = 0; j < n; ++j) {
            const cd yj = y[static_cast<std::size_t>(j)];
            for (int k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] += std::conj(A(j, k)) * yj;
        }
        const double nw = vector_2norm(w);
        if (nw == 0.0) return ny;
        const double sigma_new = std::sqrt(nw);  // ||A^H A v|| -> sigma^2 at the fixed point
        for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)] / nw;
        if (it > 2 && std::abs(sigma_new - sigma) <= 1e-12 * sigma_new) return sigma_new;
        sigma = sigma_new;
    }
    return singular_values(A).front();
}

/// x solving (zI - A) x = b via LU with partial pivoting. Throws when the
/// shifted matrix is singular to working precision (z is an eigenvalue).
inline std::vector<cd> solve_shifted(const ComplexMatrix& A, cd z, std::span<const cd> b) {
    detail::pin_blas_threads();
    const int n = A.dim();
    require(static_cast<int>(b.size()) == n, "right-hand side has wrong length");
    std::vector<cd> m(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            m[static_cast<std::size_t>(k) * n + j] = (j == k ? z : cd{}) - A(j, k);
    std::vector<lapack_int> piv(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, m.data(), n, piv.data());
    if (info < 0) throw domain_error("zgetrf: illegal argument " + std::to_string(-info));
    if (info > 0)
        throw domain_error("shifted matrix zI - A is singular: z is an eigenvalue to working "
                           "precision");
    double umax = 0.0, umin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double u = std::abs(m[static_cast<std::size_t>(j) * n + j]);
        umax = std::max(umax, u);
        umin = std::min(umin, u);
    }
    if (umin <= 1e-14 * static_cast<double>(n) * umax)
        throw domain_error("shifted matrix zI - A is singular to working precision: z is an "
                           "eigenvalue");
    std::vector<cd> x(b.begin(), b.end());
    info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, m.data(), n, piv.data(), x.data(), n);
    if (info != 0) throw domain_error("zgetrs failed with info " + std::to_string(info));
    return x;
}

/// Upper-triangular Schur factor of A^T (column-major). Unitary invariance
/// makes sigma_min(zI - A) = sigma_min(zI - T), which is all the
/// pseudospectrum fast path needs.
class SchurTriangular {
public:
    explicit SchurTriangular(const ComplexMatrix& A) : n_(A.dim()), t_(A.data().begin(), A.data().end()) {
        detail::pin_blas_threads();
        std::vector<cd> w(static_cast<std::size_t>(n_));
        lapack_int sdim = 0;
        const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'N', 'N', nullptr, n_, t_.data(),
                                              n_, &sdim, w.data(), nullptr, 1);
        if (info != 0)
            throw solver_error("zgees failed with info " + std::to_string(info), {}, {});
    }

    int dim() const { return n_; }
    cd at(int j, int k) const { return t_[static_cast<std::size_t>(k) * n_ + j]; }  // j <= k

    /// sigma_min(zI - T) by inverse iteration with triangular solves.
    /// Returns NaN when the iteration is unusable (exact eigenvalue hit);
    /// callers fall back to the dense SVD path.
    double sigma_min_at(cd z, int max_iter = 80) const {
        const int n = n_;
        std::vector<cd> v(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const std::uint64_t h = mix64(static_cast<std::uint64_t>(j) * 0x9E3779B97F4A7C15ull + 7u);
            v[static_cast<std::size_t>(j)] = cd(1.0, 0.5 + detail::u64_to_unit(h));
        }
        double nv = vector_2norm(v);
        for (auto& x : v) x /= nv;
        std::vector<cd> y(static_cast<std::size_t>(n)), u(static_cast<std::size_t>(n));
        double sigma_prev = -1.0;
        for (int it = 0; it < max_iter; ++it) {
            // forward solve (zI - T)^H y = v  (lower triangular)
            for (int j = 0; j < n; ++j) {
                cd s = v[static_cast<std::size_t>(j)];
                for (int i = 0; i < j; ++i) s -= std::conj(-at(i, j)) * y[static_cast<std::size_t>(i)];
                y[static_cast<std::size_t>(j)] = s / std::conj(z - at(j, j));
            }
            // back solve (zI - T) u = y
            for (int j = n - 1; j >= 0; --j) {
                cd s = y[static_cast<std::size_t>(j)];
                for (int k = j + 1; k < n; ++k) s -= (-at(j, k)) * u[static_cast<std::size_t>(k)];
                u[static_cast<std::size_t>(j)] = s / (z - at(j, j));
            }
            const double nu = vector_2norm(u);
            if (!std::isfinite(nu)) return 0.0;  // blow-up: sigma_min below representable range
            if (nu == 0.0) return std::numeric_limits<double>::quiet_NaN();
            for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(j)] / nu;
            // Rayleigh estimate sigma = ||(zI - T) v||
            double s2 = 0.0;
            for (int j = 0; j < n; ++j) {
                cd s = (z - at(j, j)) * v[static_cast<std::size_t>(j)];
                for (int k = j + 1; k < n; ++k) s += (-at(j, k)) * v[static_cast<std::size_t>(k)];
                s2 += std::norm(s);
            }
            const double sigma = std::sqrt(s2);
            if (!std::isfinite(sigma)) return std::numeric_limits<double>::quiet_NaN();
            if (sigma_prev >= 0.0 && std::abs(sigma - sigma_prev) <= 1e-9 * sigma) return sigma;
            sigma_prev = sigma;
        }
        return sigma_prev;
    }

private:
    int n_;
    std::vector<cd> t_;
};

}  // namespace pslab
