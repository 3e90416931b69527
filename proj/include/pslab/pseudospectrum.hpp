#pragma once

// Epsilon-pseudospectra as sigma_min grids over complex rectangles.
// Nodes are independent evaluations: n <= 100 uses a full SVD per node,
// larger matrices go through a one-time Schur triangularization plus
// per-node inverse iteration (validated against the SVD path in the test
// suite). Assembly is slot-indexed, so results do not depend on worker
// count or evaluation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pslab/complex_matrix.hpp"
#include "pslab/errors.hpp"
#include "pslab/linalg.hpp"
#include "pslab/models.hpp"
#include "pslab/parallel.hpp"
#include "pslab/rng.hpp"

namespace pslab {

struct GridRegion {
    double re_min = -1.0, re_max = 1.0;
    double im_min = -1.0, im_max = 1.0;
    int nx = 2, ny = 2;  // node counts per axis
};

inline void validate(const GridRegion& r) {
    require(r.re_min < r.re_max && r.im_min < r.im_max, "grid region must have positive extent");
    require(r.nx >= 2 && r.ny >= 2, "grid needs at least 2 nodes per axis");
}

struct PseudospectrumGrid {
    GridRegion region;
    std::vector<double> sigma;  // ny*nx, row j = imaginary index

    double dx() const { return (region.re_max - region.re_min) / (region.nx - 1); }
    double dy() const { return (region.im_max - region.im_min) / (region.ny - 1); }
    cd node(int j, int k) const {
        return {region.re_min + k * dx(), region.im_min + j * dy()};
    }
    double sigma_at(int j, int k) const {
        return sigma[static_cast<std::size_t>(j) * region.nx + k];
    }
    double log_resolvent_at(int j, int k) const {
        const double s = sigma_at(j, k);
        return s > 0.0 ? -std::log10(s) : std::numeric_limits<double>::infinity();
    }
};

/// ||(zI - A)^{-1}|| = 1/sigma_min(zI - A); +infinity once sigma_min
/// underflows below 1e-300.
inline double resolvent_norm_at(const ComplexMatrix& A, cd z) {
    const int n = A.dim();
    ComplexMatrix M(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) M(j, k) = (j == k ? z : cd{}) - A(j, k);
    const double s = singular_min(M);
    if (s < 1e-300) return std::numeric_limits<double>::infinity();
    return 1.0 / s;
}

inline PseudospectrumGrid grid_scan(const ComplexMatrix& A, const GridRegion& region,
                                    int workers = 0) {
    validate(region);
    PseudospectrumGrid grid{region, {}};
    grid.sigma.assign(static_cast<std::size_t>(region.nx) * region.ny, 0.0);

    const int n = A.dim();
    std::optional<SchurTriangular> schur;
    if (n > 100) schur.emplace(A);

    parallel_for(grid.sigma.size(), workers, [&](std::size_t idx) {
        const int j = static_cast<int>(idx) / region.nx;
        const int k = static_cast<int>(idx) % region.nx;
        const cd z = grid.node(j, k);
        double s = std::numeric_limits<double>::quiet_NaN();
        if (schur) s = schur->sigma_min_at(z);
        if (!(s >= 0.0)) {  // NaN or no fast path: dense SVD
            ComplexMatrix M(n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) M(r, c) = (r == c ? z : cd{}) - A(r, c);
            s = singular_min(M);
        }
        grid.sigma[idx] = s;
    });
    return grid;
}

/// Default epsilon ladder for reports and contour levels, log-spaced
/// 1e-1 .. 1e-8.
inline std::vector<double> epsilon_ladder() {
    std::vector<double> eps;
    for (int k = 1; k <= 8; ++k) eps.push_back(std::pow(10.0, -k));
    return eps;
}

struct OriginComponent {
    double area = 0.0;
    double max_abs = 0.0;
};

/// 4-connected flood fill of cells with sigma < eps, seeded at the cell
/// containing the origin. Empty result (area 0) when the origin cell is not
/// below eps, which signals eps below the grid's resolution.
inline OriginComponent epsilon_region_containing_origin(const PseudospectrumGrid& grid,
                                                        double eps) {
    require(eps > 0.0, "eps must be positive");
    const auto& r = grid.region;
    require(r.re_min <= 0.0 && r.re_max >= 0.0 && r.im_min <= 0.0 && r.im_max >= 0.0,
            "origin must lie inside the grid region");
    const int k0 = static_cast<int>(std::lround((0.0 - r.re_min) / grid.dx()));
    const int j0 = static_cast<int>(std::lround((0.0 - r.im_min) / grid.dy()));

    OriginComponent out;
    if (grid.sigma_at(j0, k0) >= eps) return out;

    std::vector<char> seen(grid.sigma.size(), 0);
    std::vector<std::pair<int, int>> stack{{j0, k0}};
    seen[static_cast<std::size_t>(j0) * r.nx + k0] = 1;
    std::size_t cells = 0;
    while (!stack.empty()) {
        const auto [j, k] = stack.back();
        stack.pop_back();
        ++cells;
        out.max_abs = std::max(out.max_abs, std::abs(grid.node(j, k)));
        const int dj[4] = {1, -1, 0, 0};
        const int dk[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int nj = j + dj[d], nk = k + dk[d];
            if (nj < 0 || nj >= r.ny || nk < 0 || nk >= r.nx) continue;
            const std::size_t id = static_cast<std::size_t>(nj) * r.nx + nk;
            if (seen[id] || grid.sigma[id] >= eps) continue;
            seen[id] = 1;
            stack.emplace_back(nj, nk);
        }
    }
    out.area = static_cast<double>(cells) * grid.dx() * grid.dy();
    return out;
}

struct ContainmentReport {
    long long violations = 0;
    double max_margin = -std::numeric_limits<double>::infinity();  // max sigma_min(muI-A) - eps
};

/// Checks the perturbation characterization: eigenvalues of A + E with
/// ||E|| = 0.99 eps must satisfy sigma_min(muI - A) < eps. Violations are
/// counted beyond a 1e-8 ||A|| slack for eigensolver roundoff.
inline ContainmentReport perturbation_containment_check(const ComplexMatrix& A, double eps,
                                                        int trials, std::uint64_t seed,
                                                        int workers = 0) {
    require(eps > 0.0, "eps must be positive");
    require(trials >= 1, "trials must be >= 1");
    const int n = A.dim();
    const double slack = 1e-8 * matrix_2norm(A);

    std::vector<double> trial_margin(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(seed, t, 0x7065727475726221ull);
        ComplexMatrix E(n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const GaussPair g = gaussian_entry(trial_seed, static_cast<std::uint64_t>(j),
                                                   static_cast<std::uint64_t>(k));
                E(j, k) = cd(g.x, g.y);
            }
        const double norm_E = matrix_2norm(E);
        const cd scale = norm_E > 0.0 ? 0.99 * eps / norm_E : 0.0;
        const EigenResult eig = eigenvalues(A + scale * E);
        double worst = -std::numeric_limits<double>::infinity();
        for (const cd& mu : eig.values) {
            ComplexMatrix M(n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) M(r, c) = (r == c ? mu : cd{}) - A(r, c);
            worst = std::max(worst, singular_min(M) - eps);
        }
        trial_margin[t] = worst;
    });

    ContainmentReport rep;
    for (double m : trial_margin) {
        rep.max_margin = std::max(rep.max_margin, m);
        if (m > slack) ++rep.violations;
    }
    return rep;
}

}  // namespace pslab
