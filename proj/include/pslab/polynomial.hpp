#pragma once

// Dense complex polynomials and a simultaneous root finder: Aberth-Ehrlich
// iteration from a circle of starting points, followed by Newton polishing.
// All roots are returned at once, which is what the characteristic
// equations here need (degrees up to a few hundred).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "pslab/errors.hpp"

namespace pslab {

using cd = std::complex<double>;

/// coeffs[k] is the coefficient of z^k; the leading coefficient is nonzero.
class ComplexPolynomial {
public:
    explicit ComplexPolynomial(std::vector<cd> coeffs) : c_(std::move(coeffs)) {
        require(!c_.empty(), "polynomial needs at least one coefficient");
        require(c_.back() != cd{}, "leading coefficient must be nonzero");
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cd>& coeffs() const { return c_; }

    cd eval(cd z) const {
        cd p = c_.back();
        for (std::size_t i = c_.size() - 1; i-- > 0;) p = p * z + c_[i];
        return p;
    }

    /// Horner pass returning (p(z), p'(z)).
    std::pair<cd, cd> eval_with_derivative(cd z) const {
        cd p = c_.back();
        cd dp = 0.0;
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            dp = dp * z + p;
            p = p * z + c_[i];
        }
        return {p, dp};
    }

private:
    std::vector<cd> c_;
};

namespace detail {

// (p(z)/z^d, p'(z) expressed through the reversed polynomial) for |z| > 1:
// with w = 1/z and q(w) = sum a_{d-j} w^j, p(z) = z^d q(w) and
// p'(z) = z^{d-1} (d q(w) - w q'(w)). Evaluating q instead of p keeps
// everything finite for high degrees where |z|^d overflows.
struct ScaledEval {
    cd newton;       // p(z)/p'(z)
    double resid;    // |p(z)| / (scale * max(1,|z|)^d), +inf when non-finite
};

inline ScaledEval scaled_eval(const std::vector<cd>& c, double scale, cd z) {
    const std::size_t d = c.size() - 1;
    ScaledEval out{cd{}, std::numeric_limits<double>::infinity()};
    if (std::abs(z) <= 1.0) {
        cd p = c[d], dp = 0.0;
        for (std::size_t i = d; i-- > 0;) {
            dp = dp * z + p;
            p = p * z + c[i];
        }
        const double ap = std::abs(p);
        if (!std::isfinite(ap)) return out;
        out.resid = ap / scale;
        out.newton = (std::abs(dp) > 0.0) ? p / dp : cd{};
        if (!std::isfinite(std::abs(out.newton))) out.newton = cd{};
    } else {
        const cd w = 1.0 / z;
        cd q = c[0], dq = 0.0;  // q(w) with reversed coefficients
        for (std::size_t i = 1; i <= d; ++i) {
            dq = dq * w + q;
            q = q * w + c[i];
        }
        const double aq = std::abs(q);
        if (!std::isfinite(aq)) return out;
        out.resid = aq / scale;
        const cd denom = static_cast<double>(d) * q - w * dq;
        out.newton = (std::abs(denom) > 0.0) ? z * q / denom : cd{};
        if (!std::isfinite(std::abs(out.newton))) out.newton = cd{};
    }
    return out;
}

inline double coeff_scale(const std::vector<cd>& c) {
    double scale = 0.0;
    for (const auto& v : c) scale = std::max(scale, std::abs(v));
    return scale;
}

}  // namespace detail

/// |p(z)| / (max_k |a_k| * max(1,|z|)^degree): the convergence measure used
/// by solve_polynomial. Computed through the reversed polynomial for
/// |z| > 1, so it stays finite at any degree.
inline double scaled_residual(const ComplexPolynomial& poly, cd z) {
    return detail::scaled_eval(poly.coeffs(), detail::coeff_scale(poly.coeffs()), z).resid;
}

namespace detail {

// Upper bound on root moduli: the classical 1 + max|a_k/a_d| bound, capped
// by a Fujiwara-type bound 2*max_k |a_{d-k}/a_d|^{1/k} which stays tight
// when the low-order coefficients are astronomically larger than the
// leading one.
inline double root_radius_bound(const std::vector<cd>& c) {
    const std::size_t d = c.size() - 1;
    const double lead = std::abs(c[d]);
    double cauchy = 0.0;
    double fujiwara = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double r = std::abs(c[k]) / lead;
        cauchy = std::max(cauchy, r);
        if (r > 0.0)
            fujiwara = std::max(fujiwara, std::pow(r, 1.0 / static_cast<double>(d - k)));
    }
    return std::max(1e-3, std::min(1.0 + cauchy, 2.0 * fujiwara));
}

inline std::vector<cd> solve_quadratic(cd a, cd b, cd c) {
    // roots of a z^2 + b z + c, with the numerically stable branch choice
    const cd disc = std::sqrt(b * b - 4.0 * a * c);
    const cd q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cd{}) return {cd{}, cd{}};
    return {q / a, c / q};
}

}  // namespace detail

/// Returns all `degree` roots (with multiplicity). Every root satisfies
/// scaled_residual(poly, root) <= tol, else solver_error is thrown with the
/// best iterate found. Deterministic for identical inputs.
inline std::vector<cd> solve_polynomial(const ComplexPolynomial& poly, double tol = 1e-12,
                                        int max_iter = 1000) {
    require(poly.degree() >= 1, "degree must be >= 1");
    require(tol > 0.0, "tol must be positive");
    require(max_iter >= 1, "max_iter must be >= 1");

    std::vector<cd> c = poly.coeffs();

    // exact zero roots deflate immediately
    std::size_t zeros = 0;
    while (zeros < c.size() - 1 && c[zeros] == cd{}) ++zeros;
    std::vector<cd> roots(zeros, cd{});
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));

    const std::size_t d = c.size() - 1;
    if (d == 0) return roots;
    if (d == 1) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    if (d == 2) {
        auto qr = detail::solve_quadratic(c[2], c[1], c[0]);
        roots.insert(roots.end(), qr.begin(), qr.end());
        return roots;
    }

    const double scale = detail::coeff_scale(c);
    const double radius = detail::root_radius_bound(c);
    std::vector<cd> z(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double ang =
            2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(d) + 0.3763;
        z[i] = radius * cd(std::cos(ang), std::sin(ang));
    }

    std::vector<bool> done(d, false);
    const double eps = 1e-300;
    for (int iter = 0; iter < max_iter; ++iter) {
        bool all_done = true;
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            const auto ev = detail::scaled_eval(c, scale, z[i]);
            if (ev.resid <= 0.1 * tol) {
                done[i] = true;
                continue;
            }
            all_done = false;
            if (ev.newton == cd{}) {
                // unusable Newton data (derivative vanished or overflow in
                // the coefficients themselves): contract toward the origin
                z[i] *= 0.7;
                continue;
            }
            cd repulsion = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                if (j == i) continue;
                cd diff = z[i] - z[j];
                if (std::abs(diff) < eps) diff = cd(eps, 0.0);
                repulsion += 1.0 / diff;
            }
            const cd denom = 1.0 - ev.newton * repulsion;
            const cd step = (std::abs(denom) > eps) ? ev.newton / denom : ev.newton;
            if (std::isfinite(std::abs(step)))
                z[i] -= step;
            else
                z[i] *= 0.7;
        }
        if (all_done) break;
    }

    // Newton polishing sharpens each root independently.
    for (std::size_t i = 0; i < d; ++i) {
        double best = detail::scaled_eval(c, scale, z[i]).resid;
        for (int it = 0; it < 4; ++it) {
            const auto ev = detail::scaled_eval(c, scale, z[i]);
            if (ev.newton == cd{}) break;
            if (std::abs(ev.newton) <= 1e-17 * std::max(1.0, std::abs(z[i]))) break;
            const cd cand = z[i] - ev.newton;
            const double cand_resid = detail::scaled_eval(c, scale, cand).resid;
            if (cand_resid <= best) {
                z[i] = cand;
                best = cand_resid;
            } else {
                break;
            }
        }
    }

    std::vector<double> resid(d);
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        resid[i] = detail::scaled_eval(c, scale, z[i]).resid;
        worst = std::max(worst, resid[i]);
        if (!std::isfinite(worst)) worst = std::numeric_limits<double>::infinity();
    }
    roots.insert(roots.end(), z.begin(), z.end());
    if (worst > tol) {
        throw solver_error("root finder did not reach tolerance " + std::to_string(tol) +
                               " within " + std::to_string(max_iter) +
                               " iterations (worst scaled residual " + std::to_string(worst) + ")",
                           roots, resid);
    }
    return roots;
}

}  // namespace pslab
