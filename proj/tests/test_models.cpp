#include <catch_amalgamated.hpp>

#include <pslab/complex_matrix.hpp>
#include <pslab/models.hpp>

using namespace pslab;
using Catch::Approx;

namespace {

bool same_matrix(const ComplexMatrix& A, const ComplexMatrix& B, double tol = 0.0) {
    if (A.dim() != B.dim()) return false;
    for (int j = 0; j < A.dim(); ++j)
        for (int k = 0; k < A.dim(); ++k)
            if (std::abs(A(j, k) - B(j, k)) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("shift powers have ones on the m-th superdiagonal") {
    const ComplexMatrix S = build_shift_power(3, 1);
    CHECK(S(0, 1) == cd(1.0));
    CHECK(S(1, 2) == cd(1.0));
    CHECK(S(0, 0) == cd(0.0));
    CHECK(S(0, 2) == cd(0.0));
    CHECK(S(2, 0) == cd(0.0));

    SECTION("m = n is the zero matrix (nilpotency)") {
        const ComplexMatrix Z = build_shift_power(3, 3);
        for (const auto& v : Z.data()) CHECK(v == cd(0.0));
    }
    SECTION("m = 0 is the identity") {
        CHECK(same_matrix(build_shift_power(4, 0), identity(4)));
    }
    SECTION("S^2 equals S*S") {
        const ComplexMatrix S4 = build_shift_power(4, 1);
        CHECK(same_matrix(build_shift_power(4, 2), S4 * S4));
    }
    SECTION("matrix-product oracle for all n <= 20, m <= n") {
        for (int n = 1; n <= 20; ++n) {
            ComplexMatrix power = identity(n);
            const ComplexMatrix S = build_shift_power(n, 1);
            for (int m = 0; m <= n; ++m) {
                INFO("n=" << n << " m=" << m);
                REQUIRE(same_matrix(build_shift_power(n, m), power));
                power = power * S;
            }
        }
    }
}

TEST_CASE("build_model assembles the two models entrywise") {
    SECTION("model 1, n=2, m=1, delta=0.5") {
        const ComplexMatrix A = build_model({Model::one, 2, 1, cd(0.5, 0.0), cd{}});
        CHECK(A(0, 0) == cd(0.5));
        CHECK(A(0, 1) == cd(1.5));
        CHECK(A(1, 0) == cd(0.5));
        CHECK(A(1, 1) == cd(0.5));
    }
    SECTION("model 2 at n=2, m=2 collapses to the all-ones matrix") {
        const ComplexMatrix A = build_model({Model::two, 2, 2, cd(1.0, 0.0), cd(7.0, 0.0)});
        CHECK(same_matrix(A, all_ones(2)));
    }
    SECTION("model 1 at m=n is delta*J") {
        const ModelSpec spec{Model::one, 200, 200, cd(0.01, 0.0), cd{}};
        const ComplexMatrix A = build_model(spec);
        CHECK(same_matrix(A, cd(0.01, 0.0) * all_ones(200)));
    }
    SECTION("m out of range rejected") {
        CHECK_THROWS_AS(build_model({Model::one, 5, 0, cd(0.1, 0.0), cd{}}), domain_error);
        CHECK_THROWS_AS(build_model({Model::one, 5, 6, cd(0.1, 0.0), cd{}}), domain_error);
    }
    SECTION("nonnormality of the model matrices: ||A^H A - A A^H|| > 0") {
        for (int m = 1; m <= 9; ++m) {
            const ComplexMatrix A = build_model({Model::one, 10, m, cd(0.01, 0.0), cd{}});
            const ComplexMatrix C = adjoint(A) * A - A * adjoint(A);
            INFO("m=" << m);
            CHECK(frobenius_norm(C) > 0.0);
        }
    }
}

TEST_CASE("build_random_perturbed is a reproducible Gaussian perturbation") {
    SECTION("same seed gives the identical matrix") {
        const RandomMatrixSpec spec{30, 3, cd(0.05, 0.0), 12345u};
        CHECK(same_matrix(build_random_perturbed(spec), build_random_perturbed(spec)));
    }
    SECTION("different seeds differ") {
        const RandomMatrixSpec a{10, 1, cd(1.0, 0.0), 1u};
        const RandomMatrixSpec b{10, 1, cd(1.0, 0.0), 2u};
        CHECK_FALSE(same_matrix(build_random_perturbed(a), build_random_perturbed(b)));
    }
    SECTION("delta = 0 returns exactly S^m") {
        const RandomMatrixSpec spec{50, 1, cd{}, 777u};
        CHECK(same_matrix(build_random_perturbed(spec), build_shift_power(50, 1)));
    }
    SECTION("sample mean of |Z_jk|^2 is close to 2") {
        const int n = 200;
        const RandomMatrixSpec spec{n, n, cd(1.0, 0.0), 99u};  // S^n = 0, so A = Z
        const ComplexMatrix Z = build_random_perturbed(spec);
        double mean = 0.0;
        for (const auto& v : Z.data()) mean += std::norm(v);
        mean /= static_cast<double>(n) * n;
        CHECK(mean == Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("ones_quadratic_form follows the (n-l) indicator formula") {
    CHECK(ones_quadratic_form(5, 2) == 3);
    CHECK(ones_quadratic_form(5, 5) == 0);
    CHECK(ones_quadratic_form(5, 0) == 0);

    SECTION("matches 1^T S^l 1 computed by brute force, n <= 20, l <= n+2") {
        for (int n = 1; n <= 20; ++n) {
            for (int l = 0; l <= n + 2; ++l) {
                const ComplexMatrix Sl = build_shift_power(n, l);
                std::vector<cd> one(static_cast<std::size_t>(n), cd(1.0));
                const std::vector<cd> y = Sl * std::span<const cd>(one);
                cd form = 0.0;
                for (const auto& v : y) form += v;
                INFO("n=" << n << " l=" << l);
                const long long expected = (l >= 1) ? ones_quadratic_form(n, l)
                                                    : static_cast<long long>(n);
                // l = 0 is the one case where the printed indicator (0) and
                // the literal quadratic form (n) part ways
                if (l == 0) {
                    REQUIRE(form.real() == Approx(static_cast<double>(n)));
                    REQUIRE(ones_quadratic_form(n, l) == 0);
                } else {
                    REQUIRE(form.real() == Approx(static_cast<double>(expected)));
                }
            }
        }
    }
}

TEST_CASE("example: 1^T S^3 1 at n=7") {
    CHECK(ones_quadratic_form(7, 3) == 4);
}
