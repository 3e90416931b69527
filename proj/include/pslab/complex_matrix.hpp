#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "pslab/errors.hpp"

namespace pslab {

using cd = std::complex<double>;

/// Dense square complex matrix, row-major. Values are immutable by
/// convention once a builder returns them; all operations below produce
/// fresh matrices.
class ComplexMatrix {
public:
    explicit ComplexMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * n) {
        require(n >= 1, "matrix dimension must be >= 1");
    }

    int dim() const { return n_; }

    cd& operator()(int j, int k) { return e_[static_cast<std::size_t>(j) * n_ + k]; }
    const cd& operator()(int j, int k) const { return e_[static_cast<std::size_t>(j) * n_ + k]; }

    std::span<const cd> data() const { return e_; }
    std::span<cd> data() { return e_; }

private:
    int n_;
    std::vector<cd> e_;
};

inline ComplexMatrix identity(int n) {
    ComplexMatrix I(n);
    for (int j = 0; j < n; ++j) I(j, j) = 1.0;
    return I;
}

inline ComplexMatrix all_ones(int n) {
    ComplexMatrix J(n);
    for (auto& v : J.data()) v = 1.0;
    return J;
}

inline ComplexMatrix operator+(const ComplexMatrix& A, const ComplexMatrix& B) {
    require(A.dim() == B.dim(), "dimension mismatch in matrix sum");
    ComplexMatrix C(A.dim());
    auto a = A.data(), b = B.data();
    auto c = C.data();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return C;
}

inline ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B) {
    require(A.dim() == B.dim(), "dimension mismatch in matrix difference");
    ComplexMatrix C(A.dim());
    auto a = A.data(), b = B.data();
    auto c = C.data();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
    return C;
}

inline ComplexMatrix operator*(cd s, const ComplexMatrix& A) {
    ComplexMatrix C(A.dim());
    auto a = A.data();
    auto c = C.data();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = s * a[i];
    return C;
}

inline ComplexMatrix operator*(const ComplexMatrix& A, const ComplexMatrix& B) {
    require(A.dim() == B.dim(), "dimension mismatch in matrix product");
    const int n = A.dim();
    ComplexMatrix C(n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const cd ajl = A(j, l);
            if (ajl == cd{}) continue;
            for (int k = 0; k < n; ++k) C(j, k) += ajl * B(l, k);
        }
    return C;
}

inline std::vector<cd> operator*(const ComplexMatrix& A, std::span<const cd> x) {
    const int n = A.dim();
    require(static_cast<int>(x.size()) == n, "dimension mismatch in matrix-vector product");
    std::vector<cd> y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        cd s = 0.0;
        for (int k = 0; k < n; ++k) s += A(j, k) * x[k];
        y[static_cast<std::size_t>(j)] = s;
    }
    return y;
}

inline ComplexMatrix adjoint(const ComplexMatrix& A) {
    const int n = A.dim();
    ComplexMatrix C(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) C(j, k) = std::conj(A(k, j));
    return C;
}

inline double frobenius_norm(const ComplexMatrix& A) {
    double s = 0.0;
    for (const auto& v : A.data()) s += std::norm(v);
    return std::sqrt(s);
}

inline double vector_2norm(std::span<const cd> x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

}  // namespace pslab
