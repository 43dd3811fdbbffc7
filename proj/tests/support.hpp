#pragma once

// Random instances and small independent oracles shared by the test binaries.

#include <cmath>
#include <complex>
#include <functional>
#include <array>
#include <random>
#include <vector>

#include "zenoguard/qlinalg.hpp"

namespace testing_support {

using zenoguard::linalg::ComplexMatrix;
using zenoguard::linalg::cplx;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eed);
    return gen;
}

inline double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cplx gaussian_c() {
    std::normal_distribution<double> d;
    return {d(rng()), d(rng())};
}

inline ComplexMatrix random_matrix(std::size_t r, std::size_t c) {
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = gaussian_c();
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t n) {
    const auto g = random_matrix(n, n);
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    return h;
}

// Modified Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t n) {
    auto q = random_matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            cplx dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, p)) * q(i, j);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, p);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
    }
    return q;
}

inline ComplexMatrix random_unit_vector(std::size_t n) {
    auto v = random_matrix(n, 1);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(v(i, 0));
    v *= cplx{1.0 / std::sqrt(norm)};
    return v;
}

// Random density matrix of full rank: G G^dag / tr.
inline ComplexMatrix random_density(std::size_t n) {
    const auto g = random_matrix(n, n);
    auto rho = zenoguard::linalg::multiply_adjoint(g, g);
    rho *= cplx{1.0 / rho.trace().real()};
    return rho;
}

inline std::array<double, 3> random_direction() {
    std::normal_distribution<double> d;
    double x = d(rng()), y = d(rng()), z = d(rng());
    const double n = std::sqrt(x * x + y * y + z * z);
    return {x / n, y / n, z / n};
}

// Naive triple loop, independent of the library multiply.
inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            for (std::size_t l = 0; l < a.cols(); ++l) c(i, j) += a(i, l) * b(l, j);
    return c;
}

inline double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

// Composite trapezoid rule with n panels.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

}  // namespace testing_support
