#pragma once

#include <functional>
#include <vector>

namespace zenoguard::quadrature {

struct Rule {
    std::vector<double> nodes;    // ascending, in (-1, 1)
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n, accurate to ~1e-15).
Rule gauss_legendre(int n);

// Same rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

// Composite Gauss-Legendre with interval halving until the two-level estimate
// agrees to `rel_tol` of the running total. Throws NonIntegrable when the
// subdivision depth is exhausted or the integrand is not finite.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8, int max_depth = 40);

}  // namespace zenoguard::quadrature
