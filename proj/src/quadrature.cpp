#include "zenoguard/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "zenoguard/errors.hpp"

namespace zenoguard::quadrature {

Rule gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
    Rule rule{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        const auto lo = static_cast<std::size_t>(i);
        rule.nodes[hi] = x;
        rule.nodes[lo] = -x;
        rule.weights[hi] = w;
        rule.weights[lo] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

Rule gauss_legendre(int n, double a, double b) {
    auto rule = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

namespace {

constexpr int kPanelOrder = 15;

double panel(const std::function<double(double)>& f, const Rule& unit, double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < unit.nodes.size(); ++i) s += unit.weights[i] * f(mid + half * unit.nodes[i]);
    s *= half;
    if (!std::isfinite(s))
        throw Error(ErrorCode::NonIntegrable,
                    "integrand not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return s;
}

double refine(const std::function<double(double)>& f, const Rule& unit, double a, double b,
              double whole, double abs_tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = panel(f, unit, a, mid);
    const double right = panel(f, unit, mid, b);
    const double sum = left + right;
    if (std::abs(sum - whole) <= abs_tol) return sum;
    if (depth <= 0)
        throw Error(ErrorCode::NonIntegrable,
                    "adaptive quadrature did not converge near [" + std::to_string(a) + ", " +
                        std::to_string(b) + "]");
    return refine(f, unit, a, mid, left, 0.5 * abs_tol, depth - 1) +
           refine(f, unit, mid, b, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int max_depth) {
    if (!(b > a)) return 0.0;
    static const Rule unit = gauss_legendre(kPanelOrder);
    // Seed the scale from a 16-panel pass so the relative target is meaningful.
    double scale = 0.0;
    constexpr int kSeedPanels = 16;
    const double width = (b - a) / kSeedPanels;
    for (int i = 0; i < kSeedPanels; ++i) scale += std::abs(panel(f, unit, a + i * width, a + (i + 1) * width));
    const double abs_tol = std::max(rel_tol * scale, 1e-300);
    double total = 0.0;
    for (int i = 0; i < kSeedPanels; ++i) {
        const double lo = a + i * width, hi = a + (i + 1) * width;
        total += refine(f, unit, lo, hi, panel(f, unit, lo, hi), abs_tol / kSeedPanels, max_depth);
    }
    return total;
}

}  // namespace zenoguard::quadrature
