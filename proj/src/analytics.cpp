#include "zenoguard/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "zenoguard/circuits.hpp"
#include "zenoguard/errors.hpp"
#include "zenoguard/quadrature.hpp"

namespace zenoguard::analytics {

using noise::SpectralDensity;

namespace {

void require_amplitudes(cplx c_plus, cplx c_minus) {
    const double norm = std::norm(c_plus) + std::norm(c_minus);
    if (std::abs(norm - 1.0) > 1e-9)
        throw Error(ErrorCode::NotNormalized, "|c+|^2 + |c-|^2 = " + std::to_string(norm));
}

}  // namespace

DeltaBreakdown delta_continuum_breakdown(const noise::DissipationSpec& spec, cplx c_plus, cplx c_minus,
                                         double t0, const ContinuumOptions& options) {
    spec.validate();
    require_amplitudes(c_plus, c_minus);
    const double t02 = t0 * t0;
    const double mixing = 4.0 * std::real(std::conj(c_plus) * c_minus);
    const double temp = spec.temperature;
    const auto& density = spec.spectral;
    DeltaBreakdown out;

    if (density.kind() == SpectralDensity::Kind::Atomic) {
        const auto& spikes = density.points();
        const std::size_t n_shared = spec.sharing.shared_count(spikes.size());
        double total = 0.0, shared = 0.0;
        for (std::size_t i = 0; i < spikes.size(); ++i) {
            const double term = spikes[i].second * noise::thermal_factor(spikes[i].first, temp);
            total += term;
            if (i < n_shared) shared += term;
        }
        out.diagonal = 2.0 * t02 * total;
        out.cross = mixing * t02 * shared;
        out.bound = 4.0 * t02 * total;
        out.delta = out.diagonal + out.cross;
        return out;
    }

    const double omega_scale = spec.omega0 != 0.0 ? std::abs(spec.omega0) : 1.0;
    const bool divergent = temp > 0.0 && !density.vanishes_at_zero();
    const double floor = divergent ? options.infrared_floor * omega_scale : 0.0;
    const auto kernel = [&](double w) { return density(w) * noise::thermal_factor(w, temp); };
    if (divergent)
        out.warnings.push_back("spectral density does not vanish at omega = 0; coth divergence cut at omega_min = " +
                               std::to_string(floor));

    const auto [lo, hi] = density.support();
    const double upper = density.integration_upper();
    const double start = std::max(lo, floor);

    // Split at interior kinks so each panel sees a smooth integrand.
    std::vector<double> breaks{start};
    if (density.kind() == SpectralDensity::Kind::Tabulated)
        for (const auto& p : density.points())
            if (p.first > start && p.first < upper) breaks.push_back(p.first);
    breaks.push_back(upper);
    auto integrate_to = [&](double a, double b) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            const double x0 = std::max(a, breaks[i]), x1 = std::min(b, breaks[i + 1]);
            if (x1 > x0) s += quadrature::integrate(kernel, x0, x1, options.rel_tol);
        }
        return s;
    };

    const double total = integrate_to(start, upper);
    double shared = 0.0;
    switch (spec.sharing.kind) {
        case noise::BathSharing::Kind::Independent: break;
        case noise::BathSharing::Kind::Collective: shared = total; break;
        case noise::BathSharing::Kind::Partial: {
            const double edge = lo + spec.sharing.fraction * (hi - lo);
            if (spec.sharing.fraction >= 1.0) shared = total;
            else if (edge > start) shared = integrate_to(start, edge);
            break;
        }
    }
    out.diagonal = 2.0 * t02 * total;
    out.cross = mixing * t02 * shared;
    out.bound = 4.0 * t02 * total;
    out.delta = out.diagonal + out.cross;
    return out;
}

double delta_continuum(const noise::DissipationSpec& spec, cplx c_plus, cplx c_minus, double t0,
                       const ContinuumOptions& options) {
    return delta_continuum_breakdown(spec, c_plus, c_minus, t0, options).delta;
}

DeltaBreakdown delta_discrete_breakdown(const noise::BathDiscretization& bath, cplx c_plus, cplx c_minus,
                                        double t0) {
    require_amplitudes(c_plus, c_minus);
    if (bath.n_code_qubits != 2)
        throw Error(ErrorCode::InvalidArgument, "delta is defined for the two-qubit code");
    const double t02 = t0 * t0;
    const double mixing = 4.0 * std::real(std::conj(c_plus) * c_minus);
    DeltaBreakdown out;
    // Per-frequency sums of |g_l|^2 for the bound.
    std::map<double, std::pair<double, double>> by_frequency;
    for (const auto& mode : bath.modes) {
        const double coth = noise::thermal_factor(mode.omega, bath.temperature);
        const double g1 = std::norm(mode.g1()), g2 = std::norm(mode.g2());
        out.diagonal += t02 * (g1 + g2) * coth;
        if (mode.shared) out.cross += mixing * t02 * std::real(std::conj(mode.g1()) * mode.g2()) * coth;
        auto& acc = by_frequency[mode.omega];
        acc.first += g1;
        acc.second += g2;
    }
    for (const auto& [omega, g] : by_frequency) {
        const double s = std::sqrt(g.first) + std::sqrt(g.second);
        out.bound += t02 * s * s * noise::thermal_factor(omega, bath.temperature);
    }
    out.delta = out.diagonal + out.cross;
    return out;
}

double delta_discrete(const noise::BathDiscretization& bath, const noise::DissipationSpec& spec,
                      cplx c_plus, cplx c_minus, double t0) {
    spec.validate();
    return delta_discrete_breakdown(bath, c_plus, c_minus, t0).delta;
}

double p_tot(double delta, double gamma, double n) { return delta / n + n * gamma; }

ErrorBudget error_budget(double delta, double gamma, std::size_t n, double bound) {
    if (delta < 0.0 || gamma < 0.0 || n == 0)
        throw Error(ErrorCode::InvalidArgument, "error budget needs delta >= 0, gamma >= 0, n >= 1");
    ErrorBudget b;
    b.delta = delta;
    b.gamma = gamma;
    b.n = n;
    b.bound = bound;
    const double nd = static_cast<double>(n);
    b.p_err_per_step = delta / (nd * nd);
    b.p_tot = p_tot(delta, gamma, nd);
    b.p_tot_min = 2.0 * std::sqrt(delta * gamma);
    if (gamma == 0.0) {
        b.n_opt = std::numeric_limits<double>::infinity();
        b.n_opt_unbounded = true;
    } else {
        b.n_opt = std::sqrt(delta / gamma);
        const double lo = std::max(1.0, std::floor(b.n_opt));
        const double hi = std::max(1.0, std::ceil(b.n_opt));
        b.n_opt_integer = static_cast<std::size_t>(p_tot(delta, gamma, hi) < p_tot(delta, gamma, lo) ? hi : lo);
    }
    b.zeno_condition_ok = b.p_tot_min < kMuchLessRatio;
    b.gamma_small_ok = delta > 0.0 && gamma / delta < kMuchLessRatio;
    b.working_condition_ok = b.zeno_condition_ok && b.gamma_small_ok;
    return b;
}

QubitOverhead qubit_overhead(std::size_t L) {
    if (L < 1) throw Error(ErrorCode::InvalidArgument, "qubit_overhead needs L >= 1");
    const double l = static_cast<double>(L);
    QubitOverhead out{l + 0.5 * std::log2(std::numbers::pi * l / 2.0), 0};
    for (std::size_t n = 2;; n += 2) {
        if (circuits::log2_binomial(n, n / 2) >= l) {
            out.by_search = n;
            break;
        }
    }
    return out;
}

}  // namespace zenoguard::analytics
