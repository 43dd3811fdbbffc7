#pragma once

// Closed-form error predictions for the two-qubit code.
//
//   delta = sum_l int |g_l|^2 T0^2 coth(w/2T) dw
//         + 4 Re(c+^* c-) int Re(g1^* g2) T0^2 coth(w/2T) dw    (shared modes only)
//   P_err = delta / N^2,  P_tot = delta / N + N gamma >= 2 sqrt(delta gamma)

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "zenoguard/noise.hpp"

namespace zenoguard::analytics {

using cplx = std::complex<double>;

struct DeltaBreakdown {
    double diagonal = 0.0;  // sum over qubits of int |g_l|^2 T0^2 coth
    double cross = 0.0;     // 4 Re(c+^* c-) int_shared Re(g1^* g2) T0^2 coth
    double delta = 0.0;     // diagonal + cross
    double bound = 0.0;     // int (|g1| + |g2|)^2 T0^2 coth
    std::vector<std::string> warnings;
};

struct ContinuumOptions {
    // Lower integration limit in units of omega0 (coth diverges at 0 for T > 0).
    double infrared_floor = 1e-6;
    double rel_tol = 1e-8;
};

// Adaptive quadrature over the spectral density; atomic spectra are summed
// exactly. Throws NonIntegrable.
DeltaBreakdown delta_continuum_breakdown(const noise::DissipationSpec& spec, cplx c_plus, cplx c_minus,
                                         double t0, const ContinuumOptions& options = {});
double delta_continuum(const noise::DissipationSpec& spec, cplx c_plus, cplx c_minus, double t0,
                       const ContinuumOptions& options = {});

// Same formula restricted to the simulator's modes. The bound groups modes by
// frequency so that (|g1| + |g2|)^2 is taken per omega.
DeltaBreakdown delta_discrete_breakdown(const noise::BathDiscretization& bath, cplx c_plus, cplx c_minus,
                                        double t0);
double delta_discrete(const noise::BathDiscretization& bath, const noise::DissipationSpec& spec,
                      cplx c_plus, cplx c_minus, double t0);

// "<<" thresholds for the working-condition flags.
inline constexpr double kMuchLessRatio = 0.1;

struct ErrorBudget {
    double delta = 0.0;
    double gamma = 0.0;
    std::size_t n = 1;
    double p_err_per_step = 0.0;
    double p_tot = 0.0;
    double n_opt = 0.0;            // +inf when gamma == 0
    bool n_opt_unbounded = false;
    std::size_t n_opt_integer = 0;  // better of floor/ceil under p_tot; 0 when unbounded
    double p_tot_min = 0.0;
    double bound = 0.0;
    bool zeno_condition_ok = false;  // 2 sqrt(delta gamma) < 0.1
    bool gamma_small_ok = false;     // gamma / delta < 0.1
    bool working_condition_ok = false;
};

double p_tot(double delta, double gamma, double n);
ErrorBudget error_budget(double delta, double gamma, std::size_t n, double bound = 0.0);

struct QubitOverhead {
    double abstract_formula;    // L + 1/2 log2(pi L / 2)
    std::size_t by_search;  // smallest even n with log2 C(n, n/2) >= L
};

QubitOverhead qubit_overhead(std::size_t L);

}  // namespace zenoguard::analytics
