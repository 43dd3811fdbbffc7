#pragma once

// Dissipation model: the qubit noise operator A = lambda . sigma, spectral
// densities, discretized bosonic baths and the system + bath Hamiltonian
//
//   H = (omega0 - drive) sum_l sigma_z^l + sum_k omega_k a_k^dag a_k
//       + sum_l sum_k A_l (g_lk a_k^dag + g_lk^* a_k).
//
// Natural units: hbar = k_B = 1.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zenoguard/qlinalg.hpp"

namespace zenoguard::noise {

using linalg::ComplexMatrix;
using linalg::cplx;
using linalg::QuantumState;
using linalg::SubsystemLayout;

// Engine limit on the system + bath dimension.
inline constexpr std::size_t kMaxDimension = 2048;
// Largest Gibbs weight allowed above the Fock cutoff.
inline constexpr double kMaxTruncatedMass = 1e-3;
// Ohmic spectra are discretized on [0, kOhmicSupport * omega_c].
inline constexpr double kOhmicSupport = 12.0;

// |g(omega)|^2 as a function of omega >= 0.
class SpectralDensity {
public:
    enum class Kind { Ohmic, Flat, Tabulated, Atomic };

    // alpha * omega * exp(-omega / omega_c)
    static SpectralDensity ohmic(double alpha, double omega_c);
    // g0^2 on [0, omega_max]
    static SpectralDensity flat(double g0, double omega_max);
    // Piecewise linear through (omega, |g|^2) points, zero outside.
    static SpectralDensity tabulated(std::vector<std::pair<double, double>> points);
    // Sum of delta spikes: integral of f = sum_i weight_i f(omega_i).
    static SpectralDensity atomic(std::vector<std::pair<double, double>> spikes);

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return a_; }
    double omega_c() const noexcept { return b_; }
    double g0() const noexcept { return a_; }
    double omega_max() const noexcept { return b_; }
    const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

    // Density value; zero for the atomic kind (it has no density).
    double operator()(double omega) const;
    // Interval Gauss-Legendre discretization covers.
    std::pair<double, double> support() const;
    // Upper limit for continuum integrals (tail beyond is negligible).
    double integration_upper() const;
    bool vanishes_at_zero() const;

    SpectralDensity scaled(double factor) const;

private:
    SpectralDensity(Kind kind, double a, double b, std::vector<std::pair<double, double>> points);

    Kind kind_;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<std::pair<double, double>> points_;
};

// Two-column (omega, |g|^2) text table, whitespace separated, '#' comments.
SpectralDensity parse_spectral_table(std::istream& in, const std::string& origin = "<table>");
SpectralDensity load_spectral_table(const std::string& path);

struct BathSharing {
    enum class Kind { Independent, Collective, Partial };
    Kind kind = Kind::Independent;
    double fraction = 0.0;  // only for Partial, in [0, 1]

    static BathSharing independent() { return {Kind::Independent, 0.0}; }
    static BathSharing collective() { return {Kind::Collective, 1.0}; }
    static BathSharing partial(double f) { return {Kind::Partial, f}; }

    // Number of shared nodes out of n under this topology.
    std::size_t shared_count(std::size_t n) const;
};

struct DissipationSpec {
    std::array<double, 3> lambda{1.0, 0.0, 0.0};
    double omega0 = 1.0;
    double temperature = 0.0;
    SpectralDensity spectral = SpectralDensity::flat(0.1, 1.0);
    BathSharing sharing = BathSharing::independent();

    // Throws InvalidArgument on |lambda| != 1, T < 0 or a bad sharing fraction.
    void validate() const;
};

struct BathMode {
    double omega = 0.0;
    std::vector<cplx> couplings;  // one per code qubit; zero where the mode does not couple
    bool shared = false;

    cplx g1() const { return couplings.at(0); }
    cplx g2() const { return couplings.at(1); }
};

struct BathDiscretization {
    std::vector<BathMode> modes;
    std::size_t fock_cutoff = 2;  // n_max: levels 0..n_max are kept
    std::vector<double> nbar;
    double temperature = 0.0;
    std::size_t n_code_qubits = 2;

    std::size_t mode_dimension() const noexcept { return fock_cutoff + 1; }
    // Same modes, couplings multiplied by `factor`.
    BathDiscretization scaled(double factor) const;
};

struct DriveSpec {
    bool enabled = false;
    double coefficient = 0.0;

    static DriveSpec off() { return {}; }
    // Counter-term that exactly offsets omega0 sum sigma_z.
    static DriveSpec matched(const DissipationSpec& spec) { return {true, spec.omega0}; }
};

struct SystemHamiltonian {
    ComplexMatrix h;
    SubsystemLayout layout;
};

// Bose occupation 1/(exp(omega/T) - 1); zero at T = 0.
double bose_occupation(double omega, double temperature);
// coth(omega / 2T); one at T = 0.
double thermal_factor(double omega, double temperature);

std::string qubit_label(std::size_t l);
std::string mode_label(std::size_t k);

// A = lambda1 sigma_x + lambda2 sigma_y + lambda3 sigma_z
ComplexMatrix qubit_operator(const DissipationSpec& spec);

// Gauss-Legendre nodes on the spectral support with g_k = g(omega_k) sqrt(w_k).
// Independent: one mode per node per qubit. Collective: every node shared.
// Partial(f): the first ceil(f n) nodes shared, the rest per qubit. Atomic
// spectra place one mode per spike and ignore n_modes.
BathDiscretization discretize_bath(const DissipationSpec& spec, std::size_t n_modes,
                                   std::size_t fock_cutoff, std::size_t n_code_qubits = 2);

// Layout: q1..qN then mode0..modeM-1. Throws DimensionOverflow, InvalidArgument.
SystemHamiltonian build_hamiltonian(const DissipationSpec& spec, const BathDiscretization& bath,
                                    const DriveSpec& drive, std::size_t n_code_qubits = 2);

// Product of truncated, renormalized Gibbs states over the bath modes.
QuantumState thermal_bath_state(const BathDiscretization& bath);

}  // namespace zenoguard::noise
