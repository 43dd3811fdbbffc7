#pragma once

// Zeno protection loop: exact evolution for T0/N, optional test noise, then
// the ancilla-based QND syndrome test C'_{13} C'_{23}, repeated N times.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "zenoguard/analytics.hpp"
#include "zenoguard/circuits.hpp"
#include "zenoguard/noise.hpp"
#include "zenoguard/qlinalg.hpp"
#include "zenoguard/rng.hpp"

namespace zenoguard::zeno {

using linalg::ComplexMatrix;
using linalg::cplx;
using linalg::QuantumState;

enum class Policy { Postselect, TrackBoth };
enum class Syndrome { In, Out };

const char* to_string(Policy p) noexcept;
const char* to_string(Syndrome s) noexcept;

inline constexpr const char* kAncillaLabel = "anc";

struct ZenoConfig {
    double t_total = 1.0;
    std::size_t n_tests = 32;
    double gamma = 0.0;
    Policy policy = Policy::TrackBoth;
    bool sampling = false;  // trajectory mode: sampled kicks and outcomes
    std::uint64_t seed = 0;

    void validate() const;
    double dt() const { return t_total / static_cast<double>(n_tests); }
};

struct StepRecord {
    std::size_t step = 0;
    double leak_probability = 0.0;
    Syndrome syndrome = Syndrome::In;
    double post_fidelity = 0.0;
};

struct ZenoRunReport {
    std::vector<StepRecord> per_step;
    double final_fidelity = 0.0;
    double total_out_probability = 0.0;
    double estimated_p_tot = 0.0;
    double delta_discrete = 0.0;
    double mean_leak_probability = 0.0;
    bool accepted = true;  // false once a sampled trajectory sees "out" under postselect
    circuits::Decoded decoded{};
};

// (I - i h dt) |psi>, not renormalized. Pure states only.
QuantumState first_order_step(const QuantumState& state, const ComplexMatrix& h, double dt);

struct SyndromeBranches {
    QuantumState in;   // unnormalized, ancilla removed
    QuantumState out;  // unnormalized, ancilla removed
    double p_out = 0.0;
};

// Appends the ancilla in |0> (computation basis), applies C' from every code
// qubit, projects the ancilla onto each computation-basis outcome and traces
// it out. The code is "in" when the ancilla flip count has the parity of L.
SyndromeBranches measure_syndrome(const QuantumState& state, const circuits::GateSet& gates,
                                  const circuits::Codespace& code);

struct SyndromeResult {
    Syndrome outcome = Syndrome::In;
    QuantumState projected;  // normalized post-measurement state, ancilla removed
    double p_out = 0.0;
};

// Samples the outcome with `rng`.
SyndromeResult syndrome_test(const QuantumState& state, const circuits::GateSet& gates,
                             const circuits::Codespace& code, SplitMix64& rng);

// Single-qubit depolarizing kick on the code qubits, Paulis taken in the
// computation basis. Without rng: exact mixture (density result). With rng:
// one sampled branch, form preserved.
QuantumState inject_test_noise(const QuantumState& state, double gamma, const circuits::GateSet& gates,
                               std::size_t n_code_qubits, SplitMix64* rng = nullptr);

struct ProtocolSetup {
    noise::DissipationSpec spec;
    noise::BathDiscretization bath;
    noise::DriveSpec drive;
    circuits::GateSet gates;
    circuits::Codespace code;
    cplx c_plus{1.0};
    cplx c_minus{0.0};

    static ProtocolSetup make(const noise::DissipationSpec& spec, const noise::BathDiscretization& bath,
                              const noise::DriveSpec& drive, cplx c_plus, cplx c_minus);
};

ZenoRunReport run_protocol(const noise::DissipationSpec& spec, const noise::BathDiscretization& bath,
                           const noise::DriveSpec& drive, const circuits::GateSet& gates,
                           const circuits::Codespace& code, cplx c_plus, cplx c_minus,
                           const ZenoConfig& config);
ZenoRunReport run_protocol(const ProtocolSetup& setup, const ZenoConfig& config);

struct ScalingRow {
    std::size_t n = 0;
    double one_minus_fidelity = 0.0;
    double total_out_probability = 0.0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double slope = 0.0;     // least squares d log(1 - F) / d log N; NaN when no_decay
    bool no_decay = false;  // every 1 - F below 1e-12
};

// Least-squares slope of log y against log x over points with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// One density-matrix (track-both, no sampling) run per N. n_values ascending.
ScalingResult zeno_scaling_experiment(const ProtocolSetup& setup, const ZenoConfig& base,
                                      const std::vector<std::size_t>& n_values);

// Index of the smallest one_minus_fidelity if it is not at either end.
std::optional<std::size_t> interior_minimum(const ScalingResult& result);

}  // namespace zenoguard::zeno
