#pragma once

// Gates and codes in two bases. The physical basis is the sigma_z eigenbasis
// (index 0 = |+>, sigma_z = +1). The computation basis {|0>, |1>} is built from
// the noise operator's eigenvectors, |0> = (|+1> + |-1>)/sqrt2 and
// |1> = (|+1> - |-1>)/sqrt2, so that A|0> = |1>. All matrices here act on
// physical-basis amplitudes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "zenoguard/noise.hpp"
#include "zenoguard/qlinalg.hpp"

namespace zenoguard::circuits {

using linalg::ComplexMatrix;
using linalg::cplx;
using linalg::QuantumState;

struct ComputationBasis {
    ComplexMatrix ket0;  // 2 x 1
    ComplexMatrix ket1;  // 2 x 1
};

struct GateSet {
    ComplexMatrix rotation;          // R: |+> -> |+1>, |-> -> |-1>
    ComplexMatrix hadamard;          // H
    ComplexMatrix basis;             // W = R H; columns are |0>, |1>
    ComplexMatrix cnot_physical;     // C, fires when the control is |+>
    ComplexMatrix cnot_computation;  // C' = (W x W) C (W x W)^dag
    ComplexMatrix encoder;           // (W x W) C, carrier first, ancilla second
    std::array<ComplexMatrix, 3> pauli_computation;  // W sigma_{x,y,z} W^dag
};

// Bloch angles (theta, phi) of lambda.
std::pair<double, double> bloch_angles(const noise::DissipationSpec& spec);

ComputationBasis computation_basis(const noise::DissipationSpec& spec);
GateSet build_gates(const noise::DissipationSpec& spec);

// c+|01> + c-|10> (computation basis), produced by running the encoder on
// (c+|+> + c-|->) x |+>. Throws NotNormalized.
QuantumState encode(cplx c_plus, cplx c_minus, const GateSet& gates);

struct Decoded {
    cplx c_plus;
    cplx c_minus;
    double leakage;  // weight outside the "ancilla back in |+>" sector
};

// Inverse encoder on a two-qubit state. For density input the amplitudes are
// the dominant eigenvector of the logical block (c+ real, non-negative).
Decoded decode(const QuantumState& state, const GateSet& gates);
// 2x2 block of encoder^dag rho encoder with the ancilla in |+>.
ComplexMatrix logical_density(const QuantumState& state, const GateSet& gates);

struct Codespace {
    std::size_t n_qubits = 0;
    std::vector<std::uint64_t> basis_indices;  // computation-basis strings of weight L, qubit 1 = MSB
    std::vector<int> b_observable;             // eigenvalue of B_1 + ... + B_2L per basis string

    std::size_t half() const noexcept { return n_qubits / 2; }
    std::size_t dimension() const noexcept { return basis_indices.size(); }
};

inline constexpr std::size_t kMaxCodeQubits = 20;

// Balanced-weight codespace, B_l = |1><1|. Throws OddQubitCount.
Codespace codespace(std::size_t two_l);

// W^{(x) n}: maps computation-basis amplitudes to physical ones.
ComplexMatrix computation_to_physical(const GateSet& gates, std::size_t n_qubits);
// Physical-basis projector onto the codespace.
ComplexMatrix codespace_projector(const Codespace& code, const GateSet& gates);

struct Efficiency {
    double exact;
    double asymptotic;
};

// exact = log2 C(2L, L) / 2L, asymptotic = 1 - log2(pi L) / 4L
Efficiency efficiency(std::size_t L);

double log2_binomial(std::size_t n, std::size_t k);

}  // namespace zenoguard::circuits
