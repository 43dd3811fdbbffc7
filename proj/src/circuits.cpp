#include "zenoguard/circuits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "zenoguard/errors.hpp"

namespace zenoguard::circuits {

using noise::DissipationSpec;

std::pair<double, double> bloch_angles(const DissipationSpec& spec) {
    spec.validate();
    const auto& l = spec.lambda;
    const double theta = std::acos(std::clamp(l[2], -1.0, 1.0));
    const double phi = (l[0] == 0.0 && l[1] == 0.0) ? 0.0 : std::atan2(l[1], l[0]);
    return {theta, phi};
}

namespace {

ComplexMatrix rotation_for(const DissipationSpec& spec) {
    const auto [theta, phi] = bloch_angles(spec);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const cplx e = std::polar(1.0, phi);
    // Columns: +1 and -1 eigenvectors of lambda . sigma. The -1 column carries
    // -e^{-2i theta}, so R = 1 at the north pole while R H = diag(1, e^{i phi})
    // on the equator.
    const cplx g = -std::polar(1.0, -2.0 * theta);
    return ComplexMatrix(2, 2, {c, g * s, e * s, -g * e * c});
}

ComplexMatrix hadamard() {
    const double r = 1.0 / std::numbers::sqrt2;
    return ComplexMatrix(2, 2, {r, r, r, -r});
}

ComplexMatrix column_of(const ComplexMatrix& m, std::size_t c) {
    ComplexMatrix v(m.rows(), 1);
    for (std::size_t i = 0; i < m.rows(); ++i) v(i, 0) = m(i, c);
    return v;
}

linalg::SubsystemLayout two_qubit_layout() {
    return linalg::SubsystemLayout({2, 2}, {noise::qubit_label(0), noise::qubit_label(1)});
}

}  // namespace

ComputationBasis computation_basis(const DissipationSpec& spec) {
    const auto w = rotation_for(spec) * hadamard();
    return {column_of(w, 0), column_of(w, 1)};
}

GateSet build_gates(const DissipationSpec& spec) {
    GateSet g;
    g.rotation = rotation_for(spec);
    g.hadamard = hadamard();
    g.basis = g.rotation * g.hadamard;
    g.cnot_physical = ComplexMatrix(4, 4, {0, 1, 0, 0,  //
                                           1, 0, 0, 0,  //
                                           0, 0, 1, 0,  //
                                           0, 0, 0, 1});
    const auto ww = linalg::kron(g.basis, g.basis);
    g.cnot_computation = linalg::conjugate(ww, g.cnot_physical);
    g.encoder = ww * g.cnot_physical;
    const ComplexMatrix paulis[] = {linalg::ops::sigma_x(), linalg::ops::sigma_y(), linalg::ops::sigma_z()};
    for (std::size_t i = 0; i < 3; ++i) g.pauli_computation[i] = linalg::conjugate(g.basis, paulis[i]);
    return g;
}

QuantumState encode(cplx c_plus, cplx c_minus, const GateSet& gates) {
    const double norm = std::norm(c_plus) + std::norm(c_minus);
    if (std::abs(norm - 1.0) > linalg::kNormTol)
        throw Error(ErrorCode::NotNormalized, "|c+|^2 + |c-|^2 = " + std::to_string(norm));
    // (c+|+> + c-|->) x |+>
    auto input = ComplexMatrix::column({c_plus, 0.0, c_minus, 0.0});
    return QuantumState::pure(two_qubit_layout(), gates.encoder * input);
}

ComplexMatrix logical_density(const QuantumState& state, const GateSet& gates) {
    if (state.dimension() != 4)
        throw Error(ErrorCode::DimensionMismatch, "decode expects a two-qubit state");
    const auto rho = linalg::conjugate(gates.encoder.adjoint(), state.to_density().data());
    return ComplexMatrix(2, 2, {rho(0, 0), rho(0, 2), rho(2, 0), rho(2, 2)});
}

Decoded decode(const QuantumState& state, const GateSet& gates) {
    if (state.dimension() != 4)
        throw Error(ErrorCode::DimensionMismatch, "decode expects a two-qubit state");
    if (state.is_pure()) {
        const auto v = gates.encoder.adjoint() * state.data();
        const cplx cp = v(0, 0), cm = v(2, 0);
        const double leak = std::max(0.0, state.weight() - std::norm(cp) - std::norm(cm));
        return {cp, cm, leak};
    }
    const auto block = logical_density(state, gates);
    const double inside = block.trace().real();
    const double leak = std::max(0.0, state.weight() - inside);
    const auto eig = linalg::eig_hermitian(block);
    const double top = std::max(0.0, eig.values[1]);
    cplx cp = eig.vectors(0, 1), cm = eig.vectors(1, 1);
    if (std::abs(cp) > 0.0) {
        const cplx phase = std::conj(cp) / std::abs(cp);
        cp *= phase;
        cm *= phase;
    }
    return {cp * std::sqrt(top), cm * std::sqrt(top), leak};
}

Codespace codespace(std::size_t two_l) {
    if (two_l % 2 != 0) throw Error(ErrorCode::OddQubitCount, "codespace needs an even qubit count, got " + std::to_string(two_l));
    if (two_l < 2 || two_l > kMaxCodeQubits)
        throw Error(ErrorCode::InvalidArgument, "codespace qubit count must lie in [2, " +
                                                    std::to_string(kMaxCodeQubits) + "]");
    Codespace code;
    code.n_qubits = two_l;
    const std::uint64_t states = std::uint64_t{1} << two_l;
    code.b_observable.resize(states);
    for (std::uint64_t x = 0; x < states; ++x) {
        const int weight = std::popcount(x);
        code.b_observable[x] = weight;
        if (static_cast<std::size_t>(weight) == two_l / 2) code.basis_indices.push_back(x);
    }
    return code;
}

ComplexMatrix computation_to_physical(const GateSet& gates, std::size_t n_qubits) {
    ComplexMatrix w = ComplexMatrix::identity(1);
    for (std::size_t i = 0; i < n_qubits; ++i) w = linalg::kron(w, gates.basis);
    return w;
}

ComplexMatrix codespace_projector(const Codespace& code, const GateSet& gates) {
    const auto w = computation_to_physical(gates, code.n_qubits);
    const std::size_t d = w.rows();
    ComplexMatrix selected(d, code.dimension());
    for (std::size_t c = 0; c < code.dimension(); ++c)
        for (std::size_t i = 0; i < d; ++i) selected(i, c) = w(i, code.basis_indices[c]);
    return linalg::multiply_adjoint(selected, selected);
}

double log2_binomial(std::size_t n, std::size_t k) {
    if (k > n) return -INFINITY;
    k = std::min(k, n - k);
    if (n <= 66) {
        std::uint64_t c = 1;
        for (std::size_t i = 1; i <= k; ++i) c = c / i * (n - k + i) + c % i * (n - k + i) / i;
        return std::log2(static_cast<double>(c));
    }
    const double ln = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return ln / std::numbers::ln2;
}

Efficiency efficiency(std::size_t L) {
    if (L < 1) throw Error(ErrorCode::InvalidArgument, "efficiency needs L >= 1");
    const double l = static_cast<double>(L);
    return {log2_binomial(2 * L, L) / (2.0 * l), 1.0 - std::log2(std::numbers::pi * l) / (4.0 * l)};
}

}  // namespace zenoguard::circuits
