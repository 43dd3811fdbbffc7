#include "zenoguard/zeno.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "zenoguard/errors.hpp"

namespace zenoguard::zeno {

using linalg::StateForm;
using linalg::SubsystemLayout;

const char* to_string(Policy p) noexcept { return p == Policy::Postselect ? "postselect" : "track-both"; }
const char* to_string(Syndrome s) noexcept { return s == Syndrome::In ? "in" : "out"; }

void ZenoConfig::validate() const {
    if (!(t_total > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_total must be > 0");
    if (n_tests < 1) throw Error(ErrorCode::InvalidArgument, "n_tests must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1)");
}

QuantumState first_order_step(const QuantumState& state, const ComplexMatrix& h, double dt) {
    if (!state.is_pure()) throw Error(ErrorCode::InvalidArgument, "first_order_step needs a pure state");
    if (h.rows() != state.dimension() || !h.is_square())
        throw Error(ErrorCode::DimensionMismatch, "hamiltonian does not match the state dimension");
    auto out = state.data();
    out -= (h * state.data()) * cplx{0.0, dt};
    return QuantumState::unchecked(state.layout(), StateForm::Pure, std::move(out));
}

namespace {

std::vector<std::size_t> code_positions(const SubsystemLayout& layout, std::size_t n_code_qubits) {
    std::vector<std::size_t> pos;
    for (std::size_t l = 0; l < n_code_qubits; ++l) pos.push_back(layout.position(noise::qubit_label(l)));
    return pos;
}

ComplexMatrix basis_vector(const circuits::GateSet& gates, std::size_t m) {
    return ComplexMatrix::column({gates.basis(0, m), gates.basis(1, m)});
}

// <m|_anc on the trailing ancilla qubit.
ComplexMatrix project_out_ancilla(const ComplexMatrix& data, StateForm form, const ComplexMatrix& e) {
    const std::size_t d = data.rows() / 2;
    const cplx e0 = std::conj(e(0, 0)), e1 = std::conj(e(1, 0));
    if (form == StateForm::Pure) {
        ComplexMatrix out(d, 1);
        for (std::size_t i = 0; i < d; ++i) out(i, 0) = e0 * data(2 * i, 0) + e1 * data(2 * i + 1, 0);
        return out;
    }
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const cplx r0 = e0 * data(2 * i, 2 * j) + e1 * data(2 * i + 1, 2 * j);
            const cplx r1 = e0 * data(2 * i, 2 * j + 1) + e1 * data(2 * i + 1, 2 * j + 1);
            out(i, j) = r0 * std::conj(e0) + r1 * std::conj(e1);
        }
    return out;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

SyndromeBranches measure_syndrome(const QuantumState& state, const circuits::GateSet& gates,
                                  const circuits::Codespace& code) {
    const auto& layout = state.layout();
    const auto qubits = code_positions(layout, code.n_qubits);
    const auto extended = layout.appended(kAncillaLabel, 2);
    const std::size_t anc = extended.size() - 1;

    const auto ket0 = basis_vector(gates, 0);
    ComplexMatrix data = state.is_pure() ? linalg::kron(state.data(), ket0)
                                         : linalg::kron(state.data(), linalg::multiply_adjoint(ket0, ket0));
    for (auto q : qubits) {
        const std::size_t targets[] = {q, anc};
        if (state.is_pure())
            linalg::apply_local(data, gates.cnot_computation, extended, targets);
        else
            linalg::conjugate_local(data, gates.cnot_computation, extended, targets);
    }

    const std::size_t in_outcome = code.half() % 2;
    auto in = QuantumState::unchecked(layout, state.form(),
                                      project_out_ancilla(data, state.form(), basis_vector(gates, in_outcome)));
    auto out = QuantumState::unchecked(
        layout, state.form(), project_out_ancilla(data, state.form(), basis_vector(gates, 1 - in_outcome)));
    const double p_out = safe_ratio(out.weight(), state.weight());
    return {std::move(in), std::move(out), p_out};
}

SyndromeResult syndrome_test(const QuantumState& state, const circuits::GateSet& gates,
                             const circuits::Codespace& code, SplitMix64& rng) {
    auto branches = measure_syndrome(state, gates, code);
    const bool out = rng.uniform() < branches.p_out;
    auto& chosen = out ? branches.out : branches.in;
    const double w = chosen.weight();
    auto data = chosen.data();
    if (w > 0.0) data *= cplx{chosen.is_pure() ? 1.0 / std::sqrt(w) : 1.0 / w};
    return {out ? Syndrome::Out : Syndrome::In,
            QuantumState::unchecked(chosen.layout(), chosen.form(), std::move(data)), branches.p_out};
}

QuantumState inject_test_noise(const QuantumState& state, double gamma, const circuits::GateSet& gates,
                               std::size_t n_code_qubits, SplitMix64* rng) {
    if (!(gamma >= 0.0 && gamma < 1.0 + 1e-15))
        throw Error(ErrorCode::InvalidArgument, "gamma must lie in [0, 1]");
    const auto qubits = code_positions(state.layout(), n_code_qubits);
    if (rng != nullptr) {
        if (rng->uniform() >= gamma) return state;
        const std::size_t target[] = {qubits[rng->below(qubits.size())]};
        const auto& pauli = gates.pauli_computation[rng->below(3)];
        auto data = state.data();
        if (state.is_pure())
            linalg::apply_local(data, pauli, state.layout(), target);
        else
            linalg::conjugate_local(data, pauli, state.layout(), target);
        return QuantumState::unchecked(state.layout(), state.form(), std::move(data));
    }
    const auto rho = state.to_density();
    if (gamma == 0.0) return rho;
    ComplexMatrix mixed = rho.data() * cplx{1.0 - gamma};
    const cplx w = gamma / (3.0 * static_cast<double>(qubits.size()));
    for (auto q : qubits)
        for (const auto& pauli : gates.pauli_computation) {
            auto kicked = rho.data();
            const std::size_t target[] = {q};
            linalg::conjugate_local(kicked, pauli, rho.layout(), target);
            mixed += kicked * w;
        }
    return QuantumState::unchecked(rho.layout(), StateForm::Density, std::move(mixed));
}

ProtocolSetup ProtocolSetup::make(const noise::DissipationSpec& spec, const noise::BathDiscretization& bath,
                                  const noise::DriveSpec& drive, cplx c_plus, cplx c_minus) {
    return {spec, bath, drive, circuits::build_gates(spec), circuits::codespace(2), c_plus, c_minus};
}

namespace {

// Fidelity of the code-qubit reduction with the encoded target, divided by `norm`.
double code_fidelity(const ComplexMatrix& rho, const SubsystemLayout& layout, const QuantumState& target,
                     double norm) {
    if (norm <= 0.0) return 0.0;
    auto state = QuantumState::unchecked(layout, StateForm::Density, rho * cplx{1.0 / norm});
    const auto reduced = linalg::partial_trace(state, {noise::qubit_label(0), noise::qubit_label(1)});
    return linalg::fidelity(reduced, target);
}

circuits::Decoded decode_code(const ComplexMatrix& rho, const SubsystemLayout& layout,
                              const circuits::GateSet& gates, double norm) {
    if (norm <= 0.0) return {0.0, 0.0, 1.0};
    auto state = QuantumState::unchecked(layout, StateForm::Density, rho * cplx{1.0 / norm});
    return circuits::decode(linalg::partial_trace(state, {noise::qubit_label(0), noise::qubit_label(1)}), gates);
}

}  // namespace

ZenoRunReport run_protocol(const noise::DissipationSpec& spec, const noise::BathDiscretization& bath,
                           const noise::DriveSpec& drive, const circuits::GateSet& gates,
                           const circuits::Codespace& code, cplx c_plus, cplx c_minus,
                           const ZenoConfig& config) {
    config.validate();
    if (code.n_qubits != 2 || bath.n_code_qubits != 2)
        throw Error(ErrorCode::InvalidArgument, "the protocol runs the two-qubit code");

    const auto system = noise::build_hamiltonian(spec, bath, drive, 2);
    const auto u = linalg::propagator(linalg::eig_hermitian(system.h), config.dt());
    const auto target = circuits::encode(c_plus, c_minus, gates);
    const auto bath_state = noise::thermal_bath_state(bath);
    const auto& layout = system.layout;

    ZenoRunReport report;
    const double n = static_cast<double>(config.n_tests);
    report.delta_discrete = analytics::delta_discrete(bath, spec, c_plus, c_minus, config.t_total);
    report.estimated_p_tot = analytics::p_tot(report.delta_discrete, config.gamma, n);

    ComplexMatrix rho_in = linalg::kron(target.to_density().data(), bath_state.data());
    ComplexMatrix rho_out(rho_in.rows(), rho_in.cols());
    bool out_active = false;
    double survive = 1.0;
    SplitMix64 rng(config.seed);

    auto as_state = [&](const ComplexMatrix& m) { return QuantumState::unchecked(layout, StateForm::Density, m); };

    for (std::size_t step = 1; step <= config.n_tests; ++step) {
        StepRecord rec;
        rec.step = step;

        rho_in = linalg::conjugate(u, rho_in);
        if (config.sampling) {
            rho_in = inject_test_noise(as_state(rho_in), config.gamma, gates, 2, &rng).data();
            const auto result = syndrome_test(as_state(rho_in), gates, code, rng);
            rho_in = result.projected.data();
            rec.leak_probability = result.p_out;
            rec.syndrome = result.outcome;
            if (result.outcome == Syndrome::Out && config.policy == Policy::Postselect) report.accepted = false;
            rec.post_fidelity = code_fidelity(rho_in, layout, target, 1.0);
        } else {
            if (config.gamma > 0.0) rho_in = inject_test_noise(as_state(rho_in), config.gamma, gates, 2).data();
            const double w_in = as_state(rho_in).weight();
            auto split = measure_syndrome(as_state(rho_in), gates, code);
            rec.leak_probability = split.p_out;
            rec.syndrome = split.p_out > 0.5 ? Syndrome::Out : Syndrome::In;
            rho_in = split.in.data();
            if (config.policy == Policy::TrackBoth) {
                if (out_active) {
                    rho_out = linalg::conjugate(u, rho_out);
                    if (config.gamma > 0.0)
                        rho_out = inject_test_noise(as_state(rho_out), config.gamma, gates, 2).data();
                    auto back = measure_syndrome(as_state(rho_out), gates, code);
                    rho_out = back.in.data() + back.out.data();
                }
                if (split.out.weight() > 0.0 || out_active) {
                    rho_out += split.out.data();
                    out_active = true;
                }
                rec.post_fidelity = code_fidelity(rho_in + rho_out, layout, target, 1.0);
            } else {
                const double w = as_state(rho_in).weight();
                if (!(w > 0.0)) report.accepted = false;
                rec.post_fidelity = code_fidelity(rho_in, layout, target, w);
            }
            (void)w_in;
        }
        survive *= 1.0 - rec.leak_probability;
        report.mean_leak_probability += rec.leak_probability;
        report.per_step.push_back(rec);
    }

    report.mean_leak_probability /= n;
    report.total_out_probability = 1.0 - survive;
    report.final_fidelity = report.per_step.back().post_fidelity;
    if (config.sampling && !report.accepted) report.final_fidelity = 0.0;

    if (config.policy == Policy::TrackBoth && !config.sampling) {
        report.decoded = decode_code(rho_in + rho_out, layout, gates, 1.0);
    } else {
        report.decoded = decode_code(rho_in, layout, gates, as_state(rho_in).weight());
    }
    return report;
}

ZenoRunReport run_protocol(const ProtocolSetup& setup, const ZenoConfig& config) {
    return run_protocol(setup.spec, setup.bath, setup.drive, setup.gates, setup.code, setup.c_plus,
                        setup.c_minus, config);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double md = static_cast<double>(m);
    return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

ScalingResult zeno_scaling_experiment(const ProtocolSetup& setup, const ZenoConfig& base,
                                      const std::vector<std::size_t>& n_values) {
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1]) throw Error(ErrorCode::InvalidArgument, "n_values must ascend");
    ScalingResult result;
    std::vector<double> xs, ys;
    double worst = 0.0;
    for (auto n : n_values) {
        auto config = base;
        config.n_tests = n;
        config.policy = Policy::TrackBoth;
        config.sampling = false;
        const auto report = run_protocol(setup, config);
        const double loss = std::max(0.0, 1.0 - report.final_fidelity);
        result.rows.push_back({n, loss, report.total_out_probability});
        xs.push_back(static_cast<double>(n));
        ys.push_back(loss);
        worst = std::max(worst, loss);
    }
    result.no_decay = worst < 1e-12;
    result.slope = result.no_decay ? std::numeric_limits<double>::quiet_NaN() : loglog_slope(xs, ys);
    return result;
}

std::optional<std::size_t> interior_minimum(const ScalingResult& result) {
    if (result.rows.size() < 3) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        if (result.rows[i].one_minus_fidelity < result.rows[best].one_minus_fidelity) best = i;
    if (best == 0 || best + 1 == result.rows.size()) return std::nullopt;
    return best;
}

}  // namespace zenoguard::zeno
