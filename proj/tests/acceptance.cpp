// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "support.hpp"
#include "zenoguard/analytics.hpp"
#include "zenoguard/circuits.hpp"
#include "zenoguard/noise.hpp"
#include "zenoguard/zeno.hpp"

using namespace zenoguard;
using namespace testing_support;
using linalg::kron;
using linalg::QuantumState;

#ifndef ZENOGUARD_EXE
#error "ZENOGUARD_EXE must name the zenoguard executable"
#endif
#ifndef ZENOGUARD_SOURCE_DIR
#error "ZENOGUARD_SOURCE_DIR must point at the repository root"
#endif

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << what << "  [" << detail << "]"
              << std::endl;
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

noise::DissipationSpec flat_spec(double g0, noise::BathSharing sharing = noise::BathSharing::independent()) {
    noise::DissipationSpec spec;
    spec.lambda = {1.0, 0.0, 0.0};
    spec.spectral = noise::SpectralDensity::flat(g0, 1.0);
    spec.sharing = sharing;
    return spec;
}

// 2 code qubits, one bath mode per qubit, T = 0, lambda = (1,0,0), delta_discrete = 0.05 at scale 1.
zeno::ProtocolSetup scaling_setup(double scale = 1.0) {
    const auto spec = flat_spec(scale * std::sqrt(0.025));
    return zeno::ProtocolSetup::make(spec, noise::discretize_bath(spec, 1, 2), noise::DriveSpec::matched(spec), 1.0,
                                     0.0);
}

zeno::ZenoConfig base_config(double gamma = 0.0) {
    zeno::ZenoConfig c;
    c.t_total = 1.0;
    c.gamma = gamma;
    c.policy = zeno::Policy::TrackBoth;
    return c;
}

void criterion1() {
    const auto start = std::chrono::steady_clock::now();
    const auto result = zeno::zeno_scaling_experiment(scaling_setup(), base_config(), {4, 8, 16, 32, 64, 128});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = !result.no_decay && result.slope >= -1.15 && result.slope <= -0.85 && secs < 60.0;
    report(1, ok, "Zeno scaling slope in [-1.15, -0.85], under 60 s", fmt("slope %.4f, %.2f s", result.slope, secs));
}

void criterion2() {
    auto ratio_at = [](double scale) {
        auto config = base_config();
        config.n_tests = 64;
        const auto r = zeno::run_protocol(scaling_setup(scale), config);
        return r.mean_leak_probability * 64.0 * 64.0 / r.delta_discrete;
    };
    const double full = ratio_at(1.0), half = ratio_at(0.5);
    const bool ok = std::abs(full - 1.0) < 0.10 && std::abs(half - 1.0) < 0.05;
    report(2, ok, "leak * N^2 / delta_discrete at N = 64 within 10%, within 5% at half coupling",
           fmt("%.5f, %.5f", full, half));
}

noise::SpectralDensity random_shape() {
    switch (static_cast<int>(uniform(0.0, 3.0))) {
        case 0: return noise::SpectralDensity::flat(uniform(0.01, 0.5), uniform(0.2, 3.0));
        case 1: return noise::SpectralDensity::ohmic(uniform(0.001, 0.2), uniform(0.2, 3.0));
        default: {
            std::vector<std::pair<double, double>> pts;
            double w = uniform(0.0, 0.3);
            for (int i = 0; i < 5; ++i) {
                pts.emplace_back(w, uniform(0.0, 0.1));
                w += uniform(0.1, 1.0);
            }
            pts.front().second = 0.0;
            return noise::SpectralDensity::tabulated(pts);
        }
    }
}

noise::BathSharing random_sharing() {
    switch (static_cast<int>(uniform(0.0, 3.0))) {
        case 0: return noise::BathSharing::independent();
        case 1: return noise::BathSharing::collective();
        default: return noise::BathSharing::partial(uniform());
    }
}

void criterion3() {
    const int instances = 10000;
    int violations = 0;
    double worst = -1e300;
    for (int i = 0; i < instances; ++i) {
        const auto amps = random_unit_vector(2);
        const cplx cp = amps(0, 0), cm = amps(1, 0);
        const double temp = uniform() < 0.3 ? 0.0 : uniform(0.01, 2.0);
        const double t0 = uniform(0.1, 2.0);

        // continuum spectrum
        noise::DissipationSpec spec;
        spec.lambda = random_direction();
        spec.spectral = random_shape();
        spec.sharing = random_sharing();
        spec.temperature = temp;
        const auto c = analytics::delta_continuum_breakdown(spec, cp, cm, t0);

        // arbitrary complex couplings on discrete modes
        noise::BathDiscretization bath;
        bath.temperature = temp;
        const int n = 1 + static_cast<int>(uniform(0.0, 4.0));
        for (int k = 0; k < n; ++k)
            bath.modes.push_back({uniform(0.05, 3.0), {gaussian_c() * 0.1, gaussian_c() * 0.1}, uniform() < 0.7});
        const auto d = analytics::delta_discrete_breakdown(bath, cp, cm, t0);

        for (const auto& b : {c, d}) {
            worst = std::max(worst, b.delta - b.bound);
            if (!(b.delta <= b.bound + 1e-9)) ++violations;
        }
    }
    report(3, violations == 0, "delta <= bound + 1e-9 on 10^4 random instances",
           fmt("%.0f violations, max(delta - bound) = %.3g", violations, worst));
}

void criterion4() {
    int misses = 0;
    for (int i = 0; i < 100; ++i) {
        const double delta = std::exp(uniform(std::log(1e-3), std::log(1.0)));
        const double gamma = delta * std::exp(uniform(std::log(1e-6), std::log(0.1)));
        const double n_opt = std::sqrt(delta / gamma);
        std::size_t best = 1;
        for (std::size_t n = 2; n <= static_cast<std::size_t>(std::ceil(10.0 * n_opt)); ++n)
            if (analytics::p_tot(delta, gamma, double(n)) < analytics::p_tot(delta, gamma, double(best))) best = n;
        if (std::abs(double(best) - std::round(n_opt)) > 1.0) ++misses;
    }

    const double gamma = 1e-4;
    const auto setup = scaling_setup();
    const auto result = zeno::zeno_scaling_experiment(setup, base_config(gamma), {4, 8, 16, 32, 64, 128, 256});
    auto probe = base_config();
    probe.n_tests = 4;
    const double predicted = std::sqrt(zeno::run_protocol(setup, probe).delta_discrete / gamma);
    const auto idx = zeno::interior_minimum(result);
    const double found = idx ? double(result.rows[*idx].n) : 0.0;
    const bool sim_ok = idx && found <= 2.0 * predicted && found >= 0.5 * predicted;
    report(4, misses == 0 && sim_ok,
           "integer minimizer within 1 of round(sqrt(delta/gamma)); simulated interior minimum within 2x",
           fmt("%.0f scan misses; simulated minimum N = %.0f vs %.2f", misses, found, predicted));
}

void criterion5() {
    const std::size_t expected[] = {2, 6, 20, 70, 252, 924};
    bool dims = true;
    for (std::size_t i = 0; i < 6; ++i) dims = dims && circuits::codespace(2 * (i + 1)).dimension() == expected[i];
    const bool half = circuits::efficiency(1).exact == 0.5;
    bool decreasing = true;
    double prev = 1e300;
    for (std::size_t L : {8u, 16u, 32u, 64u}) {
        const auto e = circuits::efficiency(L);
        const double gap = std::abs(e.exact - e.asymptotic);
        decreasing = decreasing && gap < prev;
        prev = gap;
    }
    report(5, dims && half && decreasing, "codespace dimensions, efficiency(1) = 1/2, shrinking asymptotic gap",
           std::string(dims ? "dims ok" : "dims wrong") + ", eta(1) = " + fmt("%.17g", circuits::efficiency(1).exact) +
               (decreasing ? ", gap decreasing" : ", gap not decreasing"));
}

void criterion6() {
    double composite = 0.0;
    for (int i = 0; i < 100; ++i) {
        noise::DissipationSpec spec;
        spec.lambda = random_direction();
        const auto g = circuits::build_gates(spec);
        const auto rr = kron(g.rotation, g.rotation);
        const auto hh = kron(g.hadamard, g.hadamard);
        const auto c = naive_product(naive_product(naive_product(naive_product(rr, hh), g.cnot_physical), hh),
                                     rr.adjoint());
        composite = std::max(composite, max_diff(c, g.cnot_computation));
    }

    // full unitary at lambda = (1,0,0); in-plane directions on the encoder's input domain
    const auto amp = circuits::build_gates(flat_spec(0.1));
    double reduction = linalg::phase_aligned_diff(amp.encoder, amp.cnot_physical);
    ComplexMatrix domain(4, 2);
    domain(0, 0) = 1.0;
    domain(2, 1) = 1.0;
    for (int i = 0; i < 100; ++i) {
        noise::DissipationSpec spec;
        const double phi = uniform(0.0, 2.0 * M_PI);
        spec.lambda = {std::cos(phi), std::sin(phi), 0.0};
        const auto g = circuits::build_gates(spec);
        reduction = std::max(reduction, linalg::phase_aligned_diff(g.encoder * domain, g.cnot_physical * domain));
    }
    report(6, composite < 1e-12 && reduction < 1e-10,
           "C' composite residual < 1e-12; encoder equals CNOT up to phase when lambda3 = 0",
           fmt("composite %.3g, reduction %.3g", composite, reduction));
}

void criterion7() {
    double amp_err = 0.0, leak = 0.0;
    for (int i = 0; i < 1000; ++i) {
        noise::DissipationSpec spec;
        spec.lambda = random_direction();
        const auto g = circuits::build_gates(spec);
        const auto psi = random_unit_vector(2);
        const auto d = circuits::decode(circuits::encode(psi(0, 0), psi(1, 0), g), g);
        amp_err = std::max(amp_err, linalg::phase_aligned_diff(ComplexMatrix::column({d.c_plus, d.c_minus}), psi));
        leak = std::max(leak, d.leakage);
    }
    report(7, amp_err < 1e-9 && leak < 1e-9, "decode(encode(psi)) recovers psi with no leakage",
           fmt("amplitude error %.3g, leakage %.3g", amp_err, leak));
}

// Fidelity of the code qubits with the encoded state after evolving for t.
double frozen_fidelity(const noise::DissipationSpec& spec, const noise::DriveSpec& drive, cplx cp, cplx cm, double t) {
    const auto bath = noise::discretize_bath(spec, 1, 2).scaled(0.0);
    const auto sys = noise::build_hamiltonian(spec, bath, drive, 2);
    const auto gates = circuits::build_gates(spec);
    const auto enc = circuits::encode(cp, cm, gates);
    ComplexMatrix vacuum(sys.h.rows() / 4, 1);
    vacuum(0, 0) = 1.0;
    const auto evolved = linalg::propagator(sys.h, t) * kron(enc.data(), vacuum);
    const auto state = QuantumState::pure(sys.layout, evolved);
    return linalg::fidelity(linalg::partial_trace(state, {noise::qubit_label(0), noise::qubit_label(1)}), enc);
}

void criterion8() {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        noise::DissipationSpec spec;
        spec.lambda = random_direction();
        spec.omega0 = uniform(0.5, 2.0);
        const auto psi = random_unit_vector(2);
        const double f = frozen_fidelity(spec, noise::DriveSpec::matched(spec), psi(0, 0), psi(1, 0),
                                         10.0 / spec.omega0);
        worst = std::max(worst, std::abs(1.0 - f));
    }
    noise::DissipationSpec dephasing;
    dephasing.lambda = {0.0, 0.0, 1.0};
    const double undriven = frozen_fidelity(dephasing, noise::DriveSpec::off(), 1.0, 0.0, 10.0);
    report(8, worst < 1e-9 && undriven < 0.999,
           "drive freezes encoded states (|1 - F| < 1e-9); without drive F < 0.999",
           fmt("max |1 - F| %.3g, undriven F %.6f", worst, undriven));
}

void criterion9() {
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < 50; ++i) {
        noise::DissipationSpec spec;
        spec.lambda = random_direction();
        spec.spectral = noise::SpectralDensity::flat(uniform(0.02, 0.2), uniform(0.5, 2.0));
        spec.sharing = random_sharing();
        const auto bath = noise::discretize_bath(spec, 1, 2);
        const auto sys = noise::build_hamiltonian(spec, bath, noise::DriveSpec::matched(spec), 2);
        const auto gates = circuits::build_gates(spec);
        const auto psi = random_unit_vector(2);
        const auto enc = circuits::encode(psi(0, 0), psi(1, 0), gates);
        ComplexMatrix vacuum(sys.h.rows() / 4, 1);
        vacuum(0, 0) = 1.0;
        const auto state = QuantumState::pure(sys.layout, kron(enc.data(), vacuum));
        const auto eig = linalg::eig_hermitian(sys.h);
        auto err = [&](double dt) {
            const auto diff = zeno::first_order_step(state, sys.h, dt).data() - linalg::propagator(eig, dt) * state.data();
            double s = 0.0;
            for (std::size_t r = 0; r < diff.rows(); ++r) s += std::norm(diff(r, 0));
            return std::sqrt(s);
        };
        const double dt = uniform(0.01, 0.05);
        const double ratio = err(dt) / err(dt / 2.0);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    report(9, lo >= 3.0 && hi <= 5.0, "first-order step error ratio under dt halving in [3, 5]",
           fmt("ratios in [%.4f, %.4f]", lo, hi));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion10() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / ("zenoguard_acceptance_" + std::to_string(rng()()));
    fs::create_directories(dir);
    const std::string cfg = std::string(ZENOGUARD_SOURCE_DIR) + "/configs/sampled_sweep.json";
    auto sweep = [&](int threads) {
        const auto out = dir / ("threads" + std::to_string(threads) + ".csv");
        const std::string cmd = "ZENOGUARD_THREADS=" + std::to_string(threads) + " '" + ZENOGUARD_EXE + "' sweep '" +
                                cfg + "' > '" + out.string() + "' 2> /dev/null";
        const int rc = std::system(cmd.c_str());
        return std::make_pair(rc, slurp(out));
    };
    const auto [rc1, one] = sweep(1);
    const auto [rc8, eight] = sweep(8);
    fs::remove_all(dir);
    const bool ok = rc1 == 0 && rc8 == 0 && !one.empty() && one == eight;
    report(10, ok, "sampled sweep CSV byte-identical with ZENOGUARD_THREADS = 1 and 8",
           fmt("%.0f bytes vs %.0f bytes", double(one.size()), double(eight.size())) +
               (one == eight ? ", identical" : ", different"));
}

}  // namespace

int main() {
    const std::function<void()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9, criterion10};
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, "threw", e.what());
        }
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
