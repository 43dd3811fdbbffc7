#include "zenoguard/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "zenoguard/errors.hpp"
#include "zenoguard/quadrature.hpp"

namespace zenoguard::noise {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

}  // namespace

SpectralDensity::SpectralDensity(Kind kind, double a, double b,
                                 std::vector<std::pair<double, double>> points)
    : kind_(kind), a_(a), b_(b), points_(std::move(points)) {}

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c) {
    require(alpha >= 0.0 && omega_c > 0.0, ErrorCode::InvalidArgument,
            "ohmic spectral density needs alpha >= 0 and omega_c > 0");
    return SpectralDensity(Kind::Ohmic, alpha, omega_c, {});
}

SpectralDensity SpectralDensity::flat(double g0, double omega_max) {
    require(omega_max > 0.0, ErrorCode::InvalidArgument, "flat spectral density needs omega_max > 0");
    return SpectralDensity(Kind::Flat, g0, omega_max, {});
}

SpectralDensity SpectralDensity::tabulated(std::vector<std::pair<double, double>> points) {
    require(points.size() >= 2, ErrorCode::InvalidArgument, "tabulated spectral density needs >= 2 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        require(points[i].first >= 0.0, ErrorCode::InvalidArgument, "tabulated omega must be >= 0");
        require(points[i].second >= 0.0, ErrorCode::InvalidArgument, "tabulated |g|^2 must be >= 0");
        if (i > 0)
            require(points[i].first > points[i - 1].first, ErrorCode::InvalidArgument,
                    "tabulated omega must be strictly increasing");
    }
    return SpectralDensity(Kind::Tabulated, 0.0, 0.0, std::move(points));
}

SpectralDensity SpectralDensity::atomic(std::vector<std::pair<double, double>> spikes) {
    require(!spikes.empty(), ErrorCode::InvalidArgument, "atomic spectral density needs >= 1 spike");
    for (const auto& [omega, weight] : spikes) {
        require(omega > 0.0, ErrorCode::InvalidArgument, "atomic spike frequency must be > 0");
        require(weight >= 0.0, ErrorCode::InvalidArgument, "atomic spike weight must be >= 0");
    }
    return SpectralDensity(Kind::Atomic, 0.0, 0.0, std::move(spikes));
}

double SpectralDensity::operator()(double omega) const {
    if (omega < 0.0) return 0.0;
    switch (kind_) {
        case Kind::Ohmic: return a_ * omega * std::exp(-omega / b_);
        case Kind::Flat: return omega <= b_ ? a_ * a_ : 0.0;
        case Kind::Tabulated: {
            if (omega < points_.front().first || omega > points_.back().first) return 0.0;
            const auto it = std::upper_bound(points_.begin(), points_.end(), omega,
                                             [](double w, const auto& p) { return w < p.first; });
            if (it == points_.end()) return points_.back().second;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double t = (omega - lo.first) / (hi.first - lo.first);
            return lo.second + t * (hi.second - lo.second);
        }
        case Kind::Atomic: return 0.0;
    }
    return 0.0;
}

std::pair<double, double> SpectralDensity::support() const {
    switch (kind_) {
        case Kind::Ohmic: return {0.0, kOhmicSupport * b_};
        case Kind::Flat: return {0.0, b_};
        case Kind::Tabulated:
        case Kind::Atomic: return {points_.front().first, points_.back().first};
    }
    return {0.0, 0.0};
}

double SpectralDensity::integration_upper() const {
    return kind_ == Kind::Ohmic ? 60.0 * b_ : support().second;
}

bool SpectralDensity::vanishes_at_zero() const {
    switch (kind_) {
        case Kind::Ohmic: return true;
        case Kind::Flat: return a_ == 0.0;
        case Kind::Tabulated: return points_.front().first > 0.0 || points_.front().second == 0.0;
        case Kind::Atomic: return true;
    }
    return true;
}

SpectralDensity SpectralDensity::scaled(double factor) const {
    auto out = *this;
    switch (kind_) {
        case Kind::Ohmic: out.a_ *= factor; break;
        case Kind::Flat: out.a_ *= std::sqrt(factor); break;
        case Kind::Tabulated:
        case Kind::Atomic:
            for (auto& p : out.points_) p.second *= factor;
            break;
    }
    return out;
}

SpectralDensity parse_spectral_table(std::istream& in, const std::string& origin) {
    std::vector<std::pair<double, double>> points;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        fields.imbue(std::locale::classic());
        double omega = 0.0, g2 = 0.0;
        if (!(fields >> omega)) continue;  // blank or comment-only line
        std::string extra;
        if (!(fields >> g2) || (fields >> extra))
            throw Error(ErrorCode::ConfigError,
                        origin + ":" + std::to_string(lineno) + ": expected two columns (omega |g|^2)");
        points.emplace_back(omega, g2);
    }
    try {
        return SpectralDensity::tabulated(std::move(points));
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, origin + ": " + e.what());
    }
}

SpectralDensity load_spectral_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open spectral table " + path);
    return parse_spectral_table(in, path);
}

std::size_t BathSharing::shared_count(std::size_t n) const {
    switch (kind) {
        case Kind::Independent: return 0;
        case Kind::Collective: return n;
        case Kind::Partial:
            return std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-12)));
    }
    return 0;
}

void DissipationSpec::validate() const {
    const double norm = std::sqrt(lambda[0] * lambda[0] + lambda[1] * lambda[1] + lambda[2] * lambda[2]);
    require(std::abs(norm - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
            "lambda must be a unit vector (|lambda| = " + std::to_string(norm) + ")");
    require(temperature >= 0.0, ErrorCode::InvalidArgument, "temperature must be >= 0");
    require(std::isfinite(omega0), ErrorCode::InvalidArgument, "omega0 must be finite");
    if (sharing.kind == BathSharing::Kind::Partial)
        require(sharing.fraction >= 0.0 && sharing.fraction <= 1.0, ErrorCode::InvalidArgument,
                "shared fraction must lie in [0, 1]");
}

BathDiscretization BathDiscretization::scaled(double factor) const {
    auto out = *this;
    for (auto& m : out.modes)
        for (auto& g : m.couplings) g *= factor;
    return out;
}

double bose_occupation(double omega, double temperature) {
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

double thermal_factor(double omega, double temperature) {
    if (temperature <= 0.0) return 1.0;
    return 1.0 / std::tanh(omega / (2.0 * temperature));
}

std::string qubit_label(std::size_t l) { return "q" + std::to_string(l + 1); }
std::string mode_label(std::size_t k) { return "mode" + std::to_string(k); }

ComplexMatrix qubit_operator(const DissipationSpec& spec) {
    spec.validate();
    const auto& l = spec.lambda;
    return linalg::ops::sigma_x() * cplx{l[0]} + linalg::ops::sigma_y() * cplx{l[1]} +
           linalg::ops::sigma_z() * cplx{l[2]};
}

BathDiscretization discretize_bath(const DissipationSpec& spec, std::size_t n_modes,
                                   std::size_t fock_cutoff, std::size_t n_code_qubits) {
    spec.validate();
    require(n_modes >= 1, ErrorCode::InvalidArgument, "n_modes must be >= 1");
    require(fock_cutoff >= 1, ErrorCode::InvalidArgument, "fock_cutoff must be >= 1");
    require(n_code_qubits >= 1, ErrorCode::InvalidArgument, "need at least one code qubit");

    std::vector<double> omegas, g_abs;
    if (spec.spectral.kind() == SpectralDensity::Kind::Atomic) {
        for (const auto& [omega, weight] : spec.spectral.points()) {
            omegas.push_back(omega);
            g_abs.push_back(std::sqrt(weight));
        }
    } else {
        const auto [lo, hi] = spec.spectral.support();
        const auto rule = quadrature::gauss_legendre(static_cast<int>(n_modes), lo, hi);
        for (std::size_t k = 0; k < n_modes; ++k) {
            omegas.push_back(rule.nodes[k]);
            g_abs.push_back(std::sqrt(spec.spectral(rule.nodes[k]) * rule.weights[k]));
        }
    }
    const std::size_t n_nodes = omegas.size();
    const std::size_t n_shared = spec.sharing.shared_count(n_nodes);

    BathDiscretization bath;
    bath.fock_cutoff = fock_cutoff;
    bath.temperature = spec.temperature;
    bath.n_code_qubits = n_code_qubits;
    for (std::size_t k = 0; k < n_shared; ++k)
        bath.modes.push_back({omegas[k], std::vector<cplx>(n_code_qubits, g_abs[k]), true});
    for (std::size_t l = 0; l < n_code_qubits; ++l)
        for (std::size_t k = n_shared; k < n_nodes; ++k) {
            std::vector<cplx> g(n_code_qubits, 0.0);
            g[l] = g_abs[k];
            bath.modes.push_back({omegas[k], std::move(g), false});
        }

    double hottest_tail = 0.0;
    for (const auto& mode : bath.modes) {
        require(mode.omega > 0.0, ErrorCode::InvalidArgument, "bath mode frequency must be > 0");
        bath.nbar.push_back(bose_occupation(mode.omega, spec.temperature));
        if (spec.temperature > 0.0)
            hottest_tail = std::max(hottest_tail, std::exp(-mode.omega * static_cast<double>(fock_cutoff + 1) /
                                                           spec.temperature));
    }
    if (hottest_tail > kMaxTruncatedMass)
        throw Error(ErrorCode::CutoffTooSmall,
                    "Gibbs mass above n_max = " + std::to_string(fock_cutoff) + " is " +
                        std::to_string(hottest_tail) + " (> 1e-3); raise fock_cutoff");
    return bath;
}

SystemHamiltonian build_hamiltonian(const DissipationSpec& spec, const BathDiscretization& bath,
                                    const DriveSpec& drive, std::size_t n_code_qubits) {
    spec.validate();
    require(n_code_qubits >= 2 && n_code_qubits % 2 == 0, ErrorCode::InvalidArgument,
            "n_code_qubits must be even and >= 2");
    require(bath.n_code_qubits == n_code_qubits, ErrorCode::DimensionMismatch,
            "bath was discretized for " + std::to_string(bath.n_code_qubits) + " code qubits");
    if (drive.enabled)
        require(std::abs(drive.coefficient - spec.omega0) <= 1e-12, ErrorCode::InvalidArgument,
                "enabled drive coefficient must equal omega0");

    std::vector<std::size_t> dims(n_code_qubits, 2);
    std::vector<std::string> labels;
    for (std::size_t l = 0; l < n_code_qubits; ++l) labels.push_back(qubit_label(l));
    double total = std::pow(2.0, static_cast<double>(n_code_qubits));
    for (std::size_t k = 0; k < bath.modes.size(); ++k) {
        dims.push_back(bath.mode_dimension());
        labels.push_back(mode_label(k));
        total *= static_cast<double>(bath.mode_dimension());
    }
    if (total > static_cast<double>(kMaxDimension))
        throw Error(ErrorCode::DimensionOverflow,
                    "system + bath dimension " + std::to_string(static_cast<long long>(total)) +
                        " exceeds " + std::to_string(kMaxDimension));
    SubsystemLayout layout(std::move(dims), std::move(labels));
    const std::size_t d = layout.total_dimension();

    ComplexMatrix h(d, d);
    const double zeeman = spec.omega0 - (drive.enabled ? drive.coefficient : 0.0);
    const auto sz = linalg::ops::sigma_z();
    const auto a_op = qubit_operator(spec);
    const auto a = linalg::ops::annihilation(bath.mode_dimension());
    const auto number = a.adjoint() * a;

    for (std::size_t l = 0; l < n_code_qubits; ++l) {
        if (zeeman == 0.0) break;
        const std::size_t t[] = {l};
        h += linalg::embed(sz, layout, t) * cplx{zeeman};
    }
    for (std::size_t k = 0; k < bath.modes.size(); ++k) {
        const auto& mode = bath.modes[k];
        const std::size_t pos = n_code_qubits + k;
        const std::size_t t[] = {pos};
        h += linalg::embed(number, layout, t) * cplx{mode.omega};
        for (std::size_t l = 0; l < n_code_qubits; ++l) {
            const cplx g = mode.couplings.at(l);
            if (g == cplx{0.0}) continue;
            const auto field = a.adjoint() * g + a * std::conj(g);
            const std::size_t pair[] = {l, pos};
            h += linalg::embed(linalg::kron(a_op, field), layout, pair);
        }
    }
    return {std::move(h), std::move(layout)};
}

QuantumState thermal_bath_state(const BathDiscretization& bath) {
    const std::size_t dim = bath.mode_dimension();
    ComplexMatrix rho = ComplexMatrix::identity(1);
    std::vector<std::size_t> dims;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < bath.modes.size(); ++k) {
        std::vector<double> weights(dim, 0.0);
        if (bath.temperature <= 0.0) {
            weights[0] = 1.0;
        } else {
            double z = 0.0;
            for (std::size_t n = 0; n < dim; ++n) {
                weights[n] = std::exp(-bath.modes[k].omega * static_cast<double>(n) / bath.temperature);
                z += weights[n];
            }
            for (auto& w : weights) w /= z;
        }
        rho = linalg::kron(rho, ComplexMatrix::diagonal(weights));
        dims.push_back(dim);
        labels.push_back(mode_label(k));
    }
    return QuantumState::unchecked(SubsystemLayout(std::move(dims), std::move(labels)),
                                   linalg::StateForm::Density, std::move(rho));
}

}  // namespace zenoguard::noise
