#include "zenoguard/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zenoguard/analytics.hpp"
#include "zenoguard/circuits.hpp"
#include "zenoguard/errors.hpp"
#include "zenoguard/kernels.hpp"
#include "zenoguard/rng.hpp"

namespace zenoguard::cli {

using json = nlohmann::json;
using linalg::cplx;
using Path = std::vector<std::string>;

namespace {

// Maps config keys back to source lines. Keys are searched in order, each
// after the previous one, so {"zeno", "gamma"} finds the gamma inside zeno.
class Locator {
public:
    Locator(std::string_view text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    std::pair<std::size_t, std::size_t> line_col(std::size_t byte) const {
        byte = std::min(byte, text_.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < byte; ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    std::size_t line_of(const Path& path) const {
        std::size_t pos = 0, found = std::string_view::npos;
        for (const auto& key : path) {
            const auto at = text_.find("\"" + key + "\"", pos);
            if (at == std::string_view::npos) break;
            found = at;
            pos = at + key.size() + 2;
        }
        return found == std::string_view::npos ? 1 : line_col(found).first;
    }

    [[noreturn]] void fail(const Path& path, const std::string& message) const {
        std::string where;
        for (const auto& key : path) where += (where.empty() ? "" : ".") + key;
        throw Error(ErrorCode::ConfigError, origin_ + ":" + std::to_string(line_of(path)) + ": " +
                                                (where.empty() ? "" : where + ": ") + message);
    }

    const std::string& origin() const { return origin_; }

private:
    std::string_view text_;
    std::string origin_;
};

Path join(Path p, const std::string& key) {
    p.push_back(key);
    return p;
}

void check_keys(const Locator& loc, const json& obj, const Path& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) loc.fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) loc.fail(join(path, item.key()), "unknown key");
    }
}

double number(const Locator& loc, const json& obj, const Path& path, const std::string& key,
              std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        loc.fail(join(path, key), "required");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) loc.fail(join(path, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) loc.fail(join(path, key), "must be finite");
    return d;
}

std::uint64_t count(const Locator& loc, const json& obj, const Path& path, const std::string& key,
                    std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    loc.fail(join(path, key), "expected a non-negative integer");
}

bool flag(const Locator& loc, const json& obj, const Path& path, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) loc.fail(join(path, key), "expected true or false");
    return obj.at(key).get<bool>();
}

std::string text(const Locator& loc, const json& obj, const Path& path, const std::string& key,
                 std::optional<std::string> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        loc.fail(join(path, key), "required");
    }
    if (!obj.at(key).is_string()) loc.fail(join(path, key), "expected a string");
    return obj.at(key).get<std::string>();
}

cplx amplitude(const Locator& loc, const json& obj, const Path& path, const std::string& key, cplx fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    loc.fail(join(path, key), "expected a number or [re, im]");
}

noise::SpectralDensity parse_spectral(const Locator& loc, const json& obj, const Path& path,
                                      const std::filesystem::path& base_dir) {
    const auto kind = text(loc, obj, path, "kind");
    try {
        if (kind == "flat") {
            check_keys(loc, obj, path, {"kind", "g0", "omega_max"});
            return noise::SpectralDensity::flat(number(loc, obj, path, "g0"), number(loc, obj, path, "omega_max"));
        }
        if (kind == "ohmic") {
            check_keys(loc, obj, path, {"kind", "alpha", "omega_c"});
            return noise::SpectralDensity::ohmic(number(loc, obj, path, "alpha"), number(loc, obj, path, "omega_c"));
        }
        if (kind == "table") {
            check_keys(loc, obj, path, {"kind", "path"});
            std::filesystem::path file = text(loc, obj, path, "path");
            if (file.is_relative()) file = base_dir / file;
            return noise::load_spectral_table(file.string());
        }
        if (kind == "atomic") {
            check_keys(loc, obj, path, {"kind", "spikes"});
            if (!obj.contains("spikes") || !obj.at("spikes").is_array())
                loc.fail(join(path, "spikes"), "expected [[omega, weight], ...]");
            std::vector<std::pair<double, double>> spikes;
            for (const auto& s : obj.at("spikes")) {
                if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
                    loc.fail(join(path, "spikes"), "expected [[omega, weight], ...]");
                spikes.emplace_back(s[0].get<double>(), s[1].get<double>());
            }
            return noise::SpectralDensity::atomic(std::move(spikes));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        loc.fail(path, e.what());
    }
    loc.fail(join(path, "kind"), "unknown spectral kind '" + kind + "' (flat, ohmic, table, atomic)");
}

noise::BathSharing parse_sharing(const Locator& loc, const json& obj, const Path& path) {
    if (!obj.contains("sharing")) return noise::BathSharing::independent();
    const auto& v = obj.at("sharing");
    const auto here = join(path, "sharing");
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "independent") return noise::BathSharing::independent();
        if (s == "collective") return noise::BathSharing::collective();
        loc.fail(here, "expected independent, collective or {\"kind\": \"partial\", \"fraction\": f}");
    }
    check_keys(loc, v, here, {"kind", "fraction"});
    if (text(loc, v, here, "kind") != "partial") loc.fail(here, "object form is only for partial sharing");
    return noise::BathSharing::partial(number(loc, v, here, "fraction"));
}

bool is_integral_axis(const std::string& name) {
    return name == "n_tests" || name == "modes" || name == "fock_cutoff" || name == "seed";
}

std::string axis_label(const std::vector<SweepAxis>& axes, const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < axes.size(); ++i)
        s += (i ? "," : "") + axes[i].name + "=" + format_number(values[i]);
    return s;
}

}  // namespace

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"n_tests",     "gamma",         "t_total",  "temperature",
                                                "omega0",      "coupling_scale", "modes",   "fock_cutoff",
                                                "sharing_fraction", "seed"};
    return names;
}

void apply_axis(ExperimentConfig& config, const std::string& name, double value) {
    auto bad = [&](const std::string& why) {
        throw Error(ErrorCode::ConfigError, "axis " + name + " = " + format_number(value) + ": " + why);
    };
    if (!std::isfinite(value)) bad("must be finite");
    if (is_integral_axis(name) && (value < 0.0 || value != std::floor(value) || value > 9.007199254740992e15))
        bad("must be a non-negative integer");

    if (name == "n_tests") {
        if (value < 1.0) bad("must be >= 1");
        config.zeno.n_tests = static_cast<std::size_t>(value);
    } else if (name == "gamma") {
        if (value < 0.0 || value >= 1.0) bad("must lie in [0, 1)");
        config.zeno.gamma = value;
    } else if (name == "t_total") {
        if (value <= 0.0) bad("must be > 0");
        config.zeno.t_total = value;
    } else if (name == "temperature") {
        if (value < 0.0) bad("must be >= 0");
        config.spec.temperature = value;
    } else if (name == "omega0") {
        config.spec.omega0 = value;
    } else if (name == "coupling_scale") {
        if (value < 0.0) bad("must be >= 0");
        config.coupling_scale = value;
    } else if (name == "modes") {
        if (value < 1.0) bad("must be >= 1");
        config.n_modes = static_cast<std::size_t>(value);
    } else if (name == "fock_cutoff") {
        if (value < 1.0) bad("must be >= 1");
        config.fock_cutoff = static_cast<std::size_t>(value);
    } else if (name == "sharing_fraction") {
        if (value < 0.0 || value > 1.0) bad("must lie in [0, 1]");
        config.spec.sharing = noise::BathSharing::partial(value);
    } else if (name == "seed") {
        config.zeno.seed = static_cast<std::uint64_t>(value);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown sweep parameter '" + name + "'");
    }
}

ExperimentConfig parse_config(std::string_view source, const std::string& origin) {
    const Locator loc(source, origin);
    json root;
    try {
        root = json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = loc.line_col(e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorCode::ConfigError,
                    origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON: " + e.what());
    }
    check_keys(loc, root, {}, {"dissipation", "bath", "drive", "zeno", "initial", "code_qubits", "sweep", "output"});

    ExperimentConfig config;
    config.origin = origin;
    const auto base_dir = std::filesystem::path(origin).parent_path();

    if (!root.contains("dissipation")) loc.fail({"dissipation"}, "required");
    {
        const Path p{"dissipation"};
        const auto& d = root.at("dissipation");
        check_keys(loc, d, p, {"lambda", "omega0", "temperature", "spectral", "sharing"});
        if (d.contains("lambda")) {
            const auto& l = d.at("lambda");
            if (!l.is_array() || l.size() != 3 || !std::all_of(l.begin(), l.end(), [](const json& x) { return x.is_number(); }))
                loc.fail(join(p, "lambda"), "expected three numbers");
            for (std::size_t i = 0; i < 3; ++i) config.spec.lambda[i] = l[i].get<double>();
        }
        config.spec.omega0 = number(loc, d, p, "omega0", 1.0);
        config.spec.temperature = number(loc, d, p, "temperature", 0.0);
        if (!d.contains("spectral")) loc.fail(join(p, "spectral"), "required");
        config.spec.spectral = parse_spectral(loc, d.at("spectral"), join(p, "spectral"), base_dir);
        config.spec.sharing = parse_sharing(loc, d, p);
        try {
            config.spec.validate();
        } catch (const Error& e) {
            loc.fail(p, e.what());
        }
    }

    if (root.contains("bath")) {
        const Path p{"bath"};
        const auto& b = root.at("bath");
        check_keys(loc, b, p, {"modes", "fock_cutoff", "coupling_scale"});
        config.n_modes = count(loc, b, p, "modes", 1);
        config.fock_cutoff = count(loc, b, p, "fock_cutoff", 2);
        config.coupling_scale = number(loc, b, p, "coupling_scale", 1.0);
        if (config.n_modes < 1) loc.fail(join(p, "modes"), "must be >= 1");
        if (config.fock_cutoff < 1) loc.fail(join(p, "fock_cutoff"), "must be >= 1");
        if (config.coupling_scale < 0.0) loc.fail(join(p, "coupling_scale"), "must be >= 0");
    }

    if (root.contains("drive")) {
        const Path p{"drive"};
        const auto& d = root.at("drive");
        check_keys(loc, d, p, {"enabled", "coefficient"});
        config.drive_enabled = flag(loc, d, p, "enabled", true);
        if (config.drive_enabled && d.contains("coefficient")) {
            const double c = number(loc, d, p, "coefficient");
            if (std::abs(c - config.spec.omega0) > 1e-12)
                loc.fail(join(p, "coefficient"), "must equal dissipation.omega0 when the drive is enabled");
        }
    }

    bool seed_given = false;
    if (root.contains("zeno")) {
        const Path p{"zeno"};
        const auto& z = root.at("zeno");
        check_keys(loc, z, p, {"t_total", "n_tests", "gamma", "policy", "sampling", "seed"});
        config.zeno.t_total = number(loc, z, p, "t_total", 1.0);
        config.zeno.n_tests = count(loc, z, p, "n_tests", 32);
        config.zeno.gamma = number(loc, z, p, "gamma", 0.0);
        const auto policy = text(loc, z, p, "policy", std::string("track-both"));
        if (policy == "track-both")
            config.zeno.policy = zeno::Policy::TrackBoth;
        else if (policy == "postselect")
            config.zeno.policy = zeno::Policy::Postselect;
        else
            loc.fail(join(p, "policy"), "expected track-both or postselect");
        config.zeno.sampling = flag(loc, z, p, "sampling", false);
        seed_given = z.contains("seed");
        config.zeno.seed = count(loc, z, p, "seed", 0);
        try {
            config.zeno.validate();
        } catch (const Error& e) {
            loc.fail(p, e.what());
        }
    }

    if (root.contains("initial")) {
        const Path p{"initial"};
        const auto& i = root.at("initial");
        check_keys(loc, i, p, {"c_plus", "c_minus"});
        config.c_plus = amplitude(loc, i, p, "c_plus", 1.0);
        config.c_minus = amplitude(loc, i, p, "c_minus", 0.0);
        if (std::abs(std::norm(config.c_plus) + std::norm(config.c_minus) - 1.0) > linalg::kNormTol)
            loc.fail(p, "|c_plus|^2 + |c_minus|^2 must equal 1");
    }

    if (root.contains("code_qubits")) {
        const auto& v = root.at("code_qubits");
        if (!v.is_number_unsigned()) loc.fail({"code_qubits"}, "expected a positive even integer");
        config.code_qubits = v.get<std::size_t>();
        if (config.code_qubits != 2) loc.fail({"code_qubits"}, "the protocol engine runs the two-qubit code");
    }

    if (root.contains("sweep")) {
        const Path p{"sweep"};
        const auto& s = root.at("sweep");
        check_keys(loc, s, p, {"axes"});
        if (!s.contains("axes") || !s.at("axes").is_array()) loc.fail(join(p, "axes"), "expected an array");
        const auto& axes = s.at("axes");
        if (axes.size() > kMaxSweepAxes) loc.fail(join(p, "axes"), "at most two axes");
        for (const auto& a : axes) {
            const auto ap = join(p, "axes");
            check_keys(loc, a, ap, {"name", "values"});
            SweepAxis axis{text(loc, a, ap, "name"), {}};
            const auto np = join(ap, axis.name);
            if (std::find(sweep_parameters().begin(), sweep_parameters().end(), axis.name) == sweep_parameters().end())
                loc.fail(np, "unknown sweep parameter");
            for (const auto& x : config.axes)
                if (x.name == axis.name) loc.fail(np, "axis listed twice");
            if (!a.contains("values") || !a.at("values").is_array() || a.at("values").empty())
                loc.fail(np, "values must be a non-empty array");
            for (const auto& v : a.at("values")) {
                if (!v.is_number()) loc.fail(np, "values must be numbers");
                axis.values.push_back(v.get<double>());
            }
            std::set<double> distinct(axis.values.begin(), axis.values.end());
            if (distinct.size() != axis.values.size()) loc.fail(np, "duplicate values");
            for (double v : axis.values) {
                auto probe = config;
                try {
                    apply_axis(probe, axis.name, v);
                } catch (const Error& e) {
                    loc.fail(np, e.what());
                }
            }
            config.axes.push_back(std::move(axis));
        }
    }

    if (config.zeno.sampling && !seed_given) loc.fail({"zeno"}, "sampling mode needs an explicit seed");

    if (root.contains("output")) {
        const Path p{"output"};
        const auto& o = root.at("output");
        check_keys(loc, o, p, {"json", "csv"});
        config.output_json = text(loc, o, p, "json", std::string());
        config.output_csv = text(loc, o, p, "csv", std::string());
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open config");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

noise::DissipationSpec effective_spec(const ExperimentConfig& config) {
    auto spec = config.spec;
    if (config.coupling_scale != 1.0)
        spec.spectral = spec.spectral.scaled(config.coupling_scale * config.coupling_scale);
    return spec;
}

zeno::ProtocolSetup build_setup(const ExperimentConfig& config) {
    const auto spec = effective_spec(config);
    const auto bath = noise::discretize_bath(spec, config.n_modes, config.fock_cutoff, config.code_qubits);
    const auto drive = config.drive_enabled ? noise::DriveSpec::matched(spec) : noise::DriveSpec::off();
    return zeno::ProtocolSetup::make(spec, bath, drive, config.c_plus, config.c_minus);
}

std::size_t run_dimension(const ExperimentConfig& config) {
    const auto spec = effective_spec(config);
    const auto bath = noise::discretize_bath(spec, config.n_modes, config.fock_cutoff, config.code_qubits);
    double dim = std::ldexp(1.0, static_cast<int>(config.code_qubits) + 1);
    dim *= std::pow(static_cast<double>(bath.mode_dimension()), static_cast<double>(bath.modes.size()));
    return dim > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(dim);
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::size_t worker_count_from_env() {
    const char* raw = std::getenv("ZENOGUARD_THREADS");
    if (raw == nullptr || *raw == '\0') return static_cast<std::size_t>(kernels::max_threads());
    const std::string_view s(raw);
    std::size_t n = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::ConfigError, "ZENOGUARD_THREADS must be a non-negative integer");
    return n == 0 ? static_cast<std::size_t>(omp_get_num_procs()) : n;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t workers) {
    if (config.axes.empty()) throw Error(ErrorCode::ConfigError, config.origin + ": sweep.axes is empty");

    std::vector<std::vector<double>> cells{{}};
    for (const auto& axis : config.axes) {
        std::vector<double> values = axis.values;
        std::sort(values.begin(), values.end());
        std::vector<std::vector<double>> next;
        for (const auto& prefix : cells)
            for (double v : values) {
                next.push_back(prefix);
                next.back().push_back(v);
            }
        cells = std::move(next);
    }

    const bool seed_swept = std::any_of(config.axes.begin(), config.axes.end(),
                                        [](const SweepAxis& a) { return a.name == "seed"; });
    const SplitMix64 root(config.zeno.seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<SweepRow> rows(cells.size());

    omp_set_max_active_levels(1);
    const auto n_cells = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(std::max<std::size_t>(workers, 1)))
    for (std::ptrdiff_t i = 0; i < n_cells; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        SweepRow& row = rows[idx];
        row = {cells[idx], nan, nan, nan, nan, {}};
        try {
            auto cell = config;
            for (std::size_t a = 0; a < config.axes.size(); ++a) apply_axis(cell, config.axes[a].name, cells[idx][a]);
            if (!seed_swept) cell.zeno.seed = root.split(idx).next();
            const auto setup = build_setup(cell);
            const auto report = zeno::run_protocol(setup, cell.zeno);
            row.one_minus_fidelity = 1.0 - report.final_fidelity;
            row.total_out_prob = report.total_out_probability;
            row.delta_discrete = report.delta_discrete;
            row.p_tot_pred = report.estimated_p_tot;
        } catch (const Error& e) {
            row.failure = e.what();
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, std::size_t n_axes) {
    out << "axis1,axis2,one_minus_fidelity,total_out_prob,delta_discrete,p_tot_pred\n";
    for (const auto& r : rows) {
        out << format_number(r.axes.at(0)) << ',' << (n_axes > 1 ? format_number(r.axes.at(1)) : "") << ','
            << format_number(r.one_minus_fidelity) << ',' << format_number(r.total_out_prob) << ','
            << format_number(r.delta_discrete) << ',' << format_number(r.p_tot_pred) << '\n';
    }
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    return std::string(buf, res.ptr);
}

void line(std::ostream& out, const std::string& key, const std::string& value) {
    out << "  " << key << std::string(key.size() < 26 ? 26 - key.size() : 1, ' ') << value << '\n';
}

json report_json(const ExperimentConfig& config, const zeno::ZenoRunReport& report,
                 const analytics::DeltaBreakdown& continuum) {
    json steps = json::array();
    for (const auto& s : report.per_step)
        steps.push_back({{"step", s.step},
                         {"leak_probability", s.leak_probability},
                         {"syndrome", zeno::to_string(s.syndrome)},
                         {"post_fidelity", s.post_fidelity}});
    const double n = static_cast<double>(config.zeno.n_tests);
    return {{"config", config.origin},
            {"n_tests", config.zeno.n_tests},
            {"policy", zeno::to_string(config.zeno.policy)},
            {"sampling", config.zeno.sampling},
            {"final_fidelity", report.final_fidelity},
            {"total_out_probability", report.total_out_probability},
            {"mean_leak_probability", report.mean_leak_probability},
            {"predicted_leak_probability", report.delta_discrete / (n * n)},
            {"delta_discrete", report.delta_discrete},
            {"delta_continuum", continuum.delta},
            {"bound_continuum", continuum.bound},
            {"estimated_p_tot", report.estimated_p_tot},
            {"accepted", report.accepted},
            {"decoded",
             {{"c_plus", {report.decoded.c_plus.real(), report.decoded.c_plus.imag()}},
              {"c_minus", {report.decoded.c_minus.real(), report.decoded.c_minus.imag()}},
              {"leakage", report.decoded.leakage}}},
            {"per_step", steps}};
}

int cmd_run(const std::string& path, std::ostream& out, std::ostream& err) {
    const auto config = load_config(path);
    kernels::set_thread_limit(static_cast<int>(worker_count_from_env()));
    const auto setup = build_setup(config);
    const auto report = zeno::run_protocol(setup, config.zeno);
    const auto continuum =
        analytics::delta_continuum_breakdown(setup.spec, config.c_plus, config.c_minus, config.zeno.t_total);
    for (const auto& w : continuum.warnings) err << "warning: " << w << '\n';

    const double n = static_cast<double>(config.zeno.n_tests);
    const double predicted = report.delta_discrete / (n * n);
    out << "run " << config.origin << '\n';
    line(out, "n_tests", std::to_string(config.zeno.n_tests));
    line(out, "policy", std::string(zeno::to_string(config.zeno.policy)) + (config.zeno.sampling ? " (sampled)" : ""));
    line(out, "final_fidelity", fixed6(report.final_fidelity));
    line(out, "one_minus_fidelity", format_number(1.0 - report.final_fidelity));
    line(out, "total_out_prob", format_number(report.total_out_probability));
    line(out, "mean_leak_per_step", format_number(report.mean_leak_probability));
    line(out, "predicted_leak_per_step", format_number(predicted));
    line(out, "leak_ratio", format_number(predicted > 0.0 ? report.mean_leak_probability / predicted
                                                          : std::numeric_limits<double>::quiet_NaN()));
    line(out, "delta_discrete", format_number(report.delta_discrete));
    line(out, "delta_continuum", format_number(continuum.delta));
    line(out, "bound_continuum", format_number(continuum.bound));
    line(out, "p_tot_pred", format_number(report.estimated_p_tot));
    line(out, "decoded_leakage", format_number(report.decoded.leakage));
    if (config.zeno.sampling) line(out, "accepted", report.accepted ? "yes" : "no");

    if (!config.output_json.empty()) {
        std::ofstream file(config.output_json);
        if (!file) throw Error(ErrorCode::ConfigError, config.output_json + ": cannot write");
        file << report_json(config, report, continuum).dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_sweep(const std::string& path, std::ostream& out, std::ostream& err) {
    const auto config = load_config(path);
    if (config.axes.empty())
        throw Error(ErrorCode::ConfigError, config.origin + ": sweep needs at least one entry in sweep.axes");
    const auto workers = worker_count_from_env();
    kernels::set_thread_limit(1);
    const auto rows = run_sweep(config, workers);

    err << "axes:";
    for (const auto& a : config.axes) err << ' ' << a.name;
    err << '\n';

    if (config.output_csv.empty()) {
        write_sweep_csv(out, rows, config.axes.size());
    } else {
        std::ofstream file(config.output_csv, std::ios::binary);
        if (!file) throw Error(ErrorCode::ConfigError, config.output_csv + ": cannot write");
        write_sweep_csv(file, rows, config.axes.size());
    }

    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.failure.empty() ? 0 : 1;
    if (failed > 0) {
        const std::string sidecar = (config.output_csv.empty() ? std::string("zenoguard_sweep") : config.output_csv) +
                                    ".diagnostics.txt";
        std::ofstream diag(sidecar);
        for (const auto& r : rows)
            if (!r.failure.empty()) diag << axis_label(config.axes, r.axes) << ": " << r.failure << '\n';
        err << failed << " of " << rows.size() << " cells failed; see " << sidecar << '\n';
    }

    for (std::size_t a = 0; a < config.axes.size(); ++a) {
        if (config.axes[a].name != "n_tests") continue;
        std::map<double, std::pair<std::vector<double>, std::vector<double>>> groups;
        for (const auto& r : rows) {
            const double other = config.axes.size() > 1 ? r.axes[1 - a] : 0.0;
            groups[other].first.push_back(r.axes[a]);
            groups[other].second.push_back(r.one_minus_fidelity);
        }
        for (const auto& [other, xy] : groups) {
            err << "slope d log(1-F) / d log N";
            if (config.axes.size() > 1) err << " at " << config.axes[1 - a].name << '=' << format_number(other);
            err << ": " << format_number(zeno::loglog_slope(xy.first, xy.second)) << '\n';
        }
    }
    return failed == rows.size() ? kExitNumerical : kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
    const auto config = load_config(path);
    std::vector<ExperimentConfig> cells{config};
    for (const auto& axis : config.axes) {
        std::vector<ExperimentConfig> next;
        for (const auto& c : cells)
            for (double v : axis.values) {
                next.push_back(c);
                apply_axis(next.back(), axis.name, v);
            }
        cells = std::move(next);
    }
    std::size_t largest = 0;
    for (const auto& c : cells) {
        const auto dim = run_dimension(c);
        if (dim / 2 > noise::kMaxDimension)
            throw Error(ErrorCode::DimensionOverflow, config.origin + ": system + bath dimension " +
                                                          std::to_string(dim / 2) + " exceeds " +
                                                          std::to_string(noise::kMaxDimension));
        largest = std::max(largest, dim);
    }
    out << "ok " << config.origin << ": " << cells.size() << (cells.size() == 1 ? " cell" : " cells")
        << ", largest dimension " << largest << " with ancilla\n";
    return kExitOk;
}

cplx parse_amplitude_flag(const std::string& s) {
    const auto comma = s.find(',');
    auto num = [&](std::string_view v) {
        double d = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw Error(ErrorCode::ConfigError, "bad amplitude '" + s + "' (expected re or re,im)");
        return d;
    };
    const std::string_view sv(s);
    if (comma == std::string::npos) return {num(sv), 0.0};
    return {num(sv.substr(0, comma)), num(sv.substr(comma + 1))};
}

struct AnalyzeFlags {
    std::optional<double> delta;
    std::vector<double> lambda{1.0, 0.0, 0.0};
    double omega0 = 1.0;
    double temperature = 0.0;
    std::string spectral = "flat";
    double g0 = 0.1, omega_max = 1.0, alpha = 0.05, omega_c = 1.0;
    std::string table;
    std::string sharing = "independent";
    double fraction = 0.5;
    std::string c_plus = "1", c_minus = "0";
    double t0 = 1.0;
    double gamma = 0.0;
    std::size_t n = 1;
};

int cmd_analyze(const AnalyzeFlags& f, std::ostream& out, std::ostream& err) {
    json j;
    analytics::DeltaBreakdown breakdown;
    if (f.delta) {
        if (*f.delta < 0.0) throw Error(ErrorCode::ConfigError, "--delta must be >= 0");
        breakdown.delta = breakdown.diagonal = *f.delta;
        j["source"] = "given";
    } else {
        noise::DissipationSpec spec;
        if (f.lambda.size() != 3) throw Error(ErrorCode::ConfigError, "--lambda needs three components");
        spec.lambda = {f.lambda[0], f.lambda[1], f.lambda[2]};
        spec.omega0 = f.omega0;
        spec.temperature = f.temperature;
        try {
            if (f.spectral == "flat")
                spec.spectral = noise::SpectralDensity::flat(f.g0, f.omega_max);
            else if (f.spectral == "ohmic")
                spec.spectral = noise::SpectralDensity::ohmic(f.alpha, f.omega_c);
            else
                spec.spectral = noise::load_spectral_table(f.table);
            if (f.sharing == "collective")
                spec.sharing = noise::BathSharing::collective();
            else if (f.sharing == "partial")
                spec.sharing = noise::BathSharing::partial(f.fraction);
            spec.validate();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError) throw;
            throw Error(ErrorCode::ConfigError, e.what());
        }
        const auto cp = parse_amplitude_flag(f.c_plus), cm = parse_amplitude_flag(f.c_minus);
        if (std::abs(std::norm(cp) + std::norm(cm) - 1.0) > linalg::kNormTol)
            throw Error(ErrorCode::ConfigError, "|c_plus|^2 + |c_minus|^2 must equal 1");
        if (!(f.t0 > 0.0)) throw Error(ErrorCode::ConfigError, "--t0 must be > 0");
        breakdown = analytics::delta_continuum_breakdown(spec, cp, cm, f.t0);
        for (const auto& w : breakdown.warnings) err << "warning: " << w << '\n';
        j["source"] = "continuum";
    }
    if (f.gamma < 0.0) throw Error(ErrorCode::ConfigError, "--gamma must be >= 0");
    if (f.n < 1) throw Error(ErrorCode::ConfigError, "--n must be >= 1");

    const auto budget = analytics::error_budget(breakdown.delta, f.gamma, f.n, breakdown.bound);
    j["delta"] = budget.delta;
    j["diagonal"] = breakdown.diagonal;
    j["cross_term"] = breakdown.cross;
    j["bound"] = f.delta ? json(nullptr) : json(budget.bound);
    j["gamma"] = budget.gamma;
    j["n"] = budget.n;
    j["p_err_per_step"] = budget.p_err_per_step;
    j["p_tot"] = budget.p_tot;
    j["n_opt"] = budget.n_opt_unbounded ? json(nullptr) : json(budget.n_opt);
    j["n_opt_unbounded"] = budget.n_opt_unbounded;
    j["n_opt_integer"] = budget.n_opt_unbounded ? json(nullptr) : json(budget.n_opt_integer);
    j["p_tot_min"] = budget.p_tot_min;
    j["zeno_condition_ok"] = budget.zeno_condition_ok;
    j["gamma_small_ok"] = budget.gamma_small_ok;
    j["working_condition_ok"] = budget.working_condition_ok;
    j["warnings"] = breakdown.warnings;
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_codespace(long long two_l, std::ostream& out) {
    if (two_l < 2 || two_l > 12 || two_l % 2 != 0)
        throw Error(two_l % 2 != 0 ? ErrorCode::OddQubitCount : ErrorCode::InvalidArgument,
                    "codespace takes an even qubit count between 2 and 12");
    const auto code = circuits::codespace(static_cast<std::size_t>(two_l));
    const auto eff = circuits::efficiency(code.half());
    const auto overhead = analytics::qubit_overhead(code.half());
    line(out, "qubits", std::to_string(code.n_qubits));
    line(out, "dimension", std::to_string(code.dimension()));
    line(out, "efficiency_exact", format_number(eff.exact));
    line(out, "efficiency_asymptotic", format_number(eff.asymptotic));
    line(out, "overhead_abstract(L=" + std::to_string(code.half()) + ")", format_number(overhead.abstract_formula));
    line(out, "overhead_search(L=" + std::to_string(code.half()) + ")", std::to_string(overhead.by_search));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-qubit Zeno error-prevention simulator", "zenoguard"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run the protocol once");
    run_cmd->add_option("config", config_path, "JSON config")->required();
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every cell of sweep.axes and emit CSV");
    sweep_cmd->add_option("config", config_path, "JSON config")->required();
    auto* validate_cmd = app.add_subcommand("validate", "Parse a config and check dimensions");
    validate_cmd->add_option("config", config_path, "JSON config")->required();

    long long two_l = 0;
    auto* code_cmd = app.add_subcommand("codespace", "Balanced-weight codespace for 2L qubits");
    code_cmd->add_option("two_l", two_l, "number of code qubits (even, 2..12)")->required();

    AnalyzeFlags af;
    double delta = -1.0;
    auto* an = app.add_subcommand("analyze", "Error budget as JSON");
    auto* delta_opt = an->add_option("--delta", delta, "use this delta instead of integrating a spectrum");
    an->add_option("--lambda", af.lambda, "noise direction")->delimiter(',')->expected(3);
    an->add_option("--omega0", af.omega0);
    an->add_option("--temperature", af.temperature);
    an->add_option("--spectral", af.spectral)->check(CLI::IsMember({"flat", "ohmic", "table"}));
    an->add_option("--g0", af.g0);
    an->add_option("--omega-max", af.omega_max);
    an->add_option("--alpha", af.alpha);
    an->add_option("--omega-c", af.omega_c);
    an->add_option("--table", af.table, "two-column (omega, |g|^2) file");
    an->add_option("--sharing", af.sharing)->check(CLI::IsMember({"independent", "collective", "partial"}));
    an->add_option("--fraction", af.fraction);
    an->add_option("--c-plus", af.c_plus, "re or re,im");
    an->add_option("--c-minus", af.c_minus, "re or re,im");
    an->add_option("--t0", af.t0);
    an->add_option("--gamma", af.gamma);
    an->add_option("--n", af.n);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "zenoguard: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(config_path, out, err);
        if (*sweep_cmd) return cmd_sweep(config_path, out, err);
        if (*validate_cmd) return cmd_validate(config_path, out);
        if (*code_cmd) return cmd_codespace(two_l, out);
        if (*an) {
            if (*delta_opt) af.delta = delta;
            if (af.spectral == "table" && af.table.empty() && !af.delta)
                throw Error(ErrorCode::ConfigError, "--spectral table needs --table");
            return cmd_analyze(af, out, err);
        }
    } catch (const Error& e) {
        err << "zenoguard: " << e.what() << '\n';
        return e.is_numerical() ? kExitNumerical : kExitConfig;
    } catch (const std::exception& e) {
        err << "zenoguard: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace zenoguard::cli
