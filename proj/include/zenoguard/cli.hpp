#pragma once

// Command-line front end. Exit codes: 0 ok, 2 config/usage error, 3 numerical failure.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "zenoguard/noise.hpp"
#include "zenoguard/zeno.hpp"

namespace zenoguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr std::size_t kMaxSweepAxes = 2;

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct ExperimentConfig {
    noise::DissipationSpec spec;
    std::size_t n_modes = 1;
    std::size_t fock_cutoff = 2;
    bool drive_enabled = true;
    double coupling_scale = 1.0;  // multiplies every g; |g|^2 scales by its square
    zeno::ZenoConfig zeno;
    linalg::cplx c_plus{1.0};
    linalg::cplx c_minus{0.0};
    std::size_t code_qubits = 2;
    std::vector<SweepAxis> axes;
    std::string output_json;
    std::string output_csv;
    std::string origin;  // file name used in messages
};

// Errors carry ErrorCode::ConfigError and a "origin:line: ..." message.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

// Names accepted in sweep.axes.
const std::vector<std::string>& sweep_parameters();
// Sets one sweepable parameter. Throws ConfigError for unknown names or bad values.
void apply_axis(ExperimentConfig& config, const std::string& name, double value);

// Spectral density after coupling_scale.
noise::DissipationSpec effective_spec(const ExperimentConfig& config);
zeno::ProtocolSetup build_setup(const ExperimentConfig& config);
// Product of local dimensions the run will allocate, ancilla included.
std::size_t run_dimension(const ExperimentConfig& config);

// "%.12g" without locale dependence; nan and inf spelled as such.
std::string format_number(double value);

// ZENOGUARD_THREADS: unset or 0 means automatic. Throws ConfigError when malformed.
std::size_t worker_count_from_env();

struct SweepRow {
    std::vector<double> axes;
    double one_minus_fidelity;
    double total_out_prob;
    double delta_discrete;
    double p_tot_pred;
    std::string failure;  // empty when the cell succeeded
};

// Every cell of the axis grid, rows sorted by axis values.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, std::size_t workers);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, std::size_t n_axes);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace zenoguard::cli
