#pragma once

// Subcommands of the `tmss` tool. Each writes CSV/JSON to an ostream and
// returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmss::cli {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { csv, json };

/// Unset optionals fall back to the subcommand's own default.
struct RunConfig {
    std::optional<double> r_min, r_max;
    std::optional<int> r_steps;
    std::optional<std::vector<double>> r_list;
    std::optional<double> theta_min, theta_max;
    std::optional<int> theta_steps;
    std::optional<std::vector<double>> theta_list;
    int grid_n = 160;
    double grid_sigmas = 8.0;
    std::optional<double> tol;
    std::string out;  // empty: stdout
    OutputFormat format = OutputFormat::csv;
    int threads = 1;
    double level = 0.5;
    std::optional<std::vector<double>> dtheta_list;
    int labels = 20;
    std::uint64_t seed = 20100731;
    /// test hook: prefactor of the quadrature purity integral
    std::optional<double> prefactor;
};

/// rows (r, theta, E) over the tensor grid; default r in [0, 2] x theta in [0, pi/2]
int cmd_surface(const RunConfig& cfg, std::ostream& os);
/// rows (theta, r, E); default theta in [0, 2 pi], r in {0.5, 1, 2, 3, 5}
int cmd_curves(const RunConfig& cfg, std::ostream& os);
/// rows (theta, r, log10(1 - E)); default theta window pi/2 +/- 0.1
int cmd_log_curves(const RunConfig& cfg, std::ostream& os);
/// rows (r, width, ratio to the previous r)
int cmd_width(const RunConfig& cfg, std::ostream& os);
/// JSON report of dual-path, grid-quadrature and moment checks; exit 1 if any case fails
int cmd_verify(const RunConfig& cfg, std::ostream& os);
/// JSON report of overlap-modulus and Fourier-phase checks; exit 1 if any case fails
int cmd_mub_check(const RunConfig& cfg, std::ostream& os);

/// Full command line entry point (argument parsing, config file, output routing).
int run(int argc, const char* const* argv);

}  // namespace tmss::cli
