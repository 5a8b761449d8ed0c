#pragma once

#include <string>

#include "fts/sim.hpp"

namespace fts::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsageError = 2, kDataError = 3, kNumericError = 4 };

/// Malformed or unreadable input data (maps to exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a curve panel: one row per observation time, one column per grid
/// point, comma separated, decimal-point floats only, LF or CRLF line
/// endings, optional single header row (detected by a non-numeric first
/// row). The grid is reconstructed as equidistant on [0, 1] from the column
/// count.
FunctionalSeries read_curve_panel(const std::string& path);

struct TestOptions {
    std::vector<std::string> files;
    std::vector<int> block_sizes;  // empty = rule; one value broadcasts
    int replicates = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int smooth_basis = 0;  // 0 = no smoothing
    std::string out_path;  // empty = stdout
};

struct DiffKernelOptions {
    std::string file_a;
    std::string file_b;
    std::string out_path;
};

struct ExperimentOptions {
    std::string preset;  // optional; "table1-far-null" = FAR null row at desk scale
    std::string family = "FAR";
    double delta = 0.0;
    int n = 200;
    std::vector<int> block_sizes;  // empty = rule value for n
    std::vector<double> alphas = {0.05};
    int bootstrap_replicates = 1000;
    int repetitions = 1000;
    std::uint64_t seed = 0;
    int smooth_basis = 21;
    std::string psi_normalization = "unit";  // "unit" or "real"
    std::string out_path;  // empty = stdout
};

/// Expands options.preset into concrete experiment settings. Throws
/// std::invalid_argument for unknown preset names; no preset returns the
/// options unchanged.
ExperimentOptions resolve_preset(const ExperimentOptions& options);

/// Serialized report with fixed key order; reruns with the same seed are
/// byte-identical. Parsing the file reproduces the report exactly.
std::string report_to_json(const TestReport& report, int smooth_basis);
TestReport report_from_json(const std::string& text);

std::string rates_to_csv(const ExperimentResult& result);

/// Subcommand bodies. Each returns an ExitCode and reports problems on
/// stderr; they never throw for user-level errors.
int cmd_test(const TestOptions& options);
int cmd_diffkernel(const DiffKernelOptions& options);
int cmd_experiment(const ExperimentOptions& options);

}  // namespace fts::cli
