#pragma once

// Experiment orchestration shared by the CLI subcommands: expectation rows in
// the common CSV schema, grid runs into an artifact directory, built-in specs.

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latthiggs/io.hpp"
#include "latthiggs/oracle.hpp"

namespace latthiggs {

// git-describe style version baked in at configure time.
const char* latthiggs_version();

// Straight line of `len` edges along axis 0, centred like the transfer matrix:
// start (N - len) / 2 on axis 0 and N / 2 on the other axes.
Chain centred_line(const BoxGeometry& g, int len);
// Lattice distance from the centred line to the box boundary.
int centred_line_margin(int d, int N, int len);

struct ExpectationRow {
    double beta = 0.0, kappa = 0.0;
    int gamma_len = 0;
    std::complex<double> value;
    std::string method;
    int N = 0;
    int margin = 0;
    std::string status = "ok";  // or the error message of a failed evaluation
};

std::string expectation_csv_header();
std::string to_csv(const ExpectationRow& r);
std::vector<ExpectationRow> read_expectation_csv(std::istream& in);

// method: brute (coupled enumeration), unitary, transfer, hte. Errors become the row status.
ExpectationRow expectation_row(const ModelParams& p, int len, const std::string& method,
                               const EnumerationOptions& opt = default_enumeration_options());

struct McRow {
    double beta = 0.0, kappa = 0.0;
    int gamma_len = 0;
    int N = 0;
    std::uint64_t seed = 0;
    McResult result;
    std::string status = "ok";
};

std::string mc_csv_header();
std::string to_csv(const McRow& r);
McRow mc_row(const ModelParams& p, int len, const McConfig& mc);

// Perimeter fits grouped by (beta, kappa, method, N); groups with fewer than
// three usable lengths are reported with an error status.
json fit_report(const std::vector<ExpectationRow>& rows, int m, int n, double tol = 1e-12);

struct RunOptions {
    int jobs = 1;
    double tolerance_scale = 1.0;
};

struct RunSummary {
    std::filesystem::path dir;
    std::size_t cells = 0;
    std::size_t failed_evaluations = 0;
    std::vector<std::string> files;  // relative to dir, manifest last
};

// Runs every (beta, kappa) cell of the spec into `out`. Per-cell results are
// written atomically under cells/, merged tables follow, manifest.json is last.
RunSummary run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out, const RunOptions& opt = {});

// "phase-diagram"; "checks" and "paper-checks" are handled by the CLI.
std::optional<ExperimentSpec> builtin_spec(const std::string& name);

// Classification of a parameter point by which expansion converges there.
std::string regime_label(int d, double beta, double kappa);

}  // namespace latthiggs
