#pragma once

// Exact evaluation on small boxes: full enumeration of the coupled and
// unitary-gauge measures, and a d = 2 transfer matrix for straight lines.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "latthiggs/gauge_model.hpp"

namespace latthiggs {

struct EnumerationOptions {
    std::uint64_t budget = std::uint64_t{1} << 28;
    int jobs = 1;
};

// Default options with the budget taken from LATTHIGGS_BUDGET when set.
EnumerationOptions default_enumeration_options();

struct ExactResult {
    // log of the partition sum with weights normalized by the all-zero configuration
    double log_z = 0.0;
    std::vector<std::complex<double>> expectations;  // one per requested gamma
    std::uint64_t config_count = 0;
};

ExactResult exact_coupled(const ModelParams& p, std::span<const Chain> gammas,
                          const EnumerationOptions& opt = default_enumeration_options());
ExactResult exact_unitary(const ModelParams& p, std::span<const Chain> gammas,
                          const EnumerationOptions& opt = default_enumeration_options());

std::complex<double> exact_coupled_expectation(const Chain& gamma, const ModelParams& p,
                                               const EnumerationOptions& opt = default_enumeration_options());
std::complex<double> exact_unitary_expectation(const Chain& gamma, const ModelParams& p,
                                               const EnumerationOptions& opt = default_enumeration_options());

struct TransferResult {
    double expectation = 0.0;
    long double neg_log = 0.0L;  // -log expectation, computed without cancellation
    int x0 = 0, y0 = 0;
    int margin = 0;  // lattice distance from the path to the box boundary
};

// Straight path of `length` edges along axis 0 starting at vertex (x0, y0).
// Defaults to the centred placement.
TransferResult transfer_matrix_expectation(const ModelParams& p, int length, std::optional<int> x0 = std::nullopt,
                                           std::optional<int> y0 = std::nullopt);

struct MonotonicityReport {
    double max_violation = 0.0;
    std::size_t violations = 0;
    std::size_t comparisons = 0;
    bool passed = true;
};

// Evaluates E[W_gamma] on the product grid and checks that it is
// nondecreasing along both axes.
MonotonicityReport check_monotonicity(const ModelParams& p, const Chain& gamma, std::span<const double> betas,
                                      std::span<const double> kappas, double tol = 1e-12,
                                      const EnumerationOptions& opt = default_enumeration_options());

struct GriffithsReport {
    double joint = 0.0;    // E[W_{gamma + gamma'}]
    double product = 0.0;  // E[W_gamma] E[W_gamma']
    double violation = 0.0;
    bool passed = true;
};

GriffithsReport check_griffiths(const ModelParams& p, const Chain& g1, const Chain& g2, double tol = 1e-12,
                                const EnumerationOptions& opt = default_enumeration_options());

}  // namespace latthiggs
