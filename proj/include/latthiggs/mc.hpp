#pragma once

// Single-edge Metropolis sampler for the unitary-gauge Z_2 model.

#include <cstdint>
#include <vector>

#include "latthiggs/gauge_model.hpp"

namespace latthiggs {

struct McConfig {
    std::uint64_t seed = 1;
    int sweeps = 10000;  // measured sweeps per chain, after burn-in
    int burn_in = 1000;
    int stride = 1;  // sweeps between measurements
    int batches = 20;  // per chain
    int chains = 1;
    int jobs = 1;

    void validate() const;
};

struct McResult {
    double mean = 0.0;
    double stderr_ = 0.0;  // jackknife over batch means
    double tau_int = 0.0;  // integrated autocorrelation time of chain 0, in measurements
    double acceptance = 0.0;
    std::size_t samples = 0;
    std::vector<double> batch_means;
};

// Counter-based uniform in [0,1) keyed on (seed, chain, sweep, site).
double mc_uniform(std::uint64_t seed, std::uint64_t chain, std::uint64_t sweep, std::uint64_t site);

// log w(sigma with e flipped) - log w(sigma)
double flip_delta_log_weight(const BoxGeometry& g, const Form& sigma, std::size_t e, const ModelParams& p);
// min(1, w(sigma') / w(sigma)) for the single-edge flip at e
double metropolis_acceptance(const BoxGeometry& g, const Form& sigma, std::size_t e, const ModelParams& p);

McResult sample_expectation(const Chain& gamma, const ModelParams& p, const McConfig& mc);

// Sokal-windowed integrated autocorrelation time of a series.
double integrated_autocorrelation(const std::vector<double>& x);

}  // namespace latthiggs
