#pragma once

#include <complex>

#include "latthiggs/dec.hpp"

namespace latthiggs {

struct ModelParams {
    int d = 2;
    int N = 1;
    int m = 2;  // gauge group Z_m
    int n = 2;  // Higgs group Z_n
    double beta = 0.0;
    double kappa = 0.0;

    void validate() const;
};

struct GaugeConfig {
    Form sigma;  // 1-form mod m
    Form phi;    // 0-form mod n
};

GaugeConfig zero_config(const BoxGeometry& g, const ModelParams& p);

// beta * sum over oriented plaquettes of rho(d sigma) plus
// kappa * sum over oriented edges of rho(sigma) conj(rho(d phi)).
double hamiltonian(const BoxGeometry& g, const GaugeConfig& cfg, const ModelParams& p);

// Z_2 activity exp(-2 beta |supp d sigma| - 2 kappa |supp sigma|), oriented counts.
double activity(const BoxGeometry& g, const Form& sigma, double beta, double kappa);

std::complex<double> wilson(const BoxGeometry& g, const GaugeConfig& cfg, const Chain& gamma);

// sigma -> sigma + d eta, phi -> phi + eta. Requires m = n.
GaugeConfig gauge_transform(const BoxGeometry& g, const GaugeConfig& cfg, const Form& eta);

double log_unitary_weight(const BoxGeometry& g, const Form& sigma, const ModelParams& p);
double unitary_weight(const BoxGeometry& g, const Form& sigma, const ModelParams& p);

// Edges concatenable head to tail with coefficients +-1 (the empty chain counts).
bool is_path(const BoxGeometry& g, const Chain& gamma);
Chain straight_path(const BoxGeometry& g, std::span<const int> start, int axis, int length);

}  // namespace latthiggs
