#pragma once

// High-temperature expansion coefficients and the two HTE representations
// of the partition function with a Wilson insertion.

#include "latthiggs/gauge_model.hpp"
#include "latthiggs/oracle.hpp"

namespace latthiggs {

// sum_j a^{qj+i} / (qj+i)!
double phi(int q, double a, int i);
// sum_i phi(i) phi(i - j)
double barphi(int q, double a, int j);
// barphi(2, a, j) / barphi(2, a, 0); hatphi(a, 1) = tanh(2a)
double hatphi(double a, int j);

// The omega'/omega double sum for Z[gamma], up to a gamma-independent constant.
long double z_gamma_hte(const Chain& gamma, const ModelParams& p,
                        const EnumerationOptions& opt = default_enumeration_options());
// z_gamma_hte(gamma) / z_gamma_hte(0)
double hte_expectation(const Chain& gamma, const ModelParams& p,
                       const EnumerationOptions& opt = default_enumeration_options());

// Z_2 weight phi^gamma(omega) of a 2-form.
double z2_hte_weight(const BoxGeometry& g, const Form& omega, const Chain& gamma, double beta, double kappa);

// sum over all 2-forms of z2_hte_weight, without the tanh(2 kappa)^{|gamma|} prefactor.
long double z2_hte_sum(const ModelParams& p, const Chain& gamma,
                       const EnumerationOptions& opt = default_enumeration_options());
// tanh(2 kappa)^{|gamma|} z2_hte_sum(gamma) / z2_hte_sum(0)
double z2_hte_expectation(const ModelParams& p, const Chain& gamma,
                          const EnumerationOptions& opt = default_enumeration_options());

}  // namespace latthiggs
