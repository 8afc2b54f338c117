#pragma once

// Decay constants a, C of -log E[W_{gamma_n}] ~ a n + C for straight lines,
// their truncation tails and exponential envelopes, and perimeter-law fits.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latthiggs/clusters.hpp"

namespace latthiggs {

// Straight line along `axis` through the vertex `origin` of a box. Edge e_t has
// anchor origin + t * e_axis; gamma_n = {e_0..e_{n-1}}, gamma_inf^+ = {t >= 0}.
class LinePaths {
public:
    LinePaths(const BoxGeometry& g, std::vector<int> origin, int axis = 0);

    std::optional<int> position(std::size_t edge) const;
    std::optional<std::uint32_t> edge_at(int t) const;
    std::uint32_t e0() const { return *edge_at(0); }

    bool on_line(std::size_t e) const { return position(e).has_value(); }
    bool on_half(std::size_t e) const {
        auto t = position(e);
        return t && *t >= 0;
    }
    bool on_segment(std::size_t e, int n) const {
        auto t = position(e);
        return t && *t >= 0 && *t < n;
    }

    // The segment, half line and full line restricted to the box.
    Chain segment(int n) const;
    Chain half_line() const;
    Chain full_line() const;

    const BoxGeometry& geometry() const { return g_; }
    const std::vector<int>& origin() const { return origin_; }
    int axis() const { return axis_; }

private:
    const BoxGeometry& g_;
    std::vector<int> origin_;
    int axis_;
};

// F(S, gamma) = Psi(S) (1 - rho(S(gamma))) / |supp S meeting gamma|, Higgs phase.
// `gamma` is given by its edge set (Z_2 coefficients). Throws if supp S misses gamma.
double f_weight(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, const Chain& gamma, double beta,
                double kappa);
// G(S, gamma) = (Psi^gamma(S) - Psi^0(S)) / |supp gamma meeting supp delta S|, confinement.
double g_weight(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, const Chain& gamma, double beta,
                double kappa);

struct DecayOptions {
    ClusterCutoffs cut{6, 6};
    std::optional<double> eps;
    int N = 0;  // box used to realize the infinite-lattice sums; 0 picks one from the cutoff
};

struct DecaySummary {
    Phase phase = Phase::Higgs;
    int d = 2;
    double beta = 0.0, kappa = 0.0;
    double a = 0.0, C = 0.0;
    double a_tail = 0.0, C_tail = 0.0;
    double D = 0.0, D_prime = 0.0;
    // per-edge cluster bound c x^k (Higgs: c = C_eps/4; confinement: c = 2(d-1) C2, x = r)
    double c = 0.0, x = 0.0;
    double eps = 0.0;
    ClusterCutoffs cut;
    int box_N = 0;
    std::size_t clusters_a = 0, clusters_C = 0;

    // Infinite-volume remainder bound for |−log E − a n − C| from the proofs.
    double envelope(int n) const;
    // Extra terms for a finite box whose clusters agree with the lattice below size M.
    double finite_box(int n, int M) const;
    // Full bound: truncation tails, envelope, and finite-box term.
    double residual_bound(int n, std::optional<int> M = std::nullopt) const;
};

DecaySummary decay_constants_higgs(int d, double beta, double kappa, const DecayOptions& opt = {});
DecaySummary decay_constants_conf(int d, double beta, double kappa, const DecayOptions& opt = {});
DecaySummary decay_constants(Phase phase, int d, double beta, double kappa, const DecayOptions& opt = {});

// Smallest M such that every cluster through gamma with ||S|| < M is the same in
// the box as on the infinite lattice (multi-source BFS from incomplete cells).
int finite_box_margin(Phase phase, const BoxGeometry& g, const Chain& gamma);

struct SuperadditivityReport {
    std::size_t checks = 0;
    std::size_t violations = 0;
    double max_violation = 0.0;
    bool passed = true;
};

struct SandwichReport {
    double b = 0.0;        // lower-bound rate from the min/max barphi ratio
    double b_prime = 0.0;  // -log E[W_{gamma_1}]
    std::size_t lower_violations = 0, upper_violations = 0;
    double max_lower_violation = 0.0, max_upper_violation = 0.0;
    bool lower_passed = true, upper_passed = true;
};

struct PerimeterFit {
    std::map<int, double> rate;  // -log E_n / n
    double a_hat = 0.0;          // inf_n rate (the Fekete limit)
    SuperadditivityReport superadditivity;  // log E_{a+b} >= log E_a + log E_b on the given data
    SandwichReport sandwich;
};

// -log(min_j barphi(j) / max_j barphi(j)) over Z_{lcm(m,n)}.
double sandwich_rate(int m, int n, double kappa);

// expectations: n -> E[W_{gamma_n}]; at least three lengths, all positive.
PerimeterFit perimeter_fit(const std::map<int, double>& expectations, double b, double tol = 1e-12);

// Griffiths form of superadditivity on a finite box (d = 2, Z_2, transfer matrix):
// E[gamma_{a+b} at x0] >= E[gamma_a at x0] E[gamma_b at x0 + a], all a + b <= n_max.
SuperadditivityReport positioned_superadditivity(const ModelParams& p, int n_max, double tol = 1e-12);

}  // namespace latthiggs
