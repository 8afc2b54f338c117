#pragma once

// Polymers, clusters and Ursell functions for the two cluster expansions:
// Z_2 1-forms on G_1 (Higgs phase) and Z_2 2-forms on G_2 (confinement).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latthiggs/dec.hpp"
#include "latthiggs/gauge_model.hpp"

namespace latthiggs {

enum class Phase { Higgs, Confinement };

std::string to_string(Phase p);
Phase phase_from_string(const std::string& s);

// G_1 (edges sharing a plaquette) or G_2 (plaquettes sharing an edge).
class AdjacencyGraph {
public:
    AdjacencyGraph(Phase phase, const BoxGeometry& g);

    Phase phase() const { return phase_; }
    int cell_degree() const { return phase_ == Phase::Higgs ? 1 : 2; }
    std::size_t size() const { return start_.size() - 1; }
    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {adj_.data() + start_[v], adj_.data() + start_[v + 1]};
    }
    int degree(std::size_t v) const { return static_cast<int>(start_[v + 1] - start_[v]); }
    int max_degree() const;

private:
    Phase phase_;
    std::vector<std::uint32_t> start_, adj_;
};

AdjacencyGraph build_graph(Phase phase, const BoxGeometry& g);

inline int degree_bound_m1(int d) { return 6 * (d - 1); }
inline int degree_bound_m2(int d) { return 8 * d - 12; }

// Calls visit(cells) once for every connected vertex set of size <= J that
// contains root, avoids every vertex v with forbidden[v] != 0, and has no
// vertex with index below min_index. cells[0] == root; the rest is unordered.
void for_each_connected_set(const AdjacencyGraph& G, std::uint32_t root, int J,
                            const std::function<void(std::span<const std::uint32_t>)>& visit,
                            std::span<const char> forbidden = {}, std::uint32_t min_index = 0);

struct Polymer {
    Phase phase = Phase::Higgs;
    std::vector<std::uint32_t> cells;  // sorted positive cells of the support

    Form to_form(const BoxGeometry& g) const;
    bool operator==(const Polymer&) const = default;
};

// Polymers whose support contains the anchor and has at most J cells.
std::vector<Polymer> enumerate_polymers(const AdjacencyGraph& G, std::uint32_t anchor, int J,
                                        int max_cutoff = 8);

bool polymers_touch(const AdjacencyGraph& G, const Polymer& a, const Polymer& b);

// Signed sum over connected graphs on k labelled vertices using only edges
// allowed by touch[i] (bit j set iff i ~ j). k <= 20.
double ursell_from_masks(std::span<const std::uint32_t> touch);

struct Cluster {
    Phase phase = Phase::Higgs;
    std::vector<Polymer> polymers;  // distinct
    std::vector<int> multiplicity;

    int n() const;
    // sum over polymers of multiplicity * |support|
    int norm() const;
    double symmetry_factor() const;  // prod n_eta!
    bool operator==(const Cluster&) const = default;
};

double ursell(const AdjacencyGraph& G, const Cluster& S, int kmax = 6);
bool is_cluster(const AdjacencyGraph& G, const Cluster& S);

// ||S||_2: sum over polymers of multiplicity * |(supp d eta)^+|
int higgs_norm2(const BoxGeometry& g, const Cluster& S);
// ||S||_gamma-type count: sum of multiplicity * |supp delta eta meeting gamma|
int conf_gamma_norm(const BoxGeometry& g, const Cluster& S, const Chain& gamma);

// U(S) / prod n! * exp(-4 beta ||S||_2 - 4 kappa ||S||_1)
double psi_higgs(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, double beta, double kappa);
// U(S) / prod n! * prod phi^gamma(eta)^{n_eta}
double psi_conf(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, const Chain& gamma, double beta,
                double kappa);

// -------------------------------------------------------------------------
// Streaming cluster enumeration.

struct LocalPolymer {
    std::uint32_t mask;               // subset of the current support, in local indices
    std::vector<std::uint32_t> cells;  // global cell ids, sorted
};

struct ClusterTerm {
    std::span<const int> polymer;  // indices into the support's polymer table, nondecreasing
    int n;
    double ursell;
    double inv_symmetry;  // 1 / prod n_eta!
};

struct ClusterCutoffs {
    int J = 4;     // maximal ||S|| (total cells counted with multiplicity)
    int kmax = 6;  // maximal number of polymers
};

class ClusterEnumerator {
public:
    using SupportFn = std::function<void(std::span<const std::uint32_t>, std::span<const LocalPolymer>)>;
    using ClusterFn = std::function<void(const ClusterTerm&)>;

    ClusterEnumerator(const AdjacencyGraph& G, ClusterCutoffs cut);

    // All clusters whose union of supports is a connected set containing root
    // and avoiding forbidden cells / cells below min_index.
    void rooted(std::uint32_t root, const SupportFn& on_support, const ClusterFn& on_cluster,
                std::span<const char> forbidden = {}, std::uint32_t min_index = 0) const;
    // Every cluster in the box, each exactly once.
    void all(const SupportFn& on_support, const ClusterFn& on_cluster) const;

private:
    const AdjacencyGraph& G_;
    ClusterCutoffs cut_;
    void expand_support(std::span<const std::uint32_t> U, const SupportFn& on_support,
                        const ClusterFn& on_cluster) const;
};

// -------------------------------------------------------------------------
// Convergence constants.

struct HiggsConstants {
    int d = 2;
    int M1 = 6;
    double alpha = 0.0;
    double kappa0 = 0.0;
};
HiggsConstants higgs_constants(int d);

// Closed-form upper bound on C_eps evaluated at kappa' = kappa0 + eps;
// nullopt when the bound's denominator is not positive.
std::optional<double> c_eps_bound(int d, double eps);
// Smallest eps for which the C_eps bound is finite.
double c_eps_min(int d);

struct HiggsTail {
    double eps = 0.0;
    double c_eps = 0.0;
    double x = 0.0;  // exp(-4 (kappa - kappa0 - eps))
    // sum over clusters through a fixed edge with ||S||_1 >= k is at most (c_eps / 4) x^k
    double per_edge(int k) const;
};
// Default eps is the midpoint of the admissible window; throws RegimeError if empty.
HiggsTail higgs_tail(int d, double kappa, std::optional<double> eps = std::nullopt);

struct ConfConstants {
    int d = 2;
    int M2 = 4;
    double beta0 = 0.0;
};
ConfConstants conf_constants(int d);

// Whether some alpha in (0,1) satisfies the confinement convergence condition at beta.
bool conf_feasible(int d, double beta);
// inf of the feasible alpha set at beta (nullopt if empty).
std::optional<double> conf_alpha(int d, double beta);
// C^(2) = s / (1 - M2^2 s) with s = tanh(2 beta)^(1 - alpha_beta); nullopt outside the regime.
std::optional<double> conf_c2(int d, double beta);

struct ConfTail {
    double eps = 0.0;
    double c2 = 0.0;  // evaluated at beta + eps
    double r = 0.0;   // tanh(2 beta) / tanh(2 (beta + eps))
    // sum over clusters through a fixed plaquette with ||S|| >= k is at most c2 r^k
    double per_plaquette(int k) const;
};
ConfTail conf_tail(int d, double beta, std::optional<double> eps = std::nullopt);

struct LogZResult {
    double value = 0.0;
    double tail_bound = 0.0;
    std::size_t clusters = 0;
};

// Truncated cluster sum for log Z^U[gamma] (Higgs) or log sum_omega phi^gamma(omega) (confinement).
LogZResult log_z_cluster(Phase phase, const ModelParams& p, const Chain& gamma, ClusterCutoffs cut,
                         std::optional<double> eps = std::nullopt);

}  // namespace latthiggs
