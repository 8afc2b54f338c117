#include <gtest/gtest.h>

#include <cmath>

#include "latthiggs/asymptotics.hpp"
#include "latthiggs/errors.hpp"
#include "latthiggs/hte.hpp"
#include "latthiggs/oracle.hpp"

using namespace latthiggs;

namespace {

ModelParams params(int N, double beta, double kappa) {
    ModelParams p;
    p.d = 2;
    p.N = N;
    p.beta = beta;
    p.kappa = kappa;
    return p;
}

Cluster from_term(Phase ph, const ClusterTerm& t, const std::vector<std::vector<std::uint32_t>>& table) {
    Cluster S{ph, {}, {}};
    for (std::size_t i = 0; i < t.polymer.size(); ++i) {
        if (i > 0 && t.polymer[i] == t.polymer[i - 1]) {
            ++S.multiplicity.back();
        } else {
            S.polymers.push_back(Polymer{ph, table[t.polymer[i]]});
            S.multiplicity.push_back(1);
        }
    }
    return S;
}

struct Residuals {
    std::vector<double> r, bound;
};

Residuals residuals(const DecaySummary& s, int N, int nmax) {
    auto p = params(N, s.beta, s.kappa);
    BoxGeometry g(2, N);
    Residuals out;
    for (int n = 1; n <= nmax; ++n) {
        auto tm = transfer_matrix_expectation(p, n);
        std::vector<int> o{tm.x0, tm.y0};
        int M = finite_box_margin(s.phase, g, straight_path(g, o, 0, n));
        out.r.push_back(std::abs(static_cast<double>(tm.neg_log) - s.a * n - s.C));
        out.bound.push_back(s.residual_bound(n, M));
    }
    return out;
}

}  // namespace

TEST(LinePaths, NestingAndPositions) {
    BoxGeometry g(2, 6);
    LinePaths L(g, {3, 3});
    Chain seg = L.segment(2), half = L.half_line(), full = L.full_line();
    EXPECT_EQ(seg.support_size(), 2u);
    EXPECT_EQ(half.support_size(), 3u);
    EXPECT_EQ(full.support_size(), 6u);
    for (std::size_t e = 0; e < seg.size(); ++e) {
        if (seg[e]) EXPECT_TRUE(half[e]);
        if (half[e]) EXPECT_TRUE(full[e]);
    }
    for (int t = -3; t < 3; ++t) EXPECT_EQ(L.position(*L.edge_at(t)), t);
    EXPECT_FALSE(L.edge_at(3).has_value());
    EXPECT_EQ(L.position(L.e0()), 0);
    EXPECT_THROW(L.segment(4), std::out_of_range);
}

TEST(Weights, FWeightCases) {
    BoxGeometry g(2, 6);
    AdjacencyGraph G(Phase::Higgs, g);
    LinePaths L(g, {3, 3});
    Chain line = L.full_line();
    double b = 0.3, k = 1.1;
    Polymer e{Phase::Higgs, {L.e0()}};
    EXPECT_NEAR(f_weight(g, G, Cluster{Phase::Higgs, {e}, {1}}, line, b, k), 2 * std::exp(-4 * k - 8 * b), 1e-16);
    // {e, e}: S(gamma) = 2 is even
    EXPECT_EQ(f_weight(g, G, Cluster{Phase::Higgs, {e}, {2}}, line, b, k), 0.0);
    // two line edges in one polymer: even parity again
    Cell c{{3, 3}, {1}, 1};
    Polymer hook{Phase::Higgs, {L.e0(), static_cast<std::uint32_t>(g.index(c))}};
    std::sort(hook.cells.begin(), hook.cells.end());
    double psi = psi_higgs(g, G, Cluster{Phase::Higgs, {hook}, {1}}, b, k);
    EXPECT_NEAR(f_weight(g, G, Cluster{Phase::Higgs, {hook}, {1}}, line, b, k), 2 * psi, 1e-18);
    Polymer off{Phase::Higgs, {static_cast<std::uint32_t>(g.index(Cell{{0, 0}, {0}, 1}))}};
    EXPECT_THROW(f_weight(g, G, Cluster{Phase::Higgs, {off}, {1}}, line, b, k), std::invalid_argument);
}

TEST(Weights, GWeightSinglePlaquette) {
    BoxGeometry g(2, 6);
    AdjacencyGraph G(Phase::Confinement, g);
    LinePaths L(g, {3, 3});
    Chain line = L.full_line();
    double b = 0.2, k = 0.35;
    double tb = std::tanh(2 * b), tk = std::tanh(2 * k);
    Polymer above{Phase::Confinement, {static_cast<std::uint32_t>(g.index(Cell{{3, 3}, {0, 1}, 1}))}};
    double psi0 = tb * std::pow(tk, 4);
    EXPECT_NEAR(g_weight(g, G, Cluster{Phase::Confinement, {above}, {1}}, line, b, k), (std::pow(tk, -2) - 1) * psi0,
                1e-15);
    Polymer far{Phase::Confinement, {static_cast<std::uint32_t>(g.index(Cell{{0, 0}, {0, 1}, 1}))}};
    EXPECT_THROW(g_weight(g, G, Cluster{Phase::Confinement, {far}, {1}}, line, b, k), std::invalid_argument);
}

TEST(Decay, HiggsStreamingMatchesMaterializedWeights) {
    DecayOptions opt;
    opt.cut = {3, 6};
    double b = 0.4, k = 1.6;
    auto s = decay_constants_higgs(2, b, k, opt);
    BoxGeometry g(2, s.box_N);
    AdjacencyGraph G(Phase::Higgs, g);
    LinePaths L(g, {s.box_N / 2, s.box_N / 2});
    Chain line = L.full_line();
    ClusterEnumerator en(G, opt.cut);
    std::vector<std::vector<std::uint32_t>> table;
    double a = 0;
    en.rooted(
        L.e0(),
        [&](std::span<const std::uint32_t>, std::span<const LocalPolymer> polys) {
            table.clear();
            for (auto& p : polys) table.push_back(p.cells);
        },
        [&](const ClusterTerm& t) { a += f_weight(g, G, from_term(Phase::Higgs, t, table), line, b, k); });
    EXPECT_NEAR(s.a, a, 1e-13 * std::abs(a));
}

TEST(Decay, ConfStreamingMatchesMaterializedWeights) {
    double b0 = conf_constants(2).beta0;
    DecayOptions opt;
    opt.cut = {3, 6};
    double b = 0.5 * b0, k = 0.3;
    auto s = decay_constants_conf(2, b, k, opt);
    BoxGeometry g(2, s.box_N);
    AdjacencyGraph G(Phase::Confinement, g);
    LinePaths L(g, {s.box_N / 2, s.box_N / 2});
    Chain line = L.full_line();
    ClusterEnumerator en(G, opt.cut);
    std::vector<std::vector<std::uint32_t>> table;
    double sum = 0;
    std::vector<char> forb(G.size(), 0);
    for (auto p : g.cofaces(1, L.e0())) {
        en.rooted(
            p.cell,
            [&](std::span<const std::uint32_t>, std::span<const LocalPolymer> polys) {
                table.clear();
                for (auto& q : polys) table.push_back(q.cells);
            },
            [&](const ClusterTerm& t) {
                Cluster S = from_term(Phase::Confinement, t, table);
                // e0 must lie in the union of the polymer boundaries
                bool hit = false;
                for (auto& poly : S.polymers) hit |= coderivative(g, poly.to_form(g))[L.e0()] != 0;
                if (hit) sum += g_weight(g, G, S, line, b, k);
            },
            forb);
        forb[p.cell] = 1;
    }
    EXPECT_NEAR(s.a, -std::log(std::tanh(2 * k)) - sum, 1e-15);
}

TEST(Decay, BetaZeroReproducesTanhLaw) {
    for (double k : {1.5, 2.0}) {
        auto h = decay_constants_higgs(2, 0.0, k);
        double want = -std::log(std::tanh(2 * k));
        EXPECT_LE(std::abs(h.a - want), h.a_tail) << k;
        EXPECT_LE(std::abs(h.C), h.C_tail) << k;
    }
    for (double k : {0.2, 0.5, 2.0}) {
        auto c = decay_constants_conf(2, 0.0, k);
        EXPECT_EQ(c.a, -std::log(std::tanh(2 * k)));
        EXPECT_EQ(c.C, 0.0);
        EXPECT_EQ(c.a_tail, 0.0);
        EXPECT_EQ(c.D, 0.0);
    }
    // both phases agree on a at beta = 0 within combined tails
    auto h = decay_constants_higgs(2, 0.0, 2.0);
    auto c = decay_constants_conf(2, 0.0, 2.0);
    EXPECT_LE(std::abs(h.a - c.a), h.a_tail + c.a_tail);
}

TEST(Decay, ZeroCutoff) {
    DecayOptions opt;
    opt.cut = {0, 6};
    auto h = decay_constants_higgs(2, 0.5, 2.0, opt);
    EXPECT_EQ(h.a, 0.0);
    EXPECT_EQ(h.C, 0.0);
    EXPECT_NEAR(h.a_tail, 2 * h.c * h.x, 1e-16);
    auto c = decay_constants_conf(2, 0.5 * conf_constants(2).beta0, 0.5, opt);
    EXPECT_EQ(c.a, -std::log(std::tanh(1.0)));
}

TEST(Decay, TailsShrinkWithCutoff) {
    double prev_a = INFINITY, prev_c = INFINITY;
    for (int J = 1; J <= 6; ++J) {
        DecayOptions opt;
        opt.cut = {J, 6};
        auto h = decay_constants_higgs(2, 0.5, 2.0, opt);
        EXPECT_GE(h.a_tail, 0.0);
        EXPECT_LT(h.a_tail, prev_a);
        EXPECT_LT(h.C_tail, prev_c);
        prev_a = h.a_tail;
        prev_c = h.C_tail;
    }
}

TEST(Decay, SuccessiveTruncationsWithinTails) {
    DecayOptions o1, o2;
    for (int J = 2; J <= 5; ++J) {
        o1.cut = {J, 6};
        o2.cut = {J + 1, 6};
        auto s1 = decay_constants_higgs(2, 0.5, 1.6, o1), s2 = decay_constants_higgs(2, 0.5, 1.6, o2);
        EXPECT_LE(std::abs(s2.a - s1.a), s1.a_tail) << J;
        EXPECT_LE(std::abs(s2.C - s1.C), s1.C_tail) << J;
    }
}

TEST(Decay, StableUnderBoxEnlargement) {
    DecayOptions o1, o2;
    o1.cut = o2.cut = {4, 6};
    o2.N = 2 * (2 * 4 + 4) + 2;
    auto s1 = decay_constants_higgs(2, 0.5, 2.0, o1), s2 = decay_constants_higgs(2, 0.5, 2.0, o2);
    EXPECT_EQ(s1.clusters_a, s2.clusters_a);
    EXPECT_NEAR(s1.a, s2.a, std::min(s1.a_tail, 1e-15 * s1.a));
    EXPECT_NEAR(s1.C, s2.C, std::min(s1.C_tail, 1e-15 * std::abs(s1.C) + 1e-300));
    o1.N = 6;
    EXPECT_THROW(decay_constants_higgs(2, 0.5, 2.0, o1), std::logic_error);
}

TEST(Decay, RegimeErrors) {
    EXPECT_THROW(decay_constants_higgs(2, 0.5, 1.0), RegimeError);
    EXPECT_THROW(decay_constants_conf(2, 0.1, 0.5), RegimeError);
    EXPECT_THROW(decay_constants_conf(2, 1e-4, 0.0), RegimeError);
}

TEST(Decay, HiggsResidualWithinBoundOnTransferMatrix) {
    auto s = decay_constants_higgs(2, 0.5, 2.0);
    auto r = residuals(s, 12, 8);
    for (std::size_t i = 0; i < r.r.size(); ++i) EXPECT_LE(r.r[i], r.bound[i]) << "n=" << i + 1;
    EXPECT_GT(s.a, 0.0);
    EXPECT_GT(s.D_prime, 0.0);
}

TEST(Decay, ConfResidualWithinBoundOnTransferMatrix) {
    double b0 = conf_constants(2).beta0;
    auto s = decay_constants_conf(2, 0.5 * b0, 0.5);
    auto r = residuals(s, 12, 8);
    for (std::size_t i = 0; i < r.r.size(); ++i) EXPECT_LE(r.r[i], r.bound[i]) << "n=" << i + 1;
}

TEST(Decay, EnvelopeDominatesItsSupremum) {
    auto s = decay_constants_higgs(2, 0.5, 2.0);
    for (int n = 1; n < 60; ++n) EXPECT_LE(s.envelope(n), s.D * std::exp(-s.D_prime * n) * (1 + 1e-12));
}

TEST(FiniteBox, MarginGrowsWithBox) {
    BoxGeometry g8(2, 8), g12(2, 12);
    std::vector<int> o8{3, 4}, o12{5, 6};
    int m8 = finite_box_margin(Phase::Higgs, g8, straight_path(g8, o8, 0, 2));
    int m12 = finite_box_margin(Phase::Higgs, g12, straight_path(g12, o12, 0, 2));
    EXPECT_GT(m12, m8);
    EXPECT_GE(m8, 2);
    EXPECT_GT(finite_box_margin(Phase::Confinement, g12, straight_path(g12, o12, 0, 2)), 1);
    std::vector<int> corner{0, 0};
    EXPECT_EQ(finite_box_margin(Phase::Higgs, g12, straight_path(g12, corner, 0, 1)), 1);
}

TEST(Fit, BetaZeroDataIsExactlyLinear) {
    double k = 0.4, t = std::tanh(2 * k);
    std::map<int, double> E;
    for (int n = 1; n <= 8; ++n) E[n] = std::pow(t, n);
    auto f = perimeter_fit(E, sandwich_rate(2, 2, k));
    EXPECT_NEAR(f.a_hat, -std::log(t), 1e-14);
    for (auto [n, r] : f.rate) EXPECT_NEAR(r, -std::log(t), 1e-14);
    EXPECT_TRUE(f.superadditivity.passed);
    EXPECT_TRUE(f.sandwich.lower_passed);
    EXPECT_TRUE(f.sandwich.upper_passed);
    EXPECT_NEAR(f.sandwich.b, -std::log(t), 1e-14);
    E.erase(3);
    E.erase(4);
    E.erase(5);
    E.erase(6);
    E.erase(7);
    E.erase(8);
    EXPECT_THROW(perimeter_fit(E, 1.0), std::invalid_argument);
}

TEST(Fit, SandwichRateMatchesBarphi) {
    EXPECT_NEAR(sandwich_rate(2, 2, 0.3), -std::log(std::tanh(0.6)), 1e-14);
    double lo = std::min({barphi(6, 0.5, 0), barphi(6, 0.5, 1), barphi(6, 0.5, 2), barphi(6, 0.5, 3)});
    EXPECT_NEAR(sandwich_rate(2, 3, 0.5), -std::log(lo / barphi(6, 0.5, 0)), 1e-12);
}

TEST(Fit, TransferMatrixDataIsSuperadditiveAndAboveLowerBound) {
    auto p = params(12, 0.2, 0.5);
    auto rep = positioned_superadditivity(p, 8);
    EXPECT_TRUE(rep.passed) << rep.max_violation;
    EXPECT_EQ(rep.checks, 28u);
    std::map<int, double> E;
    for (int n = 1; n <= 8; ++n) E[n] = transfer_matrix_expectation(p, n).expectation;
    auto f = perimeter_fit(E, sandwich_rate(2, 2, 0.5));
    EXPECT_TRUE(f.sandwich.lower_passed);
    // Griffiths gives E_n >= E_1^n, the opposite of the upper half of the sandwich
    for (auto [n, v] : E) EXPECT_GE(std::log(v), n * std::log(E[1]) - 1e-12);
}
