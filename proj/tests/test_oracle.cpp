#include <gtest/gtest.h>

#include <cmath>

#include "latthiggs/errors.hpp"
#include "latthiggs/oracle.hpp"

using namespace latthiggs;

namespace {

ModelParams params(int N, double beta, double kappa, int m = 2, int n = 2) {
    ModelParams p;
    p.d = 2;
    p.N = N;
    p.m = m;
    p.n = n;
    p.beta = beta;
    p.kappa = kappa;
    return p;
}

Chain line(const BoxGeometry& g, int x, int y, int len) {
    std::vector<int> o{x, y};
    return straight_path(g, o, 0, len);
}

}  // namespace

TEST(ExactCoupled, SingleEdgeAtZeroBeta) {
    BoxGeometry g(2, 1);
    for (double k : {0.1, 0.4, 1.3}) {
        auto e = exact_coupled_expectation(line(g, 0, 0, 1), params(1, 0.0, k));
        EXPECT_NEAR(e.real(), std::tanh(2 * k), 1e-13);
        EXPECT_NEAR(e.imag(), 0.0, 1e-15);
    }
}

TEST(ExactCoupled, StrongCouplingConcentratesOnVacuum) {
    BoxGeometry g(2, 1);
    auto e = exact_coupled_expectation(line(g, 0, 0, 1), params(1, 0.5, 10.0));
    EXPECT_NEAR(e.real(), 1.0, 1e-6);
}

TEST(ExactCoupled, PlaquetteLoopOnUnitSquare) {
    // 16-term sum over sigma in unitary gauge; closed form via even/odd parity split
    double b = 0.3, k = 0.2;
    double c = std::exp(2 * k), s = std::exp(-2 * k);
    double A = (std::pow(c + s, 4) + std::pow(c - s, 4)) / 2;
    double B = (std::pow(c + s, 4) - std::pow(c - s, 4)) / 2;
    double ref = (std::exp(2 * b) * A - std::exp(-2 * b) * B) / (std::exp(2 * b) * A + std::exp(-2 * b) * B);
    EXPECT_NEAR(ref, 0.5517148249974768, 1e-15);

    BoxGeometry g(2, 1);
    Chain p = Chain::zero(g, 2);
    p[0] = 1;
    auto e = exact_coupled_expectation(boundary(g, p), params(1, b, k));
    EXPECT_NEAR(e.real(), 0.5517148249974768, 1e-13);
}

TEST(ExactCoupled, ConfigCountAndBudget) {
    BoxGeometry g(2, 1);
    Chain gm = line(g, 0, 0, 1);
    auto r = exact_coupled(params(1, 0.1, 0.1, 2, 3), std::span<const Chain>(&gm, 1));
    EXPECT_EQ(r.config_count, 16u * 81u);
    auto u = exact_unitary(params(1, 0.1, 0.1), std::span<const Chain>(&gm, 1));
    EXPECT_EQ(u.config_count, 16u);
    EnumerationOptions small;
    small.budget = 100;
    EXPECT_THROW(exact_coupled(params(1, 0.1, 0.1), std::span<const Chain>(&gm, 1), small), BudgetError);
}

TEST(ExactUnitary, MatchesCoupledOnSmallGrid) {
    BoxGeometry g(2, 1);
    std::vector<Chain> gs{line(g, 0, 0, 1), line(g, 0, 1, 1)};
    Chain corner = line(g, 0, 0, 1);
    corner.add(g, Cell{{1, 0}, {1}, 1});
    gs.push_back(corner);
    for (double b : {0.0, 0.2, 0.5, 1.0})
        for (double k : {0.0, 0.2, 0.5, 1.0}) {
            auto c = exact_coupled(params(1, b, k), gs);
            auto u = exact_unitary(params(1, b, k), gs);
            for (std::size_t i = 0; i < gs.size(); ++i) EXPECT_NEAR(std::abs(c.expectations[i] - u.expectations[i]), 0.0, 1e-12);
        }
}

TEST(ExactUnitary, ZeroBetaFactorizes) {
    BoxGeometry g(2, 2);
    for (int len : {1, 2}) {
        auto e = exact_unitary_expectation(line(g, 0, 1, len), params(2, 0.0, 0.35));
        EXPECT_NEAR(e.real(), std::pow(std::tanh(0.7), len), 1e-13);
    }
    EXPECT_NEAR(exact_unitary_expectation(Chain::zero(g, 1), params(2, 0.4, 0.3)).real(), 1.0, 1e-15);
    EXPECT_THROW(exact_unitary_expectation(Chain::zero(g, 1), params(2, 0.4, 0.3, 2, 3)), UnsupportedError);
}

TEST(ExactCoupled, DeterministicAcrossWorkerCounts) {
    BoxGeometry g(2, 1);
    Chain gm = line(g, 0, 0, 1);
    EnumerationOptions a, b;
    a.jobs = 1;
    b.jobs = 3;
    auto ra = exact_coupled(params(1, 0.3, 0.7, 3, 2), std::span<const Chain>(&gm, 1), a);
    auto rb = exact_coupled(params(1, 0.3, 0.7, 3, 2), std::span<const Chain>(&gm, 1), b);
    EXPECT_EQ(ra.log_z, rb.log_z);
    EXPECT_EQ(ra.expectations[0], rb.expectations[0]);
}

TEST(ExactCoupled, LoopsAreRealForLargerGroups) {
    BoxGeometry g(2, 1);
    Chain p = Chain::zero(g, 2);
    p[0] = 1;
    Chain loop = boundary(g, p);
    auto e = exact_coupled_expectation(loop, params(1, 0.4, 0.3, 3, 4));
    EXPECT_NEAR(e.imag(), 0.0, 1e-14);
}

TEST(TransferMatrix, MatchesEnumeration) {
    BoxGeometry g(2, 2);
    for (double b : {0.0, 0.3, 0.9})
        for (double k : {0.1, 0.5})
            for (int len : {1, 2})
                for (int x0 = 0; x0 + len <= 2; ++x0)
                    for (int y0 = 0; y0 <= 2; ++y0) {
                        auto u = exact_unitary_expectation(line(g, x0, y0, len), params(2, b, k)).real();
                        auto t = transfer_matrix_expectation(params(2, b, k), len, x0, y0);
                        EXPECT_NEAR(t.expectation, u, 1e-10) << b << " " << k << " " << len << " " << x0 << " " << y0;
                        EXPECT_NEAR(t.neg_log, -std::log(u), 1e-9);
                    }
    BoxGeometry g3(2, 3);
    auto u = exact_unitary_expectation(line(g3, 0, 1, 3), params(3, 0.4, 0.3)).real();
    EXPECT_NEAR(transfer_matrix_expectation(params(3, 0.4, 0.3), 3, 0, 1).expectation, u, 1e-10);
}

TEST(TransferMatrix, ZeroBetaLaw) {
    for (int n = 1; n <= 8; ++n) {
        auto t = transfer_matrix_expectation(params(10, 0.0, 0.4), n);
        EXPECT_NEAR(t.expectation, std::pow(std::tanh(0.8), n), 1e-12);
    }
}

TEST(TransferMatrix, DecreasesWithLength) {
    double prev = 1.0;
    for (int n = 1; n <= 8; ++n) {
        double e = transfer_matrix_expectation(params(10, 0.3, 0.5), n, 1, 5).expectation;
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(TransferMatrix, RejectsUnsupportedModels) {
    EXPECT_THROW(transfer_matrix_expectation(params(4, 0.1, 0.1, 3, 3), 1), UnsupportedError);
    ModelParams p = params(4, 0.1, 0.1);
    p.d = 3;
    EXPECT_THROW(transfer_matrix_expectation(p, 1), UnsupportedError);
    EXPECT_THROW(transfer_matrix_expectation(params(13, 0.1, 0.1), 1), UnsupportedError);
}

TEST(Monotonicity, GridOnSmallBox) {
    BoxGeometry g(2, 2);
    std::vector<double> grid;
    for (int i = 0; i <= 5; ++i) grid.push_back(0.2 * i);
    auto rep = check_monotonicity(params(2, 0, 0), line(g, 0, 1, 2), grid, grid);
    EXPECT_TRUE(rep.passed);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_EQ(rep.comparisons, 2u * 5u * 6u);

    std::vector<double> zero{0.0};
    auto col = check_monotonicity(params(2, 0, 0), line(g, 0, 1, 1), grid, zero);
    EXPECT_TRUE(col.passed);
    auto single = check_monotonicity(params(2, 0, 0), line(g, 0, 1, 1), zero, zero);
    EXPECT_TRUE(single.passed);
    EXPECT_EQ(single.comparisons, 0u);
}

TEST(Griffiths, SingleEdges) {
    BoxGeometry g(2, 2);
    auto r = check_griffiths(params(2, 0.3, 0.3), line(g, 0, 1, 1), line(g, 1, 1, 1));
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.joint, r.product);

    auto z = check_griffiths(params(2, 0.0, 0.0), line(g, 0, 1, 1), line(g, 1, 1, 1));
    EXPECT_TRUE(z.passed);
    EXPECT_NEAR(z.product, 0.0, 1e-15);

    auto e = check_griffiths(params(2, 0.4, 0.2), line(g, 0, 1, 2), Chain::zero(g, 1));
    EXPECT_NEAR(e.joint, e.product, 1e-15);
}
