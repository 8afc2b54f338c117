#include <gtest/gtest.h>

#include <random>

#include "latthiggs/dec.hpp"
#include "latthiggs/errors.hpp"

using namespace latthiggs;

namespace {

Form random_form(const BoxGeometry& g, int k, int q, std::mt19937& rng) {
    Form f = Form::zero(g, k, q);
    std::uniform_int_distribution<int> dist(0, q - 1);
    for (std::size_t i = 0; i < f.size(); ++i) f.set(i, dist(rng));
    return f;
}

Chain random_chain(const BoxGeometry& g, int k, std::mt19937& rng) {
    Chain c = Chain::zero(g, k);
    std::uniform_int_distribution<int> dist(-3, 3);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = dist(rng);
    return c;
}

// Counts cells by scanning every vertex and every axis subset.
std::size_t brute_count(int d, int N, int k) {
    std::size_t total = 0;
    std::size_t nv = 1;
    for (int i = 0; i < d; ++i) nv *= static_cast<std::size_t>(N + 1);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        for (std::size_t v = 0; v < nv; ++v) {
            std::size_t r = v;
            bool ok = true;
            for (int i = 0; i < d; ++i) {
                int x = static_cast<int>(r % static_cast<std::size_t>(N + 1));
                r /= static_cast<std::size_t>(N + 1);
                if ((mask >> i & 1) && x + 1 > N) ok = false;
            }
            total += ok;
        }
    }
    return total;
}

}  // namespace

TEST(BoxGeometry, CellCountsMatchFormulaAndScan) {
    for (int d : {2, 3, 4})
        for (int N : {1, 2, 3}) {
            BoxGeometry g(d, N);
            for (int k = 0; k <= d; ++k) {
                EXPECT_EQ(g.count(k), BoxGeometry::count_formula(d, N, k)) << d << " " << N << " " << k;
                EXPECT_EQ(g.count(k), brute_count(d, N, k)) << d << " " << N << " " << k;
            }
        }
}

TEST(BoxGeometry, IndexRoundTrip) {
    BoxGeometry g(3, 2);
    for (int k = 0; k <= 3; ++k)
        for (std::size_t i = 0; i < g.count(k); ++i) {
            Cell c = g.cell(k, i);
            EXPECT_TRUE(g.contains(c));
            EXPECT_EQ(g.index(c), i);
            EXPECT_EQ(g.index(-c), i);
        }
}

TEST(BoxGeometry, RejectsCellsOutsideBox) {
    BoxGeometry g(2, 2);
    Cell c{{2, 0}, {0}, 1};
    EXPECT_FALSE(g.contains(c));
    EXPECT_THROW(g.index(c), std::out_of_range);
    Cell unsorted{{0, 0}, {1, 0}, 1};
    EXPECT_FALSE(g.contains(unsorted));
}

TEST(Form, NegativeCellsTakeNegatedValue) {
    BoxGeometry g(2, 1);
    Form f = Form::zero(g, 1, 5);
    Cell e{{0, 0}, {0}, 1};
    f.set(g.index(e), 2);
    EXPECT_EQ(f.at(g, e), 2);
    EXPECT_EQ(f.at(g, -e), 3);
}

TEST(ExteriorDerivative, ZeroFormMapsToZero) {
    BoxGeometry g(3, 2);
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(exterior_derivative(g, Form::zero(g, k, 3)).is_zero());
}

TEST(ExteriorDerivative, SquaresToZero) {
    std::mt19937 rng(11);
    BoxGeometry g3(3, 2);
    for (int t = 0; t < 200; ++t) {
        Form f = random_form(g3, 0, 2, rng);
        EXPECT_TRUE(exterior_derivative(g3, exterior_derivative(g3, f)).is_zero());
    }
    int cases = 0;
    for (int d : {2, 3, 4}) {
        BoxGeometry g(d, 2);
        for (int q : {2, 3, 4, 6})
            for (int k = 0; k + 2 <= d; ++k)
                for (int t = 0; t < 50; ++t, ++cases) {
                    Form f = random_form(g, k, q, rng);
                    ASSERT_TRUE(exterior_derivative(g, exterior_derivative(g, f)).is_zero());
                }
    }
    EXPECT_GE(cases, 1000);
}

TEST(ExteriorDerivative, SingleEdgeOnUnitSquare) {
    BoxGeometry g(2, 1);
    Form s = Form::zero(g, 1, 2);
    s.set(g.index(Cell{{0, 0}, {0}, 1}), 1);
    Form ds = exterior_derivative(g, s);
    ASSERT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds[0], 1);
}

TEST(ExteriorDerivative, DegreeOutOfRange) {
    BoxGeometry g(2, 1);
    EXPECT_THROW(exterior_derivative(g, Form::zero(g, 2, 2)), DegreeError);
    EXPECT_THROW(coderivative(g, Form::zero(g, 0, 2)), DegreeError);
}

TEST(Coderivative, SquaresToZero) {
    std::mt19937 rng(12);
    BoxGeometry g(3, 2);
    for (int t = 0; t < 200; ++t) {
        Form w = random_form(g, 2, 2, rng);
        EXPECT_TRUE(coderivative(g, coderivative(g, w)).is_zero());
    }
    for (int q : {2, 3, 4, 6})
        for (int k = 2; k <= 3; ++k)
            for (int t = 0; t < 50; ++t) {
                Form w = random_form(g, k, q, rng);
                ASSERT_TRUE(coderivative(g, coderivative(g, w)).is_zero());
            }
    EXPECT_TRUE(coderivative(g, Form::zero(g, 2, 2)).is_zero());
}

TEST(Coderivative, PlaquetteIndicatorGivesItsFourEdges) {
    BoxGeometry g(2, 1);
    Form w = Form::zero(g, 2, 2);
    w.set(0, 1);
    Form dw = coderivative(g, w);
    EXPECT_EQ(dw.size(), 4u);
    EXPECT_EQ(dw.support_size(), 4u);
}

TEST(Coderivative, AdjointToExteriorDerivative) {
    std::mt19937 rng(13);
    for (int d : {2, 3}) {
        BoxGeometry g(d, 2);
        for (int q : {2, 3, 4, 6})
            for (int k = 0; k < d; ++k)
                for (int t = 0; t < 20; ++t) {
                    Form w = random_form(g, k, q, rng);
                    Form eta = random_form(g, k + 1, q, rng);
                    Form dw = exterior_derivative(g, w);
                    Form de = coderivative(g, eta);
                    long long lhs = 0, rhs = 0;
                    for (std::size_t p = 0; p < dw.size(); ++p) lhs += dw[p] * eta[p];
                    for (std::size_t e = 0; e < w.size(); ++e) rhs += w[e] * de[e];
                    EXPECT_EQ(((lhs - rhs) % q + q) % q, 0);
                }
    }
}

TEST(Boundary, SquaresToZeroOnPlaquettes) {
    BoxGeometry g(4, 2);
    for (std::size_t p = 0; p < g.count(2); ++p) {
        Chain c = Chain::zero(g, 2);
        c[p] = 1;
        Chain bb = boundary(g, boundary(g, c));
        EXPECT_EQ(bb.support_size(), 0u);
    }
}

TEST(Boundary, StraightPathTelescopes) {
    BoxGeometry g(3, 4);
    Chain c = Chain::zero(g, 1);
    for (int i = 0; i < 3; ++i) c.add(g, Cell{{i, 0, 0}, {0}, 1});
    Chain b = boundary(g, c);
    EXPECT_EQ(b.support_size(), 2u);
    EXPECT_EQ(b[g.index(Cell{{3, 0, 0}, {}, 1})], 1);
    EXPECT_EQ(b[g.index(Cell{{0, 0, 0}, {}, 1})], -1);
}

TEST(Boundary, PlaquetteIsOrientedSquare) {
    BoxGeometry g(2, 2);
    Chain p = Chain::zero(g, 2);
    p.add(g, Cell{{0, 0}, {0, 1}, 1});
    Chain b = boundary(g, p);
    EXPECT_EQ(b.support_size(), 4u);
    EXPECT_EQ(b[g.index(Cell{{0, 0}, {0}, 1})], 1);
    EXPECT_EQ(b[g.index(Cell{{1, 0}, {1}, 1})], 1);
    EXPECT_EQ(b[g.index(Cell{{0, 1}, {0}, 1})], -1);
    EXPECT_EQ(b[g.index(Cell{{0, 0}, {1}, 1})], -1);
    EXPECT_EQ(boundary(g, b).support_size(), 0u);
}

TEST(HatBoundary, CountsPlaquettesAroundBulkEdge) {
    for (int d : {2, 3, 4}) {
        BoxGeometry g(d, 2);
        std::vector<int> a(d, 1);
        a[0] = 0;
        Cell e{a, {0}, 1};
        EXPECT_EQ(hat_boundary(g, 1, g.index(e)).support_size(), static_cast<std::size_t>(2 * (d - 1)));
        EXPECT_TRUE(g.edge_complete(g.index(e)));
    }
}

TEST(Evaluate, ZeroChainAndLinearity) {
    std::mt19937 rng(14);
    BoxGeometry g(2, 3);
    for (int q : {2, 3, 5}) {
        Form w = random_form(g, 1, q, rng);
        EXPECT_EQ(evaluate(w, Chain::zero(g, 1)), 0);
        for (int t = 0; t < 50; ++t) {
            Chain a = random_chain(g, 1, rng), b = random_chain(g, 1, rng);
            EXPECT_EQ(evaluate(w, a + b), (evaluate(w, a) + evaluate(w, b)) % q);
        }
    }
    EXPECT_THROW(evaluate(Form::zero(g, 1, 2), Chain::zero(g, 2)), DegreeError);
}

TEST(Evaluate, StokesIdentity) {
    std::mt19937 rng(15);
    for (int d : {2, 3}) {
        BoxGeometry g(d, 2);
        for (int q : {2, 3, 4})
            for (int k = 0; k < d; ++k)
                for (int t = 0; t < 30; ++t) {
                    Form w = random_form(g, k, q, rng);
                    Chain c = random_chain(g, k + 1, rng);
                    EXPECT_EQ(evaluate(exterior_derivative(g, w), c), evaluate(w, boundary(g, c)));
                }
    }
}

TEST(Evaluate, LoopAroundPlaquetteSetSeesFlux) {
    // sigma evaluated on the boundary of a plaquette set equals d sigma summed over the set
    std::mt19937 rng(16);
    BoxGeometry g(2, 2);
    for (int t = 0; t < 100; ++t) {
        Form s = random_form(g, 1, 2, rng);
        Chain P = Chain::zero(g, 2);
        for (std::size_t p = 0; p < P.size(); ++p) P[p] = rng() & 1;
        Form ds = exterior_derivative(g, s);
        int flux = 0;
        for (std::size_t p = 0; p < P.size(); ++p) flux ^= (P[p] & ds[p]);
        EXPECT_EQ(evaluate(s, boundary(g, P)), flux);
    }
}
