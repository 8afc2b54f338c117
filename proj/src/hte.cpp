#include "latthiggs/hte.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "latthiggs/errors.hpp"
#include "latthiggs/summation.hpp"

namespace latthiggs {

namespace {

int mod(long long v, int q) {
    long long r = v % q;
    return static_cast<int>(r < 0 ? r + q : r);
}

void check_budget(long double count, const EnumerationOptions& opt) {
    if (count > static_cast<long double>(opt.budget))
        throw BudgetError("HTE enumeration of " + std::to_string(static_cast<double>(count)) +
                          " terms exceeds budget " + std::to_string(opt.budget));
}

}  // namespace

double phi(int q, double a, int i) {
    if (q < 2) throw std::invalid_argument("phi: modulus must be >= 2");
    if (a < 0.0) throw std::invalid_argument("phi: coupling must be >= 0");
    i = mod(i, q);
    if (a == 0.0) return i == 0 ? 1.0 : 0.0;
    long double term = 1.0L;  // a^k / k!
    long double sum = 0.0L;
    for (int k = 0;; ++k) {
        if (k > 0) term *= static_cast<long double>(a) / k;
        if (k % q == i) {
            sum += term;
            if (k > a && term < 1e-18L * sum) break;
        }
        if (k > 100000) break;
    }
    return static_cast<double>(sum);
}

double barphi(int q, double a, int j) {
    long double s = 0.0L;
    for (int i = 0; i < q; ++i) s += static_cast<long double>(phi(q, a, i)) * phi(q, a, mod(i - j, q));
    return static_cast<double>(s);
}

double hatphi(double a, int j) {
    if (mod(j, 2) == 0) return 1.0;
    return std::tanh(2.0 * a);
}

long double z_gamma_hte(const Chain& gamma, const ModelParams& p, const EnumerationOptions& opt) {
    p.validate();
    BoxGeometry g(p.d, p.N);
    if (gamma.degree() != 1 || gamma.size() != g.count(1)) throw DegreeError("gamma must be a 1-chain on the box");
    const int m = p.m, L = std::lcm(p.m, p.n);
    const std::size_t P = g.count(2), E = g.count(1);
    long double outer = std::pow(static_cast<long double>(L), static_cast<long double>(P));
    long double inner = std::pow(static_cast<long double>(m), static_cast<long double>(P));
    check_budget(outer + inner * inner, opt);

    std::vector<double> bb(m), bk(L);
    for (int j = 0; j < m; ++j) bb[j] = barphi(m, p.beta, j);
    for (int j = 0; j < L; ++j) bk[j] = barphi(L, p.kappa, j);

    auto coderiv = [&](const std::vector<int>& w, int q, std::vector<int>& out) {
        for (std::size_t e = 0; e < E; ++e) {
            long long s = 0;
            for (auto inc : g.cofaces(1, e)) s += inc.sign * w[inc.cell];
            out[e] = mod(s, q);
        }
    };
    auto decode = [&](std::uint64_t idx, int q, std::vector<int>& w) {
        for (std::size_t i = 0; i < P; ++i) {
            w[i] = static_cast<int>(idx % static_cast<std::uint64_t>(q));
            idx /= static_cast<std::uint64_t>(q);
        }
    };
    auto encode = [&](const std::vector<int>& w, int q) {
        std::uint64_t idx = 0;
        for (std::size_t i = P; i-- > 0;) idx = idx * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(w[i]);
        return idx;
    };

    // I(r) = sum over omega of prod barphi_beta(omega(p)) 1(delta(r + omega) = 0 mod m)
    const std::uint64_t nm = static_cast<std::uint64_t>(inner);
    std::vector<long double> omega_weight(nm);
    std::vector<std::vector<int>> omega_delta(nm, std::vector<int>(E));
    std::vector<int> w(P), tmp(E);
    for (std::uint64_t a = 0; a < nm; ++a) {
        decode(a, m, w);
        long double x = 1.0L;
        for (int v : w) x *= bb[v];
        omega_weight[a] = x;
        coderiv(w, m, omega_delta[a]);
    }
    std::vector<long double> I(nm);
    for (std::uint64_t r = 0; r < nm; ++r) {
        decode(r, m, w);
        coderiv(w, m, tmp);
        CompensatedSum s;
        for (std::uint64_t a = 0; a < nm; ++a) {
            bool ok = true;
            for (std::size_t e = 0; e < E && ok; ++e) ok = (tmp[e] + omega_delta[a][e]) % m == 0;
            if (ok) s += omega_weight[a];
        }
        I[r] = s.value();
    }

    const std::uint64_t nl = static_cast<std::uint64_t>(outer);
    CompensatedSum total;
    std::vector<int> wl(P), wm(P), dl(E);
    for (std::uint64_t b = 0; b < nl; ++b) {
        decode(b, L, wl);
        for (std::size_t i = 0; i < P; ++i) wm[i] = wl[i] % m;
        long double ir = I[encode(wm, m)];
        if (ir == 0.0L) continue;
        coderiv(wl, L, dl);
        long double x = ir;
        for (std::size_t e = 0; e < E; ++e) x *= bk[mod(dl[e] - gamma[e], L)];
        total += x;
    }
    return total.value();
}

double hte_expectation(const Chain& gamma, const ModelParams& p, const EnumerationOptions& opt) {
    BoxGeometry g(p.d, p.N);
    return static_cast<double>(z_gamma_hte(gamma, p, opt) / z_gamma_hte(Chain::zero(g, 1), p, opt));
}

double z2_hte_weight(const BoxGeometry& g, const Form& omega, const Chain& gamma, double beta, double kappa) {
    if (omega.degree() != 2 || omega.modulus() != 2) throw DegreeError("omega must be a Z_2 2-form");
    if (gamma.degree() != 1 || gamma.size() != g.count(1)) throw DegreeError("gamma must be a 1-chain on the box");
    Form dw = coderivative(g, omega);
    long double x = 1.0L;
    const long double tb = std::tanh(2.0L * beta), tk = std::tanh(2.0L * kappa);
    for (std::size_t p = 0; p < omega.size(); ++p)
        if (omega[p]) x *= tb;
    for (std::size_t e = 0; e < dw.size(); ++e) {
        int ge = mod(gamma[e], 2);
        int num = (dw[e] + ge) % 2;
        if (num == ge) continue;
        if (num == 1) x *= tk;  // hatphi(1)/hatphi(0)
        else {
            if (tk == 0.0L) throw RegimeError("hatphi_kappa(1) vanishes at kappa = 0");
            x /= tk;
        }
    }
    return static_cast<double>(x);
}

long double z2_hte_sum(const ModelParams& p, const Chain& gamma, const EnumerationOptions& opt) {
    p.validate();
    BoxGeometry g(p.d, p.N);
    const std::size_t P = g.count(2), E = g.count(1);
    if (P > 40) throw BudgetError("too many plaquettes for exhaustive 2-form enumeration");
    check_budget(std::pow(2.0L, static_cast<long double>(P)), opt);
    if (gamma.degree() != 1 || gamma.size() != E) throw DegreeError("gamma must be a 1-chain on the box");
    std::vector<std::uint64_t> emask(E, 0);
    std::vector<int> ge(E);
    for (std::size_t e = 0; e < E; ++e) {
        for (auto inc : g.cofaces(1, e)) emask[e] |= std::uint64_t{1} << inc.cell;
        ge[e] = mod(gamma[e], 2);
    }
    const long double tb = std::tanh(2.0L * p.beta), tk = std::tanh(2.0L * p.kappa);
    bool any_gamma = false;
    for (int v : ge) any_gamma |= v != 0;
    if (any_gamma && tk == 0.0L) throw RegimeError("hatphi_kappa(1) vanishes at kappa = 0");
    // powers indexed by exponent
    std::vector<long double> pb(P + 1), pk(E + 1), pki(E + 1);
    pb[0] = pk[0] = pki[0] = 1.0L;
    for (std::size_t i = 1; i <= P; ++i) pb[i] = pb[i - 1] * tb;
    for (std::size_t i = 1; i <= E; ++i) {
        pk[i] = pk[i - 1] * tk;
        pki[i] = any_gamma ? pki[i - 1] / tk : 1.0L;
    }
    CompensatedSum s;
    const std::uint64_t total = std::uint64_t{1} << P;
    for (std::uint64_t w = 0; w < total; ++w) {
        std::size_t up = 0, down = 0;
        for (std::size_t e = 0; e < E; ++e) {
            int d = __builtin_popcountll(w & emask[e]) & 1;
            if (!d) continue;
            if (ge[e]) ++down;
            else ++up;
        }
        s += pb[static_cast<std::size_t>(__builtin_popcountll(w))] * pk[up] * pki[down];
    }
    return s.value();
}

double z2_hte_expectation(const ModelParams& p, const Chain& gamma, const EnumerationOptions& opt) {
    BoxGeometry g(p.d, p.N);
    long long len = 0;
    for (std::size_t e = 0; e < gamma.size(); ++e) len += mod(gamma[e], 2);
    long double pre = std::pow(std::tanh(2.0L * p.kappa), static_cast<long double>(len));
    return static_cast<double>(pre * z2_hte_sum(p, gamma, opt) / z2_hte_sum(p, Chain::zero(g, 1), opt));
}

}  // namespace latthiggs
