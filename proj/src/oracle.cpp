#include "latthiggs/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <string>

#include "latthiggs/errors.hpp"
#include "latthiggs/parallel.hpp"
#include "latthiggs/summation.hpp"

namespace latthiggs {

EnumerationOptions default_enumeration_options() {
    EnumerationOptions o;
    if (const char* env = std::getenv("LATTHIGGS_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) o.budget = v;
    }
    return o;
}

namespace {

int mod(long long v, int q) {
    long long r = v % q;
    return static_cast<int>(r < 0 ? r + q : r);
}

struct GammaTerms {
    std::vector<std::pair<std::uint32_t, int>> edges;     // (edge, coefficient mod m)
    std::vector<std::pair<std::uint32_t, int>> vertices;  // (vertex, coefficient of boundary mod n)
};

// Enumerates sigma in Z_m^E (low digits) and, when coupled, phi in Z_n^V.
class Enumerator {
public:
    Enumerator(const ModelParams& p, std::span<const Chain> gammas, bool coupled)
        : g_(p.d, p.N), m_(p.m), n_(coupled ? p.n : p.m), coupled_(coupled) {
        p.validate();
        if (!coupled && p.m != p.n) throw UnsupportedError("unitary gauge needs m = n");
        L_ = std::lcm(m_, n_);
        E_ = g_.count(1);
        V_ = coupled ? g_.count(0) : 0;
        for (std::size_t pl = 0; pl < g_.count(2); ++pl) {
            auto f = g_.faces(2, pl);
            std::array<std::pair<std::uint32_t, int>, 4> a{};
            for (int i = 0; i < 4; ++i) a[i] = {f[i].cell, f[i].sign};
            plaq_.push_back(a);
        }
        for (std::size_t e = 0; e < E_; ++e) {
            auto f = g_.faces(1, e);
            ends_.push_back({f[0].cell, f[1].cell});
        }
        const double tau = 2.0 * std::numbers::pi;
        for (int j = 0; j < m_; ++j) ptab_.push_back(std::exp(2.0 * p.beta * (std::cos(tau * j / m_) - 1.0)));
        for (int j = 0; j < L_; ++j) {
            etab_.push_back(std::exp(2.0 * p.kappa * (std::cos(tau * j / L_) - 1.0)));
            cos_.push_back(std::cos(tau * j / L_));
            sin_.push_back(std::sin(tau * j / L_));
        }
        for (const Chain& c : gammas) {
            if (c.degree() != 1 || c.size() != E_) throw DegreeError("gamma must be a 1-chain on the box");
            GammaTerms t;
            for (std::size_t e = 0; e < E_; ++e)
                if (c[e] != 0) t.edges.push_back({static_cast<std::uint32_t>(e), mod(c[e], m_)});
            Chain b = boundary(g_, c);
            for (std::size_t v = 0; v < b.size(); ++v)
                if (b[v] != 0) t.vertices.push_back({static_cast<std::uint32_t>(v), mod(b[v], n_)});
            if (!coupled_ && !t.vertices.empty()) {
                // phi is gauged away; the endpoint factor is identically one
                t.vertices.clear();
            }
            gam_.push_back(std::move(t));
        }
    }

    std::uint64_t total(std::uint64_t budget) const {
        long double t = std::pow(static_cast<long double>(m_), static_cast<long double>(E_)) *
                        std::pow(static_cast<long double>(n_), static_cast<long double>(V_));
        if (t > static_cast<long double>(budget))
            throw BudgetError("enumeration of " + std::to_string(static_cast<double>(t)) +
                              " configurations exceeds budget " + std::to_string(budget));
        return static_cast<std::uint64_t>(t);
    }

    struct Partial {
        CompensatedSum z;
        std::vector<CompensatedSum> re, im;
    };

    Partial run_block(std::uint64_t lo, std::uint64_t hi) const {
        Partial out;
        out.re.resize(gam_.size());
        out.im.resize(gam_.size());
        std::vector<int> sig(E_), ph(V_);
        std::uint64_t r = lo;
        for (std::size_t e = 0; e < E_; ++e) {
            sig[e] = static_cast<int>(r % static_cast<std::uint64_t>(m_));
            r /= static_cast<std::uint64_t>(m_);
        }
        for (std::size_t v = 0; v < V_; ++v) {
            ph[v] = static_cast<int>(r % static_cast<std::uint64_t>(n_));
            r /= static_cast<std::uint64_t>(n_);
        }
        const int sm = L_ / m_, sn = L_ / n_;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            double w = 1.0;
            for (const auto& pl : plaq_) {
                int s = 0;
                for (const auto& [e, sg] : pl) s += sg * sig[e];
                w *= ptab_[mod(s, m_)];
            }
            for (std::size_t e = 0; e < E_; ++e) {
                int k = sig[e] * sm;
                if (coupled_) k -= (ph[ends_[e].first] - ph[ends_[e].second]) * sn;
                w *= etab_[mod(k, L_)];
            }
            out.z += w;
            for (std::size_t gi = 0; gi < gam_.size(); ++gi) {
                long long k = 0;
                for (const auto& [e, c] : gam_[gi].edges) k += static_cast<long long>(c) * sig[e] * sm;
                for (const auto& [v, c] : gam_[gi].vertices) k -= static_cast<long long>(c) * ph[v] * sn;
                int kk = mod(k, L_);
                out.re[gi] += w * cos_[kk];
                out.im[gi] += w * sin_[kk];
            }
            // odometer
            std::size_t pos = 0;
            for (; pos < E_; ++pos) {
                if (++sig[pos] < m_) break;
                sig[pos] = 0;
            }
            if (pos == E_) {
                for (std::size_t v = 0; v < V_; ++v) {
                    if (++ph[v] < n_) break;
                    ph[v] = 0;
                }
            }
        }
        return out;
    }

    ExactResult run(const EnumerationOptions& opt) const {
        std::uint64_t tot = total(opt.budget);
        // block layout depends only on the problem size, never on the worker count
        std::uint64_t nblocks = std::min<std::uint64_t>(tot, 256);
        std::vector<Partial> parts(nblocks);
        parallel_for(nblocks, opt.jobs, [&](std::size_t b) {
            std::uint64_t lo = tot / nblocks * b + std::min<std::uint64_t>(b, tot % nblocks);
            std::uint64_t hi = lo + tot / nblocks + (b < tot % nblocks ? 1 : 0);
            parts[b] = run_block(lo, hi);
        });
        Partial acc;
        acc.re.resize(gam_.size());
        acc.im.resize(gam_.size());
        for (const auto& pt : parts) {
            acc.z += pt.z;
            for (std::size_t i = 0; i < gam_.size(); ++i) {
                acc.re[i] += pt.re[i];
                acc.im[i] += pt.im[i];
            }
        }
        ExactResult res;
        long double z = acc.z.value();
        res.log_z = static_cast<double>(std::log(z));
        res.config_count = tot;
        for (std::size_t i = 0; i < gam_.size(); ++i)
            res.expectations.emplace_back(static_cast<double>(acc.re[i].value() / z),
                                          static_cast<double>(acc.im[i].value() / z));
        return res;
    }

private:
    BoxGeometry g_;
    int m_, n_, L_;
    bool coupled_;
    std::size_t E_, V_;
    std::vector<std::array<std::pair<std::uint32_t, int>, 4>> plaq_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ends_;  // (head, tail)
    std::vector<double> ptab_, etab_, cos_, sin_;
    std::vector<GammaTerms> gam_;
};

}  // namespace

ExactResult exact_coupled(const ModelParams& p, std::span<const Chain> gammas, const EnumerationOptions& opt) {
    return Enumerator(p, gammas, true).run(opt);
}

ExactResult exact_unitary(const ModelParams& p, std::span<const Chain> gammas, const EnumerationOptions& opt) {
    return Enumerator(p, gammas, false).run(opt);
}

std::complex<double> exact_coupled_expectation(const Chain& gamma, const ModelParams& p,
                                               const EnumerationOptions& opt) {
    BoxGeometry g(p.d, p.N);
    if (!is_path(g, gamma)) throw std::invalid_argument("gamma is not a path");
    return exact_coupled(p, std::span<const Chain>(&gamma, 1), opt).expectations[0];
}

std::complex<double> exact_unitary_expectation(const Chain& gamma, const ModelParams& p,
                                               const EnumerationOptions& opt) {
    BoxGeometry g(p.d, p.N);
    if (!is_path(g, gamma)) throw std::invalid_argument("gamma is not a path");
    return exact_unitary(p, std::span<const Chain>(&gamma, 1), opt).expectations[0];
}

TransferResult transfer_matrix_expectation(const ModelParams& p, int length, std::optional<int> x0_opt,
                                           std::optional<int> y0_opt) {
    p.validate();
    if (p.d != 2) throw UnsupportedError("transfer matrix is implemented for d = 2 only");
    if (p.m != 2 || p.n != 2) throw UnsupportedError("transfer matrix is implemented for Z_2 only");
    const int N = p.N;
    if (N > 12) throw UnsupportedError("transfer matrix supports N <= 12");
    if (length < 0 || length > N) throw std::invalid_argument("path does not fit in the box");
    const int x0 = x0_opt.value_or((N - length) / 2);
    const int y0 = y0_opt.value_or(N / 2);
    if (x0 < 0 || x0 + length > N || y0 < 0 || y0 > N) throw std::invalid_argument("path does not fit in the box");

    TransferResult res;
    res.x0 = x0;
    res.y0 = y0;
    res.margin = std::min({x0, N - (x0 + length), y0, N - y0});
    if (length == 0) {
        res.expectation = 1.0;
        return res;
    }

    using R = long double;
    const R u = std::exp(static_cast<R>(-4.0L * p.kappa));
    const R w = std::exp(static_cast<R>(-4.0L * p.beta));
    const std::size_t S = std::size_t{1} << N;
    // psi[par][mask]: par is the parity of sigma over gamma so far
    std::vector<R> psi(2 * S, 0.0L), next(2 * S);
    auto popw = [&](std::size_t mask) {
        R r = 1.0L;
        for (int b = 0; b < N; ++b)
            if (mask >> b & 1) r *= u;
        return r;
    };
    for (std::size_t s = 0; s < S; ++s) psi[s] = popw(s);

    // dp state: [par][h][mask], h = current lower horizontal bit
    std::vector<R> cur(4 * S), nxt(4 * S);
    auto at = [S](std::vector<R>& a, int par, int h, std::size_t mask) -> R& {
        return a[(static_cast<std::size_t>(par) * 2 + h) * S + mask];
    };
    for (int x = 0; x < N; ++x) {
        const bool hits = x >= x0 && x < x0 + length;
        std::fill(cur.begin(), cur.end(), 0.0L);
        for (int par = 0; par < 2; ++par)
            for (std::size_t s = 0; s < S; ++s) {
                R v = psi[par * S + s];
                if (v == 0.0L) continue;
                at(cur, par, 0, s) += v;
                int np = (hits && y0 == 0) ? par ^ 1 : par;
                at(cur, np, 1, s) += v * u;
            }
        for (int y = 0; y < N; ++y) {
            std::fill(nxt.begin(), nxt.end(), 0.0L);
            const bool row_hit = hits && (y + 1 == y0);
            const std::size_t bit = std::size_t{1} << y;
            for (int par = 0; par < 2; ++par)
                for (int h = 0; h < 2; ++h)
                    for (std::size_t s = 0; s < S; ++s) {
                        R v = at(cur, par, h, s);
                        if (v == 0.0L) continue;
                        int vl = (s & bit) ? 1 : 0;
                        std::size_t base = s & ~bit;
                        for (int vr = 0; vr < 2; ++vr)
                            for (int h2 = 0; h2 < 2; ++h2) {
                                int parity = h ^ vr ^ h2 ^ vl;
                                R f = v;
                                if (parity) f *= w;
                                if (h2) f *= u;
                                int np = (row_hit && h2) ? par ^ 1 : par;
                                at(nxt, np, h2, base | (vr ? bit : 0)) += f;
                            }
                    }
            std::swap(cur, nxt);
        }
        std::fill(next.begin(), next.end(), 0.0L);
        for (int par = 0; par < 2; ++par)
            for (int h = 0; h < 2; ++h)
                for (std::size_t s = 0; s < S; ++s) next[par * S + s] += at(cur, par, h, s);
        for (std::size_t s = 0; s < S; ++s) {
            R f = popw(s);
            next[s] *= f;
            next[S + s] *= f;
        }
        std::swap(psi, next);
    }
    CompensatedSum even, odd;
    for (std::size_t s = 0; s < S; ++s) {
        even += psi[s];
        odd += psi[S + s];
    }
    R ze = even.value(), zo = odd.value();
    R ratio = zo / (ze + zo);
    res.expectation = static_cast<double>(1.0L - 2.0L * ratio);
    res.neg_log = -std::log1p(-2.0L * ratio);
    return res;
}

namespace {

double real_expectation(const ModelParams& p, const Chain& gamma, const EnumerationOptions& opt) {
    if (p.m == p.n) return exact_unitary(p, std::span<const Chain>(&gamma, 1), opt).expectations[0].real();
    return exact_coupled(p, std::span<const Chain>(&gamma, 1), opt).expectations[0].real();
}

}  // namespace

MonotonicityReport check_monotonicity(const ModelParams& p, const Chain& gamma, std::span<const double> betas_in,
                                      std::span<const double> kappas_in, double tol, const EnumerationOptions& opt) {
    std::vector<double> betas(betas_in.begin(), betas_in.end()), kappas(kappas_in.begin(), kappas_in.end());
    std::sort(betas.begin(), betas.end());
    std::sort(kappas.begin(), kappas.end());
    std::vector<double> val(betas.size() * kappas.size());
    parallel_for(val.size(), opt.jobs, [&](std::size_t i) {
        ModelParams q = p;
        q.beta = betas[i / kappas.size()];
        q.kappa = kappas[i % kappas.size()];
        EnumerationOptions o = opt;
        o.jobs = 1;
        val[i] = real_expectation(q, gamma, o);
    });
    MonotonicityReport rep;
    auto visit = [&](double lo, double hi) {
        ++rep.comparisons;
        double v = lo - hi;
        if (v > 0.0) rep.max_violation = std::max(rep.max_violation, v);
        if (v > tol) ++rep.violations;
    };
    const std::size_t nk = kappas.size();
    for (std::size_t b = 0; b < betas.size(); ++b)
        for (std::size_t k = 0; k < nk; ++k) {
            if (b + 1 < betas.size()) visit(val[b * nk + k], val[(b + 1) * nk + k]);
            if (k + 1 < nk) visit(val[b * nk + k], val[b * nk + k + 1]);
        }
    rep.passed = rep.violations == 0;
    return rep;
}

GriffithsReport check_griffiths(const ModelParams& p, const Chain& g1, const Chain& g2, double tol,
                                const EnumerationOptions& opt) {
    std::vector<Chain> gs{g1, g2, g1 + g2};
    ExactResult r = p.m == p.n ? exact_unitary(p, gs, opt) : exact_coupled(p, gs, opt);
    GriffithsReport rep;
    rep.joint = r.expectations[2].real();
    rep.product = r.expectations[0].real() * r.expectations[1].real();
    rep.violation = std::max(0.0, rep.product - rep.joint);
    rep.passed = rep.violation <= tol;
    return rep;
}

}  // namespace latthiggs
