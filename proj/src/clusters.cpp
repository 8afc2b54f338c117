#include "latthiggs/clusters.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "latthiggs/errors.hpp"
#include "latthiggs/hte.hpp"
#include "latthiggs/summation.hpp"

namespace latthiggs {

std::string to_string(Phase p) { return p == Phase::Higgs ? "higgs" : "conf"; }

Phase phase_from_string(const std::string& s) {
    if (s == "higgs") return Phase::Higgs;
    if (s == "conf" || s == "confinement") return Phase::Confinement;
    throw std::invalid_argument("unknown phase '" + s + "' (expected higgs or conf)");
}

AdjacencyGraph::AdjacencyGraph(Phase phase, const BoxGeometry& g) : phase_(phase) {
    const int k = phase == Phase::Higgs ? 1 : 2;
    if (g.dim() < 2) throw UnsupportedError("adjacency graphs need d >= 2");
    const std::size_t n = g.count(k);
    start_.reserve(n + 1);
    start_.push_back(0);
    std::vector<std::uint32_t> nb;
    for (std::size_t v = 0; v < n; ++v) {
        nb.clear();
        if (phase == Phase::Higgs) {
            for (auto p : g.cofaces(1, v))
                for (auto e : g.faces(2, p.cell))
                    if (e.cell != v) nb.push_back(e.cell);
        } else {
            for (auto e : g.faces(2, v))
                for (auto p : g.cofaces(1, e.cell))
                    if (p.cell != v) nb.push_back(p.cell);
        }
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        adj_.insert(adj_.end(), nb.begin(), nb.end());
        start_.push_back(static_cast<std::uint32_t>(adj_.size()));
    }
}

int AdjacencyGraph::max_degree() const {
    int m = 0;
    for (std::size_t v = 0; v < size(); ++v) m = std::max(m, degree(v));
    return m;
}

AdjacencyGraph build_graph(Phase phase, const BoxGeometry& g) { return AdjacencyGraph(phase, g); }

namespace {

struct ConnectedSetWalker {
    const AdjacencyGraph& G;
    int J;
    const std::function<void(std::span<const std::uint32_t>)>& visit;
    std::span<const char> forbidden;
    std::uint32_t min_index;
    std::vector<char> mark;
    std::vector<std::uint32_t> S;

    bool allowed(std::uint32_t w) const {
        if (w < min_index) return false;
        if (!forbidden.empty() && forbidden[w]) return false;
        return true;
    }

    void extend(std::vector<std::uint32_t>& ext) {
        visit(S);
        if (static_cast<int>(S.size()) == J) return;
        for (std::size_t i = 0; i < ext.size(); ++i) {
            std::uint32_t v = ext[i];
            std::vector<std::uint32_t> next(ext.begin() + static_cast<std::ptrdiff_t>(i) + 1, ext.end());
            std::size_t added_from = next.size();
            for (std::uint32_t w : G.neighbors(v))
                if (!mark[w] && allowed(w)) {
                    mark[w] = 1;
                    next.push_back(w);
                }
            S.push_back(v);
            extend(next);
            S.pop_back();
            for (std::size_t t = added_from; t < next.size(); ++t) mark[next[t]] = 0;
        }
    }
};

}  // namespace

void for_each_connected_set(const AdjacencyGraph& G, std::uint32_t root, int J,
                            const std::function<void(std::span<const std::uint32_t>)>& visit,
                            std::span<const char> forbidden, std::uint32_t min_index) {
    if (J < 1) return;
    if (root >= G.size()) throw std::out_of_range("root outside graph");
    ConnectedSetWalker w{G, J, visit, forbidden, min_index, std::vector<char>(G.size(), 0), {}};
    if (!w.allowed(root)) return;
    w.mark[root] = 1;
    w.S.push_back(root);
    std::vector<std::uint32_t> ext;
    for (std::uint32_t n : G.neighbors(root))
        if (w.allowed(n)) {
            w.mark[n] = 1;
            ext.push_back(n);
        }
    w.extend(ext);
}

Form Polymer::to_form(const BoxGeometry& g) const {
    Form f = Form::zero(g, phase == Phase::Higgs ? 1 : 2, 2);
    for (auto c : cells) f.set(c, 1);
    return f;
}

std::vector<Polymer> enumerate_polymers(const AdjacencyGraph& G, std::uint32_t anchor, int J, int max_cutoff) {
    if (J > max_cutoff) throw std::invalid_argument("polymer size cutoff exceeds the configured maximum");
    std::vector<Polymer> out;
    for_each_connected_set(G, anchor, J, [&](std::span<const std::uint32_t> s) {
        Polymer p;
        p.phase = G.phase();
        p.cells.assign(s.begin(), s.end());
        std::sort(p.cells.begin(), p.cells.end());
        out.push_back(std::move(p));
    });
    return out;
}

bool polymers_touch(const AdjacencyGraph& G, const Polymer& a, const Polymer& b) {
    for (auto x : a.cells) {
        if (std::binary_search(b.cells.begin(), b.cells.end(), x)) return true;
        for (auto y : G.neighbors(x))
            if (std::binary_search(b.cells.begin(), b.cells.end(), y)) return true;
    }
    return false;
}

double ursell_from_masks(std::span<const std::uint32_t> touch) {
    const int k = static_cast<int>(touch.size());
    if (k == 0) return 0.0;
    if (k > 16) throw std::invalid_argument("ursell: too many polymers");
    const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
    std::vector<std::uint32_t> nb(k);
    for (int i = 0; i < k; ++i) nb[i] = touch[i] & full & ~(1u << i);
    // independent[T] = 1 iff T spans no edge
    std::vector<std::int8_t> indep(std::size_t{1} << k, 0);
    indep[0] = 1;
    for (std::uint32_t T = 1; T <= full; ++T) {
        int low = std::countr_zero(T);
        std::uint32_t rest = T & (T - 1);
        indep[T] = indep[rest] && !(nb[low] & rest);
    }
    std::vector<long long> conn(std::size_t{1} << k, 0);
    for (std::uint32_t T = 1; T <= full; ++T) {
        std::uint32_t low = T & (~T + 1);
        std::uint32_t R = T ^ low;
        long long c = indep[T];
        // proper subsets T' = low | sub with sub strictly inside R
        for (std::uint32_t sub = (R - 1) & R;; sub = (sub - 1) & R) {
            if (sub != R) {
                std::uint32_t Tp = low | sub;
                c -= conn[Tp] * indep[T ^ Tp];
            }
            if (sub == 0) break;
        }
        conn[T] = c;
    }
    return static_cast<double>(conn[full]);
}

int Cluster::n() const { return std::accumulate(multiplicity.begin(), multiplicity.end(), 0); }

int Cluster::norm() const {
    int s = 0;
    for (std::size_t i = 0; i < polymers.size(); ++i) s += multiplicity[i] * static_cast<int>(polymers[i].cells.size());
    return s;
}

double Cluster::symmetry_factor() const {
    double f = 1.0;
    for (int m : multiplicity)
        for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

namespace {

std::vector<const Polymer*> instances(const Cluster& S) {
    std::vector<const Polymer*> out;
    for (std::size_t i = 0; i < S.polymers.size(); ++i)
        for (int t = 0; t < S.multiplicity[i]; ++t) out.push_back(&S.polymers[i]);
    return out;
}

int mod2(long long v) { return static_cast<int>(((v % 2) + 2) % 2); }

}  // namespace

double ursell(const AdjacencyGraph& G, const Cluster& S, int kmax) {
    auto inst = instances(S);
    if (static_cast<int>(inst.size()) > kmax) throw std::invalid_argument("ursell: cluster exceeds kmax");
    std::vector<std::uint32_t> touch(inst.size(), 0);
    for (std::size_t i = 0; i < inst.size(); ++i)
        for (std::size_t j = 0; j < inst.size(); ++j)
            if (i != j && polymers_touch(G, *inst[i], *inst[j])) touch[i] |= 1u << j;
    return ursell_from_masks(touch);
}

bool is_cluster(const AdjacencyGraph& G, const Cluster& S) {
    auto inst = instances(S);
    if (inst.empty()) return false;
    std::vector<char> seen(inst.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < inst.size(); ++j)
            if (!seen[j] && polymers_touch(G, *inst[i], *inst[j])) {
                seen[j] = 1;
                ++count;
                stack.push_back(j);
            }
    }
    return count == inst.size();
}

int higgs_norm2(const BoxGeometry& g, const Cluster& S) {
    int total = 0;
    std::vector<char> par(g.count(2), 0);
    for (std::size_t i = 0; i < S.polymers.size(); ++i) {
        std::vector<std::uint32_t> touched;
        for (auto e : S.polymers[i].cells)
            for (auto p : g.cofaces(1, e)) {
                par[p.cell] ^= 1;
                touched.push_back(p.cell);
            }
        int cnt = 0;
        for (auto p : touched)
            if (par[p]) {
                ++cnt;
                par[p] = 0;
            }
        total += cnt * S.multiplicity[i];
    }
    return total;
}

namespace {

// |supp delta eta| and |supp delta eta meeting gamma| for a plaquette set
std::pair<int, int> delta_counts(const BoxGeometry& g, std::span<const std::uint32_t> plaquettes,
                                 const std::function<bool(std::uint32_t)>& on_gamma, std::vector<char>& par) {
    std::vector<std::uint32_t> touched;
    for (auto p : plaquettes)
        for (auto e : g.faces(2, p)) {
            par[e.cell] ^= 1;
            touched.push_back(e.cell);
        }
    int all = 0, hit = 0;
    for (auto e : touched)
        if (par[e]) {
            ++all;
            if (on_gamma(e)) ++hit;
            par[e] = 0;
        }
    return {all, hit};
}

}  // namespace

int conf_gamma_norm(const BoxGeometry& g, const Cluster& S, const Chain& gamma) {
    std::vector<char> par(g.count(1), 0);
    int total = 0;
    for (std::size_t i = 0; i < S.polymers.size(); ++i) {
        auto [all, hit] = delta_counts(g, S.polymers[i].cells, [&](std::uint32_t e) { return mod2(gamma[e]) != 0; }, par);
        (void)all;
        total += hit * S.multiplicity[i];
    }
    return total;
}

double psi_higgs(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, double beta, double kappa) {
    double u = ursell(G, S, std::max(6, S.n()));
    return u / S.symmetry_factor() * std::exp(-4.0 * beta * higgs_norm2(g, S) - 4.0 * kappa * S.norm());
}

double psi_conf(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, const Chain& gamma, double beta,
                double kappa) {
    double u = ursell(G, S, std::max(6, S.n()));
    long double act = 1.0L;
    for (std::size_t i = 0; i < S.polymers.size(); ++i)
        act *= std::pow(static_cast<long double>(z2_hte_weight(g, S.polymers[i].to_form(g), gamma, beta, kappa)),
                        S.multiplicity[i]);
    return static_cast<double>(u / S.symmetry_factor() * act);
}

// ---------------------------------------------------------------------------

ClusterEnumerator::ClusterEnumerator(const AdjacencyGraph& G, ClusterCutoffs cut) : G_(G), cut_(cut) {
    if (cut.J > 24) throw std::invalid_argument("cluster cutoff J too large");
    if (cut.kmax > 16) throw std::invalid_argument("kmax too large");
}

void ClusterEnumerator::rooted(std::uint32_t root, const SupportFn& on_support, const ClusterFn& on_cluster,
                               std::span<const char> forbidden, std::uint32_t min_index) const {
    if (cut_.J < 1 || cut_.kmax < 1) return;
    for_each_connected_set(
        G_, root, cut_.J, [&](std::span<const std::uint32_t> U) { expand_support(U, on_support, on_cluster); },
        forbidden, min_index);
}

void ClusterEnumerator::all(const SupportFn& on_support, const ClusterFn& on_cluster) const {
    for (std::uint32_t r = 0; r < G_.size(); ++r) rooted(r, on_support, on_cluster, {}, r);
}

void ClusterEnumerator::expand_support(std::span<const std::uint32_t> U, const SupportFn& on_support,
                                       const ClusterFn& on_cluster) const {
    const int s = static_cast<int>(U.size());
    const std::uint32_t full = (1u << s) - 1;
    std::vector<std::uint32_t> adj(s, 0);
    for (int i = 0; i < s; ++i)
        for (std::uint32_t w : G_.neighbors(U[i]))
            for (int j = 0; j < s; ++j)
                if (U[j] == w) adj[i] |= 1u << j;

    auto nbr = [&](std::uint32_t mask) {
        std::uint32_t r = 0;
        for (std::uint32_t m = mask; m; m &= m - 1) r |= adj[std::countr_zero(m)];
        return r;
    };
    auto connected = [&](std::uint32_t mask) {
        std::uint32_t seen = mask & (~mask + 1), frontier = seen;
        while (frontier) {
            std::uint32_t nf = nbr(frontier) & mask & ~seen;
            seen |= nf;
            frontier = nf;
        }
        return seen == mask;
    };

    std::vector<LocalPolymer> polys;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if (std::popcount(mask) > cut_.J) continue;
        if (!connected(mask)) continue;
        LocalPolymer lp;
        lp.mask = mask;
        for (std::uint32_t m = mask; m; m &= m - 1) lp.cells.push_back(U[std::countr_zero(m)]);
        std::sort(lp.cells.begin(), lp.cells.end());
        polys.push_back(std::move(lp));
    }
    on_support(U, polys);

    const std::size_t np = polys.size();
    std::vector<std::uint32_t> reach(np);
    std::vector<int> size(np);
    for (std::size_t i = 0; i < np; ++i) {
        reach[i] = polys[i].mask | nbr(polys[i].mask);
        size[i] = std::popcount(polys[i].mask);
    }

    std::vector<int> chosen;
    std::vector<std::uint32_t> touch;
    const int J = cut_.J, kmax = cut_.kmax;

    auto emit = [&]() {
        const int k = static_cast<int>(chosen.size());
        touch.assign(k, 0);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j && (reach[chosen[i]] & polys[chosen[j]].mask)) touch[i] |= 1u << j;
        double inv_sym = 1.0;
        int run = 1;
        for (int i = 1; i < k; ++i) {
            if (chosen[i] == chosen[i - 1]) {
                ++run;
                inv_sym /= run;
            } else {
                run = 1;
            }
        }
        ClusterTerm t{chosen, k, ursell_from_masks(touch), inv_sym};
        on_cluster(t);
    };

    std::function<void(std::size_t, std::uint32_t, int)> rec = [&](std::size_t first, std::uint32_t uni, int used) {
        if (uni == full) emit();
        if (static_cast<int>(chosen.size()) == kmax) return;
        for (std::size_t i = first; i < np; ++i) {
            int nu = used + size[i];
            if (nu > J) continue;
            std::uint32_t nuni = uni | polys[i].mask;
            if (J - nu < std::popcount(full & ~nuni)) continue;
            chosen.push_back(static_cast<int>(i));
            rec(i, nuni, nu);
            chosen.pop_back();
        }
    };
    rec(0, 0, 0);
}

// ---------------------------------------------------------------------------

namespace {

template <class F>
double golden_min(F f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

}  // namespace

HiggsConstants higgs_constants(int d) {
    if (d < 2) throw std::invalid_argument("d must be >= 2");
    HiggsConstants h;
    h.d = d;
    h.M1 = degree_bound_m1(d);
    const double M1sq = static_cast<double>(h.M1) * h.M1;
    auto f = [&](double a) { return std::log(M1sq + 1.0 / a) / (4.0 * (1.0 - a)); };
    // coarse scan to bracket, then golden section
    double best = 0.5, fbest = f(0.5);
    for (int i = 1; i < 1000; ++i) {
        double a = i / 1000.0;
        if (f(a) < fbest) {
            fbest = f(a);
            best = a;
        }
    }
    h.alpha = golden_min(f, std::max(1e-9, best - 1e-3), std::min(1.0 - 1e-9, best + 1e-3), 1e-13);
    h.kappa0 = f(h.alpha);
    return h;
}

std::optional<double> c_eps_bound(int d, double eps) {
    auto h = higgs_constants(d);
    double kp = h.kappa0 + eps;
    double y = std::exp(-2.0 * (2.0 * kp - h.alpha));
    double den = 1.0 - 4.0 * h.M1 * h.M1 * y;
    if (!(den > 0.0)) return std::nullopt;
    return 4.0 * y / den;
}

double c_eps_min(int d) {
    auto h = higgs_constants(d);
    double kp = (std::log(4.0 * h.M1 * h.M1) / 2.0 + h.alpha) / 2.0;
    return std::max(0.0, kp - h.kappa0);
}

double HiggsTail::per_edge(int k) const { return c_eps / 4.0 * std::pow(x, k); }

HiggsTail higgs_tail(int d, double kappa, std::optional<double> eps) {
    auto h = higgs_constants(d);
    if (!(kappa > h.kappa0))
        throw RegimeError("kappa = " + std::to_string(kappa) + " is not above kappa0 = " + std::to_string(h.kappa0));
    double lo = c_eps_min(d), hi = kappa - h.kappa0;
    if (!(lo < hi))
        throw RegimeError("no eps admits a finite C_eps bound below kappa - kappa0 (need kappa > " +
                          std::to_string(h.kappa0 + lo) + ")");
    double e = eps.value_or((lo + hi) / 2.0);
    if (!(e > lo && e < hi))
        throw RegimeError("eps must lie in (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
    HiggsTail t;
    t.eps = e;
    t.c_eps = *c_eps_bound(d, e);
    t.x = std::exp(-4.0 * (kappa - h.kappa0 - e));
    return t;
}

namespace {

struct ConfShape {
    double M2;
    // g(alpha) = M2^3 s / (1 - M2^2 s) - 2 alpha with s = t^(1 - alpha); +inf where the denominator fails
    double g(double t, double a) const {
        double s = std::pow(t, 1.0 - a);
        double den = 1.0 - M2 * M2 * s;
        if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
        return M2 * M2 * M2 * s / den - 2.0 * a;
    }
    // upper end of the alpha interval on which the denominator is positive
    double alpha_max(double t) const {
        if (t <= 0.0) return 1.0;
        return std::min(1.0, 1.0 - 2.0 * std::log(M2) / (-std::log(t)));
    }
    double argmin(double t) const {
        double am = alpha_max(t);
        if (am <= 0.0) return 0.0;
        return golden_min([&](double a) { return g(t, a); }, 0.0, am, 1e-14);
    }
};

}  // namespace

bool conf_feasible(int d, double beta) {
    ConfShape sh{static_cast<double>(degree_bound_m2(d))};
    double t = std::tanh(2.0 * beta);
    if (!(sh.M2 * sh.M2 * t < 1.0)) return false;
    if (t == 0.0) return true;
    double a = sh.argmin(t);
    return a > 0.0 && a < 1.0 && sh.g(t, a) < 0.0;
}

ConfConstants conf_constants(int d) {
    ConfConstants c;
    c.d = d;
    c.M2 = degree_bound_m2(d);
    double lo = 0.0, hi = 0.5 * std::atanh(1.0 / (static_cast<double>(c.M2) * c.M2));
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (conf_feasible(d, mid)) lo = mid;
        else hi = mid;
    }
    c.beta0 = lo;
    return c;
}

std::optional<double> conf_alpha(int d, double beta) {
    ConfShape sh{static_cast<double>(degree_bound_m2(d))};
    double t = std::tanh(2.0 * beta);
    if (t == 0.0) return 0.0;
    if (!conf_feasible(d, beta)) return std::nullopt;
    double hi = sh.argmin(t), lo = 0.0;  // g(lo) > 0 >= g(hi)
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (sh.g(t, mid) < 0.0) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::optional<double> conf_c2(int d, double beta) {
    auto a = conf_alpha(d, beta);
    if (!a) return std::nullopt;
    double M2 = degree_bound_m2(d);
    double t = std::tanh(2.0 * beta);
    double s = std::pow(t, 1.0 - *a);
    return s / (1.0 - M2 * M2 * s);
}

double ConfTail::per_plaquette(int k) const { return c2 * std::pow(r, k); }

ConfTail conf_tail(int d, double beta, std::optional<double> eps) {
    auto cc = conf_constants(d);
    if (!(beta >= 0.0 && beta < cc.beta0))
        throw RegimeError("beta = " + std::to_string(beta) + " is not below beta0 = " + std::to_string(cc.beta0));
    double hi = cc.beta0 - beta;
    double e = eps.value_or(hi / 2.0);
    if (!(e > 0.0 && e < hi)) throw RegimeError("eps must lie in (0, beta0 - beta)");
    ConfTail t;
    t.eps = e;
    t.c2 = *conf_c2(d, beta + e);
    t.r = std::tanh(2.0 * beta) / std::tanh(2.0 * (beta + e));
    return t;
}

LogZResult log_z_cluster(Phase phase, const ModelParams& p, const Chain& gamma, ClusterCutoffs cut,
                         std::optional<double> eps) {
    p.validate();
    if (p.m != 2 || p.n != 2) throw UnsupportedError("cluster expansions are implemented for Z_2 only");
    BoxGeometry g(p.d, p.N);
    if (gamma.degree() != 1 || gamma.size() != g.count(1)) throw DegreeError("gamma must be a 1-chain on the box");
    const int k = std::min(cut.J, cut.kmax) + 1;
    LogZResult res;
    CompensatedSum sum;

    if (phase == Phase::Higgs) {
        auto tail = higgs_tail(p.d, p.kappa, eps);
        res.tail_bound = static_cast<double>(g.count(1)) * tail.per_edge(k);
        AdjacencyGraph G(Phase::Higgs, g);
        std::vector<double> logact;
        std::vector<int> parity;
        std::vector<char> par(g.count(2), 0);
        ClusterEnumerator en(G, cut);
        en.all(
            [&](std::span<const std::uint32_t>, std::span<const LocalPolymer> polys) {
                logact.resize(polys.size());
                parity.resize(polys.size());
                for (std::size_t i = 0; i < polys.size(); ++i) {
                    Cluster c{Phase::Higgs, {Polymer{Phase::Higgs, polys[i].cells}}, {1}};
                    int n2 = higgs_norm2(g, c);
                    logact[i] = -4.0 * p.beta * n2 - 4.0 * p.kappa * static_cast<double>(polys[i].cells.size());
                    long long s = 0;
                    for (auto e : polys[i].cells) s += gamma[e];
                    parity[i] = mod2(s);
                }
            },
            [&](const ClusterTerm& t) {
                double la = 0.0;
                int par_total = 0;
                for (int i : t.polymer) {
                    la += logact[i];
                    par_total ^= parity[i];
                }
                long double v = static_cast<long double>(t.ursell) * t.inv_symmetry * std::exp(static_cast<long double>(la));
                sum += par_total ? -v : v;
                ++res.clusters;
            });
    } else {
        auto cc = conf_constants(p.d);
        if (!(p.beta < cc.beta0))
            throw RegimeError("beta = " + std::to_string(p.beta) + " is not below beta0 = " + std::to_string(cc.beta0));
        if (p.beta == 0.0) return res;  // no polymer has nonzero activity
        auto tail = conf_tail(p.d, p.beta, eps);
        res.tail_bound = static_cast<double>(g.count(2)) * tail.per_plaquette(k);
        AdjacencyGraph G(Phase::Confinement, g);
        const double ltb = std::log(std::tanh(2.0 * p.beta));
        const double ltk = std::log(std::tanh(2.0 * p.kappa));
        std::vector<double> logact;
        std::vector<char> par(g.count(1), 0);
        auto on_gamma = [&](std::uint32_t e) { return mod2(gamma[e]) != 0; };
        ClusterEnumerator en(G, cut);
        en.all(
            [&](std::span<const std::uint32_t>, std::span<const LocalPolymer> polys) {
                logact.resize(polys.size());
                for (std::size_t i = 0; i < polys.size(); ++i) {
                    auto [all, hit] = delta_counts(g, polys[i].cells, on_gamma, par);
                    logact[i] = static_cast<double>(polys[i].cells.size()) * ltb + (all - 2 * hit) * ltk;
                }
            },
            [&](const ClusterTerm& t) {
                double la = 0.0;
                for (int i : t.polymer) la += logact[i];
                sum += static_cast<long double>(t.ursell) * t.inv_symmetry * std::exp(static_cast<long double>(la));
                ++res.clusters;
            });
    }
    res.value = static_cast<double>(sum.value());
    return res;
}

}  // namespace latthiggs
