#include "latthiggs/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "latthiggs/errors.hpp"
#include "latthiggs/hte.hpp"
#include "latthiggs/oracle.hpp"
#include "latthiggs/summation.hpp"

namespace latthiggs {

LinePaths::LinePaths(const BoxGeometry& g, std::vector<int> origin, int axis)
    : g_(g), origin_(std::move(origin)), axis_(axis) {
    if (static_cast<int>(origin_.size()) != g.dim()) throw std::invalid_argument("origin has the wrong dimension");
    if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("axis out of range");
    if (!edge_at(0)) throw std::invalid_argument("e_0 lies outside the box");
}

std::optional<int> LinePaths::position(std::size_t edge) const {
    Cell c = g_.cell(1, edge);
    if (c.axes[0] != axis_) return std::nullopt;
    for (int i = 0; i < g_.dim(); ++i)
        if (i != axis_ && c.anchor[i] != origin_[i]) return std::nullopt;
    return c.anchor[axis_] - origin_[axis_];
}

std::optional<std::uint32_t> LinePaths::edge_at(int t) const {
    Cell c;
    c.anchor = origin_;
    c.anchor[axis_] += t;
    c.axes = {axis_};
    c.sign = 1;
    if (!g_.contains(c)) return std::nullopt;
    return static_cast<std::uint32_t>(g_.index(c));
}

Chain LinePaths::segment(int n) const {
    Chain ch = Chain::zero(g_, 1);
    for (int t = 0; t < n; ++t) {
        auto e = edge_at(t);
        if (!e) throw std::out_of_range("segment leaves the box");
        ch[*e] = 1;
    }
    return ch;
}

Chain LinePaths::half_line() const {
    Chain ch = Chain::zero(g_, 1);
    for (int t = 0;; ++t) {
        auto e = edge_at(t);
        if (!e) break;
        ch[*e] = 1;
    }
    return ch;
}

Chain LinePaths::full_line() const {
    Chain ch = half_line();
    for (int t = -1;; --t) {
        auto e = edge_at(t);
        if (!e) break;
        ch[*e] = 1;
    }
    return ch;
}

namespace {

bool odd(long long v) { return (v % 2) != 0; }

std::vector<std::uint32_t> support_union(const Cluster& S) {
    std::vector<std::uint32_t> u;
    for (auto& p : S.polymers) u.insert(u.end(), p.cells.begin(), p.cells.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

// odd-multiplicity faces of a plaquette set: supp delta eta
std::vector<std::uint32_t> delta_support(const BoxGeometry& g, std::span<const std::uint32_t> plaquettes) {
    std::vector<std::uint32_t> f;
    for (auto p : plaquettes)
        for (auto e : g.faces(2, p)) f.push_back(e.cell);
    std::sort(f.begin(), f.end());
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < f.size();) {
        std::size_t j = i;
        while (j < f.size() && f[j] == f[i]) ++j;
        if ((j - i) % 2) out.push_back(f[i]);
        i = j;
    }
    return out;
}

// odd-multiplicity cofaces of an edge set: supp d eta
int dsupport_size(const BoxGeometry& g, std::span<const std::uint32_t> edges) {
    std::vector<std::uint32_t> f;
    for (auto e : edges)
        for (auto p : g.cofaces(1, e)) f.push_back(p.cell);
    std::sort(f.begin(), f.end());
    int n = 0;
    for (std::size_t i = 0; i < f.size();) {
        std::size_t j = i;
        while (j < f.size() && f[j] == f[i]) ++j;
        n += (j - i) % 2;
        i = j;
    }
    return n;
}

bool plaquette_complete(const BoxGeometry& g, std::size_t p) {
    for (auto e : g.faces(2, p))
        if (!g.edge_complete(e.cell)) return false;
    return true;
}

double sup_envelope(const DecaySummary& s) {
    if (s.c == 0.0 || s.x == 0.0) return 0.0;
    double best = 0.0;
    for (int n = 1; n <= 100000; ++n) {
        double v = s.envelope(n) * std::exp(s.D_prime * n);
        best = std::max(best, v);
        if (n > 10 && v < best * 1e-3) break;
    }
    return best;
}

void fill_bounds(DecaySummary& s) {
    const int k = std::min(s.cut.J, s.cut.kmax) + 1;
    if (s.c == 0.0) return;
    const double xk = std::pow(s.x, k);
    s.a_tail = 2.0 * s.c * xk;
    s.C_tail = 8.0 * s.c * xk * (k + 1.0 / (1.0 - s.x));
    s.D_prime = -std::log(s.x) / 2.0;
    s.D = sup_envelope(s);
}

int default_box(const DecayOptions& opt) { return opt.N > 0 ? opt.N : 2 * (2 * opt.cut.J + 4); }

}  // namespace

double f_weight(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, const Chain& gamma, double beta,
                double kappa) {
    auto U = support_union(S);
    int h = 0;
    for (auto e : U) h += odd(gamma[e]);
    if (h == 0) throw std::invalid_argument("f_weight: cluster support misses gamma");
    long long sg = 0;
    for (std::size_t i = 0; i < S.polymers.size(); ++i)
        for (auto e : S.polymers[i].cells) sg += S.multiplicity[i] * gamma[e];
    if (!odd(sg)) return 0.0;
    return 2.0 * psi_higgs(g, G, S, beta, kappa) / h;
}

double g_weight(const BoxGeometry& g, const AdjacencyGraph& G, const Cluster& S, const Chain& gamma, double beta,
                double kappa) {
    std::vector<std::uint32_t> dS;
    for (auto& p : S.polymers) {
        auto d = delta_support(g, p.cells);
        dS.insert(dS.end(), d.begin(), d.end());
    }
    std::sort(dS.begin(), dS.end());
    dS.erase(std::unique(dS.begin(), dS.end()), dS.end());
    int h = 0;
    for (auto e : dS) h += odd(gamma[e]);
    if (h == 0) throw std::invalid_argument("g_weight: supp delta S misses gamma");
    return (psi_conf(g, G, S, gamma, beta, kappa) - psi_conf(g, G, S, Chain::zero(g, 1), beta, kappa)) / h;
}

double DecaySummary::envelope(int n) const {
    if (c == 0.0 || x == 0.0) return 0.0;
    return c * std::pow(x, n) * (12.0 * n + 8.0 / (1.0 - x));
}

double DecaySummary::finite_box(int n, int M) const {
    if (c == 0.0 || x == 0.0) return 0.0;
    return 4.0 * n * c * std::pow(x, M);
}

double DecaySummary::residual_bound(int n, std::optional<int> M) const {
    double b = a_tail * n + C_tail + envelope(n);
    if (M) b += finite_box(n, *M);
    return b;
}

DecaySummary decay_constants_higgs(int d, double beta, double kappa, const DecayOptions& opt) {
    auto tail = higgs_tail(d, kappa, opt.eps);
    DecaySummary s;
    s.phase = Phase::Higgs;
    s.d = d;
    s.beta = beta;
    s.kappa = kappa;
    s.cut = opt.cut;
    s.eps = tail.eps;
    s.c = tail.c_eps / 4.0;
    s.x = tail.x;
    s.box_N = default_box(opt);
    fill_bounds(s);

    const int J = opt.cut.J;
    BoxGeometry g(d, s.box_N);
    AdjacencyGraph G(Phase::Higgs, g);
    LinePaths L(g, std::vector<int>(d, s.box_N / 2));
    ClusterEnumerator en(G, opt.cut);

    struct Stat {
        double la;
        bool par_inf, par_half;
    };
    std::vector<Stat> st;
    int h_inf = 0, h_half = 0;
    auto on_support = [&](std::span<const std::uint32_t> U, std::span<const LocalPolymer> polys) {
        h_inf = h_half = 0;
        for (auto e : U) {
            if (!g.edge_complete(e)) throw std::logic_error("decay box too small for the cluster cutoff");
            auto t = L.position(e);
            if (t) {
                ++h_inf;
                if (*t >= 0) ++h_half;
            }
        }
        st.resize(polys.size());
        for (std::size_t i = 0; i < polys.size(); ++i) {
            int pi = 0, ph = 0;
            for (auto e : polys[i].cells) {
                auto t = L.position(e);
                if (t) {
                    pi ^= 1;
                    if (*t >= 0) ph ^= 1;
                }
            }
            st[i].la = -4.0 * beta * dsupport_size(g, polys[i].cells) -
                       4.0 * kappa * static_cast<double>(polys[i].cells.size());
            st[i].par_inf = pi;
            st[i].par_half = ph;
        }
    };
    auto psi_of = [&](const ClusterTerm& t, bool& pinf, bool& phalf) {
        double la = 0.0;
        pinf = phalf = false;
        for (int i : t.polymer) {
            la += st[i].la;
            pinf ^= st[i].par_inf;
            phalf ^= st[i].par_half;
        }
        return static_cast<long double>(t.ursell) * t.inv_symmetry * std::exp(static_cast<long double>(la));
    };

    CompensatedSum a;
    en.rooted(L.e0(), on_support, [&](const ClusterTerm& t) {
        bool pinf, phalf;
        auto psi = psi_of(t, pinf, phalf);
        ++s.clusters_a;
        if (pinf) a += 2.0L * psi / h_inf;
    });
    s.a = static_cast<double>(a.value());

    // Clusters whose support meets both halves, rooted at their gamma^- edge closest to the origin.
    CompensatedSum C;
    std::vector<char> forbidden(G.size(), 0);
    for (int sidx = -1; sidx >= -(J + 1); --sidx) {
        auto root = L.edge_at(sidx);
        if (!root) throw std::logic_error("decay box too small for the cluster cutoff");
        en.rooted(*root, on_support,
                  [&](const ClusterTerm& t) {
                      if (h_half == 0) return;
                      bool pinf, phalf;
                      auto psi = psi_of(t, pinf, phalf);
                      ++s.clusters_C;
                      long double fh = phalf ? 2.0L * psi : 0.0L;
                      long double fi = pinf ? 2.0L * psi * h_half / h_inf : 0.0L;
                      C += 2.0L * (fh - fi);
                  },
                  forbidden);
        forbidden[*root] = 1;
    }
    s.C = static_cast<double>(C.value());
    return s;
}

DecaySummary decay_constants_conf(int d, double beta, double kappa, const DecayOptions& opt) {
    auto cc = conf_constants(d);
    if (!(beta >= 0.0 && beta < cc.beta0))
        throw RegimeError("beta = " + std::to_string(beta) + " is not below beta0 = " + std::to_string(cc.beta0));
    if (!(kappa > 0.0)) throw RegimeError("confinement decay constants need kappa > 0");
    DecaySummary s;
    s.phase = Phase::Confinement;
    s.d = d;
    s.beta = beta;
    s.kappa = kappa;
    s.cut = opt.cut;
    s.box_N = default_box(opt);
    const double ltk = std::log(std::tanh(2.0 * kappa));
    s.a = -ltk;
    if (beta == 0.0) return s;  // no polymer carries weight

    auto tail = conf_tail(d, beta, opt.eps);
    s.eps = tail.eps;
    s.c = 2.0 * (d - 1) * tail.c2;
    s.x = tail.r;
    fill_bounds(s);

    const int J = opt.cut.J;
    const double ltb = std::log(std::tanh(2.0 * beta));
    BoxGeometry g(d, s.box_N);
    AdjacencyGraph G(Phase::Confinement, g);
    LinePaths L(g, std::vector<int>(d, s.box_N / 2));
    ClusterEnumerator en(G, opt.cut);

    struct Stat {
        double la0;
        int hits_inf, hits_half;
        std::vector<int> pos;  // line positions in supp delta eta
    };
    std::vector<Stat> st;
    auto on_support = [&](std::span<const std::uint32_t> U, std::span<const LocalPolymer> polys) {
        for (auto p : U)
            if (!plaquette_complete(g, p)) throw std::logic_error("decay box too small for the cluster cutoff");
        st.resize(polys.size());
        for (std::size_t i = 0; i < polys.size(); ++i) {
            auto dl = delta_support(g, polys[i].cells);
            Stat& s_i = st[i];
            s_i.pos.clear();
            s_i.hits_inf = s_i.hits_half = 0;
            for (auto e : dl) {
                auto t = L.position(e);
                if (t) {
                    s_i.pos.push_back(*t);
                    ++s_i.hits_inf;
                    if (*t >= 0) ++s_i.hits_half;
                }
            }
            s_i.la0 = static_cast<double>(polys[i].cells.size()) * ltb + static_cast<double>(dl.size()) * ltk;
        }
    };
    std::vector<int> upos;
    struct Eval {
        long double psi0, psi_inf, psi_half;
        int h_inf, h_half;
        bool has0;
    };
    auto eval = [&](const ClusterTerm& t) {
        double la = 0.0;
        int hi = 0, hh = 0;
        upos.clear();
        for (int i : t.polymer) {
            la += st[i].la0;
            hi += st[i].hits_inf;
            hh += st[i].hits_half;
            upos.insert(upos.end(), st[i].pos.begin(), st[i].pos.end());
        }
        std::sort(upos.begin(), upos.end());
        upos.erase(std::unique(upos.begin(), upos.end()), upos.end());
        Eval ev;
        ev.psi0 = static_cast<long double>(t.ursell) * t.inv_symmetry * std::exp(static_cast<long double>(la));
        ev.psi_inf = ev.psi0 * std::exp(static_cast<long double>(-2.0 * ltk * hi));
        ev.psi_half = ev.psi0 * std::exp(static_cast<long double>(-2.0 * ltk * hh));
        ev.h_inf = static_cast<int>(upos.size());
        ev.h_half = static_cast<int>(std::count_if(upos.begin(), upos.end(), [](int p) { return p >= 0; }));
        ev.has0 = std::binary_search(upos.begin(), upos.end(), 0);
        return ev;
    };

    CompensatedSum sumG;
    std::vector<char> forbidden(G.size(), 0);
    for (auto p : g.cofaces(1, L.e0())) {
        en.rooted(p.cell, on_support,
                  [&](const ClusterTerm& t) {
                      auto ev = eval(t);
                      if (!ev.has0) return;
                      ++s.clusters_a;
                      sumG += (ev.psi_inf - ev.psi0) / ev.h_inf;
                  },
                  forbidden);
        forbidden[p.cell] = 1;
    }
    s.a = static_cast<double>(-ltk - sumG.value());

    std::vector<std::uint32_t> roots;
    for (int sidx = -1; sidx >= -(J + 1); --sidx) {
        auto e = L.edge_at(sidx);
        if (!e) throw std::logic_error("decay box too small for the cluster cutoff");
        for (auto p : g.cofaces(1, *e))
            if (std::find(roots.begin(), roots.end(), p.cell) == roots.end()) roots.push_back(p.cell);
    }
    std::fill(forbidden.begin(), forbidden.end(), 0);
    CompensatedSum C;
    for (auto r : roots) {
        en.rooted(r, on_support,
                  [&](const ClusterTerm& t) {
                      auto ev = eval(t);
                      if (ev.h_half == 0) return;
                      ++s.clusters_C;
                      long double gh = (ev.psi_half - ev.psi0) / ev.h_half;
                      long double gi = (ev.psi_inf - ev.psi0) / ev.h_inf;
                      C += -2.0L * ev.h_half * (gh - gi);
                  },
                  forbidden);
        forbidden[r] = 1;
    }
    s.C = static_cast<double>(C.value());
    return s;
}

DecaySummary decay_constants(Phase phase, int d, double beta, double kappa, const DecayOptions& opt) {
    return phase == Phase::Higgs ? decay_constants_higgs(d, beta, kappa, opt)
                                 : decay_constants_conf(d, beta, kappa, opt);
}

int finite_box_margin(Phase phase, const BoxGeometry& g, const Chain& gamma) {
    const int k = phase == Phase::Higgs ? 1 : 2;
    AdjacencyGraph G(phase, g);
    const std::size_t n = g.count(k);
    std::vector<int> dist(n, -1);
    std::queue<std::uint32_t> q;
    for (std::size_t v = 0; v < n; ++v) {
        bool bad = k == 1 ? !g.edge_complete(v) : !plaquette_complete(g, v);
        if (bad) {
            dist[v] = 0;
            q.push(static_cast<std::uint32_t>(v));
        }
    }
    while (!q.empty()) {
        auto v = q.front();
        q.pop();
        for (auto w : G.neighbors(v))
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
    }
    int best = std::numeric_limits<int>::max();
    for (std::size_t e = 0; e < gamma.size(); ++e) {
        if (gamma[e] == 0) continue;
        if (k == 1) {
            best = std::min(best, dist[e] + 1);
        } else {
            for (auto p : g.cofaces(1, e)) best = std::min(best, dist[p.cell] + 1);
        }
    }
    if (best == std::numeric_limits<int>::max()) throw std::invalid_argument("gamma is empty");
    return best;
}

double sandwich_rate(int m, int n, double kappa) {
    const int L = std::lcm(m, n);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = 0; j < L; ++j) {
        double v = barphi(L, kappa, j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return -std::log(lo / hi);
}

PerimeterFit perimeter_fit(const std::map<int, double>& E, double b, double tol) {
    if (E.size() < 3) throw std::invalid_argument("perimeter_fit needs at least three lengths");
    PerimeterFit f;
    f.a_hat = std::numeric_limits<double>::infinity();
    for (auto [n, v] : E) {
        if (n < 1 || !(v > 0.0)) throw std::invalid_argument("perimeter_fit needs positive expectations at n >= 1");
        double r = -std::log(v) / n;
        f.rate[n] = r;
        f.a_hat = std::min(f.a_hat, r);
    }
    for (auto [na, va] : E)
        for (auto [nb, vb] : E) {
            if (nb < na) continue;
            auto it = E.find(na + nb);
            if (it == E.end()) continue;
            ++f.superadditivity.checks;
            double viol = (std::log(va) + std::log(vb)) - std::log(it->second);
            if (viol > tol) {
                ++f.superadditivity.violations;
                f.superadditivity.max_violation = std::max(f.superadditivity.max_violation, viol);
            }
        }
    f.superadditivity.passed = f.superadditivity.violations == 0;

    auto& s = f.sandwich;
    s.b = b;
    auto e1 = E.find(1);
    s.b_prime = e1 != E.end() ? -std::log(e1->second) : std::numeric_limits<double>::quiet_NaN();
    for (auto [n, v] : E) {
        double lv = std::log(v);
        double lower = -b * n - lv;  // > 0 means E < e^{-b n}
        if (lower > tol) {
            ++s.lower_violations;
            s.max_lower_violation = std::max(s.max_lower_violation, lower);
        }
        if (!std::isnan(s.b_prime)) {
            double upper = lv + s.b_prime * n;  // > 0 means E > e^{-b' n}
            if (upper > tol) {
                ++s.upper_violations;
                s.max_upper_violation = std::max(s.max_upper_violation, upper);
            }
        }
    }
    s.lower_passed = s.lower_violations == 0;
    s.upper_passed = !std::isnan(s.b_prime) && s.upper_violations == 0;
    return f;
}

SuperadditivityReport positioned_superadditivity(const ModelParams& p, int n_max, double tol) {
    std::map<std::pair<int, int>, long double> cache;
    auto nl = [&](int len, int x0) {
        auto key = std::pair{len, x0};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        long double v = transfer_matrix_expectation(p, len, x0, p.N / 2).neg_log;
        cache[key] = v;
        return v;
    };
    SuperadditivityReport r;
    for (int s = 2; s <= n_max; ++s) {
        int x0 = (p.N - s) / 2;
        for (int a = 1; a < s; ++a) {
            ++r.checks;
            double viol = static_cast<double>(nl(s, x0) - nl(a, x0) - nl(s - a, x0 + a));
            if (viol > tol) {
                ++r.violations;
                r.max_violation = std::max(r.max_violation, viol);
            }
        }
    }
    r.passed = r.violations == 0;
    return r;
}

}  // namespace latthiggs
