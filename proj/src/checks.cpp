#include "latthiggs/checks.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "latthiggs/asymptotics.hpp"
#include "latthiggs/clusters.hpp"
#include "latthiggs/errors.hpp"
#include "latthiggs/hte.hpp"
#include "latthiggs/mc.hpp"
#include "latthiggs/oracle.hpp"

namespace latthiggs {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ModelParams model(int d, int N, double beta, double kappa, int m = 2, int n = 2) {
    ModelParams p;
    p.d = d;
    p.N = N;
    p.m = m;
    p.n = n;
    p.beta = beta;
    p.kappa = kappa;
    return p;
}

Chain edge_chain(const BoxGeometry& g, std::vector<int> anchor, int axis) {
    Chain c = Chain::zero(g, 1);
    c.add(g, Cell{std::move(anchor), {axis}});
    return c;
}

// (0,0) -> (1,0) -> (1,1)
Chain corner_path(const BoxGeometry& g) { return edge_chain(g, {0, 0}, 0) + edge_chain(g, {1, 0}, 1); }

// Boundary of the unit plaquette at the origin.
Chain plaquette_loop(const BoxGeometry& g) {
    Chain p = Chain::zero(g, 2);
    p.add(g, Cell{{0, 0}, {0, 1}});
    return boundary(g, p);
}

CheckResult make_result(int id, std::string name) {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

EnumerationOptions enum_opts(const CheckOptions& opt) {
    auto e = default_enumeration_options();
    e.jobs = opt.jobs;
    return e;
}

CheckResult unitary_gauge(const CheckOptions& opt) {
    auto r = make_result(1, "unitary gauge equivalence");
    const double tol = 1e-12 * opt.tolerance_scale;
    const std::vector<double> grid{0.0, 0.2, 0.5, 1.0};
    double worst = 0.0;
    int cmp = 0;
    for (int N : {1, 2}) {
        BoxGeometry g(2, N);
        std::vector<Chain> gammas{edge_chain(g, {0, 0}, 0), corner_path(g)};
        if (N >= 2) gammas.push_back(straight_path(g, std::vector<int>{0, 1}, 0, 2));
        for (double b : grid)
            for (double k : grid) {
                auto p = model(2, N, b, k);
                auto c = exact_coupled(p, gammas, enum_opts(opt));
                auto u = exact_unitary(p, gammas, enum_opts(opt));
                for (std::size_t i = 0; i < gammas.size(); ++i) {
                    worst = std::max(worst, std::abs(c.expectations[i] - u.expectations[i]));
                    ++cmp;
                }
            }
    }
    r.passed = worst <= tol;
    r.detail = std::to_string(cmp) + " comparisons, max |coupled - unitary| = " + sci(worst) + " (tol " + sci(tol) + ")";
    return r;
}

CheckResult hte_identity(const CheckOptions& opt) {
    auto r = make_result(2, "HTE identity");
    const double tol = 1e-10 * opt.tolerance_scale;
    BoxGeometry g(2, 1);
    std::vector<Chain> gammas{edge_chain(g, {0, 0}, 0), corner_path(g), plaquette_loop(g)};
    double worst = 0.0;
    int cmp = 0;
    for (auto [m, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}})
        for (double b : {0.2, 0.6})
            for (double k : {0.2, 0.6}) {
                auto p = model(2, 1, b, k, m, n);
                for (const auto& gm : gammas) {
                    std::complex<double> want = exact_coupled_expectation(gm, p, enum_opts(opt));
                    worst = std::max(worst, std::abs(std::complex<double>(hte_expectation(gm, p, enum_opts(opt))) - want));
                    ++cmp;
                }
            }
    r.passed = worst <= tol;
    r.detail = std::to_string(cmp) + " comparisons, max |hte - oracle| = " + sci(worst) + " (tol " + sci(tol) + ")";
    return r;
}

CheckResult beta_zero(const CheckOptions& opt) {
    auto r = make_result(3, "exact beta = 0 law");
    const double tol = 1e-12 * opt.tolerance_scale;
    double worst = 0.0;
    for (double k : {0.25, 0.5, 1.0, 2.0}) {
        auto p = model(2, 12, 0.0, k);
        for (int n = 1; n <= 8; ++n)
            worst = std::max(worst, std::abs(transfer_matrix_expectation(p, n).expectation - std::pow(std::tanh(2 * k), n)));
    }
    bool ok = worst <= tol;
    std::ostringstream d;
    d << "transfer matrix max err " << sci(worst) << " (tol " << sci(tol) << ")";
    for (auto [ph, k] : {std::pair{Phase::Higgs, 1.5}, std::pair{Phase::Higgs, 2.0}, std::pair{Phase::Confinement, 0.5},
                         std::pair{Phase::Confinement, 2.0}}) {
        auto s = decay_constants(ph, 2, 0.0, k);
        double err = std::abs(s.a + std::log(std::tanh(2 * k)));
        bool within = err <= s.a_tail + tol;
        ok = ok && within;
        d << "; " << to_string(ph) << " kappa=" << k << " |a - law| = " << sci(err) << " vs tail " << sci(s.a_tail);
    }
    r.passed = ok;
    r.detail = d.str();
    return r;
}

CheckResult monotonicity(const CheckOptions& opt) {
    auto r = make_result(4, "monotonicity and Griffiths");
    const double tol = 1e-12 * opt.tolerance_scale;
    BoxGeometry g(2, 2);
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
    std::vector<Chain> gammas{edge_chain(g, {0, 0}, 0), straight_path(g, std::vector<int>{0, 1}, 0, 2), corner_path(g),
                              plaquette_loop(g)};
    std::size_t mono_viol = 0, mono_cmp = 0;
    double mono_worst = 0.0;
    for (const auto& gm : gammas) {
        auto rep = check_monotonicity(model(2, 2, 0, 0), gm, grid, grid, tol, enum_opts(opt));
        mono_viol += rep.violations;
        mono_cmp += rep.comparisons;
        mono_worst = std::max(mono_worst, rep.max_violation);
    }
    std::vector<std::pair<Chain, Chain>> pairs{{gammas[0], edge_chain(g, {1, 1}, 1)},
                                               {gammas[0], gammas[3]},
                                               {gammas[1], gammas[2]},
                                               {gammas[2], gammas[3]}};
    std::size_t gr_viol = 0, gr_cmp = 0;
    double gr_worst = 0.0;
    for (double b : grid)
        for (double k : grid)
            for (const auto& [a, c] : pairs) {
                auto rep = check_griffiths(model(2, 2, b, k), a, c, tol, enum_opts(opt));
                ++gr_cmp;
                gr_viol += !rep.passed;
                gr_worst = std::max(gr_worst, rep.violation);
            }
    r.passed = mono_viol == 0 && gr_viol == 0;
    r.detail = "monotonicity " + std::to_string(mono_viol) + "/" + std::to_string(mono_cmp) + " violations (max " +
               sci(mono_worst) + "), Griffiths " + std::to_string(gr_viol) + "/" + std::to_string(gr_cmp) +
               " violations (max " + sci(gr_worst) + ")";
    return r;
}

// Cells at distance >= 1 from every face of the box in every coordinate.
bool interior(const Cell& c, int N) {
    for (std::size_t i = 0; i < c.anchor.size(); ++i)
        if (c.anchor[i] < 1 || c.anchor[i] + 1 > N - 1) return false;
    return true;
}

CheckResult degree_bounds(const CheckOptions&) {
    auto r = make_result(5, "adjacency degree bounds");
    bool ok = true;
    std::ostringstream d;
    for (auto [dim, N] : {std::pair{2, 4}, std::pair{3, 3}, std::pair{4, 3}}) {
        BoxGeometry g(dim, N);
        for (Phase ph : {Phase::Higgs, Phase::Confinement}) {
            AdjacencyGraph G(ph, g);
            const int M = ph == Phase::Higgs ? degree_bound_m1(dim) : degree_bound_m2(dim);
            const int k = G.cell_degree();
            int bulk_max = 0;
            for (std::size_t v = 0; v < G.size(); ++v)
                if (interior(g.cell(k, v), N)) bulk_max = std::max(bulk_max, G.degree(v));
            ok = ok && G.max_degree() == M && bulk_max == M;
            d << (ph == Phase::Higgs ? "G1" : "G2") << "(d=" << dim << ") max " << G.max_degree() << " bulk " << bulk_max
              << " bound " << M << "; ";
        }
    }
    r.passed = ok;
    r.detail = d.str();
    return r;
}

CheckResult ursell_check(const CheckOptions&) {
    auto r = make_result(6, "Ursell function");
    std::size_t graphs = 0, bad = 0;
    for (int k = 1; k <= 5; ++k) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
        for (std::uint32_t pat = 0; pat < (1u << pairs.size()); ++pat) {
            std::vector<std::uint32_t> touch(k, 0);
            for (std::size_t t = 0; t < pairs.size(); ++t)
                if (pat >> t & 1) {
                    touch[pairs[t].first] |= 1u << pairs[t].second;
                    touch[pairs[t].second] |= 1u << pairs[t].first;
                }
            ++graphs;
            if (ursell_from_masks(touch) != ursell_brute_force(touch)) ++bad;
        }
    }
    BoxGeometry g(2, 3);
    AdjacencyGraph G(Phase::Higgs, g);
    Polymer e{Phase::Higgs, {0}};
    const double single = ursell(G, Cluster{Phase::Higgs, {e}, {1}});
    const double pair = ursell(G, Cluster{Phase::Higgs, {e}, {2}});
    r.passed = bad == 0 && single == 1.0 && pair == -1.0;
    r.detail = std::to_string(graphs) + " labelled compatibility graphs on k <= 5, " + std::to_string(bad) +
               " mismatches; U(singleton) = " + sci(single) + ", U(pair) = " + sci(pair);
    return r;
}

CheckResult cluster_convergence(const CheckOptions& opt) {
    auto r = make_result(7, "cluster expansion convergence");
    const double kappa0 = higgs_constants(2).kappa0;
    bool ok = kappa0 < 1.5;
    std::ostringstream d;
    d << "kappa0 = " << sci(kappa0) << "; ";
    double worst_ratio = 0.0;
    for (double k : {1.5, 2.0})
        for (double b : {0.0, 0.5}) {
            auto p = model(2, 2, b, k);
            BoxGeometry g(2, 2);
            const double exact = exact_unitary(p, {}, enum_opts(opt)).log_z;
            std::vector<double> tails;
            for (int J : {2, 3, 4}) {
                auto lz = log_z_cluster(Phase::Higgs, p, Chain::zero(g, 1), ClusterCutoffs{J, 6});
                const double err = std::abs(lz.value - exact);
                if (err > lz.tail_bound) {
                    ok = false;
                    d << "beta=" << b << " kappa=" << k << " J=" << J << " err " << sci(err) << " > tail "
                      << sci(lz.tail_bound) << "; ";
                }
                tails.push_back(lz.tail_bound);
            }
            const double x = higgs_tail(2, k).x;
            for (std::size_t i = 1; i < tails.size(); ++i) {
                const double ratio = tails[i] / tails[i - 1];
                worst_ratio = std::max(worst_ratio, ratio);
                if (!(ratio < 1.0) || std::abs(ratio - x) > 1e-9 * x) ok = false;
            }
        }
    r.passed = ok;
    d << "all errors within tails: " << (ok ? "yes" : "no") << ", max tail ratio per J step " << sci(worst_ratio);
    r.detail = d.str();
    return r;
}

struct ResidualRun {
    std::vector<double> residual, bound;
};

ResidualRun residuals(const DecaySummary& s, int N, int nmax) {
    auto p = model(2, N, s.beta, s.kappa);
    BoxGeometry g(2, N);
    ResidualRun out;
    for (int n = 1; n <= nmax; ++n) {
        auto tm = transfer_matrix_expectation(p, n);
        const int M = finite_box_margin(s.phase, g, straight_path(g, std::vector<int>{tm.x0, tm.y0}, 0, n));
        out.residual.push_back(std::abs(static_cast<double>(tm.neg_log) - s.a * n - s.C));
        out.bound.push_back(s.residual_bound(n, M));
    }
    return out;
}

// Both halves of the perimeter-law protocol: residual within the bound for
// n = 1..8 and strictly decreasing from n = 3 on.
std::pair<bool, std::string> perimeter_protocol(const DecaySummary& s) {
    auto rr = residuals(s, 12, 8);
    std::size_t over = 0, rises = 0;
    for (std::size_t i = 0; i < rr.residual.size(); ++i) over += rr.residual[i] > rr.bound[i];
    for (std::size_t i = 3; i < rr.residual.size(); ++i) rises += !(rr.residual[i] < rr.residual[i - 1]);
    std::ostringstream d;
    d << "a = " << s.a << ", C = " << s.C << "; bound violations " << over << "/8, non-decreasing steps for n >= 3 "
      << rises << "/5; residuals";
    for (double v : rr.residual) d << ' ' << sci(v);
    d << "; bounds";
    for (double v : rr.bound) d << ' ' << sci(v);
    return {over == 0 && rises == 0, d.str()};
}

CheckResult higgs_perimeter(const CheckOptions&) {
    auto r = make_result(8, "perimeter law, Higgs phase");
    auto s = decay_constants_higgs(2, 0.5, 2.0);
    auto [ok, detail] = perimeter_protocol(s);
    r.passed = ok;
    r.detail = detail;
    return r;
}

CheckResult conf_perimeter(const CheckOptions&) {
    auto r = make_result(9, "perimeter law, confinement phase");
    const double beta0 = conf_constants(2).beta0;
    const double beta = 0.1, kappa = 0.5;
    try {
        auto s = decay_constants_conf(2, beta, kappa);
        auto [ok, detail] = perimeter_protocol(s);
        r.passed = ok && beta < beta0;
        r.detail = detail;
    } catch (const RegimeError& e) {
        r.passed = false;
        r.detail = std::string("decay constants unavailable, RegimeError: ") + e.what();
    }
    auto s = decay_constants_conf(2, 0.5 * beta0, kappa);
    auto [ok, detail] = perimeter_protocol(s);
    r.notes.push_back(std::string("supplementary run at beta = beta0/2 = ") + sci(0.5 * beta0) + ", kappa = 0.5: " +
                      (ok ? "PASS" : "FAIL") + " (" + detail + ")");
    return r;
}

CheckResult sandwich(const CheckOptions& opt) {
    auto r = make_result(10, "perimeter sandwich and superadditivity");
    const double tol = 1e-12 * opt.tolerance_scale;
    const double beta0 = conf_constants(2).beta0;
    const std::vector<std::pair<double, double>> points{{0.0, 0.25}, {0.0, 0.5},  {0.0, 1.0},         {0.0, 2.0},
                                                        {0.5, 2.0},  {0.2, 0.5},  {0.5, 1.0},         {1.0, 0.3},
                                                        {0.5, 1.1},  {0.2, 1.3},  {0.5 * beta0, 0.5}, {0.5 * beta0, 0.25}};
    std::size_t lower = 0, upper = 0, naive = 0, positioned = 0, checks = 0;
    double worst_upper = 0.0;
    for (auto [b, k] : points) {
        auto p = model(2, 12, b, k);
        std::map<int, double> E;
        for (int n = 1; n <= 8; ++n) E[n] = transfer_matrix_expectation(p, n).expectation;
        auto fit = perimeter_fit(E, sandwich_rate(2, 2, k), tol);
        lower += fit.sandwich.lower_violations;
        upper += fit.sandwich.upper_violations;
        worst_upper = std::max(worst_upper, fit.sandwich.max_upper_violation);
        naive += fit.superadditivity.violations;
        auto pos = positioned_superadditivity(p, 8, tol);
        positioned += pos.violations;
        checks += pos.checks;
    }
    r.passed = lower == 0 && upper == 0 && positioned == 0;
    r.detail = std::to_string(points.size()) + " parameter points, n = 1..8: lower sandwich violations " +
               std::to_string(lower) + ", upper sandwich violations " + std::to_string(upper) + " (max " +
               sci(worst_upper) + "), positioned superadditivity violations " + std::to_string(positioned) + "/" +
               std::to_string(checks);
    r.notes.push_back("superadditivity across centred placements (boundary effects mixed in): " +
                      std::to_string(naive) + " violations");
    if (upper > 0)
        r.notes.push_back("Griffiths gives E_n >= E_1^n = exp(-b' n), so the upper sandwich holds in the reverse direction");
    return r;
}

CheckResult mc_consistency(const CheckOptions& opt) {
    auto r = make_result(11, "Monte Carlo consistency");
    std::mt19937 rng(5);
    double worst_db = 0.0;
    for (auto [b, k] : {std::pair{0.3, 0.7}, std::pair{1.1, 0.2}, std::pair{0.0, 1.5}}) {
        auto p = model(2, 4, b, k);
        BoxGeometry g(2, 4);
        for (int t = 0; t < 200; ++t) {
            Form s = Form::zero(g, 1, 2);
            for (std::size_t e = 0; e < s.size(); ++e) s.set(e, rng() & 1);
            const std::size_t e = rng() % s.size();
            Form s2 = s;
            s2.set(e, 1 - s[e]);
            const double ratio = unitary_weight(g, s2, p) / unitary_weight(g, s, p);
            const double got = metropolis_acceptance(g, s, e, p) / metropolis_acceptance(g, s2, e, p);
            worst_db = std::max(worst_db, std::abs(got - ratio) / ratio);
        }
    }
    const double beta0 = conf_constants(2).beta0;
    std::size_t outside = 0, cmp = 0;
    double worst_z = 0.0;
    for (auto [b, k] : {std::pair{0.5, 1.1}, std::pair{0.2, 1.3}, std::pair{0.5 * beta0, 0.5}, std::pair{0.5 * beta0, 0.25}}) {
        auto p = model(2, 6, b, k);
        BoxGeometry g(2, 6);
        for (int len = 1; len <= 4; ++len) {
            auto tm = transfer_matrix_expectation(p, len);
            McConfig mc;
            mc.seed = 100 + len;
            mc.sweeps = 100000;
            mc.burn_in = 500;
            mc.batches = 20;
            mc.chains = 4;
            mc.jobs = opt.jobs;
            auto res = sample_expectation(straight_path(g, std::vector<int>{tm.x0, tm.y0}, 0, len), p, mc);
            const double z = std::abs(res.mean - tm.expectation) / res.stderr_;
            worst_z = std::max(worst_z, z);
            outside += !(z <= 3.0);
            ++cmp;
        }
    }
    const double db_tol = 1e-12 * opt.tolerance_scale;
    r.passed = outside == 0 && worst_db <= db_tol;
    r.detail = "detailed balance max rel err " + sci(worst_db) + " (tol " + sci(db_tol) + "); " +
               std::to_string(outside) + "/" + std::to_string(cmp) + " estimates beyond 3 stderr, max |z| = " +
               sci(worst_z);
    return r;
}

using CheckFn = CheckResult (*)(const CheckOptions&);
constexpr CheckFn kChecks[kCheckCount] = {unitary_gauge, hte_identity,        beta_zero,       monotonicity,
                                          degree_bounds, ursell_check,        cluster_convergence,
                                          higgs_perimeter, conf_perimeter,    sandwich,        mc_consistency};

}  // namespace

double ursell_brute_force(std::span<const std::uint32_t> touch) {
    const int k = static_cast<int>(touch.size());
    if (k == 0) return 0.0;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (touch[i] >> j & 1) edges.emplace_back(i, j);
    if (edges.size() > 24) throw std::invalid_argument("ursell_brute_force: too many edges");
    double sum = 0.0;
    std::vector<int> parent(k);
    for (std::uint32_t sub = 0; sub < (1u << edges.size()); ++sub) {
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
        int comps = k;
        for (std::size_t t = 0; t < edges.size(); ++t)
            if (sub >> t & 1) {
                int a = find(edges[t].first), b = find(edges[t].second);
                if (a != b) {
                    parent[a] = b;
                    --comps;
                }
            }
        if (comps == 1) sum += (std::popcount(sub) % 2) ? -1.0 : 1.0;
    }
    return sum;
}

CheckResult run_check(int id, const CheckOptions& opt) {
    if (id < 1 || id > kCheckCount) throw std::out_of_range("no acceptance check " + std::to_string(id));
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = kChecks[id - 1](opt);
    } catch (const std::exception& e) {
        r.id = id;
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CheckResult> run_checks(const CheckOptions& opt, std::span<const int> ids) {
    std::vector<CheckResult> out;
    if (ids.empty())
        for (int i = 1; i <= kCheckCount; ++i) out.push_back(run_check(i, opt));
    else
        for (int i : ids) out.push_back(run_check(i, opt));
    return out;
}

std::string format_check(const CheckResult& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS" : "FAIL") << "  " << (r.id < 10 ? " " : "") << r.id << "  " << r.name << "  " << r.detail;
    for (const auto& n : r.notes) os << "\n        note: " << n;
    return os.str();
}

std::string checks_csv(const std::vector<CheckResult>& rs) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    std::ostringstream os;
    os << "id,name,status,detail\n";
    for (const auto& r : rs)
        os << r.id << ',' << quote(r.name) << ',' << (r.passed ? "PASS" : "FAIL") << ',' << quote(r.detail) << '\n';
    return os.str();
}

}  // namespace latthiggs
