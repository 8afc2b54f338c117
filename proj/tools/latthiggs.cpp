// latthiggs: command-line front end for the oracle, HTE, cluster, decay, fit
// and Monte Carlo machinery.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "latthiggs/checks.hpp"
#include "latthiggs/errors.hpp"
#include "latthiggs/hte.hpp"
#include "latthiggs/runner.hpp"

using namespace latthiggs;
namespace fs = std::filesystem;

namespace {

struct Global {
    std::string config;
    std::string out;
    int jobs = 1;
    double tolerance_scale = 1.0;
};

ExperimentSpec spec_or_default(const Global& g) {
    if (g.config.empty()) {
        ExperimentSpec s;
        s.betas = {s.model.beta};
        s.kappas = {s.model.kappa};
        s.lengths = {1};
        s.methods = {"transfer"};
        return s;
    }
    return load_spec(g.config);
}

// Writes to --out when given, stdout otherwise.
void emit(const Global& g, const std::string& text) {
    if (g.out.empty()) std::cout << text;
    else write_atomic(g.out, text);
}

std::vector<int> lengths_up_to(int K) {
    if (K < 1) throw std::invalid_argument("--gamma-len must be positive");
    std::vector<int> v;
    for (int n = 1; n <= K; ++n) v.push_back(n);
    return v;
}

int cmd_oracle(const Global& g, int K, const std::string& method) {
    auto spec = spec_or_default(g);
    spec.lengths = lengths_up_to(K);
    spec.methods = {method};
    spec.validate();
    auto eo = default_enumeration_options();
    eo.jobs = g.jobs;
    std::string s = expectation_csv_header() + "\n";
    int failed = 0;
    for (double b : spec.betas)
        for (double k : spec.kappas) {
            ModelParams p = spec.model;
            p.beta = b;
            p.kappa = k;
            for (int n : spec.lengths) {
                auto r = expectation_row(p, n, method, eo);
                failed += r.status != "ok";
                s += to_csv(r) + "\n";
            }
        }
    emit(g, s);
    return failed ? 2 : 0;
}

int cmd_hte_check(const Global& g, int K) {
    auto spec = spec_or_default(g);
    spec.lengths = lengths_up_to(K);
    spec.validate();
    auto eo = default_enumeration_options();
    eo.jobs = g.jobs;
    const double tol = 1e-10 * g.tolerance_scale * spec.tolerance_scale;
    std::ostringstream s;
    s << "beta,kappa,m,n,N,gamma_len,hte,oracle_re,oracle_im,abs_err,tolerance,status\n";
    int failed = 0;
    for (double b : spec.betas)
        for (double k : spec.kappas) {
            ModelParams p = spec.model;
            p.beta = b;
            p.kappa = k;
            BoxGeometry geo(p.d, p.N);
            for (int n : spec.lengths) {
                s << fmt_double(b) << ',' << fmt_double(k) << ',' << p.m << ',' << p.n << ',' << p.N << ',' << n << ',';
                try {
                    Chain gm = centred_line(geo, n);
                    const double h = hte_expectation(gm, p, eo);
                    const auto o = exact_coupled_expectation(gm, p, eo);
                    const double err = std::abs(std::complex<double>(h) - o);
                    const bool ok = err <= tol;
                    failed += !ok;
                    s << fmt_double(h) << ',' << fmt_double(o.real()) << ',' << fmt_double(o.imag()) << ','
                      << fmt_double(err) << ',' << fmt_double(tol) << ',' << (ok ? "PASS" : "FAIL") << '\n';
                } catch (const std::exception& e) {
                    ++failed;
                    s << "nan,nan,nan,nan," << fmt_double(tol) << ",\"ERROR: " << e.what() << "\"\n";
                }
            }
        }
    emit(g, s.str());
    return failed ? 1 : 0;
}

int cmd_decay(const Global& g, const std::string& phase, int d, double beta, double kappa, int J, int kmax,
              std::optional<double> eps, int box) {
    DecayOptions opt;
    opt.cut = {J, kmax};
    opt.eps = eps;
    opt.N = box;
    auto s = decay_constants(phase_from_string(phase), d, beta, kappa, opt);
    json j = to_json(s);
    json env = json::array();
    for (int n = 1; n <= 8; ++n) env.push_back({{"n", n}, {"envelope", s.envelope(n)}, {"residual_bound", s.residual_bound(n)}});
    j["bounds"] = env;
    emit(g, j.dump(2) + "\n");
    return 0;
}

int cmd_fit(const Global& g, const std::string& input, int m, int n) {
    std::ifstream in(input);
    if (!in) throw std::invalid_argument("cannot open " + input);
    auto rows = read_expectation_csv(in);
    json rep = fit_report(rows, m, n, 1e-12 * g.tolerance_scale);
    emit(g, rep.dump(2) + "\n");
    for (const auto& f : rep)
        if (f["status"] != "ok") return 2;
    return 0;
}

int cmd_mc(const Global& g, int K, std::optional<int> sweeps, std::optional<std::uint64_t> seed,
           std::optional<int> chains) {
    auto spec = spec_or_default(g);
    spec.lengths = lengths_up_to(K);
    spec.methods = {"mc"};
    if (sweeps) spec.mc.sweeps = *sweeps;
    if (seed) spec.mc.seed = *seed;
    if (chains) spec.mc.chains = *chains;
    spec.mc.jobs = g.jobs;
    spec.validate();
    std::string s = mc_csv_header() + "\n";
    int failed = 0;
    for (double b : spec.betas)
        for (double k : spec.kappas) {
            ModelParams p = spec.model;
            p.beta = b;
            p.kappa = k;
            for (int n : spec.lengths) {
                McConfig mc = spec.mc;
                mc.seed = spec.mc.seed + static_cast<std::uint64_t>(n);
                auto r = mc_row(p, n, mc);
                failed += r.status != "ok";
                s += to_csv(r) + "\n";
            }
        }
    emit(g, s);
    return failed ? 2 : 0;
}

int cmd_constants(const Global& g, std::vector<int> dims) {
    if (dims.empty()) dims = {2, 3, 4};
    json out = json::array();
    for (int d : dims) {
        auto h = higgs_constants(d);
        auto c = conf_constants(d);
        out.push_back({{"d", d},
                       {"M1", h.M1},
                       {"M2", c.M2},
                       {"kappa0_higgs", h.kappa0},
                       {"alpha_higgs", h.alpha},
                       {"c_eps_min", c_eps_min(d)},
                       {"beta0_conf", c.beta0}});
    }
    emit(g, out.dump(2) + "\n");
    return 0;
}

int cmd_clusters(const Global& g, const std::string& phase, int d, int N, double beta, double kappa, int J, int kmax) {
    ModelParams p;
    p.d = d;
    p.N = N;
    p.beta = beta;
    p.kappa = kappa;
    p.validate();
    BoxGeometry geo(d, N);
    std::ostringstream os;
    const std::size_t count = dump_clusters(os, phase_from_string(phase), p, Chain::zero(geo, 1), {J, kmax});
    emit(g, os.str());
    std::cerr << count << " clusters\n";
    return 0;
}

int cmd_run(Global g, const std::string& name) {
    if (name == "checks" || name == "paper-checks") {
        CheckOptions opt;
        opt.jobs = g.jobs;
        opt.tolerance_scale = g.tolerance_scale;
        std::vector<CheckResult> rs;
        int failed = 0;
        for (int id = 1; id <= kCheckCount; ++id) {
            rs.push_back(run_check(id, opt));
            std::cout << format_check(rs.back()) << std::endl;
            failed += !rs.back().passed;
        }
        std::cout << (kCheckCount - failed) << "/" << kCheckCount << " criteria passed\n";
        if (!g.out.empty()) {
            fs::path dir = g.out;
            write_atomic(dir / "checks.csv", checks_csv(rs));
            json manifest = {{"version", latthiggs_version()},
                             {"spec", name},
                             {"config_hash", fnv1a_hex(name)},
                             {"tolerance_scale", g.tolerance_scale},
                             {"files", {"checks.csv"}}};
            write_atomic(dir / "manifest.json", manifest.dump(1) + "\n");
        }
        return failed ? 1 : 0;
    }
    ExperimentSpec spec;
    if (auto b = builtin_spec(name)) spec = *b;
    else if (!name.empty()) spec = load_spec(name);
    else if (!g.config.empty()) spec = load_spec(g.config);
    else throw std::invalid_argument("run needs a built-in spec name, a config path or --config");
    fs::path out = g.out.empty() ? fs::path(spec.out_dir) : fs::path(g.out);
    RunOptions ro;
    ro.jobs = g.jobs;
    ro.tolerance_scale = g.tolerance_scale;
    auto sum = run_experiment(spec, out, ro);
    std::cout << "wrote " << sum.files.size() << " files for " << sum.cells << " cells to " << out.string();
    if (sum.failed_evaluations) std::cout << " (" << sum.failed_evaluations << " failed evaluations, see status columns)";
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wilson line expectations and perimeter-law constants for the Z_m x Z_n lattice Higgs model"};
    app.set_version_flag("--version", std::string(latthiggs_version()));
    app.require_subcommand(1);
    Global g;
    app.add_option("--config", g.config, "TOML or JSON experiment config");
    app.add_option("--out", g.out, "output file (or directory for run)");
    app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tolerance-scale", g.tolerance_scale, "multiplier on numeric tolerances")->check(CLI::PositiveNumber);

    int K = 1;
    std::string method = "transfer";
    auto* oracle = app.add_subcommand("oracle", "exact expectations as CSV over the config grid");
    oracle->add_option("--gamma-len", K, "rows for lengths 1..K")->required();
    oracle->add_option("--method", method)->check(CLI::IsMember({"brute", "transfer", "unitary", "hte"}));

    int hteK = 2;
    auto* hte = app.add_subcommand("hte-check", "HTE ratio against enumeration, pass/fail CSV");
    hte->add_option("--gamma-len", hteK, "lengths 1..K");

    std::string phase = "higgs";
    int d = 2, J = 6, kmax = 6, box = 0;
    double beta = 0.0, kappa = 0.0;
    std::optional<double> eps;
    auto* decay = app.add_subcommand("decay", "decay constants a, C with tails and envelopes as JSON");
    decay->add_option("--phase", phase)->check(CLI::IsMember({"higgs", "conf", "confinement"}));
    decay->add_option("--beta", beta)->required();
    decay->add_option("--kappa", kappa)->required();
    decay->add_option("--cutoff", J, "max ||S||");
    decay->add_option("--kmax", kmax, "max polymers per cluster");
    decay->add_option("--d", d);
    decay->add_option("--eps", eps);
    decay->add_option("--box", box, "box side for the lattice sums (0 = automatic)");

    std::string input;
    int fm = 2, fn = 2;
    auto* fit = app.add_subcommand("fit", "perimeter fit of oracle CSV data as JSON");
    fit->add_option("--input", input)->required();
    fit->add_option("--m", fm);
    fit->add_option("--n", fn);

    int mcK = 1;
    std::optional<int> sweeps, chains;
    std::optional<std::uint64_t> seed;
    auto* mc = app.add_subcommand("mc", "Metropolis estimates as CSV over the config grid");
    mc->add_option("--gamma-len", mcK, "lengths 1..K")->required();
    mc->add_option("--sweeps", sweeps);
    mc->add_option("--seed", seed);
    mc->add_option("--chains", chains);

    std::vector<int> dims;
    auto* constants = app.add_subcommand("constants", "convergence thresholds and degree bounds as JSON");
    constants->add_option("--d", dims);

    int cN = 2;
    auto* clusters = app.add_subcommand("clusters", "JSON-lines dump of every cluster in a box");
    clusters->add_option("--phase", phase)->check(CLI::IsMember({"higgs", "conf", "confinement"}));
    clusters->add_option("--d", d);
    clusters->add_option("--N", cN);
    clusters->add_option("--beta", beta);
    clusters->add_option("--kappa", kappa);
    clusters->add_option("--cutoff", J);
    clusters->add_option("--kmax", kmax);

    std::string spec_name;
    auto* run = app.add_subcommand("run", "run a config or built-in spec (checks, paper-checks, phase-diagram)");
    run->add_option("spec", spec_name, "built-in name or config path");

    for (auto* s : {oracle, hte, decay, fit, mc, constants, clusters, run}) s->fallthrough();

    CLI11_PARSE(app, argc, argv);
    try {
        if (oracle->parsed()) return cmd_oracle(g, K, method);
        if (hte->parsed()) return cmd_hte_check(g, hteK);
        if (decay->parsed()) return cmd_decay(g, phase, d, beta, kappa, J, kmax, eps, box);
        if (fit->parsed()) return cmd_fit(g, input, fm, fn);
        if (mc->parsed()) return cmd_mc(g, mcK, sweeps, seed, chains);
        if (constants->parsed()) return cmd_constants(g, dims);
        if (clusters->parsed()) return cmd_clusters(g, phase, d, cN, beta, kappa, J, kmax);
        if (run->parsed()) return cmd_run(g, spec_name);
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << "\n";
        return 3;
    } catch (const BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
