#include "latthiggs/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <cmath>
#include <ctime>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "latthiggs/asymptotics.hpp"
#include "latthiggs/hte.hpp"
#include "latthiggs/parallel.hpp"

#ifndef LATTHIGGS_VERSION
#define LATTHIGGS_VERSION "0.1.0"
#endif

namespace latthiggs {

namespace fs = std::filesystem;

const char* latthiggs_version() { return LATTHIGGS_VERSION; }

Chain centred_line(const BoxGeometry& g, int len) {
    const int N = g.side();
    if (len < 1 || len > N) throw std::invalid_argument("gamma length must lie in [1, N]");
    std::vector<int> start(g.dim(), N / 2);
    start[0] = (N - len) / 2;
    return straight_path(g, start, 0, len);
}

int centred_line_margin(int d, int N, int len) {
    const int x0 = (N - len) / 2;
    int m = std::min(x0, N - (x0 + len));
    if (d > 1) m = std::min({m, N / 2, N - N / 2});
    return m;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string expectation_csv_header() { return "beta,kappa,gamma_len,expectation_re,expectation_im,method,N,margin,status"; }

std::string to_csv(const ExpectationRow& r) {
    std::ostringstream os;
    os << fmt_double(r.beta) << ',' << fmt_double(r.kappa) << ',' << r.gamma_len << ',' << fmt_double(r.value.real())
       << ',' << fmt_double(r.value.imag()) << ',' << r.method << ',' << r.N << ',' << r.margin << ','
       << csv_field(r.status);
    return os.str();
}

std::vector<ExpectationRow> read_expectation_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"beta", "kappa", "gamma_len", "expectation_re"})
        if (!col.count(need)) throw std::invalid_argument(std::string("CSV lacks column ") + need);
    auto get = [&](const std::vector<std::string>& f, const std::string& name, const std::string& dflt) {
        auto it = col.find(name);
        return it == col.end() || it->second >= f.size() ? dflt : f[it->second];
    };
    std::vector<ExpectationRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        ExpectationRow r;
        r.beta = std::stod(get(f, "beta", "0"));
        r.kappa = std::stod(get(f, "kappa", "0"));
        r.gamma_len = std::stoi(get(f, "gamma_len", "0"));
        r.value = {std::stod(get(f, "expectation_re", "nan")), std::stod(get(f, "expectation_im", "0"))};
        r.method = get(f, "method", "");
        r.N = std::stoi(get(f, "N", "0"));
        r.margin = std::stoi(get(f, "margin", "0"));
        r.status = get(f, "status", "ok");
        rows.push_back(std::move(r));
    }
    return rows;
}

ExpectationRow expectation_row(const ModelParams& p, int len, const std::string& method, const EnumerationOptions& opt) {
    ExpectationRow r;
    r.beta = p.beta;
    r.kappa = p.kappa;
    r.gamma_len = len;
    r.method = method;
    r.N = p.N;
    r.value = nan();
    try {
        r.margin = centred_line_margin(p.d, p.N, len);
        if (method == "transfer") {
            auto tm = transfer_matrix_expectation(p, len);
            r.value = tm.expectation;
            r.margin = tm.margin;
            return r;
        }
        BoxGeometry g(p.d, p.N);
        Chain gm = centred_line(g, len);
        if (method == "brute") r.value = exact_coupled_expectation(gm, p, opt);
        else if (method == "unitary") r.value = exact_unitary_expectation(gm, p, opt);
        else if (method == "hte") r.value = hte_expectation(gm, p, opt);
        else throw std::invalid_argument("unknown expectation method '" + method + "'");
    } catch (const std::exception& e) {
        r.value = nan();
        r.status = e.what();
    }
    return r;
}

std::string mc_csv_header() { return "beta,kappa,gamma_len,N,seed,mean,stderr,tau_int,acceptance,samples,status"; }

std::string to_csv(const McRow& r) {
    std::ostringstream os;
    os << fmt_double(r.beta) << ',' << fmt_double(r.kappa) << ',' << r.gamma_len << ',' << r.N << ',' << r.seed << ','
       << fmt_double(r.result.mean) << ',' << fmt_double(r.result.stderr_) << ',' << fmt_double(r.result.tau_int) << ','
       << fmt_double(r.result.acceptance) << ',' << r.result.samples << ',' << csv_field(r.status);
    return os.str();
}

McRow mc_row(const ModelParams& p, int len, const McConfig& mc) {
    McRow r;
    r.beta = p.beta;
    r.kappa = p.kappa;
    r.gamma_len = len;
    r.N = p.N;
    r.seed = mc.seed;
    try {
        BoxGeometry g(p.d, p.N);
        r.result = sample_expectation(centred_line(g, len), p, mc);
    } catch (const std::exception& e) {
        r.result.mean = r.result.stderr_ = nan();
        r.status = e.what();
    }
    return r;
}

json fit_report(const std::vector<ExpectationRow>& rows, int m, int n, double tol) {
    using Key = std::tuple<double, double, std::string, int>;
    std::map<Key, std::map<int, double>> groups;
    for (const auto& r : rows) {
        auto& E = groups[{r.beta, r.kappa, r.method, r.N}];
        if (r.status == "ok" && std::isfinite(r.value.real()) && r.value.real() > 0.0) E[r.gamma_len] = r.value.real();
    }
    json out = json::array();
    for (const auto& [key, E] : groups) {
        const auto& [b, k, method, N] = key;
        json j = {{"beta", b}, {"kappa", k}, {"method", method}, {"N", N}};
        try {
            auto fit = perimeter_fit(E, sandwich_rate(m, n, k), tol);
            j.update(to_json(fit));
            j["status"] = "ok";
        } catch (const std::exception& e) {
            j["status"] = e.what();
        }
        out.push_back(std::move(j));
    }
    return out;
}

std::string regime_label(int d, double beta, double kappa) {
    const bool higgs = kappa > higgs_constants(d).kappa0;
    const bool conf = conf_feasible(d, beta);
    if (higgs && conf) return "higgs+confinement";
    if (higgs) return "higgs";
    if (conf) return "confinement";
    return "undetermined";
}

namespace {

struct CellOut {
    std::vector<ExpectationRow> rows;
    std::vector<McRow> mc;
    json decay;
    json fit = json::array();
    std::size_t failures = 0;
};

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

RunSummary run_experiment(const ExperimentSpec& spec, const fs::path& out, const RunOptions& opt) {
    spec.validate();
    RunSummary sum;
    sum.dir = out;
    const std::size_t nk = spec.kappas.size();
    const std::size_t cells = spec.betas.size() * nk;
    sum.cells = cells;
    std::vector<CellOut> results(cells);
    const double tol = 1e-12 * spec.tolerance_scale * opt.tolerance_scale;

    parallel_for(cells, opt.jobs, [&](std::size_t c) {
        ModelParams p = spec.model;
        p.beta = spec.betas[c / nk];
        p.kappa = spec.kappas[c % nk];
        EnumerationOptions eo = default_enumeration_options();
        eo.jobs = 1;
        CellOut& co = results[c];
        for (const auto& m : spec.methods) {
            if (m == "mc" || m == "decay" || m == "fit") continue;
            for (int len : spec.lengths) co.rows.push_back(expectation_row(p, len, m, eo));
        }
        if (has(spec.methods, "mc"))
            for (int len : spec.lengths) {
                McConfig mc = spec.mc;
                mc.jobs = 1;
                mc.seed = spec.mc.seed + 1000003ULL * c + static_cast<std::uint64_t>(len);
                co.mc.push_back(mc_row(p, len, mc));
            }
        if (has(spec.methods, "decay")) {
            co.decay = {{"beta", p.beta}, {"kappa", p.kappa}};
            try {
                DecayOptions d;
                d.cut = spec.cut;
                co.decay.update(to_json(decay_constants(spec.phase, p.d, p.beta, p.kappa, d)));
                co.decay["status"] = "ok";
            } catch (const std::exception& e) {
                co.decay["status"] = e.what();
            }
        }
        if (has(spec.methods, "fit")) co.fit = fit_report(co.rows, p.m, p.n, tol);

        for (const auto& r : co.rows) co.failures += r.status != "ok";
        for (const auto& r : co.mc) co.failures += r.status != "ok";
        if (!co.decay.is_null()) co.failures += co.decay["status"] != "ok";
        for (const auto& f : co.fit) co.failures += f["status"] != "ok";

        json cj = {{"index", c}, {"beta", p.beta}, {"kappa", p.kappa}};
        json rows = json::array();
        for (const auto& r : co.rows)
            rows.push_back({{"gamma_len", r.gamma_len},
                            {"method", r.method},
                            {"re", r.value.real()},
                            {"im", r.value.imag()},
                            {"margin", r.margin},
                            {"status", r.status}});
        cj["expectations"] = rows;
        json mcj = json::array();
        for (const auto& r : co.mc) {
            json j = to_json(r.result);
            j["gamma_len"] = r.gamma_len;
            j["seed"] = r.seed;
            j["status"] = r.status;
            mcj.push_back(std::move(j));
        }
        cj["mc"] = mcj;
        if (!co.decay.is_null()) cj["decay"] = co.decay;
        cj["fit"] = co.fit;
        char name[64];
        std::snprintf(name, sizeof name, "cell_%05zu.json", c);
        write_atomic(out / "cells" / name, cj.dump(1) + "\n");
    });

    for (std::size_t c = 0; c < cells; ++c) {
        char name[64];
        std::snprintf(name, sizeof name, "cells/cell_%05zu.json", c);
        sum.files.push_back(name);
        sum.failed_evaluations += results[c].failures;
    }

    auto emit = [&](const std::string& rel, const std::string& content) {
        write_atomic(out / rel, content);
        sum.files.push_back(rel);
    };
    const bool any_rows = std::any_of(results.begin(), results.end(), [](const CellOut& c) { return !c.rows.empty(); });
    if (any_rows) {
        std::string s = expectation_csv_header() + "\n";
        for (const auto& c : results)
            for (const auto& r : c.rows) s += to_csv(r) + "\n";
        emit("expectations.csv", s);
    }
    if (has(spec.methods, "mc")) {
        std::string s = mc_csv_header() + "\n";
        for (const auto& c : results)
            for (const auto& r : c.mc) s += to_csv(r) + "\n";
        emit("mc.csv", s);
    }
    if (has(spec.methods, "decay")) {
        json all = json::array();
        for (const auto& c : results) all.push_back(c.decay);
        emit("decay.json", all.dump(1) + "\n");
    }
    if (has(spec.methods, "fit")) {
        json all = json::array();
        std::string s = "beta,kappa,method,N,a_hat,regime,status\n";
        for (const auto& c : results)
            for (const auto& f : c.fit) {
                all.push_back(f);
                const double b = f["beta"], k = f["kappa"];
                s += fmt_double(b) + "," + fmt_double(k) + "," + f["method"].get<std::string>() + "," +
                     std::to_string(f["N"].get<int>()) + "," +
                     (f.contains("a_hat") ? fmt_double(f["a_hat"].get<double>()) : std::string("nan")) + "," +
                     regime_label(spec.model.d, b, k) + "," + csv_field(f["status"].get<std::string>()) + "\n";
            }
        emit("fit.json", all.dump(1) + "\n");
        emit("phase_diagram.csv", s);
    }

    json files = json::array();
    for (const auto& f : sum.files) {
        std::ifstream in(out / f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files.push_back({{"path", f}, {"fnv1a", fnv1a_hex(ss.str())}});
    }
    const json sj = to_json(spec);
    json manifest = {{"version", latthiggs_version()},
                     {"spec", sj},
                     {"config_hash", fnv1a_hex(sj.dump())},
                     {"seeds",
                      {{"base", spec.mc.seed},
                       {"rule", "mc seed of cell c and length n is base + 1000003 c + n"},
                       {"used", has(spec.methods, "mc")}}},
                     {"cells", cells},
                     {"failed_evaluations", sum.failed_evaluations},
                     {"files", files},
                     {"created_utc", utc_now()}};
    write_atomic(out / "manifest.json", manifest.dump(1) + "\n");
    sum.files.push_back("manifest.json");
    return sum;
}

std::optional<ExperimentSpec> builtin_spec(const std::string& name) {
    if (name != "phase-diagram") return std::nullopt;
    ExperimentSpec s;
    s.name = name;
    s.model.d = 2;
    s.model.N = 12;
    for (int i = 0; i <= 15; ++i) s.betas.push_back(i / 10.0);
    for (int i = 1; i <= 15; ++i) s.kappas.push_back(i / 10.0);
    for (int n = 1; n <= 8; ++n) s.lengths.push_back(n);
    s.methods = {"transfer", "fit"};
    s.out_dir = "phase-diagram";
    return s;
}

}  // namespace latthiggs
