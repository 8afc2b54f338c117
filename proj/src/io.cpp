#include "latthiggs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <toml.hpp>

#include "latthiggs/errors.hpp"

namespace latthiggs {

namespace fs = std::filesystem;

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m{"brute", "unitary", "transfer", "hte", "mc", "decay", "fit"};
    return m;
}

void ExperimentSpec::validate() const {
    model.validate();
    if (betas.empty()) throw std::invalid_argument("spec: beta grid is empty");
    if (kappas.empty()) throw std::invalid_argument("spec: kappa grid is empty");
    if (lengths.empty()) throw std::invalid_argument("spec: no gamma lengths");
    for (int n : lengths)
        if (n < 1) throw std::invalid_argument("spec: gamma lengths must be positive");
    if (methods.empty()) throw std::invalid_argument("spec: no methods");
    for (const auto& m : methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw std::invalid_argument("spec: unknown method '" + m + "'");
    if (!(tolerance_scale > 0.0)) throw std::invalid_argument("spec: tolerance_scale must be positive");
    if (std::find(methods.begin(), methods.end(), "mc") != methods.end()) mc.validate();
}

ModelParams model_from_json(const json& j) {
    ModelParams p;
    p.d = j.value("d", p.d);
    p.N = j.value("N", p.N);
    p.m = j.value("m", p.m);
    p.n = j.value("n", p.n);
    p.beta = j.value("beta", p.beta);
    p.kappa = j.value("kappa", p.kappa);
    return p;
}

json to_json(const ModelParams& p) {
    return {{"d", p.d}, {"N", p.N}, {"m", p.m}, {"n", p.n}, {"beta", p.beta}, {"kappa", p.kappa}};
}

namespace {

std::vector<double> number_list(const json& j) {
    std::vector<double> v;
    if (j.is_number()) {
        v.push_back(j.get<double>());
        return v;
    }
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

// A grid is either a list or {start, stop, step}, inclusive of stop.
std::vector<double> grid_list(const json& j) {
    if (!j.is_object()) return number_list(j);
    double a = j.at("start").get<double>(), b = j.at("stop").get<double>(), h = j.at("step").get<double>();
    if (!(h > 0.0)) throw std::invalid_argument("spec: grid step must be positive");
    std::vector<double> v;
    const long count = static_cast<long>(std::floor((b - a) / h + 1e-9));
    // rounding keeps 0.1 * 3 printing as 0.3
    for (long i = 0; i <= count; ++i) v.push_back(std::round((a + h * static_cast<double>(i)) * 1e12) / 1e12);
    return v;
}

}  // namespace

ExperimentSpec spec_from_json(const json& j) {
    ExperimentSpec s;
    s.name = j.value("name", s.name);
    if (j.contains("model")) s.model = model_from_json(j.at("model"));
    s.betas = {s.model.beta};
    s.kappas = {s.model.kappa};
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("beta")) s.betas = grid_list(g.at("beta"));
        if (g.contains("kappa")) s.kappas = grid_list(g.at("kappa"));
    }
    s.lengths = {1};
    if (j.contains("gamma")) {
        const auto& g = j.at("gamma");
        if (g.contains("lengths")) s.lengths = g.at("lengths").get<std::vector<int>>();
        else if (g.contains("max_length")) {
            s.lengths.clear();
            for (int n = 1; n <= g.at("max_length").get<int>(); ++n) s.lengths.push_back(n);
        }
    }
    s.methods = {"transfer"};
    if (j.contains("run")) {
        const auto& r = j.at("run");
        if (r.contains("methods")) s.methods = r.at("methods").get<std::vector<std::string>>();
        s.out_dir = r.value("out", s.out_dir);
        s.tolerance_scale = r.value("tolerance_scale", s.tolerance_scale);
        if (r.contains("phase")) s.phase = phase_from_string(r.at("phase").get<std::string>());
    }
    if (j.contains("cluster")) {
        const auto& c = j.at("cluster");
        s.cut.J = c.value("cutoff", s.cut.J);
        s.cut.kmax = c.value("kmax", s.cut.kmax);
    }
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        s.mc.seed = m.value("seed", s.mc.seed);
        s.mc.sweeps = m.value("sweeps", s.mc.sweeps);
        s.mc.burn_in = m.value("burn_in", s.mc.burn_in);
        s.mc.stride = m.value("stride", s.mc.stride);
        s.mc.batches = m.value("batches", s.mc.batches);
        s.mc.chains = m.value("chains", s.mc.chains);
    }
    return s;
}

json to_json(const ExperimentSpec& s) {
    return {{"name", s.name},
            {"model", to_json(s.model)},
            {"grid", {{"beta", s.betas}, {"kappa", s.kappas}}},
            {"gamma", {{"lengths", s.lengths}}},
            {"run",
             {{"methods", s.methods},
              {"out", s.out_dir},
              {"tolerance_scale", s.tolerance_scale},
              {"phase", to_string(s.phase)}}},
            {"cluster", {{"cutoff", s.cut.J}, {"kmax", s.cut.kmax}}},
            {"mc",
             {{"seed", s.mc.seed},
              {"sweeps", s.mc.sweeps},
              {"burn_in", s.mc.burn_in},
              {"stride", s.mc.stride},
              {"batches", s.mc.batches},
              {"chains", s.mc.chains}}}};
}

json load_config_tree(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    if (path.extension() == ".json") return json::parse(in);
    if (path.extension() != ".toml") throw std::invalid_argument("config must be .toml or .json: " + path.string());
    toml::table tbl;
    try {
        tbl = toml::parse(in, path.string());
    } catch (const toml::parse_error& e) {
        throw std::invalid_argument(std::string("bad TOML: ") + e.what());
    }
    std::ostringstream ss;
    ss << toml::json_formatter{tbl};
    return json::parse(ss.str());
}

ExperimentSpec load_spec(const fs::path& path) { return spec_from_json(load_config_tree(path)); }

namespace {

json cell_json(const Cell& c) { return {{"anchor", c.anchor}, {"axes", c.axes}}; }

Cell cell_from(const json& e, int degree) {
    Cell c;
    c.anchor = e.at("anchor").get<std::vector<int>>();
    c.axes = e.at("axes").get<std::vector<int>>();
    if (c.degree() != degree) throw DegreeError("entry degree does not match the form degree");
    return c;
}

}  // namespace

json form_to_json(const BoxGeometry& g, const Form& f) {
    json entries = json::array();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f[i]) continue;
        json e = cell_json(g.cell(f.degree(), i));
        e["value"] = f[i];
        entries.push_back(std::move(e));
    }
    return {{"degree", f.degree()}, {"q", f.modulus()}, {"entries", std::move(entries)}};
}

Form form_from_json(const BoxGeometry& g, const json& j) {
    const int k = j.at("degree").get<int>();
    Form f = Form::zero(g, k, j.at("q").get<int>());
    for (const auto& e : j.at("entries")) {
        Cell c = cell_from(e, k);
        if (!g.contains(c)) throw std::invalid_argument("form entry outside the box");
        f.set(g.index(c), e.at("value").get<long long>());
    }
    return f;
}

json chain_to_json(const BoxGeometry& g, const Chain& c) {
    json entries = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c[i]) continue;
        json e = cell_json(g.cell(c.degree(), i));
        e["value"] = c[i];
        entries.push_back(std::move(e));
    }
    return {{"degree", c.degree()}, {"entries", std::move(entries)}};
}

Chain chain_from_json(const BoxGeometry& g, const json& j) {
    const int k = j.at("degree").get<int>();
    Chain ch = Chain::zero(g, k);
    for (const auto& e : j.at("entries")) {
        Cell c = cell_from(e, k);
        if (!g.contains(c)) throw std::invalid_argument("chain entry outside the box");
        ch[g.index(c)] += e.at("value").get<long long>();
    }
    return ch;
}

json to_json(const DecaySummary& s) {
    return {{"phase", to_string(s.phase)},
            {"d", s.d},
            {"beta", s.beta},
            {"kappa", s.kappa},
            {"a", s.a},
            {"C", s.C},
            {"a_tail", s.a_tail},
            {"C_tail", s.C_tail},
            {"D", s.D},
            {"D_prime", s.D_prime},
            {"c", s.c},
            {"x", s.x},
            {"eps", s.eps},
            {"cutoff", s.cut.J},
            {"kmax", s.cut.kmax},
            {"box_N", s.box_N},
            {"clusters_a", s.clusters_a},
            {"clusters_C", s.clusters_C}};
}

json to_json(const PerimeterFit& f) {
    json rate = json::object();
    for (auto [n, r] : f.rate) rate[std::to_string(n)] = r;
    const auto& sa = f.superadditivity;
    const auto& sw = f.sandwich;
    return {{"rate", rate},
            {"a_hat", f.a_hat},
            {"superadditivity",
             {{"checks", sa.checks},
              {"violations", sa.violations},
              {"max_violation", sa.max_violation},
              {"passed", sa.passed}}},
            {"sandwich",
             {{"b", sw.b},
              {"b_prime", sw.b_prime},
              {"lower_violations", sw.lower_violations},
              {"upper_violations", sw.upper_violations},
              {"max_lower_violation", sw.max_lower_violation},
              {"max_upper_violation", sw.max_upper_violation},
              {"lower_passed", sw.lower_passed},
              {"upper_passed", sw.upper_passed}}}};
}

json to_json(const McResult& r) {
    return {{"mean", r.mean},
            {"stderr", r.stderr_},
            {"tau_int", r.tau_int},
            {"acceptance", r.acceptance},
            {"samples", r.samples},
            {"batch_means", r.batch_means}};
}

std::size_t dump_clusters(std::ostream& os, Phase phase, const ModelParams& p, const Chain& gamma,
                          ClusterCutoffs cut) {
    BoxGeometry g(p.d, p.N);
    AdjacencyGraph G = build_graph(phase, g);
    ClusterEnumerator en(G, cut);
    std::vector<Polymer> table;
    std::size_t count = 0;
    en.all(
        [&](std::span<const std::uint32_t>, std::span<const LocalPolymer> polys) {
            table.clear();
            for (const auto& lp : polys) table.push_back(Polymer{phase, lp.cells});
        },
        [&](const ClusterTerm& t) {
            Cluster S;
            S.phase = phase;
            for (std::size_t i = 0; i < t.polymer.size(); ++i) {
                if (i > 0 && t.polymer[i] == t.polymer[i - 1]) {
                    ++S.multiplicity.back();
                    continue;
                }
                S.polymers.push_back(table[t.polymer[i]]);
                S.multiplicity.push_back(1);
            }
            json polys = json::array();
            for (std::size_t i = 0; i < S.polymers.size(); ++i)
                polys.push_back({{"cells", S.polymers[i].cells}, {"multiplicity", S.multiplicity[i]}});
            const bool higgs = phase == Phase::Higgs;
            json line = {{"phase", to_string(phase)},
                         {"polymers", std::move(polys)},
                         {"n", t.n},
                         {"norm1", S.norm()},
                         {"norm2_or_gamma", higgs ? higgs_norm2(g, S) : conf_gamma_norm(g, S, gamma)},
                         {"ursell", t.ursell},
                         {"psi", higgs ? psi_higgs(g, G, S, p.beta, p.kappa)
                                       : psi_conf(g, G, S, gamma, p.beta, p.kappa)}};
            os << line.dump() << '\n';
            ++count;
        });
    return count;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace latthiggs
