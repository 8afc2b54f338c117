#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "latthiggs/checks.hpp"
#include "latthiggs/io.hpp"
#include "latthiggs/runner.hpp"

using namespace latthiggs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("latthiggs_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kToml = R"(
name = "small"
[model]
d = 2
N = 4
beta = 0.3
kappa = 0.7
[grid]
beta = [0.0, 0.5]
kappa = { start = 0.1, stop = 0.3, step = 0.1 }
[gamma]
lengths = [1, 2, 3]
[run]
methods = ["transfer", "unitary", "fit"]
tolerance_scale = 2.0
[mc]
seed = 11
sweeps = 400
)";

const char* kJson = R"({
 "name": "small",
 "model": {"d": 2, "N": 4, "beta": 0.3, "kappa": 0.7},
 "grid": {"beta": [0.0, 0.5], "kappa": {"start": 0.1, "stop": 0.3, "step": 0.1}},
 "gamma": {"lengths": [1, 2, 3]},
 "run": {"methods": ["transfer", "unitary", "fit"], "tolerance_scale": 2.0},
 "mc": {"seed": 11, "sweeps": 400}
})";

}  // namespace

TEST(Config, TomlAndJsonAgree) {
    auto dir = scratch("config");
    std::ofstream(dir / "a.toml") << kToml;
    std::ofstream(dir / "a.json") << kJson;
    auto a = load_spec(dir / "a.toml");
    auto b = load_spec(dir / "a.json");
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_EQ(a.model.N, 4);
    EXPECT_EQ(a.betas, (std::vector<double>{0.0, 0.5}));
    EXPECT_EQ(a.kappas, (std::vector<double>{0.1, 0.2, 0.3}));
    EXPECT_EQ(a.mc.seed, 11u);
    EXPECT_EQ(a.tolerance_scale, 2.0);
    EXPECT_NO_THROW(a.validate());
    // JSON round trip of the spec itself
    EXPECT_EQ(to_json(spec_from_json(to_json(a))), to_json(a));
}

TEST(Config, Validation) {
    auto s = spec_from_json(json::parse(kJson));
    s.betas.clear();
    EXPECT_THROW(s.validate(), std::invalid_argument);
    auto t = spec_from_json(json::parse(R"({"grid": {"kappa": []}})"));
    EXPECT_THROW(t.validate(), std::invalid_argument);
    auto u = spec_from_json(json::parse(R"({"run": {"methods": ["magic"]}})"));
    EXPECT_THROW(u.validate(), std::invalid_argument);
    auto v = spec_from_json(json::parse(R"({"model": {"m": 1}})"));
    EXPECT_THROW(v.validate(), std::invalid_argument);
    EXPECT_THROW(load_spec("/nonexistent/x.toml"), std::invalid_argument);
    auto dir = scratch("badtoml");
    std::ofstream(dir / "bad.toml") << "[model\nd = ";
    EXPECT_THROW(load_spec(dir / "bad.toml"), std::invalid_argument);
}

TEST(Serialization, FormAndChainRoundTrip) {
    std::mt19937 rng(3);
    for (auto [d, N] : {std::pair{2, 3}, std::pair{3, 2}}) {
        BoxGeometry g(d, N);
        for (int k = 0; k <= d; ++k)
            for (int q : {2, 3, 5}) {
                Form f = Form::zero(g, k, q);
                for (std::size_t i = 0; i < f.size(); ++i) f.set(i, rng() % q);
                json j = form_to_json(g, f);
                EXPECT_EQ(j["entries"].size(), f.support_size());
                EXPECT_EQ(form_from_json(g, json::parse(j.dump())), f);
                Chain c = Chain::zero(g, k);
                for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<long long>(rng() % 5) - 2;
                EXPECT_EQ(chain_from_json(g, json::parse(chain_to_json(g, c).dump())), c);
            }
    }
    BoxGeometry g(2, 2);
    json bad = {{"degree", 1}, {"q", 2}, {"entries", {{{"anchor", {0, 0}}, {"axes", {0, 1}}, {"value", 1}}}}};
    EXPECT_ANY_THROW(form_from_json(g, bad));
    json outside = {{"degree", 1}, {"q", 2}, {"entries", {{{"anchor", {2, 0}}, {"axes", {0}}, {"value", 1}}}}};
    EXPECT_ANY_THROW(form_from_json(g, outside));
}

TEST(Serialization, HashAndDoubles) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678}) EXPECT_EQ(std::stod(fmt_double(v)), v);
    EXPECT_EQ(fmt_double(0.3), "0.3");
}

TEST(Serialization, AtomicWriteReplaces) {
    auto dir = scratch("atomic");
    write_atomic(dir / "sub" / "x.txt", "one");
    write_atomic(dir / "sub" / "x.txt", "two");
    EXPECT_EQ(slurp(dir / "sub" / "x.txt"), "two");
    EXPECT_FALSE(fs::exists(dir / "sub" / "x.txt.tmp"));
}

TEST(Rows, CsvRoundTripAndMargins) {
    ModelParams p;
    p.d = 2;
    p.N = 6;
    p.beta = 0.2;
    p.kappa = 0.6;
    std::ostringstream os;
    os << expectation_csv_header() << "\n";
    for (int n = 1; n <= 4; ++n) {
        auto r = expectation_row(p, n, "transfer");
        EXPECT_EQ(r.margin, centred_line_margin(2, 6, n));
        os << to_csv(r) << "\n";
    }
    auto bad = expectation_row(p, 9, "transfer");
    EXPECT_NE(bad.status, "ok");
    EXPECT_TRUE(std::isnan(bad.value.real()));
    os << to_csv(bad) << "\n";
    std::istringstream in(os.str());
    auto rows = read_expectation_csv(in);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[2].value.real(), expectation_row(p, 3, "transfer").value.real());
    EXPECT_EQ(rows[4].status, bad.status);
    // brute force agrees with the transfer matrix on a box it can enumerate
    p.N = 2;
    EXPECT_NEAR(expectation_row(p, 2, "brute").value.real(), expectation_row(p, 2, "transfer").value.real(), 1e-12);
}

TEST(Rows, FitReportOnTransferData) {
    ModelParams p;
    p.d = 2;
    p.N = 10;
    p.beta = 0.0;
    p.kappa = 0.5;
    std::vector<ExpectationRow> rows;
    for (int n = 1; n <= 6; ++n) rows.push_back(expectation_row(p, n, "transfer"));
    auto rep = fit_report(rows, 2, 2);
    ASSERT_EQ(rep.size(), 1u);
    EXPECT_EQ(rep[0]["status"], "ok");
    EXPECT_NEAR(rep[0]["a_hat"].get<double>(), -std::log(std::tanh(1.0)), 1e-12);
    rows.resize(2);
    EXPECT_NE(fit_report(rows, 2, 2)[0]["status"], "ok");
}

TEST(Runner, DeterministicArtifacts) {
    auto spec = spec_from_json(json::parse(kJson));
    spec.methods = {"transfer", "unitary", "brute", "mc", "decay", "fit"};
    spec.mc.sweeps = 400;
    spec.mc.burn_in = 50;
    spec.mc.batches = 4;
    spec.phase = Phase::Higgs;
    spec.cut = {3, 3};
    auto d1 = scratch("run1"), d2 = scratch("run2");
    RunOptions one, many;
    many.jobs = 4;
    auto s1 = run_experiment(spec, d1, one);
    auto s2 = run_experiment(spec, d2, many);
    ASSERT_EQ(s1.files, s2.files);
    EXPECT_EQ(s1.files.back(), "manifest.json");
    EXPECT_EQ(s1.cells, 6u);
    // both enumerations exceed the default budget at N = 4 and the Higgs decay
    // constants fail below kappa0; the run still completes.
    EXPECT_GT(s1.failed_evaluations, 0u);
    for (const auto& f : s1.files) {
        if (f == "manifest.json") continue;
        EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
    }
    auto m1 = json::parse(slurp(d1 / "manifest.json")), m2 = json::parse(slurp(d2 / "manifest.json"));
    m1.erase("created_utc");
    m2.erase("created_utc");
    EXPECT_EQ(m1, m2);
    EXPECT_EQ(m1["config_hash"], fnv1a_hex(to_json(spec).dump()));
    for (const auto& f : m1["files"]) EXPECT_EQ(f["fnv1a"], fnv1a_hex(slurp(d1 / f["path"].get<std::string>())));

    std::ifstream csv(d1 / "expectations.csv");
    auto rows = read_expectation_csv(csv);
    EXPECT_EQ(rows.size(), 6u * 3u * 3u);
    std::size_t enum_fail = 0, tm_fail = 0;
    for (const auto& r : rows) {
        enum_fail += r.method != "transfer" && r.status != "ok";
        tm_fail += r.method == "transfer" && r.status != "ok";
    }
    EXPECT_EQ(enum_fail, 36u);
    EXPECT_EQ(tm_fail, 0u);
    EXPECT_TRUE(fs::exists(d1 / "phase_diagram.csv"));
    EXPECT_TRUE(fs::exists(d1 / "mc.csv"));
}

TEST(Runner, EmptyGridIsRejected) {
    auto spec = spec_from_json(json::parse(kJson));
    spec.kappas.clear();
    auto dir = scratch("empty");
    EXPECT_THROW(run_experiment(spec, dir), std::invalid_argument);
    EXPECT_FALSE(fs::exists(dir / "manifest.json"));
}

TEST(Runner, BuiltinPhaseDiagramSpecValidates) {
    auto s = builtin_spec("phase-diagram");
    ASSERT_TRUE(s.has_value());
    EXPECT_NO_THROW(s->validate());
    EXPECT_FALSE(builtin_spec("nope").has_value());
    EXPECT_EQ(regime_label(2, 0.0, 3.0), "higgs+confinement");
    EXPECT_EQ(regime_label(2, 0.5, 3.0), "higgs");
    EXPECT_EQ(regime_label(2, 0.0, 0.1), "confinement");
    EXPECT_EQ(regime_label(2, 0.5, 0.1), "undetermined");
}

TEST(ClusterDump, LinesSumToTruncatedLogZ) {
    ModelParams p;
    p.d = 2;
    p.N = 2;
    p.beta = 0.5;
    p.kappa = 1.5;
    BoxGeometry g(2, 2);
    std::ostringstream os;
    ClusterCutoffs cut{3, 3};
    auto count = dump_clusters(os, Phase::Higgs, p, Chain::zero(g, 1), cut);
    auto lz = log_z_cluster(Phase::Higgs, p, Chain::zero(g, 1), cut);
    EXPECT_EQ(count, lz.clusters);
    std::istringstream in(os.str());
    std::string line;
    double sum = 0.0;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        auto j = json::parse(line);
        for (const char* k : {"phase", "polymers", "n", "norm1", "norm2_or_gamma", "ursell", "psi"})
            ASSERT_TRUE(j.contains(k)) << k;
        EXPECT_LE(j["norm1"].get<int>(), cut.J);
        sum += j["psi"].get<double>();
        ++lines;
    }
    EXPECT_EQ(lines, count);
    EXPECT_NEAR(sum, lz.value, 1e-14);
}

TEST(Checks, BruteUrsellSmallCases) {
    std::vector<std::uint32_t> single{0};
    EXPECT_EQ(ursell_brute_force(single), 1.0);
    std::vector<std::uint32_t> pair{2, 1};
    EXPECT_EQ(ursell_brute_force(pair), -1.0);
    std::vector<std::uint32_t> apart{0, 0};
    EXPECT_EQ(ursell_brute_force(apart), 0.0);
    std::vector<std::uint32_t> k3{6, 5, 3};  // triangle: 3 trees - 1 full = 2
    EXPECT_EQ(ursell_brute_force(k3), 2.0);
}

TEST(Checks, FastCriteriaPass) {
    for (int id : {5, 6}) {
        auto r = run_check(id);
        EXPECT_TRUE(r.passed) << format_check(r);
    }
    EXPECT_THROW(run_check(12), std::out_of_range);
}
