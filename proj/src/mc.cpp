#include "latthiggs/mc.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "latthiggs/errors.hpp"
#include "latthiggs/parallel.hpp"

namespace latthiggs {

void McConfig::validate() const {
    if (sweeps < 1) throw std::invalid_argument("mc: sweeps must be positive (no samples otherwise)");
    if (burn_in < 0) throw std::invalid_argument("mc: burn_in must be nonnegative");
    if (stride < 1) throw std::invalid_argument("mc: stride must be >= 1");
    if (batches < 2) throw std::invalid_argument("mc: need at least two batches for an error bar");
    if (chains < 1) throw std::invalid_argument("mc: chains must be positive");
    if (sweeps / stride < batches) throw std::invalid_argument("mc: fewer measurements than batches");
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double mc_uniform(std::uint64_t seed, std::uint64_t chain, std::uint64_t sweep, std::uint64_t site) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ chain);
    h = splitmix(h ^ sweep);
    h = splitmix(h ^ site);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double flip_delta_log_weight(const BoxGeometry& g, const Form& sigma, std::size_t e, const ModelParams& p) {
    // flipping e toggles sigma_e and the parity of every plaquette containing e
    double dl = sigma[e] ? 4.0 * p.kappa : -4.0 * p.kappa;
    for (auto pl : g.cofaces(1, e)) {
        int par = 0;
        for (auto f : g.faces(2, pl.cell)) par ^= sigma[f.cell] & 1;
        dl += par ? 4.0 * p.beta : -4.0 * p.beta;
    }
    return dl;
}

double metropolis_acceptance(const BoxGeometry& g, const Form& sigma, std::size_t e, const ModelParams& p) {
    return std::min(1.0, std::exp(flip_delta_log_weight(g, sigma, e, p)));
}

double integrated_autocorrelation(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 4) return 0.5;
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    c0 /= n;
    if (c0 == 0.0) return 0.5;
    double tau = 0.5;
    for (std::size_t t = 1; t < n / 2; ++t) {
        double c = 0.0;
        for (std::size_t i = 0; i + t < n; ++i) c += (x[i] - mean) * (x[i + t] - mean);
        c /= (n - t);
        tau += c / c0;
        if (static_cast<double>(t) >= 6.0 * tau) break;
    }
    return tau;
}

McResult sample_expectation(const Chain& gamma, const ModelParams& p, const McConfig& mc) {
    p.validate();
    mc.validate();
    if (p.m != 2 || p.n != 2) throw UnsupportedError("the sampler supports m = n = 2 only");
    BoxGeometry g(p.d, p.N);
    if (gamma.degree() != 1 || gamma.size() != g.count(1)) throw DegreeError("gamma must be a 1-chain on the box");

    const std::size_t E = g.count(1), P = g.count(2);
    std::vector<std::uint32_t> line;
    for (std::size_t e = 0; e < E; ++e)
        if (gamma[e] % 2) line.push_back(static_cast<std::uint32_t>(e));

    std::vector<std::vector<double>> series(mc.chains);
    std::vector<std::size_t> accepted(mc.chains, 0), proposed(mc.chains, 0);
    parallel_for(static_cast<std::size_t>(mc.chains), mc.jobs, [&](std::size_t c) {
        std::vector<std::uint8_t> sigma(E, 0), dpar(P, 0);
        auto& out = series[c];
        out.reserve(static_cast<std::size_t>(mc.sweeps / mc.stride));
        const long total = static_cast<long>(mc.burn_in) + mc.sweeps;
        for (long sw = 0; sw < total; ++sw) {
            for (std::size_t e = 0; e < E; ++e) {
                double dl = sigma[e] ? 4.0 * p.kappa : -4.0 * p.kappa;
                for (auto pl : g.cofaces(1, e)) dl += dpar[pl.cell] ? 4.0 * p.beta : -4.0 * p.beta;
                ++proposed[c];
                if (dl >= 0.0 || mc_uniform(mc.seed, c, static_cast<std::uint64_t>(sw), e) < std::exp(dl)) {
                    sigma[e] ^= 1;
                    for (auto pl : g.cofaces(1, e)) dpar[pl.cell] ^= 1;
                    ++accepted[c];
                }
            }
            if (sw >= mc.burn_in && (sw - mc.burn_in) % mc.stride == 0) {
                int par = 0;
                for (auto e : line) par ^= sigma[e];
                out.push_back(par ? -1.0 : 1.0);
            }
        }
    });

    McResult r;
    std::size_t acc = 0, prop = 0;
    for (int c = 0; c < mc.chains; ++c) {
        const auto& s = series[c];
        r.samples += s.size();
        acc += accepted[c];
        prop += proposed[c];
        const std::size_t bs = s.size() / mc.batches;
        for (int b = 0; b < mc.batches; ++b) {
            double m = 0.0;
            for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) m += s[i];
            r.batch_means.push_back(m / bs);
        }
    }
    const double B = static_cast<double>(r.batch_means.size());
    const double total = std::accumulate(r.batch_means.begin(), r.batch_means.end(), 0.0);
    r.mean = total / B;
    double var = 0.0;
    for (double m : r.batch_means) {
        double loo = (total - m) / (B - 1.0);
        var += (loo - r.mean) * (loo - r.mean);
    }
    r.stderr_ = std::sqrt((B - 1.0) / B * var);
    r.acceptance = prop ? static_cast<double>(acc) / prop : 0.0;
    r.tau_int = integrated_autocorrelation(series[0]);
    return r;
}

}  // namespace latthiggs
