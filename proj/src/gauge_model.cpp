#include "latthiggs/gauge_model.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "latthiggs/errors.hpp"

namespace latthiggs {

void ModelParams::validate() const {
    if (d < 2) throw std::invalid_argument("d must be >= 2");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (m < 2 || n < 2 || m > 255 || n > 255) throw std::invalid_argument("m and n must lie in [2, 255]");
    if (!(std::isfinite(beta) && beta >= 0.0)) throw std::invalid_argument("beta must be finite and >= 0");
    if (!(std::isfinite(kappa) && kappa >= 0.0)) throw std::invalid_argument("kappa must be finite and >= 0");
}

GaugeConfig zero_config(const BoxGeometry& g, const ModelParams& p) {
    return {Form::zero(g, 1, p.m), Form::zero(g, 0, p.n)};
}

double hamiltonian(const BoxGeometry& g, const GaugeConfig& cfg, const ModelParams& p) {
    const double tau = 2.0 * std::numbers::pi;
    Form ds = exterior_derivative(g, cfg.sigma);
    Form dphi = exterior_derivative(g, cfg.phi);
    double hp = 0.0, he = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) hp += 2.0 * std::cos(tau * ds[i] / p.m);
    for (std::size_t e = 0; e < cfg.sigma.size(); ++e)
        he += 2.0 * std::cos(tau * (static_cast<double>(cfg.sigma[e]) / p.m - static_cast<double>(dphi[e]) / p.n));
    return p.beta * hp + p.kappa * he;
}

double activity(const BoxGeometry& g, const Form& sigma, double beta, double kappa) {
    if (sigma.modulus() != 2) throw UnsupportedError("activity is defined for Z_2 only");
    if (sigma.degree() != 1) throw DegreeError("activity expects a 1-form");
    auto ds = exterior_derivative(g, sigma);
    double oriented_p = 2.0 * static_cast<double>(ds.support_size());
    double oriented_e = 2.0 * static_cast<double>(sigma.support_size());
    return std::exp(-2.0 * beta * oriented_p - 2.0 * kappa * oriented_e);
}

std::complex<double> wilson(const BoxGeometry& g, const GaugeConfig& cfg, const Chain& gamma) {
    if (!is_path(g, gamma)) throw std::invalid_argument("wilson: gamma is not a path");
    int m = cfg.sigma.modulus(), n = cfg.phi.modulus();
    int a = evaluate(cfg.sigma, gamma);
    int b = evaluate(cfg.phi, boundary(g, gamma));
    const double tau = 2.0 * std::numbers::pi;
    double arg = tau * (static_cast<double>(a) / m - static_cast<double>(b) / n);
    return std::polar(1.0, arg);
}

GaugeConfig gauge_transform(const BoxGeometry& g, const GaugeConfig& cfg, const Form& eta) {
    if (cfg.sigma.modulus() != cfg.phi.modulus()) throw UnsupportedError("gauge transform needs m = n");
    if (eta.degree() != 0 || eta.modulus() != cfg.phi.modulus()) throw DegreeError("eta must be a 0-form mod m");
    return {cfg.sigma + exterior_derivative(g, eta), cfg.phi + eta};
}

double log_unitary_weight(const BoxGeometry& g, const Form& sigma, const ModelParams& p) {
    if (p.m != p.n) throw UnsupportedError("unitary gauge needs m = n");
    const double tau = 2.0 * std::numbers::pi;
    Form ds = exterior_derivative(g, sigma);
    double hp = 0.0, he = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) hp += 2.0 * std::cos(tau * ds[i] / p.m);
    for (std::size_t e = 0; e < sigma.size(); ++e) he += 2.0 * std::cos(tau * sigma[e] / p.m);
    return p.beta * hp + p.kappa * he;
}

double unitary_weight(const BoxGeometry& g, const Form& sigma, const ModelParams& p) {
    return std::exp(log_unitary_weight(g, sigma, p));
}

bool is_path(const BoxGeometry& g, const Chain& gamma) {
    if (gamma.degree() != 1) return false;
    std::size_t nv = g.count(0);
    std::vector<int> net(nv, 0);
    std::vector<std::size_t> parent(nv);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t edges = 0, touched_root = nv;
    for (std::size_t e = 0; e < gamma.size(); ++e) {
        long long c = gamma[e];
        if (c == 0) continue;
        if (c != 1 && c != -1) return false;
        auto f = g.faces(1, e);  // {head, +1}, {tail, -1}
        std::size_t head = f[0].cell, tail = f[1].cell;
        if (c < 0) std::swap(head, tail);
        net[tail] += 1;
        net[head] -= 1;
        parent[find(head)] = find(tail);
        touched_root = tail;
        ++edges;
    }
    if (edges == 0) return true;
    int plus = 0, minus = 0;
    for (std::size_t v = 0; v < nv; ++v) {
        if (net[v] == 1) ++plus;
        else if (net[v] == -1) ++minus;
        else if (net[v] != 0) return false;
    }
    if (plus > 1 || minus > 1 || plus != minus) return false;
    std::size_t root = find(touched_root);
    for (std::size_t e = 0; e < gamma.size(); ++e) {
        if (gamma[e] == 0) continue;
        if (find(g.faces(1, e)[0].cell) != root) return false;
    }
    return true;
}

Chain straight_path(const BoxGeometry& g, std::span<const int> start, int axis, int length) {
    Chain c = Chain::zero(g, 1);
    Cell e;
    e.anchor.assign(start.begin(), start.end());
    e.axes = {axis};
    for (int i = 0; i < length; ++i) {
        c.add(g, e);
        e.anchor[axis] += 1;
    }
    return c;
}

}  // namespace latthiggs
