#include "latthiggs/dec.hpp"

#include <algorithm>
#include <string>

#include "latthiggs/errors.hpp"

namespace latthiggs {

namespace {

void combinations(int d, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int a = start; a < d; ++a) {
        cur.push_back(a);
        combinations(d, k, a + 1, cur, out);
        cur.pop_back();
    }
}

std::size_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

int mod(long long v, int q) {
    long long r = v % q;
    return static_cast<int>(r < 0 ? r + q : r);
}

}  // namespace

BoxGeometry::BoxGeometry(int d, int N) : d_(d), N_(N) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (N < 1) throw std::invalid_argument("side length must be >= 1");
    blocks_.resize(d + 1);
    counts_.resize(d + 1);
    for (int k = 0; k <= d; ++k) {
        std::vector<std::vector<int>> combos;
        std::vector<int> cur;
        combinations(d, k, 0, cur, combos);
        std::size_t off = 0;
        for (auto& axes : combos) {
            Block b;
            b.axes = axes;
            b.extent.assign(d, N + 1);
            for (int a : axes) b.extent[a] = N;
            b.offset = off;
            b.size = 1;
            for (int e : b.extent) b.size *= static_cast<std::size_t>(e);
            off += b.size;
            blocks_[k].push_back(std::move(b));
        }
        counts_[k] = off;
        if (off >= (std::size_t{1} << 31)) throw std::invalid_argument("box too large");
    }

    face_start_.resize(d + 1);
    face_list_.resize(d + 1);
    coface_start_.resize(d + 1);
    coface_list_.resize(d + 1);
    for (int k = 1; k <= d; ++k) {
        auto& start = face_start_[k];
        auto& list = face_list_[k];
        start.reserve(counts_[k] + 1);
        start.push_back(0);
        for (std::size_t i = 0; i < counts_[k]; ++i) {
            Cell c = cell(k, i);
            for (int j = 0; j < k; ++j) {
                Cell f;
                f.anchor = c.anchor;
                f.axes = c.axes;
                f.axes.erase(f.axes.begin() + j);
                int s = (j % 2 == 0) ? 1 : -1;
                std::size_t lo = index(f);
                f.anchor[c.axes[j]] += 1;
                std::size_t hi = index(f);
                list.push_back({static_cast<std::uint32_t>(hi), s});
                list.push_back({static_cast<std::uint32_t>(lo), -s});
            }
            start.push_back(static_cast<std::uint32_t>(list.size()));
        }
        // invert into cofaces of (k-1)-cells
        std::vector<std::uint32_t> deg(counts_[k - 1] + 1, 0);
        for (auto& inc : list) deg[inc.cell + 1]++;
        for (std::size_t i = 1; i < deg.size(); ++i) deg[i] += deg[i - 1];
        coface_start_[k - 1] = deg;
        auto& clist = coface_list_[k - 1];
        clist.resize(list.size());
        std::vector<std::uint32_t> fill(deg.begin(), deg.end() - 1);
        for (std::size_t i = 0; i < counts_[k]; ++i)
            for (std::uint32_t t = start[i]; t < start[i + 1]; ++t)
                clist[fill[list[t].cell]++] = {static_cast<std::uint32_t>(i), list[t].sign};
    }
}

std::size_t BoxGeometry::count(int k) const {
    if (k < 0 || k > d_) return 0;
    return counts_[k];
}

std::size_t BoxGeometry::count_formula(int d, int N, int k) {
    std::size_t r = binom(d, k);
    for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(N);
    for (int i = k; i < d; ++i) r *= static_cast<std::size_t>(N + 1);
    return r;
}

std::size_t BoxGeometry::block_of(int k, const std::vector<int>& axes) const {
    const auto& bl = blocks_[k];
    for (std::size_t b = 0; b < bl.size(); ++b)
        if (bl[b].axes == axes) return b;
    throw DegreeError("axis set is not sorted or out of range");
}

bool BoxGeometry::contains(const Cell& c) const {
    if (static_cast<int>(c.anchor.size()) != d_ || c.degree() > d_) return false;
    if (!std::is_sorted(c.axes.begin(), c.axes.end())) return false;
    if (std::adjacent_find(c.axes.begin(), c.axes.end()) != c.axes.end()) return false;
    std::vector<int> ext(d_, N_ + 1);
    for (int a : c.axes) {
        if (a < 0 || a >= d_) return false;
        ext[a] = N_;
    }
    for (int i = 0; i < d_; ++i)
        if (c.anchor[i] < 0 || c.anchor[i] >= ext[i]) return false;
    return true;
}

std::size_t BoxGeometry::index(const Cell& c) const {
    if (!contains(c)) throw std::out_of_range("cell does not lie in the box");
    int k = c.degree();
    const Block& b = blocks_[k][block_of(k, c.axes)];
    std::size_t r = 0;
    for (int i = d_ - 1; i >= 0; --i) r = r * static_cast<std::size_t>(b.extent[i]) + static_cast<std::size_t>(c.anchor[i]);
    return b.offset + r;
}

Cell BoxGeometry::cell(int k, std::size_t idx) const {
    if (k < 0 || k > d_ || idx >= counts_[k]) throw std::out_of_range("cell index out of range");
    const auto& bl = blocks_[k];
    auto it = std::upper_bound(bl.begin(), bl.end(), idx, [](std::size_t v, const Block& b) { return v < b.offset; });
    const Block& b = *(it - 1);
    Cell c;
    c.axes = b.axes;
    c.anchor.resize(d_);
    std::size_t r = idx - b.offset;
    for (int i = 0; i < d_; ++i) {
        c.anchor[i] = static_cast<int>(r % static_cast<std::size_t>(b.extent[i]));
        r /= static_cast<std::size_t>(b.extent[i]);
    }
    return c;
}

std::span<const Incidence> BoxGeometry::faces(int k, std::size_t idx) const {
    if (k < 1 || k > d_) throw DegreeError("faces: degree out of range");
    const auto& s = face_start_[k];
    return {face_list_[k].data() + s[idx], face_list_[k].data() + s[idx + 1]};
}

std::span<const Incidence> BoxGeometry::cofaces(int k, std::size_t idx) const {
    if (k < 0 || k >= d_) throw DegreeError("cofaces: degree out of range");
    const auto& s = coface_start_[k];
    return {coface_list_[k].data() + s[idx], coface_list_[k].data() + s[idx + 1]};
}

bool BoxGeometry::edge_complete(std::size_t e) const {
    Cell c = cell(1, e);
    for (int i = 0; i < d_; ++i) {
        if (i == c.axes[0]) continue;
        if (c.anchor[i] < 1 || c.anchor[i] > N_ - 1) return false;
    }
    return true;
}

std::size_t BoxGeometry::vertex_index(std::span<const int> x) const {
    Cell c;
    c.anchor.assign(x.begin(), x.end());
    return index(c);
}

Form::Form(int degree, int q, std::size_t size) : degree_(degree), q_(q), values_(size, 0) {
    if (q < 2 || q > 255) throw std::invalid_argument("modulus must lie in [2, 255]");
}

void Form::set(std::size_t idx, long long v) { values_.at(idx) = static_cast<std::uint8_t>(mod(v, q_)); }

int Form::at(const BoxGeometry& g, const Cell& c) const {
    if (c.degree() != degree_) throw DegreeError("cell degree does not match form degree");
    int v = values_[g.index(c)];
    return c.sign > 0 ? v : mod(-v, q_);
}

std::size_t Form::support_size() const {
    return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](std::uint8_t v) { return v != 0; }));
}

Form Form::operator+(const Form& o) const {
    if (o.degree_ != degree_ || o.q_ != q_ || o.size() != size()) throw DegreeError("form shape mismatch");
    Form r = *this;
    for (std::size_t i = 0; i < size(); ++i) r.values_[i] = static_cast<std::uint8_t>((values_[i] + o.values_[i]) % q_);
    return r;
}

Form Form::operator-() const {
    Form r = *this;
    for (auto& v : r.values_) v = static_cast<std::uint8_t>((q_ - v) % q_);
    return r;
}

Form Form::operator-(const Form& o) const { return *this + (-o); }

void Chain::add(const BoxGeometry& g, const Cell& c, long long mult) {
    if (c.degree() != degree_) throw DegreeError("cell degree does not match chain degree");
    coeffs_.at(g.index(c)) += c.sign * mult;
}

std::size_t Chain::support_size() const {
    return static_cast<std::size_t>(std::count_if(coeffs_.begin(), coeffs_.end(), [](long long v) { return v != 0; }));
}

long long Chain::mass() const {
    long long s = 0;
    for (long long v : coeffs_) s += v < 0 ? -v : v;
    return s;
}

Chain Chain::operator+(const Chain& o) const {
    if (o.degree_ != degree_ || o.size() != size()) throw DegreeError("chain shape mismatch");
    Chain r = *this;
    for (std::size_t i = 0; i < size(); ++i) r.coeffs_[i] += o.coeffs_[i];
    return r;
}

Chain Chain::operator-() const {
    Chain r = *this;
    for (auto& v : r.coeffs_) v = -v;
    return r;
}

Form exterior_derivative(const BoxGeometry& g, const Form& w) {
    int k = w.degree();
    if (k < 0 || k >= g.dim()) throw DegreeError("exterior derivative needs degree < d");
    Form r = Form::zero(g, k + 1, w.modulus());
    for (std::size_t p = 0; p < r.size(); ++p) {
        long long s = 0;
        for (auto inc : g.faces(k + 1, p)) s += inc.sign * w[inc.cell];
        r.set(p, s);
    }
    return r;
}

Form coderivative(const BoxGeometry& g, const Form& w) {
    int k = w.degree();
    if (k < 1 || k > g.dim()) throw DegreeError("coderivative needs degree >= 1");
    Form r = Form::zero(g, k - 1, w.modulus());
    for (std::size_t e = 0; e < r.size(); ++e) {
        long long s = 0;
        for (auto inc : g.cofaces(k - 1, e)) s += inc.sign * w[inc.cell];
        r.set(e, s);
    }
    return r;
}

Chain boundary(const BoxGeometry& g, const Chain& c) {
    int k = c.degree();
    if (k < 1 || k > g.dim()) throw DegreeError("boundary needs degree >= 1");
    Chain r = Chain::zero(g, k - 1);
    for (std::size_t p = 0; p < c.size(); ++p) {
        if (c[p] == 0) continue;
        for (auto inc : g.faces(k, p)) r[inc.cell] += inc.sign * c[p];
    }
    return r;
}

Chain hat_boundary(const BoxGeometry& g, int k, std::size_t idx) {
    Chain r = Chain::zero(g, k + 1);
    for (auto inc : g.cofaces(k, idx)) r[inc.cell] += inc.sign;
    return r;
}

int evaluate(const Form& w, const Chain& c) {
    if (w.degree() != c.degree() || w.size() != c.size()) throw DegreeError("evaluate: degree mismatch");
    long long s = 0;
    int q = w.modulus();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0) s = (s + mod(c[i], q) * w[i]) % q;
    return static_cast<int>(s);
}

}  // namespace latthiggs
