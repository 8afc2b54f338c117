#pragma once

// Cells, forms and chains on the box {0,...,N}^d, with d, delta and the
// boundary operators.

#include <cstdint>
#include <span>
#include <vector>

namespace latthiggs {

struct Cell {
    std::vector<int> anchor;
    std::vector<int> axes;  // sorted, distinct
    int sign = 1;

    int degree() const { return static_cast<int>(axes.size()); }
    Cell operator-() const {
        Cell c = *this;
        c.sign = -c.sign;
        return c;
    }
    bool operator==(const Cell&) const = default;
};

struct Incidence {
    std::uint32_t cell;
    int sign;
};

class BoxGeometry {
public:
    BoxGeometry(int d, int N);

    int dim() const { return d_; }
    int side() const { return N_; }

    std::size_t count(int k) const;
    static std::size_t count_formula(int d, int N, int k);

    // Index of the positively oriented cell underlying c (sign is ignored).
    std::size_t index(const Cell& c) const;
    Cell cell(int k, std::size_t idx) const;
    bool contains(const Cell& c) const;

    // Faces of a positive k-cell, with the standard cubical signs.
    std::span<const Incidence> faces(int k, std::size_t idx) const;
    // Positive (k+1)-cells having the given k-cell as a face (the hat boundary).
    std::span<const Incidence> cofaces(int k, std::size_t idx) const;

    // An edge is complete when it has the full 2(d-1) plaquettes of the
    // infinite lattice around it.
    bool edge_complete(std::size_t e) const;

    std::size_t vertex_index(std::span<const int> x) const;

private:
    struct Block {
        std::vector<int> axes;
        std::vector<int> extent;  // per coordinate
        std::size_t offset;
        std::size_t size;
    };

    int d_, N_;
    std::vector<std::vector<Block>> blocks_;  // per degree
    std::vector<std::size_t> counts_;
    std::vector<std::vector<std::uint32_t>> face_start_, coface_start_;
    std::vector<std::vector<Incidence>> face_list_, coface_list_;

    std::size_t block_of(int k, const std::vector<int>& axes) const;
};

class Form {
public:
    Form() = default;
    Form(int degree, int q, std::size_t size);
    static Form zero(const BoxGeometry& g, int degree, int q) {
        return Form(degree, q, g.count(degree));
    }

    int degree() const { return degree_; }
    int modulus() const { return q_; }
    std::size_t size() const { return values_.size(); }

    int operator[](std::size_t idx) const { return values_[idx]; }
    void set(std::size_t idx, long long v);
    // Value on an oriented cell: omega(-c) = -omega(c).
    int at(const BoxGeometry& g, const Cell& c) const;

    std::size_t support_size() const;
    bool is_zero() const { return support_size() == 0; }

    Form operator+(const Form& o) const;
    Form operator-(const Form& o) const;
    Form operator-() const;
    bool operator==(const Form&) const = default;

private:
    int degree_ = 0;
    int q_ = 2;
    std::vector<std::uint8_t> values_;
};

class Chain {
public:
    Chain() = default;
    Chain(int degree, std::size_t size) : degree_(degree), coeffs_(size, 0) {}
    static Chain zero(const BoxGeometry& g, int degree) { return Chain(degree, g.count(degree)); }

    int degree() const { return degree_; }
    std::size_t size() const { return coeffs_.size(); }
    long long operator[](std::size_t idx) const { return coeffs_[idx]; }
    long long& operator[](std::size_t idx) { return coeffs_[idx]; }

    void add(const BoxGeometry& g, const Cell& c, long long mult = 1);
    std::size_t support_size() const;
    // Sum of |coefficients|; equals the number of edges for a path.
    long long mass() const;

    Chain operator+(const Chain& o) const;
    Chain operator-() const;
    bool operator==(const Chain&) const = default;

private:
    int degree_ = 0;
    std::vector<long long> coeffs_;
};

Form exterior_derivative(const BoxGeometry& g, const Form& w);
Form coderivative(const BoxGeometry& g, const Form& w);
Chain boundary(const BoxGeometry& g, const Chain& c);
Chain hat_boundary(const BoxGeometry& g, int k, std::size_t idx);
int evaluate(const Form& w, const Chain& c);

}  // namespace latthiggs
