#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mwhardy/geometry.hpp"

namespace mwhardy {

using cplx = std::complex<double>;

/// Uniform cell-centered grid on [-L, L]^n: sample i sits at -L + (i + 1/2) h.
struct Grid {
    int n = 1;
    double L = 1.0;
    double h = 1.0 / 16.0;
    int cells = 32; // per axis

    /// Requires 2L/h to be a positive integer.
    static Grid make(int n, double L, double h);

    std::size_t size() const { return n == 1 ? static_cast<std::size_t>(cells) : static_cast<std::size_t>(cells) * cells; }
    double coord(int i) const { return -L + (i + 0.5) * h; }
    double cell_volume() const { return n == 1 ? h : h * h; }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells) * j; }
    std::array<int, 2> cell(std::size_t idx) const {
        return {static_cast<int>(idx % cells), n == 2 ? static_cast<int>(idx / cells) : 0};
    }
    Point point(std::size_t idx) const {
        const auto c = cell(idx);
        return {coord(c[0]), n == 2 ? coord(c[1]) : 0.0};
    }
    /// Cell index along one axis containing coordinate v (may be out of range).
    int axis_cell(double v) const;
    /// Samples whose centers lie in the closed cube, clipped to the domain.
    std::vector<std::size_t> indices_in(const Cube& q) const;
    bool contains(const Cube& q) const;
    Cube domain() const { return Cube{n, {0.0, 0.0}, 2.0 * L}; }
    bool operator==(const Grid& o) const { return n == o.n && L == o.L && h == o.h; }
};

/// m x m matrix per grid sample, stored column-major back to back.
struct MatrixField {
    int m = 1;
    std::vector<cplx> data;

    std::size_t size() const { return data.size() / static_cast<std::size_t>(m * m); }
    Eigen::Map<const Eigen::MatrixXcd> at(std::size_t i) const { return {data.data() + i * m * m, m, m}; }
    Eigen::Map<Eigen::MatrixXcd> at(std::size_t i) { return {data.data() + i * m * m, m, m}; }
};

/// C^m-valued grid function.
struct VectorField {
    Grid grid;
    int m = 1;
    std::vector<cplx> data;

    VectorField() = default;
    VectorField(const Grid& g, int m_) : grid(g), m(m_), data(g.size() * m_, cplx(0.0)) {}

    Eigen::Map<const Eigen::VectorXcd> at(std::size_t i) const { return {data.data() + i * m, m}; }
    Eigen::Map<Eigen::VectorXcd> at(std::size_t i) { return {data.data() + i * m, m}; }
    double max_abs() const;
    bool is_zero() const;
    /// Smallest grid-aligned box holding every nonzero sample; edge 0 when zero.
    Cube support_box() const;
    bool finite() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(cplx c);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(cplx c, VectorField a);

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double v = 0.0) : grid(g), values(g.size(), v) {}
    double max() const;
};

/// Midpoint-rule integral of a scalar field over the given samples.
double integrate(const Grid& g, const std::vector<double>& values);

} // namespace mwhardy

namespace mwhardy {

/// Dyadic scales t = 2^j for ceil(log2(4h)) <= j <= ceil(log2(L)).
std::vector<double> dyadic_scales(const Grid& g);

} // namespace mwhardy
