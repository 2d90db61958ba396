#include "mwhardy/grid.hpp"

#include <algorithm>
#include <cmath>

#include "mwhardy/error.hpp"
#include "mwhardy/parallel.hpp"

namespace mwhardy {

Grid Grid::make(int n, double L, double h) {
    if (n < 1 || n > 2) throw PreconditionError("grid: dimension must be 1 or 2");
    if (!(L > 0.0) || !(h > 0.0)) throw PreconditionError("grid: L and h must be positive");
    const double ratio = 2.0 * L / h;
    if (ratio != std::round(ratio) || ratio < 1.0) throw AlignmentError("grid: 2L/h must be a positive integer");
    return Grid{n, L, h, static_cast<int>(ratio)};
}

int Grid::axis_cell(double v) const { return static_cast<int>(std::floor((v + L) / h)); }

std::vector<std::size_t> Grid::indices_in(const Cube& q) const {
    std::array<int, 2> lo{0, 0}, hi{0, 0};
    for (int d = 0; d < n; ++d) {
        // centers c_i = -L + (i + 1/2) h inside [q.lo, q.hi]
        lo[d] = std::max(0, static_cast<int>(std::ceil((q.center[d] - 0.5 * q.edge + L) / h - 0.5)));
        hi[d] = std::min(cells - 1, static_cast<int>(std::floor((q.center[d] + 0.5 * q.edge + L) / h - 0.5)));
    }
    if (n == 1) hi[1] = 0;
    std::vector<std::size_t> out;
    for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) out.push_back(index(i, j));
    return out;
}

bool Grid::contains(const Cube& q) const {
    for (int d = 0; d < n; ++d)
        if (q.center[d] - 0.5 * q.edge < -L || q.center[d] + 0.5 * q.edge > L) return false;
    return true;
}

double VectorField::max_abs() const {
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) best = std::max(best, at(i).norm());
    return best;
}

bool VectorField::is_zero() const {
    return std::all_of(data.begin(), data.end(), [](cplx v) { return v == cplx(0.0); });
}

bool VectorField::finite() const {
    return std::all_of(data.begin(), data.end(), [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

Cube VectorField::support_box() const {
    std::array<int, 2> lo{grid.cells, grid.n == 2 ? grid.cells : 0}, hi{-1, grid.n == 2 ? -1 : 0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (at(i).isZero(0.0)) continue;
        const auto c = grid.cell(i);
        for (int d = 0; d < grid.n; ++d) {
            lo[d] = std::min(lo[d], c[d]);
            hi[d] = std::max(hi[d], c[d]);
        }
    }
    if (hi[0] < 0) return Cube{grid.n, {0.0, 0.0}, 0.0};
    // Smallest cube holding the bounding box of the support cells.
    Cube q{grid.n, {0.0, 0.0}, 0.0};
    for (int d = 0; d < grid.n; ++d) {
        const double a = -grid.L + lo[d] * grid.h, b = -grid.L + (hi[d] + 1) * grid.h;
        q.center[d] = 0.5 * (a + b);
        q.edge = std::max(q.edge, b - a);
    }
    return q;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
    return *this;
}

VectorField& VectorField::operator*=(cplx c) {
    for (auto& v : data) v *= c;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(cplx c, VectorField a) { return a *= c; }

double ScalarField::max() const {
    double best = 0.0;
    for (double v : values) best = std::max(best, v);
    return best;
}

double integrate(const Grid& g, const std::vector<double>& values) {
    return pairwise_sum(values) * g.cell_volume();
}

} // namespace mwhardy

namespace mwhardy {

std::vector<double> dyadic_scales(const Grid& g) {
    const int lo = static_cast<int>(std::ceil(std::log2(4.0 * g.h) - 1e-12));
    const int hi = static_cast<int>(std::ceil(std::log2(g.L) - 1e-12));
    std::vector<double> out;
    for (int j = lo; j <= hi; ++j) out.push_back(std::ldexp(1.0, j));
    return out;
}

} // namespace mwhardy
